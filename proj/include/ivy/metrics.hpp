#pragma once

#include "ivy/expression.hpp"
#include "ivy/json.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace ivy {

/// (examples - excluded) / templates. Throws DivisionByZero when there are
/// no templates.
double compression_ratio(std::size_t n_examples, std::size_t n_excluded, std::size_t n_templates);

enum class SizeMeasure { Loc, Ast };
std::string_view measure_name(SizeMeasure m);

/// Node count. Atomics, objects, lists, object fields, references,
/// interpolation segments and conditionals count one each.
std::size_t ast_size(const Expression& e);
std::size_t ast_size(const Json& v);
/// Lines of the canonical 2-space print.
std::size_t loc_size(const Json& v);
std::size_t loc_size(const Expression& e);

/// Total example size over template size. Throws EmptyExampleSet.
double concatenation_ratio(const std::vector<Json>& examples, const Expression& template_body, SizeMeasure measure);

/// Checks every example in a corpus manifest against the template that
/// claims to cover it. Relative paths resolve against the manifest's
/// directory. Throws MissingSettings, NotFound (unknown template) and Io.
Json verify_coverage(const std::filesystem::path& manifest);

/// Plain-text rendering of a verify_coverage report.
std::string coverage_table(const Json& report);

/// Pointers (up to `limit`) where two documents differ, with both values.
Json structural_diff(const Json& expected, const Json& actual, std::size_t limit = 20);

}  // namespace ivy
