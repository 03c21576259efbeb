#pragma once

#include "ivy/json.hpp"
#include "ivy/model.hpp"

#include <string>
#include <string_view>

namespace ivy {

/// Key that marks a conditional object in template bodies.
inline constexpr std::string_view kCondKey = "$cond";
/// Reserved settings entry holding the dataset filters.
inline constexpr std::string_view kFiltersKey = "$filters";

// Template bodies.
Expression parse_body(const Json& body);
Json serialize_body(const Expression& body);

/// Bracket scanning of a single string value: `[NAME]` alone is a typed
/// reference, `[NAME]` among other text is an interpolation, `[[` is a
/// literal bracket.
Expression parse_string_value(const std::string& text);

// Template documents (`*.ivy.json`).
Template parse_template(std::string_view text);
Template template_from_json(const Json& doc);
Json template_to_json(const Template& t);
/// Canonical document text, newline terminated.
std::string serialize_template(const Template& t);

Parameter parameter_from_json(const Json& doc);
Json parameter_to_json(const Parameter& p);

// Settings files (`*.settings.json`).
Settings parse_settings(std::string_view text);
Settings settings_from_json(const Json& doc);
Json settings_to_json(const Settings& s);
std::string serialize_settings(const Settings& s);

ArgumentValue argument_from_json(const Json& value);
Filter filter_from_json(const Json& doc);
Json filter_to_json(const Filter& f);

/// canonical(parse_json(text)) plus the trailing newline every serializer emits.
std::string canonical_document(std::string_view text);

}  // namespace ivy
