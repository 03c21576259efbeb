#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

namespace ivy {

// Object key order is significant everywhere in the engine, so every JSON
// value is an insertion-ordered document.
using Json = nlohmann::ordered_json;

/// Parses UTF-8 text into a Json value. Rejects non-finite numbers.
/// Throws ivy::Error(JsonSyntax) on malformed input.
Json parse_json(std::string_view text);

/// Canonical text form: 2-space indent, key order preserved, no trailing newline.
std::string canonical(const Json& value);

/// Shortest round-trip text for a number, `true`/`false` for booleans, the
/// raw text for strings and the empty string for null. Used when splicing
/// values into interpolated strings.
std::string splice_text(const Json& value);

bool is_atomic(const Json& value);

/// Escapes one reference token for a JSON Pointer (RFC 6901).
std::string pointer_escape(std::string_view token);

}  // namespace ivy
