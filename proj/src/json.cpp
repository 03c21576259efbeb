#include "ivy/json.hpp"

#include "ivy/error.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace ivy {

namespace {

bool all_finite(const Json& value) {
    switch (value.type()) {
        case Json::value_t::number_float:
            return std::isfinite(value.get<double>());
        case Json::value_t::object:
            for (const auto& [key, child] : value.items()) {
                if (!all_finite(child)) return false;
            }
            return true;
        case Json::value_t::array:
            for (const auto& child : value) {
                if (!all_finite(child)) return false;
            }
            return true;
        default:
            return true;
    }
}

}  // namespace

Json parse_json(std::string_view text) {
    Json value;
    try {
        value = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::JsonSyntax, e.what(), {{"position", e.byte}});
    }
    if (!all_finite(value)) {
        throw Error(ErrorCode::JsonSyntax, "non-finite number in JSON input");
    }
    return value;
}

std::string canonical(const Json& value) {
    return value.dump(2, ' ', false, Json::error_handler_t::strict);
}

std::string splice_text(const Json& value) {
    switch (value.type()) {
        case Json::value_t::null:
            return {};
        case Json::value_t::string:
            return value.get<std::string>();
        case Json::value_t::boolean:
            return value.get<bool>() ? "true" : "false";
        case Json::value_t::number_integer:
            return std::to_string(value.get<std::int64_t>());
        case Json::value_t::number_unsigned:
            return std::to_string(value.get<std::uint64_t>());
        case Json::value_t::number_float: {
            std::array<char, 64> buf{};
            auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value.get<double>());
            return std::string(buf.data(), end);
        }
        default:
            return value.dump();
    }
}

bool is_atomic(const Json& value) {
    return !value.is_object() && !value.is_array() && !value.is_discarded() && !value.is_binary();
}

std::string pointer_escape(std::string_view token) {
    std::string out;
    out.reserve(token.size());
    for (char c : token) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

}  // namespace ivy
