#pragma once

#include <string>

#include "json.hpp"

namespace cognav::detail {

// Canonical serialization shared by every document writer: object keys in
// sorted order (nlohmann's default map already sorts), two-space indent,
// doubles printed with %.6g, trailing newline. Serializing, reparsing, and
// serializing again reproduces the same bytes.
std::string canonical_dump(const nlohmann::json& j);

// %.6g rendering of a double as a JSON value.
std::string format_double(double v);

}  // namespace cognav::detail
