#pragma once

#include <string>

namespace jtm {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// As format_double, but non-finite values become JSON `null`.
std::string format_json_double(double value);

/// Parses a full decimal token (no surrounding text). Throws Error(kSyntax).
double parse_double(const std::string& text);

}  // namespace jtm
