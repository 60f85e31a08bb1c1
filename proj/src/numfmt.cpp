#include "jtm/numfmt.hpp"

#include <charconv>
#include <cmath>

#include "jtm/error.hpp"

namespace jtm {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string format_json_double(double value) {
  if (!std::isfinite(value)) return "null";
  return format_double(value);
}

double parse_double(const std::string& text) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  if (begin < end && *begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw Error(ErrorCode::kSyntax, "not a number: '" + text + "'");
  }
  return value;
}

}  // namespace jtm
