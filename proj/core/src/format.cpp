#include "driftgate/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace driftgate {

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

bool parse_int(const std::string& text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace driftgate
