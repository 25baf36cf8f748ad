#pragma once

#include <cstdint>
#include <string>

namespace driftgate {

// Shortest decimal string that round-trips to the same double. Keeps CSV and
// SVG output byte-stable across runs and thread counts.
std::string format_double(double v);

std::string format_int(std::int64_t v);

// Strict numeric field parsing; the full field must be consumed.
bool parse_double(const std::string& text, double& out);
bool parse_int(const std::string& text, std::int64_t& out);

}  // namespace driftgate
