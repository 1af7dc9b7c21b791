#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xnas::io {

// Shortest decimal representation that round-trips the exact double.
// Keeps CSV output byte-reproducible.
std::string format_number(double value);
std::string format_number(std::int64_t value);
std::string format_number(int value);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace xnas::io
