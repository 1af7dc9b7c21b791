#include "xnas/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace xnas::io {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // fold the negative-zero spelling
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string format_number(std::int64_t value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string format_number(int value) { return format_number(static_cast<std::int64_t>(value)); }

std::string join_csv(const std::vector<std::string>& fields) {
  std::string row;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) row += ',';
    row += fields[i];
  }
  return row;
}

}  // namespace xnas::io
