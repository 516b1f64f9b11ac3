#include "phlift/rational.hpp"

#include <cctype>

namespace phlift {

std::string rat_to_string(const Rat& r) {
  return r.get_str();
}

std::optional<Rat> rat_from_string(const std::string& s) {
  if (s.empty()) return std::nullopt;
  // mpq_class::set_str accepts whitespace and some forms we do not want;
  // validate the shape first: [-]digits[/digits]
  std::size_t i = 0;
  if (s[i] == '-') ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++digits;
  }
  if (digits == 0) return std::nullopt;
  if (i < s.size()) {
    if (s[i] != '/') return std::nullopt;
    ++i;
    std::size_t den_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++den_digits;
    }
    if (den_digits == 0 || i != s.size()) return std::nullopt;
  }
  Rat r;
  if (r.set_str(s, 10) != 0) return std::nullopt;
  if (r.get_den() == 0) return std::nullopt;
  r.canonicalize();
  return r;
}

}  // namespace phlift
