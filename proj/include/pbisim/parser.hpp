#pragma once

#include "pbisim/term.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace pbisim {

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, std::size_t column, std::string token, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }
  std::size_t offset() const { return offset_; }
  void set_offset(std::size_t o) { offset_ = o; }

private:
  std::size_t line_, column_;
  std::string token_;
  std::size_t offset_ = 0;
};

NdTerm parse_nd(std::string_view text);
PTerm parse_p(std::string_view text);

// Tries the probabilistic sort first, then the non-deterministic one.
// On failure rethrows the error of whichever attempt read further.
std::variant<NdTerm, PTerm> parse_any(std::string_view text);

}  // namespace pbisim
