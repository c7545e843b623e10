#pragma once

// Grammar-light token scanner for C++ sources. Comments and preprocessor
// lines are dropped, string literals are kept as single tokens. This is
// deliberately not a compiler frontend: extraction works on explicit
// syntactic markers only.

#include <string>
#include <string_view>
#include <vector>

namespace rosarch::detail {

struct Token {
  enum class Kind { Ident, Number, String, Punct };
  Kind kind = Kind::Punct;
  std::string text;  // for String: the unquoted value
  int line = 1;
};

std::vector<Token> tokenize_cpp(std::string_view text);

// Index of the matching closer for the opener at `open_index`, or npos.
std::size_t match_forward(const std::vector<Token>& tokens, std::size_t open_index);

}  // namespace rosarch::detail
