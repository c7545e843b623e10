#include "cpp_tokens.hpp"

#include <cctype>

namespace rosarch::detail {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> tokenize_cpp(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto advance_line = [&](char c) {
    if (c == '\n') ++line;
  };

  while (i < n) {
    char c = text[i];
    if (c == '\n' || c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      advance_line(c);
      ++i;
      continue;
    }
    // Line comment
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    // Block comment
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) {
        advance_line(text[i]);
        ++i;
      }
      i = (i + 1 < n) ? i + 2 : n;
      continue;
    }
    // Preprocessor line (keep line counting intact across continuations)
    if (c == '#') {
      while (i < n && text[i] != '\n') {
        if (text[i] == '\\' && i + 1 < n && text[i + 1] == '\n') {
          ++line;
          i += 2;
          continue;
        }
        ++i;
      }
      continue;
    }
    // Raw string literal R"delim(...)delim"
    if (c == 'R' && i + 1 < n && text[i + 1] == '"') {
      std::size_t paren = text.find('(', i + 2);
      if (paren != std::string_view::npos) {
        std::string delim(text.substr(i + 2, paren - (i + 2)));
        std::string closer = ")" + delim + "\"";
        std::size_t end = text.find(closer, paren + 1);
        if (end != std::string_view::npos) {
          std::string value(text.substr(paren + 1, end - paren - 1));
          for (char v : value) advance_line(v);
          tokens.push_back({Token::Kind::String, std::move(value), line});
          i = end + closer.size();
          continue;
        }
      }
      // Fall through and treat 'R' as an identifier start.
    }
    if (c == '"') {
      std::string value;
      int start_line = line;
      ++i;
      while (i < n && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < n) {
          value.push_back(text[i]);
          value.push_back(text[i + 1]);
          i += 2;
          continue;
        }
        advance_line(text[i]);
        value.push_back(text[i]);
        ++i;
      }
      ++i;  // closing quote
      tokens.push_back({Token::Kind::String, std::move(value), start_line});
      continue;
    }
    if (c == '\'') {
      ++i;
      while (i < n && text[i] != '\'') {
        if (text[i] == '\\') ++i;
        if (i < n) ++i;
      }
      ++i;
      tokens.push_back({Token::Kind::Punct, "'", line});
      continue;
    }
    if (ident_start(c)) {
      std::size_t start = i;
      while (i < n && ident_char(text[i])) ++i;
      tokens.push_back({Token::Kind::Ident, std::string(text.substr(start, i - start)), line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < n && (ident_char(text[i]) || text[i] == '.')) ++i;
      tokens.push_back({Token::Kind::Number, std::string(text.substr(start, i - start)), line});
      continue;
    }
    if (c == ':' && i + 1 < n && text[i + 1] == ':') {
      tokens.push_back({Token::Kind::Punct, "::", line});
      i += 2;
      continue;
    }
    tokens.push_back({Token::Kind::Punct, std::string(1, c), line});
    ++i;
  }
  return tokens;
}

std::size_t match_forward(const std::vector<Token>& tokens, std::size_t open_index) {
  if (open_index >= tokens.size()) return std::string::npos;
  const std::string& open = tokens[open_index].text;
  std::string close;
  if (open == "(") close = ")";
  else if (open == "{") close = "}";
  else if (open == "[") close = "]";
  else if (open == "<") close = ">";
  else return std::string::npos;

  int depth = 0;
  for (std::size_t i = open_index; i < tokens.size(); ++i) {
    if (tokens[i].kind != Token::Kind::Punct) continue;
    if (tokens[i].text == open) ++depth;
    else if (tokens[i].text == close) {
      --depth;
      if (depth == 0) return i;
    }
  }
  return std::string::npos;
}

}  // namespace rosarch::detail
