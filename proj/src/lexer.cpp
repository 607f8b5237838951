#include "chrtc/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace chrtc {

namespace {

constexpr std::array kKeywords = {"class", "instance", "data", "where", "let", "in",
                                  "if",    "then",     "else", "rule",  "of"};
constexpr std::array kReserved = {"=", "|", "::", "\\", "->", "=>", "@", "<=>", "==>", "~>"};
constexpr std::string_view kSymbolChars = "!#$%&*+./<=>?@\\^|-~:";

bool is_symbol(char c) { return kSymbolChars.find(c) != std::string_view::npos; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<LexToken> run() {
    std::vector<LexToken> out;
    bool line_start = true;
    while (true) {
      line_start = skip_space() || line_start;
      if (pos_ >= src_.size()) break;
      LexToken t = next();
      t.line_start = line_start;
      line_start = false;
      out.push_back(std::move(t));
    }
    LexToken eof;
    eof.loc = loc();
    eof.line_start = true;
    out.push_back(eof);
    return out;
  }

 private:
  SourceLoc loc() const { return {line_, col_}; }
  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if (src_[pos_] == '\t') {
      col_ = ((col_ - 1) / 8 + 1) * 8 + 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // Skips whitespace and comments; returns whether a newline was crossed.
  bool skip_space() {
    bool newline = false;
    while (pos_ < src_.size()) {
      const char c = peek();
      if (c == '\n') {
        newline = true;
        advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '-' && peek(1) == '-' && line_comment_here()) {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '{' && peek(1) == '-') {
        block_comment();
      } else {
        break;
      }
    }
    return newline;
  }

  // A run of two or more dashes not followed by another symbol starts a comment.
  bool line_comment_here() const {
    std::size_t k = pos_;
    while (k < src_.size() && src_[k] == '-') ++k;
    return k >= src_.size() || !is_symbol(src_[k]);
  }

  void block_comment() {
    const SourceLoc start = loc();
    int depth = 0;
    do {
      if (pos_ >= src_.size()) throw ParseError(start, "unterminated block comment");
      if (peek() == '{' && peek(1) == '-') {
        ++depth;
        advance();
        advance();
      } else if (peek() == '-' && peek(1) == '}') {
        --depth;
        advance();
        advance();
      } else {
        advance();
      }
    } while (depth > 0);
  }

  char escape(const SourceLoc& start) {
    advance();  // backslash
    if (pos_ >= src_.size()) throw ParseError(start, "unterminated literal");
    const char c = peek();
    advance();
    switch (c) {
      case 'n': return '\n';
      case 't': return '\t';
      case '\\': return '\\';
      case '\'': return '\'';
      case '"': return '"';
      case '0': return '\0';
      default: throw ParseError(start, std::string("unknown escape \\") + c);
    }
  }

  LexToken next() {
    LexToken t;
    t.loc = loc();
    const char c = peek();
    const std::size_t start = pos_;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() && is_ident_char(peek())) advance();
      t.text = std::string(src_.substr(start, pos_ - start));
      if (std::find(kKeywords.begin(), kKeywords.end(), t.text) != kKeywords.end()) {
        t.kind = TokenKind::keyword;
      } else {
        t.kind = std::isupper(static_cast<unsigned char>(c)) ? TokenKind::conid : TokenKind::varid;
      }
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
      t.kind = TokenKind::integer;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (c == '\'') {
      advance();
      t.kind = TokenKind::character;
      if (peek() == '\\') {
        t.text = std::string(1, escape(t.loc));
      } else if (pos_ < src_.size() && peek() != '\n') {
        t.text = std::string(1, peek());
        advance();
      }
      if (peek() != '\'') throw ParseError(t.loc, "malformed character literal");
      advance();
      return t;
    }
    if (c == '"') {
      advance();
      t.kind = TokenKind::string;
      while (true) {
        if (pos_ >= src_.size() || peek() == '\n') {
          throw ParseError(t.loc, "unterminated string literal");
        }
        if (peek() == '"') {
          advance();
          break;
        }
        if (peek() == '\\') {
          t.text += escape(t.loc);
        } else {
          t.text += peek();
          advance();
        }
      }
      return t;
    }
    if (std::string_view("()[],;{}`").find(c) != std::string_view::npos) {
      advance();
      t.kind = TokenKind::special;
      t.text = std::string(1, c);
      return t;
    }
    if (is_symbol(c)) {
      // A backslash always stands alone so that `\x` and `\(` lex as lambdas.
      if (c == '\\') {
        advance();
      } else {
        while (pos_ < src_.size() && is_symbol(peek()) && peek() != '\\') advance();
      }
      t.text = std::string(src_.substr(start, pos_ - start));
      t.kind = std::find(kReserved.begin(), kReserved.end(), t.text) != kReserved.end()
                   ? TokenKind::reserved
                   : TokenKind::varsym;
      return t;
    }
    throw ParseError(t.loc, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

LexToken virtual_token(const std::string& text, SourceLoc loc) {
  LexToken t;
  t.kind = TokenKind::special;
  t.text = text;
  t.loc = loc;
  t.virtual_layout = true;
  return t;
}

}  // namespace

std::vector<LexToken> lex(std::string_view source) { return Lexer(source).run(); }

std::vector<LexToken> layout(std::vector<LexToken> tokens) {
  struct Context {
    std::size_t column;  // 0 for an explicit brace
    bool let_block;
  };
  std::vector<Context> stack;
  std::vector<LexToken> out;
  bool pending = false;
  bool pending_let = false;

  auto is_open_keyword = [](const LexToken& t) {
    return t.kind == TokenKind::keyword && (t.text == "where" || t.text == "let" || t.text == "of");
  };
  auto enclosing = [&]() -> std::size_t { return stack.empty() ? 0 : stack.back().column; };

  if (!tokens.empty() && tokens.front().kind != TokenKind::eof &&
      !(tokens.front().kind == TokenKind::special && tokens.front().text == "{")) {
    stack.push_back({tokens.front().loc.column, false});
    out.push_back(virtual_token("{", tokens.front().loc));
    tokens.front().line_start = false;
  } else if (tokens.size() == 1) {
    out.push_back(virtual_token("{", tokens.front().loc));
    out.push_back(virtual_token("}", tokens.front().loc));
  }

  for (auto& tok : tokens) {
    if (tok.kind == TokenKind::eof) {
      if (pending) {
        out.push_back(virtual_token("{", tok.loc));
        out.push_back(virtual_token("}", tok.loc));
      }
      while (!stack.empty()) {
        if (stack.back().column == 0) throw ParseError(tok.loc, "unclosed '{'");
        out.push_back(virtual_token("}", tok.loc));
        stack.pop_back();
      }
      out.push_back(tok);
      break;
    }

    bool opened_here = false;
    if (pending) {
      pending = false;
      if (tok.kind == TokenKind::special && tok.text == "{") {
        stack.push_back({0, pending_let});
        out.push_back(tok);
        continue;
      }
      const std::size_t n = tok.loc.column;
      if (n > enclosing() || stack.empty() || stack.back().column == 0) {
        stack.push_back({n, pending_let});
        out.push_back(virtual_token("{", tok.loc));
        opened_here = true;
      } else {
        out.push_back(virtual_token("{", tok.loc));
        out.push_back(virtual_token("}", tok.loc));
      }
    }

    if (tok.line_start && !opened_here) {
      while (!stack.empty() && stack.back().column != 0 && tok.loc.column < stack.back().column) {
        out.push_back(virtual_token("}", tok.loc));
        stack.pop_back();
      }
      if (!stack.empty() && stack.back().column != 0 && tok.loc.column == stack.back().column) {
        out.push_back(virtual_token(";", tok.loc));
      }
    }

    if (tok.kind == TokenKind::keyword && tok.text == "in" && !stack.empty() &&
        stack.back().column != 0 && stack.back().let_block) {
      out.push_back(virtual_token("}", tok.loc));
      stack.pop_back();
    }
    if (tok.kind == TokenKind::special && tok.text == "}") {
      if (stack.empty() || stack.back().column != 0) {
        throw ParseError(tok.loc, "unexpected '}'");
      }
      stack.pop_back();
    }

    out.push_back(tok);
    if (is_open_keyword(tok)) {
      pending = true;
      pending_let = tok.text == "let";
    }
  }
  return out;
}

}  // namespace chrtc
