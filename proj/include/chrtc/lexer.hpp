#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chrtc/syntax.hpp"

namespace chrtc {

enum class TokenKind {
  varid,
  conid,
  varsym,      // operators that are not reserved
  reserved,    // = | :: \ -> => @ <=> ==> ~>
  keyword,
  integer,
  character,
  string,
  special,     // ( ) [ ] , ; { } `
  eof,
};

struct LexToken {
  TokenKind kind = TokenKind::eof;
  std::string text;  // string/char literals hold the decoded value
  SourceLoc loc;
  bool virtual_layout = false;  // brace or semicolon inserted by the layout pass
  bool line_start = false;
};

/// Raw tokens, ending with an eof token. Throws ParseError.
std::vector<LexToken> lex(std::string_view source);

/// Inserts virtual `{`, `;` and `}` following the indentation of blocks that
/// start after `where`, `let` and `of`, and of the top level.
std::vector<LexToken> layout(std::vector<LexToken> tokens);

}  // namespace chrtc
