#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tvckit/error.hpp"

namespace tvckit {

enum class TokenKind {
    Ident,
    Integer,
    Real,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Comma,
    Equals,
    Newline,
};

const char* to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text;
    SourcePos pos;
    double number = 0.0;  // Integer and Real only

    bool operator==(const Token&) const = default;
};

/// Splits problem-file or expression text into tokens. `#` starts a comment
/// running to the end of the line; line breaks are kept as Newline tokens.
/// Throws Error(Lexical) at the first illegal character.
std::vector<Token> tokenize(std::string_view source);

}  // namespace tvckit
