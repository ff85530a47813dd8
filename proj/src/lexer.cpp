#include "tvckit/lexer.hpp"

#include <cctype>
#include <charconv>

namespace tvckit {

const char* to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Integer: return "integer";
        case TokenKind::Real: return "number";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::Caret: return "'^'";
        case TokenKind::Comma: return "','";
        case TokenKind::Equals: return "'='";
        case TokenKind::Newline: return "end of line";
    }
    return "token";
}

namespace {

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (i_ < src_.size()) {
            const char ch = src_[i_];
            if (ch == ' ' || ch == '\t' || ch == '\r') {
                advance();
            } else if (ch == '#') {
                while (i_ < src_.size() && src_[i_] != '\n') advance();
            } else if (ch == '\n') {
                out.push_back({TokenKind::Newline, "\n", pos_});
                advance();
            } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                out.push_back(identifier());
            } else if (std::isdigit(static_cast<unsigned char>(ch)) ||
                       (ch == '.' && i_ + 1 < src_.size() &&
                        std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
                out.push_back(number());
            } else {
                out.push_back(punct());
            }
        }
        return out;
    }

private:
    void advance() {
        const auto byte = static_cast<unsigned char>(src_[i_]);
        ++i_;
        if (byte == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else if ((byte & 0xC0) != 0x80) {
            // UTF-8 continuation bytes do not start a new column.
            ++pos_.column;
        }
    }

    bool peek_digit() const {
        return i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]));
    }

    Token identifier() {
        const SourcePos start = pos_;
        const std::size_t begin = i_;
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                    src_[i_] == '_')) {
            advance();
        }
        return {TokenKind::Ident, std::string(src_.substr(begin, i_ - begin)), start};
    }

    Token number() {
        const SourcePos start = pos_;
        const std::size_t begin = i_;
        bool integral = true;
        while (peek_digit()) advance();
        if (i_ < src_.size() && src_[i_] == '.') {
            integral = false;
            advance();
            while (peek_digit()) advance();
        }
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
            std::size_t look = i_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                integral = false;
                while (i_ < look) advance();
                while (peek_digit()) advance();
            }
        }
        const std::string_view text = src_.substr(begin, i_ - begin);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw Error(ErrorKind::Lexical, "malformed number '" + std::string(text) + "'",
                        start);
        }
        return {integral ? TokenKind::Integer : TokenKind::Real, std::string(text), start,
                value};
    }

    Token punct() {
        const SourcePos start = pos_;
        const char ch = src_[i_];
        TokenKind kind;
        switch (ch) {
            case '(': kind = TokenKind::LParen; break;
            case ')': kind = TokenKind::RParen; break;
            case '[': kind = TokenKind::LBracket; break;
            case ']': kind = TokenKind::RBracket; break;
            case '+': kind = TokenKind::Plus; break;
            case '-': kind = TokenKind::Minus; break;
            case '*': kind = TokenKind::Star; break;
            case '/': kind = TokenKind::Slash; break;
            case '^': kind = TokenKind::Caret; break;
            case ',': kind = TokenKind::Comma; break;
            case '=': kind = TokenKind::Equals; break;
            default: {
                std::string shown;
                const auto byte = static_cast<unsigned char>(ch);
                if (byte < 0x20 || byte >= 0x7F) {
                    static const char* hex = "0123456789abcdef";
                    shown = std::string("\\x") + hex[byte >> 4] + hex[byte & 0xF];
                } else {
                    shown = std::string(1, ch);
                }
                throw Error(ErrorKind::Lexical, "illegal character '" + shown + "'", start);
            }
        }
        advance();
        return {kind, std::string(1, ch), start};
    }

    std::string_view src_;
    std::size_t i_ = 0;
    SourcePos pos_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace tvckit
