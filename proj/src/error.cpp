#include "tvckit/error.hpp"

namespace tvckit {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Lexical: return "lexical error";
        case ErrorKind::Syntax: return "syntax error";
        case ErrorKind::Semantic: return "semantic error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Window: return "window error";
        case ErrorKind::Solve: return "solve error";
        case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message,
                           const std::optional<SourcePos>& pos) {
    std::string out = to_string(kind);
    if (pos) {
        out += " at " + std::to_string(pos->line) + ":" + std::to_string(pos->column);
    }
    out += ": ";
    out += message;
    return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<SourcePos> pos)
    : std::runtime_error(format_message(kind, message, pos)),
      kind_(kind),
      pos_(pos),
      detail_(message) {}

}  // namespace tvckit
