#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace tvckit {

/// 1-based line and column of a lexeme in a problem file.
struct SourcePos {
    int line = 1;
    int column = 1;

    bool operator==(const SourcePos&) const = default;
};

enum class ErrorKind {
    Lexical,
    Syntax,
    Semantic,
    Domain,
    Window,
    Solve,
    Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// stage failed and `pos()` carries the source position when one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<SourcePos> pos = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    const std::optional<SourcePos>& pos() const noexcept { return pos_; }

    /// Message without the position prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::optional<SourcePos> pos_;
    std::string detail_;
};

}  // namespace tvckit
