#pragma once

#include <memory>
#include <string>

#include "tvckit/error.hpp"

namespace tvckit {

enum class NodeKind {
    Constant,
    Param,
    Time,
    Var,
    Neg,
    Ln,
    Exp,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

bool is_binary(NodeKind kind);
bool is_unary(NodeKind kind);

struct Node;

/// Immutable expression tree. Copies share nodes.
///
/// Constants are finite and non-negative; a negative literal is written as
/// a negation node, which is what the parser produces for `-2`.
/// Variable nodes carry a 0-based component index and a lag offset j,
/// standing for c_{component+1}(t+j).
class Expr {
public:
    Expr() = default;

    static Expr constant(double value, SourcePos pos = {});
    static Expr param(std::string name, int index, SourcePos pos = {});
    static Expr time(SourcePos pos = {});
    static Expr var(std::string name, int component, int lag, SourcePos pos = {});
    static Expr unary(NodeKind kind, Expr operand, SourcePos pos = {});
    static Expr binary(NodeKind kind, Expr lhs, Expr rhs, SourcePos pos = {});

    bool empty() const noexcept { return root_ == nullptr; }
    const Node& node() const { return *root_; }

    /// Largest lag offset among variable references, or -1 when there are none.
    int max_lag() const;
    /// Largest component index among variable references, or -1.
    int max_component() const;
    bool has_vars() const;
    bool has_time() const;
    std::size_t size() const;

    /// Structural equality: ignores source positions.
    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    std::shared_ptr<const Node> root_;
};

struct Node {
    NodeKind kind = NodeKind::Constant;
    double value = 0.0;
    std::string name;
    int index = 0;  // parameter slot or variable component
    int lag = 0;
    Expr lhs;  // sole operand for unary nodes
    Expr rhs;
    SourcePos pos;
    bool has_vars = false;
    bool has_time = false;
    int max_lag = -1;
    int max_component = -1;
    std::size_t size = 1;
};

}  // namespace tvckit
