#include "tvckit/expr.hpp"

#include <algorithm>
#include <cmath>

namespace tvckit {

bool is_binary(NodeKind kind) {
    switch (kind) {
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div:
        case NodeKind::Pow: return true;
        default: return false;
    }
}

bool is_unary(NodeKind kind) {
    return kind == NodeKind::Neg || kind == NodeKind::Ln || kind == NodeKind::Exp;
}

Expr Expr::constant(double value, SourcePos pos) {
    if (!std::isfinite(value) || value < 0.0) {
        throw Error(ErrorKind::Semantic, "constant must be finite and non-negative", pos);
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = value;
    n->pos = pos;
    return Expr(std::move(n));
}

Expr Expr::param(std::string name, int index, SourcePos pos) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Param;
    n->name = std::move(name);
    n->index = index;
    n->pos = pos;
    return Expr(std::move(n));
}

Expr Expr::time(SourcePos pos) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Time;
    n->pos = pos;
    n->has_time = true;
    return Expr(std::move(n));
}

Expr Expr::var(std::string name, int component, int lag, SourcePos pos) {
    if (component < 0 || lag < 0) {
        throw Error(ErrorKind::Semantic, "variable reference needs component >= 1 and lag >= 0",
                    pos);
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Var;
    n->name = std::move(name);
    n->index = component;
    n->lag = lag;
    n->pos = pos;
    n->has_vars = true;
    n->max_lag = lag;
    n->max_component = component;
    return Expr(std::move(n));
}

Expr Expr::unary(NodeKind kind, Expr operand, SourcePos pos) {
    if (!is_unary(kind) || operand.empty()) {
        throw Error(ErrorKind::Semantic, "malformed unary node", pos);
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->pos = pos;
    const Node& o = operand.node();
    n->has_vars = o.has_vars;
    n->has_time = o.has_time;
    n->max_lag = o.max_lag;
    n->max_component = o.max_component;
    n->size = 1 + o.size;
    n->lhs = std::move(operand);
    return Expr(std::move(n));
}

Expr Expr::binary(NodeKind kind, Expr lhs, Expr rhs, SourcePos pos) {
    if (!is_binary(kind) || lhs.empty() || rhs.empty()) {
        throw Error(ErrorKind::Semantic, "malformed binary node", pos);
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->pos = pos;
    const Node& a = lhs.node();
    const Node& b = rhs.node();
    n->has_vars = a.has_vars || b.has_vars;
    n->has_time = a.has_time || b.has_time;
    n->max_lag = std::max(a.max_lag, b.max_lag);
    n->max_component = std::max(a.max_component, b.max_component);
    n->size = 1 + a.size + b.size;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return Expr(std::move(n));
}

int Expr::max_lag() const { return root_ ? root_->max_lag : -1; }
int Expr::max_component() const { return root_ ? root_->max_component : -1; }
bool Expr::has_vars() const { return root_ && root_->has_vars; }
bool Expr::has_time() const { return root_ && root_->has_time; }
std::size_t Expr::size() const { return root_ ? root_->size : 0; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.root_ == b.root_) return true;
    if (!a.root_ || !b.root_) return false;
    const Node& x = *a.root_;
    const Node& y = *b.root_;
    if (x.kind != y.kind || x.size != y.size) return false;
    switch (x.kind) {
        case NodeKind::Constant: return x.value == y.value;
        case NodeKind::Param: return x.name == y.name;
        case NodeKind::Time: return true;
        case NodeKind::Var: return x.name == y.name && x.index == y.index && x.lag == y.lag;
        default: break;
    }
    if (is_unary(x.kind)) return x.lhs == y.lhs;
    return x.lhs == y.lhs && x.rhs == y.rhs;
}

}  // namespace tvckit
