#include "tvckit/autodiff.hpp"

#include <cmath>
#include <string>

#include "tvckit/error.hpp"

namespace tvckit {

StageEnv::StageEnv(int time_, Matrix window_, std::vector<double> params_)
    : time(time_), window(std::move(window_)), params(std::move(params_)) {}

std::vector<double> StageEnv::flat() const {
    std::vector<double> out(window.rows() * window.cols());
    for (std::size_t j = 0; j < window.cols(); ++j) {
        for (std::size_t i = 0; i < window.rows(); ++i) out[j * window.rows() + i] = window(i, j);
    }
    return out;
}

namespace {

[[noreturn]] void domain_error(const Node& n, const std::string& what) {
    throw Error(ErrorKind::Domain, what, n.pos);
}

template <class T>
T checked(const Node& n, T value) {
    if (!std::isfinite(primal(value))) domain_error(n, "non-finite intermediate value");
    return value;
}

template <class T>
T eval_node(const Expr& e, const StageView<T>& s) {
    using std::exp;
    using std::log;
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::Constant: return T(n.value);
        case NodeKind::Param: return T(s.params[static_cast<std::size_t>(n.index)]);
        case NodeKind::Time: return T(static_cast<double>(s.time));
        case NodeKind::Var:
            if (n.index >= s.dim || n.lag >= s.order) {
                throw Error(ErrorKind::Window,
                            "variable " + n.name + "(t+" + std::to_string(n.lag) +
                                ") is outside the stage window",
                            n.pos);
            }
            return s.at(n.index, n.lag);
        case NodeKind::Neg: return -eval_node(n.lhs, s);
        case NodeKind::Ln: {
            const T a = eval_node(n.lhs, s);
            if (!(primal(a) > 0.0)) domain_error(n, "ln of non-positive value");
            return log(a);
        }
        case NodeKind::Exp: return checked(n, exp(eval_node(n.lhs, s)));
        case NodeKind::Add: return eval_node(n.lhs, s) + eval_node(n.rhs, s);
        case NodeKind::Sub: return eval_node(n.lhs, s) - eval_node(n.rhs, s);
        case NodeKind::Mul: return eval_node(n.lhs, s) * eval_node(n.rhs, s);
        case NodeKind::Div: {
            const T a = eval_node(n.lhs, s);
            const T b = eval_node(n.rhs, s);
            if (primal(b) == 0.0) domain_error(n, "division by zero");
            return checked(n, a / b);
        }
        case NodeKind::Pow: {
            const T base = eval_node(n.lhs, s);
            const double b0 = primal(base);
            if (!n.rhs.has_vars()) {
                // Exponent is constant for differentiation purposes.
                const double k = primal(eval_node(n.rhs, s));
                if (std::nearbyint(k) == k && std::fabs(k) <= 1e6) {
                    if (b0 == 0.0 && k < 0) domain_error(n, "zero raised to a negative power");
                    return checked(n, ipow(base, static_cast<long long>(k)));
                }
                if (!(b0 > 0.0)) domain_error(n, "non-integer power of a non-positive base");
                return checked(n, pow_const(base, k));
            }
            if (!(b0 > 0.0)) domain_error(n, "variable exponent needs a positive base");
            return checked(n, exp(eval_node(n.rhs, s) * log(base)));
        }
    }
    domain_error(n, "unknown node");
}

}  // namespace

template <class T>
T eval(const Expr& expr, const StageView<T>& stage) {
    return eval_node(expr, stage);
}

template double eval(const Expr&, const StageView<double>&);
template Dual<double> eval(const Expr&, const StageView<Dual<double>>&);
template Dual<Dual<double>> eval(const Expr&, const StageView<Dual<Dual<double>>>&);

double eval(const Expr& expr, const StageEnv& env) {
    const auto flat = env.flat();
    const StageView<double> view{env.time, env.dim(), env.order(), flat, env.params};
    return eval(expr, view);
}

double partial(const Expr& expr, Slot slot, const StageEnv& env) {
    if (slot.component < 0 || slot.component >= env.dim() || slot.lag < 0 ||
        slot.lag >= env.order()) {
        throw Error(ErrorKind::Window, "slot outside the stage window");
    }
    const auto flat = env.flat();
    std::vector<Dual<double>> seeded(flat.begin(), flat.end());
    seeded[static_cast<std::size_t>(slot.lag * env.dim() + slot.component)].deriv = 1.0;
    const StageView<Dual<double>> view{env.time, env.dim(), env.order(), seeded, env.params};
    return eval(expr, view).deriv;
}

Matrix grad_stage(const Expr& expr, const StageEnv& env) {
    Matrix out(static_cast<std::size_t>(env.dim()), static_cast<std::size_t>(env.order()));
    for (int j = 0; j < env.order(); ++j) {
        for (int i = 0; i < env.dim(); ++i) {
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                partial(expr, {i, j}, env);
        }
    }
    return out;
}

double eval_in_time(const Expr& expr, int time, std::span<const double> params) {
    if (expr.has_vars()) {
        throw Error(ErrorKind::Semantic, "expression depends on decision variables",
                    expr.node().pos);
    }
    const StageView<double> view{time, 1, 1, {}, params};
    return eval(expr, view);
}

}  // namespace tvckit
