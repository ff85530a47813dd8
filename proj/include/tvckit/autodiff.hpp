#pragma once

#include <span>
#include <vector>

#include "tvckit/dual.hpp"
#include "tvckit/expr.hpp"
#include "tvckit/path.hpp"

namespace tvckit {

/// Variable slot (component i, lag j), both 0-based: c_{i+1}(t+j).
struct Slot {
    int component = 0;
    int lag = 0;
};

/// Non-owning stage arguments. window[j*dim + i] holds c_i(t+j).
template <class T>
struct StageView {
    int time = 0;
    int dim = 1;
    int order = 1;
    std::span<const T> window;
    std::span<const double> params;

    const T& at(int component, int lag) const {
        return window[static_cast<std::size_t>(lag * dim + component)];
    }
};

/// Owning stage arguments: window is dim x order, entry (i, j) = c_i(t+j).
struct StageEnv {
    int time = 0;
    Matrix window;
    std::vector<double> params;

    StageEnv() = default;
    StageEnv(int time, Matrix window, std::vector<double> params);

    int dim() const { return static_cast<int>(window.rows()); }
    int order() const { return static_cast<int>(window.cols()); }

    /// Time-major copy of the window, ready for a StageView.
    std::vector<double> flat() const;
};

/// Value of `expr` at the stage. Throws Error(Domain) at the offending node
/// for ln of a non-positive value, division by zero, zero to a negative
/// power, a non-integer power of a non-positive base, or overflow.
template <class T>
T eval(const Expr& expr, const StageView<T>& stage);

extern template double eval(const Expr&, const StageView<double>&);
extern template Dual<double> eval(const Expr&, const StageView<Dual<double>>&);
extern template Dual<Dual<double>> eval(const Expr&, const StageView<Dual<Dual<double>>>&);

double eval(const Expr& expr, const StageEnv& env);

/// dU/dc_i(t+j) at env, exact up to rounding.
double partial(const Expr& expr, Slot slot, const StageEnv& env);

/// All first partials; entry (i, j) = partial(expr, {i, j}, env).
Matrix grad_stage(const Expr& expr, const StageEnv& env);

/// Evaluates an expression that depends only on t and parameters.
double eval_in_time(const Expr& expr, int time, std::span<const double> params);

}  // namespace tvckit
