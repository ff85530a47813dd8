#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tvckit/expr.hpp"

namespace tvckit {

/// q(0) = 0, linear ramp to `level` on 0 < t < t0, constant `level` from t0 on.
/// `level` holds one value broadcast to every component, or one per component.
struct StepPerturbation {
    int t0 = 1;
    std::vector<double> level;

    bool operator==(const StepPerturbation&) const = default;
};

/// q_i(t) given by expressions in t and parameters; one expression is
/// broadcast to every component.
struct ExprPerturbation {
    std::vector<Expr> components;

    bool operator==(const ExprPerturbation&) const = default;
};

/// q(t) = alpha * c*(t) for t >= 1 and q(0) = 0, where c* is the path under test.
struct ScaledPerturbation {
    double alpha = 0.5;

    bool operator==(const ScaledPerturbation&) const = default;
};

struct PerturbationSpec {
    std::variant<StepPerturbation, ExprPerturbation, ScaledPerturbation> kind;

    static PerturbationSpec step(int t0, std::vector<double> level);
    static PerturbationSpec expression(std::vector<Expr> components);
    static PerturbationSpec scaled(double alpha);
    static PerturbationSpec zero();

    bool is_scaled() const { return std::holds_alternative<ScaledPerturbation>(kind); }

    bool operator==(const PerturbationSpec&) const = default;
};

/// Fixed initial value c_{component+1}(time) = value.
struct PinnedValue {
    int time = 0;
    int component = 0;
    double value = 0.0;

    bool operator==(const PinnedValue&) const = default;
};

struct NamedPerturbation {
    std::string name;
    PerturbationSpec spec;

    bool operator==(const NamedPerturbation&) const = default;
};

/// A validated problem: maximize sum_t U(c(t), ..., c(t+N-1), t).
struct ProblemSpec {
    int order = 1;
    std::vector<std::string> vars{"c"};
    std::vector<std::string> param_names;
    std::vector<double> param_values;
    Expr utility;
    std::vector<PinnedValue> pins;
    std::vector<NamedPerturbation> perturbations;

    int dim() const { return static_cast<int>(vars.size()); }
    std::span<const double> params() const { return param_values; }

    std::optional<double> param(std::string_view name) const;
    /// Rebinds an existing parameter; throws Error(Semantic) for unknown names.
    void set_param(std::string_view name, double value);

    const PerturbationSpec& perturbation(std::string_view name) const;
    std::optional<double> pinned(int time, int component) const;
    /// True when every component is pinned at every time 0..N-2.
    bool pins_complete() const;

    bool operator==(const ProblemSpec&) const = default;
};

/// Name resolution context for a standalone expression.
struct ExprScope {
    std::vector<std::string> vars;
    std::vector<std::string> params;
    bool allow_vars = true;
};

Expr parse_expression(std::string_view source, const ExprScope& scope);

/// Parses and validates a problem file. The order header is optional; when
/// present it must equal 1 + the largest lag in the utility.
ProblemSpec parse_problem(std::string_view source);

/// Reads and parses a problem file from disk; Error(Io) names the path.
ProblemSpec load_problem(const std::string& path);

/// Checks every ProblemSpec invariant; throws Error(Semantic).
void validate(const ProblemSpec& spec);

std::string print_expr(const Expr& expr);
std::string print_canonical(const ProblemSpec& spec);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double value);

}  // namespace tvckit
