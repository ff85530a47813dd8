#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tvckit/euler.hpp"
#include "tvckit/path.hpp"

namespace tvckit {

enum class TailPolicy {
    /// c(T'+1..T'+N-1) = steady state; falls back to ReplicateLast when
    /// no steady state can be found.
    SteadyStateClamp,
    /// c(T'+k) = c(T'), so the tail moves with the last unknown.
    ReplicateLast,
};

const char* to_string(TailPolicy policy);

struct SolveOptions {
    int max_iterations = 100;
    double residual_tolerance = 1e-10;
    double backtrack_factor = 0.5;
    double min_step = 1e-6;
    TailPolicy tail_policy = TailPolicy::SteadyStateClamp;
    /// Initial guess; when neither is set the steady state is broadcast.
    std::optional<double> constant_guess;
    std::optional<Path> path_guess;
    /// Newton seed for the steady state; empty uses init values, else 0.5.
    std::vector<double> steady_seed;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double final_residual_norm = 0.0;
    Path path;  // c(0..T'+N-1), tail included
    TailPolicy tail_used = TailPolicy::SteadyStateClamp;
    std::optional<std::vector<double>> steady_state;
};

struct SteadyStateOptions {
    int max_iterations = 100;
    double tolerance = 1e-12;
};

/// Constant vector c whose repeated window zeroes the interior Euler row.
/// Rows are evaluated at t = N-1 and re-checked at later times, so a
/// utility whose time dependence is a common factor (delta^t * f) qualifies
/// while anything else is rejected with Error(Solve).
std::vector<double> steady_state(const ProblemSpec& spec, std::span<const double> guess,
                                 const SteadyStateOptions& opts = {});

/// Damped Newton on the stacked Euler rows with a banded Jacobian from
/// nested dual numbers. Non-convergence is reported, not thrown; a singular
/// factorization or a domain error at the initial guess throws.
SolveReport solve_truncated(const EulerSystem& system, const SolveOptions& opts = {});

/// Default steady-state seed: per component, the first init value when
/// there is one, otherwise `fallback`.
std::vector<double> default_seed(const ProblemSpec& spec, double fallback = 0.5);

}  // namespace tvckit
