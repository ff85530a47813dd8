#pragma once

#include <vector>

#include "tvckit/path.hpp"
#include "tvckit/problem.hpp"

namespace tvckit {

/// Below this epsilon the difference quotient is replaced by the exact
/// directional derivative.
inline constexpr double kEpsilonFloor = 1e-8;

/// sum_{t=0}^{T'} [U(c + eps q windows, t) - U(c windows, t)].
double objective_diff_sum(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q,
                          double eps, int t_prime);

/// min over T' in [T, t_max] of objective_diff_sum; the window stands in
/// for the infimum over all T' >= T.
double v_eps_T(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q, double eps,
               int T, int t_max);

/// A(T', eps) = objective_diff_sum / eps on a T' x eps grid.
struct DiagGrid {
    std::vector<double> eps_values;  // decreasing
    std::vector<int> t_values;       // increasing
    Matrix a;                        // a(row of T', column of eps)
    std::vector<bool> exact_column;  // eps below kEpsilonFloor: exact derivative used
};

DiagGrid build_a_grid(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q,
                      const std::vector<double>& eps_values, const std::vector<int>& t_values,
                      int threads = 1);

/// Limit estimate that may be flagged divergent.
struct IteratedLimit {
    bool divergent = false;
    double value = 0.0;
};

enum class AssumptionClass { Uniform, NonUniform, Inconclusive };

const char* to_string(AssumptionClass c);

struct AssumptionVerdict {
    IteratedLimit l1;  // lim eps->0 of lim T->inf
    IteratedLimit l2;  // lim T->inf of lim eps->0
    std::vector<IteratedLimit> column_limits;  // lim over T, per eps
    std::vector<IteratedLimit> row_limits;     // lim over eps, per T
    std::vector<double> uniformity_defect;     // max_eps |A(T,eps) - A(T_max,eps)|, per T
    AssumptionClass classification = AssumptionClass::Inconclusive;
    double tolerance = 0.0;
};

/// Extrapolates a sampled sequence. Divergent when it moves monotonically
/// and either its last value exceeds 10x its first or its total change
/// exceeds 10x its first step; otherwise an Aitken tail estimate.
IteratedLimit sequence_limit(const std::vector<double>& values);

/// Needs >= 4 samples per axis, eps spanning two decades and T a factor 4.
AssumptionVerdict assess_assumptions(const DiagGrid& grid, double tol);

enum class OvertakingVerdict { FirstOvertakes, SecondOvertakes, Incomparable };

const char* to_string(OvertakingVerdict v);

struct OvertakingComparison {
    std::vector<double> d;  // D(T') for T' = 0..t_max
    int t_max = 0;
    double margin = 0.0;
    OvertakingVerdict verdict = OvertakingVerdict::Incomparable;
};

/// D(T') = sum_{t<=T'} [U along first - U along second]. The first path
/// overtakes when D >= margin on the whole trailing half of the window.
OvertakingComparison overtaking_compare(const ProblemSpec& spec, const Path& first,
                                        const Path& second, int t_max);

}  // namespace tvckit
