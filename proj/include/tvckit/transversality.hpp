#pragma once

#include <vector>

#include "tvckit/path.hpp"
#include "tvckit/problem.hpp"

namespace tvckit {

struct SeriesEntry {
    int t_prime = 0;
    double value = 0.0;
};

/// Boundary terms b(T') for consecutive T' in [t_min, t_max].
struct BoundaryTermSeries {
    std::vector<SeriesEntry> entries;
    int t_min = 0;
    int t_max = 0;

    /// inf over T' <= T'' <= t_max of b(T''), aligned with entries.
    std::vector<double> running_inf() const;
    double max_magnitude() const;
};

enum class TvcClass { Satisfied, Violated, Inconclusive };

const char* to_string(TvcClass c);

struct TvcVerdict {
    double liminf_estimate = 0.0;
    double limsup_estimate = 0.0;
    TvcClass classification = TvcClass::Inconclusive;
    // evidence
    int trailing_from = 0;
    int trailing_to = 0;
    double threshold = 0.0;
    double drift = 0.0;
};

/// Relative drift across the last quarter above which a series is treated
/// as not yet stabilized.
inline constexpr double kTvcDriftLimit = 1e-3;

/// sum_{k=1}^{N-1} sum_i d(U(T'-N+1+k)+...+U(T'))/dc_i(T'+k) * q_i(T'+k).
/// Scaled perturbations scale `path` itself.
double boundary_term(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q,
                     int t_prime);

BoundaryTermSeries tvc_series(const ProblemSpec& spec, const Path& path,
                              const PerturbationSpec& q, int t_min, int t_max);

/// Window surrogate for the liminf/limsup conditions. The trailing half of
/// the series gives liminf (its minimum) and limsup (its maximum); a last
/// quarter that still moves by more than kTvcDriftLimit of the series'
/// largest magnitude is inconclusive. Otherwise liminf > threshold or
/// limsup < -threshold is a violation.
TvcVerdict classify_tvc(const BoundaryTermSeries& series, double threshold);

/// 1e-8 times the series' largest magnitude.
double default_tvc_threshold(const BoundaryTermSeries& series);

/// tvc_series with q(t) = alpha * c*(t) for t >= 1, c* = path.
BoundaryTermSeries michel_series(const ProblemSpec& spec, const Path& path, double alpha,
                                 int t_min, int t_max);

}  // namespace tvckit
