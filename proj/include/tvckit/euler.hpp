#pragma once

#include <vector>

#include "tvckit/path.hpp"
#include "tvckit/problem.hpp"

namespace tvckit {

enum class AssemblyMode {
    /// Euler rows for every t in 0..T'; c(0)..c(N-2) are unknowns.
    FreeInitial,
    /// c(0)..c(N-2) fixed by the problem's init values; rows for N-1..T'.
    PinnedInitial,
};

const char* to_string(AssemblyMode mode);
AssemblyMode parse_mode(const std::string& text);

/// Truncated Euler system over times 0..T'. Unknowns are ordered time-major
/// then component; row (t, i) couples c(t-N+1)..c(t+N-1), so the Jacobian
/// is banded with half-width n*N - 1.
/// c(T'+1)..c(T'+N-1) are not unknowns; the solver's tail policy fixes them.
struct EulerSystem {
    ProblemSpec spec;
    int t_prime = 0;
    AssemblyMode mode = AssemblyMode::FreeInitial;
    int first_time = 0;  // earliest time with an Euler row

    int dim() const { return spec.dim(); }
    int rows() const { return dim() * (t_prime - first_time + 1); }
    int unknowns() const { return rows(); }
    int half_bandwidth() const { return dim() * spec.order - 1; }
    /// Last path index the residuals read.
    int path_horizon() const { return t_prime + spec.order - 1; }
    /// Flat unknown index of c_i(time), or -1 when c_i(time) is not an unknown.
    int index(int time, int component) const;
};

EulerSystem assemble_system(const ProblemSpec& spec, int t_prime,
                            AssemblyMode mode = AssemblyMode::FreeInitial);

/// Component i: sum_{s=max(0,t-N+1)}^{t} dU(s)/dc_i(t). Needs 0 <= t <= H-N+1.
std::vector<double> euler_residual(const ProblemSpec& spec, const Path& path, int t);

/// Max-norm of all Euler rows first_time..t_prime at `path`.
double euler_residual_norm(const ProblemSpec& spec, const Path& path, int first_time,
                           int t_prime);

/// Sum over t=0..T' of the directional derivative of U(t) along q, computed
/// stage by stage with a single directional seed.
double directional_derivative_sum(const ProblemSpec& spec, const Path& path, const Path& q,
                                  int t_prime);

/// Tail terms sum_{k=1}^{N-1} sum_i d(U(T'-N+1+k)+...+U(T'))/dc_i(T'+k) q_i(T'+k).
double boundary_sum(const ProblemSpec& spec, const Path& path, const Path& q, int t_prime);

struct IdentitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of the summation-by-parts rearrangement: lhs is the stage-wise
/// directional derivative sum, rhs the Euler-row weighted sum over 0..T'
/// plus the boundary terms in q(T'+1)..q(T'+N-1).
IdentitySides directional_derivative_identity(const ProblemSpec& spec, const Path& path,
                                              const Path& q, int t_prime);

}  // namespace tvckit
