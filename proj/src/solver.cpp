#include "tvckit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tvckit/banded.hpp"
#include "tvckit/detail/euler_row.hpp"

namespace tvckit {

const char* to_string(TailPolicy policy) {
    return policy == TailPolicy::SteadyStateClamp ? "steady-state-clamp" : "replicate-last";
}

std::vector<double> default_seed(const ProblemSpec& spec, double fallback) {
    std::vector<double> seed(static_cast<std::size_t>(spec.dim()), fallback);
    for (int i = 0; i < spec.dim(); ++i) {
        for (int t = 0; t + 1 < spec.order; ++t) {
            if (auto v = spec.pinned(t, i)) {
                seed[static_cast<std::size_t>(i)] = *v;
                break;
            }
        }
    }
    return seed;
}

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::fabs(x));
    }
    return m;
}

/// Gaussian elimination with partial pivoting; a is row-major size x size.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::fabs(a[r * n + k]) > std::fabs(a[p * n + k])) p = r;
        }
        if (!(std::fabs(a[p * n + k]) > 0.0)) {
            throw Error(ErrorKind::Solve, "singular Jacobian in steady-state iteration");
        }
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
            std::swap(b[k], b[p]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double m = a[r * n + k] / a[k * n + k];
            for (std::size_t c = k; c < n; ++c) a[r * n + c] -= m * a[k * n + c];
            b[r] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * x[c];
        x[r] = acc / a[r * n + r];
    }
    return x;
}

std::vector<double> stationary_row(const ProblemSpec& spec, std::span<const double> c, int t) {
    std::vector<double> out(c.size());
    detail::euler_row<double>(
        spec, [&](int, int i) { return c[static_cast<std::size_t>(i)]; }, t,
        std::span<double>(out));
    return out;
}

}  // namespace

std::vector<double> steady_state(const ProblemSpec& spec, std::span<const double> guess,
                                 const SteadyStateOptions& opts) {
    const auto n = static_cast<std::size_t>(spec.dim());
    if (guess.size() != n) {
        throw Error(ErrorKind::Solve, "steady-state guess must have one value per component");
    }
    const int t_ref = spec.order - 1;
    std::vector<double> c(guess.begin(), guess.end());
    std::vector<double> f = stationary_row(spec, c, t_ref);
    double norm = max_abs(f);
    for (int iter = 0; norm > opts.tolerance; ++iter) {
        if (iter >= opts.max_iterations) {
            throw Error(ErrorKind::Solve, "steady state did not converge in " +
                                              std::to_string(opts.max_iterations) +
                                              " iterations (residual " + std::to_string(norm) +
                                              ")");
        }
        std::vector<double> jac(n * n);
        std::vector<Dual<double>> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            detail::euler_row<Dual<double>>(
                spec,
                [&](int, int i) {
                    return Dual<double>(c[static_cast<std::size_t>(i)],
                                        static_cast<std::size_t>(i) == k ? 1.0 : 0.0);
                },
                t_ref, std::span<Dual<double>>(out));
            for (std::size_t r = 0; r < n; ++r) jac[r * n + k] = out[r].deriv;
        }
        std::vector<double> rhs(n);
        for (std::size_t r = 0; r < n; ++r) rhs[r] = -f[r];
        const auto dx = dense_solve(std::move(jac), std::move(rhs));
        bool accepted = false;
        for (double lambda = 1.0; lambda >= 1e-10; lambda *= 0.5) {
            std::vector<double> trial(n);
            for (std::size_t r = 0; r < n; ++r) trial[r] = c[r] + lambda * dx[r];
            std::vector<double> f_trial;
            try {
                f_trial = stationary_row(spec, trial, t_ref);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Domain) throw;
                continue;
            }
            const double trial_norm = max_abs(f_trial);
            if (trial_norm < norm) {
                c = std::move(trial);
                f = std::move(f_trial);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw Error(ErrorKind::Solve,
                        "steady-state line search stalled at residual " + std::to_string(norm));
        }
    }
    for (int later : {t_ref + 1, t_ref + 7}) {
        const double drift = max_abs(stationary_row(spec, c, later));
        if (drift > 1e-9) {
            throw Error(ErrorKind::Solve,
                        "utility is not stationary: the steady-state candidate leaves residual " +
                            std::to_string(drift) + " at t=" + std::to_string(later));
        }
    }
    return c;
}

namespace {

class NewtonProblem {
public:
    NewtonProblem(const EulerSystem& sys, TailPolicy tail, std::vector<double> steady)
        : sys_(sys), tail_(tail), steady_(std::move(steady)), n_(sys.dim()) {}

    Path materialize(std::span<const double> x) const {
        const auto& spec = sys_.spec;
        Path p(sys_.path_horizon(), n_);
        for (int t = 0; t < sys_.first_time; ++t) {
            for (int i = 0; i < n_; ++i) p(t, i) = *spec.pinned(t, i);
        }
        for (int t = sys_.first_time; t <= sys_.t_prime; ++t) {
            for (int i = 0; i < n_; ++i) {
                p(t, i) = x[static_cast<std::size_t>(sys_.index(t, i))];
            }
        }
        for (int t = sys_.t_prime + 1; t <= sys_.path_horizon(); ++t) {
            for (int i = 0; i < n_; ++i) {
                p(t, i) = tail_ == TailPolicy::SteadyStateClamp
                              ? steady_[static_cast<std::size_t>(i)]
                              : p(sys_.t_prime, i);
            }
        }
        return p;
    }

    std::vector<double> residual(std::span<const double> x) const {
        const Path p = materialize(x);
        std::vector<double> f(static_cast<std::size_t>(sys_.rows()));
        for (int t = sys_.first_time; t <= sys_.t_prime; ++t) {
            std::span<double> row(f.data() + sys_.index(t, 0), static_cast<std::size_t>(n_));
            detail::euler_row<double>(
                sys_.spec, [&](int time, int i) { return p(time, i); }, t, row);
        }
        return f;
    }

    BandedMatrix jacobian(std::span<const double> x) const {
        const Path p = materialize(x);
        const int hb = sys_.half_bandwidth();
        BandedMatrix jac(sys_.unknowns(), hb, hb);
        const int order = sys_.spec.order;
        std::vector<Dual<double>> out(static_cast<std::size_t>(n_));
        for (int u = sys_.first_time; u <= sys_.t_prime; ++u) {
            for (int k = 0; k < n_; ++k) {
                const int col = sys_.index(u, k);
                const bool drives_tail = tail_ == TailPolicy::ReplicateLast && u == sys_.t_prime;
                const auto access = [&](int time, int i) {
                    const bool seeded =
                        i == k && (time == u || (drives_tail && time > sys_.t_prime));
                    return Dual<double>(p(time, i), seeded ? 1.0 : 0.0);
                };
                const int lo = std::max(sys_.first_time, u - order + 1);
                const int hi = std::min(sys_.t_prime, u + order - 1);
                for (int t = lo; t <= hi; ++t) {
                    detail::euler_row<Dual<double>>(sys_.spec, access, t,
                                                    std::span<Dual<double>>(out));
                    for (int i = 0; i < n_; ++i) {
                        jac(sys_.index(t, i), col) = out[static_cast<std::size_t>(i)].deriv;
                    }
                }
            }
        }
        return jac;
    }

private:
    const EulerSystem& sys_;
    TailPolicy tail_;
    std::vector<double> steady_;
    int n_;
};

}  // namespace

SolveReport solve_truncated(const EulerSystem& sys, const SolveOptions& opts) {
    if (opts.max_iterations < 1 || !(opts.residual_tolerance > 0.0)) {
        throw Error(ErrorKind::Solve, "solve options need max_iterations >= 1 and tolerance > 0");
    }
    const auto& spec = sys.spec;
    const int n = sys.dim();
    SolveReport report;
    const auto seed = opts.steady_seed.empty()
                          ? default_seed(spec, opts.constant_guess.value_or(0.5))
                          : opts.steady_seed;
    std::vector<double> steady;
    try {
        steady = steady_state(spec, seed);
        report.steady_state = steady;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Solve && e.kind() != ErrorKind::Domain) throw;
    }
    report.tail_used = opts.tail_policy;
    if (opts.tail_policy == TailPolicy::SteadyStateClamp && steady.empty()) {
        report.tail_used = TailPolicy::ReplicateLast;
    }

    std::vector<double> x(static_cast<std::size_t>(sys.unknowns()));
    for (int t = sys.first_time; t <= sys.t_prime; ++t) {
        for (int i = 0; i < n; ++i) {
            double guess = 0.5;
            if (opts.path_guess && t <= opts.path_guess->horizon()) {
                guess = (*opts.path_guess)(t, i);
            } else if (opts.constant_guess) {
                guess = *opts.constant_guess;
            } else if (!steady.empty()) {
                guess = steady[static_cast<std::size_t>(i)];
            } else {
                guess = seed[static_cast<std::size_t>(i)];
            }
            x[static_cast<std::size_t>(sys.index(t, i))] = guess;
        }
    }

    const NewtonProblem problem(sys, report.tail_used, steady);
    std::vector<double> f = problem.residual(x);
    double norm = max_abs(f);
    int iterations = 0;
    while (norm > opts.residual_tolerance && iterations < opts.max_iterations) {
        BandedMatrix jac = problem.jacobian(x);
        jac.factorize();
        std::vector<double> dx(f.size());
        for (std::size_t r = 0; r < f.size(); ++r) dx[r] = -f[r];
        jac.solve(dx);
        bool accepted = false;
        for (double lambda = 1.0; lambda >= opts.min_step; lambda *= opts.backtrack_factor) {
            std::vector<double> trial(x.size());
            for (std::size_t r = 0; r < x.size(); ++r) trial[r] = x[r] + lambda * dx[r];
            std::vector<double> f_trial;
            try {
                f_trial = problem.residual(trial);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Domain) throw;
                continue;
            }
            const double trial_norm = max_abs(f_trial);
            if (trial_norm < norm) {
                x = std::move(trial);
                f = std::move(f_trial);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        ++iterations;
        if (!accepted) break;
    }

    report.iterations = iterations;
    report.final_residual_norm = norm;
    report.converged = norm <= opts.residual_tolerance;
    report.path = problem.materialize(x);
    return report;
}

}  // namespace tvckit
