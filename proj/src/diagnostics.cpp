#include "tvckit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "tvckit/autodiff.hpp"
#include "tvckit/perturbation.hpp"

namespace tvckit {

const char* to_string(AssumptionClass c) {
    switch (c) {
        case AssumptionClass::Uniform: return "uniform";
        case AssumptionClass::NonUniform: return "non-uniform";
        case AssumptionClass::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

const char* to_string(OvertakingVerdict v) {
    switch (v) {
        case OvertakingVerdict::FirstOvertakes: return "first overtakes";
        case OvertakingVerdict::SecondOvertakes: return "second overtakes";
        case OvertakingVerdict::Incomparable: return "incomparable";
    }
    return "incomparable";
}

namespace {

/// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void require_reach(const ProblemSpec& spec, const Path& path, int t_prime) {
    const int last = t_prime + spec.order - 1;
    if (path.dim() != spec.dim()) {
        throw Error(ErrorKind::Window, "path dimension does not match the problem");
    }
    if (t_prime < 0 || path.horizon() < last) {
        throw Error(ErrorKind::Window, "sum through T'=" + std::to_string(t_prime) +
                                           " needs the path through t=" + std::to_string(last) +
                                           ", path ends at " + std::to_string(path.horizon()));
    }
}

double stage_value(const ProblemSpec& spec, const std::vector<double>& window, int t) {
    const StageView<double> view{t, spec.dim(), spec.order, window, spec.params()};
    try {
        return eval(spec.utility, view);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain) throw;
        throw Error(ErrorKind::Domain, e.detail() + " (stage t=" + std::to_string(t) + ")",
                    e.pos());
    }
}

/// Cumulative sums over t=0..last_stage of the per-stage differences
/// U(c+eps q) - U(c), or of the directional derivative when `exact`.
std::vector<double> cumulative_differences(const ProblemSpec& spec, const Path& path,
                                           const Path& q, double eps, int last_stage,
                                           bool exact) {
    const int n = spec.dim();
    const int order = spec.order;
    const auto width = static_cast<std::size_t>(n * order);
    std::vector<double> base(width), moved(width);
    std::vector<Dual<double>> dual(width);
    std::vector<double> out(static_cast<std::size_t>(last_stage + 1));
    CompensatedSum acc;
    for (int t = 0; t <= last_stage; ++t) {
        for (int j = 0; j < order; ++j) {
            for (int i = 0; i < n; ++i) {
                const auto k = static_cast<std::size_t>(j * n + i);
                base[k] = path(t + j, i);
                moved[k] = base[k] + eps * q(t + j, i);
                dual[k] = {base[k], q(t + j, i)};
            }
        }
        if (exact) {
            const StageView<Dual<double>> view{t, n, order, dual, spec.params()};
            acc.add(eval(spec.utility, view).deriv);
        } else {
            acc.add(stage_value(spec, moved, t) - stage_value(spec, base, t));
        }
        out[static_cast<std::size_t>(t)] = acc.value();
    }
    return out;
}

}  // namespace

double objective_diff_sum(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q,
                          double eps, int t_prime) {
    if (!(eps > 0.0)) throw Error(ErrorKind::Semantic, "epsilon must be positive");
    require_reach(spec, path, t_prime);
    const Path qp = perturbation_path(spec, q, t_prime + spec.order - 1, &path);
    return cumulative_differences(spec, path, qp, eps, t_prime, false).back();
}

double v_eps_T(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q, double eps,
               int T, int t_max) {
    if (!(eps > 0.0)) throw Error(ErrorKind::Semantic, "epsilon must be positive");
    if (T < 0 || T > t_max) {
        throw Error(ErrorKind::Window, "infimum window needs 0 <= T <= T_max");
    }
    require_reach(spec, path, t_max);
    const Path qp = perturbation_path(spec, q, t_max + spec.order - 1, &path);
    const auto sums = cumulative_differences(spec, path, qp, eps, t_max, false);
    return *std::min_element(sums.begin() + T, sums.end());
}

DiagGrid build_a_grid(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q,
                      const std::vector<double>& eps_values, const std::vector<int>& t_values,
                      int threads) {
    if (eps_values.empty() || t_values.empty()) {
        throw Error(ErrorKind::Window, "grid axes must be non-empty");
    }
    for (std::size_t k = 0; k < eps_values.size(); ++k) {
        if (!(eps_values[k] > 0.0)) throw Error(ErrorKind::Semantic, "epsilon must be positive");
        if (k && !(eps_values[k] < eps_values[k - 1])) {
            throw Error(ErrorKind::Semantic, "epsilon axis must be strictly decreasing");
        }
    }
    for (std::size_t k = 0; k < t_values.size(); ++k) {
        if (t_values[k] < 0 || (k && t_values[k] <= t_values[k - 1])) {
            throw Error(ErrorKind::Semantic, "T axis must be non-negative and strictly increasing");
        }
    }
    const int t_last = t_values.back();
    require_reach(spec, path, t_last);
    const Path qp = perturbation_path(spec, q, t_last + spec.order - 1, &path);

    DiagGrid grid;
    grid.eps_values = eps_values;
    grid.t_values = t_values;
    grid.a = Matrix(t_values.size(), eps_values.size());
    grid.exact_column.assign(eps_values.size(), false);
    for (std::size_t c = 0; c < eps_values.size(); ++c) {
        grid.exact_column[c] = eps_values[c] < kEpsilonFloor;
    }

    const auto fill_column = [&](std::size_t c) {
        const double eps = eps_values[c];
        const bool exact = grid.exact_column[c];
        const auto sums = cumulative_differences(spec, path, qp, eps, t_last, exact);
        for (std::size_t r = 0; r < t_values.size(); ++r) {
            const double s = sums[static_cast<std::size_t>(t_values[r])];
            grid.a(r, c) = exact ? s : s / eps;
        }
    };

    const auto columns = eps_values.size();
    const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 64));
    if (workers == 1 || columns == 1) {
        for (std::size_t c = 0; c < columns; ++c) fill_column(c);
        return grid;
    }
    std::vector<std::exception_ptr> errors(columns);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, columns); ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < columns; c += workers) {
                try {
                    fill_column(c);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return grid;
}

IteratedLimit sequence_limit(const std::vector<double>& v) {
    if (v.empty()) throw Error(ErrorKind::Window, "cannot extrapolate an empty sequence");
    if (v.size() == 1) return {false, v.front()};
    for (double x : v) {
        if (!std::isfinite(x)) return {true, 0.0};
    }
    const std::size_t m = v.size();
    bool up = true;
    bool down = true;
    for (std::size_t k = 1; k < m; ++k) {
        up = up && v[k] > v[k - 1];
        down = down && v[k] < v[k - 1];
    }
    const double total = std::fabs(v.back() - v.front());
    const double first_step = std::fabs(v[1] - v[0]);
    const bool moved = total > 1e-9 * std::max(1.0, std::fabs(v.front()));
    if ((up || down) && moved) {
        const bool value_growth = std::fabs(v.back()) > 10.0 * std::fabs(v.front());
        const bool step_growth = total > 10.0 * first_step;
        if (value_growth || step_growth) return {true, 0.0};
    }
    if (m >= 3) {
        const double d1 = v[m - 2] - v[m - 3];
        const double d2 = v[m - 1] - v[m - 2];
        if (d1 != 0.0) {
            const double r = d2 / d1;
            if (std::fabs(r) < 1.0) return {false, v.back() + d2 * r / (1.0 - r)};
        }
    }
    return {false, v.back()};
}

namespace {

/// Value at eps = 0 of the line through (e1, y1) and (e2, y2), e2 < e1.
double extrapolate_to_zero(double e1, double y1, double e2, double y2) {
    return y2 - e2 * (y1 - y2) / (e1 - e2);
}

}  // namespace

AssumptionVerdict assess_assumptions(const DiagGrid& grid, double tol) {
    const std::size_t ne = grid.eps_values.size();
    const std::size_t nt = grid.t_values.size();
    if (ne < 4 || nt < 4) {
        throw Error(ErrorKind::Window, "assumption check needs at least 4 values per axis");
    }
    if (grid.eps_values.front() < 100.0 * grid.eps_values.back()) {
        throw Error(ErrorKind::Window, "epsilon axis must span at least two decades");
    }
    if (grid.t_values.back() < 4 * std::max(1, grid.t_values.front())) {
        throw Error(ErrorKind::Window, "T axis must span at least a factor of 4");
    }

    AssumptionVerdict v;
    v.tolerance = tol;

    for (std::size_t c = 0; c < ne; ++c) {
        std::vector<double> column(nt);
        for (std::size_t r = 0; r < nt; ++r) column[r] = grid.a(r, c);
        v.column_limits.push_back(sequence_limit(column));
    }
    const auto& smallest = v.column_limits[ne - 1];
    const auto& next = v.column_limits[ne - 2];
    if (smallest.divergent) {
        v.l1 = {true, 0.0};
    } else if (next.divergent) {
        v.l1 = smallest;
    } else {
        v.l1 = {false, extrapolate_to_zero(grid.eps_values[ne - 2], next.value,
                                           grid.eps_values[ne - 1], smallest.value)};
    }

    std::vector<double> rows(nt);
    for (std::size_t r = 0; r < nt; ++r) {
        rows[r] = extrapolate_to_zero(grid.eps_values[ne - 2], grid.a(r, ne - 2),
                                      grid.eps_values[ne - 1], grid.a(r, ne - 1));
        v.row_limits.push_back({false, rows[r]});
    }
    v.l2 = sequence_limit(rows);

    for (std::size_t r = 0; r < nt; ++r) {
        double worst = 0.0;
        for (std::size_t c = 0; c < ne; ++c) {
            worst = std::max(worst, std::fabs(grid.a(r, c) - grid.a(nt - 1, c)));
        }
        v.uniformity_defect.push_back(worst);
    }

    if (v.l1.divergent && v.l2.divergent) {
        v.classification = AssumptionClass::Inconclusive;
    } else if (v.l1.divergent != v.l2.divergent) {
        v.classification = AssumptionClass::NonUniform;
    } else {
        v.classification = std::fabs(v.l1.value - v.l2.value) <= tol
                               ? AssumptionClass::Uniform
                               : AssumptionClass::NonUniform;
    }
    return v;
}

OvertakingComparison overtaking_compare(const ProblemSpec& spec, const Path& first,
                                        const Path& second, int t_max) {
    require_reach(spec, first, t_max);
    require_reach(spec, second, t_max);
    for (const auto& pin : spec.pins) {
        const double a = first(pin.time, pin.component);
        const double b = second(pin.time, pin.component);
        if (std::fabs(a - b) > 1e-12 * std::max(1.0, std::fabs(a))) {
            throw Error(ErrorKind::Semantic,
                        "paths disagree at pinned value " +
                            spec.vars[static_cast<std::size_t>(pin.component)] + "(" +
                            std::to_string(pin.time) + ")");
        }
    }
    const int n = spec.dim();
    const int order = spec.order;
    std::vector<double> wa(static_cast<std::size_t>(n * order));
    std::vector<double> wb(wa.size());
    OvertakingComparison out;
    out.t_max = t_max;
    out.d.resize(static_cast<std::size_t>(t_max + 1));
    CompensatedSum acc;
    for (int t = 0; t <= t_max; ++t) {
        for (int j = 0; j < order; ++j) {
            for (int i = 0; i < n; ++i) {
                wa[static_cast<std::size_t>(j * n + i)] = first(t + j, i);
                wb[static_cast<std::size_t>(j * n + i)] = second(t + j, i);
            }
        }
        acc.add(stage_value(spec, wa, t) - stage_value(spec, wb, t));
        out.d[static_cast<std::size_t>(t)] = acc.value();
    }
    double scale = 0.0;
    for (double x : out.d) scale = std::max(scale, std::fabs(x));
    out.margin = 1e-9 * std::max(1.0, scale);
    const std::size_t from = out.d.size() / 2;
    bool ahead = true;
    bool behind = true;
    for (std::size_t k = from; k < out.d.size(); ++k) {
        ahead = ahead && out.d[k] >= out.margin;
        behind = behind && out.d[k] <= -out.margin;
    }
    out.verdict = ahead    ? OvertakingVerdict::FirstOvertakes
                  : behind ? OvertakingVerdict::SecondOvertakes
                           : OvertakingVerdict::Incomparable;
    return out;
}

}  // namespace tvckit
