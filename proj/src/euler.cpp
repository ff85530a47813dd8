#include "tvckit/euler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvckit/autodiff.hpp"
#include "tvckit/detail/euler_row.hpp"

namespace tvckit {

const char* to_string(AssemblyMode mode) {
    return mode == AssemblyMode::FreeInitial ? "free-initial" : "pinned-initial";
}

AssemblyMode parse_mode(const std::string& text) {
    if (text == "free-initial") return AssemblyMode::FreeInitial;
    if (text == "pinned-initial") return AssemblyMode::PinnedInitial;
    throw Error(ErrorKind::Semantic,
                "unknown mode '" + text + "' (expected free-initial or pinned-initial)");
}

int EulerSystem::index(int time, int component) const {
    if (time < first_time || time > t_prime || component < 0 || component >= dim()) return -1;
    return (time - first_time) * dim() + component;
}

EulerSystem assemble_system(const ProblemSpec& spec, int t_prime, AssemblyMode mode) {
    if (t_prime < spec.order - 1) {
        throw Error(ErrorKind::Window, "truncation T' = " + std::to_string(t_prime) +
                                           " is below N-1 = " + std::to_string(spec.order - 1));
    }
    if (mode == AssemblyMode::PinnedInitial && !spec.pins_complete()) {
        for (int t = 0; t + 1 < spec.order; ++t) {
            for (int i = 0; i < spec.dim(); ++i) {
                if (!spec.pinned(t, i)) {
                    throw Error(ErrorKind::Semantic,
                                "pinned-initial mode needs init values for t=0..N-2; missing " +
                                    spec.vars[static_cast<std::size_t>(i)] + "(" +
                                    std::to_string(t) + ")");
                }
            }
        }
    }
    EulerSystem sys;
    sys.spec = spec;
    sys.t_prime = t_prime;
    sys.mode = mode;
    sys.first_time = mode == AssemblyMode::PinnedInitial ? spec.order - 1 : 0;
    return sys;
}

namespace {

void require_reach(const Path& path, int last, const char* what) {
    if (path.horizon() < last) {
        throw Error(ErrorKind::Window, std::string(what) + " reaches t=" +
                                           std::to_string(path.horizon()) + " but t=" +
                                           std::to_string(last) + " is needed");
    }
}

void require_shape(const ProblemSpec& spec, const Path& path) {
    if (path.dim() != spec.dim()) {
        throw Error(ErrorKind::Window, "path has " + std::to_string(path.dim()) +
                                           " components, problem has " +
                                           std::to_string(spec.dim()));
    }
}

/// dU(s)/dc_i(s+j) for every slot, laid out [j*n + i].
std::vector<double> stage_gradient(const ProblemSpec& spec, const Path& path, int s) {
    const int n = spec.dim();
    const int order = spec.order;
    std::vector<Dual<double>> window(static_cast<std::size_t>(n * order));
    for (int j = 0; j < order; ++j) {
        for (int i = 0; i < n; ++i) window[static_cast<std::size_t>(j * n + i)] = path(s + j, i);
    }
    const StageView<Dual<double>> view{s, n, order, window, spec.params()};
    std::vector<double> grad(window.size());
    for (std::size_t k = 0; k < window.size(); ++k) {
        window[k].deriv = 1.0;
        grad[k] = eval(spec.utility, view).deriv;
        window[k].deriv = 0.0;
    }
    return grad;
}

}  // namespace

std::vector<double> euler_residual(const ProblemSpec& spec, const Path& path, int t) {
    require_shape(spec, path);
    if (t < 0 || t > path.horizon() - spec.order + 1) {
        throw Error(ErrorKind::Window, "Euler row t=" + std::to_string(t) +
                                           " needs the path through t=" +
                                           std::to_string(t + spec.order - 1) + ", path ends at " +
                                           std::to_string(path.horizon()));
    }
    std::vector<double> out(static_cast<std::size_t>(spec.dim()));
    detail::euler_row<double>(
        spec, [&](int time, int i) { return path(time, i); }, t, std::span<double>(out));
    return out;
}

double euler_residual_norm(const ProblemSpec& spec, const Path& path, int first_time,
                           int t_prime) {
    double worst = 0.0;
    for (int t = first_time; t <= t_prime; ++t) {
        for (double r : euler_residual(spec, path, t)) worst = std::max(worst, std::fabs(r));
    }
    return worst;
}

double directional_derivative_sum(const ProblemSpec& spec, const Path& path, const Path& q,
                                  int t_prime) {
    require_shape(spec, path);
    require_shape(spec, q);
    require_reach(path, t_prime + spec.order - 1, "path");
    require_reach(q, t_prime + spec.order - 1, "perturbation");
    const int n = spec.dim();
    const int order = spec.order;
    std::vector<Dual<double>> window(static_cast<std::size_t>(n * order));
    double total = 0.0;
    for (int t = 0; t <= t_prime; ++t) {
        for (int j = 0; j < order; ++j) {
            for (int i = 0; i < n; ++i) {
                window[static_cast<std::size_t>(j * n + i)] = {path(t + j, i), q(t + j, i)};
            }
        }
        const StageView<Dual<double>> view{t, n, order, window, spec.params()};
        total += eval(spec.utility, view).deriv;
    }
    return total;
}

double boundary_sum(const ProblemSpec& spec, const Path& path, const Path& q, int t_prime) {
    require_shape(spec, path);
    require_shape(spec, q);
    const int order = spec.order;
    const int n = spec.dim();
    require_reach(path, t_prime + order - 1, "path");
    require_reach(q, t_prime + order - 1, "perturbation");
    const int first_stage = std::max(0, t_prime - order + 2);
    std::vector<std::vector<double>> grads;
    for (int s = first_stage; s <= t_prime; ++s) grads.push_back(stage_gradient(spec, path, s));
    double total = 0.0;
    for (int k = 1; k < order; ++k) {
        const int target = t_prime + k;
        for (int i = 0; i < n; ++i) {
            double d = 0.0;
            for (int s = std::max(first_stage, t_prime - order + 1 + k); s <= t_prime; ++s) {
                d += grads[static_cast<std::size_t>(s - first_stage)]
                          [static_cast<std::size_t>((target - s) * n + i)];
            }
            total += d * q(target, i);
        }
    }
    return total;
}

IdentitySides directional_derivative_identity(const ProblemSpec& spec, const Path& path,
                                              const Path& q, int t_prime) {
    IdentitySides sides;
    sides.lhs = directional_derivative_sum(spec, path, q, t_prime);
    double weighted = 0.0;
    for (int t = 0; t <= t_prime; ++t) {
        const auto row = euler_residual(spec, path, t);
        for (int i = 0; i < spec.dim(); ++i) weighted += row[static_cast<std::size_t>(i)] * q(t, i);
    }
    sides.rhs = weighted + boundary_sum(spec, path, q, t_prime);
    return sides;
}

}  // namespace tvckit
