#include "tvckit/perturbation.hpp"

#include <string>

#include "tvckit/autodiff.hpp"

namespace tvckit {

namespace {

double pick(const std::vector<double>& v, int i) {
    return v.size() == 1 ? v.front() : v[static_cast<std::size_t>(i)];
}

}  // namespace

Path perturbation_path(const ProblemSpec& spec, const PerturbationSpec& q, int horizon,
                       const Path* optimal) {
    const int n = spec.dim();
    Path out(horizon, n);
    if (const auto* step = std::get_if<StepPerturbation>(&q.kind)) {
        for (int t = 1; t <= horizon; ++t) {
            const double ramp =
                t >= step->t0 ? 1.0 : static_cast<double>(t) / static_cast<double>(step->t0);
            for (int i = 0; i < n; ++i) out(t, i) = ramp * pick(step->level, i);
        }
    } else if (const auto* ex = std::get_if<ExprPerturbation>(&q.kind)) {
        for (int t = 0; t <= horizon; ++t) {
            for (int i = 0; i < n; ++i) {
                const Expr& e = ex->components.size() == 1
                                    ? ex->components.front()
                                    : ex->components[static_cast<std::size_t>(i)];
                out(t, i) = eval_in_time(e, t, spec.params());
            }
        }
    } else {
        const auto& sc = std::get<ScaledPerturbation>(q.kind);
        if (!optimal) {
            throw Error(ErrorKind::Semantic,
                        "scaled perturbation needs the optimal path it scales");
        }
        if (optimal->horizon() < horizon || optimal->dim() != n) {
            throw Error(ErrorKind::Window, "optimal path reaches t=" +
                                               std::to_string(optimal->horizon()) +
                                               ", perturbation needs t=" + std::to_string(horizon));
        }
        for (int t = 1; t <= horizon; ++t) {
            for (int i = 0; i < n; ++i) out(t, i) = sc.alpha * (*optimal)(t, i);
        }
    }
    for (const auto& pin : spec.pins) {
        if (pin.time <= horizon) out(pin.time, pin.component) = 0.0;
    }
    return out;
}

Path combine(double a, const Path& q1, double b, const Path& q2) {
    if (q1.horizon() != q2.horizon() || q1.dim() != q2.dim()) {
        throw Error(ErrorKind::Window, "cannot combine perturbations of different shapes");
    }
    Path out(q1.horizon(), q1.dim());
    for (int t = 0; t <= q1.horizon(); ++t) {
        for (int i = 0; i < q1.dim(); ++i) out(t, i) = a * q1(t, i) + b * q2(t, i);
    }
    return out;
}

}  // namespace tvckit
