#include "tvckit/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvckit/euler.hpp"
#include "tvckit/perturbation.hpp"

namespace tvckit {

const char* to_string(TvcClass c) {
    switch (c) {
        case TvcClass::Satisfied: return "satisfied";
        case TvcClass::Violated: return "violated";
        case TvcClass::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::vector<double> BoundaryTermSeries::running_inf() const {
    std::vector<double> out(entries.size());
    double acc = 0.0;
    for (std::size_t k = entries.size(); k-- > 0;) {
        acc = k + 1 == entries.size() ? entries[k].value : std::min(acc, entries[k].value);
        out[k] = acc;
    }
    return out;
}

double BoundaryTermSeries::max_magnitude() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, std::fabs(e.value));
    return m;
}

double boundary_term(const ProblemSpec& spec, const Path& path, const PerturbationSpec& q,
                     int t_prime) {
    const int last = t_prime + spec.order - 1;
    if (t_prime < 0 || path.horizon() < last) {
        throw Error(ErrorKind::Window, "boundary term at T'=" + std::to_string(t_prime) +
                                           " needs the path through t=" + std::to_string(last));
    }
    const Path qp = perturbation_path(spec, q, last, &path);
    return boundary_sum(spec, path, qp, t_prime);
}

BoundaryTermSeries tvc_series(const ProblemSpec& spec, const Path& path,
                              const PerturbationSpec& q, int t_min, int t_max) {
    if (t_min < spec.order - 1 || t_max < t_min) {
        throw Error(ErrorKind::Window, "series window [" + std::to_string(t_min) + ", " +
                                           std::to_string(t_max) +
                                           "] must satisfy N-1 <= T_min <= T_max");
    }
    const int last = t_max + spec.order - 1;
    if (path.horizon() < last) {
        throw Error(ErrorKind::Window, "series through T'=" + std::to_string(t_max) +
                                           " needs the path through t=" + std::to_string(last) +
                                           ", path ends at " + std::to_string(path.horizon()));
    }
    const Path qp = perturbation_path(spec, q, last, &path);
    BoundaryTermSeries series;
    series.t_min = t_min;
    series.t_max = t_max;
    series.entries.reserve(static_cast<std::size_t>(t_max - t_min + 1));
    for (int t = t_min; t <= t_max; ++t) {
        const double b = boundary_sum(spec, path, qp, t);
        if (!std::isfinite(b)) {
            throw Error(ErrorKind::Domain, "non-finite boundary term at T'=" + std::to_string(t));
        }
        series.entries.push_back({t, b});
    }
    return series;
}

double default_tvc_threshold(const BoundaryTermSeries& series) {
    return 1e-8 * series.max_magnitude();
}

TvcVerdict classify_tvc(const BoundaryTermSeries& series, double threshold) {
    const auto& e = series.entries;
    if (e.empty()) throw Error(ErrorKind::Window, "cannot classify an empty series");
    const std::size_t m = e.size();
    const std::size_t half = (m + 1) / 2;
    const std::size_t quarter = std::min(m, std::max<std::size_t>(2, (m + 3) / 4));

    TvcVerdict v;
    v.threshold = threshold;
    v.trailing_from = e[m - half].t_prime;
    v.trailing_to = e.back().t_prime;
    v.liminf_estimate = e[m - half].value;
    v.limsup_estimate = e[m - half].value;
    for (std::size_t k = m - half; k < m; ++k) {
        v.liminf_estimate = std::min(v.liminf_estimate, e[k].value);
        v.limsup_estimate = std::max(v.limsup_estimate, e[k].value);
    }
    double lo = e[m - quarter].value;
    double hi = lo;
    for (std::size_t k = m - quarter; k < m; ++k) {
        lo = std::min(lo, e[k].value);
        hi = std::max(hi, e[k].value);
    }
    const double scale = series.max_magnitude();
    v.drift = scale > 0.0 ? (hi - lo) / scale : 0.0;

    if (v.drift > kTvcDriftLimit) {
        v.classification = TvcClass::Inconclusive;
    } else if (v.liminf_estimate > threshold || v.limsup_estimate < -threshold) {
        v.classification = TvcClass::Violated;
    } else {
        v.classification = TvcClass::Satisfied;
    }
    return v;
}

BoundaryTermSeries michel_series(const ProblemSpec& spec, const Path& path, double alpha,
                                 int t_min, int t_max) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::Semantic, "Michel scale must lie in (0, 1]");
    }
    return tvc_series(spec, path, PerturbationSpec::scaled(alpha), t_min, t_max);
}

}  // namespace tvckit
