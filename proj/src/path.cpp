#include "tvckit/path.hpp"

#include <string>

#include "tvckit/error.hpp"

namespace tvckit {

Path::Path(int horizon, int dim, double fill)
    : horizon_(horizon),
      dim_(dim),
      values_(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(dim), fill) {
    if (horizon < 0 || dim < 1) {
        throw Error(ErrorKind::Window, "path needs horizon >= 0 and dimension >= 1");
    }
}

Path Path::from_values(int dim, std::vector<double> values) {
    if (dim < 1 || values.empty() || values.size() % static_cast<std::size_t>(dim) != 0) {
        throw Error(ErrorKind::Window, "path values do not form whole rows of dimension " +
                                           std::to_string(dim));
    }
    Path p;
    p.dim_ = dim;
    p.horizon_ = static_cast<int>(values.size() / static_cast<std::size_t>(dim)) - 1;
    p.values_ = std::move(values);
    return p;
}

double Path::at(int t, int i) const {
    if (t < 0 || t > horizon_ || i < 0 || i >= dim_) {
        throw Error(ErrorKind::Window, "path index (" + std::to_string(t) + ", " +
                                           std::to_string(i) + ") outside horizon " +
                                           std::to_string(horizon_));
    }
    return (*this)(t, i);
}

Path Path::truncated(int horizon) const {
    if (horizon > horizon_) {
        throw Error(ErrorKind::Window, "cannot truncate path of horizon " +
                                           std::to_string(horizon_) + " to " +
                                           std::to_string(horizon));
    }
    Path out(horizon, dim_);
    for (int t = 0; t <= horizon; ++t) {
        for (int i = 0; i < dim_; ++i) out(t, i) = (*this)(t, i);
    }
    return out;
}

}  // namespace tvckit
