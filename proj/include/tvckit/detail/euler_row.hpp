#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "tvckit/autodiff.hpp"
#include "tvckit/problem.hpp"

namespace tvckit::detail {

/// Euler row at time t: out[i] = sum over stages s = max(0, t-N+1)..t of
/// dU(s)/dc_i(t). `value(time, component)` supplies path entries of type T,
/// so nesting T = Dual<double> differentiates the row itself.
template <class T, class Access>
void euler_row(const ProblemSpec& spec, const Access& value, int t, std::span<T> out) {
    const int n = spec.dim();
    const int order = spec.order;
    std::vector<Dual<T>> window(static_cast<std::size_t>(n * order));
    std::fill(out.begin(), out.end(), T(0.0));
    for (int s = std::max(0, t - order + 1); s <= t; ++s) {
        for (int j = 0; j < order; ++j) {
            for (int i = 0; i < n; ++i) {
                window[static_cast<std::size_t>(j * n + i)] = Dual<T>(value(s + j, i), T(0.0));
            }
        }
        const StageView<Dual<T>> view{s, n, order, window, spec.params()};
        const int lag = t - s;
        for (int i = 0; i < n; ++i) {
            auto& slot = window[static_cast<std::size_t>(lag * n + i)];
            slot.deriv = T(1.0);
            try {
                out[static_cast<std::size_t>(i)] += eval(spec.utility, view).deriv;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Domain) throw;
                throw Error(ErrorKind::Domain, e.detail() + " (stage t=" + std::to_string(s) + ")",
                            e.pos());
            }
            slot.deriv = T(0.0);
        }
    }
}

}  // namespace tvckit::detail
