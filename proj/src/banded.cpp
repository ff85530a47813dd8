#include "tvckit/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tvckit/error.hpp"

namespace tvckit {

BandedMatrix::BandedMatrix(int size, int lower, int upper)
    : size_(size),
      lower_(lower),
      upper_(upper),
      width_(lower + upper + 1),
      data_(static_cast<std::size_t>(size) * static_cast<std::size_t>(lower + upper + 1), 0.0) {
    if (size < 1 || lower < 0 || upper < 0) {
        throw Error(ErrorKind::Solve, "invalid band matrix shape");
    }
}

void BandedMatrix::factorize() {
    std::vector<double> scale(static_cast<std::size_t>(size_), 0.0);
    for (int r = 0; r < size_; ++r) {
        for (int c = std::max(0, r - lower_); c <= std::min(size_ - 1, r + upper_); ++c) {
            scale[static_cast<std::size_t>(r)] =
                std::max(scale[static_cast<std::size_t>(r)], std::fabs((*this)(r, c)));
        }
    }
    constexpr double tiny = 64.0 * std::numeric_limits<double>::epsilon();
    for (int k = 0; k < size_; ++k) {
        const double pivot = (*this)(k, k);
        if (!(std::fabs(pivot) > tiny * scale[static_cast<std::size_t>(k)]) ||
            !std::isfinite(pivot)) {
            throw Error(ErrorKind::Solve,
                        "singular banded factorization at row " + std::to_string(k));
        }
        const int last_row = std::min(size_ - 1, k + lower_);
        const int last_col = std::min(size_ - 1, k + upper_);
        for (int r = k + 1; r <= last_row; ++r) {
            const double m = (*this)(r, k) / pivot;
            (*this)(r, k) = m;
            if (m == 0.0) continue;
            for (int c = k + 1; c <= last_col; ++c) (*this)(r, c) -= m * (*this)(k, c);
        }
    }
    factored_ = true;
}

void BandedMatrix::solve(std::span<double> rhs) const {
    if (!factored_ || static_cast<int>(rhs.size()) != size_) {
        throw Error(ErrorKind::Solve, "band solve needs a factored matrix and matching rhs");
    }
    for (int r = 0; r < size_; ++r) {
        double acc = rhs[static_cast<std::size_t>(r)];
        for (int c = std::max(0, r - lower_); c < r; ++c) {
            acc -= (*this)(r, c) * rhs[static_cast<std::size_t>(c)];
        }
        rhs[static_cast<std::size_t>(r)] = acc;
    }
    for (int r = size_ - 1; r >= 0; --r) {
        double acc = rhs[static_cast<std::size_t>(r)];
        for (int c = r + 1; c <= std::min(size_ - 1, r + upper_); ++c) {
            acc -= (*this)(r, c) * rhs[static_cast<std::size_t>(c)];
        }
        rhs[static_cast<std::size_t>(r)] = acc / (*this)(r, r);
    }
}

}  // namespace tvckit
