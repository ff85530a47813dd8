#pragma once

#include <span>
#include <vector>

namespace tvckit {

/// Square band matrix with `lower` sub- and `upper` super-diagonals,
/// factored in place as LU without pivoting.
class BandedMatrix {
public:
    BandedMatrix(int size, int lower, int upper);

    int size() const noexcept { return size_; }
    int lower() const noexcept { return lower_; }
    int upper() const noexcept { return upper_; }

    bool in_band(int r, int c) const { return c - r <= upper_ && r - c <= lower_; }

    /// Entry (r, c); must lie inside the band.
    double& operator()(int r, int c) { return data_[offset(r, c)]; }
    double operator()(int r, int c) const { return in_band(r, c) ? data_[offset(r, c)] : 0.0; }

    /// Doolittle LU in place. Throws Error(Solve) on a pivot that is zero
    /// relative to its row scale.
    void factorize();

    /// Solves A x = rhs in place; requires factorize() first.
    void solve(std::span<double> rhs) const;

private:
    std::size_t offset(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c - r + lower_);
    }

    int size_;
    int lower_;
    int upper_;
    int width_;
    bool factored_ = false;
    std::vector<double> data_;
};

}  // namespace tvckit
