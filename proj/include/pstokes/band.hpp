#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pstokes/sparse.hpp"

namespace pstokes {

// Symmetric band Cholesky A = L L^T in the natural ordering.
//
// The structured-mesh DOF numbering keeps the half bandwidth at O(n), so a
// plain band factorization is predictable and robust for the ill-conditioned
// penalty systems (kappa up to ~1e12) where iterative methods stall.  Storage
// is the lower band, row-major: entry (i, j) with i-bw <= j <= i lives at
// band_[i*(bw+1) + j - i + bw], which makes the factorization inner products
// contiguous.
class BandCholesky {
public:
  explicit BandCholesky(const CsrMatrix& a) : n_(a.dim()) {
    for (int i = 0; i < n_; ++i)
      for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
        bw_ = std::max(bw_, std::abs(i - a.col()[k]));
    ld_ = bw_ + 1;
    band_.assign(static_cast<std::size_t>(n_) * ld_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
        int j = a.col()[k];
        if (j <= i) band_[static_cast<std::size_t>(i) * ld_ + j - i + bw_] = a.val()[k];
      }
  }

  int dim() const { return n_; }
  int bandwidth() const { return bw_; }
  bool factored() const { return factored_; }

  // In-place factorization; false on a non-positive pivot (matrix not SPD).
  bool factorize() {
    if (factored_) return true;
    for (int i = 0; i < n_; ++i) {
      const int k0 = std::max(0, i - bw_);
      double* ri = &band_[static_cast<std::size_t>(i) * ld_];
      for (int j = k0; j <= i; ++j) {
        const double* rj = &band_[static_cast<std::size_t>(j) * ld_];
        const int kj0 = std::max(k0, j - bw_);
        double s = ri[j - i + bw_];
        for (int k = kj0; k < j; ++k) s -= ri[k - i + bw_] * rj[k - j + bw_];
        if (j < i) {
          ri[j - i + bw_] = s / rj[bw_];
        } else {
          if (!(s > 0.0)) return false;  // breakdown (also catches NaN)
          ri[bw_] = std::sqrt(s);
        }
      }
    }
    factored_ = true;
    return true;
  }

  // Solve A x = b using the factor; b is overwritten with x.
  void solve_inplace(std::vector<double>& b) const {
    if (!factored_) throw std::logic_error("BandCholesky::solve: not factored");
    if (static_cast<int>(b.size()) != n_)
      throw std::invalid_argument("BandCholesky::solve: dimension mismatch");
    // forward L y = b
    for (int i = 0; i < n_; ++i) {
      const double* ri = &band_[static_cast<std::size_t>(i) * ld_];
      double s = b[i];
      for (int k = std::max(0, i - bw_); k < i; ++k) s -= ri[k - i + bw_] * b[k];
      b[i] = s / ri[bw_];
    }
    // backward L^T x = y
    for (int i = n_ - 1; i >= 0; --i) {
      const int kmax = std::min(n_ - 1, i + bw_);
      double s = b[i];
      for (int k = i + 1; k <= kmax; ++k)
        s -= band_[static_cast<std::size_t>(k) * ld_ + i - k + bw_] * b[k];
      b[i] = s / band_[static_cast<std::size_t>(i) * ld_ + bw_];
    }
  }

  std::vector<double> solve(std::vector<double> b) const {
    solve_inplace(b);
    return b;
  }

private:
  int n_ = 0;
  int bw_ = 0;
  int ld_ = 1;
  bool factored_ = false;
  std::vector<double> band_;
};

}  // namespace pstokes
