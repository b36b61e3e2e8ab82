#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "pstokes/band.hpp"
#include "pstokes/sparse.hpp"

namespace pstokes {

struct EigenOptions {
  double tol = 1e-6;        // relative eigen-residual target
  int max_iters = 500;      // Lanczos steps per pass
  std::uint32_t seed = 20240817;  // starting-vector generator
};

// Extreme-eigenvalue estimates for an SPD matrix.  residual_* are the raw
// residual norms |A v - lambda v| for unit Ritz vectors.  Convergence is
// decided in each pass's own operator space -- |A v - lambda v| <= tol *
// lambda_max for the top pair, |A^{-1} v - theta v| <= tol * theta for the
// inverse pass -- so both eigenvalues carry ~tol relative accuracy even when
// they sit ~1e12 apart; either criterion also bounds the reported A-space
// residual by tol * lambda_max.
struct EigenEstimate {
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  double lambda_max = std::numeric_limits<double>::quiet_NaN();
  double residual_min = std::numeric_limits<double>::quiet_NaN();
  double residual_max = std::numeric_limits<double>::quiet_NaN();
  int iters_min = 0;
  int iters_max = 0;
  bool converged_min = false;
  bool converged_max = false;
  bool ok() const { return converged_min && converged_max; }
  double kappa() const { return lambda_max / lambda_min; }
};

namespace detail {

// Number of eigenvalues of the symmetric tridiagonal (alpha, beta) strictly
// below x, via the Sturm/LDL^T sign count.
inline int sturm_count_below(const std::vector<double>& alpha,
                             const std::vector<double>& beta, double x) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : beta[i - 1] * beta[i - 1];
    d = (alpha[i] - x) - b2 / d;
    if (d == 0.0) d = -std::numeric_limits<double>::min();
    if (d < 0.0) ++count;
  }
  return count;
}

// Largest eigenvalue of the tridiagonal by bisection on the Sturm count.
inline double tridiag_largest(const std::vector<double>& alpha,
                              const std::vector<double>& beta) {
  const int k = static_cast<int>(alpha.size());
  double lo = alpha[0], hi = alpha[0];
  for (int i = 0; i < k; ++i) {
    const double bl = i > 0 ? std::abs(beta[i - 1]) : 0.0;
    const double br = i < k - 1 ? std::abs(beta[i]) : 0.0;
    lo = std::min(lo, alpha[i] - bl - br);
    hi = std::max(hi, alpha[i] + bl + br);
  }
  const double span = std::max(hi - lo, 1e-300);
  hi += 1e-12 * span;  // make the upper end strictly above the spectrum
  lo -= 1e-12 * span;
  for (int it = 0; it < 120 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count_below(alpha, beta, mid) >= k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvector of the tridiagonal at a converged Ritz value, by inverse
// iteration with a partially pivoted tridiagonal LU.
inline std::vector<double> tridiag_eigvec(const std::vector<double>& alpha,
                                          const std::vector<double>& beta,
                                          double theta) {
  const int k = static_cast<int>(alpha.size());
  std::vector<double> y(k);
  for (int i = 0; i < k; ++i) y[i] = 1.0 / std::sqrt(static_cast<double>(k));
  for (int pass = 0; pass < 2; ++pass) {
    // bands of T - theta*I, with fill-in second superdiagonal from pivoting
    std::vector<double> dl(k, 0.0), dd(k, 0.0), du(k, 0.0), du2(k, 0.0);
    for (int i = 0; i < k; ++i) {
      dd[i] = alpha[i] - theta;
      if (i + 1 < k) {
        du[i] = beta[i];
        dl[i + 1] = beta[i];
      }
    }
    std::vector<double> z = y;
    for (int i = 0; i < k - 1; ++i) {
      if (std::abs(dl[i + 1]) > std::abs(dd[i])) {
        std::swap(dd[i], dl[i + 1]);
        std::swap(du[i], dd[i + 1]);
        std::swap(du2[i], du[i + 1]);
        std::swap(z[i], z[i + 1]);
      }
      if (dd[i] == 0.0) dd[i] = 1e-300;
      const double m = dl[i + 1] / dd[i];
      dd[i + 1] -= m * du[i];
      du[i + 1] -= m * du2[i];
      z[i + 1] -= m * z[i];
    }
    if (dd[k - 1] == 0.0) dd[k - 1] = 1e-300;
    for (int i = k - 1; i >= 0; --i) {
      double s = z[i];
      if (i + 1 < k) s -= du[i] * z[i + 1];
      if (i + 2 < k) s -= du2[i] * z[i + 2];
      z[i] = s / dd[i];
    }
    double nz = 0.0;
    for (double v : z) nz += v * v;
    nz = std::sqrt(nz);
    if (!(nz > 0.0) || !std::isfinite(nz)) break;
    for (int i = 0; i < k; ++i) y[i] = z[i] / nz;
  }
  return y;
}

struct LanczosResult {
  double theta = std::numeric_limits<double>::quiet_NaN();  // largest Ritz value
  std::vector<double> v;                                    // unit Ritz vector
  int iters = 0;
  bool converged = false;
};

// Lanczos with full reorthogonalization for the largest eigenvalue of a
// symmetric positive operator.  `verify(theta, v)` applies the caller's true
// residual test; the cheap beta*|y_k| estimate only gates when to attempt it.
template <class Op, class Verify>
LanczosResult lanczos_largest(int n, Op&& op, int max_iters, std::mt19937& rng,
                              double gate_tol, Verify&& verify) {
  LanczosResult out;
  std::normal_distribution<double> gauss;
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> v(n), w(n);
  double nv = 0.0;
  do {
    for (auto& x : v) x = gauss(rng);
    nv = 0.0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
  } while (!(nv > 0.0));
  for (auto& x : v) x /= nv;
  basis.push_back(v);

  double gate = gate_tol;
  auto make_ritz = [&](const std::vector<double>& y) {
    std::vector<double> r(n, 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (int i = 0; i < n; ++i) r[i] += y[j] * basis[j][i];
    double nr = 0.0;
    for (double x : r) nr += x * x;
    nr = std::sqrt(nr);
    for (auto& x : r) x /= nr;
    return r;
  };

  for (int k = 1; k <= max_iters; ++k) {
    op(basis.back(), w);
    double a = 0.0;
    for (int i = 0; i < n; ++i) a += basis.back()[i] * w[i];
    alpha.push_back(a);
    // full reorthogonalization, two classical Gram-Schmidt sweeps
    for (int sweep = 0; sweep < 2; ++sweep)
      for (const auto& q : basis) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) d += q[i] * w[i];
        for (int i = 0; i < n; ++i) w[i] -= d * q[i];
      }
    double b = 0.0;
    for (double x : w) b += x * x;
    b = std::sqrt(b);

    const double theta = tridiag_largest(alpha, beta);
    const auto y = tridiag_eigvec(alpha, beta, theta);
    const double est = b * std::abs(y.back());
    const double scale = std::max(std::abs(theta), 1e-300);

    const bool breakdown = b <= 1e-14 * std::max(scale, std::abs(alpha[0]));
    if (est <= gate * scale || breakdown || k == max_iters) {
      auto ritz = make_ritz(y);
      out.theta = theta;
      out.iters = k;
      if (verify(theta, ritz) || breakdown) {
        out.v = std::move(ritz);
        out.converged = true;
        return out;
      }
      out.v = std::move(ritz);  // best so far
      if (k == max_iters) return out;
      gate *= 0.25;  // estimate was optimistic; demand more before re-checking
    }
    beta.push_back(b);
    for (auto& x : w) x /= b;
    basis.push_back(w);
  }
  return out;
}

}  // namespace detail

// lambda_max by Lanczos on A, lambda_min by Lanczos on the factorized inverse
// (each step is one band solve); both verified against the true residual
// |A v - lambda v| <= tol * lambda_max.
inline EigenEstimate extreme_eigenvalues(const CsrMatrix& a, const BandCholesky& factor,
                                         const EigenOptions& opts = {}) {
  const int n = a.dim();
  if (n < 1) throw std::invalid_argument("extreme_eigenvalues: empty matrix");
  if (factor.dim() != n)
    throw std::invalid_argument("extreme_eigenvalues: factor dimension mismatch");
  if (!factor.factored())
    throw std::invalid_argument("extreme_eigenvalues: factor not computed");
  if (!(opts.tol > 0.0 && opts.tol < 1.0))
    throw std::invalid_argument("extreme_eigenvalues: tolerance must be in (0, 1)");

  EigenEstimate est;
  std::mt19937 rng(opts.seed);
  std::vector<double> av(n);

  auto true_residual = [&](double lambda, const std::vector<double>& v) {
    a.matvec(v, av);
    double r = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = av[i] - lambda * v[i];
      r += d * d;
    }
    return std::sqrt(r);
  };

  // pass 1: largest eigenvalue of A
  double res_max = std::numeric_limits<double>::quiet_NaN();
  auto pass_max = detail::lanczos_largest(
      n, [&](const std::vector<double>& x, std::vector<double>& y) { a.matvec(x, y); },
      opts.max_iters, rng, 0.5 * opts.tol,
      [&](double theta, const std::vector<double>& v) {
        res_max = true_residual(theta, v);
        return res_max <= opts.tol * std::abs(theta);
      });
  est.lambda_max = pass_max.theta;
  est.iters_max = pass_max.iters;
  est.converged_max = pass_max.converged;
  if (!pass_max.v.empty() && std::isnan(res_max))
    res_max = true_residual(pass_max.theta, pass_max.v);
  est.residual_max = res_max;

  // pass 2: smallest eigenvalue of A = 1 / largest of A^{-1}
  double res_min = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> bv(n);
  auto pass_min = detail::lanczos_largest(
      n,
      [&](const std::vector<double>& x, std::vector<double>& y) {
        y = x;
        factor.solve_inplace(y);
      },
      opts.max_iters, rng, 0.5 * opts.tol,
      [&](double theta, const std::vector<double>& v) {
        if (!(theta > 0.0)) return false;
        res_min = true_residual(1.0 / theta, v);
        bv = v;
        factor.solve_inplace(bv);
        double rb = 0.0;
        for (int i = 0; i < n; ++i) {
          const double d = bv[i] - theta * v[i];
          rb += d * d;
        }
        return std::sqrt(rb) <= opts.tol * theta;
      });
  est.iters_min = pass_min.iters;
  if (pass_min.theta > 0.0) {
    est.lambda_min = 1.0 / pass_min.theta;
    est.converged_min = pass_min.converged;
    if (!pass_min.v.empty() && std::isnan(res_min))
      res_min = true_residual(est.lambda_min, pass_min.v);
  } else {
    est.converged_min = false;
  }
  est.residual_min = res_min;
  return est;
}

// Convenience overload that factors A itself.
inline EigenEstimate extreme_eigenvalues(const CsrMatrix& a,
                                         const EigenOptions& opts = {}) {
  BandCholesky factor(a);
  if (!factor.factorize())
    throw std::runtime_error("extreme_eigenvalues: factorization breakdown");
  return extreme_eigenvalues(a, factor, opts);
}

}  // namespace pstokes
