#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pstokes/lanczos.hpp"
#include "pstokes/solve.hpp"
#include "pstokes/sparse.hpp"

namespace pstokes {

// Everything the sweep records for one (problem, element, eps, h) cell.
// kappa/kappa_eff compare the matrix condition number against its effective,
// right-hand-side-dependent counterpart (1/lambda_min)|b|/|c|; est1..est3 are
// the a-priori, solution-based and divergence-based growth estimates, with
// their O(1) constants dropped.
struct ConditioningReport {
  int problem = 0;
  int degree = 0;
  int N = 0;
  double eps = std::numeric_limits<double>::quiet_NaN();
  double h = std::numeric_limits<double>::quiet_NaN();

  double u_norm = std::numeric_limits<double>::quiet_NaN();    // ||u^eps||, c'Mc
  double div_norm = std::numeric_limits<double>::quiet_NaN();  // ||div u^eps||, c'Dc
  double fh_norm = std::numeric_limits<double>::quiet_NaN();   // ||f^h||, b'M^{-1}b

  double est1 = std::numeric_limits<double>::quiet_NaN();
  double est2 = std::numeric_limits<double>::quiet_NaN();
  double est3 = std::numeric_limits<double>::quiet_NaN();

  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  double lambda_max = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double kappa_eff = std::numeric_limits<double>::quiet_NaN();

  bool eigen_skipped = true;  // eigen pass disabled or over the size cap
  bool eigen_failed = false;  // eigen pass ran but did not converge
};

// sqrt(c' M c); the exact L2 norm of the finite element function with
// coefficients c.
inline double l2_norm(const CsrMatrix& m, const std::vector<double>& c) {
  const double q = m.quad_form(c, c);
  return std::sqrt(std::max(0.0, q));
}

// sqrt(c' D c) = ||div u_h||; D is PSD, so this may vanish for nonzero c
// exactly when the space carries a discretely divergence-free field.
inline double div_norm(const CsrMatrix& d, const std::vector<double>& c) {
  const double q = d.quad_form(c, c);
  return std::sqrt(std::max(0.0, q));
}

// ||f^h|| where f^h is the L2 projection of f: with M a = b the squared norm
// is a' M a = a' b, so one well-conditioned mass solve suffices.  Plain CG is
// enough for M at every mesh level.
inline double fh_norm(const CsrMatrix& m, const std::vector<double>& b,
                      double tol = 1e-10) {
  const auto rep = solve_spd_cg(m, b, tol);
  if (!rep.ok())
    throw std::runtime_error(std::string("fh_norm: mass solve failed (") +
                             to_string(rep.status) + ")");
  return std::sqrt(std::max(0.0, detail::dot(b, rep.c)));
}

inline double kappa(const EigenEstimate& e) {
  if (!(e.lambda_min > 0.0) || !std::isfinite(e.lambda_max))
    throw std::invalid_argument("kappa: missing eigenvalue estimates");
  return e.lambda_max / e.lambda_min;
}

// Effective condition number (1/lambda_min) |b| / |c| in euclidean norms.
inline double kappa_eff(double lambda_min, const std::vector<double>& c,
                        const std::vector<double>& b) {
  if (!(lambda_min > 0.0))
    throw std::invalid_argument("kappa_eff: lambda_min must be positive");
  if (c.size() != b.size())
    throw std::invalid_argument("kappa_eff: dimension mismatch");
  const double cn = detail::norm2(c);
  if (cn == 0.0) throw std::invalid_argument("kappa_eff: zero solution vector");
  return detail::norm2(b) / cn / lambda_min;
}

struct Estimates {
  double est1, est2, est3;
};

// est1 = h^-2 + eps^-1 h^-2        (a-priori growth)
// est2 = ||f^h|| / ||u^eps||       (solution-based)
// est3 = eps^-1 h^-1 ||div u^eps|| / ||u^eps||
inline Estimates estimates(double eps, double h, double u_norm, double div_norm,
                           double fh_norm) {
  if (!(eps > 0.0) || !(h > 0.0))
    throw std::invalid_argument("estimates: eps and h must be positive");
  if (!(u_norm > 0.0))
    throw std::invalid_argument("estimates: zero u_norm (degenerate solve)");
  const double h2 = 1.0 / (h * h);
  return {h2 + h2 / eps, fh_norm / u_norm, div_norm / u_norm / (eps * h)};
}

struct AdaptiveBounds {
  double bound_u;     // h^-2 (1 + h TOL / eps)
  double bound_grad;  // h^-2 (1 + TOL / eps)
};

// Growth bounds when eps is adapted to an error tolerance TOL: bound_u keeps
// ||u - u^eps|| <= TOL, bound_grad keeps ||grad(u - u^eps)|| <= TOL.
inline AdaptiveBounds adaptive_bounds(double tol, double eps, double h) {
  const double h2 = 1.0 / (h * h);
  return {h2 * (1.0 + h * tol / eps), h2 * (1.0 + tol / eps)};
}

}  // namespace pstokes
