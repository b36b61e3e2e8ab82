#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pstokes/assembly.hpp"
#include "pstokes/band.hpp"
#include "pstokes/conditioning.hpp"
#include "pstokes/lanczos.hpp"
#include "pstokes/problems.hpp"
#include "pstokes/solve.hpp"

namespace pstokes {

// eps = 1 halved down to 2^-24 ~ 5.96e-8.
inline std::vector<double> default_eps_list() {
  std::vector<double> v;
  double e = 1.0;
  for (int i = 0; i <= 24; ++i, e *= 0.5) v.push_back(e);
  return v;
}

// n = 1 doubled up to 512 (h = 1 down to ~0.00195); per-element caps below
// restrict this to the desk-scale default.
inline std::vector<int> default_n_list() {
  std::vector<int> v;
  for (int n = 1; n <= 512; n *= 2) v.push_back(n);
  return v;
}

struct SweepConfig {
  std::vector<int> problems{1, 2};
  std::vector<int> degrees{1, 2};
  std::vector<double> eps_list = default_eps_list();
  std::vector<int> n_list = default_n_list();
  int max_n_p1 = 128;  // desk-scale caps; raise for the full range
  int max_n_p2 = 64;
  int load_quad_degree = 8;
  bool use_cg = false;  // direct band solver by default
  double solver_tol = 1e-10;
  bool eigen_enabled = true;
  int eigen_max_n = 64;  // eigen pass only on meshes up to this n
  double eigen_tol = 1e-6;
  int eigen_max_iters = 500;
  std::uint32_t seed = 20240817;
  int selection_stride = 4;     // table row selection: every 4th eps value
  std::ostream* log = nullptr;  // skip/failure notes, if set
};

inline void validate_config(const SweepConfig& cfg) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("sweep config: " + m); };
  if (cfg.problems.empty()) fail("no problems selected");
  for (int p : cfg.problems)
    if (p != 1 && p != 2) fail("unknown problem id " + std::to_string(p));
  if (cfg.degrees.empty()) fail("no elements selected");
  for (int d : cfg.degrees)
    if (d != 1 && d != 2) fail("unknown element degree " + std::to_string(d));
  if (cfg.eps_list.empty()) fail("empty eps list");
  for (double e : cfg.eps_list)
    if (!(e > 0.0)) fail("eps values must be positive");
  if (cfg.n_list.empty()) fail("empty mesh list");
  for (int n : cfg.n_list)
    if (n < 1) fail("mesh n must be >= 1");
  if (!(cfg.solver_tol > 0.0 && cfg.solver_tol < 1.0)) fail("solver tol out of range");
  if (!(cfg.eigen_tol > 0.0 && cfg.eigen_tol < 1.0)) fail("eigen tol out of range");
  if (cfg.selection_stride < 1) fail("selection stride must be >= 1");
  if (cfg.load_quad_degree < 1) fail("quadrature degree must be >= 1");
}

struct SweepRecord {
  ConditioningReport report;
  double wall_ms = 0.0;
  int solver_iters = 0;
  std::string solve_status = "ok";
  // energy identity diagnostics: c'Ac and c'b for the accepted solution
  double energy_c_ac = std::numeric_limits<double>::quiet_NaN();
  double energy_c_b = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline SweepRecord evaluate_cell(const SystemMatrices& sys, const CsrMatrix& a,
                                 const BandCholesky* factor, bool factor_broke,
                                 const EigenEstimate* eig, const std::vector<double>& b,
                                 double fh, int problem, double eps,
                                 const SweepConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepRecord rec;
  ConditioningReport& rep = rec.report;
  rep.problem = problem;
  rep.degree = sys.degree;
  rep.N = sys.N;
  rep.eps = eps;
  rep.h = sys.h;
  rep.fh_norm = fh;
  const double h2 = 1.0 / (sys.h * sys.h);
  rep.est1 = h2 + h2 / eps;  // closed form, available even if the solve fails

  SolveReport sol;
  if (cfg.use_cg) {
    sol = solve_spd_cg(a, b, cfg.solver_tol, 10000, true);
  } else if (factor_broke || factor == nullptr) {
    sol.status = SolveStatus::factorization_breakdown;
    sol.method = "direct";
  } else {
    sol = solve_with_factor(a, *factor, b, cfg.solver_tol);
  }
  rec.solver_iters = sol.iters;
  rec.solve_status = to_string(sol.status);

  if (sol.ok()) {
    rep.u_norm = l2_norm(sys.M, sol.c);
    rep.div_norm = div_norm(sys.D, sol.c);
    if (rep.u_norm > 0.0) {
      const Estimates est = estimates(eps, sys.h, rep.u_norm, rep.div_norm, fh);
      rep.est1 = est.est1;
      rep.est2 = est.est2;
      rep.est3 = est.est3;
    }
    rec.energy_c_ac = a.quad_form_accurate(sol.c, sol.c);
    rec.energy_c_b = detail::dot_accurate(sol.c, b);
  }

  if (eig != nullptr) {
    rep.eigen_skipped = false;
    if (eig->ok()) {
      rep.lambda_min = eig->lambda_min;
      rep.lambda_max = eig->lambda_max;
      rep.kappa = kappa(*eig);
      if (sol.ok() && detail::norm2(sol.c) > 0.0)
        rep.kappa_eff = kappa_eff(eig->lambda_min, sol.c, b);
    } else {
      rep.eigen_failed = true;
    }
  }

  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rec;
}

inline void sort_canonical(std::vector<SweepRecord>& recs) {
  std::sort(recs.begin(), recs.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.report.problem != b.report.problem) return a.report.problem < b.report.problem;
    if (a.report.degree != b.report.degree) return a.report.degree < b.report.degree;
    if (a.report.h != b.report.h) return a.report.h > b.report.h;
    return a.report.eps > b.report.eps;
  });
}

}  // namespace detail

// One standalone cell: assembles, solves, and fills a record.  The sweep
// below shares assembly and factorization work across cells instead.
inline SweepRecord run_cell(int problem, int degree, double eps,
                            const StructuredMesh& mesh, const SweepConfig& cfg) {
  validate_config(cfg);
  if (!(eps > 0.0)) throw std::invalid_argument("run_cell: eps must be positive");
  auto dof = build_dof_map(mesh, degree);
  auto sys = assemble_matrices(mesh, dof, quadrature(degree == 1 ? 2 : 4));
  auto b = assemble_load(mesh, dof, forcing(problem, mesh.h()),
                         quadrature(cfg.load_quad_degree));
  const double fh = fh_norm(sys.M, b, cfg.solver_tol);
  auto a = penalty_matrix(sys.K, sys.D, eps);

  const bool want_eigen = cfg.eigen_enabled && mesh.n() <= cfg.eigen_max_n;
  std::optional<BandCholesky> factor;
  bool broke = false;
  if (!cfg.use_cg || want_eigen) {
    factor.emplace(a);
    broke = !factor->factorize();
  }
  std::optional<EigenEstimate> eig;
  if (want_eigen && factor && !broke) {
    EigenOptions eo;
    eo.tol = cfg.eigen_tol;
    eo.max_iters = cfg.eigen_max_iters;
    eo.seed = cfg.seed;
    eig = extreme_eigenvalues(a, *factor, eo);
  }
  return detail::evaluate_cell(sys, a, factor ? &*factor : nullptr, broke,
                               eig ? &*eig : nullptr, b, fh, problem, eps, cfg);
}

// Full sweep.  K/D/M are assembled once per (element, mesh) and shared by the
// whole eps column; each A(eps) is factored once and the factor reused for
// all problems' solves and for the eigen pass.  Output order is canonical
// (problem, element, h descending, eps descending).
inline std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
  validate_config(cfg);
  std::vector<SweepRecord> out;
  for (int degree : cfg.degrees) {
    const int cap = degree == 1 ? cfg.max_n_p1 : cfg.max_n_p2;
    for (int n : cfg.n_list) {
      if (n > cap) continue;
      const StructuredMesh mesh = build_mesh(n);
      std::optional<DofMap> dof;
      try {
        dof = build_dof_map(mesh, degree);
      } catch (const std::invalid_argument& e) {
        if (cfg.log)
          *cfg.log << "skipping P" << degree << " n=" << n << ": " << e.what() << "\n";
        continue;
      }
      const auto sys = assemble_matrices(mesh, *dof, quadrature(degree == 1 ? 2 : 4));

      struct Load {
        int problem;
        std::vector<double> b;
        double fh;
      };
      std::vector<Load> loads;
      for (int p : cfg.problems) {
        auto b = assemble_load(mesh, *dof, forcing(p, mesh.h()),
                               quadrature(cfg.load_quad_degree));
        const double fh = fh_norm(sys.M, b, cfg.solver_tol);
        loads.push_back({p, std::move(b), fh});
      }

      const bool want_eigen_level = cfg.eigen_enabled && n <= cfg.eigen_max_n;
      for (double eps : cfg.eps_list) {
        const auto t0 = std::chrono::steady_clock::now();
        auto a = penalty_matrix(sys.K, sys.D, eps);
        std::optional<BandCholesky> factor;
        bool broke = false;
        if (!cfg.use_cg || want_eigen_level) {
          factor.emplace(a);
          broke = !factor->factorize();
          if (broke && cfg.log)
            *cfg.log << "factorization breakdown: P" << degree << " n=" << n
                     << " eps=" << eps << "\n";
        }
        std::optional<EigenEstimate> eig;
        if (want_eigen_level && factor && !broke) {
          EigenOptions eo;
          eo.tol = cfg.eigen_tol;
          eo.max_iters = cfg.eigen_max_iters;
          eo.seed = cfg.seed;
          eig = extreme_eigenvalues(a, *factor, eo);
          if (!eig->ok() && cfg.log)
            *cfg.log << "eigen pass did not converge: P" << degree << " n=" << n
                     << " eps=" << eps << "\n";
        }
        const double shared_ms = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - t0)
                                     .count();
        for (const Load& ld : loads) {
          SweepRecord rec = detail::evaluate_cell(sys, a, factor ? &*factor : nullptr,
                                                  broke, eig ? &*eig : nullptr, ld.b,
                                                  ld.fh, ld.problem, eps, cfg);
          rec.wall_ms += shared_ms / static_cast<double>(loads.size());
          out.push_back(std::move(rec));
        }
      }
    }
  }
  detail::sort_canonical(out);
  return out;
}

// The table row selection: every stride-th eps value from the descending
// distinct list, starting at the largest.
inline std::vector<double> select_eps(const std::vector<SweepRecord>& recs, int stride) {
  std::vector<double> eps;
  for (const auto& r : recs) eps.push_back(r.report.eps);
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  std::vector<double> sel;
  for (std::size_t i = 0; i < eps.size(); i += static_cast<std::size_t>(stride))
    sel.push_back(eps[i]);
  return sel;
}

}  // namespace pstokes
