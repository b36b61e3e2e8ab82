// Command-line front end: run the eps-h conditioning sweep and emit the
// result tables, or analyze a standalone MatrixMarket system.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pstokes/solve.hpp"
#include "pstokes/sweep.hpp"
#include "pstokes/tables.hpp"

namespace {

int run_sweep_command(const std::string& problem, const std::string& element,
                      int max_n, double min_eps, int quad_degree,
                      const std::string& solver, double tol, const std::string& eigen,
                      int eigen_max_n, unsigned seed, const std::string& format,
                      const std::string& out) {
  pstokes::SweepConfig cfg;
  if (problem == "1")
    cfg.problems = {1};
  else if (problem == "2")
    cfg.problems = {2};
  else if (problem != "all")
    throw std::invalid_argument("--problem must be 1, 2, or all");
  if (element == "p1")
    cfg.degrees = {1};
  else if (element == "p2")
    cfg.degrees = {2};
  else if (element != "all")
    throw std::invalid_argument("--element must be p1, p2, or all");
  if (max_n > 0) cfg.max_n_p1 = cfg.max_n_p2 = max_n;
  if (min_eps > 0.0) {
    std::vector<double> eps;
    for (double e : cfg.eps_list)
      if (e >= min_eps * (1.0 - 1e-12)) eps.push_back(e);
    if (eps.empty()) throw std::invalid_argument("--min-eps excludes every eps value");
    cfg.eps_list = std::move(eps);
  }
  cfg.load_quad_degree = quad_degree;
  cfg.use_cg = solver == "pcg";
  cfg.solver_tol = tol;
  cfg.eigen_enabled = eigen == "on";
  cfg.eigen_max_n = eigen_max_n;
  cfg.seed = seed;
  cfg.log = &std::cerr;

  const pstokes::TableFormat fmt = pstokes::parse_format(format);
  if (fmt == pstokes::TableFormat::both && out.empty())
    throw std::invalid_argument("--format both requires --out");

  const auto records = pstokes::run_sweep(cfg);
  const auto tables = pstokes::emit_tables(records, fmt, cfg.selection_stride);

  auto write_file = [](const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << text;
  };
  if (out.empty()) {
    std::cout << (fmt == pstokes::TableFormat::csv ? tables.csv : tables.markdown);
  } else if (fmt == pstokes::TableFormat::both) {
    write_file(out + ".csv", tables.csv);
    write_file(out + ".md", tables.markdown);
    std::cerr << records.size() << " records -> " << out << ".csv, " << out
              << ".md\n";
  } else {
    write_file(out, fmt == pstokes::TableFormat::csv ? tables.csv : tables.markdown);
    std::cerr << records.size() << " records -> " << out << "\n";
  }

  for (const auto& r : records)
    if (r.solve_status != "ok" || r.report.eigen_failed) {
      std::cerr << "failed cell: problem " << r.report.problem << " P"
                << r.report.degree << " h=" << r.report.h << " eps=" << r.report.eps
                << " (" << (r.solve_status != "ok" ? r.solve_status : "eigen") << ")\n";
      return 2;
    }
  return 0;
}

int run_analyze_command(const std::string& matrix_path, const std::string& rhs_path,
                        double tol) {
  std::ifstream ms(matrix_path);
  if (!ms) throw std::invalid_argument("cannot open matrix file " + matrix_path);
  const pstokes::CsrMatrix a = pstokes::read_matrix_market(ms);

  pstokes::BandCholesky factor(a);
  if (!factor.factorize()) {
    std::cerr << "factorization breakdown: matrix is not positive definite\n";
    return 2;
  }
  pstokes::EigenOptions opts;
  const auto eig = pstokes::extreme_eigenvalues(a, factor, opts);
  std::printf("n          %d\n", a.dim());
  std::printf("lambda_min %.17g\n", eig.lambda_min);
  std::printf("lambda_max %.17g\n", eig.lambda_max);
  std::printf("kappa      %.17g\n", eig.lambda_max / eig.lambda_min);

  if (!rhs_path.empty()) {
    std::ifstream rs(rhs_path);
    if (!rs) throw std::invalid_argument("cannot open rhs file " + rhs_path);
    const std::vector<double> b = pstokes::read_vector(rs);
    if (static_cast<int>(b.size()) != a.dim())
      throw std::invalid_argument("rhs length does not match matrix dimension");
    const auto sol = pstokes::solve_with_factor(a, factor, b, tol);
    if (!sol.ok()) {
      std::cerr << "solve failed: " << pstokes::to_string(sol.status) << "\n";
      return 2;
    }
    std::printf("kappa_eff  %.17g\n",
                pstokes::kappa_eff(eig.lambda_min, sol.c, b));
    std::printf("relres     %.3g\n", sol.relres);
  }
  if (!eig.ok()) {
    std::cerr << "eigen estimates did not converge (residuals " << eig.residual_min
              << ", " << eig.residual_max << ")\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized Stokes conditioning experiments"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "run the eps-h sweep and emit tables");
  std::string problem = "all", element = "all", solver = "direct", eigen = "on";
  std::string format = "csv", out;
  int max_n = 0, quad_degree = 8, eigen_max_n = 64;
  unsigned seed = 20240817;
  double min_eps = 0.0, tol = 1e-10;
  sweep->add_option("--problem", problem, "test problem: 1, 2, or all")
      ->check(CLI::IsMember({"1", "2", "all"}));
  sweep->add_option("--element", element, "element family: p1, p2, or all")
      ->check(CLI::IsMember({"p1", "p2", "all"}));
  sweep->add_option("--max-n", max_n,
                    "cap mesh subdivisions for both families (default: 128 for "
                    "p1, 64 for p2)");
  sweep->add_option("--min-eps", min_eps, "drop eps values below this");
  sweep->add_option("--quad-degree", quad_degree, "quadrature degree for loads");
  sweep->add_option("--solver", solver, "linear solver")
      ->check(CLI::IsMember({"direct", "pcg"}));
  sweep->add_option("--tol", tol, "solver tolerance (backward error)");
  sweep->add_option("--eigen", eigen, "extreme-eigenvalue pass")
      ->check(CLI::IsMember({"on", "off"}));
  sweep->add_option("--eigen-max-n", eigen_max_n, "run the eigen pass only on meshes up to this n");
  sweep->add_option("--seed", seed, "random seed for eigenvalue iterations");
  sweep->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "md", "both"}));
  sweep->add_option("--out", out,
                    "output path (stdout if omitted; 'both' writes <out>.csv and "
                    "<out>.md)");

  auto* analyze =
      app.add_subcommand("analyze", "condition numbers of a MatrixMarket system");
  std::string matrix_path, rhs_path;
  double analyze_tol = 1e-10;
  analyze->add_option("--matrix", matrix_path, "MatrixMarket file (SPD)")->required();
  analyze->add_option("--rhs", rhs_path, "right-hand side (one value per line)");
  analyze->add_option("--tol", analyze_tol, "solver tolerance for kappa_eff");

  try {
    app.parse(argc, argv);
    if (sweep->parsed())
      return run_sweep_command(problem, element, max_n, min_eps, quad_degree, solver,
                               tol, eigen, eigen_max_n, seed, format, out);
    return run_analyze_command(matrix_path, rhs_path, analyze_tol);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
