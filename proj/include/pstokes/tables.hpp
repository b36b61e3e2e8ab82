#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pstokes/sweep.hpp"

namespace pstokes {

inline constexpr const char* kCsvHeader =
    "problem,element,eps,h,n_dofs,u_norm,div_norm,fh_norm,est1,est2,est3,"
    "lambda_min,lambda_max,kappa,kappa_eff,solver_iters,solve_status";

namespace detail {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// empty field for quantities that were not computed (disabled eigen cells,
// failed solves)
inline std::string g17_or_empty(double v) { return std::isnan(v) ? "" : g17(v); }

// Two significant digits, uppercase E, no exponent padding: 39 -> "3.9E1",
// 0.0625 -> "6.2E-2".
inline std::string sci2(double v) {
  if (std::isnan(v)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.1E", v);
  std::string s = buf;
  auto e = s.find('E');
  if (e == std::string::npos) return s;  // inf
  std::string mant = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  bool neg = !exp.empty() && exp[0] == '-';
  if (!exp.empty() && (exp[0] == '+' || exp[0] == '-')) exp.erase(0, 1);
  while (exp.size() > 1 && exp[0] == '0') exp.erase(0, 1);
  return mant + "E" + (neg ? "-" : "") + exp;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Long-form CSV, one row per cell, full double precision.
inline std::string to_csv(const std::vector<SweepRecord>& recs) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : recs) {
    const ConditioningReport& c = r.report;
    out += std::to_string(c.problem) + ",p" + std::to_string(c.degree) + ",";
    out += detail::g17(c.eps) + "," + detail::g17(c.h) + ",";
    out += std::to_string(c.N) + ",";
    out += detail::g17_or_empty(c.u_norm) + "," + detail::g17_or_empty(c.div_norm) +
           "," + detail::g17_or_empty(c.fh_norm) + ",";
    out += detail::g17_or_empty(c.est1) + "," + detail::g17_or_empty(c.est2) + "," +
           detail::g17_or_empty(c.est3) + ",";
    out += detail::g17_or_empty(c.lambda_min) + "," +
           detail::g17_or_empty(c.lambda_max) + "," + detail::g17_or_empty(c.kappa) +
           "," + detail::g17_or_empty(c.kappa_eff) + ",";
    out += std::to_string(r.solver_iters) + "," + r.solve_status + "\n";
  }
  return out;
}

// Inverse of to_csv for the CSV-visible fields; validates the header.
inline std::vector<SweepRecord> parse_csv(const std::string& text) {
  std::vector<SweepRecord> recs;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    if (first) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line != kCsvHeader)
        throw std::runtime_error("parse_csv: unexpected header: " + line);
      first = false;
      continue;
    }
    auto f = detail::split_csv_line(line);
    if (f.size() != 17)
      throw std::runtime_error("parse_csv: expected 17 fields, got " +
                               std::to_string(f.size()));
    auto num = [](const std::string& s) {
      return s.empty() ? std::numeric_limits<double>::quiet_NaN()
                       : std::strtod(s.c_str(), nullptr);
    };
    SweepRecord r;
    ConditioningReport& c = r.report;
    c.problem = std::atoi(f[0].c_str());
    if (f[1] == "p1")
      c.degree = 1;
    else if (f[1] == "p2")
      c.degree = 2;
    else
      throw std::runtime_error("parse_csv: unknown element " + f[1]);
    c.eps = num(f[2]);
    c.h = num(f[3]);
    c.N = std::atoi(f[4].c_str());
    c.u_norm = num(f[5]);
    c.div_norm = num(f[6]);
    c.fh_norm = num(f[7]);
    c.est1 = num(f[8]);
    c.est2 = num(f[9]);
    c.est3 = num(f[10]);
    c.lambda_min = num(f[11]);
    c.lambda_max = num(f[12]);
    c.kappa = num(f[13]);
    c.kappa_eff = num(f[14]);
    c.eigen_skipped = std::isnan(c.lambda_min) && std::isnan(c.lambda_max);
    r.solver_iters = std::atoi(f[15].c_str());
    r.solve_status = f[16];
    recs.push_back(std::move(r));
  }
  if (first) throw std::runtime_error("parse_csv: missing header");
  return recs;
}

enum class Quantity { est1, est2, est3, kappa, kappa_eff, u_norm, div_norm, fh_norm };

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::est1: return "est1";
    case Quantity::est2: return "est2";
    case Quantity::est3: return "est3";
    case Quantity::kappa: return "kappa";
    case Quantity::kappa_eff: return "kappa_eff";
    case Quantity::u_norm: return "u_norm";
    case Quantity::div_norm: return "div_norm";
    case Quantity::fh_norm: return "fh_norm";
  }
  return "?";
}

inline double get_quantity(const ConditioningReport& c, Quantity q) {
  switch (q) {
    case Quantity::est1: return c.est1;
    case Quantity::est2: return c.est2;
    case Quantity::est3: return c.est3;
    case Quantity::kappa: return c.kappa;
    case Quantity::kappa_eff: return c.kappa_eff;
    case Quantity::u_norm: return c.u_norm;
    case Quantity::div_norm: return c.div_norm;
    case Quantity::fh_norm: return c.fh_norm;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// One eps-rows x h-columns grid for a (problem, element) group, with the
// stride-selected eps rows and every h present.
inline std::string markdown_table(const std::vector<SweepRecord>& recs, int problem,
                                  int degree, Quantity q, int stride) {
  std::vector<SweepRecord> group;
  for (const auto& r : recs)
    if (r.report.problem == problem && r.report.degree == degree) group.push_back(r);
  if (group.empty()) return "";

  std::vector<double> hs;
  for (const auto& r : group) hs.push_back(r.report.h);
  std::sort(hs.begin(), hs.end(), std::greater<>());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  const auto eps_rows = select_eps(group, stride);

  std::map<std::pair<double, double>, double> cell;
  for (const auto& r : group)
    cell[{r.report.eps, r.report.h}] = get_quantity(r.report, q);

  std::string out = "### " + std::string(to_string(q)) + " - problem " +
                    std::to_string(problem) + ", P" + std::to_string(degree) + "\n\n";
  out += "| eps \\ h |";
  for (double h : hs) out += " " + detail::sci2(h) + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < hs.size(); ++i) out += "---|";
  out += "\n";
  for (double e : eps_rows) {
    out += "| " + detail::sci2(e) + " |";
    for (double h : hs) {
      auto it = cell.find({e, h});
      out += " " + (it == cell.end() ? std::string("-") : detail::sci2(it->second)) +
             " |";
    }
    out += "\n";
  }
  return out + "\n";
}

// The full report: est2 and est3 grids per (problem, element) group, plus
// kappa and kappa_eff wherever the eigen pass produced values.
inline std::string to_markdown(const std::vector<SweepRecord>& recs, int stride) {
  std::string out;
  for (int problem : {1, 2})
    for (int degree : {1, 2}) {
      bool any = false, any_eigen = false;
      for (const auto& r : recs)
        if (r.report.problem == problem && r.report.degree == degree) {
          any = true;
          any_eigen = any_eigen || !std::isnan(r.report.kappa);
        }
      if (!any) continue;
      out += markdown_table(recs, problem, degree, Quantity::est2, stride);
      out += markdown_table(recs, problem, degree, Quantity::est3, stride);
      if (any_eigen) {
        out += markdown_table(recs, problem, degree, Quantity::kappa, stride);
        out += markdown_table(recs, problem, degree, Quantity::kappa_eff, stride);
      }
    }
  return out;
}

enum class TableFormat { csv, md, both };

inline TableFormat parse_format(const std::string& s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "md") return TableFormat::md;
  if (s == "both") return TableFormat::both;
  throw std::invalid_argument("unknown format: " + s);
}

struct TableOutput {
  std::string csv;
  std::string markdown;
};

inline TableOutput emit_tables(const std::vector<SweepRecord>& recs, TableFormat f,
                               int stride) {
  TableOutput out;
  if (f == TableFormat::csv || f == TableFormat::both) out.csv = to_csv(recs);
  if (f == TableFormat::md || f == TableFormat::both)
    out.markdown = to_markdown(recs, stride);
  return out;
}

}  // namespace pstokes
