#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pstokes {

struct Triplet {
  int r = 0, c = 0;
  double v = 0.0;
};

// Square sparse matrix in CSR form with sorted, duplicate-free column indices
// per row.  Symmetric matrices store both triangles so matvec needs no
// special casing.
class CsrMatrix {
public:
  CsrMatrix() = default;

  static CsrMatrix from_triplets(int n, std::vector<Triplet> ts) {
    if (n < 0) throw std::invalid_argument("CsrMatrix: negative dimension");
    for (const auto& t : ts)
      if (t.r < 0 || t.r >= n || t.c < 0 || t.c >= n)
        throw std::out_of_range("CsrMatrix: triplet index out of range");
    std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
      return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    CsrMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(n + 1, 0);
    for (std::size_t k = 0; k < ts.size();) {
      std::size_t j = k;
      double s = 0.0;
      while (j < ts.size() && ts[j].r == ts[k].r && ts[j].c == ts[k].c)
        s += ts[j++].v;
      m.col_.push_back(ts[k].c);
      m.val_.push_back(s);
      ++m.row_ptr_[ts[k].r + 1];
      k = j;
    }
    for (int i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
    return m;
  }

  // Pattern-only construction: per-row sorted unique column lists, values 0.
  static CsrMatrix from_pattern(int n, const std::vector<std::vector<int>>& cols) {
    CsrMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(n + 1, 0);
    std::size_t nnz = 0;
    for (int i = 0; i < n; ++i) nnz += cols[i].size();
    m.col_.reserve(nnz);
    for (int i = 0; i < n; ++i) {
      m.row_ptr_[i + 1] = m.row_ptr_[i] + static_cast<int>(cols[i].size());
      m.col_.insert(m.col_.end(), cols[i].begin(), cols[i].end());
    }
    m.val_.assign(nnz, 0.0);
    return m;
  }

  int dim() const { return n_; }
  std::size_t nnz() const { return val_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col() const { return col_; }
  const std::vector<double>& val() const { return val_; }
  std::vector<double>& val() { return val_; }

  // Index of entry (r,c) in val(), or -1 if not present in the pattern.
  int find(int r, int c) const {
    const int *lo = col_.data() + row_ptr_[r], *hi = col_.data() + row_ptr_[r + 1];
    const int* it = std::lower_bound(lo, hi, c);
    if (it == hi || *it != c) return -1;
    return static_cast<int>(it - col_.data());
  }

  void add_at(int r, int c, double v) {
    int k = find(r, c);
    if (k < 0) throw std::out_of_range("CsrMatrix::add_at: entry not in pattern");
    val_[k] += v;
  }

  double at(int r, int c) const {
    int k = find(r, c);
    return k < 0 ? 0.0 : val_[k];
  }

  void matvec(const double* x, double* y) const {
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
      y[i] = s;
    }
  }

  std::vector<double> matvec(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("CsrMatrix::matvec: dimension mismatch");
    std::vector<double> y(n_);
    matvec(x.data(), y.data());
    return y;
  }

  void matvec(const std::vector<double>& x, std::vector<double>& y) const {
    if (static_cast<int>(x.size()) != n_)
      throw std::invalid_argument("CsrMatrix::matvec: dimension mismatch");
    y.resize(n_);
    matvec(x.data(), y.data());
  }

  // x^T A y
  double quad_form(const std::vector<double>& x, const std::vector<double>& y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
      throw std::invalid_argument("CsrMatrix::quad_form: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      double row = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) row += val_[k] * y[col_[k]];
      s += x[i] * row;
    }
    return s;
  }

  // max_i sum_k |a_ik|
  double inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(val_[k]);
      m = std::max(m, s);
    }
    return m;
  }

  // r = b - A x with Neumaier-compensated row sums.  Penalty matrices carry
  // entries of order 1/eps while the residual of a good iterate is tiny, so a
  // plain row sum loses the residual to cancellation; the compensated sum
  // keeps it to working accuracy.
  void residual_accurate(const std::vector<double>& x, const std::vector<double>& b,
                         std::vector<double>& r) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(b.size()) != n_)
      throw std::invalid_argument("CsrMatrix::residual_accurate: dimension mismatch");
    r.resize(n_);
    for (int i = 0; i < n_; ++i) {
      double s = b[i], comp = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const double t = -val_[k] * x[col_[k]];
        const double u = s + t;
        if (std::abs(s) >= std::abs(t))
          comp += (s - u) + t;
        else
          comp += (t - u) + s;
        s = u;
      }
      r[i] = s + comp;
    }
  }

  // x^T A y with compensated inner and outer sums, for identities evaluated
  // under heavy cancellation (e.g. divergence energies of near-solenoidal
  // fields).
  double quad_form_accurate(const std::vector<double>& x,
                            const std::vector<double>& y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
      throw std::invalid_argument("CsrMatrix::quad_form_accurate: dimension mismatch");
    double s = 0.0, comp = 0.0;
    for (int i = 0; i < n_; ++i) {
      double row = 0.0, rcomp = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        const double t = val_[k] * y[col_[k]];
        const double u = row + t;
        if (std::abs(row) >= std::abs(t))
          rcomp += (row - u) + t;
        else
          rcomp += (t - u) + row;
        row = u;
      }
      const double t = x[i] * (row + rcomp);
      const double u = s + t;
      if (std::abs(s) >= std::abs(t))
        comp += (s - u) + t;
      else
        comp += (t - u) + s;
      s = u;
    }
    return s + comp;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (int i = 0; i < n_; ++i) d[i] = at(i, i);
    return d;
  }

  bool same_pattern(const CsrMatrix& o) const {
    return n_ == o.n_ && row_ptr_ == o.row_ptr_ && col_ == o.col_;
  }

  // this + alpha * other, requiring matching patterns.
  CsrMatrix plus_scaled(const CsrMatrix& o, double alpha) const {
    if (!same_pattern(o))
      throw std::invalid_argument("CsrMatrix::plus_scaled: pattern mismatch");
    CsrMatrix m = *this;
    for (std::size_t k = 0; k < val_.size(); ++k) m.val_[k] += alpha * o.val_[k];
    return m;
  }

  bool is_symmetric(double tol = 0.0) const {
    for (int i = 0; i < n_; ++i)
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        double vt = at(col_[k], i);
        if (std::abs(val_[k] - vt) > tol) return false;
      }
    return true;
  }

private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> val_;
};

// MatrixMarket coordinate export, symmetric dialect: lower triangle, 1-based.
inline void write_matrix_market(std::ostream& os, const CsrMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::size_t count = 0;
  for (int i = 0; i < a.dim(); ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      if (a.col()[k] <= i) ++count;
  os << a.dim() << ' ' << a.dim() << ' ' << count << '\n';
  os.precision(17);
  for (int i = 0; i < a.dim(); ++i)
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      if (a.col()[k] <= i)
        os << i + 1 << ' ' << a.col()[k] + 1 << ' ' << a.val()[k] << '\n';
}

// Reads the coordinate real dialect, "general" or "symmetric".
inline CsrMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("matrix market: empty stream");
  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" ||
      field != "real")
    throw std::runtime_error("matrix market: unsupported header: " + line);
  bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw std::runtime_error("matrix market: unsupported symmetry: " + symmetry);

  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sz(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(sz >> rows >> cols >> nnz) || rows != cols)
    throw std::runtime_error("matrix market: bad size line");

  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v))
      throw std::runtime_error("matrix market: truncated entries");
    ts.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    if (symmetric && i != j)
      ts.push_back({static_cast<int>(j - 1), static_cast<int>(i - 1), v});
  }
  return CsrMatrix::from_triplets(static_cast<int>(rows), std::move(ts));
}

// Plain-text vector: one value per line (blank lines and % comments skipped).
inline std::vector<double> read_vector(std::istream& is) {
  std::vector<double> v;
  std::string line;
  while (std::getline(is, line)) {
    std::size_t p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '%') continue;
    v.push_back(std::stod(line));
  }
  return v;
}

}  // namespace pstokes
