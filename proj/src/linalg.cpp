#include "normex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "normex/errors.hpp"

namespace normex {

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> entries) {
  CMatrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

CMatrix CMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  std::vector<std::vector<Complex>> v;
  for (const auto& r : rows) v.emplace_back(r);
  return from_rows(v);
}

CMatrix CMatrix::from_rows(const std::vector<std::vector<Complex>>& rows) {
  const std::size_t nrows = rows.size();
  const std::size_t ncols = nrows ? rows.front().size() : 0;
  CMatrix m(nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r) {
    if (rows[r].size() != ncols)
      throw InputError("ragged matrix: row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                       " entries, expected " + std::to_string(ncols));
    for (std::size_t c = 0; c < ncols; ++c) m(r, c) = rows[r][c];
  }
  m.require_finite("matrix");
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  return t;
}

CMatrix CMatrix::block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_) throw InputError("block out of range");
  CMatrix b(nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r)
    for (std::size_t c = 0; c < ncols; ++c) b(r, c) = (*this)(row0 + r, col0 + c);
  return b;
}

void CMatrix::set_block(std::size_t row0, std::size_t col0, const CMatrix& b) {
  if (row0 + b.rows_ > rows_ || col0 + b.cols_ > cols_) throw InputError("block out of range");
  for (std::size_t r = 0; r < b.rows_; ++r)
    for (std::size_t c = 0; c < b.cols_; ++c) (*this)(row0 + r, col0 + c) = b(r, c);
}

void CMatrix::require_finite(const char* what) const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InputError(std::string(what) + " has a non-finite entry");
}

CMatrix& CMatrix::operator+=(const CMatrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) throw InputError("shape mismatch in matrix addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += b.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) throw InputError("shape mismatch in matrix subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= b.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols_ != b.rows_) throw InputError("shape mismatch in matrix product");
  CMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    Complex* out = &c.data_[i * c.cols_];
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a.data_[i * a.cols_ + k];
      if (aik == Complex{}) continue;
      const Complex* row = &b.data_[k * b.cols_];
      for (std::size_t j = 0; j < b.cols_; ++j) out[j] += aik * row[j];
    }
  }
  return c;
}

CMatrix adjoint_times(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw InputError("shape mismatch in adjoint product");
  CMatrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const Complex aki = std::conj(a(k, i));
      if (aki == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  }
  return c;
}

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("shape mismatch in comparison");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double frobenius_norm(const CMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

double commutator_norm(const CMatrix& a, const CMatrix& b) { return operator_norm(a * b - b * a); }

double normality_residual(const CMatrix& a) { return operator_norm(adjoint_times(a, a) - a * a.adjoint()); }

// --- Hermitian eigensolver --------------------------------------------------

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p, q). The 2x2 unitary
//   V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]],   a(p, q) = |a(p, q)| e^{i phi}
// first makes a(p, q) real through a phase on column q and then applies the
// real symmetric rotation; A <- V^* A V and Q <- Q V on columns p, q.
void rotate(CMatrix& a, CMatrix& q, std::size_t p, std::size_t r) {
  const Complex apq = a(p, r);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = std::conj(apq) / mag;  // e^{-i phi}
  const double app = a(p, p).real();
  const double aqq = a(r, r).real();
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex v_pp = c;
  const Complex v_pq = s;
  const Complex v_qp = -s * phase;
  const Complex v_qq = c * phase;

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, r);
    a(k, p) = akp * v_pp + akq * v_qp;
    a(k, r) = akp * v_pq + akq * v_qq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(r, k);
    a(p, k) = std::conj(v_pp) * apk + std::conj(v_qp) * aqk;
    a(r, k) = std::conj(v_pq) * apk + std::conj(v_qq) * aqk;
  }
  a(p, r) = 0.0;
  a(r, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(r, r) = a(r, r).real();

  for (std::size_t k = 0; k < q.rows(); ++k) {
    const Complex qkp = q(k, p);
    const Complex qkq = q(k, r);
    q(k, p) = qkp * v_pp + qkq * v_qp;
    q(k, r) = qkp * v_pq + qkq * v_qq;
  }
}

}  // namespace

EigenDecomposition hermitian_eigen(const CMatrix& input) {
  if (!input.is_square()) throw InputError("eigendecomposition needs a square matrix");
  const std::size_t n = input.rows();
  CMatrix a = (input + input.adjoint()) * Complex(0.5);
  CMatrix q = CMatrix::identity(n);
  const double scale = frobenius_norm(a);
  const double target = 1e-14 * scale;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && scale > 0.0; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t r = p + 1; r < n; ++r)
        if (std::abs(a(p, r)) > 1e-300) rotate(a, q, p, r);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = q(r, order[k]);
  }
  return out;
}

PsdVerdict psd_check(const CMatrix& a, std::optional<double> tol) {
  if (!a.is_square())
    throw InputError("psd_check needs a square matrix, got " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()));
  a.require_finite("psd_check input");
  PsdVerdict v;
  v.hermitian_defect = frobenius_norm(a - a.adjoint());
  const auto eig = hermitian_eigen(a);
  double spectral = 0.0;
  for (double x : eig.values) spectral = std::max(spectral, std::abs(x));
  v.min_eigenvalue = eig.values.empty() ? 0.0 : eig.values.front();
  v.tolerance_used = tol ? *tol : kDefaultPsdRelTol * std::max(1.0, spectral);
  const double allowed = v.tolerance_used * std::max(1.0, frobenius_norm(a));
  if (v.hermitian_defect > allowed)
    throw NotHermitianError("matrix is not Hermitian: ||A - A*|| = " + std::to_string(v.hermitian_defect) +
                                " exceeds " + std::to_string(allowed),
                            v.hermitian_defect);
  v.is_psd = v.min_eigenvalue >= -v.tolerance_used;
  return v;
}

PsdVerdict loewner_leq(const CMatrix& a, const CMatrix& b, std::optional<double> tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InputError("loewner_leq shape mismatch: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  return psd_check(b - a, tol);
}

double operator_norm(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  // The smaller Gram matrix has the same nonzero spectrum.
  const CMatrix gram = a.cols() <= a.rows() ? adjoint_times(a, a) : a * a.adjoint();
  const auto eig = hermitian_eigen(gram);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

CMatrix block_assemble(const std::vector<std::vector<CMatrix>>& grid) {
  if (grid.empty()) return {};
  const std::size_t grid_cols = grid.front().size();
  std::vector<std::size_t> heights(grid.size()), widths(grid_cols);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != grid_cols) throw InputError("block grid row " + std::to_string(i) + " is ragged");
    heights[i] = grid[i].empty() ? 0 : grid[i][0].rows();
  }
  for (std::size_t j = 0; j < grid_cols; ++j) widths[j] = grid[0][j].cols();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid_cols; ++j)
      if (grid[i][j].rows() != heights[i] || grid[i][j].cols() != widths[j])
        throw InputError("block (" + std::to_string(i) + "," + std::to_string(j) + ") is " +
                         std::to_string(grid[i][j].rows()) + "x" + std::to_string(grid[i][j].cols()) +
                         ", expected " + std::to_string(heights[i]) + "x" + std::to_string(widths[j]));
  std::size_t total_rows = 0, total_cols = 0;
  for (auto h : heights) total_rows += h;
  for (auto w : widths) total_cols += w;
  CMatrix out(total_rows, total_cols);
  std::size_t r0 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t c0 = 0;
    for (std::size_t j = 0; j < grid_cols; ++j) {
      out.set_block(r0, c0, grid[i][j]);
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  return out;
}

BlockDecomposition block_decompose(const CMatrix& n, std::size_t subspace_dim) {
  if (!n.is_square()) throw InputError("block_decompose needs a square matrix");
  if (subspace_dim > n.rows())
    throw InputError("subspace dimension " + std::to_string(subspace_dim) + " exceeds " +
                     std::to_string(n.rows()));
  const std::size_t k = subspace_dim;
  const std::size_t rest = n.rows() - k;
  return {n.block(0, 0, k, k), n.block(0, k, k, rest), n.block(k, 0, rest, k), n.block(k, k, rest, rest), k};
}

CMatrix block_reassemble(const BlockDecomposition& b) {
  return block_assemble({{b.corner, b.upper_right}, {b.lower_left, b.complement}});
}

}  // namespace normex
