#pragma once

// Dense complex matrices and the Hermitian spectral machinery behind every
// positivity verdict.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace normex {

using Complex = std::complex<double>;

/// Dense row-major complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  /// Zero matrix.
  CMatrix(std::size_t rows, std::size_t cols);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> entries);
  /// Throws InputError on ragged rows or non-finite entries.
  static CMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);
  static CMatrix from_rows(const std::vector<std::vector<Complex>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }

  CMatrix adjoint() const;
  CMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const;
  void set_block(std::size_t row0, std::size_t col0, const CMatrix& b);

  /// Throws InputError if any entry is NaN or infinite.
  void require_finite(const char* what) const;

  CMatrix& operator+=(const CMatrix& b);
  CMatrix& operator-=(const CMatrix& b);
  CMatrix& operator*=(Complex s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// A^* B without forming the adjoint.
CMatrix adjoint_times(const CMatrix& a, const CMatrix& b);

double max_abs(const CMatrix& a);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
double frobenius_norm(const CMatrix& a);

/// ||AB - BA||.
double commutator_norm(const CMatrix& a, const CMatrix& b);
/// ||A^*A - AA^*||.
double normality_residual(const CMatrix& a);

struct EigenDecomposition {
  /// Ascending.
  std::vector<double> values;
  /// Columns are the matching orthonormal eigenvectors.
  CMatrix vectors;
};

/// Spectral decomposition of the Hermitian part (A + A^*)/2 by cyclic complex
/// Jacobi rotations, run until the off-diagonal mass is below 1e-14 ||A||_F.
EigenDecomposition hermitian_eigen(const CMatrix& a);

struct PsdVerdict {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  /// ||A - A^*||_F.
  double hermitian_defect = 0.0;
  double tolerance_used = 0.0;
};

/// Default positivity tolerance: 1e-8 max(1, ||A||).
inline constexpr double kDefaultPsdRelTol = 1e-8;

/// Symmetrizes after recording the Hermitian defect, then decides positivity
/// from the smallest eigenvalue. With no tol the default relative tolerance
/// is used. Throws NotHermitianError when the defect exceeds
/// tol * max(1, ||A||_F), InputError when A is not square or not finite.
PsdVerdict psd_check(const CMatrix& a, std::optional<double> tol = std::nullopt);

/// A <= B in the Loewner order, i.e. psd_check(B - A).
PsdVerdict loewner_leq(const CMatrix& a, const CMatrix& b, std::optional<double> tol = std::nullopt);

/// Largest singular value, sqrt of the top eigenvalue of A^*A.
double operator_norm(const CMatrix& a);

/// Concatenates a grid of blocks. Every block in a grid row shares a height
/// and every block in a grid column shares a width.
CMatrix block_assemble(const std::vector<std::vector<CMatrix>>& grid);

/// Blocks of N relative to H = span of the first subspace_dim coordinates:
///   N = [ corner     upper_right ]
///       [ lower_left complement  ]
struct BlockDecomposition {
  CMatrix corner;
  CMatrix upper_right;
  CMatrix lower_left;
  CMatrix complement;
  std::size_t subspace_dim = 0;
};

BlockDecomposition block_decompose(const CMatrix& n, std::size_t subspace_dim);
CMatrix block_reassemble(const BlockDecomposition& b);

}  // namespace normex
