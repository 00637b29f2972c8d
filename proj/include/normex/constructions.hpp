#pragma once

// Seeded constructions used as oracles and fixtures: commuting normal
// families, Kolmogorov factorization of positive block kernels, convex
// averaging of dilation families, T^inf evaluation, and the example gallery.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "normex/linalg.hpp"
#include "normex/representation.hpp"
#include "normex/semigroup.hpp"

namespace normex {

/// Haar-like unitary from Gram-Schmidt on a seeded complex Gaussian matrix.
CMatrix random_unitary(std::mt19937_64& rng, std::size_t dim);
/// Entries with independent standard complex Gaussian parts.
CMatrix random_gaussian(std::mt19937_64& rng, std::size_t rows, std::size_t cols);

/// N_i = W D_i W^* with one seeded unitary W and diagonal D_i drawn uniformly
/// from the closed unit disk.
std::vector<CMatrix> make_commuting_normals(std::uint64_t seed, std::size_t dim, std::size_t m);

/// Factors V_1..V_n with K_ij = V_i^* V_j, read off the spectral square root
/// of the assembled kernel. Throws NotPsdError when the kernel is not PSD
/// within tol.
std::vector<CMatrix> kolmogorov_factor(const std::vector<std::vector<CMatrix>>& kernel,
                                       std::optional<double> tol = std::nullopt);

/// Operators on K = K+ (+) H (+) K- in that coordinate order, each of the
/// lower triangular form [[A, 0, 0], [B, T, 0], [C, D, E]] with a common
/// middle corner T.
struct DilationFamily {
  std::vector<CMatrix> members;
  std::size_t plus_dim = 0;
  std::size_t subspace_dim = 0;
  std::size_t minus_dim = 0;

  std::size_t ambient_dim() const { return plus_dim + subspace_dim + minus_dim; }
  CMatrix corner(std::size_t i) const;
  /// The H -> K- block of member i.
  CMatrix defect(std::size_t i) const;
};

/// Structural checks (shape, common corner, zero upper blocks, orthogonal
/// defects with D_i^* D_i = I - T^*T) gate validity; unitarity and pairwise
/// commutation are reported without gating, since a finite family with
/// nonzero defects cannot be unitary.
ValidationVerdict validate_dilation_family(const DilationFamily& f, double tol = kDefaultResidualTol);

/// Finitely supported convex weights.
class ConvexWeights {
 public:
  /// Throws InputError unless every weight is in [0, 1] and the sum is 1
  /// within 1e-15.
  explicit ConvexWeights(std::vector<double> weights);
  static ConvexWeights uniform(std::size_t n);

  const std::vector<double>& weights() const { return weights_; }
  double sum() const;
  double l2_norm() const;

 private:
  std::vector<double> weights_;
};

struct ConvexAverage {
  CMatrix average;
  /// ||D_lambda||, the H -> K- block of the average.
  double defect_norm = 0.0;
  double weight_norm = 0.0;
};

/// N_lambda = sum lambda_i U_i. Throws InputError when the weights have more
/// entries than the family has members, or when the corner of the average
/// drifts from the common corner by more than tol.
ConvexAverage convex_average(const DilationFamily& f, const ConvexWeights& w, double tol = 1e-12);

/// n-member family with corner T (square contraction) whose defects are
/// D_i = e_i (x) (I - T^*T)^{1/2} in K- = H^n, so D_j^* D_i = 0 for i != j.
/// K+ = H carries B = (I - TT^*)^{1/2}. The remaining blocks are zero.
DilationFamily make_orthogonal_defect_family(const CMatrix& t, std::size_t n);

/// T^inf(x) = product over the support of T(component), ascending copy order.
/// x must lie in the positive cone of the power of t's descriptor.
CMatrix tinfty_eval(const Representation& t, const GroupElement& x);

struct GalleryParams {
  std::size_t dim = 2;
  std::vector<double> weights;
  double lambda = 0.5;
  CMatrix matrix;
  std::size_t k = 2;
  /// angles[i][j]: phase of diagonal entry j of generator i.
  std::vector<std::vector<double>> angles;
  std::uint64_t seed = 0;
};

using GalleryItem = std::variant<Representation, CMatrix>;

/// Names: jordan, truncated_shift, neil_scalar, neil_matrix, unitary_rep,
/// normal_pair. Throws InputError for unknown names or weights with modulus
/// above 1.
GalleryItem make_gallery(const std::string& name, const GalleryParams& params);

std::vector<std::string> gallery_names();

/// N \ {1} with the relation T(2)^3 = T(3)^2 recorded.
Representation neil_representation(const CMatrix& t2, const CMatrix& t3);

}  // namespace normex
