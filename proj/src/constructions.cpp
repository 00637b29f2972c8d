#include "normex/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "normex/errors.hpp"

namespace normex {

namespace {

// Spectral square root of the Hermitian part, negative eigenvalues clamped.
CMatrix psd_sqrt(const CMatrix& a) {
  const auto eig = hermitian_eigen(a);
  const std::size_t n = a.rows();
  CMatrix scaled = eig.vectors;
  for (std::size_t c = 0; c < n; ++c) {
    const double s = std::sqrt(std::max(0.0, eig.values[c]));
    for (std::size_t r = 0; r < n; ++r) scaled(r, c) *= s;
  }
  return scaled * eig.vectors.adjoint();
}

}  // namespace

CMatrix random_gaussian(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  for (auto& z : m.data()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = Complex(re, im);
  }
  return m;
}

CMatrix random_unitary(std::mt19937_64& rng, std::size_t dim) {
  CMatrix q = random_gaussian(rng, dim, dim);
  // Modified Gram-Schmidt over columns, run twice for orthogonality to
  // working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t c = 0; c < dim; ++c) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        Complex dot = 0.0;
        for (std::size_t r = 0; r < dim; ++r) dot += std::conj(q(r, prev)) * q(r, c);
        for (std::size_t r = 0; r < dim; ++r) q(r, c) -= dot * q(r, prev);
      }
      double norm = 0.0;
      for (std::size_t r = 0; r < dim; ++r) norm += std::norm(q(r, c));
      norm = std::sqrt(norm);
      for (std::size_t r = 0; r < dim; ++r) q(r, c) /= norm;
    }
  }
  return q;
}

std::vector<CMatrix> make_commuting_normals(std::uint64_t seed, std::size_t dim, std::size_t m) {
  if (dim == 0 || m == 0) throw InputError("make_commuting_normals needs dim >= 1 and m >= 1");
  std::mt19937_64 rng(seed);
  const CMatrix w = random_unitary(rng, dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CMatrix> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Complex> diag(dim);
    for (auto& z : diag) {
      const double radius = std::sqrt(unit(rng));
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      z = std::polar(radius, angle);
    }
    out.push_back(w * CMatrix::diagonal(diag) * w.adjoint());
  }
  return out;
}

std::vector<CMatrix> kolmogorov_factor(const std::vector<std::vector<CMatrix>>& kernel, std::optional<double> tol) {
  const CMatrix k = block_assemble(kernel);
  if (!k.is_square()) throw InputError("kernel grid must assemble to a square matrix");
  const auto verdict = psd_check(k, tol);
  if (!verdict.is_psd)
    throw NotPsdError("kernel is not positive semidefinite (min eigenvalue " +
                          std::to_string(verdict.min_eigenvalue) + ")",
                      verdict.min_eigenvalue);
  // K = R^* R with R = Lambda^{1/2} Q^*; V_j is the column block j of R.
  const auto eig = hermitian_eigen(k);
  const std::size_t n = k.rows();
  CMatrix root = eig.vectors.adjoint();
  for (std::size_t r = 0; r < n; ++r) {
    const double s = std::sqrt(std::max(0.0, eig.values[r]));
    for (std::size_t c = 0; c < n; ++c) root(r, c) *= s;
  }
  std::vector<CMatrix> factors;
  std::size_t col = 0;
  for (std::size_t j = 0; j < kernel.size(); ++j) {
    const std::size_t width = kernel[0][j].cols();
    factors.push_back(root.block(0, col, n, width));
    col += width;
  }
  return factors;
}

CMatrix DilationFamily::corner(std::size_t i) const {
  return members.at(i).block(plus_dim, plus_dim, subspace_dim, subspace_dim);
}

CMatrix DilationFamily::defect(std::size_t i) const {
  return members.at(i).block(plus_dim + subspace_dim, plus_dim, minus_dim, subspace_dim);
}

ValidationVerdict validate_dilation_family(const DilationFamily& f, double tol) {
  const std::size_t dim = f.ambient_dim();
  for (const auto& u : f.members)
    if (u.rows() != dim || u.cols() != dim)
      throw InputError("dilation family member is not " + std::to_string(dim) + "x" + std::to_string(dim));
  ValidationVerdict v;
  if (f.members.empty()) {
    v.checks.push_back({"nonempty", false, 0.0, "family has no members"});
    return v;
  }
  const std::size_t p = f.plus_dim, h = f.subspace_dim, m = f.minus_dim;
  const CMatrix t = f.corner(0);
  const CMatrix defect_gram = CMatrix::identity(h) - adjoint_times(t, t);
  Check corner{"common_corner", true, 0.0, {}}, upper{"zero_upper_blocks", true, 0.0, {}},
      orth{"orthogonal_defects", true, 0.0, {}}, isom{"defect_gram", true, 0.0, {}};
  Check unitary{"unitary", true, 0.0, {}, false}, commute{"commuting", true, 0.0, {}, false};
  auto note = [&](Check& c, double r, std::size_t i) {
    c.residual = std::max(c.residual, r);
    if (r > tol && c.ok) {
      c.ok = false;
      c.detail = "member " + std::to_string(i);
    }
  };
  for (std::size_t i = 0; i < f.members.size(); ++i) {
    const auto& u = f.members[i];
    note(corner, max_abs_diff(f.corner(i), t), i);
    double up = std::max(max_abs(u.block(0, p, p, h + m)), max_abs(u.block(p, p + h, h, m)));
    note(upper, up, i);
    const CMatrix di = f.defect(i);
    note(isom, operator_norm(adjoint_times(di, di) - defect_gram), i);
    note(unitary, operator_norm(adjoint_times(u, u) - CMatrix::identity(dim)), i);
    for (std::size_t j = i + 1; j < f.members.size(); ++j) {
      note(orth, operator_norm(adjoint_times(f.defect(j), di)), i);
      note(commute, commutator_norm(u, f.members[j]), i);
    }
  }
  v.checks = {corner, upper, orth, isom, unitary, commute};
  return v;
}

ConvexWeights::ConvexWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (!(weights_[i] >= 0.0 && weights_[i] <= 1.0))
      throw InputError("weight " + std::to_string(i) + " is outside [0, 1]");
  if (std::abs(sum() - 1.0) > 1e-15) throw InputError("weights do not sum to 1");
}

ConvexWeights ConvexWeights::uniform(std::size_t n) {
  if (n == 0) throw InputError("uniform weights need at least one member");
  return ConvexWeights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double ConvexWeights::sum() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double ConvexWeights::l2_norm() const {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return std::sqrt(s);
}

ConvexAverage convex_average(const DilationFamily& f, const ConvexWeights& w, double tol) {
  const auto& lambda = w.weights();
  if (lambda.size() > f.members.size())
    throw InputError("weights have " + std::to_string(lambda.size()) + " entries for a family of " +
                     std::to_string(f.members.size()));
  if (f.members.empty()) throw InputError("empty dilation family");
  const std::size_t dim = f.ambient_dim();
  ConvexAverage out;
  out.average = CMatrix(dim, dim);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (f.members[i].rows() != dim || f.members[i].cols() != dim)
      throw InputError("dilation family member has the wrong shape");
    out.average += f.members[i] * Complex(lambda[i]);
  }
  const CMatrix corner = out.average.block(f.plus_dim, f.plus_dim, f.subspace_dim, f.subspace_dim);
  const double drift = max_abs_diff(corner, f.corner(0));
  if (drift > tol)
    throw InputError("corner of the average differs from the family corner by " + std::to_string(drift));
  out.defect_norm =
      operator_norm(out.average.block(f.plus_dim + f.subspace_dim, f.plus_dim, f.minus_dim, f.subspace_dim));
  out.weight_norm = w.l2_norm();
  return out;
}

DilationFamily make_orthogonal_defect_family(const CMatrix& t, std::size_t n) {
  if (!t.is_square()) throw InputError("corner must be square");
  if (operator_norm(t) > 1.0 + kDefaultResidualTol) throw InputError("corner must be a contraction");
  if (n == 0) throw InputError("family needs at least one member");
  const std::size_t h = t.rows();
  DilationFamily f;
  f.plus_dim = h;
  f.subspace_dim = h;
  f.minus_dim = n * h;
  const CMatrix b = psd_sqrt(CMatrix::identity(h) - t * t.adjoint());
  const CMatrix d = psd_sqrt(CMatrix::identity(h) - adjoint_times(t, t));
  for (std::size_t i = 0; i < n; ++i) {
    CMatrix u(f.ambient_dim(), f.ambient_dim());
    u.set_block(h, 0, b);
    u.set_block(h, h, t);
    u.set_block(2 * h + i * h, h, d);
    f.members.push_back(std::move(u));
  }
  return f;
}

CMatrix tinfty_eval(const Representation& t, const GroupElement& x) {
  const auto power = SemigroupDescriptor::infinite_power(t.descriptor());
  if (!contains(power, x)) throw MembershipError(x.to_string() + " is not in " + power.name());
  CMatrix out = CMatrix::identity(t.dimension());
  for (const auto& [copy, part] : x.as_support()) out = out * eval_rep(t, part);
  return out;
}

Representation neil_representation(const CMatrix& t2, const CMatrix& t3) {
  auto d = SemigroupDescriptor::numerical({1});
  Factorization lhs, rhs;
  lhs.terms[0] = 3;
  rhs.terms[1] = 2;
  return Representation(d, t2.rows(), {t2, t3}, {{lhs, rhs}});
}

std::vector<std::string> gallery_names() {
  return {"jordan", "truncated_shift", "neil_scalar", "neil_matrix", "unitary_rep", "normal_pair"};
}

GalleryItem make_gallery(const std::string& name, const GalleryParams& params) {
  if (name == "jordan") {
    if (params.dim == 0) throw InputError("jordan block needs dim >= 1");
    CMatrix j(params.dim, params.dim);
    for (std::size_t i = 0; i + 1 < params.dim; ++i) j(i, i + 1) = 1.0;
    return j;
  }
  if (name == "truncated_shift") {
    if (params.weights.empty()) throw InputError("truncated_shift needs at least one weight");
    for (double w : params.weights)
      if (std::abs(w) > 1.0) throw InputError("shift weight " + std::to_string(w) + " breaks contractivity");
    const std::size_t d = params.weights.size() + 1;
    CMatrix s(d, d);
    for (std::size_t i = 0; i + 1 < d; ++i) s(i + 1, i) = params.weights[i];
    return s;
  }
  if (name == "neil_scalar") {
    if (std::abs(params.lambda) > 1.0) throw InputError("lambda must lie in the closed unit disk");
    const double l = params.lambda;
    return neil_representation(CMatrix::from_rows({{l * l}}), CMatrix::from_rows({{l * l * l}}));
  }
  if (name == "neil_matrix") {
    const CMatrix& a = params.matrix;
    if (!a.is_square() || a.rows() == 0) throw InputError("neil_matrix needs a nonempty square matrix");
    if (operator_norm(a) > 1.0 + kDefaultResidualTol) throw InputError("neil_matrix needs a contraction");
    const CMatrix a2 = a * a;
    return neil_representation(a2, a2 * a);
  }
  if (name == "unitary_rep") {
    std::vector<std::vector<double>> angles = params.angles;
    if (angles.empty()) {
      std::mt19937_64 rng(params.seed);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      angles.assign(params.k, std::vector<double>(params.dim));
      for (auto& row : angles)
        for (auto& a : row) a = phase(rng);
    }
    if (angles.empty() || angles.front().empty()) throw InputError("unitary_rep needs k >= 1 and dim >= 1");
    const std::size_t dim = angles.front().size();
    std::vector<CMatrix> gens;
    for (const auto& row : angles) {
      if (row.size() != dim) throw InputError("unitary_rep angle rows must share a length");
      std::vector<Complex> diag;
      for (double a : row) diag.push_back(std::polar(1.0, a));
      gens.push_back(CMatrix::diagonal(diag));
    }
    return Representation(SemigroupDescriptor::free_abelian(gens.size()), dim, gens);
  }
  if (name == "normal_pair") {
    return Representation(SemigroupDescriptor::free_abelian(2), params.dim,
                          make_commuting_normals(params.seed, params.dim, 2));
  }
  throw InputError("unknown gallery case '" + name + "'");
}

}  // namespace normex
