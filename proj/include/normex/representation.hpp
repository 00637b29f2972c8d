#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "normex/linalg.hpp"
#include "normex/semigroup.hpp"

namespace normex {

inline constexpr double kDefaultResidualTol = 1e-9;

/// One named check inside a validation verdict. Non-gating checks are
/// reported but do not affect valid().
struct Check {
  std::string name;
  bool ok = true;
  double residual = 0.0;
  std::string detail;
  bool gating = true;
};

struct ValidationVerdict {
  std::vector<Check> checks;
  std::vector<std::string> warnings;

  bool valid() const;
  const Check* first_failure() const;
  const Check* find(const std::string& name) const;
};

using Relation = std::pair<Factorization, Factorization>;

/// Contractive representation given by generator images and the relations
/// the images must satisfy. For an InfinitePower(P) descriptor the images are
/// those of P's generators and every copy maps to the same operators, so
/// T(p (x) delta_n) = T(p).
class Representation {
 public:
  /// Throws InputError when the image count does not match the generators or
  /// an image is not dimension x dimension.
  Representation(SemigroupDescriptor descriptor, std::size_t dimension, std::vector<CMatrix> generator_images,
                 std::vector<Relation> relations = {});

  const SemigroupDescriptor& descriptor() const { return descriptor_; }
  std::size_t dimension() const { return dimension_; }
  const std::vector<CMatrix>& generator_images() const { return images_; }
  const std::vector<Relation>& relations() const { return relations_; }

  /// Descriptor whose generators the images belong to (the base for powers).
  const SemigroupDescriptor& generating_descriptor() const;

  /// Same images and relations over the base descriptor of a power.
  Representation base_view() const;

  /// Ordered product of generator images along a factorization:
  /// T_{i1}^{m1} T_{i2}^{m2} ... with ascending generator index.
  CMatrix product(const Factorization& f) const;

 private:
  friend CMatrix eval_rep(const Representation&, const GroupElement&);
  struct Cache;

  SemigroupDescriptor descriptor_;
  std::size_t dimension_;
  std::vector<CMatrix> images_;
  std::vector<Relation> relations_;
  std::shared_ptr<Cache> cache_;
};

/// T(p): product of generator images along factorize(p); identity at the
/// unit. For power descriptors, the product over the support of T(component)
/// in ascending copy order. Results are cached; concurrent calls are safe.
/// Throws MembershipError when p is not in P.
CMatrix eval_rep(const Representation& t, const GroupElement& p);

struct RepValidationOptions {
  double tol = kDefaultResidualTol;
  std::size_t homomorphism_samples = 200;
  std::uint64_t seed = 0;
};

/// Contractivity, pairwise commutation, relations, and a sampled
/// homomorphism check, each with its numeric residual.
ValidationVerdict validate_rep(const Representation& t, const RepValidationOptions& opts = {});

/// Images of an extension candidate on K for an enumerated element set; H is
/// the span of the first base dimension coordinates of K.
struct NormalMap {
  Representation base;
  std::size_t ambient_dim = 0;
  std::vector<std::pair<GroupElement, CMatrix>> images;
};

/// Per-element normality, pairwise commutation and *-commutation, contraction
/// and extension residuals (lower-left block, corner mismatch). Unitality is
/// reported as a non-gating check. Throws InputError on dimension mismatch.
ValidationVerdict validate_normal_map(const NormalMap& n, double tol = kDefaultResidualTol);

/// (p, q) in Q = P x P with involution (p, q)^* = (q, p).
struct InvolutionPoint {
  GroupElement left;
  GroupElement right;

  InvolutionPoint star() const { return {right, left}; }
  friend bool operator==(const InvolutionPoint&, const InvolutionPoint&) = default;
};

InvolutionPoint add(const SemigroupDescriptor& d, const InvolutionPoint& a, const InvolutionPoint& b);

/// T~(x) = T(left)^* T(right) on Q.
CMatrix involution_eval(const Representation& t, const InvolutionPoint& x);

/// Involution kernel K(s, t) = T~(s^* + t).
CMatrix star_kernel(const Representation& t, const InvolutionPoint& s, const InvolutionPoint& u);

/// T~(g) = T(g-)^* T(g+) on the ambient group. Throws UnsupportedError on a
/// non-lattice descriptor.
CMatrix tilde_eval(const Representation& t, const GroupElement& g);

}  // namespace normex
