#include "normex/representation.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <unordered_map>

#include "normex/errors.hpp"

namespace normex {

bool ValidationVerdict::valid() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok || !c.gating; });
}

const Check* ValidationVerdict::first_failure() const {
  for (const auto& c : checks)
    if (!c.ok && c.gating) return &c;
  return nullptr;
}

const Check* ValidationVerdict::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

struct Representation::Cache {
  std::mutex mutex;
  std::unordered_map<std::string, CMatrix> values;
};

Representation::Representation(SemigroupDescriptor descriptor, std::size_t dimension,
                               std::vector<CMatrix> generator_images, std::vector<Relation> relations)
    : descriptor_(std::move(descriptor)),
      dimension_(dimension),
      images_(std::move(generator_images)),
      relations_(std::move(relations)),
      cache_(std::make_shared<Cache>()) {
  const auto& gens = generating_descriptor().generators();
  if (!generating_descriptor().finitely_generated())
    throw UnsupportedError("representations are specified by generator images; " +
                           generating_descriptor().name() + " is not finitely generated");
  if (images_.size() != gens.size())
    throw InputError("expected " + std::to_string(gens.size()) + " generator images for " +
                     generating_descriptor().name() + ", got " + std::to_string(images_.size()));
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i].rows() != dimension_ || images_[i].cols() != dimension_)
      throw InputError("generator image " + generating_descriptor().generator_label(i) + " is " +
                       std::to_string(images_[i].rows()) + "x" + std::to_string(images_[i].cols()) + ", expected " +
                       std::to_string(dimension_) + "x" + std::to_string(dimension_));
    images_[i].require_finite("generator image");
  }
  for (const auto& [lhs, rhs] : relations_)
    for (const auto* side : {&lhs, &rhs})
      for (const auto& [idx, mult] : side->terms)
        if (idx >= gens.size())
          throw InputError("relation refers to generator index " + std::to_string(idx) + " out of range");
}

const SemigroupDescriptor& Representation::generating_descriptor() const {
  return descriptor_.kind() == SemigroupKind::InfinitePower ? descriptor_.base() : descriptor_;
}

Representation Representation::base_view() const {
  return Representation(generating_descriptor(), dimension_, images_, relations_);
}

CMatrix Representation::product(const Factorization& f) const {
  CMatrix out = CMatrix::identity(dimension_);
  for (const auto& [idx, mult] : f.terms) {
    if (idx >= images_.size()) throw InputError("generator index out of range in product");
    for (std::uint64_t k = 0; k < mult; ++k) out = out * images_[idx];
  }
  return out;
}

CMatrix eval_rep(const Representation& t, const GroupElement& p) {
  const auto& d = t.descriptor();
  if (!contains(d, p)) throw MembershipError(p.to_string() + " is not in " + d.name());
  if (p.is_unit()) return CMatrix::identity(t.dimension());

  const std::string key = p.to_string();
  {
    std::lock_guard lock(t.cache_->mutex);
    auto it = t.cache_->values.find(key);
    if (it != t.cache_->values.end()) return it->second;
  }
  CMatrix value;
  if (d.kind() == SemigroupKind::InfinitePower) {
    value = CMatrix::identity(t.dimension());
    for (const auto& [copy, part] : p.as_support()) value = value * t.product(factorize(d.base(), part));
  } else {
    value = t.product(factorize(d, p));
  }
  std::lock_guard lock(t.cache_->mutex);
  return t.cache_->values.try_emplace(key, std::move(value)).first->second;
}

ValidationVerdict validate_rep(const Representation& t, const RepValidationOptions& opts) {
  ValidationVerdict v;
  const auto& gd = t.generating_descriptor();
  const auto& images = t.generator_images();

  Check contractive{"contractive", true, 0.0, {}};
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double norm = operator_norm(images[i]);
    const double excess = std::max(0.0, norm - 1.0);
    if (excess > contractive.residual) contractive.residual = excess;
    if (norm > 1.0 + opts.tol && contractive.ok) {
      contractive.ok = false;
      contractive.detail = "generator " + gd.generator_label(i) + " has norm " + std::to_string(norm);
    }
  }
  v.checks.push_back(contractive);

  Check commuting{"commuting", true, 0.0, {}};
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      const double r = commutator_norm(images[i], images[j]);
      commuting.residual = std::max(commuting.residual, r);
      if (r > opts.tol && commuting.ok) {
        commuting.ok = false;
        commuting.detail = "generators " + gd.generator_label(i) + ", " + gd.generator_label(j) + " do not commute";
      }
    }
  }
  v.checks.push_back(commuting);

  Check relations{"relations", true, 0.0, {}};
  for (std::size_t r = 0; r < t.relations().size(); ++r) {
    const auto& [lhs, rhs] = t.relations()[r];
    const double res = operator_norm(t.product(lhs) - t.product(rhs));
    relations.residual = std::max(relations.residual, res);
    if (res > opts.tol && relations.ok) {
      relations.ok = false;
      relations.detail = "relation " + std::to_string(r) + " " + lhs.to_string(gd) + " = " + rhs.to_string(gd) +
                         " violated";
    }
  }
  v.checks.push_back(relations);
  if (t.relations().empty() && gd.kind() == SemigroupKind::Numerical && gd.generators().size() > 1)
    v.warnings.push_back("no relations given for " + gd.name() + "; the homomorphism property is only sampled");

  Check hom{"homomorphism_sampled", true, 0.0, {}};
  std::mt19937_64 rng(opts.seed);
  const auto& d = t.descriptor();
  for (std::size_t s = 0; s < opts.homomorphism_samples; ++s) {
    const auto p = sample_positive(d, rng);
    const auto q = sample_positive(d, rng);
    const double res = operator_norm(eval_rep(t, add(d, p, q)) - eval_rep(t, p) * eval_rep(t, q));
    hom.residual = std::max(hom.residual, res);
    if (res > opts.tol && hom.ok) {
      hom.ok = false;
      hom.detail = "T(p+q) != T(p)T(q) at p=" + p.to_string() + ", q=" + q.to_string();
    }
  }
  v.checks.push_back(hom);
  return v;
}

ValidationVerdict validate_normal_map(const NormalMap& n, double tol) {
  const std::size_t h = n.base.dimension();
  if (n.ambient_dim < h)
    throw InputError("ambient dimension " + std::to_string(n.ambient_dim) + " is smaller than the base dimension " +
                     std::to_string(h));
  for (const auto& [p, img] : n.images)
    if (img.rows() != n.ambient_dim || img.cols() != n.ambient_dim)
      throw InputError("image at " + p.to_string() + " is not " + std::to_string(n.ambient_dim) + "x" +
                       std::to_string(n.ambient_dim));

  auto worst = [&](const char* name) { return Check{name, true, 0.0, {}}; };
  auto note = [&](Check& c, double r, const std::string& where) {
    c.residual = std::max(c.residual, r);
    if (r > tol && c.ok) {
      c.ok = false;
      c.detail = where;
    }
  };
  Check normal = worst("normality"), commute = worst("commutation"), star = worst("star_commutation"),
        contractive = worst("contractive"), lower = worst("extension_lower_left"), corner = worst("extension_corner");
  for (std::size_t i = 0; i < n.images.size(); ++i) {
    const auto& [p, img] = n.images[i];
    const std::string at = "at " + p.to_string();
    note(normal, normality_residual(img), at);
    note(contractive, std::max(0.0, operator_norm(img) - 1.0), at);
    const auto blocks = block_decompose(img, h);
    note(lower, operator_norm(blocks.lower_left), at);
    note(corner, operator_norm(blocks.corner - eval_rep(n.base, p)), at);
    for (std::size_t j = i + 1; j < n.images.size(); ++j) {
      const auto& other = n.images[j].second;
      const std::string pair = "at " + p.to_string() + ", " + n.images[j].first.to_string();
      note(commute, operator_norm(img * other - other * img), pair);
      note(star, operator_norm(img * other.adjoint() - other.adjoint() * img), pair);
    }
  }
  ValidationVerdict v;
  v.checks = {normal, commute, star, contractive, lower, corner};
  const auto unit = n.base.descriptor().unit();
  for (const auto& [p, img] : n.images) {
    if (p == unit) {
      const double r = operator_norm(img - CMatrix::identity(n.ambient_dim));
      v.checks.push_back(Check{"unital", r <= tol, r, r <= tol ? "" : "N(unit) != I", false});
    }
  }
  return v;
}

InvolutionPoint add(const SemigroupDescriptor& d, const InvolutionPoint& a, const InvolutionPoint& b) {
  return {add(d, a.left, b.left), add(d, a.right, b.right)};
}

CMatrix involution_eval(const Representation& t, const InvolutionPoint& x) {
  return adjoint_times(eval_rep(t, x.left), eval_rep(t, x.right));
}

CMatrix star_kernel(const Representation& t, const InvolutionPoint& s, const InvolutionPoint& u) {
  return involution_eval(t, add(t.descriptor(), s.star(), u));
}

CMatrix tilde_eval(const Representation& t, const GroupElement& g) {
  const auto& d = t.descriptor();
  if (!d.lattice_ordered()) throw UnsupportedError("T~ needs a lattice ordered semigroup, got " + d.name());
  const auto parts = pos_neg_parts(d, g);
  return adjoint_times(eval_rep(t, parts.negative), eval_rep(t, parts.positive));
}

}  // namespace normex
