#include "normex/certificates.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "normex/errors.hpp"

namespace normex {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::NotApplicable:
      return "not-applicable";
  }
  return "?";
}

nlohmann::json to_json(const CertificateReport& r) {
  nlohmann::json j;
  j["condition"] = r.condition;
  j["parameters"] = r.parameters;
  j["verdict"] = to_string(r.verdict);
  j["margin"] = r.margin ? nlohmann::json(*r.margin) : nlohmann::json(nullptr);
  if (r.witness) j["witness"] = *r.witness;
  j["tolerances"] = r.tolerances;
  if (!r.scope.empty()) j["scope"] = r.scope;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::int64_t binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t c = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    // c * (n - k + i) is divisible by i at every step.
    __int128 next = static_cast<__int128>(c) * (n - k + i) / i;
    if (next > std::numeric_limits<std::int64_t>::max()) throw InputError("binomial coefficient overflow");
    c = static_cast<std::int64_t>(next);
  }
  return c;
}

namespace {

void require_square_family(const std::vector<CMatrix>& ts) {
  if (ts.empty()) throw InputError("empty operator list");
  for (const auto& t : ts)
    if (!t.is_square() || t.rows() != ts.front().rows())
      throw InputError("operators must be square and of one common dimension");
}

// Returns an empty string when the family is a commuting family of
// contractions, otherwise the reason it is not.
std::string commuting_contraction_defect(const std::vector<CMatrix>& ts, double tol, double& worst_norm,
                                         double& worst_commutator) {
  worst_norm = 0.0;
  worst_commutator = 0.0;
  std::string reason;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double norm = operator_norm(ts[i]);
    worst_norm = std::max(worst_norm, norm);
    if (norm > 1.0 + tol && reason.empty())
      reason = "operator " + std::to_string(i + 1) + " has norm " + std::to_string(norm) + " > 1";
  }
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      const double c = commutator_norm(ts[i], ts[j]);
      worst_commutator = std::max(worst_commutator, c);
      if (c > tol && reason.empty())
        reason = "operators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " do not commute";
    }
  }
  return reason;
}

nlohmann::json tolerance_echo(double tol, const PsdVerdict* v = nullptr) {
  nlohmann::json j;
  j["tol"] = tol;
  if (v) j["psd_tol"] = v->tolerance_used;
  return j;
}

void apply_psd(CertificateReport& r, const PsdVerdict& v, nlohmann::json witness) {
  r.margin = v.min_eigenvalue;
  r.verdict = v.is_psd ? Verdict::Pass : Verdict::Fail;
  if (!v.is_psd) r.witness = std::move(witness);
}

nlohmann::json key_json(const SemigroupDescriptor& d, const IndexKey& k) {
  if (d.kind() == SemigroupKind::InfinitePower) return nlohmann::json::array({k.coord, k.copy});
  return nlohmann::json(k.coord);
}

}  // namespace

CMatrix agler_operator(const CMatrix& t, std::uint32_t n) {
  if (!t.is_square()) throw InputError("Agler operator needs a square matrix");
  CMatrix sum(t.rows(), t.cols());
  CMatrix power = CMatrix::identity(t.rows());
  for (std::uint32_t j = 0; j <= n; ++j) {
    if (j > 0) power = power * t;
    const double coeff = static_cast<double>((j % 2 ? -1 : 1) * binomial(n, j));
    sum += adjoint_times(power, power) * Complex(coeff);
  }
  return sum;
}

CMatrix athavale_operator(const std::vector<CMatrix>& ts, const DegreeTuple& n) {
  require_square_family(ts);
  if (n.size() != ts.size())
    throw InputError("degree tuple has " + std::to_string(n.size()) + " entries for " + std::to_string(ts.size()) +
                     " operators");
  const std::size_t m = ts.size();
  const std::size_t dim = ts.front().rows();
  std::vector<std::vector<CMatrix>> powers(m);
  for (std::size_t i = 0; i < m; ++i) {
    powers[i].push_back(CMatrix::identity(dim));
    for (std::uint32_t k = 1; k <= n[i]; ++k) powers[i].push_back(powers[i].back() * ts[i]);
  }

  CMatrix sum(dim, dim);
  DegreeTuple k(m, 0);
  for (;;) {
    // X = T_m^{k_m} ... T_1^{k_1}; the term is X^* X.
    CMatrix x = powers[m - 1][k[m - 1]];
    for (std::size_t i = m - 1; i-- > 0;) x = x * powers[i][k[i]];
    std::int64_t coeff = 1;
    std::uint32_t total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::int64_t b = binomial(n[i], k[i]);
      std::int64_t next;
      if (__builtin_mul_overflow(coeff, b, &next)) throw InputError("multi-binomial coefficient overflow");
      coeff = next;
      total += k[i];
    }
    if (total % 2) coeff = -coeff;
    sum += adjoint_times(x, x) * Complex(static_cast<double>(coeff));

    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (k[pos] < n[pos]) {
        ++k[pos];
        break;
      }
      k[pos] = 0;
      if (pos == 0) return sum;
    }
    if (m == 0) return sum;
  }
}

CMatrix brehmer_operator(const Representation& t, const std::vector<IndexKey>& u, std::size_t subset_cap) {
  const auto& d = t.descriptor();
  if (u.size() > subset_cap || u.size() >= 63) {
    const unsigned long long required = u.size() >= 63 ? ~0ULL : (1ULL << u.size());
    throw BudgetError("Brehmer sum over |U| = " + std::to_string(u.size()) + " needs " + std::to_string(required) +
                          " subsets; the cap is |U| <= " + std::to_string(subset_cap),
                      required);
  }
  (void)indicator(u, d);  // validates range and distinctness

  const std::size_t n = u.size();
  const std::size_t dim = t.dimension();
  std::vector<CMatrix> atoms;
  atoms.reserve(n);
  for (const auto& key : u) atoms.push_back(eval_rep(t, indicator({key}, d)));

  // partial[j] = product of the atoms in V with index >= j, in ascending order.
  // A Gray-code step flips bit i and leaves bits below i as (0..0 1 0..0) or
  // all zero, so only partial[i..0] need recomputation.
  const CMatrix identity = CMatrix::identity(dim);
  std::vector<CMatrix> partial(n + 1, identity);
  std::vector<bool> in_v(n, false);
  CMatrix sum = identity;  // V = empty set
  bool odd = false;
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t c = 1; c < count; ++c) {
    const auto flip = static_cast<std::size_t>(std::countr_zero(c));
    in_v[flip] = !in_v[flip];
    odd = !odd;
    for (std::size_t j = flip + 1; j-- > 0;) partial[j] = in_v[j] ? atoms[j] * partial[j + 1] : partial[j + 1];
    const CMatrix& x = partial[0];
    if (odd)
      sum -= adjoint_times(x, x);
    else
      sum += adjoint_times(x, x);
  }
  return sum;
}

CertificateReport agler_certificate(const CMatrix& t, std::uint32_t n, double tol) {
  CertificateReport r;
  r.condition = "agler";
  r.parameters = {{"n", n}};
  if (!t.is_square()) throw InputError("agler_certificate needs a square matrix");
  const double norm = operator_norm(t);
  if (norm > 1.0 + tol) {
    r.verdict = Verdict::NotApplicable;
    r.note = "operator norm " + std::to_string(norm) + " exceeds 1; the condition is stated for contractions";
    r.tolerances = tolerance_echo(tol);
    return r;
  }
  const auto v = psd_check(agler_operator(t, n), tol);
  apply_psd(r, v, {{"n", n}});
  r.tolerances = tolerance_echo(tol, &v);
  return r;
}

CertificateReport athavale_certificate(const std::vector<CMatrix>& ts, const DegreeTuple& n, double tol) {
  CertificateReport r;
  r.condition = "athavale";
  r.parameters = {{"degrees", n}};
  require_square_family(ts);
  double worst_norm = 0.0, worst_commutator = 0.0;
  const auto reason = commuting_contraction_defect(ts, tol, worst_norm, worst_commutator);
  r.parameters["commutator_residual"] = worst_commutator;
  if (!reason.empty()) {
    r.verdict = Verdict::NotApplicable;
    r.note = reason;
    r.tolerances = tolerance_echo(tol);
    return r;
  }
  const auto v = psd_check(athavale_operator(ts, n), tol);
  apply_psd(r, v, {{"degrees", n}});
  r.tolerances = tolerance_echo(tol, &v);
  return r;
}

CertificateReport brehmer_certificate(const Representation& t, const std::vector<IndexKey>& u, double tol,
                                      std::size_t subset_cap) {
  const auto& d = t.descriptor();
  const bool supported = d.kind() == SemigroupKind::FreeAbelian ||
                         (d.kind() == SemigroupKind::InfinitePower && d.base().kind() == SemigroupKind::FreeAbelian);
  CertificateReport r;
  r.condition = "brehmer";
  nlohmann::json subset = nlohmann::json::array();
  if (supported)
    for (const auto& k : u) subset.push_back(key_json(d, k));
  r.parameters = {{"subset", subset}};
  r.tolerances = tolerance_echo(tol);
  if (!supported) {
    r.verdict = Verdict::NotApplicable;
    r.note = "the Brehmer condition is stated on N^k and its powers, not on " + d.name();
    return r;
  }
  double worst_norm = 0.0, worst_commutator = 0.0;
  const auto reason = commuting_contraction_defect(t.generator_images(), tol, worst_norm, worst_commutator);
  if (!reason.empty()) {
    r.verdict = Verdict::NotApplicable;
    r.note = reason;
    return r;
  }
  const auto v = psd_check(brehmer_operator(t, u, subset_cap), tol);
  apply_psd(r, v, {{"subset", subset}});
  r.tolerances = tolerance_echo(tol, &v);
  r.parameters["subsets_enumerated"] = 1ULL << u.size();
  return r;
}

AthavaleBrehmerComparison athavale_vs_brehmer(const std::vector<CMatrix>& ts, const DegreeTuple& n,
                                              std::size_t subset_cap) {
  require_square_family(ts);
  if (n.size() != ts.size()) throw InputError("degree tuple length does not match the operator count");
  std::size_t total = 0;
  for (auto ni : n) total += ni;
  if (total > subset_cap)
    throw BudgetError("sum of degrees " + std::to_string(total) + " exceeds the subset cap " +
                          std::to_string(subset_cap),
                      total >= 63 ? ~0ULL : (1ULL << total));

  const auto power = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(ts.size()));
  const Representation t_inf(power, ts.front().rows(), ts);
  std::vector<IndexKey> u;
  for (std::size_t i = 0; i < n.size(); ++i)
    for (std::uint32_t j = 1; j <= n[i]; ++j) u.push_back({i + 1, static_cast<std::int64_t>(j)});

  AthavaleBrehmerComparison out;
  out.brehmer = brehmer_operator(t_inf, u, subset_cap);
  out.athavale = athavale_operator(ts, n);
  out.deviation = max_abs_diff(out.brehmer, out.athavale);
  return out;
}

CertificateReport sznagy_check(const Representation& t, const SzNagyConfig& cfg, double tol) {
  if (!(cfg.bound_constant > 0.0)) throw InputError("bound constant must be positive");
  const auto& d = t.descriptor();
  const auto& pts = cfg.sample_points;
  const std::size_t n = pts.size();

  CertificateReport r;
  r.condition = "sznagy";
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : pts) points.push_back({p.left.to_string(), p.right.to_string()});
  r.parameters = {{"sample_points", points},
                  {"bound_element", {cfg.bound_element.left.to_string(), cfg.bound_element.right.to_string()}},
                  {"bound_constant", cfg.bound_constant}};
  r.scope = "sampled at " + std::to_string(n) + " points; not conclusive for all finite tuples";
  r.tolerances = tolerance_echo(tol);

  // (i) T~(e) = I and T~(x^*) = T~(x)^*.
  const InvolutionPoint unit{d.unit(), d.unit()};
  double sym = operator_norm(involution_eval(t, unit) - CMatrix::identity(t.dimension()));
  std::vector<std::vector<CMatrix>> gram(n, std::vector<CMatrix>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram[i][j] = star_kernel(t, pts[i], pts[j]);
  for (std::size_t i = 0; i < n; ++i) {
    sym = std::max(sym, operator_norm(involution_eval(t, pts[i].star()) - involution_eval(t, pts[i]).adjoint()));
    for (std::size_t j = 0; j < n; ++j) sym = std::max(sym, operator_norm(gram[i][j].adjoint() - gram[j][i]));
  }
  r.parameters["i_residual"] = sym;
  const bool ok_i = sym <= tol;

  // (ii) [T~(s_i^* s_j)] >= 0 and (iii) the a-bounded version.
  const CMatrix kernel = block_assemble(gram);
  double margin_ii = 0.0, margin_iii = 0.0;
  bool ok_ii = true, ok_iii = true;
  if (n > 0) {
    try {
      const auto v = psd_check(kernel, tol);
      margin_ii = v.min_eigenvalue;
      ok_ii = v.is_psd;
      r.tolerances["psd_tol"] = v.tolerance_used;
    } catch (const NotHermitianError& e) {
      margin_ii = -e.defect();
      ok_ii = false;
    }
    std::vector<std::vector<CMatrix>> shifted(n, std::vector<CMatrix>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        shifted[i][j] = star_kernel(t, add(d, cfg.bound_element, pts[i]), add(d, cfg.bound_element, pts[j]));
    try {
      const double c2 = cfg.bound_constant * cfg.bound_constant;
      const auto v = loewner_leq(block_assemble(shifted), kernel * Complex(c2), tol);
      margin_iii = v.min_eigenvalue;
      ok_iii = v.is_psd;
    } catch (const NotHermitianError& e) {
      margin_iii = -e.defect();
      ok_iii = false;
    }
  }
  r.parameters["ii_margin"] = margin_ii;
  r.parameters["iii_margin"] = margin_iii;
  r.margin = std::min(margin_ii, margin_iii);
  r.verdict = ok_i && ok_ii && ok_iii ? Verdict::Pass : Verdict::Fail;
  if (!ok_i)
    r.witness = nlohmann::json::object({{"condition", "(i)"}, {"residual", sym}});
  else if (!ok_ii)
    r.witness = nlohmann::json::object({{"condition", "(ii)"}, {"margin", margin_ii}});
  else if (!ok_iii)
    r.witness = nlohmann::json::object({{"condition", "(iii)"}, {"margin", margin_iii}});
  return r;
}

CertificateReport regularity_check(const Representation& t, const std::vector<GroupElement>& ps,
                                   const GroupElement& g, double tol) {
  const auto& d = t.descriptor();
  if (!d.lattice_ordered()) throw UnsupportedError("regularity needs a lattice ordered semigroup, got " + d.name());
  if (!contains(d, g)) throw MembershipError("g = " + g.to_string() + " is not in " + d.name());
  CertificateReport r;
  r.condition = "regular";
  nlohmann::json plist = nlohmann::json::array();
  for (const auto& p : ps) {
    if (!contains(d, p)) throw MembershipError("p = " + p.to_string() + " is not in " + d.name());
    plist.push_back(p.to_string());
  }
  r.parameters = {{"ps", plist}, {"g", g.to_string()}};
  r.scope = "sampled at one (p_1..p_n, g) family; not conclusive for all families";
  r.tolerances = tolerance_echo(tol);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!meet_join(d, g, ps[i]).meet.is_unit()) {
      r.verdict = Verdict::NotApplicable;
      r.note = "g meet p_" + std::to_string(i + 1) + " is not the unit";
      r.parameters["offending_index"] = i + 1;
      return r;
    }
  }
  const std::size_t n = ps.size();
  const CMatrix tg = eval_rep(t, g);
  std::vector<std::vector<CMatrix>> rhs(n, std::vector<CMatrix>(n)), lhs(n, std::vector<CMatrix>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rhs[i][j] = tilde_eval(t, subtract(d, ps[i], ps[j]));
      lhs[i][j] = adjoint_times(tg, rhs[i][j] * tg);
    }
  }
  if (n == 0) {
    r.verdict = Verdict::Pass;
    r.margin = 0.0;
    return r;
  }
  const auto v = loewner_leq(block_assemble(lhs), block_assemble(rhs), tol);
  apply_psd(r, v, {{"ps", plist}, {"g", g.to_string()}});
  r.tolerances = tolerance_echo(tol, &v);
  return r;
}

ExtensionResidual extension_residual(const CMatrix& n, std::size_t subspace_dim) {
  const auto blocks = block_decompose(n, subspace_dim);
  const CMatrix compressed = adjoint_times(n, n).block(0, 0, subspace_dim, subspace_dim);
  ExtensionResidual out;
  out.hypothesis = operator_norm(compressed - adjoint_times(blocks.corner, blocks.corner));
  const double z = operator_norm(blocks.lower_left);
  out.invariance = z * z;
  return out;
}

std::vector<DegreeTuple> degree_tuples(std::size_t m, std::uint32_t max_degree) {
  std::vector<DegreeTuple> out;
  DegreeTuple current(m, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::uint32_t budget) -> void {
    if (pos == m) {
      out.push_back(current);
      return;
    }
    for (std::uint32_t k = 0; k <= budget; ++k) {
      current[pos] = k;
      self(self, pos + 1, budget - k);
    }
    current[pos] = 0;
  };
  rec(rec, 0, max_degree);
  return out;
}

CertificateReport generator_certificate(const Representation& t, std::uint32_t max_degree, double tol) {
  const auto& gd = t.generating_descriptor();
  CertificateReport r;
  r.condition = "generator_athavale";
  nlohmann::json labels = nlohmann::json::array();
  for (std::size_t i = 0; i < gd.generators().size(); ++i) labels.push_back(gd.generator_label(i));
  r.parameters = {{"max_degree", max_degree}, {"generators", labels}};
  r.scope = "all degree tuples with sum(n) <= " + std::to_string(max_degree);
  r.tolerances = tolerance_echo(tol);
  const auto& images = t.generator_images();
  if (images.empty()) {
    r.verdict = Verdict::Pass;
    r.margin = 0.0;
    r.scope = "vacuous: no generators";
    r.parameters["tuples_checked"] = 0;
    return r;
  }
  double worst_norm = 0.0, worst_commutator = 0.0;
  const auto reason = commuting_contraction_defect(images, tol, worst_norm, worst_commutator);
  if (!reason.empty()) {
    r.verdict = Verdict::NotApplicable;
    r.note = reason;
    return r;
  }
  double margin = std::numeric_limits<double>::infinity();
  std::size_t checked = 0;
  for (const auto& n : degree_tuples(images.size(), max_degree)) {
    const auto single = athavale_certificate(images, n, tol);
    ++checked;
    if (single.verdict == Verdict::Fail) {
      r.verdict = Verdict::Fail;
      r.margin = single.margin;
      r.witness = nlohmann::json::object({{"degrees", n}});
      r.parameters["tuples_checked"] = checked;
      r.tolerances = single.tolerances;
      return r;
    }
    margin = std::min(margin, *single.margin);
  }
  r.verdict = Verdict::Pass;
  r.margin = margin;
  r.parameters["tuples_checked"] = checked;
  return r;
}

}  // namespace normex
