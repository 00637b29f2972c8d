#pragma once

// Verdict-producing checks for the positivity conditions that characterize
// normal extensions and regular dilations.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "normex/linalg.hpp"
#include "normex/representation.hpp"
#include "normex/semigroup.hpp"

namespace normex {

enum class Verdict { Pass, Fail, NotApplicable };

std::string to_string(Verdict v);

/// Outcome of one condition. margin is the smallest eigenvalue of the tested
/// operator for positivity conditions and the negated largest residual for
/// residual conditions; a failing report always carries a witness.
struct CertificateReport {
  std::string condition;
  nlohmann::json parameters = nlohmann::json::object();
  Verdict verdict = Verdict::NotApplicable;
  std::optional<double> margin;
  std::optional<nlohmann::json> witness;
  nlohmann::json tolerances = nlohmann::json::object();
  /// Qualifies what a pass covers, e.g. the swept degree bound.
  std::string scope;
  /// Why the condition was not applicable, when it was not.
  std::string note;

  bool passed() const { return verdict == Verdict::Pass; }
};

nlohmann::json to_json(const CertificateReport& r);

inline constexpr std::size_t kDefaultSubsetCap = 16;
inline constexpr std::uint32_t kDefaultMaxDegree = 6;

/// Degrees n_1..n_m, one per operator.
using DegreeTuple = std::vector<std::uint32_t>;

/// n choose k in exact integer arithmetic. Throws InputError on overflow.
std::int64_t binomial(std::uint32_t n, std::uint32_t k);

/// sum_j (-1)^j C(n, j) T^{*j} T^j.
CMatrix agler_operator(const CMatrix& t, std::uint32_t n);

/// sum over 0 <= k <= n of (-1)^{|k|} prod C(n_i, k_i)
///   T_1^{*k_1} ... T_m^{*k_m} T_m^{k_m} ... T_1^{k_1},
/// iterated over the box in lexicographic order.
CMatrix athavale_operator(const std::vector<CMatrix>& ts, const DegreeTuple& n);

/// sum over V subset of U of (-1)^{|V|} T(e_V)^* T(e_V), enumerated in Gray
/// code order. U indexes coordinates of N^k or of (N^m)^inf.
CMatrix brehmer_operator(const Representation& t, const std::vector<IndexKey>& u,
                         std::size_t subset_cap = kDefaultSubsetCap);

/// Not applicable when ||T|| > 1 + tol.
CertificateReport agler_certificate(const CMatrix& t, std::uint32_t n, double tol = kDefaultResidualTol);

/// Not applicable unless the operators are pairwise commuting contractions.
CertificateReport athavale_certificate(const std::vector<CMatrix>& ts, const DegreeTuple& n,
                                       double tol = kDefaultResidualTol);

/// Throws BudgetError when |U| exceeds the cap.
CertificateReport brehmer_certificate(const Representation& t, const std::vector<IndexKey>& u,
                                      double tol = kDefaultResidualTol, std::size_t subset_cap = kDefaultSubsetCap);

struct AthavaleBrehmerComparison {
  CMatrix brehmer;
  CMatrix athavale;
  double deviation = 0.0;
};

/// Evaluates the Brehmer sum of T^inf over U = {(i, j) : 1 <= j <= n_i} and
/// the multi-binomial operator independently. Throws BudgetError when
/// sum n_i exceeds the cap.
AthavaleBrehmerComparison athavale_vs_brehmer(const std::vector<CMatrix>& ts, const DegreeTuple& n,
                                              std::size_t subset_cap = kDefaultSubsetCap);

struct SzNagyConfig {
  std::vector<InvolutionPoint> sample_points;
  InvolutionPoint bound_element;
  /// C_a; must be positive.
  double bound_constant = 1.0;
};

/// Sampled check of the three kernel conditions for T~(p, q) = T(p)^* T(q):
/// (i) unitality and symmetry, (ii) positivity of [T~(s_i^* s_j)],
/// (iii) [T~(s_i^* a^* a s_j)] <= C^2 [T~(s_i^* s_j)].
CertificateReport sznagy_check(const Representation& t, const SzNagyConfig& cfg, double tol = kDefaultResidualTol);

/// [T(g)^* T~(p_i - p_j) T(g)] <= [T~(p_i - p_j)] for g meet p_i = unit.
/// Not applicable (with the offending index) when some p_i meets g
/// nontrivially. Throws UnsupportedError on a non-lattice descriptor.
CertificateReport regularity_check(const Representation& t, const std::vector<GroupElement>& ps,
                                   const GroupElement& g, double tol = kDefaultResidualTol);

struct ExtensionResidual {
  /// ||P_H N^*N|_H - T^*T|| with T the compression of N to H.
  double hypothesis = 0.0;
  /// ||Z||^2 with Z the lower-left block of N.
  double invariance = 0.0;
};

/// Both values agree for every N, so the hypothesis vanishes exactly when H
/// is invariant.
ExtensionResidual extension_residual(const CMatrix& n, std::size_t subspace_dim);

/// Sweeps athavale_certificate over every degree tuple with sum <= max_degree
/// in lexicographic order on the generator images, stopping at the first
/// failure.
CertificateReport generator_certificate(const Representation& t, std::uint32_t max_degree = kDefaultMaxDegree,
                                        double tol = kDefaultResidualTol);

/// All tuples with sum <= max_degree, lexicographic.
std::vector<DegreeTuple> degree_tuples(std::size_t m, std::uint32_t max_degree);

}  // namespace normex
