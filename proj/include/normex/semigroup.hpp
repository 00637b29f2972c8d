#pragma once

// Exact arithmetic for abelian semigroups P sitting inside their ambient
// groups G = P - P. Group operations are written additively; the unit is 0.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace normex {

/// Exact rational with 64-bit numerator and denominator, always reduced with
/// a positive denominator. Arithmetic throws InputError on overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  Rational operator-() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  /// Parses "p/q" or "p".
  static Rational parse(const std::string& text);
  std::string to_string() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Element of an ambient group, in the coordinates of its descriptor:
///   FreeAbelian(k)      -> k integers
///   Numerical           -> 1 integer
///   Rationals           -> Rational
///   Product             -> one element per factor
///   InfinitePower(base) -> finitely supported copy-index -> base element map
///                          (p (x) delta_n), sorted, unit entries never stored
class GroupElement {
 public:
  using Ints = std::vector<std::int64_t>;
  using Parts = std::vector<GroupElement>;
  using Support = std::vector<std::pair<std::int64_t, GroupElement>>;

  GroupElement() = default;

  static GroupElement ints(Ints coords);
  static GroupElement integer(std::int64_t n) { return ints({n}); }
  static GroupElement rational(Rational q);
  static GroupElement parts(Parts parts);
  /// Canonicalizes: sorts by index, drops unit entries, rejects duplicates.
  static GroupElement support(Support entries);

  bool is_ints() const { return std::holds_alternative<Ints>(value_); }
  bool is_rational() const { return std::holds_alternative<Rational>(value_); }
  bool is_parts() const { return std::holds_alternative<Parts>(value_); }
  bool is_support() const { return std::holds_alternative<Support>(value_); }

  const Ints& as_ints() const;
  const Rational& as_rational() const;
  const Parts& as_parts() const;
  const Support& as_support() const;

  /// True for the zero of any coordinate system.
  bool is_unit() const;

  friend bool operator==(const GroupElement&, const GroupElement&);

  std::string to_string() const;

 private:
  std::variant<Ints, Rational, Parts, Support> value_;
};

enum class SemigroupKind { FreeAbelian, Numerical, Rationals, Product, InfinitePower };

/// Immutable description of an abelian semigroup P inside G.
class SemigroupDescriptor {
 public:
  /// N^k inside Z^k.
  static SemigroupDescriptor free_abelian(std::size_t rank);
  /// N minus a finite gap set, inside Z. Throws InputError if 0 or a negative
  /// integer is listed as a gap.
  static SemigroupDescriptor numerical(std::set<std::int64_t> gaps);
  /// Q+ inside Q (stands in for R+ with exact arithmetic).
  static SemigroupDescriptor rationals();
  static SemigroupDescriptor product(std::vector<SemigroupDescriptor> factors);
  /// Finitely supported countable power P^infinity.
  static SemigroupDescriptor infinite_power(SemigroupDescriptor base);

  SemigroupKind kind() const { return kind_; }
  std::size_t rank() const { return rank_; }
  const std::set<std::int64_t>& gaps() const { return gaps_; }
  const std::vector<SemigroupDescriptor>& factors() const { return factors_; }
  const SemigroupDescriptor& base() const;

  /// Generators in a fixed order. Empty for kinds that are not finitely
  /// generated (Rationals, InfinitePower).
  const std::vector<GroupElement>& generators() const { return generators_; }
  /// Human-readable generator label ("2" for Numerical, "e1" for FreeAbelian,
  /// "f0.e1" for factors of a Product).
  std::string generator_label(std::size_t index) const;
  std::optional<std::size_t> generator_index(const std::string& label) const;

  bool finitely_generated() const { return finitely_generated_; }
  /// Derived from the kind, never set by callers.
  bool lattice_ordered() const { return lattice_ordered_; }

  GroupElement unit() const;
  std::string name() const;

 private:
  SemigroupDescriptor() = default;
  void derive();

  SemigroupKind kind_ = SemigroupKind::FreeAbelian;
  std::size_t rank_ = 0;
  std::set<std::int64_t> gaps_;
  std::vector<SemigroupDescriptor> factors_;
  std::shared_ptr<const SemigroupDescriptor> base_;
  std::vector<GroupElement> generators_;
  std::vector<std::string> labels_;
  bool finitely_generated_ = false;
  bool lattice_ordered_ = false;
};

/// Multiset of generator indices. Sum of multiplicity x generator equals the
/// factored element.
struct Factorization {
  std::map<std::size_t, std::uint64_t> terms;

  friend bool operator==(const Factorization&, const Factorization&) = default;
  std::string to_string(const SemigroupDescriptor& d) const;
};

// --- group arithmetic -------------------------------------------------------

/// Throws InputError unless g uses d's coordinate system.
void check_compatible(const SemigroupDescriptor& d, const GroupElement& g);

GroupElement add(const SemigroupDescriptor& d, const GroupElement& a, const GroupElement& b);
GroupElement negate(const SemigroupDescriptor& d, const GroupElement& a);
GroupElement subtract(const SemigroupDescriptor& d, const GroupElement& a, const GroupElement& b);
GroupElement scale(const SemigroupDescriptor& d, const GroupElement& a, std::uint64_t times);

/// g in P.
bool contains(const SemigroupDescriptor& d, const GroupElement& g);
/// x <= y in the order induced by P, i.e. y - x in P.
bool leq(const SemigroupDescriptor& d, const GroupElement& x, const GroupElement& y);

struct MeetJoin {
  GroupElement meet;
  GroupElement join;
};

/// Throws UnsupportedError on a descriptor that is not lattice ordered.
MeetJoin meet_join(const SemigroupDescriptor& d, const GroupElement& g, const GroupElement& h);

struct PosNegParts {
  GroupElement positive;
  GroupElement negative;
};

/// g = positive - negative with positive meet negative = unit.
PosNegParts pos_neg_parts(const SemigroupDescriptor& d, const GroupElement& g);

/// Deterministic factorization: generators are tried in ascending index
/// order, each taken with the largest multiplicity that still lets the
/// remainder factor over the later generators.
Factorization factorize(const SemigroupDescriptor& d, const GroupElement& p);
GroupElement reconstruct(const SemigroupDescriptor& d, const Factorization& f);

/// Coordinate of N^k (or of N^k inside a power): 1-based coordinate, and for
/// InfinitePower ambients a 1-based copy index.
struct IndexKey {
  std::size_t coord = 1;
  std::int64_t copy = 0;

  friend auto operator<=>(const IndexKey&, const IndexKey&) = default;
};

/// e_V: 1 on every index in V, 0 elsewhere.
GroupElement indicator(const std::vector<IndexKey>& v, const SemigroupDescriptor& ambient);

// --- validation -------------------------------------------------------------

struct NonLatticeWitness {
  GroupElement a;
  GroupElement b;
  /// Pairwise incomparable maximal lower bounds of {a, b} in the search window.
  std::vector<GroupElement> maximal_lower_bounds;
};

struct DescriptorVerdict {
  bool unital = false;
  bool closed = false;
  std::size_t closure_samples = 0;
  std::optional<std::pair<GroupElement, GroupElement>> closure_violation;
  bool lattice_ordered = false;
  /// Sampled lattice laws (commutativity, associativity, absorption,
  /// greatest-lower-bound property, g+ meet g- = unit). Only for lattice kinds.
  bool lattice_laws_hold = true;
  std::string lattice_law_violation;
  std::optional<NonLatticeWitness> witness;

  bool valid() const { return unital && closed && lattice_laws_hold; }
};

DescriptorVerdict validate_descriptor(const SemigroupDescriptor& d, std::size_t sample_budget = 1000,
                                      std::uint64_t seed = 0);

/// Lower bounds of {a, b} in [lo, min(a, b)] for a Numerical descriptor, and
/// those among them that are maximal.
std::vector<std::int64_t> numerical_maximal_lower_bounds(const SemigroupDescriptor& d, std::int64_t a,
                                                         std::int64_t b, std::int64_t lo);

// --- sampling ---------------------------------------------------------------

/// Random element of P (small coordinates).
GroupElement sample_positive(const SemigroupDescriptor& d, std::mt19937_64& rng);
/// Random element of G.
GroupElement sample_group(const SemigroupDescriptor& d, std::mt19937_64& rng);

}  // namespace normex
