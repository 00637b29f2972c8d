#include "normex/semigroup.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "normex/errors.hpp"

namespace normex {

// --- Rational ---------------------------------------------------------------

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw InputError("rational arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

Rational make_reduced(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InputError("rational with zero denominator");
  if (den < 0) {
    if (num == INT64_MIN || den == INT64_MIN) throw InputError("rational arithmetic overflow");
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational operator+(const Rational& a, const Rational& b) {
  return make_reduced(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                      static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational Rational::operator-() const {
  if (num_ == INT64_MIN) throw InputError("rational arithmetic overflow");
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational Rational::parse(const std::string& text) {
  auto parse_int = [&](const std::string& s) -> std::int64_t {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw InputError("malformed rational '" + text + "'");
    }
    if (used != s.size()) throw InputError("malformed rational '" + text + "'");
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

// --- GroupElement -----------------------------------------------------------

GroupElement GroupElement::ints(Ints coords) {
  GroupElement g;
  g.value_ = std::move(coords);
  return g;
}

GroupElement GroupElement::rational(Rational q) {
  GroupElement g;
  g.value_ = q;
  return g;
}

GroupElement GroupElement::parts(Parts parts) {
  GroupElement g;
  g.value_ = std::move(parts);
  return g;
}

GroupElement GroupElement::support(Support entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first)
      throw InputError("duplicate copy index " + std::to_string(entries[i].first) + " in power element");
  }
  std::erase_if(entries, [](const auto& e) { return e.second.is_unit(); });
  GroupElement g;
  g.value_ = std::move(entries);
  return g;
}

const GroupElement::Ints& GroupElement::as_ints() const {
  if (!is_ints()) throw InputError("element is not an integer vector");
  return std::get<Ints>(value_);
}

const Rational& GroupElement::as_rational() const {
  if (!is_rational()) throw InputError("element is not a rational");
  return std::get<Rational>(value_);
}

const GroupElement::Parts& GroupElement::as_parts() const {
  if (!is_parts()) throw InputError("element is not a product tuple");
  return std::get<Parts>(value_);
}

const GroupElement::Support& GroupElement::as_support() const {
  if (!is_support()) throw InputError("element is not a power element");
  return std::get<Support>(value_);
}

bool GroupElement::is_unit() const {
  return std::visit(
      [](const auto& v) -> bool {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Ints>) {
          return std::all_of(v.begin(), v.end(), [](std::int64_t c) { return c == 0; });
        } else if constexpr (std::is_same_v<V, Rational>) {
          return v.num() == 0;
        } else if constexpr (std::is_same_v<V, Parts>) {
          return std::all_of(v.begin(), v.end(), [](const GroupElement& p) { return p.is_unit(); });
        } else {
          return v.empty();
        }
      },
      value_);
}

bool operator==(const GroupElement& a, const GroupElement& b) { return a.value_ == b.value_; }

std::string GroupElement::to_string() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Ints>) {
          if (v.size() == 1) {
            os << v[0];
          } else {
            os << '(';
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
            os << ')';
          }
        } else if constexpr (std::is_same_v<V, Rational>) {
          os << v.to_string();
        } else if constexpr (std::is_same_v<V, Parts>) {
          os << '[';
          for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i].to_string();
          os << ']';
        } else {
          os << '{';
          for (std::size_t i = 0; i < v.size(); ++i)
            os << (i ? ", " : "") << v[i].first << ": " << v[i].second.to_string();
          os << '}';
        }
      },
      value_);
  return os.str();
}

// --- SemigroupDescriptor ----------------------------------------------------

namespace {

std::vector<std::int64_t> numerical_minimal_generators(const std::set<std::int64_t>& gaps) {
  if (gaps.empty()) return {1};
  const std::int64_t frobenius = *gaps.rbegin();
  std::int64_t multiplicity = 1;
  while (gaps.count(multiplicity)) ++multiplicity;
  auto in_p = [&](std::int64_t n) { return n >= 0 && !gaps.count(n); };
  std::vector<std::int64_t> gens;
  for (std::int64_t n = 1; n <= frobenius + multiplicity; ++n) {
    if (!in_p(n)) continue;
    bool decomposable = false;
    for (std::int64_t a = 1; a <= n / 2 && !decomposable; ++a) decomposable = in_p(a) && in_p(n - a);
    if (!decomposable) gens.push_back(n);
  }
  return gens;
}

}  // namespace

SemigroupDescriptor SemigroupDescriptor::free_abelian(std::size_t rank) {
  SemigroupDescriptor d;
  d.kind_ = SemigroupKind::FreeAbelian;
  d.rank_ = rank;
  d.derive();
  return d;
}

SemigroupDescriptor SemigroupDescriptor::numerical(std::set<std::int64_t> gaps) {
  for (std::int64_t g : gaps) {
    if (g == 0) throw InputError("gap set contains 0: the semigroup would not be unital");
    if (g < 0) throw InputError("gap set contains negative integer " + std::to_string(g));
  }
  SemigroupDescriptor d;
  d.kind_ = SemigroupKind::Numerical;
  d.rank_ = 1;
  d.gaps_ = std::move(gaps);
  d.derive();
  return d;
}

SemigroupDescriptor SemigroupDescriptor::rationals() {
  SemigroupDescriptor d;
  d.kind_ = SemigroupKind::Rationals;
  d.rank_ = 1;
  d.derive();
  return d;
}

SemigroupDescriptor SemigroupDescriptor::product(std::vector<SemigroupDescriptor> factors) {
  if (factors.empty()) throw InputError("product of zero factors");
  SemigroupDescriptor d;
  d.kind_ = SemigroupKind::Product;
  d.rank_ = factors.size();
  d.factors_ = std::move(factors);
  d.derive();
  return d;
}

SemigroupDescriptor SemigroupDescriptor::infinite_power(SemigroupDescriptor base) {
  SemigroupDescriptor d;
  d.kind_ = SemigroupKind::InfinitePower;
  d.rank_ = 0;
  d.base_ = std::make_shared<const SemigroupDescriptor>(std::move(base));
  d.derive();
  return d;
}

const SemigroupDescriptor& SemigroupDescriptor::base() const {
  if (!base_) throw InputError("descriptor " + name() + " has no base");
  return *base_;
}

void SemigroupDescriptor::derive() {
  generators_.clear();
  labels_.clear();
  switch (kind_) {
    case SemigroupKind::FreeAbelian:
      for (std::size_t i = 0; i < rank_; ++i) {
        GroupElement::Ints e(rank_, 0);
        e[i] = 1;
        generators_.push_back(GroupElement::ints(std::move(e)));
        labels_.push_back("e" + std::to_string(i + 1));
      }
      finitely_generated_ = true;
      lattice_ordered_ = true;
      break;
    case SemigroupKind::Numerical:
      for (std::int64_t g : numerical_minimal_generators(gaps_)) {
        generators_.push_back(GroupElement::integer(g));
        labels_.push_back(std::to_string(g));
      }
      finitely_generated_ = true;
      lattice_ordered_ = gaps_.empty();
      break;
    case SemigroupKind::Rationals:
      finitely_generated_ = false;
      lattice_ordered_ = true;
      break;
    case SemigroupKind::Product: {
      finitely_generated_ = true;
      lattice_ordered_ = true;
      for (std::size_t f = 0; f < factors_.size(); ++f) {
        const auto& factor = factors_[f];
        finitely_generated_ = finitely_generated_ && factor.finitely_generated();
        lattice_ordered_ = lattice_ordered_ && factor.lattice_ordered();
        for (std::size_t i = 0; i < factor.generators().size(); ++i) {
          GroupElement::Parts parts;
          for (const auto& other : factors_) parts.push_back(other.unit());
          parts[f] = factor.generators()[i];
          generators_.push_back(GroupElement::parts(std::move(parts)));
          labels_.push_back("f" + std::to_string(f) + "." + factor.generator_label(i));
        }
      }
      if (!finitely_generated_) {
        generators_.clear();
        labels_.clear();
      }
      break;
    }
    case SemigroupKind::InfinitePower:
      finitely_generated_ = false;
      lattice_ordered_ = base_->lattice_ordered();
      break;
  }
}

std::string SemigroupDescriptor::generator_label(std::size_t index) const {
  if (index >= labels_.size()) throw InputError("generator index " + std::to_string(index) + " out of range");
  return labels_[index];
}

std::optional<std::size_t> SemigroupDescriptor::generator_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

GroupElement SemigroupDescriptor::unit() const {
  switch (kind_) {
    case SemigroupKind::FreeAbelian:
      return GroupElement::ints(GroupElement::Ints(rank_, 0));
    case SemigroupKind::Numerical:
      return GroupElement::integer(0);
    case SemigroupKind::Rationals:
      return GroupElement::rational(Rational(0));
    case SemigroupKind::Product: {
      GroupElement::Parts parts;
      for (const auto& f : factors_) parts.push_back(f.unit());
      return GroupElement::parts(std::move(parts));
    }
    case SemigroupKind::InfinitePower:
      return GroupElement::support({});
  }
  return {};
}

std::string SemigroupDescriptor::name() const {
  switch (kind_) {
    case SemigroupKind::FreeAbelian:
      return "N^" + std::to_string(rank_);
    case SemigroupKind::Numerical: {
      std::string s = "N\\{";
      bool first = true;
      for (auto g : gaps_) {
        s += (first ? "" : ",") + std::to_string(g);
        first = false;
      }
      return s + "}";
    }
    case SemigroupKind::Rationals:
      return "Q+";
    case SemigroupKind::Product: {
      std::string s;
      for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? " x " : "") + factors_[i].name();
      return "(" + s + ")";
    }
    case SemigroupKind::InfinitePower:
      return base_->name() + "^inf";
  }
  return "?";
}

std::string Factorization::to_string(const SemigroupDescriptor& d) const {
  std::string s = "{";
  bool first = true;
  for (const auto& [idx, mult] : terms) {
    s += (first ? "" : ", ") + d.generator_label(idx) + ":" + std::to_string(mult);
    first = false;
  }
  return s + "}";
}

// --- arithmetic -------------------------------------------------------------

void check_compatible(const SemigroupDescriptor& d, const GroupElement& g) {
  auto fail = [&](const std::string& why) {
    throw InputError("element " + g.to_string() + " incompatible with " + d.name() + ": " + why);
  };
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
      if (!g.is_ints() || g.as_ints().size() != d.rank())
        fail("expected " + std::to_string(d.rank()) + " integer coordinates");
      break;
    case SemigroupKind::Numerical:
      if (!g.is_ints() || g.as_ints().size() != 1) fail("expected a single integer");
      break;
    case SemigroupKind::Rationals:
      if (!g.is_rational()) fail("expected a rational");
      break;
    case SemigroupKind::Product:
      if (!g.is_parts() || g.as_parts().size() != d.factors().size())
        fail("expected " + std::to_string(d.factors().size()) + " parts");
      for (std::size_t i = 0; i < d.factors().size(); ++i) check_compatible(d.factors()[i], g.as_parts()[i]);
      break;
    case SemigroupKind::InfinitePower:
      if (!g.is_support()) fail("expected a finitely supported power element");
      for (const auto& [idx, part] : g.as_support()) check_compatible(d.base(), part);
      break;
  }
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw InputError("integer coordinate overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw InputError("integer coordinate overflow");
  return r;
}

// Combines two power elements index-by-index; missing entries are the base unit.
template <class F>
GroupElement merge_support(const SemigroupDescriptor& base, const GroupElement& a, const GroupElement& b, F op) {
  const auto& sa = a.as_support();
  const auto& sb = b.as_support();
  GroupElement::Support out;
  std::size_t i = 0, j = 0;
  const GroupElement unit = base.unit();
  while (i < sa.size() || j < sb.size()) {
    if (j == sb.size() || (i < sa.size() && sa[i].first < sb[j].first)) {
      out.emplace_back(sa[i].first, op(sa[i].second, unit));
      ++i;
    } else if (i == sa.size() || sb[j].first < sa[i].first) {
      out.emplace_back(sb[j].first, op(unit, sb[j].second));
      ++j;
    } else {
      out.emplace_back(sa[i].first, op(sa[i].second, sb[j].second));
      ++i;
      ++j;
    }
  }
  return GroupElement::support(std::move(out));
}

}  // namespace

GroupElement add(const SemigroupDescriptor& d, const GroupElement& a, const GroupElement& b) {
  check_compatible(d, a);
  check_compatible(d, b);
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
    case SemigroupKind::Numerical: {
      GroupElement::Ints r(a.as_ints().size());
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = checked_add(a.as_ints()[i], b.as_ints()[i]);
      return GroupElement::ints(std::move(r));
    }
    case SemigroupKind::Rationals:
      return GroupElement::rational(a.as_rational() + b.as_rational());
    case SemigroupKind::Product: {
      GroupElement::Parts r;
      for (std::size_t i = 0; i < d.factors().size(); ++i)
        r.push_back(add(d.factors()[i], a.as_parts()[i], b.as_parts()[i]));
      return GroupElement::parts(std::move(r));
    }
    case SemigroupKind::InfinitePower:
      return merge_support(d.base(), a, b,
                           [&](const GroupElement& x, const GroupElement& y) { return add(d.base(), x, y); });
  }
  return {};
}

GroupElement negate(const SemigroupDescriptor& d, const GroupElement& a) {
  check_compatible(d, a);
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
    case SemigroupKind::Numerical: {
      GroupElement::Ints r(a.as_ints().size());
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = checked_mul(a.as_ints()[i], -1);
      return GroupElement::ints(std::move(r));
    }
    case SemigroupKind::Rationals:
      return GroupElement::rational(-a.as_rational());
    case SemigroupKind::Product: {
      GroupElement::Parts r;
      for (std::size_t i = 0; i < d.factors().size(); ++i) r.push_back(negate(d.factors()[i], a.as_parts()[i]));
      return GroupElement::parts(std::move(r));
    }
    case SemigroupKind::InfinitePower: {
      GroupElement::Support r;
      for (const auto& [idx, part] : a.as_support()) r.emplace_back(idx, negate(d.base(), part));
      return GroupElement::support(std::move(r));
    }
  }
  return {};
}

GroupElement subtract(const SemigroupDescriptor& d, const GroupElement& a, const GroupElement& b) {
  return add(d, a, negate(d, b));
}

GroupElement scale(const SemigroupDescriptor& d, const GroupElement& a, std::uint64_t times) {
  GroupElement result = d.unit();
  GroupElement power = a;
  check_compatible(d, a);
  while (times > 0) {
    if (times & 1U) result = add(d, result, power);
    times >>= 1U;
    if (times > 0) power = add(d, power, power);
  }
  return result;
}

bool contains(const SemigroupDescriptor& d, const GroupElement& g) {
  check_compatible(d, g);
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
      return std::all_of(g.as_ints().begin(), g.as_ints().end(), [](std::int64_t c) { return c >= 0; });
    case SemigroupKind::Numerical: {
      std::int64_t n = g.as_ints()[0];
      return n >= 0 && !d.gaps().count(n);
    }
    case SemigroupKind::Rationals:
      return g.as_rational() >= Rational(0);
    case SemigroupKind::Product:
      for (std::size_t i = 0; i < d.factors().size(); ++i)
        if (!contains(d.factors()[i], g.as_parts()[i])) return false;
      return true;
    case SemigroupKind::InfinitePower:
      for (const auto& [idx, part] : g.as_support())
        if (!contains(d.base(), part)) return false;
      return true;
  }
  return false;
}

bool leq(const SemigroupDescriptor& d, const GroupElement& x, const GroupElement& y) {
  return contains(d, subtract(d, y, x));
}

MeetJoin meet_join(const SemigroupDescriptor& d, const GroupElement& g, const GroupElement& h) {
  if (!d.lattice_ordered()) throw UnsupportedError("meet/join requested on non-lattice semigroup " + d.name());
  check_compatible(d, g);
  check_compatible(d, h);
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
    case SemigroupKind::Numerical: {
      const auto& a = g.as_ints();
      const auto& b = h.as_ints();
      GroupElement::Ints lo(a.size()), hi(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        lo[i] = std::min(a[i], b[i]);
        hi[i] = std::max(a[i], b[i]);
      }
      return {GroupElement::ints(std::move(lo)), GroupElement::ints(std::move(hi))};
    }
    case SemigroupKind::Rationals: {
      const auto& a = g.as_rational();
      const auto& b = h.as_rational();
      return {GroupElement::rational(std::min(a, b)), GroupElement::rational(std::max(a, b))};
    }
    case SemigroupKind::Product: {
      GroupElement::Parts lo, hi;
      for (std::size_t i = 0; i < d.factors().size(); ++i) {
        auto mj = meet_join(d.factors()[i], g.as_parts()[i], h.as_parts()[i]);
        lo.push_back(std::move(mj.meet));
        hi.push_back(std::move(mj.join));
      }
      return {GroupElement::parts(std::move(lo)), GroupElement::parts(std::move(hi))};
    }
    case SemigroupKind::InfinitePower: {
      const auto& base = d.base();
      auto lo = merge_support(base, g, h, [&](const GroupElement& x, const GroupElement& y) {
        return meet_join(base, x, y).meet;
      });
      auto hi = merge_support(base, g, h, [&](const GroupElement& x, const GroupElement& y) {
        return meet_join(base, x, y).join;
      });
      return {std::move(lo), std::move(hi)};
    }
  }
  return {};
}

PosNegParts pos_neg_parts(const SemigroupDescriptor& d, const GroupElement& g) {
  if (!d.lattice_ordered())
    throw UnsupportedError("positive/negative parts requested on non-lattice semigroup " + d.name());
  GroupElement positive = meet_join(d, g, d.unit()).join;
  GroupElement negative = subtract(d, positive, g);
  return {std::move(positive), std::move(negative)};
}

// --- factorization ----------------------------------------------------------

namespace {

class NumericalFactorizer {
 public:
  explicit NumericalFactorizer(std::vector<std::int64_t> gens) : gens_(std::move(gens)) {}

  std::optional<std::vector<std::uint64_t>> run(std::int64_t target) {
    std::vector<std::uint64_t> mults(gens_.size(), 0);
    if (!search(0, target, mults)) return std::nullopt;
    return mults;
  }

 private:
  bool search(std::size_t i, std::int64_t rest, std::vector<std::uint64_t>& mults) {
    if (rest == 0) {
      std::fill(mults.begin() + static_cast<std::ptrdiff_t>(i), mults.end(), 0);
      return true;
    }
    if (i == gens_.size()) return false;
    const std::int64_t g = gens_[i];
    if (i + 1 == gens_.size()) {
      if (rest % g != 0) return false;
      mults[i] = static_cast<std::uint64_t>(rest / g);
      return true;
    }
    auto key = std::make_pair(i, rest);
    if (dead_.count(key)) return false;
    for (std::int64_t m = rest / g; m >= 0; --m) {
      mults[i] = static_cast<std::uint64_t>(m);
      if (search(i + 1, rest - m * g, mults)) return true;
    }
    dead_.insert(key);
    return false;
  }

  std::vector<std::int64_t> gens_;
  std::set<std::pair<std::size_t, std::int64_t>> dead_;
};

}  // namespace

Factorization factorize(const SemigroupDescriptor& d, const GroupElement& p) {
  if (!d.finitely_generated())
    throw UnsupportedError("factorization requires a finitely generated semigroup, got " + d.name());
  if (!contains(d, p)) throw MembershipError(p.to_string() + " is not in " + d.name());
  Factorization f;
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
      for (std::size_t i = 0; i < d.rank(); ++i)
        if (p.as_ints()[i] != 0) f.terms[i] = static_cast<std::uint64_t>(p.as_ints()[i]);
      return f;
    case SemigroupKind::Numerical: {
      std::vector<std::int64_t> gens;
      for (const auto& g : d.generators()) gens.push_back(g.as_ints()[0]);
      auto mults = NumericalFactorizer(gens).run(p.as_ints()[0]);
      // Membership of a gap-set semigroup that is not closed can disagree with
      // generability.
      if (!mults) throw MembershipError(p.to_string() + " is not generated by the generators of " + d.name());
      for (std::size_t i = 0; i < mults->size(); ++i)
        if ((*mults)[i] != 0) f.terms[i] = (*mults)[i];
      return f;
    }
    case SemigroupKind::Product: {
      std::size_t offset = 0;
      for (std::size_t i = 0; i < d.factors().size(); ++i) {
        auto part = factorize(d.factors()[i], p.as_parts()[i]);
        for (const auto& [idx, mult] : part.terms) f.terms[offset + idx] = mult;
        offset += d.factors()[i].generators().size();
      }
      return f;
    }
    default:
      break;
  }
  throw UnsupportedError("factorization unsupported for " + d.name());
}

GroupElement reconstruct(const SemigroupDescriptor& d, const Factorization& f) {
  GroupElement sum = d.unit();
  for (const auto& [idx, mult] : f.terms) {
    if (idx >= d.generators().size())
      throw InputError("generator index " + std::to_string(idx) + " out of range for " + d.name());
    sum = add(d, sum, scale(d, d.generators()[idx], mult));
  }
  return sum;
}

GroupElement indicator(const std::vector<IndexKey>& v, const SemigroupDescriptor& ambient) {
  std::set<IndexKey> seen;
  for (const auto& key : v)
    if (!seen.insert(key).second) throw InputError("index set contains a repeated index");

  if (ambient.kind() == SemigroupKind::FreeAbelian) {
    GroupElement::Ints coords(ambient.rank(), 0);
    for (const auto& key : v) {
      if (key.coord < 1 || key.coord > ambient.rank() || key.copy != 0)
        throw InputError("index " + std::to_string(key.coord) + " out of range for " + ambient.name());
      coords[key.coord - 1] = 1;
    }
    return GroupElement::ints(std::move(coords));
  }
  if (ambient.kind() == SemigroupKind::InfinitePower && ambient.base().kind() == SemigroupKind::FreeAbelian) {
    const std::size_t m = ambient.base().rank();
    std::map<std::int64_t, GroupElement::Ints> by_copy;
    for (const auto& key : v) {
      if (key.coord < 1 || key.coord > m || key.copy < 1)
        throw InputError("index (" + std::to_string(key.coord) + "," + std::to_string(key.copy) +
                         ") out of range for " + ambient.name());
      auto& coords = by_copy.try_emplace(key.copy, GroupElement::Ints(m, 0)).first->second;
      coords[key.coord - 1] = 1;
    }
    GroupElement::Support entries;
    for (auto& [copy, coords] : by_copy) entries.emplace_back(copy, GroupElement::ints(std::move(coords)));
    return GroupElement::support(std::move(entries));
  }
  throw UnsupportedError("indicator elements need N^k or (N^k)^inf, got " + ambient.name());
}

// --- sampling ---------------------------------------------------------------

namespace {

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

std::int64_t numerical_window(const SemigroupDescriptor& d) {
  return (d.gaps().empty() ? 0 : *d.gaps().rbegin()) + 12;
}

GroupElement sample(const SemigroupDescriptor& d, std::mt19937_64& rng, bool positive) {
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian: {
      GroupElement::Ints c(d.rank());
      for (auto& x : c) x = uniform(rng, positive ? 0 : -6, 6);
      return GroupElement::ints(std::move(c));
    }
    case SemigroupKind::Numerical: {
      const std::int64_t w = numerical_window(d);
      for (;;) {
        std::int64_t n = uniform(rng, positive ? 0 : -w, w);
        if (!positive || (n >= 0 && !d.gaps().count(n))) return GroupElement::integer(n);
      }
    }
    case SemigroupKind::Rationals:
      return GroupElement::rational(Rational(uniform(rng, positive ? 0 : -24, 24), uniform(rng, 1, 6)));
    case SemigroupKind::Product: {
      GroupElement::Parts parts;
      for (const auto& f : d.factors()) parts.push_back(sample(f, rng, positive));
      return GroupElement::parts(std::move(parts));
    }
    case SemigroupKind::InfinitePower: {
      std::set<std::int64_t> indices;
      const auto count = uniform(rng, 0, 3);
      while (static_cast<std::int64_t>(indices.size()) < count) indices.insert(uniform(rng, 1, 6));
      GroupElement::Support entries;
      for (auto idx : indices) entries.emplace_back(idx, sample(d.base(), rng, positive));
      return GroupElement::support(std::move(entries));
    }
  }
  return {};
}

}  // namespace

GroupElement sample_positive(const SemigroupDescriptor& d, std::mt19937_64& rng) { return sample(d, rng, true); }
GroupElement sample_group(const SemigroupDescriptor& d, std::mt19937_64& rng) { return sample(d, rng, false); }

// --- validation -------------------------------------------------------------

std::vector<std::int64_t> numerical_maximal_lower_bounds(const SemigroupDescriptor& d, std::int64_t a,
                                                         std::int64_t b, std::int64_t lo) {
  if (d.kind() != SemigroupKind::Numerical) throw InputError("expected a numerical semigroup");
  auto in_p = [&](std::int64_t n) { return n >= 0 && !d.gaps().count(n); };
  std::vector<std::int64_t> bounds;
  for (std::int64_t x = std::min(a, b); x >= lo; --x)
    if (in_p(a - x) && in_p(b - x)) bounds.push_back(x);
  std::vector<std::int64_t> maximal;
  for (std::int64_t x : bounds) {
    bool dominated = false;
    for (std::int64_t y : bounds) dominated = dominated || (y != x && in_p(y - x));
    if (!dominated) maximal.push_back(x);
  }
  return maximal;
}

namespace {

std::optional<NonLatticeWitness> find_numerical_witness(const SemigroupDescriptor& d) {
  const std::int64_t frobenius = d.gaps().empty() ? 0 : *d.gaps().rbegin();
  std::vector<std::int64_t> candidates;
  for (const auto& g : d.generators()) candidates.push_back(g.as_ints()[0]);
  for (std::int64_t n = 1; n <= 2 * frobenius + 2; ++n)
    if (!d.gaps().count(n) && std::find(candidates.begin(), candidates.end(), n) == candidates.end())
      candidates.push_back(n);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      const std::int64_t a = candidates[i], b = candidates[j];
      const std::int64_t lo = std::min(a, b) - 20 - 2 * frobenius;
      auto maximal = numerical_maximal_lower_bounds(d, a, b, lo);
      if (maximal.size() >= 2) {
        NonLatticeWitness w{GroupElement::integer(a), GroupElement::integer(b), {}};
        for (auto x : maximal) w.maximal_lower_bounds.push_back(GroupElement::integer(x));
        return w;
      }
    }
  }
  return std::nullopt;
}

std::string check_lattice_laws(const SemigroupDescriptor& d, std::size_t budget, std::mt19937_64& rng) {
  auto meet = [&](const GroupElement& a, const GroupElement& b) { return meet_join(d, a, b).meet; };
  auto join = [&](const GroupElement& a, const GroupElement& b) { return meet_join(d, a, b).join; };
  for (std::size_t s = 0; s < budget; ++s) {
    auto g = sample_group(d, rng);
    auto h = sample_group(d, rng);
    auto k = sample_group(d, rng);
    const std::string where = " at " + g.to_string() + ", " + h.to_string() + ", " + k.to_string();
    if (!(meet(g, h) == meet(h, g)) || !(join(g, h) == join(h, g))) return "commutativity" + where;
    if (!(meet(meet(g, h), k) == meet(g, meet(h, k))) || !(join(join(g, h), k) == join(g, join(h, k))))
      return "associativity" + where;
    if (!(meet(g, join(g, h)) == g) || !(join(g, meet(g, h)) == g)) return "absorption" + where;
    auto m = meet(g, h);
    if (!leq(d, m, g) || !leq(d, m, h)) return "meet is not a lower bound" + where;
    if (leq(d, k, g) && leq(d, k, h) && !leq(d, k, m)) return "meet is not greatest" + where;
    auto lower = subtract(d, m, sample_positive(d, rng));
    if (!leq(d, lower, m)) return "order not compatible with translation" + where;
    auto parts = pos_neg_parts(d, g);
    if (!(subtract(d, parts.positive, parts.negative) == g)) return "g+ - g- != g" + where;
    if (!meet(parts.positive, parts.negative).is_unit()) return "g+ meet g- != unit" + where;
  }
  return {};
}

}  // namespace

DescriptorVerdict validate_descriptor(const SemigroupDescriptor& d, std::size_t sample_budget, std::uint64_t seed) {
  DescriptorVerdict v;
  std::mt19937_64 rng(seed);
  v.unital = contains(d, d.unit());
  v.closed = true;
  auto check_pair = [&](const GroupElement& a, const GroupElement& b) {
    ++v.closure_samples;
    if (v.closed && !contains(d, add(d, a, b))) {
      v.closed = false;
      v.closure_violation = std::make_pair(a, b);
    }
  };
  if (d.kind() == SemigroupKind::Numerical && !d.gaps().empty()) {
    // Closure failures of a gap set can only involve summands below the
    // largest gap, so this window is exhaustive.
    const std::int64_t frobenius = *d.gaps().rbegin();
    for (std::int64_t a = 0; a <= frobenius; ++a)
      for (std::int64_t b = a; b <= frobenius; ++b)
        if (contains(d, GroupElement::integer(a)) && contains(d, GroupElement::integer(b)))
          check_pair(GroupElement::integer(a), GroupElement::integer(b));
  }
  for (std::size_t s = 0; s < sample_budget; ++s) check_pair(sample_positive(d, rng), sample_positive(d, rng));

  v.lattice_ordered = d.lattice_ordered();
  if (v.lattice_ordered) {
    v.lattice_law_violation = check_lattice_laws(d, sample_budget, rng);
    v.lattice_laws_hold = v.lattice_law_violation.empty();
  } else if (d.kind() == SemigroupKind::Numerical) {
    v.witness = find_numerical_witness(d);
  } else if (d.kind() == SemigroupKind::Product) {
    for (const auto& f : d.factors()) {
      if (f.lattice_ordered() || f.kind() != SemigroupKind::Numerical) continue;
      if (auto w = find_numerical_witness(f)) {
        // Lift the factor witness into the product (unit in the other parts).
        std::size_t at = static_cast<std::size_t>(&f - d.factors().data());
        auto lift = [&](const GroupElement& x) {
          GroupElement::Parts parts;
          for (const auto& other : d.factors()) parts.push_back(other.unit());
          parts[at] = x;
          return GroupElement::parts(std::move(parts));
        };
        NonLatticeWitness lifted{lift(w->a), lift(w->b), {}};
        for (const auto& x : w->maximal_lower_bounds) lifted.maximal_lower_bounds.push_back(lift(x));
        v.witness = std::move(lifted);
        break;
      }
    }
  }
  return v;
}

}  // namespace normex
