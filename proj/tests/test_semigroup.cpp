#include <doctest.h>

#include <random>

#include "normex/errors.hpp"
#include "normex/semigroup.hpp"
#include "oracles.hpp"

using namespace normex;

namespace {

GroupElement z(std::initializer_list<std::int64_t> v) { return GroupElement::ints(v); }
GroupElement q(std::int64_t n, std::int64_t d = 1) { return GroupElement::rational(Rational(n, d)); }

}  // namespace

TEST_CASE("rational arithmetic is exact and reduced") {
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational::parse("10/4").to_string() == "5/2");
  CHECK(Rational::parse("-7") == Rational(-7));
  CHECK_THROWS_AS(Rational(1, 0), InputError);
  CHECK_THROWS_AS(Rational::parse("1/x"), InputError);
  const Rational big(std::numeric_limits<std::int64_t>::max());
  CHECK_THROWS_AS(big + Rational(1), InputError);
}

TEST_CASE("validate_descriptor") {
  SUBCASE("free abelian rank 2 is a lattice") {
    const auto v = validate_descriptor(SemigroupDescriptor::free_abelian(2));
    CHECK(v.valid());
    CHECK(v.lattice_ordered);
    CHECK_FALSE(v.witness);
  }
  SUBCASE("N minus {1} is a semigroup but not a lattice") {
    const auto d = SemigroupDescriptor::numerical({1});
    const auto v = validate_descriptor(d);
    CHECK(v.valid());
    CHECK_FALSE(v.lattice_ordered);
    REQUIRE(v.witness);
    CHECK(v.witness->a == GroupElement::integer(2));
    CHECK(v.witness->b == GroupElement::integer(3));
    // Oracle window [-20, 3] from the pair itself.
    const auto expected = oracle::maximal_lower_bounds({1}, 2, 3, -20);
    REQUIRE(expected == std::vector<std::int64_t>{-1, 0});
    std::vector<std::int64_t> got;
    for (const auto& g : v.witness->maximal_lower_bounds) got.push_back(g.as_ints()[0]);
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
    CHECK(numerical_maximal_lower_bounds(d, 2, 3, -20).size() == 2);
  }
  SUBCASE("rationals are totally ordered") {
    const auto v = validate_descriptor(SemigroupDescriptor::rationals());
    CHECK(v.valid());
    CHECK(v.lattice_ordered);
  }
  SUBCASE("products and powers") {
    const auto p = SemigroupDescriptor::product({SemigroupDescriptor::free_abelian(1), SemigroupDescriptor::rationals()});
    CHECK(validate_descriptor(p).valid());
    CHECK(p.lattice_ordered());
    const auto inf = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(2));
    CHECK(validate_descriptor(inf).valid());
    CHECK(inf.lattice_ordered());
    CHECK_FALSE(SemigroupDescriptor::product({SemigroupDescriptor::numerical({1})}).lattice_ordered());
  }
  SUBCASE("zero listed as a gap is rejected") {
    CHECK_THROWS_AS(SemigroupDescriptor::numerical({0, 1}), InputError);
    CHECK_THROWS_AS(SemigroupDescriptor::numerical({-2}), InputError);
  }
}

TEST_CASE("contains") {
  const auto neil = SemigroupDescriptor::numerical({1});
  CHECK_FALSE(contains(neil, GroupElement::integer(1)));
  CHECK(contains(neil, GroupElement::integer(7)));
  CHECK(oracle::brute_factor({2, 3}, 7).count > 0);
  CHECK(contains(SemigroupDescriptor::free_abelian(2), z({0, 0})));
  CHECK_FALSE(contains(SemigroupDescriptor::free_abelian(2), z({1, -1})));
  CHECK_THROWS_AS(contains(SemigroupDescriptor::free_abelian(2), z({1})), InputError);
  CHECK_THROWS_AS(contains(neil, q(1, 2)), InputError);
}

TEST_CASE("meet and join") {
  const auto z2 = SemigroupDescriptor::free_abelian(2);
  auto mj = meet_join(z2, z({2, 1}), z({1, 3}));
  CHECK(mj.meet == z({1, 1}));
  CHECK(mj.join == z({2, 3}));

  const auto qd = SemigroupDescriptor::rationals();
  mj = meet_join(qd, q(1, 2), q(3));
  CHECK(mj.meet == q(1, 2));
  CHECK(mj.join == q(3));

  const auto n1 = SemigroupDescriptor::free_abelian(1);
  const auto pw = SemigroupDescriptor::infinite_power(n1);
  const auto a = GroupElement::support({{1, z({2})}});
  const auto b = GroupElement::support({{2, z({3})}});
  mj = meet_join(pw, a, b);
  CHECK(mj.meet == pw.unit());
  CHECK(mj.meet.is_unit());
  CHECK(mj.join == GroupElement::support({{1, z({2})}, {2, z({3})}}));

  CHECK_THROWS_AS(meet_join(SemigroupDescriptor::numerical({1}), GroupElement::integer(2), GroupElement::integer(3)),
                  UnsupportedError);
}

TEST_CASE("pos_neg_parts") {
  const auto z2 = SemigroupDescriptor::free_abelian(2);
  auto pn = pos_neg_parts(z2, z({2, -3}));
  CHECK(pn.positive == z({2, 0}));
  CHECK(pn.negative == z({0, 3}));
  pn = pos_neg_parts(z2, z({4, 1}));
  CHECK(pn.positive == z({4, 1}));
  CHECK(pn.negative.is_unit());
  pn = pos_neg_parts(SemigroupDescriptor::rationals(), q(-5, 2));
  CHECK(pn.positive.is_unit());
  CHECK(pn.negative == q(5, 2));
  CHECK_THROWS_AS(pos_neg_parts(SemigroupDescriptor::numerical({1}), GroupElement::integer(2)), UnsupportedError);
}

TEST_CASE("factorize follows the smallest-generator-first policy") {
  const auto neil = SemigroupDescriptor::numerical({1});
  REQUIRE(neil.generators().size() == 2);
  CHECK(factorize(neil, GroupElement::integer(7)).to_string(neil) == "{2:2, 3:1}");
  CHECK(factorize(neil, GroupElement::integer(6)).to_string(neil) == "{2:3}");
  const auto z2 = SemigroupDescriptor::free_abelian(2);
  const auto f = factorize(z2, z({1, 2}));
  CHECK(f.terms == std::map<std::size_t, std::uint64_t>{{0, 1}, {1, 2}});
  CHECK(f.to_string(z2) == "{e1:1, e2:2}");
  CHECK_THROWS_AS(factorize(neil, GroupElement::integer(1)), MembershipError);
  CHECK_THROWS_AS(factorize(SemigroupDescriptor::rationals(), q(1)), UnsupportedError);
  CHECK(factorize(neil, GroupElement::integer(0)).terms.empty());
}

TEST_CASE("factorize agrees with brute force and with membership on a window") {
  for (const std::set<std::int64_t>& gaps :
       {std::set<std::int64_t>{1}, std::set<std::int64_t>{1, 2, 4}, std::set<std::int64_t>{1, 2, 3, 5, 7}}) {
    const auto d = SemigroupDescriptor::numerical(gaps);
    std::vector<std::int64_t> gens;
    for (const auto& g : d.generators()) gens.push_back(g.as_ints()[0]);
    for (std::int64_t p = -3; p <= 50; ++p) {
      const auto g = GroupElement::integer(p);
      const auto brute = oracle::brute_factor(gens, p);
      CHECK(contains(d, g) == (brute.count > 0));
      if (brute.count == 0) {
        CHECK_THROWS_AS(factorize(d, g), MembershipError);
        continue;
      }
      const auto f = factorize(d, g);
      std::vector<std::uint64_t> got(gens.size(), 0);
      for (auto [i, m] : f.terms) got[i] = m;
      CHECK(got == *brute.lex_max);
      CHECK(reconstruct(d, f) == g);
    }
  }
}

TEST_CASE("minimal generators of numerical semigroups") {
  const auto d = SemigroupDescriptor::numerical({1, 2, 4});
  std::vector<std::int64_t> gens;
  for (const auto& g : d.generators()) gens.push_back(g.as_ints()[0]);
  CHECK(gens == std::vector<std::int64_t>{3, 5, 7});
  CHECK(SemigroupDescriptor::numerical({}).generators().size() == 1);
}

TEST_CASE("indicator") {
  const auto n5 = SemigroupDescriptor::free_abelian(5);
  CHECK(indicator({{1, 0}, {3, 0}}, n5) == z({1, 0, 1, 0, 0}));
  CHECK(indicator({}, n5) == n5.unit());
  const auto pw = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(2));
  CHECK(indicator({{1, 2}}, pw) == GroupElement::support({{2, z({1, 0})}}));
  CHECK_THROWS_AS(indicator({{6, 0}}, n5), InputError);
  CHECK_THROWS_AS(indicator({{0, 0}}, n5), InputError);
  CHECK_THROWS_AS(indicator({{1, 0}, {1, 0}}, n5), InputError);
  CHECK_THROWS_AS(indicator({{3, 1}}, pw), InputError);
}

TEST_CASE("indicator additivity on disjoint sets") {
  const auto pw = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(3));
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<IndexKey> all;
    for (std::size_t c = 1; c <= 3; ++c)
      for (std::int64_t k = 1; k <= 4; ++k) all.push_back({c, k});
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t a = rng() % 6, b = rng() % 6;
    std::vector<IndexKey> v(all.begin(), all.begin() + a), w(all.begin() + a, all.begin() + a + b), u = v;
    u.insert(u.end(), w.begin(), w.end());
    CHECK(add(pw, indicator(v, pw), indicator(w, pw)) == indicator(u, pw));
  }
}

TEST_CASE("canonical form drops unit entries") {
  const auto a = GroupElement::support({{3, z({0, 0})}, {1, z({1, 0})}});
  CHECK(a == GroupElement::support({{1, z({1, 0})}}));
  CHECK_THROWS_AS(GroupElement::support({{1, z({1})}, {1, z({2})}}), InputError);
  const auto pw = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(2));
  const auto s = add(pw, a, negate(pw, a));
  CHECK(s.is_unit());
  CHECK(s.as_support().empty());
}

TEST_CASE("lattice laws on samples") {
  std::mt19937_64 rng(5);
  const std::vector<SemigroupDescriptor> ds = {
      SemigroupDescriptor::free_abelian(3), SemigroupDescriptor::rationals(),
      SemigroupDescriptor::product({SemigroupDescriptor::free_abelian(1), SemigroupDescriptor::rationals()}),
      SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(2))};
  for (const auto& d : ds) {
    CAPTURE(d.name());
    for (int i = 0; i < 300; ++i) {
      const auto g = sample_group(d, rng), h = sample_group(d, rng), x = sample_group(d, rng);
      const auto mj = meet_join(d, g, h);
      CHECK(leq(d, mj.meet, g));
      CHECK(leq(d, mj.meet, h));
      CHECK(leq(d, g, mj.join));
      CHECK(leq(d, h, mj.join));
      if (leq(d, x, g) && leq(d, x, h)) CHECK(leq(d, x, mj.meet));
      if (leq(d, g, x) && leq(d, h, x)) CHECK(leq(d, mj.join, x));
      // A lower bound built from the meet itself.
      const auto below = subtract(d, mj.meet, sample_positive(d, rng));
      CHECK(leq(d, below, mj.meet));
    }
  }
}

TEST_CASE("pos_neg_parts reconstruct and are disjoint") {
  std::mt19937_64 rng(9);
  const std::vector<SemigroupDescriptor> ds = {
      SemigroupDescriptor::free_abelian(4), SemigroupDescriptor::rationals(),
      SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(2))};
  for (const auto& d : ds)
    for (int i = 0; i < 1000; ++i) {
      const auto g = sample_group(d, rng);
      const auto pn = pos_neg_parts(d, g);
      CHECK(subtract(d, pn.positive, pn.negative) == g);
      CHECK(meet_join(d, pn.positive, pn.negative).meet.is_unit());
      CHECK(contains(d, pn.positive));
      CHECK(contains(d, pn.negative));
    }
}

TEST_CASE("power meet and join are componentwise") {
  const auto base = SemigroupDescriptor::free_abelian(2);
  const auto pw = SemigroupDescriptor::infinite_power(base);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const auto g = sample_group(pw, rng), h = sample_group(pw, rng);
    const auto mj = meet_join(pw, g, h);
    auto component = [&](const GroupElement& e, std::int64_t k) {
      for (const auto& [idx, part] : e.as_support())
        if (idx == k) return part;
      return base.unit();
    };
    for (std::int64_t k = 0; k <= 12; ++k) {
      const auto b = meet_join(base, component(g, k), component(h, k));
      CHECK(component(mj.meet, k) == b.meet);
      CHECK(component(mj.join, k) == b.join);
    }
  }
}

TEST_CASE("element printing") {
  CHECK(GroupElement::integer(7).to_string() == "7");
  CHECK(z({1, 2}).to_string() == "(1,2)");
  CHECK(q(5, 2).to_string() == "5/2");
}
