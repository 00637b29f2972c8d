#include <doctest.h>

#include <algorithm>
#include <random>

#include "normex/certificates.hpp"
#include "normex/constructions.hpp"
#include "normex/errors.hpp"
#include "oracles.hpp"

using namespace normex;

namespace {

const CMatrix kJordan = CMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});

CMatrix scalar(Complex x) { return CMatrix::from_rows({{x}}); }

GroupElement z(std::initializer_list<std::int64_t> v) { return GroupElement::ints(v); }

CMatrix diag(std::initializer_list<Complex> v) {
  std::vector<Complex> d(v);
  return CMatrix::diagonal(d);
}

}  // namespace

TEST_CASE("binomial coefficients") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(62, 31) == 465428353255261088LL);
  CHECK_THROWS_AS(binomial(70, 35), InputError);
}

TEST_CASE("agler_certificate examples") {
  std::mt19937_64 rng(1);
  const CMatrix t = oracle::commuting_polynomial_family(rng, 3, 1)[0];
  CHECK(agler_operator(t, 0) == CMatrix::identity(3));
  CHECK(agler_certificate(t, 0).passed());

  const auto ns = make_commuting_normals(4, 4, 1);
  for (std::uint32_t n = 0; n <= 5; ++n) {
    const auto r = agler_certificate(ns[0], n);
    CHECK(r.passed());
    CHECK(oracle::max_diff(agler_operator(ns[0], n), oracle::normal_product_formula(ns, {n})) <= 1e-10);
  }

  const auto r = agler_certificate(kJordan, 2);
  CHECK(r.verdict == Verdict::Fail);
  REQUIRE(r.margin);
  CHECK(*r.margin == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(agler_operator(kJordan, 2) == diag({1.0, -1.0}));
  REQUIRE(r.witness);
  CHECK((*r.witness)["n"] == 2);

  const auto na = agler_certificate(2.0 * CMatrix::identity(2), 1);
  CHECK(na.verdict == Verdict::NotApplicable);
  CHECK_FALSE(na.note.empty());
}

TEST_CASE("athavale_certificate examples") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const CMatrix t = oracle::commuting_polynomial_family(rng, 4, 1)[0];
    for (std::uint32_t n = 0; n <= 5; ++n) CHECK(athavale_operator({t}, {n}) == agler_operator(t, n));
  }

  const auto ns = make_commuting_normals(5, 4, 3);
  const DegreeTuple n = {2, 1, 3};
  const auto r = athavale_certificate(ns, n);
  CHECK(r.passed());
  CHECK(oracle::max_diff(athavale_operator(ns, n), oracle::normal_product_formula(ns, n)) <= 1e-9);

  const std::vector<CMatrix> ji = {kJordan, CMatrix::identity(2)};
  const auto degenerate = athavale_certificate(ji, {2, 1});
  CHECK(degenerate.passed());
  CHECK(max_abs(athavale_operator(ji, {2, 1})) == 0.0);
  REQUIRE(degenerate.margin);
  CHECK(*degenerate.margin == 0.0);
  const auto fail = athavale_certificate(ji, {2, 0});
  CHECK(fail.verdict == Verdict::Fail);
  CHECK(*fail.margin == doctest::Approx(-1.0).epsilon(1e-12));
  REQUIRE(fail.witness);
  CHECK((*fail.witness)["degrees"] == nlohmann::json::array({2, 0}));

  const std::vector<CMatrix> noncommuting = {kJordan, kJordan.adjoint()};
  CHECK(athavale_certificate(noncommuting, {1, 1}).verdict == Verdict::NotApplicable);
  CHECK_THROWS_AS(athavale_certificate(ns, {1, 1}), InputError);
}

TEST_CASE("brehmer_certificate examples") {
  const auto d = SemigroupDescriptor::free_abelian(3);
  std::mt19937_64 rng(3);
  const Representation t(d, 3, oracle::commuting_polynomial_family(rng, 3, 3));
  CHECK(brehmer_operator(t, {}) == CMatrix::identity(3));
  CHECK(brehmer_certificate(t, {}).passed());

  const auto unit = make_gallery("unitary_rep", GalleryParams{.dim = 3, .k = 3, .seed = 4});
  const auto& u = std::get<Representation>(unit);
  for (const std::vector<IndexKey>& keys : {std::vector<IndexKey>{{1, 0}}, std::vector<IndexKey>{{1, 0}, {3, 0}},
                                            std::vector<IndexKey>{{1, 0}, {2, 0}, {3, 0}}}) {
    CHECK(max_abs(brehmer_operator(u, keys)) <= 1e-12);
    const auto r = brehmer_certificate(u, keys);
    CHECK(r.passed());
    CHECK(std::abs(*r.margin) <= 1e-12);
  }

  const auto d4 = SemigroupDescriptor::free_abelian(4);
  const auto ns = make_commuting_normals(6, 3, 4);
  const Representation tn(d4, 3, ns);
  const std::vector<IndexKey> all = {{1, 0}, {2, 0}, {3, 0}, {4, 0}};
  CHECK(brehmer_certificate(tn, all).passed());
  CHECK(oracle::max_diff(brehmer_operator(tn, all), oracle::normal_product_formula(ns, {1, 1, 1, 1})) <= 1e-10);

  CHECK(brehmer_certificate(neil_representation(scalar(0.25), scalar(0.125)), {}).verdict ==
        Verdict::NotApplicable);
}

TEST_CASE("brehmer cap is enforced with the required budget") {
  const auto pw = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(1));
  const Representation t(pw, 1, {scalar(0.5)});
  std::vector<IndexKey> u;
  for (std::int64_t k = 1; k <= 17; ++k) u.push_back({1, k});
  try {
    brehmer_operator(t, u);
    FAIL("expected a budget refusal");
  } catch (const BudgetError& e) {
    CHECK(e.required() == (1ULL << 17));
  }
  u.pop_back();
  // Scalar 0.5 on 16 copies: sum_V (-1)^|V| 0.25^|V| = 0.75^16.
  CHECK(brehmer_operator(t, u)(0, 0).real() == doctest::Approx(std::pow(0.75, 16)).epsilon(1e-12));
}

TEST_CASE("brehmer is invariant under permutations of U") {
  const auto pw = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(2));
  std::mt19937_64 rng(7);
  const Representation t(pw, 3, oracle::commuting_polynomial_family(rng, 3, 2));
  std::vector<IndexKey> u = {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {2, 4}};
  const CMatrix ref = brehmer_operator(t, u);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(u.begin(), u.end(), rng);
    CHECK(max_abs_diff(brehmer_operator(t, u), ref) <= 1e-12);
  }
}

TEST_CASE("athavale_vs_brehmer examples") {
  std::mt19937_64 rng(8);
  const auto ts = oracle::commuting_polynomial_family(rng, 3, 2);
  const auto c = athavale_vs_brehmer(ts, {2, 1});
  CHECK(c.deviation <= 1e-10);

  const auto j = athavale_vs_brehmer({kJordan}, {2});
  CHECK(max_abs_diff(j.brehmer, diag({1.0, -1.0})) <= 1e-15);
  CHECK(max_abs_diff(j.athavale, diag({1.0, -1.0})) <= 1e-15);

  const auto e = athavale_vs_brehmer(ts, {0, 0});
  CHECK(e.brehmer == CMatrix::identity(3));
  CHECK(e.athavale == CMatrix::identity(3));
  CHECK_THROWS_AS(athavale_vs_brehmer(ts, {9, 8}), BudgetError);
}

TEST_CASE("sznagy_check examples") {
  const auto d = SemigroupDescriptor::free_abelian(2);
  const InvolutionPoint e{d.unit(), d.unit()};
  const Representation t(d, 3, make_commuting_normals(9, 3, 2));
  auto r = sznagy_check(t, SzNagyConfig{{e}, e, 1.0});
  CHECK(r.passed());
  CHECK(r.parameters["ii_margin"].get<double>() == doctest::Approx(1.0));
  CHECK(*r.margin == 0.0);

  SzNagyConfig cfg{{e, {z({1, 0}), z({0, 1})}, {z({0, 2}), z({1, 1})}, {z({2, 1}), d.unit()}},
                   {z({1, 0}), d.unit()},
                   1.0};
  r = sznagy_check(t, cfg);
  CHECK(r.passed());
  CHECK(r.scope.find("sampled") != std::string::npos);

  // A non-contractive image: 1.5 times a passing example.
  const auto ns = make_commuting_normals(10, 3, 2);
  std::vector<CMatrix> scaled = {ns[0] * Complex(1.5 / operator_norm(ns[0])), ns[1]};
  const Representation big(d, 3, scaled);
  r = sznagy_check(big, cfg);
  CHECK(r.verdict == Verdict::Fail);
  REQUIRE(r.witness);
  CHECK((*r.witness)["condition"] == "(iii)");

  CHECK_THROWS_AS(sznagy_check(t, SzNagyConfig{{e}, e, 0.0}), InputError);
  CHECK_THROWS_AS(sznagy_check(t, SzNagyConfig{{{z({-1, 0}), d.unit()}}, e, 1.0}), MembershipError);
}

TEST_CASE("regularity_check examples") {
  const auto d = SemigroupDescriptor::free_abelian(3);
  const auto unit = make_gallery("unitary_rep", GalleryParams{.dim = 2, .k = 3, .seed = 1});
  const auto& u = std::get<Representation>(unit);
  auto r = regularity_check(u, {d.unit(), z({2, 0, 0}), z({1, 0, 3})}, z({0, 1, 0}));
  CHECK(r.passed());
  CHECK(std::abs(*r.margin) <= 1e-12);

  std::mt19937_64 rng(11);
  const Representation t(d, 3, oracle::commuting_polynomial_family(rng, 3, 3));
  r = regularity_check(t, {d.unit()}, z({1, 2, 0}));
  CHECK(r.passed());

  // Diagonal unitaries are doubly commuting isometries.
  const auto d2 = SemigroupDescriptor::free_abelian(2);
  const Representation iso(d2, 2, {diag({Complex(0, 1), 1.0}), diag({-1.0, Complex(0, -1)})});
  CHECK(regularity_check(iso, {d2.unit(), z({3, 0})}, z({0, 2})).passed());

  r = regularity_check(t, {d.unit(), z({1, 0, 0})}, z({1, 1, 0}));
  CHECK(r.verdict == Verdict::NotApplicable);
  CHECK(r.parameters["offending_index"] == 2);

  CHECK_THROWS_AS(regularity_check(neil_representation(scalar(0.25), scalar(0.125)), {}, GroupElement::integer(2)),
                  UnsupportedError);
  CHECK_THROWS_AS(regularity_check(t, {d.unit()}, z({-1, 0, 0})), MembershipError);
}

TEST_CASE("extension_residual examples") {
  std::mt19937_64 rng(12);
  CMatrix up = oracle::gaussian(rng, 5, 5);
  for (std::size_t i = 2; i < 5; ++i)
    for (std::size_t j = 0; j < 2; ++j) up(i, j) = 0.0;
  auto e = extension_residual(up, 2);
  CHECK(e.hypothesis == 0.0);
  CHECK(e.invariance == 0.0);

  e = extension_residual(CMatrix::from_rows({{0.6, -0.8}, {0.8, 0.6}}), 1);
  CHECK(e.hypothesis == doctest::Approx(0.64).epsilon(1e-14));
  CHECK(e.invariance == doctest::Approx(0.64).epsilon(1e-14));

  for (int i = 0; i < 50; ++i) {
    const CMatrix n = oracle::gaussian(rng, 8, 8);
    e = extension_residual(n, 3);
    CHECK(std::abs(e.hypothesis - e.invariance) <= 1e-12 * std::max(1.0, e.invariance));
  }
  CHECK_THROWS_AS(extension_residual(up, 6), InputError);
}

TEST_CASE("generator_certificate examples") {
  const auto neil = neil_representation(scalar(0.25), scalar(0.125));
  auto r = generator_certificate(neil, 3);
  CHECK(r.passed());
  CHECK(r.scope.find("<= 3") != std::string::npos);
  CHECK(r.parameters["tuples_checked"] == degree_tuples(2, 3).size());

  const Representation j(SemigroupDescriptor::free_abelian(1), 2, {kJordan});
  r = generator_certificate(j, 6);
  CHECK(r.verdict == Verdict::Fail);
  REQUIRE(r.witness);
  CHECK((*r.witness)["degrees"] == nlohmann::json::array({2}));
  CHECK(*r.margin == doctest::Approx(-1.0));

  const Representation empty(SemigroupDescriptor::numerical({}), 2, {CMatrix::identity(2)});
  CHECK(generator_certificate(empty, 3).passed());
  const Representation none(SemigroupDescriptor::free_abelian(0), 2, {});
  r = generator_certificate(none, 3);
  CHECK(r.passed());
}

TEST_CASE("degree tuples are lexicographic and complete") {
  const auto t = degree_tuples(2, 2);
  const std::vector<DegreeTuple> expect = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}};
  CHECK(t == expect);
  CHECK(degree_tuples(3, 6).size() == 84);
  const auto t3 = degree_tuples(3, 4);
  CHECK(std::is_sorted(t3.begin(), t3.end()));
}

TEST_CASE("generator sweep degrades monotonically") {
  std::mt19937_64 rng(13);
  int failures = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto ts = oracle::commuting_polynomial_family(rng, 3, 2);
    const Representation t(SemigroupDescriptor::free_abelian(2), 3, ts);
    for (const auto& n : degree_tuples(2, 3)) {
      if (athavale_certificate(ts, n).verdict != Verdict::Fail) continue;
      ++failures;
      const std::uint32_t s = n[0] + n[1];
      for (std::uint32_t b = s; b <= 4; ++b) {
        const auto g = generator_certificate(t, b);
        REQUIRE(g.verdict == Verdict::Fail);
        const DegreeTuple w = (*g.witness)["degrees"].get<DegreeTuple>();
        CHECK(w <= n);
      }
      break;
    }
  }
  CHECK(failures > 0);
}
