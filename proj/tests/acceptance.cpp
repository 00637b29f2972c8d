// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Arguments: path to the normex executable, directory of the
// unit-test executables.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "normex/certificates.hpp"
#include "normex/constructions.hpp"
#include "normex/spec_io.hpp"
#include "oracles.hpp"

using namespace normex;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int shell(const std::string& cmd) {
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

DegreeTuple random_degrees(std::mt19937_64& rng, std::size_t m, std::uint32_t budget) {
  DegreeTuple n(m, 0);
  std::uint32_t left = std::uniform_int_distribution<std::uint32_t>(0, budget)(rng);
  for (std::size_t i = 0; i < m && left > 0; ++i) {
    const auto k = std::uniform_int_distribution<std::uint32_t>(0, left)(rng);
    n[i] = k;
    left -= k;
  }
  if (left > 0) n[m - 1] += left;
  std::shuffle(n.begin(), n.end(), rng);
  return n;
}

void athavale_brehmer() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int f = 0; f < 50; ++f) {
    const std::size_t m = 1 + rng() % 3, dim = 1 + rng() % 6;
    const auto ts = oracle::commuting_polynomial_family(rng, dim, m);
    const auto n = random_degrees(rng, m, 6);
    worst = std::max(worst, athavale_vs_brehmer(ts, n).deviation);
  }
  const double secs = seconds_since(t0);
  report(worst <= 1e-10 && secs < 30.0, "athavale_equals_brehmer",
         fmt("50 families, max deviation %.3e (tol 1e-10), %.2f s (limit 30 s)", worst, secs));
}

void normal_closed_form() {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  bool all_pass = true;
  for (int f = 0; f < 50; ++f) {
    const std::size_t m = 1 + rng() % 3, dim = 1 + rng() % 6;
    const auto ns = make_commuting_normals(rng(), dim, m);
    const auto n = random_degrees(rng, m, 6);
    worst = std::max(worst, oracle::max_diff(athavale_operator(ns, n), oracle::normal_product_formula(ns, n)));

    const auto d = SemigroupDescriptor::free_abelian(m);
    const Representation t(d, dim, ns);
    std::vector<IndexKey> all;
    for (std::size_t i = 1; i <= m; ++i) all.push_back({i, 0});
    SzNagyConfig cfg;
    cfg.sample_points.push_back({d.unit(), d.unit()});
    for (int i = 0; i < 4; ++i) cfg.sample_points.push_back({sample_positive(d, rng), sample_positive(d, rng)});
    cfg.bound_element = {sample_positive(d, rng), sample_positive(d, rng)};
    std::vector<GroupElement> ps = {d.unit()};
    const auto g = d.unit();
    ps.push_back(sample_positive(d, rng));
    const std::vector<CertificateReport> reps = {
        athavale_certificate(ns, n),        generator_certificate(t, 4), brehmer_certificate(t, all),
        sznagy_check(t, cfg),               regularity_check(t, ps, g),  agler_certificate(ns[0], n[0])};
    for (const auto& r : reps) all_pass = all_pass && r.passed();
  }
  report(worst <= 1e-9 && all_pass, "normal_tuple_closed_form",
         fmt("50 families, max |athavale op - prod(I-N*N)^n| %.3e (tol 1e-9), all certificates pass: ", worst) +
             (all_pass ? "yes" : "no"));
}

void jordan_failure() {
  const CMatrix j = CMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  const auto a = agler_certificate(j, 2);
  const Representation t(SemigroupDescriptor::free_abelian(1), 2, {j});
  const auto g1 = generator_certificate(t, 6), g2 = generator_certificate(t, 6);
  const bool witness_ok = g1.verdict == Verdict::Fail && g1.witness && (*g1.witness)["degrees"] == nlohmann::json::array({2}) &&
                          to_json(g1) == to_json(g2);
  const double err = a.margin ? std::abs(*a.margin + 1.0) : 1.0;
  report(a.verdict == Verdict::Fail && err <= 1e-12 && witness_ok, "jordan_failure",
         fmt("agler margin %.17g (expect -1 +- 1e-12); sweep witness ", a.margin.value_or(NAN)) +
             (g1.witness ? g1.witness->dump() : "none") + " on both runs");
}

void isometric_vanishing() {
  double worst = 0.0;
  int sums = 0;
  for (std::size_t k = 1; k <= 4; ++k) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto u = std::get<Representation>(make_gallery("unitary_rep", GalleryParams{.dim = 3, .k = k, .seed = seed}));
      for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        std::vector<IndexKey> keys;
        for (std::size_t i = 0; i < k; ++i)
          if (mask & (1u << i)) keys.push_back({i + 1, 0});
        worst = std::max(worst, max_abs(brehmer_operator(u, keys)));
        ++sums;
      }
    }
  }
  report(worst <= 1e-12, "isometric_vanishing", fmt("%g Brehmer sums over N^k, k <= 4, max entry %.3e (tol 1e-12)", double(sums), worst));
}

void extension_identity() {
  std::mt19937_64 rng(1005);
  double worst = 0.0, worst_tri = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t dim = 1 + rng() % 12, k = rng() % (dim + 1);
    CMatrix n = oracle::gaussian(rng, dim, dim);
    const auto e = extension_residual(n, k);
    worst = std::max(worst, std::abs(e.hypothesis - e.invariance));
    for (std::size_t r = k; r < dim; ++r)
      for (std::size_t c = 0; c < k; ++c) n(r, c) = 0.0;
    const auto t = extension_residual(n, k);
    worst_tri = std::max({worst_tri, t.hypothesis, t.invariance});
  }
  report(worst <= 1e-12 && worst_tri <= 1e-14, "extension_identity",
         fmt("200 Gaussian matrices, max |hyp - inv| %.3e (tol 1e-12), block-upper max %.3e (tol 1e-14)", worst, worst_tri));
}

void fuglede() {
  std::mt19937_64 rng(1006);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t dim = 1 + rng() % 16;
    const auto ns = make_commuting_normals(rng(), dim, 2);
    worst = std::max(worst, commutator_norm(ns[0], ns[1].adjoint()));
  }
  report(worst <= 1e-9, "fuglede_property", fmt("100 pairs, dim <= 16, max ||NM* - M*N|| %.3e (tol 1e-9)", worst));
}

void sznagy_positivity() {
  std::mt19937_64 rng(1007);
  double worst_ii = INFINITY, worst_iii = INFINITY;
  bool ok = true;
  for (int f = 0; f < 30; ++f) {
    const std::size_t m = 1 + rng() % 3, dim = 1 + rng() % 5;
    const auto d = SemigroupDescriptor::free_abelian(m);
    const Representation t(d, dim, make_commuting_normals(rng(), dim, m));
    SzNagyConfig cfg;
    const std::size_t n = 1 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) cfg.sample_points.push_back({sample_positive(d, rng), sample_positive(d, rng)});
    cfg.bound_element = {sample_positive(d, rng), sample_positive(d, rng)};
    cfg.bound_constant = 1.0;
    const auto r = sznagy_check(t, cfg);
    worst_ii = std::min(worst_ii, r.parameters["ii_margin"].get<double>());
    worst_iii = std::min(worst_iii, r.parameters["iii_margin"].get<double>());
    ok = ok && r.passed();
  }
  report(ok && worst_ii >= -1e-9 && worst_iii >= -1e-9, "sznagy_kernel_positivity",
         fmt("30 reps, n <= 5 points, min (ii) margin %.3e, min (iii) margin %.3e with C=1 (floor -1e-9)", worst_ii,
             worst_iii));
}

void convex_bound() {
  std::mt19937_64 rng(1008);
  double slack = -INFINITY, corner = 0.0, uniform_ulps = 0.0;
  bool valid = true;
  for (int f = 0; f < 40; ++f) {
    const std::size_t h = 1 + rng() % 4, members = 1 + rng() % 8;
    CMatrix t = oracle::gaussian(rng, h, h);
    t *= Complex(std::uniform_real_distribution<double>(0.1, 1.0)(rng) / operator_norm(t));
    const auto fam = make_orthogonal_defect_family(t, members);
    valid = valid && validate_dilation_family(fam).valid();
    for (int w = 0; w < 10; ++w) {
      std::vector<double> lambda(members);
      double s = 0.0;
      for (auto& x : lambda) s += (x = std::exponential_distribution<double>(1.0)(rng));
      for (auto& x : lambda) x /= s;
      double head = 0.0;
      for (std::size_t i = 0; i + 1 < members; ++i) head += lambda[i];
      lambda.back() = std::max(0.0, 1.0 - head);
      const auto avg = convex_average(fam, ConvexWeights(lambda));
      slack = std::max(slack, avg.defect_norm - avg.weight_norm);
      corner = std::max(corner, max_abs_diff(avg.average.block(h, h, h, h), t));
    }
    const auto avg = convex_average(fam, ConvexWeights::uniform(members));
    const double expect = 1.0 / std::sqrt(static_cast<double>(members));
    uniform_ulps = std::max(uniform_ulps, std::abs(avg.weight_norm - expect) / (std::nextafter(expect, 2.0) - expect));
  }
  report(valid && slack <= 1e-10 && corner <= 1e-12 && uniform_ulps <= 2.0, "convex_averaging_bound",
         fmt("max ||D|| - ||w||_2 = %.3e (tol 1e-10), corner drift %.3e (tol 1e-12), uniform weights within %.0f ulp of "
             "1/sqrt(n)",
             slack, corner, uniform_ulps));
}

void kolmogorov() {
  std::mt19937_64 rng(1009);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + rng() % 6, b = 1 + rng() % 8, inner = 1 + rng() % 10;
    std::vector<CMatrix> ws;
    for (std::size_t i = 0; i < n; ++i) ws.push_back(oracle::gaussian(rng, inner, b));
    std::vector<std::vector<CMatrix>> grid(n, std::vector<CMatrix>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) grid[i][j] = oracle::naive_mul(oracle::naive_adj(ws[i]), ws[j]);
    const double scale = std::max(1.0, operator_norm(block_assemble(grid)));
    const auto vs = kolmogorov_factor(grid);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, max_abs_diff(adjoint_times(vs[i], vs[j]), grid[i][j]) / scale);
  }
  report(worst <= 1e-9, "kolmogorov_roundtrip", fmt("100 Gram kernels, max residual / max(1,||K||) %.3e (tol 1e-9)", worst));
}

void cli_contract(const std::string& exe) {
  const fs::path dir = fs::temp_directory_path() / ("normex_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto neil = put("neil.json", R"({"descriptor": {"kind": "numerical", "gaps": [1]},
    "representation": {"dimension": 1, "generators": {"2": [[[0.25, 0]]], "3": [[[0.125, 0]]]},
                       "relations": [[{"2": 3}, {"3": 2}]]}})");
  const auto bad = put("bad.json", R"({"descriptor": {"kind": "free_abelian", "rank": 1},
    "representation": {"dimension": 2, "generators": [[[[1, 0], [0, 0]]]]}})");
  const std::string quiet = " >/dev/null 2>&1";
  shell(exe + " gallery jordan --dim 2 --out " + (dir / "jordan.json").string() + quiet);
  shell(exe + " gallery normal_pair --dim 4 --seed 3 --out " + (dir / "pair.json").string() + quiet);
  const auto jordan = (dir / "jordan.json").string(), pair = (dir / "pair.json").string();

  bool same = true;
  for (const auto& input : {neil, jordan, pair}) {
    const auto a = (dir / "a.json").string(), b = (dir / "b.json").string();
    shell(exe + " check all --seed 5 --input " + input + " --out " + a + quiet);
    shell(exe + " check all --seed 5 --input " + input + " --out " + b + quiet);
    same = same && !slurp(a).empty() && slurp(a) == slurp(b);
  }

  struct Case {
    std::string args;
    int code;
  };
  const std::vector<Case> matrix = {
      {"check athavale --max-degree 3 --input " + neil, 0},
      {"check all --input " + pair, 0},
      {"check athavale --max-degree 2 --input " + jordan, 1},
      {"check all --input " + jordan, 1},
      {"check athavale --input " + bad, 2},
      {"check extension --input " + neil, 2},
      {"check athavale --input " + neil + " --out /nonexistent/x.json", 2},
      {"frobnicate", 2},
      {"gallery jordan --dim 2", 0},
  };
  int mismatches = 0;
  for (const auto& c : matrix)
    if (shell(exe + " " + c.args + quiet) != c.code) ++mismatches;
  fs::remove_all(dir);
  const std::string detail = std::string("3 inputs byte-identical across runs: ") + (same ? "yes" : "no") +
                             "; exit codes matching: " + std::to_string(matrix.size() - mismatches) + "/" +
                             std::to_string(matrix.size());
  report(same && mismatches == 0, "determinism_and_cli_contract", detail);
}

void timing(const fs::path& test_dir, Clock::time_point start) {
  const auto pw = SemigroupDescriptor::infinite_power(SemigroupDescriptor::free_abelian(2));
  std::mt19937_64 rng(1010);
  const Representation t(pw, 8, make_commuting_normals(4, 8, 2));
  std::vector<IndexKey> u;
  for (std::size_t c = 1; c <= 2; ++c)
    for (std::int64_t k = 1; k <= 8; ++k) u.push_back({c, k});
  const auto t0 = Clock::now();
  const auto r = brehmer_certificate(t, u);
  const double brehmer = seconds_since(t0);

  double units = 0.0;
  bool units_ok = true;
  if (!test_dir.empty()) {
    const auto t1 = Clock::now();
    for (const char* name : {"test_semigroup", "test_linalg", "test_representation", "test_certificates",
                             "test_constructions", "test_cli"})
      units_ok = units_ok && shell((test_dir / name).string() + " >/dev/null 2>&1") == 0;
    units = seconds_since(t1);
  }
  const double total = seconds_since(start);
  report(r.verdict != Verdict::NotApplicable && brehmer < 10.0 && total < 120.0 && units_ok, "timing",
         fmt("Brehmer |U|=16 on dim 8: %.2f s (limit 10 s); unit suites %.2f s + acceptance = %.2f s (limit 120 s)",
             brehmer, units, total));
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = Clock::now();
  const std::string exe = argc > 1 ? argv[1] : "";
  const fs::path test_dir = argc > 2 ? fs::path(argv[2]) : fs::path(argv[0]).parent_path();

  athavale_brehmer();
  normal_closed_form();
  jordan_failure();
  isometric_vanishing();
  extension_identity();
  fuglede();
  sznagy_positivity();
  convex_bound();
  kolmogorov();
  if (exe.empty())
    report(false, "determinism_and_cli_contract", "no executable given");
  else
    cli_contract(exe);
  timing(test_dir, start);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
