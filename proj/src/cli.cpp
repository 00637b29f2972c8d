#include "normex/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "normex/constructions.hpp"
#include "normex/errors.hpp"
#include "normex/spec_io.hpp"

namespace normex {

using nlohmann::json;

int RunReport::exit_status() const {
  if (reports.empty()) return kExitInputError;
  for (const auto& r : reports)
    if (r.verdict == Verdict::Fail) return kExitCertificateFailed;
  return kExitPass;
}

json RunReport::to_json() const {
  json reps = json::array();
  for (const auto& r : reports) reps.push_back(normex::to_json(r));
  return {{"reports", reps},
          {"environment", environment},
          {"validation", validation},
          {"exit_status", exit_status()}};
}

std::string render_report(const RunReport& r, ReportFormat format) {
  if (format == ReportFormat::Machine) return dump_deterministic(r.to_json());
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-20s %-15s %-14s %s\n", "condition", "verdict", "margin", "witness");
  os << line;
  for (const auto& rep : r.reports) {
    char margin[32] = "-";
    if (rep.margin) std::snprintf(margin, sizeof margin, "%.6e", *rep.margin);
    const std::string witness = rep.witness ? rep.witness->dump() : "-";
    std::snprintf(line, sizeof line, "%-20s %-15s %-14s %s\n", rep.condition.c_str(), to_string(rep.verdict).c_str(),
                  margin, witness.c_str());
    os << line;
    if (!rep.scope.empty()) os << "    scope: " << rep.scope << "\n";
    if (!rep.note.empty()) os << "    note: " << rep.note << "\n";
  }
  if (auto it = r.environment.find("warnings"); it != r.environment.end())
    for (const auto& w : *it) os << "warning: " << w.get<std::string>() << "\n";
  os << "exit status: " << r.exit_status() << "\n";
  return os.str();
}

void emit_report(const RunReport& r, ReportFormat format, std::ostream& out, const std::string& path) {
  if (!path.empty()) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write report to '" + path + "'");
    f << render_report(r, ReportFormat::Machine);
    if (!f) throw InputError("cannot write report to '" + path + "'");
  }
  out << render_report(r, format);
}

namespace {

const std::vector<std::string> kConditions = {"athavale", "brehmer", "regular", "sznagy", "extension"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(what + ": '" + s + "' is not an integer");
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(what + ": '" + s + "' is not a number");
}

/// "1,2" for N^k coordinates, "1:1,2:1" for coordinate:copy pairs.
std::vector<IndexKey> parse_subset_flag(const SemigroupDescriptor& d, const std::string& text) {
  std::vector<IndexKey> keys;
  for (const auto& tok : split(text, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      if (d.kind() == SemigroupKind::InfinitePower) throw InputError("--subset: expected coordinate:copy, got '" + tok + "'");
      const auto c = parse_int(tok, "--subset");
      if (c < 1) throw InputError("--subset: coordinates are 1-based");
      keys.push_back({static_cast<std::size_t>(c), 0});
    } else {
      if (d.kind() != SemigroupKind::InfinitePower) throw InputError("--subset: copy indices need a power descriptor");
      const auto c = parse_int(tok.substr(0, colon), "--subset");
      const auto k = parse_int(tok.substr(colon + 1), "--subset");
      if (c < 1) throw InputError("--subset: coordinates are 1-based");
      keys.push_back({static_cast<std::size_t>(c), k});
    }
  }
  return keys;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const RunConfig& run) {
  if (flag) return *flag;
  if (run.seed) return *run.seed;
  if (const char* env = std::getenv("NORMEX_SEED"); env && *env) {
    const auto v = parse_int(env, "NORMEX_SEED");
    if (v < 0) throw InputError("NORMEX_SEED must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  return 0;
}

std::vector<IndexKey> default_subset(const SemigroupDescriptor& d) {
  std::vector<IndexKey> keys;
  if (d.kind() == SemigroupKind::FreeAbelian) {
    for (std::size_t i = 1; i <= d.rank(); ++i) keys.push_back({i, 0});
  } else if (d.kind() == SemigroupKind::InfinitePower && d.base().kind() == SemigroupKind::FreeAbelian) {
    for (std::size_t i = 1; i <= d.base().rank(); ++i) keys.push_back({i, 1});
  }
  return keys;
}

SzNagyConfig default_sznagy(const SemigroupDescriptor& d, std::mt19937_64& rng) {
  SzNagyConfig cfg;
  cfg.sample_points.push_back({d.unit(), d.unit()});
  for (int i = 0; i < 3; ++i) cfg.sample_points.push_back({sample_positive(d, rng), sample_positive(d, rng)});
  cfg.bound_element = {sample_positive(d, rng), sample_positive(d, rng)};
  return cfg;
}

RegularConfig default_regular(const SemigroupDescriptor& d, std::mt19937_64& rng) {
  RegularConfig cfg;
  cfg.g = sample_positive(d, rng);
  cfg.ps.push_back(d.unit());
  for (int attempt = 0; attempt < 64 && cfg.ps.size() < 4; ++attempt) {
    auto p = sample_positive(d, rng);
    if (p.is_unit()) continue;
    if (std::find(cfg.ps.begin(), cfg.ps.end(), p) != cfg.ps.end()) continue;
    if (meet_join(d, cfg.g, p).meet.is_unit()) cfg.ps.push_back(std::move(p));
  }
  return cfg;
}

CertificateReport not_lattice_report(const SemigroupDescriptor& d) {
  CertificateReport r;
  r.condition = "regular";
  r.verdict = Verdict::NotApplicable;
  r.note = d.name() + " is not lattice ordered, so positive and negative parts are undefined";
  return r;
}

CertificateReport extension_report(const ExtensionSpec& e, double tol) {
  const auto res = extension_residual(e.matrix, e.subspace_dim);
  CertificateReport r;
  r.condition = "extension";
  r.parameters = {{"subspace_dim", e.subspace_dim}, {"dimension", e.matrix.rows()}};
  r.tolerances = {{"tol", tol}};
  const double normality = normality_residual(e.matrix);
  const double worst = std::max({res.hypothesis, normality});
  r.margin = -worst;
  r.verdict = worst <= tol ? Verdict::Pass : Verdict::Fail;
  r.parameters["hypothesis_residual"] = res.hypothesis;
  r.parameters["invariance_residual"] = res.invariance;
  r.parameters["normality_residual"] = normality;
  if (r.verdict == Verdict::Fail)
    r.witness = json{{"check", res.hypothesis > tol ? "invariance" : "normality"}, {"residual", worst}};
  return r;
}

CertificateReport normal_map_report(const Representation& t, const NormalMapSpec& spec, double tol) {
  NormalMap nm{t, spec.ambient_dim, spec.images};
  const auto v = validate_normal_map(nm, tol);
  CertificateReport r;
  r.condition = "extension";
  r.parameters = {{"ambient_dim", spec.ambient_dim}, {"elements", spec.images.size()}};
  r.tolerances = {{"tol", tol}};
  json checks = json::object();
  double worst = 0.0;
  for (const auto& c : v.checks) {
    checks[c.name] = {{"ok", c.ok}, {"residual", c.residual}, {"gating", c.gating}};
    if (c.gating) worst = std::max(worst, c.residual);
  }
  r.parameters["checks"] = checks;
  r.margin = -worst;
  r.scope = "enumerated elements only";
  r.verdict = v.valid() ? Verdict::Pass : Verdict::Fail;
  if (const Check* f = v.first_failure())
    r.witness = json{{"check", f->name}, {"residual", f->residual}, {"detail", f->detail}};
  return r;
}

struct CheckOptions {
  std::string condition;
  std::string input;
  std::optional<std::uint32_t> max_degree;
  std::string subset;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string format = "human";
  std::string out;
};

RunReport run_checks(const CheckOptions& o, std::vector<std::string>& skipped) {
  auto spec = parse_spec(o.input);
  auto& run = spec.run;
  const auto& d = spec.descriptor;
  const auto& t = spec.representation;
  if (o.max_degree) run.max_degree = *o.max_degree;
  if (!o.subset.empty()) run.subset = parse_subset_flag(d, o.subset);
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw InputError("--tol must be positive");
    run.tol = *o.tol;
  }
  const std::uint64_t seed = resolve_seed(o.seed, run);
  std::mt19937_64 rng(seed);

  std::vector<std::string> conditions;
  if (o.condition == "all")
    conditions = run.conditions.empty() ? kConditions : run.conditions;
  else
    conditions = {o.condition};

  RunReport report;
  report.validation = run.validation;
  const auto subset = run.subset.value_or(default_subset(d));
  for (const auto& c : conditions) {
    if (c == "athavale") {
      report.reports.push_back(generator_certificate(t, run.max_degree, run.tol));
    } else if (c == "brehmer") {
      report.reports.push_back(brehmer_certificate(t, subset, run.tol));
    } else if (c == "regular") {
      if (!d.lattice_ordered()) {
        report.reports.push_back(not_lattice_report(d));
        continue;
      }
      const auto cfg = run.regular ? *run.regular : default_regular(d, rng);
      report.reports.push_back(regularity_check(t, cfg.ps, cfg.g, run.tol));
    } else if (c == "sznagy") {
      const auto cfg = run.sznagy ? *run.sznagy : default_sznagy(d, rng);
      report.reports.push_back(sznagy_check(t, cfg, run.tol));
    } else if (c == "extension") {
      if (run.normal_map) {
        report.reports.push_back(normal_map_report(t, *run.normal_map, run.tol));
      } else if (run.extension) {
        report.reports.push_back(extension_report(*run.extension, run.tol));
      } else if (o.condition == "all") {
        skipped.push_back("extension skipped: the input has no normal_map or extension section");
      } else {
        throw InputError(o.input + ": check extension needs a run.normal_map or run.extension section");
      }
    } else {
      throw InputError(o.input + ": unknown condition '" + c + "' in run.conditions");
    }
  }

  std::vector<std::string> warnings = run.warnings;
  warnings.insert(warnings.end(), skipped.begin(), skipped.end());
  report.environment = {{"version", kVersion},
                        {"seed", seed},
                        {"tol", run.tol},
                        {"max_degree", run.max_degree},
                        {"subset_cap", kDefaultSubsetCap},
                        {"psd_rel_tol_default", kDefaultPsdRelTol},
                        {"conditions", conditions},
                        {"input", o.input},
                        {"warnings", warnings}};
  return report;
}

std::vector<std::vector<double>> parse_angles(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ';')) {
    std::vector<double> values;
    for (const auto& v : split(row, ',')) values.push_back(parse_double(v, "--angles"));
    rows.push_back(std::move(values));
  }
  return rows;
}

ReportFormat parse_format(const std::string& f) { return f == "machine" ? ReportFormat::Machine : ReportFormat::Human; }

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certificates for normal extensions and regular dilations of semigroup representations", "normex"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kVersion));

  CheckOptions chk;
  auto* check = app.add_subcommand("check", "run certificate checks on an input document");
  check->add_option("condition", chk.condition, "athavale, brehmer, regular, sznagy, extension or all")
      ->required()
      ->check(CLI::IsMember({"athavale", "brehmer", "regular", "sznagy", "extension", "all"}));
  check->add_option("--input", chk.input, "input JSON document")->required();
  check->add_option("--max-degree", chk.max_degree, "degree bound for the Athavale sweep");
  check->add_option("--subset", chk.subset, "Brehmer index set, e.g. 1,2 or 1:1,1:2");
  check->add_option("--tol", chk.tol, "residual tolerance");
  check->add_option("--seed", chk.seed, "seed for sampled conditions (falls back to NORMEX_SEED)");
  check->add_option("--format", chk.format, "human or machine")->check(CLI::IsMember({"human", "machine"}));
  check->add_option("--out", chk.out, "write the machine report to this path");

  std::string gname;
  GalleryParams gp;
  std::string weights, angles, matrix_text, gformat = "machine", gout;
  std::optional<std::uint64_t> gseed;
  auto* gallery = app.add_subcommand("gallery", "emit a named example as an input document");
  gallery->add_option("name", gname, "gallery case")->required()->check(CLI::IsMember(gallery_names()));
  gallery->add_option("--dim", gp.dim, "dimension");
  gallery->add_option("--weights", weights, "comma-separated shift weights");
  gallery->add_option("--lambda", gp.lambda, "scalar for neil_scalar");
  gallery->add_option("--k", gp.k, "number of generators for unitary_rep");
  gallery->add_option("--angles", angles, "phases, rows separated by ';'");
  gallery->add_option("--seed", gseed, "seed for random cases");
  gallery->add_option("--matrix", matrix_text, "JSON matrix for neil_matrix");
  gallery->add_option("--format", gformat, "human or machine")->check(CLI::IsMember({"human", "machine"}));
  gallery->add_option("--out", gout, "also write the document to this path");

  std::string vinput;
  auto* validate = app.add_subcommand("validate", "parse and validate an input document");
  validate->add_option("--input", vinput, "input JSON document")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInputError;
  }

  try {
    if (check->parsed()) {
      std::vector<std::string> skipped;
      const auto report = run_checks(chk, skipped);
      if (report.reports.empty()) {
        err << "error: no certificate ran\n";
        return kExitInputError;
      }
      emit_report(report, parse_format(chk.format), out, chk.out);
      return report.exit_status();
    }
    if (gallery->parsed()) {
      if (!weights.empty())
        for (const auto& w : split(weights, ',')) gp.weights.push_back(parse_double(w, "--weights"));
      if (!angles.empty()) gp.angles = parse_angles(angles);
      if (!matrix_text.empty()) {
        json m;
        try {
          m = json::parse(matrix_text);
        } catch (const json::parse_error& e) {
          throw InputError(std::string("--matrix: ") + e.what());
        }
        gp.matrix = matrix_from_json(m, "--matrix");
      }
      if (gseed) {
        gp.seed = *gseed;
      } else {
        RunConfig none;
        gp.seed = resolve_seed(std::nullopt, none);
      }
      const auto item = make_gallery(gname, gp);
      const Representation rep =
          std::holds_alternative<Representation>(item)
              ? std::get<Representation>(item)
              : Representation(SemigroupDescriptor::free_abelian(1), std::get<CMatrix>(item).rows(),
                               {std::get<CMatrix>(item)});
      const std::string doc = dump_deterministic(spec_document(rep));
      if (!gout.empty()) {
        std::ofstream f(gout, std::ios::binary | std::ios::trunc);
        if (!f || !(f << doc)) throw InputError("cannot write document to '" + gout + "'");
      }
      if (gformat == "human") {
        out << gname << " on " << rep.descriptor().name() << ", dimension " << rep.dimension() << "\n";
        for (std::size_t i = 0; i < rep.generator_images().size(); ++i) {
          out << "T(" << rep.generating_descriptor().generator_label(i) << ") =\n";
          const auto& m = rep.generator_images()[i];
          for (std::size_t r = 0; r < m.rows(); ++r) {
            out << " ";
            for (std::size_t c = 0; c < m.cols(); ++c) {
              char cell[64];
              std::snprintf(cell, sizeof cell, " %+.6f%+.6fi", m(r, c).real(), m(r, c).imag());
              out << cell;
            }
            out << "\n";
          }
        }
      } else {
        out << doc;
      }
      return kExitPass;
    }
    if (validate->parsed()) {
      const auto spec = parse_spec(vinput);
      out << "valid: " << spec.descriptor.name() << ", dimension " << spec.representation.dimension() << "\n";
      out << dump_deterministic(spec.run.validation);
      for (const auto& w : spec.run.warnings) out << "warning: " << w << "\n";
      return kExitPass;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  err << app.help();
  return kExitInputError;
}

}  // namespace normex
