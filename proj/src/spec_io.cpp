#include "normex/spec_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace normex {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw InputError(path + ": " + what); }

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t as_count(const json& j, const std::string& path) {
  const auto v = as_int(j, path);
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

}  // namespace

// --- descriptors and elements -----------------------------------------------

SemigroupDescriptor descriptor_from_json(const json& j, const std::string& path) {
  const auto& kind_j = field(j, "kind", path);
  if (!kind_j.is_string()) fail(path + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  try {
    if (kind == "free_abelian") return SemigroupDescriptor::free_abelian(as_count(field(j, "rank", path), path + ".rank"));
    if (kind == "numerical") {
      std::set<std::int64_t> gaps;
      if (auto it = j.find("gaps"); it != j.end()) {
        const auto& arr = as_array(*it, path + ".gaps");
        for (std::size_t i = 0; i < arr.size(); ++i) gaps.insert(as_int(arr[i], at(path + ".gaps", i)));
      }
      return SemigroupDescriptor::numerical(std::move(gaps));
    }
    if (kind == "rationals") return SemigroupDescriptor::rationals();
    if (kind == "product") {
      const auto& arr = as_array(field(j, "factors", path), path + ".factors");
      std::vector<SemigroupDescriptor> factors;
      for (std::size_t i = 0; i < arr.size(); ++i) factors.push_back(descriptor_from_json(arr[i], at(path + ".factors", i)));
      return SemigroupDescriptor::product(std::move(factors));
    }
    if (kind == "infinite_power")
      return SemigroupDescriptor::infinite_power(descriptor_from_json(field(j, "base", path), path + ".base"));
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    fail(path, what);
  }
  fail(path + ".kind", "unknown semigroup kind '" + kind + "'");
}

json descriptor_to_json(const SemigroupDescriptor& d) {
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
      return {{"kind", "free_abelian"}, {"rank", d.rank()}};
    case SemigroupKind::Numerical:
      return {{"kind", "numerical"}, {"gaps", d.gaps()}};
    case SemigroupKind::Rationals:
      return {{"kind", "rationals"}};
    case SemigroupKind::Product: {
      json factors = json::array();
      for (const auto& f : d.factors()) factors.push_back(descriptor_to_json(f));
      return {{"kind", "product"}, {"factors", factors}};
    }
    case SemigroupKind::InfinitePower:
      return {{"kind", "infinite_power"}, {"base", descriptor_to_json(d.base())}};
  }
  return {};
}

GroupElement element_from_json(const SemigroupDescriptor& d, const json& j, const std::string& path) {
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian: {
      const auto& arr = as_array(j, path);
      if (arr.size() != d.rank()) fail(path, "expected " + std::to_string(d.rank()) + " coordinates");
      GroupElement::Ints coords;
      for (std::size_t i = 0; i < arr.size(); ++i) coords.push_back(as_int(arr[i], at(path, i)));
      return GroupElement::ints(std::move(coords));
    }
    case SemigroupKind::Numerical:
      return GroupElement::integer(as_int(j, path));
    case SemigroupKind::Rationals:
      if (j.is_number_integer()) return GroupElement::rational(Rational(j.get<std::int64_t>()));
      if (!j.is_string()) fail(path, "expected a rational as \"p/q\" or an integer");
      try {
        return GroupElement::rational(Rational::parse(j.get<std::string>()));
      } catch (const InputError& e) {
        fail(path, e.what());
      }
    case SemigroupKind::Product: {
      const auto& arr = as_array(j, path);
      if (arr.size() != d.factors().size()) fail(path, "expected " + std::to_string(d.factors().size()) + " parts");
      GroupElement::Parts parts;
      for (std::size_t i = 0; i < arr.size(); ++i) parts.push_back(element_from_json(d.factors()[i], arr[i], at(path, i)));
      return GroupElement::parts(std::move(parts));
    }
    case SemigroupKind::InfinitePower: {
      if (!j.is_object()) fail(path, "expected an object mapping copy index to element");
      GroupElement::Support entries;
      for (const auto& [key, value] : j.items()) {
        std::int64_t idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoll(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          fail(path, "copy index '" + key + "' is not an integer");
        }
        entries.emplace_back(idx, element_from_json(d.base(), value, path + "." + key));
      }
      try {
        return GroupElement::support(std::move(entries));
      } catch (const InputError& e) {
        fail(path, e.what());
      }
    }
  }
  fail(path, "unsupported descriptor");
}

json element_to_json(const SemigroupDescriptor& d, const GroupElement& g) {
  check_compatible(d, g);
  switch (d.kind()) {
    case SemigroupKind::FreeAbelian:
      return g.as_ints();
    case SemigroupKind::Numerical:
      return g.as_ints()[0];
    case SemigroupKind::Rationals:
      return g.as_rational().to_string();
    case SemigroupKind::Product: {
      json arr = json::array();
      for (std::size_t i = 0; i < d.factors().size(); ++i) arr.push_back(element_to_json(d.factors()[i], g.as_parts()[i]));
      return arr;
    }
    case SemigroupKind::InfinitePower: {
      json obj = json::object();
      for (const auto& [idx, part] : g.as_support()) obj[std::to_string(idx)] = element_to_json(d.base(), part);
      return obj;
    }
  }
  return {};
}

CMatrix matrix_from_json(const json& j, const std::string& path) {
  const auto& rows = as_array(j, path);
  std::vector<std::vector<Complex>> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = as_array(rows[r], at(path, r));
    std::vector<Complex> values;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& entry = row[c];
      const std::string where = at(at(path, r), c);
      if (entry.is_number()) {
        values.emplace_back(entry.get<double>(), 0.0);
      } else if (entry.is_array() && entry.size() == 2) {
        values.emplace_back(as_double(entry[0], where + "[0]"), as_double(entry[1], where + "[1]"));
      } else {
        fail(where, "expected a complex entry [re, im]");
      }
    }
    out.push_back(std::move(values));
  }
  try {
    return CMatrix::from_rows(out);
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<IndexKey> subset_from_json(const SemigroupDescriptor& d, const json& j, const std::string& path) {
  const auto& arr = as_array(j, path);
  std::vector<IndexKey> keys;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (d.kind() == SemigroupKind::InfinitePower) {
      const auto& pair = as_array(arr[i], at(path, i));
      if (pair.size() != 2) fail(at(path, i), "expected [coordinate, copy]");
      keys.push_back({static_cast<std::size_t>(as_count(pair[0], at(path, i) + "[0]")), as_int(pair[1], at(path, i) + "[1]")});
    } else {
      keys.push_back({static_cast<std::size_t>(as_count(arr[i], at(path, i))), 0});
    }
  }
  return keys;
}

// --- representation ---------------------------------------------------------

namespace {

Factorization factorization_from_json(const SemigroupDescriptor& gd, const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object mapping generator label to multiplicity");
  Factorization f;
  for (const auto& [label, mult] : j.items()) {
    auto idx = gd.generator_index(label);
    if (!idx) fail(path, "unknown generator label '" + label + "'");
    const auto m = as_count(mult, path + "." + label);
    if (m > 0) f.terms[*idx] = m;
  }
  return f;
}

json factorization_to_json(const SemigroupDescriptor& gd, const Factorization& f) {
  json obj = json::object();
  for (const auto& [idx, mult] : f.terms) obj[gd.generator_label(idx)] = mult;
  return obj;
}

Representation representation_from_json(const SemigroupDescriptor& d, const json& j, const std::string& path,
                                         std::vector<std::string>& warnings) {
  const std::size_t dim = as_count(field(j, "dimension", path), path + ".dimension");
  const auto& gd = d.kind() == SemigroupKind::InfinitePower ? d.base() : d;
  const auto& gens = field(j, "generators", path);
  std::vector<CMatrix> images;
  if (gens.is_array()) {
    for (std::size_t i = 0; i < gens.size(); ++i) images.push_back(matrix_from_json(gens[i], at(path + ".generators", i)));
  } else if (gens.is_object()) {
    images.resize(gd.generators().size());
    std::vector<bool> seen(images.size(), false);
    for (const auto& [label, m] : gens.items()) {
      auto idx = gd.generator_index(label);
      if (!idx) fail(path + ".generators", "unknown generator label '" + label + "'");
      images[*idx] = matrix_from_json(m, path + ".generators." + label);
      seen[*idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) fail(path + ".generators", "missing generator '" + gd.generator_label(i) + "'");
  } else {
    fail(path + ".generators", "expected an array or an object of matrices");
  }
  for (std::size_t i = 0; i < images.size(); ++i)
    if (!images[i].is_square())
      fail(at(path + ".generators", i), "generator matrix is " + std::to_string(images[i].rows()) + "x" +
                                            std::to_string(images[i].cols()) + ", not square");

  std::vector<Relation> relations;
  if (auto it = j.find("relations"); it != j.end()) {
    const auto& arr = as_array(*it, path + ".relations");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& pair = as_array(arr[i], at(path + ".relations", i));
      if (pair.size() != 2) fail(at(path + ".relations", i), "expected [lhs, rhs]");
      relations.emplace_back(factorization_from_json(gd, pair[0], at(path + ".relations", i) + "[0]"),
                             factorization_from_json(gd, pair[1], at(path + ".relations", i) + "[1]"));
    }
  } else if (gd.kind() == SemigroupKind::Numerical && gd.generators().size() > 1) {
    warnings.push_back(path + ".relations missing; relations are optional and the homomorphism property is sampled");
  }
  try {
    return Representation(d, dim, std::move(images), std::move(relations));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

InvolutionPoint point_from_json(const SemigroupDescriptor& d, const json& j, const std::string& path) {
  const auto& pair = as_array(j, path);
  if (pair.size() != 2) fail(path, "expected [left, right]");
  return {element_from_json(d, pair[0], path + "[0]"), element_from_json(d, pair[1], path + "[1]")};
}

RunConfig run_from_json(const SemigroupDescriptor& d, const json& j, const std::string& path) {
  RunConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) fail(path, "expected an object");
  if (auto it = j.find("conditions"); it != j.end()) {
    const auto& arr = as_array(*it, path + ".conditions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) fail(at(path + ".conditions", i), "expected a string");
      cfg.conditions.push_back(arr[i].get<std::string>());
    }
  }
  if (auto it = j.find("max_degree"); it != j.end())
    cfg.max_degree = static_cast<std::uint32_t>(as_count(*it, path + ".max_degree"));
  if (auto it = j.find("subset"); it != j.end()) cfg.subset = subset_from_json(d, *it, path + ".subset");
  if (auto it = j.find("tol"); it != j.end()) {
    cfg.tol = as_double(*it, path + ".tol");
    if (!(cfg.tol > 0.0)) fail(path + ".tol", "tolerance must be positive");
  }
  if (auto it = j.find("seed"); it != j.end()) cfg.seed = as_count(*it, path + ".seed");
  if (auto it = j.find("sznagy"); it != j.end()) {
    const std::string p = path + ".sznagy";
    SzNagyConfig s;
    const auto& pts = as_array(field(*it, "points", p), p + ".points");
    for (std::size_t i = 0; i < pts.size(); ++i) s.sample_points.push_back(point_from_json(d, pts[i], at(p + ".points", i)));
    if (auto b = it->find("bound"); b != it->end())
      s.bound_element = point_from_json(d, *b, p + ".bound");
    else
      s.bound_element = {d.unit(), d.unit()};
    if (auto c = it->find("constant"); c != it->end()) {
      s.bound_constant = as_double(*c, p + ".constant");
      if (!(s.bound_constant > 0.0)) fail(p + ".constant", "must be positive");
    }
    cfg.sznagy = std::move(s);
  }
  if (auto it = j.find("regular"); it != j.end()) {
    const std::string p = path + ".regular";
    RegularConfig r;
    const auto& ps = as_array(field(*it, "ps", p), p + ".ps");
    for (std::size_t i = 0; i < ps.size(); ++i) r.ps.push_back(element_from_json(d, ps[i], at(p + ".ps", i)));
    r.g = element_from_json(d, field(*it, "g", p), p + ".g");
    cfg.regular = std::move(r);
  }
  if (auto it = j.find("normal_map"); it != j.end()) {
    const std::string p = path + ".normal_map";
    NormalMapSpec nm;
    nm.ambient_dim = as_count(field(*it, "ambient_dim", p), p + ".ambient_dim");
    const auto& imgs = as_array(field(*it, "images", p), p + ".images");
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      const std::string q = at(p + ".images", i);
      nm.images.emplace_back(element_from_json(d, field(imgs[i], "element", q), q + ".element"),
                             matrix_from_json(field(imgs[i], "matrix", q), q + ".matrix"));
    }
    cfg.normal_map = std::move(nm);
  }
  if (auto it = j.find("extension"); it != j.end()) {
    const std::string p = path + ".extension";
    ExtensionSpec e;
    e.matrix = matrix_from_json(field(*it, "matrix", p), p + ".matrix");
    if (!e.matrix.is_square()) fail(p + ".matrix", "expected a square matrix");
    e.subspace_dim = as_count(field(*it, "subspace_dim", p), p + ".subspace_dim");
    if (e.subspace_dim > e.matrix.rows()) fail(p + ".subspace_dim", "exceeds the matrix dimension");
    cfg.extension = std::move(e);
  }
  return cfg;
}

json verdict_table(const DescriptorVerdict& dv, const ValidationVerdict& rv) {
  json descriptor = {{"unital", dv.unital},
                     {"closed_sampled", dv.closed},
                     {"closure_samples", dv.closure_samples},
                     {"lattice_ordered", dv.lattice_ordered},
                     {"lattice_laws", dv.lattice_laws_hold}};
  if (dv.closure_violation)
    descriptor["closure_violation"] = {dv.closure_violation->first.to_string(), dv.closure_violation->second.to_string()};
  if (!dv.lattice_law_violation.empty()) descriptor["lattice_law_violation"] = dv.lattice_law_violation;
  if (dv.witness) {
    json bounds = json::array();
    for (const auto& b : dv.witness->maximal_lower_bounds) bounds.push_back(b.to_string());
    descriptor["non_lattice_witness"] = {{"pair", {dv.witness->a.to_string(), dv.witness->b.to_string()}},
                                         {"maximal_lower_bounds", bounds}};
  }
  json rep = json::object();
  for (const auto& c : rv.checks) {
    json entry = {{"ok", c.ok}, {"residual", c.residual}};
    if (!c.detail.empty()) entry["detail"] = c.detail;
    rep[c.name] = entry;
  }
  return {{"descriptor", descriptor}, {"representation", rep}};
}

std::string residual_table(const DescriptorVerdict& dv, const ValidationVerdict& rv) {
  std::ostringstream os;
  char line[256];
  os << "validation failed:\n";
  std::snprintf(line, sizeof line, "  %-24s %-6s %s\n", "check", "ok", "residual / detail");
  os << line;
  auto row = [&](const std::string& name, bool ok, const std::string& detail) {
    std::snprintf(line, sizeof line, "  %-24s %-6s %s\n", name.c_str(), ok ? "yes" : "NO", detail.c_str());
    os << line;
  };
  row("descriptor.unital", dv.unital, "");
  row("descriptor.closure", dv.closed,
      dv.closure_violation ? dv.closure_violation->first.to_string() + " + " + dv.closure_violation->second.to_string()
                           : "");
  row("descriptor.lattice_laws", dv.lattice_laws_hold, dv.lattice_law_violation);
  for (const auto& c : rv.checks) {
    char res[64];
    std::snprintf(res, sizeof res, "%.3e", c.residual);
    row(c.name, c.ok || !c.gating, std::string(res) + (c.detail.empty() ? "" : "  " + c.detail));
  }
  return os.str();
}

}  // namespace

json representation_to_json(const Representation& t) {
  const auto& gd = t.generating_descriptor();
  json gens = json::array();
  for (const auto& m : t.generator_images()) gens.push_back(matrix_to_json(m));
  json rels = json::array();
  for (const auto& [lhs, rhs] : t.relations())
    rels.push_back(json::array({factorization_to_json(gd, lhs), factorization_to_json(gd, rhs)}));
  json out = {{"dimension", t.dimension()}, {"generators", gens}};
  if (!t.relations().empty()) out["relations"] = rels;
  return out;
}

json spec_document(const Representation& t) {
  return {{"descriptor", descriptor_to_json(t.descriptor())}, {"representation", representation_to_json(t)}};
}

InputSpec parse_spec_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  try {
    if (!root.is_object()) fail("document", "expected a JSON object");
    auto descriptor = descriptor_from_json(field(root, "descriptor", "document"), "descriptor");
    std::vector<std::string> warnings;
    auto rep = representation_from_json(descriptor, field(root, "representation", "document"), "representation", warnings);
    auto run = run_from_json(descriptor, root.contains("run") ? root["run"] : json(), "run");
    run.warnings.insert(run.warnings.begin(), warnings.begin(), warnings.end());

    const std::uint64_t seed = run.seed.value_or(0);
    const auto dv = validate_descriptor(descriptor, 1000, seed);
    const auto rv = validate_rep(rep, {run.tol, 200, seed});
    run.validation = verdict_table(dv, rv);
    for (const auto& w : rv.warnings)
      if (std::find(run.warnings.begin(), run.warnings.end(), w) == run.warnings.end() && warnings.empty())
        run.warnings.push_back(w);
    if (!dv.valid() || !rv.valid()) throw ValidationFailure(source + ": " + residual_table(dv, rv));
    return InputSpec{std::move(descriptor), std::move(rep), std::move(run)};
  } catch (const ValidationFailure&) {
    throw;
  } catch (const InputError& e) {
    throw InputError(source + ": " + e.what());
  } catch (const Error& e) {
    throw InputError(source + ": " + e.what());
  }
}

InputSpec parse_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open input file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path.string());
}

// --- deterministic serialization ---------------------------------------------

namespace {

void write_json(std::ostringstream& os, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Scalars and arrays of scalars (matrix rows of [re, im]) stay on one line.
      auto flat = [](const json& e) {
        return e.is_primitive() ||
               (e.is_array() && std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_primitive(); }));
      };
      if (std::all_of(j.begin(), j.end(), flat)) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_deterministic(const json& j) {
  std::ostringstream os;
  write_json(os, j, 0);
  os << "\n";
  return os.str();
}

}  // namespace normex
