#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "normex/certificates.hpp"
#include "normex/cli.hpp"
#include "normex/constructions.hpp"
#include "normex/errors.hpp"
#include "normex/spec_io.hpp"

namespace py = pybind11;
using namespace normex;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

CMatrix to_matrix(const ComplexArray& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-d array");
  CMatrix m(a.shape(0), a.shape(1));
  auto v = a.unchecked<2>();
  for (py::ssize_t r = 0; r < a.shape(0); ++r)
    for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = v(r, c);
  return m;
}

ComplexArray to_array(const CMatrix& m) {
  ComplexArray a({m.rows(), m.cols()});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) v(r, c) = m(r, c);
  return a;
}

std::vector<CMatrix> to_matrices(const std::vector<ComplexArray>& as) {
  std::vector<CMatrix> out;
  for (const auto& a : as) out.push_back(to_matrix(a));
  return out;
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::object report(const CertificateReport& r) { return to_python(to_json(r)); }

Representation free_rep(const std::vector<ComplexArray>& gens) {
  auto ms = to_matrices(gens);
  if (ms.empty()) throw InputError("at least one generator is required");
  const std::size_t dim = ms.front().rows(), rank = ms.size();
  return Representation(SemigroupDescriptor::free_abelian(rank), dim, std::move(ms));
}

std::vector<IndexKey> keys(const std::vector<std::size_t>& coords) {
  std::vector<IndexKey> u;
  for (auto c : coords) u.push_back({c, 0});
  return u;
}

}  // namespace

PYBIND11_MODULE(_normex, m) {
  m.doc() = "Numerical certificates for normal extensions of semigroup representations";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "NormexError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<MembershipError>(m, "MembershipError", base.ptr());
  py::register_exception<NotHermitianError>(m, "NotHermitianError", base.ptr());
  py::register_exception<NotPsdError>(m, "NotPsdError", base.ptr());
  py::register_exception<BudgetError>(m, "BudgetError", base.ptr());

  m.def("operator_norm", [](const ComplexArray& a) { return operator_norm(to_matrix(a)); });
  m.def(
      "psd_check",
      [](const ComplexArray& a, std::optional<double> tol) {
        const auto v = psd_check(to_matrix(a), tol);
        py::dict d;
        d["is_psd"] = v.is_psd;
        d["min_eigenvalue"] = v.min_eigenvalue;
        d["hermitian_defect"] = v.hermitian_defect;
        d["tolerance_used"] = v.tolerance_used;
        return d;
      },
      py::arg("a"), py::arg("tol") = py::none());
  m.def("hermitian_eigenvalues", [](const ComplexArray& a) { return hermitian_eigen(to_matrix(a)).values; });

  m.def("agler_operator", [](const ComplexArray& t, std::uint32_t n) { return to_array(agler_operator(to_matrix(t), n)); });
  m.def(
      "agler_certificate",
      [](const ComplexArray& t, std::uint32_t n, double tol) { return report(agler_certificate(to_matrix(t), n, tol)); },
      py::arg("t"), py::arg("n"), py::arg("tol") = kDefaultResidualTol);
  m.def("athavale_operator", [](const std::vector<ComplexArray>& ts, const DegreeTuple& n) {
    return to_array(athavale_operator(to_matrices(ts), n));
  });
  m.def(
      "athavale_certificate",
      [](const std::vector<ComplexArray>& ts, const DegreeTuple& n, double tol) {
        return report(athavale_certificate(to_matrices(ts), n, tol));
      },
      py::arg("ts"), py::arg("n"), py::arg("tol") = kDefaultResidualTol);
  m.def(
      "brehmer_operator",
      [](const std::vector<ComplexArray>& gens, const std::vector<std::size_t>& coords) {
        return to_array(brehmer_operator(free_rep(gens), keys(coords)));
      },
      py::arg("generators"), py::arg("subset"), "Brehmer sum over the 1-based coordinates in subset.");
  m.def(
      "brehmer_certificate",
      [](const std::vector<ComplexArray>& gens, const std::vector<std::size_t>& coords, double tol) {
        return report(brehmer_certificate(free_rep(gens), keys(coords), tol));
      },
      py::arg("generators"), py::arg("subset"), py::arg("tol") = kDefaultResidualTol);
  m.def("athavale_vs_brehmer", [](const std::vector<ComplexArray>& ts, const DegreeTuple& n) {
    return athavale_vs_brehmer(to_matrices(ts), n).deviation;
  });
  m.def(
      "generator_certificate",
      [](const std::vector<ComplexArray>& gens, std::uint32_t max_degree) {
        return report(generator_certificate(free_rep(gens), max_degree));
      },
      py::arg("generators"), py::arg("max_degree") = kDefaultMaxDegree);
  m.def("extension_residual", [](const ComplexArray& n, std::size_t subspace_dim) {
    const auto e = extension_residual(to_matrix(n), subspace_dim);
    return py::make_tuple(e.hypothesis, e.invariance);
  });

  m.def("make_commuting_normals", [](std::uint64_t seed, std::size_t dim, std::size_t count) {
    std::vector<ComplexArray> out;
    for (const auto& x : make_commuting_normals(seed, dim, count)) out.push_back(to_array(x));
    return out;
  });
  m.def("kolmogorov_factor", [](const std::vector<std::vector<ComplexArray>>& kernel) {
    std::vector<std::vector<CMatrix>> grid;
    for (const auto& row : kernel) grid.push_back(to_matrices(row));
    std::vector<ComplexArray> out;
    for (const auto& v : kolmogorov_factor(grid)) out.push_back(to_array(v));
    return out;
  });
  m.def(
      "convex_average_bound",
      [](const ComplexArray& t, const std::vector<double>& weights) {
        const auto fam = make_orthogonal_defect_family(to_matrix(t), weights.size());
        const auto avg = convex_average(fam, ConvexWeights(weights));
        return py::make_tuple(avg.defect_norm, avg.weight_norm);
      },
      py::arg("t"), py::arg("weights"),
      "Averages an orthogonal-defect dilation family of t; returns (||D||, ||weights||_2).");
  m.def("gallery_names", &gallery_names);
  m.def(
      "gallery_document",
      [](const std::string& name, std::size_t dim, std::uint64_t seed) {
        GalleryParams p;
        p.dim = dim;
        p.seed = seed;
        const auto item = make_gallery(name, p);
        const Representation rep = std::holds_alternative<Representation>(item)
                                       ? std::get<Representation>(item)
                                       : Representation(SemigroupDescriptor::free_abelian(1),
                                                        std::get<CMatrix>(item).rows(), {std::get<CMatrix>(item)});
        return dump_deterministic(spec_document(rep));
      },
      py::arg("name"), py::arg("dim") = 2, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_command(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
