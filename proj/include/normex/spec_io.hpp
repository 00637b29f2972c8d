#pragma once

// JSON input documents: descriptor, representation and run sections, plus
// the deterministic serializer used for machine reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "normex/certificates.hpp"
#include "normex/errors.hpp"
#include "normex/linalg.hpp"
#include "normex/representation.hpp"
#include "normex/semigroup.hpp"

namespace normex {

/// Input rejected after parsing because a validation check failed. The
/// message carries the residual table.
class ValidationFailure : public InputError {
 public:
  using InputError::InputError;
};

struct RegularConfig {
  std::vector<GroupElement> ps;
  GroupElement g;
};

struct NormalMapSpec {
  std::size_t ambient_dim = 0;
  std::vector<std::pair<GroupElement, CMatrix>> images;
};

struct ExtensionSpec {
  CMatrix matrix;
  std::size_t subspace_dim = 0;
};

struct RunConfig {
  std::vector<std::string> conditions;
  std::uint32_t max_degree = kDefaultMaxDegree;
  std::optional<std::vector<IndexKey>> subset;
  double tol = kDefaultResidualTol;
  std::optional<std::uint64_t> seed;
  std::optional<SzNagyConfig> sznagy;
  std::optional<RegularConfig> regular;
  std::optional<NormalMapSpec> normal_map;
  std::optional<ExtensionSpec> extension;
  std::vector<std::string> warnings;
  /// Residual table from descriptor and representation validation.
  nlohmann::json validation = nlohmann::json::object();
};

struct InputSpec {
  SemigroupDescriptor descriptor;
  Representation representation;
  RunConfig run;
};

/// Reads and fully validates an input document. Parse errors carry the
/// line/column or the field path; validation failures throw
/// ValidationFailure.
InputSpec parse_spec(const std::filesystem::path& path);
InputSpec parse_spec_text(const std::string& text, const std::string& source = "<input>");

// Schema pieces, exposed for the gallery emitter and for tests.
SemigroupDescriptor descriptor_from_json(const nlohmann::json& j, const std::string& path = "descriptor");
nlohmann::json descriptor_to_json(const SemigroupDescriptor& d);
GroupElement element_from_json(const SemigroupDescriptor& d, const nlohmann::json& j, const std::string& path);
nlohmann::json element_to_json(const SemigroupDescriptor& d, const GroupElement& g);
/// Row-major nested arrays of [re, im] pairs.
CMatrix matrix_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json matrix_to_json(const CMatrix& m);
std::vector<IndexKey> subset_from_json(const SemigroupDescriptor& d, const nlohmann::json& j,
                                       const std::string& path);
nlohmann::json representation_to_json(const Representation& t);

/// Document with descriptor and representation sections, parseable by
/// parse_spec_text.
nlohmann::json spec_document(const Representation& t);

/// Sorted keys, no insignificant whitespace beyond two-space indentation,
/// floating values at 17 significant digits, non-finite values as null.
std::string dump_deterministic(const nlohmann::json& j);

}  // namespace normex
