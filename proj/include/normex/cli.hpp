#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "normex/certificates.hpp"

namespace normex {

inline constexpr const char* kVersion = "0.3.0";

enum ExitCode : int { kExitPass = 0, kExitCertificateFailed = 1, kExitInputError = 2 };

struct RunReport {
  std::vector<CertificateReport> reports;
  /// Tolerances, caps, seed and version in effect.
  nlohmann::json environment = nlohmann::json::object();
  nlohmann::json validation = nlohmann::json::object();

  /// 1 if any report failed, 2 if nothing ran, else 0.
  int exit_status() const;
  nlohmann::json to_json() const;
};

enum class ReportFormat { Human, Machine };

/// Human: fixed-width table of condition, verdict, margin, witness.
/// Machine: dump_deterministic of RunReport::to_json.
std::string render_report(const RunReport& r, ReportFormat format);

/// Writes the rendering to out and, when path is non-empty, the machine form
/// to path. Throws InputError when path cannot be written.
void emit_report(const RunReport& r, ReportFormat format, std::ostream& out, const std::string& path = {});

/// Entry point of the command-line tool. args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace normex
