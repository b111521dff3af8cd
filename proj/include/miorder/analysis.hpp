#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "miorder/models.hpp"
#include "miorder/orderparam.hpp"

namespace miorder {

inline constexpr const char* kToolName = "miorder";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct Thresholds {
  double mi_threshold = 1e-3;
  double rank_eps = 1e-10;
  double offdiag_eps = 1e-8;
  double lanczos_tol = 1e-10;
};

struct AnalysisConfig {
  std::string state;  // ghz | neel | dimer | up (exclusive with model)
  std::string model;  // preset name or path to a model JSON document
  int sites = 12;
  int max_block = 4;
  Thresholds thresholds;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "both";  // json | csv | both
  std::string operator_spec;    // correlate only: preset name or matrix file
};

// Fill config fields from a JSON document using the flag names as keys.
void apply_config_json(AnalysisConfig& config, const nlohmann::json& doc);

struct AnalysisOutcome {
  nlohmann::json report;
  // (file name, RFC-4180 text) sidecar tables.
  std::vector<std::pair<std::string, std::string>> tables;
  int exit_code = 0;
};

// Full scheme: block-size scan, spectrum, operator synthesis, correlation
// profiles, mode extraction. Exit code 2 flags "no order found".
AnalysisOutcome run_analyze(const AnalysisConfig& config);
// Scan step only.
AnalysisOutcome run_mi_scan(const AnalysisConfig& config);
// Correlation profile and mode for an explicitly given operator.
AnalysisOutcome run_correlate(const AnalysisConfig& config);

// Writes report.json and/or the CSV tables into out_dir per `format`.
void write_outputs(const AnalysisOutcome& outcome, const std::string& out_dir,
                   const std::string& format);

// Matrix (de)serialization: {"dim": n, "entries": [[re, im], ...]} row-major.
nlohmann::json matrix_to_json(const HermitianMatrix& m);
HermitianMatrix matrix_from_json(const nlohmann::json& doc);

// Named operator presets for correlate: sigma_z, sigma_x, dimer.
HermitianMatrix operator_preset(const std::string& name);

// Block-wise operator identification against the library of known order
// operators; returns "custom" when nothing matches within 0.05 operator-norm
// after normalization.
std::string identify_operator(const HermitianMatrix& op);

// RFC-4180 CSV with CRLF line endings; numbers with 17 significant digits.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);
std::string csv_number(double v);

}  // namespace miorder
