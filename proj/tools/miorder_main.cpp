#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "miorder/analysis.hpp"

namespace {

struct CliOptions {
  miorder::AnalysisConfig config;
  std::string config_file;
};

void add_common_options(CLI::App* cmd, CliOptions& opts, bool with_operator) {
  cmd->add_option("--state", opts.config.state, "Analytic state: ghz, neel, dimer or up");
  cmd->add_option("--model", opts.config.model,
                  "Model preset (heisenberg, xxz(D), majumdar_ghosh) or model JSON file");
  cmd->add_option("--sites", opts.config.sites, "Number of chain sites");
  cmd->add_option("--max-block", opts.config.max_block, "Largest block size scanned (1-4)");
  cmd->add_option("--mi-threshold", opts.config.thresholds.mi_threshold,
                  "Long-distance MI threshold in bits");
  cmd->add_option("--rank-eps", opts.config.thresholds.rank_eps, "RDM rank threshold");
  cmd->add_option("--offdiag-eps", opts.config.thresholds.offdiag_eps,
                  "Off-diagonal detection threshold");
  cmd->add_option("--seed", opts.config.seed, "Random seed for the ground-state solver");
  cmd->add_option("--tol", opts.config.thresholds.lanczos_tol, "Lanczos residual tolerance");
  cmd->add_option("--out-dir", opts.config.out_dir, "Output directory");
  cmd->add_option("--format", opts.config.format, "Output format: json, csv or both");
  cmd->add_option("--config", opts.config_file, "JSON config file (flags override its keys)");
  if (with_operator)
    cmd->add_option("--operator", opts.config.operator_spec,
                    "Operator preset (sigma_z, sigma_x, dimer) or matrix JSON file");
}

// Config file fills only the options not given on the command line.
void merge_config_file(CLI::App* cmd, CliOptions& opts, bool with_operator) {
  if (opts.config_file.empty()) return;
  std::ifstream f(opts.config_file);
  if (!f) throw miorder::invalid_input_error("cannot open config file '" + opts.config_file + "'");
  nlohmann::json doc;
  try {
    f >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw miorder::invalid_input_error("cannot parse config file: " + std::string(e.what()));
  }
  miorder::AnalysisConfig from_file;
  miorder::apply_config_json(from_file, doc);
  auto keep_flag = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  if (!keep_flag("--state")) opts.config.state = from_file.state;
  if (!keep_flag("--model")) opts.config.model = from_file.model;
  if (!keep_flag("--sites") && doc.contains("sites")) opts.config.sites = from_file.sites;
  if (!keep_flag("--max-block") && doc.contains("max_block"))
    opts.config.max_block = from_file.max_block;
  if (!keep_flag("--mi-threshold") && doc.contains("mi_threshold"))
    opts.config.thresholds.mi_threshold = from_file.thresholds.mi_threshold;
  if (!keep_flag("--rank-eps") && doc.contains("rank_eps"))
    opts.config.thresholds.rank_eps = from_file.thresholds.rank_eps;
  if (!keep_flag("--offdiag-eps") && doc.contains("offdiag_eps"))
    opts.config.thresholds.offdiag_eps = from_file.thresholds.offdiag_eps;
  if (!keep_flag("--tol") && doc.contains("tol"))
    opts.config.thresholds.lanczos_tol = from_file.thresholds.lanczos_tol;
  if (!keep_flag("--seed") && doc.contains("seed")) opts.config.seed = from_file.seed;
  if (!keep_flag("--out-dir") && doc.contains("out_dir")) opts.config.out_dir = from_file.out_dir;
  if (!keep_flag("--format") && doc.contains("format")) opts.config.format = from_file.format;
  if (with_operator && !keep_flag("--operator") && doc.contains("operator"))
    opts.config.operator_spec = from_file.operator_spec;
}

void print_summary(const miorder::AnalysisOutcome& outcome) {
  const auto& report = outcome.report;
  if (report.contains("mi_scan")) {
    const auto& scan = report["mi_scan"];
    if (scan["min_block_size"].is_null())
      std::cout << "minimum block size: none up to max-block (threshold "
                << scan["threshold"].get<double>() << " bits)\n";
    else
      std::cout << "minimum block size: " << scan["min_block_size"].get<int>() << "\n";
  }
  if (report.contains("diagonal_order") && report["diagonal_order"].value("found", false)) {
    std::cout << "diagonal operator: " << report["diagonal_order"]["operator_name"]
              << ", weights " << report["diagonal_order"]["weights"].dump() << "\n";
  }
  if (report.contains("off_diagonal_order") &&
      report["off_diagonal_order"].value("found", false)) {
    std::cout << "off-diagonal operators: " << report["off_diagonal_order"]["operator_x_name"]
              << " / " << report["off_diagonal_order"]["operator_y_name"] << "\n";
  }
  if (report.contains("correlations"))
    for (const auto& entry : report["correlations"])
      if (entry["mode"].value("found", false))
        std::cout << "mode(" << entry["label"].get<std::string>()
                  << "): k = " << entry["mode"]["k"].get<double>() << "\n";
  if (report.contains("mode") && report["mode"].value("found", false))
    std::cout << "mode: k = " << report["mode"]["k"].get<double>() << "\n";
  if (report.contains("verdict")) std::cout << "verdict: " << report["verdict"] << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Spin-chain long-range order analysis from block-block mutual information"};
  app.require_subcommand(1);

  CliOptions analyze_opts, scan_opts, corr_opts;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Run the full scheme: scan, spectra, operators, correlations, modes");
  add_common_options(analyze, analyze_opts, false);
  CLI::App* scan = app.add_subcommand("mi-scan", "Mutual-information block-size scan only");
  add_common_options(scan, scan_opts, false);
  CLI::App* correlate =
      app.add_subcommand("correlate", "Correlation profile and mode for a given operator");
  add_common_options(correlate, corr_opts, true);

  CLI11_PARSE(app, argc, argv);

  miorder::AnalysisOutcome outcome;
  if (analyze->parsed()) {
    merge_config_file(analyze, analyze_opts, false);
    outcome = miorder::run_analyze(analyze_opts.config);
    miorder::write_outputs(outcome, analyze_opts.config.out_dir, analyze_opts.config.format);
  } else if (scan->parsed()) {
    merge_config_file(scan, scan_opts, false);
    outcome = miorder::run_mi_scan(scan_opts.config);
    miorder::write_outputs(outcome, scan_opts.config.out_dir, scan_opts.config.format);
  } else {
    merge_config_file(correlate, corr_opts, true);
    outcome = miorder::run_correlate(corr_opts.config);
    miorder::write_outputs(outcome, corr_opts.config.out_dir, corr_opts.config.format);
  }
  print_summary(outcome);
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const miorder::convergence_error& e) {
    std::cerr << "error: " << e.what() << " (best residual " << e.best_residual << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
