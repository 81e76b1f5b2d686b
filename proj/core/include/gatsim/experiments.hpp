#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gatsim/config.hpp"
#include "gatsim/csv.hpp"

namespace gatsim {

std::string tool_version();

// mu = 2 sigma sqrt(log n), the high-SNR feature mean.
double high_snr_mu(std::size_t n, double sigma);
// sqrt(log n) / cbrt(n), the SNR threshold of the deep-network regime.
double snr_threshold(std::size_t n);
// Geometric grid of config.snr_points values over [snr_low, snr_high] * snr_threshold(n).
std::vector<double> snr_sweep(const ExperimentConfig& config);

struct ExperimentOutput {
  std::string name;
  CsvTable table;
  // Extra manifest lines such as decay-fit verdicts.
  std::vector<std::pair<std::string, std::string>> notes;
  // Vertical reference line for accuracy-vs-SNR plots.
  std::optional<double> marker;
};

// Columns: a, t, mean_accuracy, stderr. One SignSym(t) schedule of config.layers layers per t.
ExperimentOutput run_experiment1(const ExperimentConfig& config);
// Columns: mu, t, mean_accuracy, stderr.
ExperimentOutput run_experiment2(const ExperimentConfig& config);
// Columns: t, layer, gamma. gamma is averaged over trials; notes carry the decay fit per t.
ExperimentOutput run_experiment3(const ExperimentConfig& config);
// Columns: model, snr, mean_accuracy, stderr. Models GCN, GAT (SignSym(gat_t)) and GAT*.
ExperimentOutput run_experiment4(const ExperimentConfig& config);
// Columns: mu, sigma, t, deg_p, deg_q, closed_mean, mc_mean, mc_se, closed_var, mc_var, z_score.
// z_score is the larger of the mean and variance discrepancies in standard errors.
ExperimentOutput run_moment_validation(const ExperimentConfig& config);
// Columns: samples, zero_iff_constant, triangle, translation, negation, max_triangle_excess.
ExperimentOutput run_similarity_axioms(const ExperimentConfig& config);

ExperimentOutput run_experiment(const ExperimentConfig& config);

struct RunManifest {
  std::string experiment;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<std::string> artifacts;
  std::vector<std::pair<std::string, std::string>> notes;
};

// Key-value text: a [manifest] section with run metadata and a section named
// after the experiment holding the config echo, so the file can be passed back
// through --config.
std::string format_manifest(const RunManifest& manifest);

// Writes <name>.csv, <name>.svg and <name>.manifest into config.out_dir and
// returns the manifest that was written.
RunManifest write_run(const ExperimentConfig& config, const ExperimentOutput& output, double wall_clock_seconds);

}  // namespace gatsim
