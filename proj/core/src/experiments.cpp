#include "gatsim/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gatsim/attention.hpp"
#include "gatsim/csbm.hpp"
#include "gatsim/error.hpp"
#include "gatsim/moments.hpp"
#include "gatsim/network.hpp"
#include "gatsim/oversmoothing.hpp"
#include "gatsim/parallel.hpp"
#include "gatsim/plot.hpp"
#include "gatsim/rng.hpp"

#ifndef GATSIM_VERSION
#define GATSIM_VERSION "0.0.0"
#endif

namespace gatsim {

namespace {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr summarize(const std::vector<double>& values) {
  MeanStderr out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

double config_mu(const ExperimentConfig& config) {
  return config.mu_values.empty() ? high_snr_mu(config.n, config.sigma) : config.mu_values.front();
}

std::string format_fit(const DecayFit& fit) {
  std::ostringstream out;
  out << "slope=" << format_number(fit.slope) << " r2=" << format_number(fit.r_squared)
      << " layers_used=" << fit.layers_used << " truncated=" << (fit.truncated ? "true" : "false")
      << " oversmoothing=" << (fit.oversmoothing ? "true" : "false");
  return out.str();
}

}  // namespace

std::string tool_version() { return std::string("gatsim ") + GATSIM_VERSION; }

double high_snr_mu(std::size_t n, double sigma) { return 2.0 * sigma * std::sqrt(std::log(static_cast<double>(n))); }

double snr_threshold(std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::sqrt(std::log(nn)) / std::cbrt(nn);
}

std::vector<double> snr_sweep(const ExperimentConfig& config) {
  const double base = snr_threshold(config.n);
  std::vector<double> out;
  const std::size_t k = config.snr_points;
  for (std::size_t i = 0; i < k; ++i) {
    const double frac = k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(k - 1);
    const double mult = config.snr_low * std::pow(config.snr_high / config.snr_low, frac);
    out.push_back(base * mult);
  }
  return out;
}

ExperimentOutput run_experiment1(const ExperimentConfig& config) {
  config.validate();
  const double mu = config_mu(config);
  const std::size_t na = config.a_values.size();
  const std::size_t nt = config.t_grid.size();
  // acc[(a * nt + t) * trials + trial]
  std::vector<double> acc(na * nt * config.trials);
  parallel_for(
      config.trials,
      [&](std::size_t trial) {
        const auto seed = trial_seed(config.seed, trial);
        for (std::size_t ai = 0; ai < na; ++ai) {
          const auto params = CsbmParams::from_scaling(config.n, config.a_values[ai], config.b, mu, config.sigma);
          const auto graph = sample_csbm(params, seed);
          for (std::size_t ti = 0; ti < nt; ++ti) {
            const auto schedule = LayerSchedule::repeat(SignSym{config.t_grid[ti]}, config.layers);
            acc[(ai * nt + ti) * config.trials + trial] = run_network(graph, schedule, false).result.accuracy;
          }
        }
      },
      config.workers);

  ExperimentOutput out{"exp1", CsvTable({"a", "t", "mean_accuracy", "stderr"}), {}, std::nullopt};
  for (std::size_t ai = 0; ai < na; ++ai)
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const auto first = acc.begin() + static_cast<std::ptrdiff_t>((ai * nt + ti) * config.trials);
      const auto s = summarize(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(config.trials)));
      out.table.add_row({config.a_values[ai], config.t_grid[ti], s.mean, s.stderr_});
    }
  out.notes.emplace_back("mu", format_number(mu));
  return out;
}

ExperimentOutput run_experiment2(const ExperimentConfig& config) {
  config.validate();
  const double a = config.a_values.front();
  const std::size_t nm = config.mu_values.size();
  const std::size_t nt = config.t_grid.size();
  std::vector<double> acc(nm * nt * config.trials);
  parallel_for(
      config.trials,
      [&](std::size_t trial) {
        const auto seed = trial_seed(config.seed, trial);
        for (std::size_t mi = 0; mi < nm; ++mi) {
          const auto params = CsbmParams::from_scaling(config.n, a, config.b, config.mu_values[mi], config.sigma);
          const auto graph = sample_csbm(params, seed);
          for (std::size_t ti = 0; ti < nt; ++ti) {
            const auto schedule = LayerSchedule::repeat(SignSym{config.t_grid[ti]}, config.layers);
            acc[(mi * nt + ti) * config.trials + trial] = run_network(graph, schedule, false).result.accuracy;
          }
        }
      },
      config.workers);

  ExperimentOutput out{"exp2", CsvTable({"mu", "t", "mean_accuracy", "stderr"}), {}, std::nullopt};
  for (std::size_t mi = 0; mi < nm; ++mi)
    for (std::size_t ti = 0; ti < nt; ++ti) {
      const auto first = acc.begin() + static_cast<std::ptrdiff_t>((mi * nt + ti) * config.trials);
      const auto s = summarize(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(config.trials)));
      out.table.add_row({config.mu_values[mi], config.t_grid[ti], s.mean, s.stderr_});
    }
  return out;
}

ExperimentOutput run_experiment3(const ExperimentConfig& config) {
  config.validate();
  const double mu = config_mu(config);
  const double a = config.a_values.front();
  const std::size_t nt = config.t_grid.size();
  const std::size_t depth = config.layers + 1;
  // gammas[(trial * nt + t) * depth + layer]
  std::vector<double> gammas(config.trials * nt * depth);
  parallel_for(
      config.trials,
      [&](std::size_t trial) {
        const auto params = CsbmParams::from_scaling(config.n, a, config.b, mu, config.sigma);
        const auto graph = sample_csbm(params, trial_seed(config.seed, trial));
        for (std::size_t ti = 0; ti < nt; ++ti) {
          const auto trace = trace_gamma(graph, LayerSchedule::repeat(SignSym{config.t_grid[ti]}, config.layers));
          std::copy(trace.gamma_values.begin(), trace.gamma_values.end(),
                    gammas.begin() + static_cast<std::ptrdiff_t>((trial * nt + ti) * depth));
        }
      },
      config.workers);

  ExperimentOutput out{"exp3", CsvTable({"t", "layer", "gamma"}), {}, std::nullopt};
  for (std::size_t ti = 0; ti < nt; ++ti) {
    SimilarityTrace mean_trace;
    mean_trace.params = CsbmParams::from_scaling(config.n, a, config.b, mu, config.sigma);
    for (std::size_t l = 0; l < depth; ++l) {
      double sum = 0.0;
      for (std::size_t trial = 0; trial < config.trials; ++trial) sum += gammas[(trial * nt + ti) * depth + l];
      const double g = sum / static_cast<double>(config.trials);
      mean_trace.gamma_values.push_back(g);
      out.table.add_row({config.t_grid[ti], static_cast<double>(l), g});
    }
    if (depth >= 3)
      out.notes.emplace_back("decay_fit.t_" + format_number(config.t_grid[ti]),
                             format_fit(fit_decay(mean_trace, config.decay_threshold)));
  }
  out.notes.emplace_back("mu", format_number(mu));
  return out;
}

ExperimentOutput run_experiment4(const ExperimentConfig& config) {
  config.validate();
  const double a = config.a_values.front();
  const auto snrs = snr_sweep(config);
  const std::vector<std::pair<std::string, LayerSchedule>> models = {
      {"GCN", LayerSchedule::repeat(Uniform{}, config.layers)},
      {"GAT", LayerSchedule::repeat(SignSym{config.gat_t}, config.layers)},
      {"GAT*", LayerSchedule::sign_intensities(config.gatstar_t)},
  };
  const std::size_t ns = snrs.size();
  const std::size_t nmod = models.size();
  std::vector<double> acc(nmod * ns * config.trials);
  parallel_for(
      config.trials,
      [&](std::size_t trial) {
        const auto seed = trial_seed(config.seed, trial);
        for (std::size_t si = 0; si < ns; ++si) {
          const auto params = CsbmParams::from_scaling(config.n, a, config.b, snrs[si] * config.sigma, config.sigma);
          const auto graph = sample_csbm(params, seed);
          for (std::size_t mi = 0; mi < nmod; ++mi)
            acc[(mi * ns + si) * config.trials + trial] = run_network(graph, models[mi].second, false).result.accuracy;
        }
      },
      config.workers);

  ExperimentOutput out{"exp4", CsvTable({"model", "snr", "mean_accuracy", "stderr"}), {}, snr_threshold(config.n)};
  for (std::size_t mi = 0; mi < nmod; ++mi)
    for (std::size_t si = 0; si < ns; ++si) {
      const auto first = acc.begin() + static_cast<std::ptrdiff_t>((mi * ns + si) * config.trials);
      const auto s = summarize(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(config.trials)));
      out.table.add_row({models[mi].first, snrs[si], s.mean, s.stderr_});
    }
  out.notes.emplace_back("snr_threshold", format_number(snr_threshold(config.n)));
  for (const auto& [name, schedule] : models) out.notes.emplace_back("model." + name, schedule.describe());
  return out;
}

ExperimentOutput run_moment_validation(const ExperimentConfig& config) {
  config.validate();
  struct Cell {
    MomentInputs inputs;
  };
  std::vector<Cell> cells;
  for (double snr : config.snr_grid)
    for (double t : config.t_grid)
      for (auto [dp, dq] : config.degree_pairs)
        cells.push_back({MomentInputs{snr * config.validate_sigma, config.validate_sigma, t, dp, dq}});

  ExperimentOutput out{"validate",
                       CsvTable({"mu", "sigma", "t", "deg_p", "deg_q", "closed_mean", "mc_mean", "mc_se", "closed_var",
                                 "mc_var", "z_score"}),
                       {},
                       std::nullopt};
  std::size_t within = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& in = cells[c].inputs;
    const auto closed = closed_form_detail(in);
    const auto mc = monte_carlo_moments(in, config.mc_trials, trial_seed(config.seed, c), 1, config.workers);
    const double z_mean = std::abs(closed.mean - mc.mean) / mc.mean_se;
    const double z_var = std::abs(closed.variance - mc.var) / mc.var_se;
    const double z = std::max(z_mean, z_var);
    within += z <= 4.0;
    out.table.add_row({in.mu, in.sigma, in.t, static_cast<double>(in.deg_p), static_cast<double>(in.deg_q), closed.mean,
                       mc.mean, mc.mean_se, closed.variance, mc.var, z});
  }
  out.notes.emplace_back("cells", std::to_string(cells.size()));
  out.notes.emplace_back("cells_within_4se", std::to_string(within));
  return out;
}

ExperimentOutput run_similarity_axioms(const ExperimentConfig& config) {
  config.validate();
  const auto report = check_similarity_axioms(config.axiom_samples, config.seed);
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  ExperimentOutput out{"oversmooth-axioms",
                       CsvTable({"samples", "zero_iff_constant", "triangle", "translation", "negation",
                                 "max_triangle_excess"}),
                       {},
                       std::nullopt};
  out.table.add_row({static_cast<double>(report.samples), flag(report.zero_iff_constant), flag(report.triangle),
                     flag(report.translation), flag(report.negation), report.max_triangle_excess});
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  switch (config.id) {
    case ExperimentId::Exp1: return run_experiment1(config);
    case ExperimentId::Exp2: return run_experiment2(config);
    case ExperimentId::Exp3: return run_experiment3(config);
    case ExperimentId::Exp4: return run_experiment4(config);
    case ExperimentId::ValidateMoments: return run_moment_validation(config);
    case ExperimentId::OversmoothAxioms: return run_similarity_axioms(config);
  }
  throw ParameterError("unknown experiment");
}

std::string format_manifest(const RunManifest& m) {
  std::ostringstream out;
  out << "# gatsim run manifest\n[manifest]\n";
  out << "experiment = " << m.experiment << '\n';
  out << "tool_version = " << m.tool_version << '\n';
  out << "wall_clock_seconds = " << format_number(m.wall_clock_seconds) << '\n';
  out << "artifacts = ";
  for (std::size_t i = 0; i < m.artifacts.size(); ++i) out << (i ? ", " : "") << m.artifacts[i];
  out << '\n';
  out << "trial_seeds = ";
  for (std::size_t i = 0; i < m.trial_seeds.size(); ++i) out << (i ? ", " : "") << m.trial_seeds[i];
  out << '\n';
  for (const auto& [k, v] : m.notes) out << k << " = " << v << '\n';
  out << '[' << m.experiment << "]\n";
  for (const auto& [k, v] : m.config) out << k << " = " << v << '\n';
  return out.str();
}

RunManifest write_run(const ExperimentConfig& config, const ExperimentOutput& output, double wall_clock_seconds) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ParameterError("cannot create output directory " + config.out_dir + ": " + ec.message());

  RunManifest manifest;
  manifest.experiment = experiment_name(config.id);
  manifest.tool_version = tool_version();
  manifest.wall_clock_seconds = wall_clock_seconds;
  manifest.config = config.echo();
  manifest.notes = output.notes;
  const std::size_t seeds = config.id == ExperimentId::ValidateMoments ? output.table.rows() : config.trials;
  for (std::size_t k = 0; k < seeds; ++k) manifest.trial_seeds.push_back(trial_seed(config.seed, k));

  const auto csv_path = dir / (output.name + ".csv");
  output.table.save(csv_path.string());
  manifest.artifacts.push_back(csv_path.filename().string());

  const bool plottable = config.id == ExperimentId::Exp1 || config.id == ExperimentId::Exp2 ||
                         config.id == ExperimentId::Exp3 || config.id == ExperimentId::Exp4;
  if (plottable) {
    PlotOptions options;
    options.log_scale = config.id == ExperimentId::Exp3;
    options.marker = output.marker;
    options.title = output.name;
    const auto svg_path = dir / (output.name + ".svg");
    std::ofstream svg(svg_path, std::ios::binary);
    if (!svg) throw ParameterError("cannot write " + svg_path.string());
    svg << render_plot(output.table, options);
    manifest.artifacts.push_back(svg_path.filename().string());
  }

  const auto manifest_path = dir / (output.name + ".manifest");
  manifest.artifacts.push_back(manifest_path.filename().string());
  std::ofstream mf(manifest_path, std::ios::binary);
  if (!mf) throw ParameterError("cannot write " + manifest_path.string());
  mf << format_manifest(manifest);
  return manifest;
}

}  // namespace gatsim
