// gatsim command-line tool: graph sampling, forward passes, closed-form
// moments, over-smoothing traces, the four experiments and plotting.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gatsim/attention.hpp"
#include "gatsim/config.hpp"
#include "gatsim/csbm.hpp"
#include "gatsim/csv.hpp"
#include "gatsim/error.hpp"
#include "gatsim/experiments.hpp"
#include "gatsim/moments.hpp"
#include "gatsim/network.hpp"
#include "gatsim/oversmoothing.hpp"
#include "gatsim/plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GraphArgs {
  std::size_t n = 3000;
  double a = 3.0;
  double b = 2.0;
  std::optional<double> p;
  std::optional<double> q;
  std::optional<double> mu;
  double sigma = 10.0;
  std::uint64_t seed = 1;
};

void add_graph_options(CLI::App* cmd, GraphArgs& g) {
  cmd->add_option("--n", g.n, "Node count")->capture_default_str();
  cmd->add_option("--a", g.a, "Intra-class scale: p = a log^2(n)/n")->capture_default_str();
  cmd->add_option("--b", g.b, "Inter-class scale: q = b log^2(n)/n")->capture_default_str();
  cmd->add_option("--p", g.p, "Intra-class edge probability (overrides --a)");
  cmd->add_option("--q", g.q, "Inter-class edge probability (overrides --b)");
  cmd->add_option("--mu", g.mu, "Feature mean magnitude (default 2 sigma sqrt(log n))");
  cmd->add_option("--sigma", g.sigma, "Feature standard deviation")->capture_default_str();
  cmd->add_option("--seed", g.seed, "Random seed")->capture_default_str();
}

gatsim::CsbmParams graph_params(const GraphArgs& g) {
  const double mu = g.mu.value_or(gatsim::high_snr_mu(g.n, g.sigma));
  auto params = gatsim::CsbmParams::from_scaling(g.n, g.a, g.b, mu, g.sigma);
  if (g.p) params.p = *g.p;
  if (g.q) params.q = *g.q;
  params.validate();
  return params;
}

// Comma-separated layers: "u" or "uniform", a number t for SignSym(t), or
// "xor:R:beta".
gatsim::LayerSchedule parse_schedule(const std::string& text) {
  gatsim::LayerSchedule schedule;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (item == "u" || item == "uniform") {
      schedule.layers.emplace_back(gatsim::Uniform{});
    } else if (item.rfind("xor:", 0) == 0) {
      const auto rest = item.substr(4);
      const auto colon = rest.find(':');
      if (colon == std::string::npos) throw gatsim::ParameterError("xor layer needs 'xor:R:beta'");
      schedule.layers.emplace_back(
          gatsim::XorNet{gatsim::parse_double(rest.substr(0, colon)), gatsim::parse_double(rest.substr(colon + 1))});
    } else {
      schedule.layers.emplace_back(gatsim::SignSym{gatsim::parse_double(item)});
    }
  }
  schedule.validate();
  return schedule;
}

struct ExperimentArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  bool as_printed = false;
  std::optional<std::string> t_grid;
  std::optional<unsigned> workers;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& e) {
  cmd->add_option("--config", e.config_path, "Key-value config file");
  cmd->add_option("--seed", e.seed, "Base seed; trial k uses seed XOR k");
  cmd->add_option("--trials", e.trials, "Trials per data point");
  cmd->add_option("--out", e.out, "Output directory");
  cmd->add_flag("--as-printed", e.as_printed, "Use the literal a/b values that print a < b");
  cmd->add_option("--t-grid", e.t_grid, "Comma-separated attention intensities");
  cmd->add_option("--workers", e.workers, "Worker threads (0 = all cores)");
}

int run_experiment_command(gatsim::ExperimentId id, const ExperimentArgs& args) {
  std::optional<gatsim::KeyValueFile> file;
  if (!args.config_path.empty()) file = gatsim::KeyValueFile::load(args.config_path);
  bool as_printed = args.as_printed;
  if (!as_printed && file) {
    const auto own = file->get(gatsim::experiment_name(id), "as_printed");
    const auto global = file->get("", "as_printed");
    const auto v = own ? own : global;
    as_printed = v && (*v == "true" || *v == "1" || *v == "yes");
  }
  auto config = gatsim::ExperimentConfig::defaults(id, as_printed);
  if (file) config.apply(*file);
  config.as_printed = as_printed;
  if (args.seed) config.seed = *args.seed;
  if (args.trials) config.trials = *args.trials;
  if (args.out) config.out_dir = *args.out;
  if (args.t_grid) config.t_grid = gatsim::parse_double_list(*args.t_grid);
  if (args.workers) config.workers = *args.workers;
  config.validate();

  const auto start = std::chrono::steady_clock::now();
  const auto output = gatsim::run_experiment(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto manifest = gatsim::write_run(config, output, wall);
  std::cout << output.table.to_string();
  for (const auto& [k, v] : output.notes) std::cout << "# " << k << " = " << v << '\n';
  for (const auto& a : manifest.artifacts) std::cout << "# wrote " << (std::filesystem::path(config.out_dir) / a).string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gatsim: CSBM graph attention simulation and closed-form verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gatsim::tool_version());

  // gen
  GraphArgs gen_args;
  std::string gen_out = ".";
  std::string gen_name = "graph.txt";
  auto* gen = app.add_subcommand("gen", "Sample a CSBM graph and write it in the text format");
  add_graph_options(gen, gen_args);
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--name", gen_name, "Output file name")->capture_default_str();

  // forward
  std::string fwd_graph;
  std::string fwd_schedule = "0,0.5,0.5,5";
  std::optional<std::string> fwd_out;
  auto* fwd = app.add_subcommand("forward", "Run a layer schedule on a graph file and report accuracy");
  fwd->add_option("--graph", fwd_graph, "Graph file written by 'gen'")->required();
  fwd->add_option("--schedule", fwd_schedule, "Layers: u | <t> | xor:R:beta, comma-separated")->capture_default_str();
  fwd->add_option("--out", fwd_out, "Directory for forward.csv with per-node outputs");

  // moments
  gatsim::MomentInputs mom;
  std::size_t mom_mc = 0;
  std::uint64_t mom_seed = 1;
  auto* moments = app.add_subcommand("moments", "Closed-form post-layer mean and variance for one node");
  moments->add_option("--mu", mom.mu, "Feature mean")->capture_default_str();
  moments->add_option("--sigma", mom.sigma, "Feature standard deviation")->capture_default_str();
  moments->add_option("--t", mom.t, "Attention intensity")->capture_default_str();
  moments->add_option("--deg-p", mom.deg_p, "Same-class neighbor count")->required();
  moments->add_option("--deg-q", mom.deg_q, "Cross-class neighbor count")->required();
  moments->add_option("--mc", mom_mc, "Also run this many Monte Carlo neighborhoods (>= 1000)");
  moments->add_option("--seed", mom_seed, "Monte Carlo seed")->capture_default_str();

  // oversmooth
  GraphArgs os_args;
  double os_t = 0.0;
  std::size_t os_layers = 100;
  double os_threshold = 0.01;
  std::size_t os_axioms = 0;
  std::optional<std::string> os_out;
  bool os_log = false;
  auto* oversmooth = app.add_subcommand("oversmooth", "Trace gamma through a deep SignSym(t) network");
  add_graph_options(oversmooth, os_args);
  oversmooth->add_option("--t", os_t, "Attention intensity of every layer")->capture_default_str();
  oversmooth->add_option("--layers", os_layers, "Layer count")->capture_default_str();
  oversmooth->add_option("--threshold", os_threshold, "Decay-rate threshold for the verdict")->capture_default_str();
  oversmooth->add_option("--axioms", os_axioms, "Instead check the similarity axioms on this many samples");
  oversmooth->add_option("--out", os_out, "Directory for oversmooth.csv and oversmooth.svg");
  oversmooth->add_flag("--log-scale", os_log, "Log-scale y axis in the plot");

  // experiments
  ExperimentArgs exp_args[5];
  const std::pair<const char*, gatsim::ExperimentId> experiments[5] = {
      {"exp1", gatsim::ExperimentId::Exp1},
      {"exp2", gatsim::ExperimentId::Exp2},
      {"exp3", gatsim::ExperimentId::Exp3},
      {"exp4", gatsim::ExperimentId::Exp4},
      {"validate", gatsim::ExperimentId::ValidateMoments},
  };
  const char* descriptions[5] = {
      "Accuracy against t for several a (four SignSym layers)",
      "Accuracy against t for several mu (three SignSym layers)",
      "gamma per layer through 100 SignSym(t) layers",
      "GCN, fixed-t GAT and GAT* accuracy across an SNR sweep",
      "Closed-form moments against Monte Carlo on a grid",
  };
  CLI::App* exp_cmds[5];
  for (int k = 0; k < 5; ++k) {
    exp_cmds[k] = app.add_subcommand(experiments[k].first, descriptions[k]);
    add_experiment_options(exp_cmds[k], exp_args[k]);
  }

  // plot
  std::string plot_csv;
  std::optional<std::string> plot_out;
  bool plot_log = false;
  std::optional<double> plot_marker;
  std::string plot_kind = "auto";
  auto* plot = app.add_subcommand("plot", "Render an experiment CSV as an SVG line plot");
  plot->add_option("--csv", plot_csv, "Input CSV")->required();
  plot->add_option("--out", plot_out, "Output SVG path or directory (default: next to the CSV)");
  plot->add_flag("--log-scale", plot_log, "Log-scale y axis");
  plot->add_option("--marker", plot_marker, "Vertical reference line at this x value");
  plot->add_option("--kind", plot_kind, "auto | accuracy-t | gamma-layer | accuracy-snr")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      const auto params = graph_params(gen_args);
      const auto graph = gatsim::sample_csbm(params, gen_args.seed);
      std::filesystem::create_directories(gen_out);
      const auto path = (std::filesystem::path(gen_out) / gen_name).string();
      std::ofstream out(path, std::ios::binary);
      if (!out) throw gatsim::ParameterError("cannot write " + path);
      gatsim::write_graph(out, graph);
      std::cout << "wrote " << path << " (n=" << graph.n() << ", edges=" << graph.edge_count()
                << ", assumption1=" << (params.assumption1() ? "true" : "false") << ")\n";
      return kExitOk;
    }
    if (fwd->parsed()) {
      std::ifstream in(fwd_graph);
      if (!in) throw gatsim::ParameterError("cannot open graph file " + fwd_graph);
      const auto graph = gatsim::read_graph(in);
      const auto schedule = parse_schedule(fwd_schedule);
      const auto run = gatsim::run_network(graph, schedule, false);
      std::cout << "schedule = " << schedule.describe() << '\n'
                << "accuracy = " << gatsim::format_number(run.result.accuracy) << '\n'
                << "perfect = " << (run.result.perfect ? "true" : "false") << '\n'
                << "isolated_nodes = " << run.trace.isolated_nodes << '\n';
      if (fwd_out) {
        gatsim::CsvTable table({"node", "label", "input", "output", "sign"});
        const auto& final_features = run.trace.snapshots.back();
        for (std::size_t i = 0; i < graph.n(); ++i)
          table.add_row({static_cast<double>(i), static_cast<double>(graph.labels()[i]), graph.features()[i],
                         final_features[i], static_cast<double>(run.result.outputs[i])});
        std::filesystem::create_directories(*fwd_out);
        table.save((std::filesystem::path(*fwd_out) / "forward.csv").string());
      }
      return kExitOk;
    }
    if (moments->parsed()) {
      const auto d = gatsim::closed_form_detail(mom);
      std::cout << "y = " << gatsim::format_number(d.scalars.y) << '\n'
                << "z = " << gatsim::format_number(d.scalars.z) << '\n'
                << "A_plus = " << gatsim::format_number(d.scalars.A_plus) << '\n'
                << "A_minus = " << gatsim::format_number(d.scalars.A_minus) << '\n'
                << "B_plus = " << gatsim::format_number(d.scalars.B_plus) << '\n'
                << "B_minus = " << gatsim::format_number(d.scalars.B_minus) << '\n'
                << "S = " << gatsim::format_number(d.S) << '\n'
                << "T = " << gatsim::format_number(d.T) << '\n'
                << "S_hat = " << gatsim::format_number(d.S_hat) << '\n'
                << "T_hat = " << gatsim::format_number(d.T_hat) << '\n'
                << "closed_mean = " << gatsim::format_number(d.mean) << '\n';
      const auto exact = gatsim::exact_moments(mom);
      std::cout << "exact_mean = " << gatsim::format_number(exact.mu_prime) << '\n'
                << "exact_var = " << gatsim::format_number(exact.var_prime) << '\n';
      if (mom_mc > 0) {
        const auto mc = gatsim::monte_carlo_moments(mom, mom_mc, mom_seed);
        std::cout << "mc_mean = " << gatsim::format_number(mc.mean) << '\n'
                  << "mc_mean_se = " << gatsim::format_number(mc.mean_se) << '\n'
                  << "mc_var = " << gatsim::format_number(mc.var) << '\n'
                  << "mc_var_se = " << gatsim::format_number(mc.var_se) << '\n';
      }
      // Printed last: throws for a variance below -1e-9.
      std::cout << "closed_var = " << gatsim::format_number(gatsim::closed_form_var(mom)) << '\n';
      return kExitOk;
    }
    if (oversmooth->parsed()) {
      if (os_axioms > 0) {
        const auto report = gatsim::check_similarity_axioms(os_axioms, os_args.seed);
        std::cout << "samples = " << report.samples << '\n'
                  << "zero_iff_constant = " << (report.zero_iff_constant ? "true" : "false") << '\n'
                  << "triangle = " << (report.triangle ? "true" : "false") << '\n'
                  << "translation = " << (report.translation ? "true" : "false") << '\n'
                  << "negation = " << (report.negation ? "true" : "false") << '\n'
                  << "max_triangle_excess = " << gatsim::format_number(report.max_triangle_excess) << '\n';
        return report.passed() ? kExitOk : kExitNumerical;
      }
      const auto params = graph_params(os_args);
      const auto graph = gatsim::sample_csbm(params, os_args.seed);
      const auto trace =
          gatsim::trace_gamma(graph, gatsim::LayerSchedule::repeat(gatsim::SignSym{os_t}, os_layers));
      gatsim::CsvTable table({"t", "layer", "gamma"});
      for (std::size_t l = 0; l < trace.gamma_values.size(); ++l)
        table.add_row({os_t, static_cast<double>(l), trace.gamma_values[l]});
      std::cout << table.to_string();
      if (trace.gamma_values.size() >= 3) {
        const auto fit = gatsim::fit_decay(trace, os_threshold);
        std::cout << "# slope = " << gatsim::format_number(fit.slope) << '\n'
                  << "# oversmoothing = " << (fit.oversmoothing ? "true" : "false") << '\n';
      }
      if (os_out) {
        std::filesystem::create_directories(*os_out);
        table.save((std::filesystem::path(*os_out) / "oversmooth.csv").string());
        gatsim::PlotOptions options;
        options.log_scale = os_log;
        options.title = "oversmooth";
        std::ofstream svg(std::filesystem::path(*os_out) / "oversmooth.svg", std::ios::binary);
        svg << gatsim::render_plot(table, options);
      }
      return kExitOk;
    }
    for (int k = 0; k < 5; ++k)
      if (exp_cmds[k]->parsed()) return run_experiment_command(experiments[k].second, exp_args[k]);
    if (plot->parsed()) {
      gatsim::PlotOptions options;
      options.log_scale = plot_log;
      options.marker = plot_marker;
      if (plot_kind == "accuracy-t") options.kind = gatsim::PlotKind::AccuracyVsT;
      else if (plot_kind == "gamma-layer") options.kind = gatsim::PlotKind::GammaVsLayer;
      else if (plot_kind == "accuracy-snr") options.kind = gatsim::PlotKind::AccuracyVsSnr;
      else if (plot_kind != "auto") throw gatsim::ParameterError("unknown plot kind '" + plot_kind + "'");
      std::filesystem::path target;
      if (!plot_out) {
        target = std::filesystem::path(plot_csv).replace_extension(".svg");
      } else if (std::filesystem::is_directory(*plot_out)) {
        target = std::filesystem::path(*plot_out) / std::filesystem::path(plot_csv).filename().replace_extension(".svg");
      } else {
        target = *plot_out;
      }
      gatsim::emit_plot(plot_csv, target.string(), options);
      std::cout << "wrote " << target.string() << '\n';
      return kExitOk;
    }
  } catch (const gatsim::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gatsim::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gatsim::NumericalConsistencyError& e) {
    std::cerr << "numerical consistency error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
