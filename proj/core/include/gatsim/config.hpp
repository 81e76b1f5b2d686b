#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gatsim {

// Flat "key = value" text with optional "[section]" headers. '#' starts a
// comment. Keys before any header belong to the global section "".
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::string& path);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  // Section entries in file order, with the line each came from.
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
  };
  const std::vector<Entry>& section(const std::string& name) const;
  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }

 private:
  std::map<std::string, std::vector<Entry>> sections_;
};

std::vector<double> parse_double_list(const std::string& text);
double parse_double(const std::string& text);
std::uint64_t parse_u64(const std::string& text);

enum class ExperimentId { Exp1, Exp2, Exp3, Exp4, ValidateMoments, OversmoothAxioms };

std::string experiment_name(ExperimentId id);
ExperimentId experiment_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentId id = ExperimentId::Exp1;
  std::size_t n = 3000;
  double sigma = 10.0;
  std::vector<double> a_values;
  double b = 2.0;
  // Empty means mu = 2 sigma sqrt(log n).
  std::vector<double> mu_values;
  std::vector<double> t_grid;
  std::size_t layers = 4;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool as_printed = false;
  unsigned workers = 0;
  // exp3
  double decay_threshold = 0.01;
  // exp4: SNR sweep as multiples of sqrt(log n)/cbrt(n), geometric spacing
  std::size_t snr_points = 20;
  double snr_low = 0.1;
  double snr_high = 10.0;
  double gat_t = 5.0;
  std::vector<double> gatstar_t = {0.0, 0.5, 0.5, 5.0};
  // validate: mu/sigma ratios (sigma fixed at validate_sigma) and degree pairs
  std::vector<double> snr_grid = {0.2, 1.0, 3.0};
  double validate_sigma = 1.0;
  std::vector<std::pair<std::size_t, std::size_t>> degree_pairs = {{20, 10}, {100, 40}};
  std::size_t mc_trials = 100000;
  // oversmooth-axioms
  std::size_t axiom_samples = 1000;

  // Defaults for one experiment; as_printed switches to the literal a/b values
  // of the experiments that print a < b.
  static ExperimentConfig defaults(ExperimentId id, bool as_printed = false);

  // Applies keys from the global section and the section named after the
  // experiment. Unknown keys throw ParameterError.
  void apply(const KeyValueFile& file);
  void apply_key(const std::string& key, const std::string& value);
  // Throws ParameterError when the configuration is unusable.
  void validate() const;
  // "key = value" lines that apply() reads back to an identical config.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

}  // namespace gatsim
