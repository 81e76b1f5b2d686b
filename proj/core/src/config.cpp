#include "gatsim/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "gatsim/error.hpp"

namespace gatsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw ParameterError("unterminated list: " + text);
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_size(const std::string& text) {
  const auto v = parse_u64(text);
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& text) {
  const auto v = trim(text);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParameterError("expected a boolean, got '" + text + "'");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + format_double(values[i]);
  return out;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile file;
  std::string current;
  file.sections_[current];
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", line_no);
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ParseError("empty section name", line_no);
      file.sections_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_no);
    std::replace(key.begin(), key.end(), '-', '_');
    file.sections_[current].push_back({key, value, line_no});
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file " + path);
  return parse(in);
}

std::optional<std::string> KeyValueFile::get(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end()) return std::nullopt;
  std::optional<std::string> found;
  for (const auto& e : it->second)
    if (e.key == key) found = e.value;
  return found;
}

const std::vector<KeyValueFile::Entry>& KeyValueFile::section(const std::string& name) const {
  static const std::vector<Entry> empty;
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

double parse_double(const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) throw ParameterError("expected a number, got '" + text + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& text) {
  const std::string v = trim(text);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw ParameterError("expected a non-negative integer, got '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(item));
  return out;
}

std::string experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::Exp1: return "exp1";
    case ExperimentId::Exp2: return "exp2";
    case ExperimentId::Exp3: return "exp3";
    case ExperimentId::Exp4: return "exp4";
    case ExperimentId::ValidateMoments: return "validate";
    case ExperimentId::OversmoothAxioms: return "oversmooth-axioms";
  }
  return "unknown";
}

ExperimentId experiment_from_name(const std::string& name) {
  for (auto id : {ExperimentId::Exp1, ExperimentId::Exp2, ExperimentId::Exp3, ExperimentId::Exp4,
                  ExperimentId::ValidateMoments, ExperimentId::OversmoothAxioms})
    if (experiment_name(id) == name) return id;
  if (name == "validate-moments") return ExperimentId::ValidateMoments;
  throw ParameterError("unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentId id, bool as_printed) {
  ExperimentConfig c;
  c.id = id;
  c.as_printed = as_printed;
  switch (id) {
    case ExperimentId::Exp1:
      c.a_values = {2.1, 2.5, 3.0};
      c.b = 2.0;
      c.t_grid = {0.0, 1.0, 2.0, 4.0, 8.0};
      c.layers = 4;
      c.trials = 100;
      break;
    case ExperimentId::Exp2:
      c.a_values = {6.0};
      c.b = 2.0;
      c.mu_values = {2.0, 5.0, 10.0};
      c.t_grid = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
      c.layers = 3;
      c.trials = 100;
      break;
    case ExperimentId::Exp3:
      c.a_values = {as_printed ? 2.0 : 3.0};
      c.b = as_printed ? 3.0 : 2.0;
      c.mu_values = {10.0};
      c.t_grid = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
      c.layers = 100;
      c.trials = 20;
      break;
    case ExperimentId::Exp4:
      c.a_values = {as_printed ? 2.0 : 4.0};
      c.b = as_printed ? 4.0 : 2.0;
      c.layers = 4;
      c.trials = 100;
      break;
    case ExperimentId::ValidateMoments:
      c.t_grid = {0.0, 0.5, 1.0, 2.0};
      c.trials = 1;
      break;
    case ExperimentId::OversmoothAxioms:
      c.trials = 1;
      break;
  }
  return c;
}

void ExperimentConfig::apply(const KeyValueFile& file) {
  const std::string own = experiment_name(id);
  for (const std::string& name : {std::string(), own}) {
    for (const auto& e : file.section(name)) {
      try {
        apply_key(e.key, e.value);
      } catch (const ParameterError& err) {
        throw ParseError(err.what(), e.line);
      }
    }
  }
}

void ExperimentConfig::apply_key(const std::string& key, const std::string& value) {
  if (key == "n") n = parse_size(value);
  else if (key == "sigma") sigma = parse_double(value);
  else if (key == "a") a_values = parse_double_list(value);
  else if (key == "b") b = parse_double(value);
  else if (key == "mu") mu_values = parse_double_list(value);
  else if (key == "t_grid" || key == "t") t_grid = parse_double_list(value);
  else if (key == "layers") layers = parse_size(value);
  else if (key == "trials") trials = parse_size(value);
  else if (key == "seed") seed = parse_u64(value);
  else if (key == "out" || key == "out_dir") out_dir = value;
  else if (key == "as_printed") as_printed = parse_bool(value);
  else if (key == "workers") workers = static_cast<unsigned>(parse_size(value));
  else if (key == "decay_threshold") decay_threshold = parse_double(value);
  else if (key == "snr_points") snr_points = parse_size(value);
  else if (key == "snr_low") snr_low = parse_double(value);
  else if (key == "snr_high") snr_high = parse_double(value);
  else if (key == "gat_t") gat_t = parse_double(value);
  else if (key == "gatstar_t") gatstar_t = parse_double_list(value);
  else if (key == "snr_grid") snr_grid = parse_double_list(value);
  else if (key == "validate_sigma") validate_sigma = parse_double(value);
  else if (key == "mc_trials") mc_trials = parse_size(value);
  else if (key == "axiom_samples") axiom_samples = parse_size(value);
  else if (key == "degree_pairs") {
    const auto flat = parse_double_list(value);
    if (flat.size() % 2 != 0) throw ParameterError("degree_pairs needs an even number of entries");
    degree_pairs.clear();
    for (std::size_t i = 0; i < flat.size(); i += 2) {
      if (flat[i] < 0 || flat[i + 1] < 0 || flat[i] != std::floor(flat[i]) || flat[i + 1] != std::floor(flat[i + 1]))
        throw ParameterError("degree_pairs entries must be non-negative integers");
      degree_pairs.emplace_back(static_cast<std::size_t>(flat[i]), static_cast<std::size_t>(flat[i + 1]));
    }
  } else {
    throw ParameterError("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  switch (id) {
    case ExperimentId::Exp1:
    case ExperimentId::Exp2:
    case ExperimentId::Exp3:
    case ExperimentId::Exp4:
      if (n < 16) throw ParameterError("n must be at least 16");
      if (a_values.empty()) throw ParameterError("a must list at least one value");
      if (layers < 1) throw ParameterError("layers must be at least 1");
      for (double m : mu_values)
        if (!(m > 0.0)) throw ParameterError("mu values must be positive");
      if (id != ExperimentId::Exp4 && t_grid.empty()) throw ParameterError("t_grid must not be empty");
      for (double t : t_grid)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("t values must be finite and >= 0");
      if (id == ExperimentId::Exp2 && mu_values.empty()) throw ParameterError("exp2 needs mu values");
      if (id == ExperimentId::Exp4) {
        if (snr_points < 1) throw ParameterError("snr_points must be at least 1");
        if (!(snr_low > 0.0 && snr_high >= snr_low)) throw ParameterError("need 0 < snr_low <= snr_high");
        if (gatstar_t.empty()) throw ParameterError("gatstar_t must not be empty");
      }
      break;
    case ExperimentId::ValidateMoments:
      if (snr_grid.empty() || t_grid.empty() || degree_pairs.empty())
        throw ParameterError("validation grid must not be empty");
      if (mc_trials < 1000) throw ParameterError("mc_trials must be at least 1000");
      if (!(validate_sigma > 0.0)) throw ParameterError("validate_sigma must be positive");
      for (auto [p, q] : degree_pairs)
        if (p + q == 0) throw ParameterError("degree pair must have at least one neighbor");
      break;
    case ExperimentId::OversmoothAxioms:
      if (axiom_samples < 1) throw ParameterError("axiom_samples must be at least 1");
      break;
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("seed", std::to_string(seed));
  out.emplace_back("trials", std::to_string(trials));
  out.emplace_back("as_printed", as_printed ? "true" : "false");
  switch (id) {
    case ExperimentId::Exp1:
    case ExperimentId::Exp2:
    case ExperimentId::Exp3:
    case ExperimentId::Exp4:
      out.emplace_back("n", std::to_string(n));
      out.emplace_back("sigma", format_double(sigma));
      out.emplace_back("a", format_list(a_values));
      out.emplace_back("b", format_double(b));
      if (!mu_values.empty()) out.emplace_back("mu", format_list(mu_values));
      if (!t_grid.empty()) out.emplace_back("t_grid", format_list(t_grid));
      out.emplace_back("layers", std::to_string(layers));
      if (id == ExperimentId::Exp3) out.emplace_back("decay_threshold", format_double(decay_threshold));
      if (id == ExperimentId::Exp4) {
        out.emplace_back("snr_points", std::to_string(snr_points));
        out.emplace_back("snr_low", format_double(snr_low));
        out.emplace_back("snr_high", format_double(snr_high));
        out.emplace_back("gat_t", format_double(gat_t));
        out.emplace_back("gatstar_t", format_list(gatstar_t));
      }
      break;
    case ExperimentId::ValidateMoments: {
      out.emplace_back("snr_grid", format_list(snr_grid));
      out.emplace_back("validate_sigma", format_double(validate_sigma));
      out.emplace_back("t_grid", format_list(t_grid));
      std::string pairs;
      for (std::size_t i = 0; i < degree_pairs.size(); ++i)
        pairs += (i ? ", " : "") + std::to_string(degree_pairs[i].first) + ", " + std::to_string(degree_pairs[i].second);
      out.emplace_back("degree_pairs", pairs);
      out.emplace_back("mc_trials", std::to_string(mc_trials));
      break;
    }
    case ExperimentId::OversmoothAxioms:
      out.emplace_back("axiom_samples", std::to_string(axiom_samples));
      break;
  }
  return out;
}

}  // namespace gatsim
