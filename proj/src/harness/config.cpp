#include "grfopt/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "grfopt/errors.hpp"

namespace grfopt {

namespace {

using json = nlohmann::json;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (!quoted && (line[i] == '#' || line[i] == ';')) return line.substr(0, i);
  }
  return line;
}

json parse_value(const std::string& raw) {
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) return json(raw);
  return value;
}

struct Entry {
  json value;
  int line;
};

using Table = std::map<std::string, std::map<std::string, Entry>>;

[[noreturn]] void fail(const std::string& section, const std::string& key, int line,
                       const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + section + "." + key + ": " + what);
}

double as_double(const std::string& sec, const std::string& key, const Entry& e) {
  if (!e.value.is_number()) fail(sec, key, e.line, "expected a number");
  return e.value.get<double>();
}

std::uint64_t as_count(const std::string& sec, const std::string& key, const Entry& e) {
  if (e.value.is_number_unsigned()) return e.value.get<std::uint64_t>();
  if (e.value.is_number_integer() && e.value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(e.value.get<std::int64_t>());
  }
  fail(sec, key, e.line, "expected a non-negative integer");
}

bool as_bool(const std::string& sec, const std::string& key, const Entry& e) {
  if (!e.value.is_boolean()) fail(sec, key, e.line, "expected true or false");
  return e.value.get<bool>();
}

std::string as_string(const std::string& sec, const std::string& key, const Entry& e) {
  if (!e.value.is_string()) fail(sec, key, e.line, "expected a string");
  return e.value.get<std::string>();
}

std::vector<double> as_doubles(const std::string& sec, const std::string& key, const Entry& e) {
  if (e.value.is_number()) return {e.value.get<double>()};
  if (!e.value.is_array()) fail(sec, key, e.line, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& v : e.value) {
    if (!v.is_number()) fail(sec, key, e.line, "expected a list of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Projection parse_projection(const std::string& name, int line) {
  if (name == "none") return Projection::none;
  if (name == "sphere") return Projection::sphere;
  if (name == "ball") return Projection::ball;
  fail("algorithm", "projection", line, "unknown projection '" + name + "'");
}

}  // namespace

JitterPolicy NumericsSpec::policy() const {
  JitterPolicy p = JitterPolicy::escalating(jitter_start, jitter_max);
  p.pseudo_inverse_fallback = pseudo_inverse;
  return p;
}

PredictorOptions NumericsSpec::predictor_options() const {
  PredictorOptions o;
  o.policy = policy();
  o.freeze_dimension = freeze_dimension;
  return o;
}

SamplerOptions NumericsSpec::sampler_options(std::vector<double> epsilons) const {
  SamplerOptions o;
  o.policy = policy();
  o.freeze_dimension = freeze_dimension;
  o.epsilons = std::move(epsilons);
  return o;
}

Mode parse_mode(const std::string& name) {
  static const std::map<std::string, Mode> modes{
      {"predict", Mode::predict},   {"simulate", Mode::simulate},
      {"verify", Mode::verify},     {"two_init", Mode::two_init},
      {"two-init", Mode::two_init}, {"halting", Mode::halting},
      {"barrier", Mode::barrier},   {"check_kernel", Mode::check_kernel},
      {"check-kernel", Mode::check_kernel}};
  const auto it = modes.find(name);
  if (it == modes.end()) throw ConfigError("unknown mode '" + name + "'");
  return it->second;
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::predict: return "predict";
    case Mode::simulate: return "simulate";
    case Mode::verify: return "verify";
    case Mode::two_init: return "two_init";
    case Mode::halting: return "halting";
    case Mode::barrier: return "barrier";
    case Mode::check_kernel: return "check_kernel";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text) {
  Table table;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      table[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside of a section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (table[section].count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + section + "." + key);
    }
    table[section][key] = Entry{parse_value(value), line_no};
  }

  ExperimentConfig cfg;
  using Handler = std::function<void(const std::string&, const std::string&, const Entry&)>;
  const std::map<std::string, std::map<std::string, Handler>> handlers{
      {"kernel",
       {{"type", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.kernel.type = as_string(s, k, e); }},
        {"atoms",
         [&](const std::string& s, const std::string& k, const Entry& e) {
           if (!e.value.is_array()) fail(s, k, e.line, "expected a list of [weight, scale] pairs");
           cfg.kernel.atoms.clear();
           for (const auto& a : e.value) {
             if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
               fail(s, k, e.line, "expected a list of [weight, scale] pairs");
             }
             cfg.kernel.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
           }
         }},
        {"mean_level", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.kernel.mean_level = as_double(s, k, e); }},
        {"coeffs", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.kernel.coeffs = as_doubles(s, k, e); }},
        {"sigma_A", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.kernel.sigma_a = as_double(s, k, e); }},
        {"sigma_eta", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.kernel.sigma_eta = as_double(s, k, e); }},
        {"R", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.kernel.r = as_double(s, k, e); }}}},
      {"algorithm",
       {{"type", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.algorithm.type = as_string(s, k, e); }},
        {"alpha", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.algorithm.alpha = as_double(s, k, e); }},
        {"beta", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.algorithm.beta = as_double(s, k, e); }},
        {"projection",
         [&](const std::string& s, const std::string& k, const Entry& e) {
           cfg.algorithm.projection = parse_projection(as_string(s, k, e), e.line);
         }},
        {"radius", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.algorithm.radius = as_double(s, k, e); }}}},
      {"experiment",
       {{"mode",
         [&](const std::string& s, const std::string& k, const Entry& e) {
           try {
             cfg.mode = parse_mode(as_string(s, k, e));
           } catch (const ConfigError& err) {
             fail(s, k, e.line, err.what());
           }
         }},
        {"lambda", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.lambda = as_double(s, k, e); }},
        {"N_list",
         [&](const std::string& s, const std::string& k, const Entry& e) {
           cfg.n_list.clear();
           if (e.value.is_array()) {
             for (const auto& v : e.value) cfg.n_list.push_back(as_count(s, k, Entry{v, e.line}));
           } else {
             cfg.n_list.push_back(as_count(s, k, e));
           }
         }},
        {"steps", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.steps = as_count(s, k, e); }},
        {"replications", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.replications = as_count(s, k, e); }},
        {"epsilon", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.epsilons = as_doubles(s, k, e); }},
        {"master_seed", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.master_seed = as_count(s, k, e); }},
        {"output", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.output = as_string(s, k, e); }}}},
      {"numerics",
       {{"freeze_dimension",
         [&](const std::string& s, const std::string& k, const Entry& e) { cfg.numerics.freeze_dimension = as_bool(s, k, e); }},
        {"pseudo_inverse",
         [&](const std::string& s, const std::string& k, const Entry& e) { cfg.numerics.pseudo_inverse = as_bool(s, k, e); }},
        {"jitter_start",
         [&](const std::string& s, const std::string& k, const Entry& e) { cfg.numerics.jitter_start = as_double(s, k, e); }},
        {"jitter_max", [&](const std::string& s, const std::string& k, const Entry& e) { cfg.numerics.jitter_max = as_double(s, k, e); }},
        {"quadrature_points", [&](const std::string& s, const std::string& k, const Entry& e) {
           cfg.numerics.quadrature_points = static_cast<int>(as_count(s, k, e));
         }}}}};

  for (const auto& [sec, entries] : table) {
    const auto hs = handlers.find(sec);
    if (hs == handlers.end()) throw ConfigError("unknown section [" + sec + "]");
    for (const auto& [key, entry] : entries) {
      const auto h = hs->second.find(key);
      if (h == hs->second.end()) fail(sec, key, entry.line, "unknown key");
      h->second(sec, key, entry);
    }
  }
  // Without an explicit mode the caller picks one, and validates again.
  ExperimentConfig probe = cfg;
  if (!table.count("experiment") || !table.at("experiment").count("mode")) probe.mode = Mode::predict;
  probe.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> kernels{"stationary_schoenberg", "spin_glass", "quadratic"};
  static const std::set<std::string> algorithms{"gd", "heavy_ball", "nesterov", "fr_cg"};
  if (!kernels.count(kernel.type)) throw ConfigError("unknown kernel.type '" + kernel.type + "'");
  if (!algorithms.count(algorithm.type)) {
    throw ConfigError("unknown algorithm.type '" + algorithm.type + "'");
  }
  if (steps < 1) throw ConfigError("experiment.steps must be >= 1");
  if (!(lambda >= 0.0)) throw ConfigError("experiment.lambda must be >= 0");
  if (!(numerics.jitter_start > 0.0) || numerics.jitter_max < numerics.jitter_start) {
    throw ConfigError("numerics: need 0 < jitter_start <= jitter_max");
  }
  if (numerics.quadrature_points < 1) throw ConfigError("numerics.quadrature_points must be >= 1");

  const bool monte_carlo = mode == Mode::simulate || mode == Mode::verify ||
                           mode == Mode::two_init || mode == Mode::halting;
  if (!monte_carlo) return;
  if (n_list.empty()) throw ConfigError("experiment.N_list must not be empty");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw ConfigError("experiment.N_list must be strictly increasing");
  }
  if (n_list.front() <= steps + 2) throw ConfigError("experiment.N_list entries must exceed steps + 2");
  if (replications < 2) throw ConfigError("experiment.replications must be >= 2");
}

KernelModel build_kernel(const KernelSpec& spec) {
  try {
    if (spec.type == "stationary_schoenberg") {
      return lift_stationary(SchoenbergMixture(spec.atoms), spec.mean_level);
    }
    if (spec.type == "spin_glass") return spin_glass_kernel(SpinGlassMixture(spec.coeffs));
    if (spec.type == "quadratic") return quadratic_kernel(spec.sigma_a, spec.sigma_eta, spec.r);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  } catch (const InvalidMixtureError& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
  throw ConfigError("unknown kernel.type '" + spec.type + "'");
}

GsaSpec build_algorithm(const AlgorithmSpec& spec) {
  try {
    GsaSpec base = [&] {
      if (spec.type == "gd") return gd(spec.alpha);
      if (spec.type == "heavy_ball") return heavy_ball(spec.alpha, spec.beta);
      if (spec.type == "nesterov") return nesterov(spec.alpha, spec.beta);
      if (spec.type == "fr_cg") return fr_cg(spec.alpha);
      throw ConfigError("unknown algorithm.type '" + spec.type + "'");
    }();
    return with_projection(std::move(base), spec.projection, spec.radius);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("algorithm: ") + e.what());
  }
}

}  // namespace grfopt
