#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "pslshade/errors.hpp"
#include "pslshade/harness.hpp"

namespace pslshade::harness {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !in.eof()) throw ConfigError("invalid value '" + text + "' for '" + key + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError("invalid boolean '" + text + "' for '" + key + "'");
}

const std::set<std::string> kExperimentKeys{"algorithms", "dimensions", "budget_multiplier", "repetitions",
                                             "functions",  "combos",     "seed",              "suite_seed",
                                             "threads"};
const std::set<std::string> kPslshadeKeys{"ns", "archive_capacity", "init", "screening", "diagnostics",
                                          "dump_model"};
const std::set<std::string> kControlKeys{"n_init_per_dim", "n_min", "best_rate", "archive_rate",
                                         "memory_size",    "memory_f", "memory_cr"};

}  // namespace

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
  for (const auto& a : algorithms) {
    if (a != "lshade" && a != "pslshade") throw ConfigError("unknown algorithm '" + a + "'");
  }
  if (dimensions.empty()) throw ConfigError("at least one dimension is required");
  for (const auto d : dimensions) {
    if (d < suite::kMinDimension || d > suite::kMaxDimension)
      throw ConfigError("dimension must lie in [2, 100]");
  }
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (functions.empty()) throw ConfigError("at least one function is required");
  for (const int f : functions) {
    if (f < 1 || f > static_cast<int>(suite::kSuiteSize)) throw ConfigError("function ids must lie in [1, 10]");
  }
  if (combos.empty()) throw ConfigError("at least one transformation combo is required");
  if (ns_values.empty()) throw ConfigError("at least one N_s value is required");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  for (const auto d : dimensions) {
    const auto params = control_params(d);
    params.validate();
    for (const auto& v : variants()) screening(v).validate(d);
  }
}

std::vector<AlgorithmVariant> ExperimentConfig::variants() const {
  std::vector<AlgorithmVariant> out;
  for (const auto& a : algorithms) {
    if (a == "lshade") {
      out.push_back({"lshade", AlgorithmKind::Lshade, 1});
    } else {
      for (const auto ns : ns_values) {
        const std::string label = ns_values.size() > 1 ? "pslshade-ns" + std::to_string(ns) : "pslshade";
        out.push_back({label, AlgorithmKind::PsLshade, ns});
      }
    }
  }
  return out;
}

de::ControlParams ExperimentConfig::control_params(std::size_t dimension) const {
  de::ControlParams p = de::ControlParams::defaults(dimension, max_nfe(dimension));
  p.n_init = control.n_init_per_dim * dimension;
  p.n_min = control.n_min;
  p.best_rate = control.best_rate;
  p.archive_rate = control.archive_rate;
  p.memory_size = control.memory_size;
  p.memory_f_init = control.memory_f;
  p.memory_cr_init = control.memory_cr;
  return p;
}

prescreen::ScreeningConfig ExperimentConfig::screening(const AlgorithmVariant& v) const {
  prescreen::ScreeningConfig s;
  s.ns = v.ns;
  s.archive_capacity = archive_capacity;
  s.init = init;
  s.policy = policy;
  s.diagnostics = diagnostics;
  return s;
}

std::string ExperimentConfig::fingerprint(const AlgorithmVariant& v) const {
  std::ostringstream key;
  key << std::setprecision(17) << "v2|" << v.label << '|' << static_cast<int>(v.kind) << '|' << v.ns << '|'
      << budget_multiplier << '|' << seed << '|' << suite_seed << '|' << control.n_init_per_dim << '|'
      << control.n_min << '|' << control.best_rate << '|' << control.archive_rate << '|' << control.memory_size
      << '|' << control.memory_f << '|' << control.memory_cr;
  if (v.kind == AlgorithmKind::PsLshade) {
    key << '|' << archive_capacity << '|' << static_cast<int>(init) << '|' << static_cast<int>(policy) << '|'
        << diagnostics;
  }
  key << '|' << dump_model;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << label_hash(key.str());
  return hex.str();
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    const std::set<std::string>* allowed = nullptr;
    if (section == "experiment") allowed = &kExperimentKeys;
    if (section == "pslshade") allowed = &kPslshadeKeys;
    if (section == "control") allowed = &kControlKeys;
    if (!allowed) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, node] : body) {
      if (!allowed->count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      const std::string value = trim(node.get_value<std::string>());
      const std::string name = section + "." + key;

      if (key == "algorithms") {
        cfg.algorithms = split_list(value);
      } else if (key == "dimensions") {
        cfg.dimensions.clear();
        for (const auto& item : split_list(value)) cfg.dimensions.push_back(parse_number<std::size_t>(name, item));
      } else if (key == "budget_multiplier") {
        cfg.budget_multiplier = parse_number<std::int64_t>(name, value);
      } else if (key == "repetitions") {
        cfg.repetitions = parse_number<int>(name, value);
      } else if (key == "functions") {
        cfg.functions.clear();
        if (value == "all") {
          for (int f = 1; f <= static_cast<int>(suite::kSuiteSize); ++f) cfg.functions.push_back(f);
        } else {
          for (const auto& item : split_list(value)) {
            const std::string id = (!item.empty() && (item[0] == 'F' || item[0] == 'f')) ? item.substr(1) : item;
            cfg.functions.push_back(parse_number<int>(name, id));
          }
        }
      } else if (key == "combos") {
        cfg.combos.clear();
        if (value == "all") {
          cfg.combos.assign(suite::kAllCombos.begin(), suite::kAllCombos.end());
        } else {
          for (const auto& item : split_list(value)) cfg.combos.push_back(suite::parse_combo(item));
        }
      } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(name, value);
      } else if (key == "suite_seed") {
        cfg.suite_seed = parse_number<std::uint64_t>(name, value);
      } else if (key == "threads") {
        cfg.threads = parse_number<int>(name, value);
      } else if (key == "ns") {
        cfg.ns_values.clear();
        for (const auto& item : split_list(value)) cfg.ns_values.push_back(parse_number<std::size_t>(name, item));
      } else if (key == "archive_capacity") {
        cfg.archive_capacity = parse_number<std::size_t>(name, value);
      } else if (key == "init") {
        if (value == "lhs") {
          cfg.init = prescreen::InitMode::Lhs;
        } else if (value == "uniform") {
          cfg.init = prescreen::InitMode::Uniform;
        } else {
          throw ConfigError("init must be 'lhs' or 'uniform'");
        }
      } else if (key == "screening") {
        if (value == "surrogate") {
          cfg.policy = prescreen::ScreeningPolicy::Surrogate;
        } else if (value == "random") {
          cfg.policy = prescreen::ScreeningPolicy::Random;
        } else {
          throw ConfigError("screening must be 'surrogate' or 'random'");
        }
      } else if (key == "diagnostics") {
        cfg.diagnostics = parse_bool(name, value);
      } else if (key == "dump_model") {
        cfg.dump_model = parse_bool(name, value);
      } else if (key == "n_init_per_dim") {
        cfg.control.n_init_per_dim = parse_number<std::size_t>(name, value);
      } else if (key == "n_min") {
        cfg.control.n_min = parse_number<std::size_t>(name, value);
      } else if (key == "best_rate") {
        cfg.control.best_rate = parse_number<double>(name, value);
      } else if (key == "archive_rate") {
        cfg.control.archive_rate = parse_number<double>(name, value);
      } else if (key == "memory_size") {
        cfg.control.memory_size = parse_number<std::size_t>(name, value);
      } else if (key == "memory_f") {
        cfg.control.memory_f = parse_number<double>(name, value);
      } else if (key == "memory_cr") {
        cfg.control.memory_cr = parse_number<double>(name, value);
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace pslshade::harness
