#include "oeecast/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "oeecast/errors.hpp"

namespace oeecast {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Strips a trailing comment that is not inside double quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (!quoted && (line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return line.substr(0, i);
    }
  }
  return line;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("bad value '" + v + "' for " + key);
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument("bad value '" + v + "' for " + key);
  }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw InvalidArgument("empty list for " + key);
  return out;
}

std::string located(const std::string& source, int line, const std::string& msg) {
  return source + ":" + std::to_string(line) + ": " + msg;
}

void apply_section(PipelineConfig& cfg, const ConfigSection& sec, const std::filesystem::path& base,
                   const std::string& source) {
  for (const auto& e : sec.entries) {
    try {
      apply_config_entry(cfg, e.key, e.value, base);
    } catch (const InvalidArgument& err) {
      throw ParseError(located(source, e.line, err.what()));
    }
  }
}

}  // namespace

std::vector<ConfigSection> parse_config_text(const std::string& text, const std::string& source) {
  std::vector<ConfigSection> out(1);
  std::set<std::string> names;
  std::set<std::string> keys;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(located(source, line, "unterminated section header"));
      const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
      if (name.empty()) throw ParseError(located(source, line, "empty section name"));
      if (!names.insert(name).second) throw ParseError(located(source, line, "duplicate section [" + name + "]"));
      out.push_back({name, {}});
      keys.clear();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(located(source, line, "expected key = value"));
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ParseError(located(source, line, "missing key"));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!keys.insert(key).second) throw ParseError(located(source, line, "duplicate key '" + key + "'"));
    out.back().entries.push_back({key, value, line});
  }
  return out;
}

std::vector<ConfigSection> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& v,
                        const std::filesystem::path& base_dir) {
  if (key == "dataset") {
    const std::filesystem::path p(v);
    cfg.dataset = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else if (key == "value_column") {
    cfg.value_column = v;
  } else if (key == "timestamp_column") {
    cfg.timestamp_column = v;
  } else if (key == "model") {
    cfg.model = parse_model_kind(v);
  } else if (key == "feature_mode" || key == "mode") {
    cfg.feature_mode = parse_feature_mode(v);
  } else if (key == "selection_mode" || key == "selection") {
    cfg.selection_mode = parse_selection_mode(v);
  } else if (key == "spec") {
    cfg.spec = sarimax::parse_spec(v);
  } else if (key == "periods") {
    cfg.periods = parse_int_list(key, v);
  } else if (key == "decompose_passes") {
    cfg.decompose_passes = parse_number<int>(key, v);
  } else if (key == "window") {
    cfg.window = parse_number<std::size_t>(key, v);
  } else if (key == "horizon") {
    cfg.horizon = parse_number<std::size_t>(key, v);
  } else if (key == "test_fraction") {
    cfg.test_fraction = parse_real(key, v);
  } else if (key == "refit_interval") {
    cfg.refit_interval = parse_number<std::size_t>(key, v);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "naive_period") {
    cfg.naive_period = parse_number<int>(key, v);
  } else if (key == "max_origins") {
    cfg.max_origins = parse_number<std::size_t>(key, v);
  } else if (key == "variance_threshold") {
    cfg.variance_threshold = parse_real(key, v);
  } else if (key == "rho_threshold") {
    cfg.rho_threshold = parse_real(key, v);
  } else if (key == "rfe_alpha") {
    cfg.rfe_alpha = parse_real(key, v);
  } else if (key == "rfe_min_features") {
    cfg.rfe_min_features = parse_number<std::size_t>(key, v);
  } else if (key == "pso_particles") {
    cfg.pso.swarm_size = parse_number<int>(key, v);
  } else if (key == "pso_iterations") {
    cfg.pso.max_iterations = parse_number<int>(key, v);
  } else if (key == "pso_inertia") {
    cfg.pso.inertia = parse_real(key, v);
  } else if (key == "pso_cognitive") {
    cfg.pso.cognitive = parse_real(key, v);
  } else if (key == "pso_social") {
    cfg.pso.social = parse_real(key, v);
  } else if (key == "pso_runs") {
    cfg.pso.runs = parse_number<int>(key, v);
  } else if (key == "pso_threshold") {
    cfg.pso.stability_threshold = parse_number<int>(key, v);
  } else if (key == "pso_stagnation") {
    cfg.pso.stagnation_limit = parse_number<int>(key, v);
  } else if (key == "pso_subset") {
    if (v != "best" && v != "stable") throw InvalidArgument("pso_subset must be best or stable");
    cfg.pso_use_stable_subset = v == "stable";
  } else if (key == "tda_delay") {
    cfg.tda.delay = parse_number<int>(key, v);
  } else if (key == "tda_dimension") {
    cfg.tda.embed_dim = parse_number<int>(key, v);
  } else if (key == "tda_heat_sigma") {
    cfg.tda.heat_sigma = parse_real(key, v);
  } else if (key == "label") {
    cfg.label = v;
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

ConfigFile load_config(const std::filesystem::path& path) {
  const auto sections = parse_config_file(path);
  const auto base = path.parent_path();
  ConfigFile out;
  for (const auto& sec : sections) {
    if (sec.name.empty() || sec.name == "pipeline") {
      apply_section(out.pipeline, sec, base, path.string());
    } else if (sec.name == "benchmark") {
      for (const auto& e : sec.entries) {
        try {
          if (e.key == "statistical_selection") {
            out.statistical_selection = parse_selection_mode(e.value);
          } else if (e.key == "topological_selection") {
            out.topological_selection = parse_selection_mode(e.value);
          } else {
            throw InvalidArgument("unknown benchmark key '" + e.key + "'");
          }
        } catch (const InvalidArgument& err) {
          throw ParseError(located(path.string(), e.line, err.what()));
        }
      }
    } else {
      throw ParseError(path.string() + ": unknown section [" + sec.name + "]");
    }
  }
  try {
    out.pipeline.validate();
  } catch (const InvalidArgument& err) {
    throw ParseError(path.string() + ": " + err.what());
  }
  return out;
}

const RegistryEntry* EquipmentRegistry::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

EquipmentRegistry parse_registry(const std::string& text, const std::filesystem::path& base_dir,
                                 const std::string& source) {
  const auto sections = parse_config_text(text, source);
  PipelineConfig defaults;
  apply_section(defaults, sections.front(), base_dir, source);
  EquipmentRegistry reg;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    RegistryEntry e{sections[i].name, defaults};
    apply_section(e.config, sections[i], base_dir, source);
    if (e.config.dataset.empty()) throw ParseError(source + ": [" + e.id + "] has no dataset");
    if (!std::filesystem::is_regular_file(e.config.dataset)) {
      throw NotFound(source + ": dataset for [" + e.id + "] not found: " + e.config.dataset.string());
    }
    try {
      e.config.validate();
    } catch (const InvalidArgument& err) {
      throw ParseError(source + ": [" + e.id + "] " + err.what());
    }
    reg.entries.push_back(std::move(e));
  }
  if (reg.entries.empty()) throw ParseError(source + ": registry has no equipment sections");
  return reg;
}

EquipmentRegistry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open registry '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_registry(ss.str(), path.parent_path(), path.string());
}

}  // namespace oeecast
