#pragma once

// Strict flat-sectioned key=value configuration. Unknown sections, unknown
// keys and malformed values are hard errors carrying file:line positions —
// a silently ignored typo in an amplitude or a spectrum weight would
// invalidate every bound check downstream. parse_config resolves all defaults
// eagerly; resolved_ini renders the result canonically so a rerun from the
// echoed file reproduces the configuration byte for byte.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bidosim/bidomain_operator.hpp"
#include "bidosim/experiments.hpp"
#include "bidosim/ionic.hpp"
#include "bidosim/mesh.hpp"
#include "bidosim/noise.hpp"
#include "bidosim/sim.hpp"

namespace bidosim {

struct GridConfig {
  int dimension = 1;
  double extent = 3.14159265358979323846;
  double extent_y = 3.14159265358979323846;
  int nodes = 129;
};

struct ConductivityConfig {
  double intra = 1.0;
  double extra = 1.0;
};

struct ModelConfig {
  std::string kind = "fhn";  // fhn | aliev_panfilov | rogers_mcculloch | allen_cahn
  double eta = 0.8, a = 0.5, b = 1.0, c = 0.8;  // fhn defaults
  double d = 0.4, k = 8.0;
};

struct NoiseConfig {
  int modes = 0;  // 0 disables noise entirely
  double power = 3.0;
  double scale = 1.0;
  bool normalize = false;
  double normalize_trace = 1.0;
};

struct SimSection {
  double dt = 1e-3;
  double T = 1.0;
  std::string scheme = "imex";  // imex | em
  double epsilon = 0.0;
  int record_every = 1;
  double constant_source = 0.0;
  double u0_amplitude = 0.0, u0_offset = 0.0;
  int u0_mode = 1;
  double w0_amplitude = 0.0, w0_offset = 0.0;
  int w0_mode = 1;
  double box_u = 10.0, box_w = 10.0;  // half-widths of the condition box
};

struct ExperimentSection {
  std::uint64_t seed = 0;
  int replicas = 100;
  int threads = 1;
  double confidence_multiplier = 4.0;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};  // small-noise ladder
  double ratio_bound = 3.0;                             // small-noise
  double r = 0.3;                                       // tail threshold
  double epsilon = 0.1;                                 // tail amplitude
  double horizon = 1.0;                                 // tail / stationary horizon
  double eps1 = 0.2, eps2 = 0.1, burn_in = 1.0;         // stationary
  bool stationarity_hypotheses = false;
  std::vector<double> horizons{10, 20, 40};  // support
};

struct ResolvedConfig {
  GridConfig grid;
  ConductivityConfig conductivity;
  ModelConfig model;
  NoiseConfig noise;
  SimSection sim;
  ExperimentSection experiment;
  std::vector<SourceRect> rects;
};

namespace detail {

struct IniEntry {
  std::string value;
  int line = 0;
  bool used = false;
};
using IniSection = std::map<std::string, IniEntry>;
using IniDocument = std::vector<std::pair<std::string, IniSection>>;  // in file order

[[noreturn]] inline void config_error(const std::string& path, int line,
                                      const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool known_section(const std::string& name) {
  if (name == "grid" || name == "conductivity" || name == "model" || name == "noise" ||
      name == "sim" || name == "experiment")
    return true;
  if (name.rfind("source_rect_", 0) == 0) {
    const std::string n = name.substr(12);
    return !n.empty() && n.find_first_not_of("0123456789") == std::string::npos;
  }
  return false;
}

inline IniDocument parse_ini(std::istream& in, const std::string& path) {
  IniDocument doc;
  IniSection* current = nullptr;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') config_error(path, line, "malformed section header");
      const std::string name = trim(text.substr(1, text.size() - 2));
      if (!known_section(name)) config_error(path, line, "unknown section '[" + name + "]'");
      for (const auto& [existing, _] : doc)
        if (existing == name) config_error(path, line, "duplicate section '[" + name + "]'");
      doc.emplace_back(name, IniSection{});
      current = &doc.back().second;
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) config_error(path, line, "expected 'key = value'");
    if (!current) config_error(path, line, "key before any [section]");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) config_error(path, line, "empty key");
    if (current->count(key))
      config_error(path, line, "duplicate key '" + key + "'");
    (*current)[key] = IniEntry{value, line, false};
  }
  return doc;
}

// Typed readers. Every value must consume its full text.
inline double read_double(const IniEntry& e, const std::string& path, const char* key) {
  const std::string& v = e.value;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    config_error(path, e.line, std::string("value for '") + key + "' is not a number");
  return x;
}

inline long long read_int(const IniEntry& e, const std::string& path, const char* key) {
  const std::string& v = e.value;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    config_error(path, e.line, std::string("value for '") + key + "' is not an integer");
  return x;
}

inline bool read_bool(const IniEntry& e, const std::string& path, const char* key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  config_error(path, e.line, std::string("value for '") + key + "' must be true or false");
}

inline std::vector<double> read_list(const IniEntry& e, const std::string& path,
                                     const char* key) {
  std::vector<double> out;
  std::string item;
  std::istringstream stream(e.value);
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size())
      config_error(path, e.line, std::string("value for '") + key + "' is not a number list");
    out.push_back(x);
  }
  if (out.empty())
    config_error(path, e.line, std::string("value for '") + key + "' is not a number list");
  return out;
}

// Pulls a section's entries through a field table, flagging what it consumed;
// anything left unused afterwards is an unknown key.
struct SectionReader {
  IniSection* section = nullptr;  // null when the section is absent
  const std::string& path;
  std::string name;

  const IniEntry* find(const char* key) const {
    if (!section) return nullptr;
    auto it = section->find(key);
    if (it == section->end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  void get(const char* key, double& slot) const {
    if (const auto* e = find(key)) slot = read_double(*e, path, key);
  }
  void get(const char* key, int& slot) const {
    if (const auto* e = find(key)) slot = static_cast<int>(read_int(*e, path, key));
  }
  void get(const char* key, std::uint64_t& slot) const {
    if (const auto* e = find(key)) slot = static_cast<std::uint64_t>(read_int(*e, path, key));
  }
  void get(const char* key, bool& slot) const {
    if (const auto* e = find(key)) slot = read_bool(*e, path, key);
  }
  void get(const char* key, std::string& slot) const {
    if (const auto* e = find(key)) slot = e->value;
  }
  void get(const char* key, std::vector<double>& slot) const {
    if (const auto* e = find(key)) slot = read_list(*e, path, key);
  }
  void finish() const {
    if (!section) return;
    for (const auto& [key, entry] : *section)
      if (!entry.used)
        config_error(path, entry.line, "unknown key '" + key + "' in [" + name + "]");
  }
};

[[noreturn]] inline void constraint_error(const std::string& path, const std::string& message) {
  throw std::runtime_error(path + ": " + message);
}

inline void validate_resolved(const ResolvedConfig& cfg, const std::string& path) {
  if (cfg.grid.dimension != 1 && cfg.grid.dimension != 2)
    constraint_error(path, "[grid] dimension must be 1 or 2");
  if (cfg.grid.nodes < 3) constraint_error(path, "[grid] nodes must be at least 3");
  if (!(cfg.grid.extent > 0) || !(cfg.grid.extent_y > 0))
    constraint_error(path, "[grid] extents must be positive");
  if (!(cfg.conductivity.intra > 0) || !(cfg.conductivity.extra > 0))
    constraint_error(path, "[conductivity] values must be positive");
  if (cfg.model.kind != "fhn" && cfg.model.kind != "aliev_panfilov" &&
      cfg.model.kind != "rogers_mcculloch" && cfg.model.kind != "allen_cahn")
    constraint_error(path, "[model] kind must be fhn, aliev_panfilov, rogers_mcculloch "
                           "or allen_cahn");
  if (cfg.noise.modes < 0) constraint_error(path, "[noise] modes must be non-negative");
  if (!(cfg.noise.power > 0)) constraint_error(path, "[noise] power must be positive");
  if (!(cfg.noise.scale > 0)) constraint_error(path, "[noise] scale must be positive");
  if (cfg.noise.normalize && !(cfg.noise.normalize_trace > 0))
    constraint_error(path, "[noise] normalize_trace must be positive");
  if (!(cfg.sim.dt > 0))
    constraint_error(path, "[sim] dt must be positive (simulation configs require dt > 0)");
  if (!(cfg.sim.T >= cfg.sim.dt))
    constraint_error(path, "[sim] T must be at least one step long");
  if (cfg.sim.scheme != "imex" && cfg.sim.scheme != "em")
    constraint_error(path, "[sim] scheme must be imex or em");
  if (!(cfg.sim.epsilon >= 0)) constraint_error(path, "[sim] epsilon must be non-negative");
  if (cfg.sim.record_every < 1)
    constraint_error(path, "[sim] record_every must be at least 1");
  if (!(cfg.sim.box_u > 0) || !(cfg.sim.box_w > 0))
    constraint_error(path, "[sim] condition box half-widths must be positive");
  if (cfg.experiment.replicas < 2)
    constraint_error(path, "[experiment] replicas must be at least 2");
  if (cfg.experiment.threads < 1)
    constraint_error(path, "[experiment] threads must be at least 1");
  if (!(cfg.experiment.confidence_multiplier > 0))
    constraint_error(path, "[experiment] confidence_multiplier must be positive");
}

inline std::string format_config_double(double v) { return format_double(v); }

}  // namespace detail

inline ResolvedConfig parse_config_text(const std::string& text, const std::string& path) {
  std::istringstream in(text);
  auto doc = detail::parse_ini(in, path);
  ResolvedConfig cfg;

  auto section = [&](const char* name) {
    detail::IniSection* found = nullptr;
    for (auto& [sec_name, sec] : doc)
      if (sec_name == name) found = &sec;
    return detail::SectionReader{found, path, name};
  };

  {
    auto s = section("grid");
    s.get("dimension", cfg.grid.dimension);
    s.get("extent", cfg.grid.extent);
    cfg.grid.extent_y = cfg.grid.extent;  // default: square domain
    s.get("extent_y", cfg.grid.extent_y);
    s.get("nodes", cfg.grid.nodes);
    s.finish();
  }
  {
    auto s = section("conductivity");
    s.get("intra", cfg.conductivity.intra);
    s.get("extra", cfg.conductivity.extra);
    s.finish();
  }
  {
    auto s = section("model");
    if (const auto* e = s.find("kind")) {
      cfg.model.kind = e->value;
      if (cfg.model.kind != "fhn" && cfg.model.kind != "aliev_panfilov" &&
          cfg.model.kind != "rogers_mcculloch" && cfg.model.kind != "allen_cahn")
        detail::config_error(path, e->line, "unknown model kind '" + cfg.model.kind + "'");
    }
    // Per-kind parameter sets; a parameter foreign to the kind is unknown.
    if (cfg.model.kind == "fhn") {
      s.get("eta", cfg.model.eta);
      s.get("a", cfg.model.a);
      s.get("b", cfg.model.b);
      s.get("c", cfg.model.c);
    } else if (cfg.model.kind == "aliev_panfilov") {
      cfg.model.eta = 1.5;
      cfg.model.k = 8.0;
      cfg.model.a = 0.15;
      s.get("eta", cfg.model.eta);
      s.get("k", cfg.model.k);
      s.get("a", cfg.model.a);
    } else if (cfg.model.kind == "rogers_mcculloch") {
      cfg.model.eta = 2.0;
      cfg.model.b = 1.2;
      cfg.model.a = 0.3;
      cfg.model.c = 0.9;
      cfg.model.d = 0.4;
      s.get("eta", cfg.model.eta);
      s.get("b", cfg.model.b);
      s.get("a", cfg.model.a);
      s.get("c", cfg.model.c);
      s.get("d", cfg.model.d);
    } else if (cfg.model.kind == "allen_cahn") {
      cfg.model.eta = 0.7;
      s.get("eta", cfg.model.eta);
    }
    s.finish();
  }
  {
    auto s = section("noise");
    s.get("modes", cfg.noise.modes);
    s.get("power", cfg.noise.power);
    s.get("scale", cfg.noise.scale);
    if (const auto* e = s.find("normalize_trace"); e && e->value != "none") {
      cfg.noise.normalize = true;
      cfg.noise.normalize_trace = detail::read_double(*e, path, "normalize_trace");
    }
    s.finish();
  }
  {
    auto s = section("sim");
    s.get("dt", cfg.sim.dt);
    s.get("T", cfg.sim.T);
    s.get("scheme", cfg.sim.scheme);
    s.get("epsilon", cfg.sim.epsilon);
    s.get("record_every", cfg.sim.record_every);
    s.get("constant_source", cfg.sim.constant_source);
    s.get("u0_amplitude", cfg.sim.u0_amplitude);
    s.get("u0_mode", cfg.sim.u0_mode);
    s.get("u0_offset", cfg.sim.u0_offset);
    s.get("w0_amplitude", cfg.sim.w0_amplitude);
    s.get("w0_mode", cfg.sim.w0_mode);
    s.get("w0_offset", cfg.sim.w0_offset);
    s.get("box_u", cfg.sim.box_u);
    s.get("box_w", cfg.sim.box_w);
    s.finish();
  }
  {
    auto s = section("experiment");
    s.get("seed", cfg.experiment.seed);
    s.get("replicas", cfg.experiment.replicas);
    s.get("threads", cfg.experiment.threads);
    s.get("confidence_multiplier", cfg.experiment.confidence_multiplier);
    s.get("epsilons", cfg.experiment.epsilons);
    s.get("ratio_bound", cfg.experiment.ratio_bound);
    s.get("r", cfg.experiment.r);
    s.get("epsilon", cfg.experiment.epsilon);
    s.get("horizon", cfg.experiment.horizon);
    s.get("eps1", cfg.experiment.eps1);
    s.get("eps2", cfg.experiment.eps2);
    s.get("burn_in", cfg.experiment.burn_in);
    s.get("stationarity_hypotheses", cfg.experiment.stationarity_hypotheses);
    s.get("horizons", cfg.experiment.horizons);
    s.finish();
  }
  for (auto& [name, sec] : doc) {
    if (name.rfind("source_rect_", 0) != 0) continue;
    SourceRect rect;
    auto s = detail::SectionReader{&sec, path, name};
    s.get("amplitude", rect.amplitude);
    s.get("x0", rect.x0);
    s.get("x1", rect.x1);
    s.get("y0", rect.y0);
    s.get("y1", rect.y1);
    s.get("t0", rect.t0);
    s.get("t1", rect.t1);
    s.finish();
    cfg.rects.push_back(rect);
  }

  detail::validate_resolved(cfg, path);
  return cfg;
}

inline ResolvedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

// Canonical rendering of a resolved configuration: every section, every key,
// in fixed order. Parsing the output reproduces the configuration exactly.
inline std::string resolved_ini(const ResolvedConfig& cfg) {
  using detail::format_config_double;
  std::ostringstream out;
  out << "[grid]\n";
  out << "dimension = " << cfg.grid.dimension << "\n";
  out << "extent = " << format_config_double(cfg.grid.extent) << "\n";
  out << "extent_y = " << format_config_double(cfg.grid.extent_y) << "\n";
  out << "nodes = " << cfg.grid.nodes << "\n";
  out << "\n[conductivity]\n";
  out << "intra = " << format_config_double(cfg.conductivity.intra) << "\n";
  out << "extra = " << format_config_double(cfg.conductivity.extra) << "\n";
  out << "\n[model]\n";
  out << "kind = " << cfg.model.kind << "\n";
  out << "eta = " << format_config_double(cfg.model.eta) << "\n";
  if (cfg.model.kind == "fhn") {
    out << "a = " << format_config_double(cfg.model.a) << "\n";
    out << "b = " << format_config_double(cfg.model.b) << "\n";
    out << "c = " << format_config_double(cfg.model.c) << "\n";
  } else if (cfg.model.kind == "aliev_panfilov") {
    out << "k = " << format_config_double(cfg.model.k) << "\n";
    out << "a = " << format_config_double(cfg.model.a) << "\n";
  } else if (cfg.model.kind == "rogers_mcculloch") {
    out << "b = " << format_config_double(cfg.model.b) << "\n";
    out << "a = " << format_config_double(cfg.model.a) << "\n";
    out << "c = " << format_config_double(cfg.model.c) << "\n";
    out << "d = " << format_config_double(cfg.model.d) << "\n";
  }
  out << "\n[noise]\n";
  out << "modes = " << cfg.noise.modes << "\n";
  out << "power = " << format_config_double(cfg.noise.power) << "\n";
  out << "scale = " << format_config_double(cfg.noise.scale) << "\n";
  out << "normalize_trace = "
      << (cfg.noise.normalize ? format_config_double(cfg.noise.normalize_trace)
                              : std::string("none"))
      << "\n";
  out << "\n[sim]\n";
  out << "dt = " << format_config_double(cfg.sim.dt) << "\n";
  out << "T = " << format_config_double(cfg.sim.T) << "\n";
  out << "scheme = " << cfg.sim.scheme << "\n";
  out << "epsilon = " << format_config_double(cfg.sim.epsilon) << "\n";
  out << "record_every = " << cfg.sim.record_every << "\n";
  out << "constant_source = " << format_config_double(cfg.sim.constant_source) << "\n";
  out << "u0_amplitude = " << format_config_double(cfg.sim.u0_amplitude) << "\n";
  out << "u0_mode = " << cfg.sim.u0_mode << "\n";
  out << "u0_offset = " << format_config_double(cfg.sim.u0_offset) << "\n";
  out << "w0_amplitude = " << format_config_double(cfg.sim.w0_amplitude) << "\n";
  out << "w0_mode = " << cfg.sim.w0_mode << "\n";
  out << "w0_offset = " << format_config_double(cfg.sim.w0_offset) << "\n";
  out << "box_u = " << format_config_double(cfg.sim.box_u) << "\n";
  out << "box_w = " << format_config_double(cfg.sim.box_w) << "\n";
  out << "\n[experiment]\n";
  out << "seed = " << cfg.experiment.seed << "\n";
  out << "replicas = " << cfg.experiment.replicas << "\n";
  out << "threads = " << cfg.experiment.threads << "\n";
  out << "confidence_multiplier = "
      << format_config_double(cfg.experiment.confidence_multiplier) << "\n";
  out << "epsilons = ";
  for (std::size_t i = 0; i < cfg.experiment.epsilons.size(); ++i)
    out << (i ? "," : "") << format_config_double(cfg.experiment.epsilons[i]);
  out << "\n";
  out << "ratio_bound = " << format_config_double(cfg.experiment.ratio_bound) << "\n";
  out << "r = " << format_config_double(cfg.experiment.r) << "\n";
  out << "epsilon = " << format_config_double(cfg.experiment.epsilon) << "\n";
  out << "horizon = " << format_config_double(cfg.experiment.horizon) << "\n";
  out << "eps1 = " << format_config_double(cfg.experiment.eps1) << "\n";
  out << "eps2 = " << format_config_double(cfg.experiment.eps2) << "\n";
  out << "burn_in = " << format_config_double(cfg.experiment.burn_in) << "\n";
  out << "stationarity_hypotheses = "
      << (cfg.experiment.stationarity_hypotheses ? "true" : "false") << "\n";
  out << "horizons = ";
  for (std::size_t i = 0; i < cfg.experiment.horizons.size(); ++i)
    out << (i ? "," : "") << format_config_double(cfg.experiment.horizons[i]);
  out << "\n";
  for (std::size_t i = 0; i < cfg.rects.size(); ++i) {
    const auto& rect = cfg.rects[i];
    out << "\n[source_rect_" << (i + 1) << "]\n";
    out << "amplitude = " << format_config_double(rect.amplitude) << "\n";
    out << "x0 = " << format_config_double(rect.x0) << "\n";
    out << "x1 = " << format_config_double(rect.x1) << "\n";
    out << "y0 = " << format_config_double(rect.y0) << "\n";
    out << "y1 = " << format_config_double(rect.y1) << "\n";
    out << "t0 = " << format_config_double(rect.t0) << "\n";
    out << "t1 = " << format_config_double(rect.t1) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Builders: configuration -> library objects
// ---------------------------------------------------------------------------

inline GridPtr build_grid(const ResolvedConfig& cfg) {
  std::vector<double> extents{cfg.grid.extent};
  if (cfg.grid.dimension == 2) extents.push_back(cfg.grid.extent_y);
  return make_grid(cfg.grid.dimension, extents, cfg.grid.nodes);
}

inline BidomainOperator build_operator(const ResolvedConfig& cfg, const GridPtr& grid) {
  auto intra = make_conductivity(grid, cfg.conductivity.intra);
  auto extra = make_conductivity(grid, cfg.conductivity.extra);
  return compose_bidomain(intra, extra, grid);
}

inline IonicModel build_model(const ResolvedConfig& cfg) {
  const auto& m = cfg.model;
  if (m.kind == "fhn") return make_fitzhugh_nagumo(m.eta, m.a, m.b, m.c);
  if (m.kind == "aliev_panfilov") return make_aliev_panfilov(m.eta, m.k, m.a);
  if (m.kind == "rogers_mcculloch") return make_rogers_mcculloch(m.eta, m.b, m.a, m.c, m.d);
  return make_allen_cahn(m.eta);
}

inline NoiseSpectrum build_spectrum(const ResolvedConfig& cfg, const BidomainOperator& op) {
  if (cfg.noise.modes == 0) return make_spectrum(std::vector<double>{}, op);
  auto s = make_spectrum(PowerLawRule{cfg.noise.power, cfg.noise.scale}, cfg.noise.modes, op);
  if (cfg.noise.normalize) s = normalize_trace(s, cfg.noise.normalize_trace);
  return s;
}

inline SimConfig build_sim_config(const ResolvedConfig& cfg) {
  SimConfig sim;
  sim.dt = cfg.sim.dt;
  sim.T = cfg.sim.T;
  sim.scheme = cfg.sim.scheme == "em" ? Scheme::explicit_em : Scheme::imex_spectral;
  sim.epsilon = cfg.sim.epsilon;
  sim.record_every = cfg.sim.record_every;
  sim.source.constant = cfg.sim.constant_source;
  sim.source.rects = cfg.rects;
  sim.condition_box =
      Box{-cfg.sim.box_u, cfg.sim.box_u, -cfg.sim.box_w, cfg.sim.box_w};
  return sim;
}

inline State build_initial(const ResolvedConfig& cfg, const GridPtr& grid) {
  const double pi = 3.14159265358979323846;
  const double lx = cfg.grid.extent;
  const auto cosine = [&](double amp, int mode, double offset) {
    return [=](double x, double) { return offset + amp * std::cos(mode * pi * x / lx); };
  };
  return State{
      make_field_from(grid, cosine(cfg.sim.u0_amplitude, cfg.sim.u0_mode, cfg.sim.u0_offset)),
      make_field_from(grid, cosine(cfg.sim.w0_amplitude, cfg.sim.w0_mode, cfg.sim.w0_offset)),
      0.0};
}

}  // namespace bidosim
