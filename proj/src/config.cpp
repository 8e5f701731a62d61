#include "rfbm/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace rfbm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

using Block = std::map<std::string, Entry>;

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const Entry& e, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    fail(e.line, key + ": not a number: '" + e.value + "'");
  }
  if (used != e.value.size()) fail(e.line, key + ": trailing characters in '" + e.value + "'");
  if (!std::isfinite(v)) fail(e.line, key + ": value must be finite");
  return v;
}

long long to_integer(const Entry& e, const std::string& key) {
  const double v = to_double(e, key);
  if (v != std::floor(v)) fail(e.line, key + ": expected an integer");
  return static_cast<long long>(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
  std::vector<double> out;
  for (const std::string& item : split_list(e.value)) out.push_back(to_double({item, e.line}, key));
  return out;
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e.line, key + ": expected true or false");
}

void check_keys(const Block& block, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, entry] : block)
    if (!allowed.count(key)) fail(entry.line, "unknown key '" + key + "' in " + where);
}

void check_choice(const Entry& e, const std::string& key, const std::set<std::string>& allowed) {
  if (allowed.count(e.value)) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  fail(e.line, key + " = '" + e.value + "' (expected one of: " + list + ")");
}

}  // namespace

std::string to_string(Analysis a) {
  switch (a) {
    case Analysis::Qv: return "qv";
    case Analysis::DriftCheck: return "drift-check";
    case Analysis::Supermartingale: return "supermartingale";
    case Analysis::LocalTime: return "local-time";
    case Analysis::Explosion: return "explosion";
    case Analysis::Feller: return "feller";
    case Analysis::AssumptionCheck: return "assumption-check";
    case Analysis::Constants: return "constants";
  }
  return "?";
}

Analysis parse_analysis(const std::string& name) {
  for (Analysis a : {Analysis::Qv, Analysis::DriftCheck, Analysis::Supermartingale,
                     Analysis::LocalTime, Analysis::Explosion, Analysis::Feller,
                     Analysis::AssumptionCheck, Analysis::Constants})
    if (to_string(a) == name) return a;
  throw ConfigError("unknown analysis '" + name + "'");
}

bool ExperimentConfig::wants(Analysis a) const {
  return std::find(analyses.begin(), analyses.end(), a) != analyses.end();
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, Block> blocks;  // "" is the top level
  blocks[""];
  std::string current;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  std::ostringstream canonical;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s = trim(s);
    if (s.empty()) continue;
    canonical << s << "\n";
    if (s.back() == '{') {
      if (!current.empty()) fail(line, "blocks do not nest beyond one level");
      current = trim(s.substr(0, s.size() - 1));
      if (current != "model" && current != "run" && current != "drift")
        fail(line, "unknown block '" + current + "'");
      if (blocks.count(current)) fail(line, "block '" + current + "' given twice");
      blocks[current];
      continue;
    }
    if (s == "}") {
      if (current.empty()) fail(line, "unmatched '}'");
      current.clear();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) fail(line, "empty key or value");
    Block& block = blocks[current];
    if (block.count(key)) fail(line, "duplicate key '" + key + "'");
    block[key] = {value, line};
  }
  if (!current.empty()) fail(line, "block '" + current + "' is not closed");

  ExperimentConfig cfg;
  cfg.source = canonical.str();

  const Block& top = blocks[""];
  check_keys(top, "top level", {"scenario", "analyses", "output"});
  if (top.count("scenario")) cfg.scenario = top.at("scenario").value;
  if (top.count("output")) cfg.output = top.at("output").value;
  if (top.count("analyses")) {
    for (const std::string& name : split_list(top.at("analyses").value)) {
      try {
        const Analysis a = parse_analysis(name);
        if (!cfg.wants(a)) cfg.analyses.push_back(a);
      } catch (const ConfigError& e) {
        fail(top.at("analyses").line, e.what());
      }
    }
  }

  if (blocks.count("model")) {
    const Block& b = blocks["model"];
    check_keys(b, "model", {"kind", "dim", "r0", "warp", "k", "c", "coeffs", "base", "scale",
                            "a0", "rate", "window"});
    ModelConfig& m = cfg.model;
    if (b.count("kind")) {
      check_choice(b.at("kind"), "kind", {"euclidean", "sphere", "hyperbolic", "warped", "homothetic"});
      m.kind = b.at("kind").value;
    }
    if (b.count("dim")) m.dim = static_cast<int>(to_integer(b.at("dim"), "dim"));
    if (b.count("r0")) m.r0 = to_double(b.at("r0"), "r0");
    if (b.count("warp")) {
      check_choice(b.at("warp"), "warp", {"sinh", "sin", "linear", "gauss_exp", "polynomial"});
      m.warp = b.at("warp").value;
    }
    if (b.count("k")) m.k = to_double(b.at("k"), "k");
    if (b.count("c")) m.c = to_double(b.at("c"), "c");
    if (b.count("coeffs")) m.coeffs = to_list(b.at("coeffs"), "coeffs");
    if (b.count("base")) {
      check_choice(b.at("base"), "base", {"euclidean", "hyperbolic", "warped"});
      m.base = b.at("base").value;
    }
    if (b.count("scale")) {
      check_choice(b.at("scale"), "scale", {"constant", "linear", "exponential"});
      m.scale = b.at("scale").value;
    }
    if (b.count("a0")) m.a0 = to_double(b.at("a0"), "a0");
    if (b.count("rate")) m.rate = to_double(b.at("rate"), "rate");
    if (b.count("window")) m.window = to_double(b.at("window"), "window");
  }

  if (blocks.count("run")) {
    const Block& b = blocks["run"];
    check_keys(b, "run", {"T", "h", "paths", "seed", "start_radius", "radii", "deltas", "eps_hit",
                          "stride", "scheme", "project"});
    RunConfig& r = cfg.run;
    if (b.count("T")) r.horizon = to_double(b.at("T"), "T");
    if (b.count("h")) r.h = to_double(b.at("h"), "h");
    if (b.count("paths")) {
      const long long n = to_integer(b.at("paths"), "paths");
      if (n < 1) fail(b.at("paths").line, "paths must be >= 1");
      r.paths = static_cast<std::size_t>(n);
    }
    if (b.count("seed")) {
      const long long s = to_integer(b.at("seed"), "seed");
      if (s < 0) fail(b.at("seed").line, "seed must be non-negative");
      r.seed = static_cast<std::uint64_t>(s);
    }
    if (b.count("start_radius")) r.start_radius = to_double(b.at("start_radius"), "start_radius");
    if (b.count("radii")) r.radii = to_list(b.at("radii"), "radii");
    if (b.count("deltas") && b.at("deltas").value != "auto")
      r.deltas = to_list(b.at("deltas"), "deltas");
    if (b.count("eps_hit")) r.eps_hit = to_double(b.at("eps_hit"), "eps_hit");
    if (b.count("stride")) {
      const long long s = to_integer(b.at("stride"), "stride");
      if (s < 1) fail(b.at("stride").line, "stride must be >= 1");
      r.stride = static_cast<std::size_t>(s);
    }
    if (b.count("scheme")) {
      check_choice(b.at("scheme"), "scheme", {"euler_heun", "ito"});
      r.scheme = b.at("scheme").value;
    }
    if (b.count("project")) r.project = to_bool(b.at("project"), "project");
  }

  if (blocks.count("drift")) {
    const Block& b = blocks["drift"];
    check_keys(b, "drift", {"kind", "c", "p", "matrix", "b"});
    DriftConfig& d = cfg.drift;
    if (b.count("kind")) {
      check_choice(b.at("kind"), "kind", {"zero", "radial", "linear", "rho_power"});
      d.kind = b.at("kind").value;
    }
    if (b.count("c")) d.c = to_double(b.at("c"), "c");
    if (b.count("p")) d.p = to_double(b.at("p"), "p");
    if (b.count("matrix")) d.matrix = to_list(b.at("matrix"), "matrix");
    if (b.count("b")) d.b = to_list(b.at("b"), "b");
  }

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  const RunConfig& r = cfg.run;
  if (!(r.horizon > 0.0)) throw ConfigError("run.T must be positive");
  if (!(r.h > 0.0)) throw ConfigError("run.h must be positive");
  if (r.h > r.horizon) throw ConfigError("run.h exceeds run.T");
  if (r.paths < 1) throw ConfigError("run.paths must be >= 1");
  for (double R : r.radii)
    if (!(R > 0.0)) throw ConfigError("run.radii must be positive");
  for (double d : r.deltas)
    if (!(d > 0.0)) throw ConfigError("run.deltas must be positive");
  if (cfg.analyses.empty()) throw ConfigError("no analyses requested");

  // builds the model (range checks live in the factories)
  const EvolvingMetricModel model = build_model(cfg);
  const std::string name = cfg.model.kind;
  for (Analysis a : cfg.analyses) {
    if (a == Analysis::LocalTime && !model.has_cut_locus())
      throw ConfigError("incompatible analysis: local-time on model '" + name +
                        "' (the cut locus of o is empty)");
    if (a == Analysis::Explosion && r.radii.empty())
      throw ConfigError("incompatible analysis: explosion needs run.radii");
  }
  if (cfg.drift.kind != "zero") {
    (void)build_drift(cfg);
    if (cfg.drift.kind == "linear" && model.representation() == Representation::Ambient)
      throw ConfigError("incompatible drift: linear field on model '" + name + "'");
  }
  if (cfg.run.start_radius >= 0.0 && model.has_cut_locus() &&
      cfg.run.start_radius >= model.warp().domain_limit())
    throw ConfigError("run.start_radius lies on or beyond the cut locus");
}

EvolvingMetricModel build_model(const ExperimentConfig& cfg) {
  const ModelConfig& m = cfg.model;
  const double T = cfg.run.horizon;
  auto make_warp = [&]() {
    if (m.warp == "sinh") return Warp::sinh(m.k);
    if (m.warp == "sin") return Warp::sin(m.k);
    if (m.warp == "linear") return Warp::linear();
    if (m.warp == "gauss_exp") return Warp::gauss_exp(m.c);
    if (m.coeffs.empty()) throw ConfigError("model.coeffs required for the polynomial warp");
    return Warp::polynomial(m.coeffs);
  };
  auto make_scale = [&]() {
    if (m.scale == "constant") return ScaleCurve::constant(m.a0);
    if (m.scale == "linear") return ScaleCurve::linear(m.a0, m.rate);
    return ScaleCurve::exponential(m.a0, m.rate);
  };
  if (m.kind == "euclidean") return EvolvingMetricModel::euclidean(m.dim, T);
  if (m.kind == "sphere") return EvolvingMetricModel::sphere(m.dim, T, m.r0);
  if (m.kind == "hyperbolic") return EvolvingMetricModel::warped(m.dim, T, Warp::sinh(m.k));
  if (m.kind == "warped") return EvolvingMetricModel::warped(m.dim, T, make_warp());
  EvolvingMetricModel base = m.base == "euclidean" ? EvolvingMetricModel::euclidean(m.dim, T)
                             : m.base == "hyperbolic"
                                 ? EvolvingMetricModel::warped(m.dim, T, Warp::sinh(m.k))
                                 : EvolvingMetricModel::warped(m.dim, T, make_warp());
  return EvolvingMetricModel::homothetic(base, make_scale());
}

VectorFieldSpec build_drift(const ExperimentConfig& cfg) {
  const DriftConfig& d = cfg.drift;
  if (d.kind == "zero") return VectorFieldSpec::zero();
  if (d.kind == "radial") return VectorFieldSpec::radial(d.c);
  if (d.kind == "rho_power") return VectorFieldSpec::rho_power(d.p, d.c);
  const int n = cfg.model.dim;
  if (d.matrix.size() != static_cast<std::size_t>(n * n))
    throw ConfigError("drift.matrix needs dim*dim = " + std::to_string(n * n) + " entries");
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = d.matrix[static_cast<std::size_t>(i * n + j)];
  return VectorFieldSpec::linear(a);
}

Vec start_point(const ExperimentConfig& cfg, const EvolvingMetricModel& model) {
  double r = cfg.run.start_radius;
  if (r < 0.0) r = model.has_cut_locus() ? 0.5 * model.warp().domain_limit() : 1.0;
  return model.state_point_at(r);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rfbm
