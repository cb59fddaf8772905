#include "qicsim/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "qicsim/channel.hpp"
#include "qicsim/error.hpp"
#include "qicsim/qic.hpp"
#include "qicsim/scenarios.hpp"
#include "qicsim/validation.hpp"

namespace qicsim {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Raw command-line values; unset options fall back to the config file.
struct Flags {
  std::optional<int> dim;
  std::optional<std::string> preset, config, grid, log_base, out;
  std::optional<double> t, tol;
  std::optional<unsigned> threads;
  std::vector<std::string> only;
};

struct RunConfig {
  Dim dim = Dim::three;
  std::string scenario = "config";
  std::vector<Generator> generators;
  std::optional<ChannelScenario> channel;
  std::vector<double> times;
  GridSpec grid;
  LogBase log_base = LogBase::two;
  QuadratureOptions quadrature;
  unsigned threads = 0;
  std::optional<std::string> out;
  double degeneracy_eps = default_degeneracy_eps;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

Dim parse_dim(int d) {
  if (d == 2) return Dim::two;
  if (d == 3) return Dim::three;
  throw ConfigError("dimension must be 2 or 3, got " + std::to_string(d));
}

LogBase parse_log_base(const std::string& s) {
  if (s == "2") return LogBase::two;
  if (s == "e") return LogBase::e;
  throw ConfigError("log base must be \"2\" or \"e\", got \"" + s + "\"");
}

Generator parse_generator(const json& g, Dim dim, const std::string& where) {
  check_keys(g, {"kind", "sigma", "r_inner", "r_outer", "center", "time", "coupling", "gap", "amplitude", "channel"},
             where);
  if (!g.contains("kind") || !g["kind"].is_string()) throw ConfigError(where + ".kind must be a string");
  const auto kind = g["kind"].get<std::string>();

  SpatialPoint center{};
  if (g.contains("center")) {
    const auto& c = g["center"];
    if (!c.is_array() || c.size() != static_cast<std::size_t>(to_int(dim)))
      throw ConfigError(where + ".center needs " + std::to_string(to_int(dim)) + " coordinates");
    for (std::size_t i = 0; i < c.size(); ++i) center[i] = number(c[i], where + ".center");
  }
  auto channel = CouplingChannel::field;
  if (g.contains("channel")) {
    const auto c = g["channel"].is_string() ? g["channel"].get<std::string>() : std::string();
    if (c == "momentum")
      channel = CouplingChannel::momentum;
    else if (c != "field")
      throw ConfigError(where + ".channel must be \"field\" or \"momentum\"");
  }
  const double amplitude = g.contains("amplitude") ? number(g["amplitude"], where + ".amplitude") : 1.0;

  auto get = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    if (g.contains(key)) return number(g[key], where + "." + key);
    if (!fallback) throw ConfigError(where + " is missing '" + key + "'");
    return *fallback;
  };

  std::optional<RadialSmearing> s;
  if (kind == "gaussian") {
    if (g.contains("r_inner") || g.contains("r_outer")) throw ConfigError(where + ": radii given for a gaussian");
    s = RadialSmearing::gaussian(get("sigma"), dim, center, channel, amplitude);
  } else if (kind == "hard_shell") {
    if (g.contains("sigma")) throw ConfigError(where + ": sigma given for a hard_shell");
    s = RadialSmearing::hard_shell(get("r_inner", 0.0), get("r_outer"), dim, center, channel, amplitude);
  } else {
    throw ConfigError(where + ".kind must be \"gaussian\" or \"hard_shell\"");
  }
  return Generator{*s, get("time", 0.0), get("coupling", 1.0), get("gap", 0.0)};
}

Axis parse_axis(const std::string& text) {
  std::vector<double> v;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(':', start);
    const auto part = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size()) throw UsageError("bad grid axis '" + text + "'");
    v.push_back(x);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (v.size() == 1) return {v[0], v[0], 0.0};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw UsageError("grid axis '" + text + "' must be min:max:step or a single value");
}

GridSpec parse_grid_flag(const std::string& text) {
  GridSpec g;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) g.axes.push_back(parse_axis(part));
  return g;
}

GridSpec parse_grid_json(const json& j) {
  if (!j.is_array()) throw ConfigError("grid must be an array of axes");
  GridSpec g;
  for (const auto& a : j) {
    if (a.is_number()) {
      g.axes.push_back({a.get<double>(), a.get<double>(), 0.0});
      continue;
    }
    check_keys(a, {"min", "max", "step"}, "grid axis");
    if (!a.contains("min") || !a.contains("max") || !a.contains("step"))
      throw ConfigError("grid axis needs min, max and step");
    g.axes.push_back({number(a["min"], "grid min"), number(a["max"], "grid max"), number(a["step"], "grid step")});
  }
  return g;
}

// A 3-D run given only x and y sweeps the z = 0 plane.
void complete_grid(GridSpec& g, Dim dim) {
  if (dim == Dim::three && g.axes.size() == 2) g.axes.push_back({0.0, 0.0, 0.0});
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
}

// Precedence, lowest first: built-in defaults, the preset, config keys,
// command-line flags. A --preset flag replaces an inline config scenario.
RunConfig resolve(const Flags& f, const std::string& default_preset) {
  const json cfg = f.config ? load_config(*f.config) : json::object();
  check_keys(cfg,
             {"dim", "preset", "scenario", "t", "times", "grid", "log_base", "tol", "threads", "out",
              "degeneracy_eps"},
             "config");
  try {
    RunConfig rc;
    if (f.dim)
      rc.dim = parse_dim(*f.dim);
    else if (cfg.contains("dim"))
      rc.dim = parse_dim(static_cast<int>(number(cfg["dim"], "dim")));

    if (cfg.contains("preset") && cfg.contains("scenario"))
      throw ConfigError("config sets both 'preset' and 'scenario'");
    if (f.preset || !cfg.contains("scenario")) {
      std::string name = default_preset;
      if (f.preset)
        name = *f.preset;
      else if (cfg.contains("preset")) {
        if (!cfg["preset"].is_string()) throw ConfigError("preset must be a string");
        name = cfg["preset"].get<std::string>();
      }
      auto p = preset(name, rc.dim);
      rc.scenario = p.name;
      rc.generators = std::move(p.generators);
      rc.channel = std::move(p.channel);
      rc.times = std::move(p.times);
      rc.grid = std::move(p.grid);
    } else {
      const auto& sc = cfg["scenario"];
      check_keys(sc, {"generators", "alice", "bobs"}, "scenario");
      if (sc.contains("alice") != sc.contains("bobs")) throw ConfigError("scenario needs both 'alice' and 'bobs'");
      if (sc.contains("alice")) {
        const auto& bobs = sc["bobs"];
        if (!bobs.is_array() || bobs.size() != 3) throw ConfigError("scenario.bobs must list 3 detectors");
        std::array<std::optional<Generator>, 3> b;
        for (std::size_t i = 0; i < 3; ++i)
          b[i] = parse_generator(bobs[i], rc.dim, "scenario.bobs[" + std::to_string(i) + "]");
        rc.channel = ChannelScenario::make(parse_generator(sc["alice"], rc.dim, "scenario.alice"),
                                           {std::move(*b[0]), std::move(*b[1]), std::move(*b[2])});
        rc.generators = rc.channel->generators();
      }
      if (sc.contains("generators")) {
        const auto& gens = sc["generators"];
        if (!gens.is_array() || gens.empty()) throw ConfigError("scenario.generators must be a non-empty array");
        rc.generators.clear();
        for (std::size_t i = 0; i < gens.size(); ++i)
          rc.generators.push_back(parse_generator(gens[i], rc.dim, "scenario.generators[" + std::to_string(i) + "]"));
      }
      if (rc.generators.empty()) throw ConfigError("scenario defines no detectors");
      auto defaults = preset("single", rc.dim);
      rc.times = defaults.times;
      rc.grid = defaults.grid;
    }

    if (cfg.contains("t") && cfg.contains("times")) throw ConfigError("config sets both 't' and 'times'");
    if (f.t)
      rc.times = {*f.t};
    else if (cfg.contains("t"))
      rc.times = {number(cfg["t"], "t")};
    else if (cfg.contains("times")) {
      if (!cfg["times"].is_array() || cfg["times"].empty()) throw ConfigError("times must be a non-empty array");
      rc.times.clear();
      for (const auto& t : cfg["times"]) rc.times.push_back(number(t, "times"));
    }
    for (double t : rc.times)
      if (!std::isfinite(t)) throw ConfigError("snapshot times must be finite");

    if (f.grid)
      rc.grid = parse_grid_flag(*f.grid);
    else if (cfg.contains("grid"))
      rc.grid = parse_grid_json(cfg["grid"]);
    complete_grid(rc.grid, rc.dim);

    if (f.log_base)
      rc.log_base = parse_log_base(*f.log_base);
    else if (cfg.contains("log_base"))
      rc.log_base = parse_log_base(cfg["log_base"].is_string() ? cfg["log_base"].get<std::string>()
                                                               : fmt17(number(cfg["log_base"], "log_base")));

    if (f.tol)
      rc.quadrature.rel_tol = *f.tol;
    else if (cfg.contains("tol"))
      rc.quadrature.rel_tol = number(cfg["tol"], "tol");
    if (!(rc.quadrature.rel_tol > 0.0) || !std::isfinite(rc.quadrature.rel_tol))
      throw ConfigError("tol must be positive");

    if (f.threads)
      rc.threads = *f.threads;
    else if (cfg.contains("threads")) {
      const double n = number(cfg["threads"], "threads");
      if (n < 0 || n != std::floor(n)) throw ConfigError("threads must be a non-negative integer");
      rc.threads = static_cast<unsigned>(n);
    }

    if (f.out)
      rc.out = *f.out;
    else if (cfg.contains("out")) {
      if (!cfg["out"].is_string()) throw ConfigError("out must be a string");
      rc.out = cfg["out"].get<std::string>();
    }

    if (cfg.contains("degeneracy_eps")) {
      rc.degeneracy_eps = number(cfg["degeneracy_eps"], "degeneracy_eps");
      if (!(rc.degeneracy_eps >= 0.0)) throw ConfigError("degeneracy_eps must be non-negative");
    }
    return rc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

ojson generator_json(const Generator& g) {
  ojson j;
  const auto& s = g.smearing;
  if (s.is_gaussian()) {
    j["kind"] = "gaussian";
    j["sigma"] = std::get<GaussianProfile>(s.profile()).sigma;
  } else {
    const auto& h = std::get<HardShellProfile>(s.profile());
    j["kind"] = "hard_shell";
    j["r_inner"] = h.r_inner;
    j["r_outer"] = h.r_outer;
  }
  j["center"] = ojson::array();
  for (int i = 0; i < to_int(s.dim()); ++i) j["center"].push_back(s.center()[i]);
  j["time"] = g.time;
  j["coupling"] = g.coupling;
  j["gap"] = g.gap;
  j["amplitude"] = s.amplitude();
  j["channel"] = s.channel() == CouplingChannel::field ? "field" : "momentum";
  return j;
}

std::string capacity_report(const RunConfig& rc) {
  if (!rc.channel) throw ConfigError("scenario '" + rc.scenario + "' has no sender and receivers");
  const auto& sc = *rc.channel;
  const auto result = capacity_table(sc, rc.log_base, rc.quadrature, rc.threads);

  ojson r;
  r["command"] = "capacity";
  r["dim"] = to_int(rc.dim);
  r["log_base"] = to_string(rc.log_base);
  r["quadrature_rel_tol"] = rc.quadrature.rel_tol;
  ojson& s = r["scenario"];
  s["name"] = rc.scenario;
  s["delta_t"] = sc.delta_t();
  s["alice"] = generator_json(sc.alice);
  s["bobs"] = ojson::array();
  for (std::size_t i = 0; i < 3; ++i) {
    auto b = generator_json(sc.bobs[i]);
    b["geometry"] = to_string(sc.geometry[i]);
    s["bobs"].push_back(b);
  }
  s["warnings"] = sc.warnings;
  r["pairing_error_bound"] = result.pairing_error;
  r["capacities"] = ojson::array();
  for (const auto& e : result.entries)
    r["capacities"].push_back({{"subset", e.label},
                               {"capacity", e.result.capacity},
                               {"q", e.result.q},
                               {"q_tolerance", e.result.tolerance},
                               {"log_base", to_string(rc.log_base)},
                               {"quadrature_error_bound", result.pairing_error}});
  return r.dump(2) + "\n";
}

// Nondimensionalizing length: the first generator's sigma (or outer radius).
double sigma_scale(const std::vector<Generator>& gens) { return gens.front().smearing.length_scale(); }

std::string grid_csv(const RunConfig& rc, const QicModeSet& m, const FieldGrid& fg) {
  const int d = to_int(rc.dim);
  const double sigma = sigma_scale(m.generators);
  const double p1 = (d + 1) / 2.0, p2 = (d - 1) / 2.0;
  const double s1 = std::pow(sigma, p1), s2 = std::pow(sigma, p2);
  const char* axes[] = {"x", "y", "z"};

  std::string out = "# qicsim evolve dim=" + std::to_string(d) + " scenario=" + rc.scenario +
                    " t=" + fmt17(fg.time) + " sigma=" + fmt17(sigma) + " modes=" + std::to_string(fg.modes.size()) +
                    " skipped=" + std::to_string(m.skipped.size()) + "\n";
  out += "# F1_m = sigma^" + fmt17(p1) + " F^(1), F2_m = sigma^" + fmt17(p2) + " F^(2), G1_m = sigma^" + fmt17(p1) +
         " G^(1), G2_m = sigma^" + fmt17(p2) + " G^(2) of mode m; coordinates are not scaled\n";
  std::string cols = "# ";
  for (int a = 0; a < d; ++a) cols += std::string(a ? "," : "") + axes[a];
  for (const auto& w : fg.modes)
    for (const char* name : {"F1_", "F2_", "G1_", "G2_"}) cols += "," + std::string(name) + std::to_string(w.mode + 1);
  out += cols + "\n";

  const auto np = fg.grid.point_count();
  for (std::size_t i = 0; i < np; ++i) {
    const auto x = fg.grid.point(i);
    std::string row;
    for (int a = 0; a < d; ++a) row += (a ? "," : "") + fmt17(x[a]);
    for (const auto& w : fg.modes) {
      row += "," + fmt17(s1 * w.f1[i]);
      row += "," + fmt17(s2 * w.f2[i]);
      row += "," + fmt17(s1 * w.g1[i]);
      row += "," + fmt17(s2 * w.g2[i]);
    }
    out += row + "\n";
  }
  return out;
}

std::string time_suffixed(const std::string& path, double t) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? path.substr(0, dot) : path;
  const std::string ext = has_ext ? path.substr(dot) : ".csv";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return stem + "_t" + buf + ext;
}

int cmd_capacity(const Flags& f, std::ostream& out) {
  const auto rc = resolve(f, "table1");
  const auto report = capacity_report(rc);
  if (rc.out)
    write_file(*rc.out, report);
  else
    out << report;
  return 0;
}

int cmd_evolve(const Flags& f, const std::string& default_preset, std::ostream& out) {
  const auto rc = resolve(f, default_preset);
  validate_grid(rc.grid, rc.dim);
  if (rc.grid.point_count() == 0) throw UsageError("zero-size grid");
  const auto m = build_qic(rc.generators, rc.degeneracy_eps, rc.quadrature, rc.threads);

  std::vector<std::string> tables;
  for (double t : rc.times) tables.push_back(grid_csv(rc, m, weighting_grid(m, t, rc.grid, {}, rc.quadrature, rc.threads)));

  if (!rc.out) {
    for (const auto& t : tables) out << t;
  } else if (tables.size() == 1) {
    write_file(*rc.out, tables.front());
  } else {
    for (std::size_t i = 0; i < tables.size(); ++i) write_file(time_suffixed(*rc.out, rc.times[i]), tables[i]);
  }
  return 0;
}

int cmd_validate(const Flags& f, std::ostream& out) {
  ValidationOptions vo;
  if (f.tol) {
    if (!(*f.tol > 0.0)) throw ConfigError("tol must be positive");
    vo.quadrature.rel_tol = *f.tol;
  }
  if (f.threads) vo.threads = *f.threads;
  for (const auto& o : f.only) {
    std::stringstream ss(o);
    std::string g;
    while (std::getline(ss, g, ','))
      if (!g.empty()) vo.only.push_back(g);
  }
  const auto results = run_validation(vo);
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.passed()) ++failed;
    out << (r.passed() ? "PASS " : "FAIL ") << r.group << " " << r.name << " residual=" << fmt_short(r.residual)
        << (r.lower_bound ? " required>" : " limit=") << fmt_short(r.limit) << "\n";
  }
  out << results.size() - failed << " passed, " << failed << " failed\n";
  return failed ? 1 : 0;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum information capsule simulator"};
  app.name("qicsim");
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* c) {
    c->add_option("--dim", f.dim, "Spatial dimension (2 or 3)");
    c->add_option("--preset", f.preset, "Named scenario (table1, single, shockwave)");
    c->add_option("--config", f.config, "JSON run configuration");
    c->add_option("--tol", f.tol, "Quadrature relative tolerance");
    c->add_option("--threads", f.threads, "Worker threads (0: all cores)");
    c->add_option("--out", f.out, "Output file (default: standard output)");
  };
  auto* capacity = app.add_subcommand("capacity", "Channel capacities for every detector subset");
  common(capacity);
  capacity->add_option("--log-base", f.log_base, "Logarithm base, 2 or e");
  auto* evolve = app.add_subcommand("evolve", "Weighting functions of the capsule modes on a grid");
  auto* shock = app.add_subcommand("shockwave", "evolve with the shockwave preset");
  for (auto* c : {evolve, shock}) {
    common(c);
    c->add_option("--t", f.t, "Snapshot time (default: the scenario's times)");
    c->add_option("--grid", f.grid, "Axes as min:max:step or a fixed value, comma separated");
  }
  auto* validate = app.add_subcommand("validate", "Run the invariant checks");
  validate->add_option("--tol", f.tol, "Quadrature relative tolerance");
  validate->add_option("--threads", f.threads, "Worker threads (0: all cores)");
  validate->add_option("--only", f.only, "Check groups to run");

  std::vector<const char*> argv{"qicsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qicsim: " << e.what() << "\n";
    return 2;
  }

  try {
    if (capacity->parsed()) return cmd_capacity(f, out);
    if (evolve->parsed()) return cmd_evolve(f, "single", out);
    if (shock->parsed()) {
      if (f.preset && *f.preset != "shockwave") throw UsageError("shockwave runs the shockwave preset only");
      f.preset = "shockwave";
      return cmd_evolve(f, "shockwave", out);
    }
    return cmd_validate(f, out);
  } catch (const UsageError& e) {
    err << "qicsim: usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "qicsim: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedChannelError& e) {
    err << "qicsim: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "qicsim: numeric error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qicsim
