#include "qicsim/scenarios.hpp"

#include <cstdio>

#include "qicsim/error.hpp"

namespace qicsim {
namespace {

constexpr double paper_sigma = 0.2;

GridSpec plane_grid(Dim d, Axis x, Axis y) {
  GridSpec g{{x, y}};
  if (d == Dim::three) g.axes.push_back({0.0, 0.0, 0.0});
  return g;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_generator(std::string& out, const Generator& g) {
  const auto& s = g.smearing;
  if (const auto* gp = std::get_if<GaussianProfile>(&s.profile()))
    out += "gaussian sigma=" + num(gp->sigma);
  else {
    const auto& h = std::get<HardShellProfile>(s.profile());
    out += "hard_shell r_inner=" + num(h.r_inner) + " r_outer=" + num(h.r_outer);
  }
  out += " center=" + num(s.center()[0]) + "," + num(s.center()[1]) + "," + num(s.center()[2]);
  out += " amplitude=" + num(s.amplitude());
  out += " channel=";
  out += s.channel() == CouplingChannel::field ? "field" : "momentum";
  out += " time=" + num(g.time) + " coupling=" + num(g.coupling) + " gap=" + num(g.gap) + "\n";
}

}  // namespace

ChannelScenario table1_scenario(Dim d) {
  Generator alice{RadialSmearing::hard_shell(0.0, 1.0, d), 0.0, 1.0};
  const double t = 2.0, lambda = 0.2;
  return ChannelScenario::make(alice, {Generator{RadialSmearing::hard_shell(0.0, 0.9, d), t, lambda},
                                       Generator{RadialSmearing::hard_shell(1.1, 2.9, d), t, lambda},
                                       Generator{RadialSmearing::hard_shell(3.1, 4.0, d), t, lambda}});
}

std::vector<Generator> single_qic_scenario(Dim d) {
  return {Generator{RadialSmearing::gaussian(paper_sigma, d), 0.0, 1.0}};
}

std::vector<Generator> shockwave_scenario(Dim d) {
  std::vector<Generator> g;
  for (int i = 1; i <= 3; ++i)
    g.push_back({RadialSmearing::gaussian(paper_sigma, d, {5.0 + 1.5 * i, 0.0, 0.0}), static_cast<double>(i), 1.0});
  return g;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"table1", "single", "shockwave"};
  return names;
}

ScenarioPreset preset(std::string_view name, Dim d) {
  ScenarioPreset p;
  p.name = name;
  p.dim = d;
  if (name == "table1") {
    p.channel = table1_scenario(d);
    p.generators = p.channel->generators();
  } else if (name == "single") {
    p.generators = single_qic_scenario(d);
    p.times = {0.0, 2.0, 4.0};
    p.grid = plane_grid(d, {-6.0, 6.0, 0.05}, {-6.0, 6.0, 0.05});
  } else if (name == "shockwave") {
    p.generators = shockwave_scenario(d);
    p.times = {8.0};
    p.grid = plane_grid(d, {0.0, 16.0, 0.1}, {-8.0, 8.0, 0.1});
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  return p;
}

std::string canonical_serialization(const ScenarioPreset& p) {
  std::string out = "preset " + p.name + "\ndim " + std::to_string(to_int(p.dim)) + "\n";
  for (const auto& g : p.generators) {
    out += "generator ";
    write_generator(out, g);
  }
  out += "times";
  for (double t : p.times) out += " " + num(t);
  out += "\n";
  for (const auto& a : p.grid.axes) out += "axis " + num(a.min) + " " + num(a.max) + " " + num(a.step) + "\n";
  return out;
}

std::uint64_t preset_hash(const ScenarioPreset& p) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_serialization(p)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace qicsim
