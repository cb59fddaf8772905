#include "qicsim/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <map>
#include <random>

#include "qicsim/channel.hpp"
#include "qicsim/error.hpp"
#include "qicsim/qic.hpp"
#include "qicsim/scenarios.hpp"

namespace qicsim {

bool CheckResult::passed() const noexcept {
  if (std::isnan(residual)) return false;
  return lower_bound ? residual > limit : residual <= limit;
}

const std::vector<std::string>& validation_groups() {
  static const std::vector<std::string> groups = {
      "ccr",          "purity",       "involution",   "antisymmetry",    "hermiticity", "microcausality",
      "normalization", "no_signaling", "superadditivity", "huygens",     "gap",         "table1"};
  return groups;
}

namespace {

const char* dim_tag(Dim d) { return d == Dim::three ? "d3" : "d2"; }

// Published capacities (base 2), columns in table_subsets() order.
std::array<double, 7> table1_reference(Dim d) {
  if (d == Dim::three) return {0.0, 3.39083e-5, 0.0, 3.45126e-5, 3.73605e-5, 0.0, 3.79689e-5};
  return {0.00167331, 0.00872886, 0.0, 0.0102214, 0.0140338, 0.00167926, 0.0154962};
}

struct ChannelRun {
  ChannelScenario sc;
  PairingMatrix s{Dim::three, 0};
  OutcomeDistribution p0, p1;
  CapacityResult caps;
};

class Runner {
 public:
  explicit Runner(const ValidationOptions& o) : opts_(o) {}

  std::vector<CheckResult> results;

  void add(std::string group, std::string name, double residual, double limit, bool lower = false) {
    results.push_back({std::move(group), std::move(name), residual, limit, lower});
  }

  const ChannelRun& channel(Dim d) {
    auto it = channel_.find(d);
    if (it != channel_.end()) return it->second;
    ChannelRun r{table1_scenario(d), PairingMatrix{d, 0}, {}, {}, {}};
    r.s = channel_pairing(r.sc, opts_.quadrature, opts_.threads);
    r.p0 = joint_distribution(r.sc, 0, r.s);
    r.p1 = joint_distribution(r.sc, 1, r.s);
    r.caps = capacity_table(r.p0, r.p1, LogBase::two, opts_.threads);
    return channel_.emplace(d, std::move(r)).first->second;
  }

  const std::vector<std::pair<std::string, QicModeSet>>& mode_sets(Dim d) {
    auto it = modes_.find(d);
    if (it != modes_.end()) return it->second;
    std::vector<std::pair<std::string, QicModeSet>> sets;
    sets.emplace_back("single",
                      build_qic(single_qic_scenario(d), default_degeneracy_eps, opts_.quadrature, opts_.threads));
    sets.emplace_back("shockwave",
                      build_qic(shockwave_scenario(d), default_degeneracy_eps, opts_.quadrature, opts_.threads));
    sets.emplace_back("table1", build_qic(channel(d).s, channel(d).sc.generators()));
    return modes_.emplace(d, std::move(sets)).first->second;
  }

  const ValidationOptions& opts() const { return opts_; }

 private:
  ValidationOptions opts_;
  std::map<Dim, ChannelRun> channel_;
  std::map<Dim, std::vector<std::pair<std::string, QicModeSet>>> modes_;
};

constexpr std::array<Dim, 2> dims = {Dim::three, Dim::two};

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void check_ccr(Runner& r, bool covariance) {
  for (Dim d : dims)
    for (const auto& [name, m] : r.mode_sets(d)) {
      const auto n = m.mode_count();
      Eigen::MatrixXd target = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      if (covariance) {
        target.diagonal().setConstant(0.5);
      } else {
        target.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
        target.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
      }
      const Eigen::MatrixXd got = covariance ? mode_covariance(m) : mode_symplectic_gram(m);
      r.add(covariance ? "purity" : "ccr", std::string(dim_tag(d)) + "/" + name, max_abs(got - target), 1e-8);
    }
}

Generator random_generator(std::mt19937_64& rng, Dim d) {
  std::uniform_real_distribution<double> u(-1.5, 1.5), sig(0.15, 0.6), tt(-1.0, 1.0);
  SpatialPoint c{u(rng), u(rng), d == Dim::three ? u(rng) : 0.0};
  return Generator{RadialSmearing::gaussian(sig(rng), d, c), tt(rng), 1.0, 0.0};
}

void check_involution(Runner& r) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd v(8);
    for (auto& x : v) x = n01(rng);
    worst = std::max(worst, (apply_f(apply_f(v)) + v).cwiseAbs().maxCoeff());
  }
  r.add("involution", "f(f(v)) = -v", worst, 0.0);
}

void check_antisymmetry(Runner& r) {
  std::mt19937_64 rng(7);
  for (Dim d : dims) {
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<Generator> gens;
      for (int i = 0; i < 4; ++i) gens.push_back(random_generator(rng, d));
      const auto g = extended_gram(PairingMatrix::compute(gens, r.opts().quadrature, r.opts().threads));
      auto comm = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return g.expectation(a, b) - g.expectation(b, a);
      };
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          const auto oi = basis_vector(4, i), oj = basis_vector(4, j);
          worst = std::max(worst, std::abs(comm(oi, apply_f(oj)) + comm(apply_f(oi), oj)));
        }
    }
    r.add("antisymmetry", dim_tag(d), worst, 1e-10);
  }
}

void check_hermiticity(Runner& r) {
  for (Dim d : dims) {
    const auto& run = r.channel(d);
    const auto gens = run.sc.generators();
    double worst = 0.0;
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i + 1; j < gens.size(); ++j)
        worst = std::max(worst, std::abs(pairing(gens[j], gens[i], r.opts().quadrature) - std::conj(run.s(i, j))));
    r.add("hermiticity", dim_tag(d), worst, 1e-9);
  }
}

void check_microcausality(Runner& r) {
  for (Dim d : dims) {
    const auto& run = r.channel(d);
    r.add("microcausality", std::string(dim_tag(d)) + "/A-B3", std::abs(run.s(0, 3).imag()), 1e-9);
    // Two Gaussians whose e^-40 supports stay spacelike.
    const SpatialPoint far{6.0, 0.0, 0.0};
    const Generator a{RadialSmearing::gaussian(0.2, d), 0.0};
    const Generator b{RadialSmearing::gaussian(0.2, d, far), 1.0};
    r.add("microcausality", std::string(dim_tag(d)) + "/gaussians",
          std::abs(pairing(a, b, r.opts().quadrature).imag()), 1e-9);
  }
}

void check_normalization(Runner& r) {
  for (Dim d : dims) {
    const auto& run = r.channel(d);
    for (int bit = 0; bit < 2; ++bit) {
      const auto& p = bit ? run.p1 : run.p0;
      const double lo = *std::min_element(p.p.begin(), p.p.end());
      const double res = std::max(std::abs(p.raw_sum - 1.0), lo < 0.0 ? -lo : 0.0);
      r.add("normalization", std::string(dim_tag(d)) + "/bit" + std::to_string(bit), res, 1e-10);
    }
  }
}

void check_no_signaling(Runner& r) {
  for (Dim d : dims) {
    const auto& run = r.channel(d);
    const auto m0 = marginalize(run.p0, 0b100), m1 = marginalize(run.p1, 0b100);
    double diff = 0.0;
    for (std::size_t i = 0; i < m0.p.size(); ++i) diff = std::max(diff, std::abs(m0.p[i] - m1.p[i]));
    r.add("no_signaling", std::string(dim_tag(d)) + "/marginal B3", diff, 1e-9);
    r.add("no_signaling", std::string(dim_tag(d)) + "/C_B3", run.caps.at(0b100).result.capacity, 1e-8);
  }
}

void check_superadditivity(Runner& r) {
  const std::array<std::pair<unsigned, unsigned>, 3> orderings = {
      std::pair{0b010u, 0b110u}, std::pair{0b010u, 0b011u}, std::pair{0b011u, 0b111u}};
  for (Dim d : dims) {
    const auto& caps = r.channel(d).caps;
    for (auto [small, big] : orderings)
      r.add("superadditivity",
            std::string(dim_tag(d)) + "/C_" + subset_label(big) + " - C_" + subset_label(small),
            caps.at(big).result.capacity - caps.at(small).result.capacity, 0.0, true);
    double worst = 0.0;
    for (unsigned s : table_subsets())
      for (unsigned t : table_subsets())
        if ((s & t) == s) worst = std::max(worst, caps.at(s).result.capacity - caps.at(t).result.capacity);
    r.add("superadditivity", std::string(dim_tag(d)) + "/subset monotonicity", worst, 1e-12);
  }
}

void check_huygens(Runner& r) {
  r.add("huygens", "d3/C_B1", r.channel(Dim::three).caps.at(0b001).result.capacity, 1e-8);
  r.add("huygens", "d2/C_B1", r.channel(Dim::two).caps.at(0b001).result.capacity, 1e-3, true);
}

void check_gap(Runner& r) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> gap(0.0, 50.0);
  for (Dim d : dims) {
    const auto& run = r.channel(d);
    auto alice = run.sc.alice;
    auto bobs = run.sc.bobs;
    alice.gap = gap(rng);
    for (auto& b : bobs) b.gap = gap(rng);
    const auto sc = ChannelScenario::make(alice, bobs);
    const auto s = channel_pairing(sc, r.opts().quadrature, r.opts().threads);
    std::size_t differing = 0;
    for (int bit = 0; bit < 2; ++bit) {
      const auto p = joint_distribution(sc, bit, s);
      const auto& ref = bit ? run.p1 : run.p0;
      for (std::size_t i = 0; i < p.p.size(); ++i)
        if (std::memcmp(&p.p[i], &ref.p[i], sizeof(double)) != 0) ++differing;
    }
    r.add("gap", std::string(dim_tag(d)) + "/differing entries", static_cast<double>(differing), 0.0);
  }
}

void check_table1(Runner& r) {
  for (Dim d : dims) {
    const auto& caps = r.channel(d).caps;
    const auto ref = table1_reference(d);
    for (std::size_t c = 0; c < 7; ++c) {
      const auto& e = caps.at(table_subsets()[c]);
      const double got = e.result.capacity;
      const auto name = std::string(dim_tag(d)) + "/" + e.label;
      if (ref[c] == 0.0)
        r.add("table1", name, std::abs(got), 1e-8);
      else
        r.add("table1", name + " rel", std::abs(got - ref[c]) / ref[c], 5e-3);
    }
  }
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& opts) {
  for (const auto& g : opts.only)
    if (std::find(validation_groups().begin(), validation_groups().end(), g) == validation_groups().end())
      throw UsageError("unknown check group '" + g + "'");
  auto wanted = [&](const std::string& g) {
    return opts.only.empty() || std::find(opts.only.begin(), opts.only.end(), g) != opts.only.end();
  };

  Runner r(opts);
  if (wanted("ccr")) check_ccr(r, false);
  if (wanted("purity")) check_ccr(r, true);
  if (wanted("involution")) check_involution(r);
  if (wanted("antisymmetry")) check_antisymmetry(r);
  if (wanted("hermiticity")) check_hermiticity(r);
  if (wanted("microcausality")) check_microcausality(r);
  if (wanted("normalization")) check_normalization(r);
  if (wanted("no_signaling")) check_no_signaling(r);
  if (wanted("superadditivity")) check_superadditivity(r);
  if (wanted("huygens")) check_huygens(r);
  if (wanted("gap")) check_gap(r);
  if (wanted("table1")) check_table1(r);
  return std::move(r.results);
}

}  // namespace qicsim
