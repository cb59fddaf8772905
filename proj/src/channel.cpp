#include "qicsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qicsim/error.hpp"
#include "qicsim/parallel.hpp"

namespace qicsim {
namespace {

constexpr double clamp_floor = -1e-12;

struct Span {
  double lo, hi;
};

// Distance range from alice's center covered by a smearing.
Span distance_range(const Generator& alice, const Generator& g) {
  const double D = center_distance(alice.smearing.center(), g.smearing.center(), alice.smearing.dim());
  const double R = g.smearing.support_radius();
  double inner = 0.0;
  if (const auto* h = std::get_if<HardShellProfile>(&g.smearing.profile())) inner = h->r_inner;
  if (D == 0.0) return {inner, R};
  return {std::max(0.0, D - R), D + R};
}

}  // namespace

const char* to_string(ConeClass c) noexcept {
  switch (c) {
    case ConeClass::inside: return "inside";
    case ConeClass::on_cone: return "on_cone";
    case ConeClass::outside: return "outside";
    case ConeClass::mixed: break;
  }
  return "mixed";
}

const char* to_string(LogBase b) noexcept { return b == LogBase::two ? "2" : "e"; }

ConeClass classify(const Generator& alice, const Generator& bob) {
  const double dt = bob.time - alice.time;
  const double ra = alice.smearing.support_radius();
  const Span s = distance_range(alice, bob);
  if (s.hi < dt - ra) return ConeClass::inside;
  if (s.lo > dt + ra) return ConeClass::outside;
  if (s.lo > dt - ra && s.hi < dt + ra) return ConeClass::on_cone;
  return ConeClass::mixed;
}

ChannelScenario ChannelScenario::make(Generator alice, std::array<Generator, 3> bobs) {
  const Dim dim = alice.smearing.dim();
  for (const auto& b : bobs) {
    if (b.smearing.dim() != dim) throw ConfigError("all detectors must share one dimension");
    if (b.time != bobs[0].time) throw ConfigError("Bob detectors must decode at a common time");
  }
  if (!(bobs[0].time - alice.time > 0.0)) throw ConfigError("decoding must happen after encoding");
  ChannelScenario sc{std::move(alice), std::move(bobs), dim, {}, {}};
  const ConeClass expected[3] = {ConeClass::inside, ConeClass::on_cone, ConeClass::outside};
  for (int i = 0; i < 3; ++i) {
    sc.geometry[i] = classify(sc.alice, sc.bobs[i]);
    if (sc.geometry[i] != expected[i])
      sc.warnings.push_back("B" + std::to_string(i + 1) + " is " + to_string(sc.geometry[i]) +
                            ", expected " + to_string(expected[i]));
  }
  return sc;
}

std::vector<Generator> ChannelScenario::generators() const {
  return {alice, bobs[0], bobs[1], bobs[2]};
}

std::size_t outcome_index(std::initializer_list<int> bits) {
  std::size_t i = 0;
  for (int b : bits) i = 2 * i + (b ? 1 : 0);
  return i;
}

OutcomeDistribution joint_distribution_general(const Eigen::MatrixXd& re_bb, const std::vector<double>& im_ba,
                                               const std::vector<double>& lambda_b, double lambda_a) {
  const std::size_t n = lambda_b.size();
  if (static_cast<std::size_t>(re_bb.rows()) != n || static_cast<std::size_t>(re_bb.cols()) != n ||
      im_ba.size() != n)
    throw ConfigError("joint distribution inputs have inconsistent sizes");
  if (n == 0 || n > 8) throw ConfigError("joint distribution supports 1 to 8 detectors");

  const std::size_t outcomes = std::size_t{1} << n;
  const std::size_t signs = std::size_t{1} << (2 * n);
  // For each (s, s') the decoherence and phase pieces do not depend on the
  // outcome; precompute them.
  std::vector<double> decay(signs), phase(signs);
  std::vector<double> d(n);
  for (std::size_t c = 0; c < signs; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = (c >> (2 * n - 1 - i)) & 1 ? -1.0 : 1.0;
      const double sp = (c >> (n - 1 - i)) & 1 ? -1.0 : 1.0;
      d[i] = lambda_b[i] * (s - sp);
    }
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) quad += d[i] * d[j] * re_bb(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      lin += d[i] * im_ba[i];
    }
    decay[c] = std::exp(-0.5 * quad);
    phase[c] = 2.0 * lambda_a * lin;
  }

  OutcomeDistribution out;
  out.detectors = n;
  out.p.assign(outcomes, 0.0);
  for (std::size_t z = 0; z < outcomes; ++z) {
    cplx total{};
    for (double sa : {1.0, -1.0}) {
      for (std::size_t c = 0; c < signs; ++c) {
        double q = 0.5;
        for (std::size_t i = 0; i < n; ++i) {
          const bool excited = (z >> (n - 1 - i)) & 1;
          const double s = (c >> (2 * n - 1 - i)) & 1 ? -1.0 : 1.0;
          const double sp = (c >> (n - 1 - i)) & 1 ? -1.0 : 1.0;
          q *= excited ? 0.25 * s * sp : 0.25;
        }
        total += q * decay[c] * std::polar(1.0, sa * phase[c]);
      }
    }
    out.p[z] = total.real();
  }

  double sum = 0.0;
  for (double& v : out.p) {
    if (v < clamp_floor) throw NumericError("outcome probability is negative", v);
    v = std::max(v, 0.0);
    sum += v;
  }
  out.raw_sum = sum;
  for (double& v : out.p) v /= sum;
  return out;
}

OutcomeDistribution joint_distribution_general(const PairingMatrix& s, const Eigen::VectorXd& alice,
                                               const std::vector<Eigen::VectorXd>& bobs,
                                               const std::vector<double>& lambda_b, double lambda_a) {
  const Eigen::MatrixXcd S = s.matrix();
  const auto n = bobs.size();
  Eigen::MatrixXd re(n, n);
  std::vector<double> im(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXcd bi = bobs[i].cast<cplx>();
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = (bi.transpose() * S * bobs[j].cast<cplx>()).value();
      const double scale = std::sqrt(std::abs(S.diagonal().real().dot(bobs[i].cwiseAbs2())) *
                                     std::abs(S.diagonal().real().dot(bobs[j].cwiseAbs2())));
      if (i != j && std::abs(v.imag()) > 1e-9 * std::max(scale, 1.0))
        throw ConfigError("Bob operators " + std::to_string(i) + " and " + std::to_string(j) + " do not commute");
      re(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.real();
    }
    im[i] = (bi.transpose() * S * alice.cast<cplx>()).value().imag();
  }
  return joint_distribution_general(re, im, lambda_b, lambda_a);
}

PairingMatrix channel_pairing(const ChannelScenario& sc, const QuadratureOptions& opts, unsigned threads) {
  const auto g = sc.generators();
  return PairingMatrix::compute(g, opts, threads);
}

OutcomeDistribution joint_distribution(const ChannelScenario& sc, int bit, const PairingMatrix& s) {
  if (bit != 0 && bit != 1) throw UsageError("bit must be 0 or 1");
  if (s.size() != 4) throw ConfigError("channel pairing must cover alice and three bobs");
  Eigen::MatrixXd re(3, 3);
  std::vector<double> im(3), lb(3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j)
      re(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s(i + 1, j + 1).real();
    im[i] = s(i + 1, 0).imag();
    lb[i] = sc.bobs[i].coupling;
  }
  return joint_distribution_general(re, im, lb, bit * sc.alice.coupling);
}

OutcomeDistribution joint_distribution(const ChannelScenario& sc, int bit, const QuadratureOptions& opts) {
  return joint_distribution(sc, bit, channel_pairing(sc, opts));
}

OutcomeDistribution marginalize(const OutcomeDistribution& p, unsigned subset) {
  const std::size_t n = p.detectors;
  if (subset == 0) throw UsageError("marginal over an empty detector subset");
  if (subset >> n) throw UsageError("subset names a detector that does not exist");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (subset >> i & 1) keep.push_back(i);
  OutcomeDistribution out;
  out.detectors = keep.size();
  out.p.assign(std::size_t{1} << keep.size(), 0.0);
  for (std::size_t z = 0; z < p.p.size(); ++z) {
    std::size_t m = 0;
    for (std::size_t i : keep) m = 2 * m + ((z >> (n - 1 - i)) & 1);
    out.p[m] += p.p[z];
  }
  out.raw_sum = p.raw_sum;
  return out;
}

double mutual_information(double q, const std::vector<double>& p0, const std::vector<double>& p1, LogBase base) {
  if (p0.size() != p1.size()) throw UsageError("conditional distributions differ in size");
  if (!(q >= 0.0 && q <= 1.0)) throw UsageError("prior must lie in [0, 1]");
  double I = 0.0;
  for (std::size_t b = 0; b < p0.size(); ++b) {
    const double pb = q * p0[b] + (1.0 - q) * p1[b];
    const double j0 = q * p0[b], j1 = (1.0 - q) * p1[b];
    if (j0 > 0.0) I += j0 * std::log(p0[b] / pb);
    if (j1 > 0.0) I += j1 * std::log(p1[b] / pb);
  }
  return base == LogBase::two ? I / std::numbers::ln2 : I;
}

CapacityPoint capacity(const std::vector<double>& p0, const std::vector<double>& p1, LogBase base, double tol) {
  if (p0 == p1) return {0.0, 0.5, 0.0};
  auto f = [&](double q) { return mutual_information(q, p0, p1, base); };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  CapacityPoint best{f(0.5 * (a + b)), 0.5 * (a + b), b - a};
  for (double q : {0.0, 1.0}) {
    const double v = f(q);
    if (v > best.capacity) best = {v, q, 0.0};
  }
  best.capacity = std::max(best.capacity, 0.0);
  return best;
}

const std::array<unsigned, 7>& table_subsets() noexcept {
  static const std::array<unsigned, 7> s{0b001, 0b010, 0b100, 0b011, 0b110, 0b101, 0b111};
  return s;
}

std::string subset_label(unsigned subset) {
  std::string s;
  for (unsigned i = 0; i < 8; ++i)
    if (subset >> i & 1) s += "B" + std::to_string(i + 1);
  return s;
}

const SubsetCapacity& CapacityResult::at(unsigned subset) const {
  for (const auto& e : entries)
    if (e.subset == subset) return e;
  throw UsageError("capacity table has no entry for " + subset_label(subset));
}

CapacityResult capacity_table(const OutcomeDistribution& p0, const OutcomeDistribution& p1, LogBase base,
                              unsigned threads) {
  const auto& subsets = table_subsets();
  CapacityResult r;
  r.base = base;
  r.entries.resize(subsets.size());
  parallel_for(subsets.size(), threads, [&](std::size_t i) {
    const auto m0 = marginalize(p0, subsets[i]);
    const auto m1 = marginalize(p1, subsets[i]);
    r.entries[i] = {subsets[i], subset_label(subsets[i]), capacity(m0.p, m1.p, base)};
  });
  return r;
}

CapacityResult capacity_table(const ChannelScenario& sc, LogBase base, const QuadratureOptions& opts,
                              unsigned threads) {
  const PairingMatrix s = channel_pairing(sc, opts, threads);
  CapacityResult r =
      capacity_table(joint_distribution(sc, 0, s), joint_distribution(sc, 1, s), base, threads);
  r.pairing_error = s.max_error();
  return r;
}

}  // namespace qicsim
