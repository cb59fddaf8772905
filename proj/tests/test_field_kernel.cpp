#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qicsim/channel.hpp"
#include "qicsim/error.hpp"
#include "qicsim/field_kernel.hpp"
#include "qicsim/scenarios.hpp"

using namespace qicsim;
using std::numbers::pi;

namespace {

Generator gauss(double sigma, Dim d, SpatialPoint c = {}, double t = 0.0) {
  return {RadialSmearing::gaussian(sigma, d, c), t};
}

Generator shell(double r_in, double r_out, Dim d, SpatialPoint c = {}, double t = 0.0) {
  return {RadialSmearing::hard_shell(r_in, r_out, d, c), t};
}

Generator random_generator(std::mt19937_64& rng, Dim d) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), t(-2.0, 2.0), width(0.2, 1.0), coin(0.0, 1.0);
  const SpatialPoint c{u(rng), u(rng), d == Dim::three ? u(rng) : 0.0};
  if (coin(rng) < 0.5) return gauss(width(rng), d, c, t(rng));
  const double inner = coin(rng) < 0.5 ? 0.0 : width(rng);
  return shell(inner, inner + width(rng), d, c, t(rng));
}

// Relative difference, with values far below the O(0.1) scale of these
// mode functions compared absolutely.
double mode_diff(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

TEST_CASE("Gaussian self-pairing closed forms") {
  for (double sigma : {0.2, 0.7}) {
    const auto s3 = pairing(gauss(sigma, Dim::three), gauss(sigma, Dim::three));
    CHECK(s3.imag() == 0.0);
    CHECK(s3.real() == doctest::Approx(pi * std::pow(sigma, 4)).epsilon(1e-10));

    const auto s2 = pairing(gauss(sigma, Dim::two), gauss(sigma, Dim::two));
    CHECK(std::abs(s2.imag()) <= 1e-15 * s2.real());
    CHECK(s2.real() == doctest::Approx(std::pow(pi, 1.5) * std::pow(sigma, 3) / 2).epsilon(1e-10));
  }
}

TEST_CASE("Table I pairings: causal structure") {
  for (Dim d : {Dim::three, Dim::two}) {
    const auto sc = table1_scenario(d);
    const auto gens = sc.generators();
    CHECK(std::abs(pairing(gens[0], gens[3]).imag()) <= 1e-9);
    CHECK(std::abs(pairing(gens[0], gens[2]).imag()) > 1e-3);
    for (std::size_t i = 0; i < 4; ++i) CHECK(pairing(gens[i], gens[i]).real() > 0.0);
  }
}

TEST_CASE("Table I pairings agree with the position-space route") {
  for (Dim d : {Dim::three, Dim::two}) {
    const auto gens = table1_scenario(d).generators();
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i; j < gens.size(); ++j) {
        const auto k = pairing_estimate(gens[i], gens[j]);
        const auto x = pairing_oracle(gens[i], gens[j]);
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::abs(k.value - x.value) <= 1e-8 * std::abs(x.value));
        CHECK(k.error <= 1e-8 * std::abs(k.value));
      }
  }
}

TEST_CASE("Gaussian pairings: closed form or k-space against the second route") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1.5, 1.5), width(0.15, 0.6);
  for (Dim d : {Dim::three, Dim::two}) {
    for (int trial = 0; trial < 6; ++trial) {
      const auto a = gauss(width(rng), d, {u(rng), u(rng), d == Dim::three ? u(rng) : 0.0}, u(rng));
      const auto b = gauss(width(rng), d, {u(rng), u(rng), d == Dim::three ? u(rng) : 0.0}, u(rng));
      const auto fast = pairing(a, b);
      const auto oracle = pairing_oracle(a, b);
      CHECK(std::abs(fast - oracle.value) <= 1e-8 * std::abs(oracle.value));
    }
  }
}

TEST_CASE("pairing is Hermitian on random generator pairs") {
  std::mt19937_64 rng(23);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Dim d = trial % 2 ? Dim::two : Dim::three;
    const auto a = random_generator(rng, d), b = random_generator(rng, d);
    const auto ab = pairing(a, b), ba = pairing(b, a);
    worst = std::max(worst, std::abs(ab - std::conj(ba)) / std::max(1.0, std::abs(ab)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("pairing vanishes in the imaginary part for spacelike pairs") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> width(0.2, 1.0), dt(-1.5, 1.5), dir(0.0, 2 * pi);
  for (int trial = 0; trial < 12; ++trial) {
    const Dim d = trial % 2 ? Dim::two : Dim::three;
    const double ra = width(rng), rb = width(rng), t = dt(rng);
    const double sep = ra + rb + std::abs(t) + 0.05;
    const double phi = dir(rng);
    const auto a = shell(0.0, ra, d);
    const auto b = shell(0.0, rb, d, {sep * std::cos(phi), sep * std::sin(phi), 0.0}, t);
    CHECK(std::abs(pairing(a, b).imag()) <= 1e-9);
  }
  // Gaussian tails are far below tolerance 30 sigma outside the cone.
  const auto a = gauss(0.2, Dim::three), b = gauss(0.2, Dim::three, {7.0, 0.0, 0.0}, 1.0);
  CHECK(std::abs(pairing(a, b).imag()) <= 1e-9);
}

TEST_CASE("pairing rejects mixed dimensions and momentum smearings") {
  CHECK_THROWS_AS(pairing(gauss(0.2, Dim::two), gauss(0.2, Dim::three)), ConfigError);
  const Generator m{RadialSmearing::gaussian(0.2, Dim::three, {}, CouplingChannel::momentum)};
  CHECK_THROWS_AS(pairing(m, gauss(0.2, Dim::three)), UnsupportedChannelError);
  CHECK_THROWS_AS(pairing_oracle(shell(0, 1, Dim::three), shell(0, 1, Dim::three, {2, 0, 0})), UsageError);
}

TEST_CASE("mode function: Gaussian closed form against radial quadrature and the oracle") {
  const auto g = gauss(0.2, Dim::three, {0.3, -0.2, 0.1}, 0.5);
  for (double t : {0.5, 1.0, 2.5, 4.5})
    for (double r : {0.0, 0.1, 0.5, 1.9, 2.0, 4.0}) {
      const std::vector<double> x{0.3 + r * 0.6, -0.2 + r * 0.8, 0.1};
      const auto closed = mode_function(g, t, x);
      const auto quad = mode_function_estimate(g, t, x, {}, Method::quadrature).value;
      const auto oracle = mode_function_oracle(g, t, x, false).value;
      CAPTURE(t);
      CAPTURE(r);
      CHECK(mode_diff(closed, quad) <= 1e-8);
      CHECK(mode_diff(closed, oracle) <= 1e-8);
      CHECK(mode_diff(mode_function_dt(g, t, x), mode_function_oracle(g, t, x, true).value) <= 1e-8);
    }
}

TEST_CASE("mode function in d=2 near the light-cone ridge") {
  const auto g = gauss(0.2, Dim::two);
  const std::vector<double> x{4.0, 0.0};
  const auto v = mode_function(g, 4.0, x);
  CHECK(std::isfinite(v.real()));
  CHECK(std::isfinite(v.imag()));
  CHECK(mode_diff(v, mode_function_oracle(g, 4.0, x, false).value) <= 1e-8);
  CHECK(mode_diff(mode_function_dt(g, 4.0, x), mode_function_oracle(g, 4.0, x, true).value) <= 1e-8);
}

TEST_CASE("mode function is real at the coupling time") {
  for (Dim d : {Dim::three, Dim::two})
    for (const auto& g : {gauss(0.2, d, {}, 1.0), shell(1.1, 2.9, d, {}, 1.0)})
      for (double r : {0.0, 0.5, 2.0, 3.5}) {
        std::vector<double> x(to_int(d), 0.0);
        x[0] = r;
        const auto v = mode_function(g, 1.0, x);
        CHECK(std::abs(v.imag()) <= 1e-14 * std::max(1.0, std::abs(v)));
      }
}

TEST_CASE("time derivative matches central finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> tt(0.0, 5.0), xx(-6.0, 6.0);
  const double h = 1e-4;
  for (Dim d : {Dim::three, Dim::two}) {
    const auto g = gauss(0.2, d);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
      const double t = tt(rng);
      std::vector<double> x(to_int(d));
      for (auto& c : x) c = xx(rng);
      const auto fd = (mode_function(g, t + h, x) - mode_function(g, t - h, x)) / (2 * h);
      worst = std::max(worst, std::abs(fd - mode_function_dt(g, t, x)));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("mode function is linear in the smearing amplitude") {
  for (Dim d : {Dim::three, Dim::two}) {
    const Generator g = shell(1.1, 2.9, d);
    const Generator g3{g.smearing.with_amplitude(-3.0), g.time};
    std::vector<double> x(to_int(d), 0.0);
    x[0] = 1.7;
    const auto a = mode_function_dt(g, 2.0, x), b = mode_function_dt(g3, 2.0, x);
    CHECK(std::abs(b + 3.0 * a) <= 1e-12 * std::abs(b));
  }
}

TEST_CASE("PairingMatrix structure") {
  const auto gens = table1_scenario(Dim::two).generators();
  const auto s1 = PairingMatrix::compute(gens, {}, 1);
  const auto s3 = PairingMatrix::compute(gens, {}, 3);
  CHECK(s1.size() == 4);
  CHECK(s1.dim() == Dim::two);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s1(i, i).imag() == 0.0);
    CHECK(s1(i, i).real() > 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(s1(i, j) == std::conj(s1(j, i)));
      CHECK(s1(i, j) == s3(i, j));
    }
  }
  CHECK(s1.max_error() <= 1e-8);
  const auto m = s1.matrix();
  CHECK((m - m.adjoint()).norm() == 0.0);

  const std::vector<std::size_t> idx{3, 1};
  const auto sub = s1.subset(idx);
  CHECK(sub(0, 1) == s1(3, 1));
  CHECK(sub(1, 1) == s1(1, 1));

  PairingMatrix p(Dim::three, 2);
  p.set(0, 1, {1.0, 2.0}, 0.5);
  CHECK(p(1, 0) == cplx(1.0, -2.0));
  CHECK(p.error(1, 0) == 0.5);
  CHECK_THROWS_AS(PairingMatrix::compute(std::vector<Generator>{}), ConfigError);
}
