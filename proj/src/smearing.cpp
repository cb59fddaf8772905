#include "qicsim/smearing.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "qicsim/error.hpp"
#include "qicsim/quadrature.hpp"
#include "qicsim/special.hpp"

namespace qicsim {
namespace {

constexpr double pi = std::numbers::pi;

// Composite 30-point Gauss-Legendre over `panels` equal panels.
template <class F>
cplx gauss_panels(F&& f, double a, double b, int panels) {
  using rule = boost::math::quadrature::gauss<double, 30>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  const double half = 0.5 * (b - a) / panels;
  cplx sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (2 * p + 1) * half;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * (f(c + half * x[i]) + f(c - half * x[i]));
  }
  return sum * half;
}

void check_center(const SpatialPoint& c, Dim dim) {
  for (double v : c)
    if (!std::isfinite(v)) throw ConfigError("smearing center must be finite");
  if (dim == Dim::two && c[2] != 0.0)
    throw ConfigError("a d=2 smearing center must have zero third component");
}

void check_amplitude(double a) {
  if (!std::isfinite(a) || a == 0.0) throw ConfigError("smearing amplitude must be finite and nonzero");
}

double ball_ft(double R, double k, Dim dim) {
  if (R == 0.0) return 0.0;
  if (dim == Dim::three) return 4.0 * pi * R * R * R * special::ball3_shape(k * R);
  return pi * R * R * special::ball2_shape(k * R);
}

}  // namespace

RadialSmearing::RadialSmearing(RadialProfile profile, Dim dim, SpatialPoint center,
                               CouplingChannel channel, double amplitude)
    : profile_(profile), dim_(dim), center_(center), channel_(channel), amplitude_(amplitude) {}

RadialSmearing RadialSmearing::gaussian(double sigma, Dim dim, SpatialPoint center,
                                        CouplingChannel channel, double amplitude) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("gaussian sigma must be positive");
  check_center(center, dim);
  check_amplitude(amplitude);
  return {GaussianProfile{sigma}, dim, center, channel, amplitude};
}

RadialSmearing RadialSmearing::hard_shell(double r_inner, double r_outer, Dim dim,
                                          SpatialPoint center, CouplingChannel channel,
                                          double amplitude) {
  if (!(r_inner >= 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer))
    throw ConfigError("hard shell needs 0 <= r_inner < r_outer, got (" + std::to_string(r_inner) +
                      ", " + std::to_string(r_outer) + ")");
  check_center(center, dim);
  check_amplitude(amplitude);
  return {HardShellProfile{r_inner, r_outer}, dim, center, channel, amplitude};
}

double RadialSmearing::support_radius() const noexcept {
  if (const auto* g = std::get_if<GaussianProfile>(&profile_)) return 10.0 * g->sigma;
  return std::get<HardShellProfile>(profile_).r_outer;
}

double RadialSmearing::length_scale() const noexcept {
  if (const auto* g = std::get_if<GaussianProfile>(&profile_)) return g->sigma;
  return std::get<HardShellProfile>(profile_).r_outer;
}

RadialSmearing RadialSmearing::with_amplitude(double amplitude) const {
  check_amplitude(amplitude);
  RadialSmearing s = *this;
  s.amplitude_ = amplitude;
  return s;
}

RadialSmearing RadialSmearing::with_center(SpatialPoint center) const {
  check_center(center, dim_);
  RadialSmearing s = *this;
  s.center_ = center;
  return s;
}

double center_distance(const SpatialPoint& a, const SpatialPoint& b, Dim dim) noexcept {
  double s = 0.0;
  for (int i = 0; i < to_int(dim); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double radial_value(const RadialSmearing& s, double r) noexcept {
  if (const auto* g = std::get_if<GaussianProfile>(&s.profile()))
    return s.amplitude() * std::exp(-r * r / (2.0 * g->sigma * g->sigma));
  const auto& h = std::get<HardShellProfile>(s.profile());
  return (r > h.r_inner && r < h.r_outer) ? s.amplitude() : 0.0;
}

double spatial_eval(const RadialSmearing& s, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(to_int(s.dim())))
    throw ConfigError("point has " + std::to_string(x.size()) + " components, smearing is d=" +
                      std::to_string(to_int(s.dim())));
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - s.center()[i]) * (x[i] - s.center()[i]);
  return radial_value(s, std::sqrt(r2));
}

double radial_ft(const RadialSmearing& s, double k) {
  if (s.channel() == CouplingChannel::momentum)
    throw UnsupportedChannelError("momentum-channel smearings are not supported by the quadrature engine");
  if (!(k >= 0.0)) throw ConfigError("radial_ft needs k >= 0");
  if (const auto* g = std::get_if<GaussianProfile>(&s.profile())) {
    const double s2 = g->sigma * g->sigma;
    const double pref = s.dim() == Dim::three ? std::pow(2.0 * pi * s2, 1.5) : 2.0 * pi * s2;
    return s.amplitude() * pref * std::exp(-0.5 * s2 * k * k);
  }
  const auto& h = std::get<HardShellProfile>(s.profile());
  return s.amplitude() * (ball_ft(h.r_outer, k, s.dim()) - ball_ft(h.r_inner, k, s.dim()));
}

std::complex<double> ft_oracle(const RadialSmearing& s, std::span<const double> k_vec) {
  const int d = to_int(s.dim());
  if (k_vec.size() != static_cast<std::size_t>(d))
    throw ConfigError("wave vector dimension does not match the smearing");
  double k2 = 0.0, phase = 0.0;
  for (int i = 0; i < d; ++i) {
    k2 += k_vec[i] * k_vec[i];
    phase += k_vec[i] * s.center()[i];
  }
  const double k = std::sqrt(k2);

  double lo = 0.0, hi = s.support_radius();
  if (const auto* h = std::get_if<HardShellProfile>(&s.profile())) lo = h->r_inner;

  // Direct quadrature in polar coordinates aligned with k: the angular
  // integral of exp(i k r cos(theta)) over the unit sphere (d=3, in
  // c = cos(theta)) or half circle doubled (d=2), then the radial one. Panel counts keep
  // about 20 radians of phase per 30-point panel; the estimate is the change
  // when both panel counts are doubled.
  const double span = d == 3 ? 2.0 : pi;
  auto integrate = [&](int refine) {
    auto angular = [&](double r) {
      const int m = refine * (static_cast<int>(std::ceil(k * r * span / 20.0)) + 1);
      if (d == 3) return 2.0 * pi * gauss_panels([&](double c) { return std::polar(1.0, k * r * c); }, -1.0, 1.0, m);
      return 2.0 * gauss_panels([&](double phi) { return std::polar(1.0, k * r * std::cos(phi)); }, 0.0, pi, m);
    };
    auto radial = [&](double r) {
      const double jac = d == 3 ? r * r : r;
      const double v = s.is_gaussian() ? radial_value(s, r) : s.amplitude();
      return jac * v * angular(r);
    };
    const int n = refine * (static_cast<int>(std::ceil(k * (hi - lo) / 20.0)) + (s.is_gaussian() ? 8 : 2));
    return gauss_panels(radial, lo, hi, n);
  };
  const cplx coarse = integrate(1);
  Estimate out{integrate(2), 0.0};
  out.error = std::abs(out.value - coarse);
  const double volume = d == 3 ? (hi * hi * hi - lo * lo * lo) / 3.0 : (hi * hi - lo * lo) / 2.0;
  const double scale = std::abs(s.amplitude()) * volume * (d == 3 ? 4.0 * pi : 2.0 * pi);
  if (!(out.error <= 1e-9 * std::max(std::abs(out.value), 1e-3 * scale)))
    throw NumericError("ft_oracle did not converge", out.error);
  return out.value * std::polar(1.0, phase);
}

}  // namespace qicsim
