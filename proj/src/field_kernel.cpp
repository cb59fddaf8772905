#include "qicsim/field_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qicsim/error.hpp"
#include "qicsim/parallel.hpp"
#include "qicsim/special.hpp"

namespace qicsim {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// Terms kept in each Hankel expansion and in products of expansions.
constexpr int hankel_terms = 16;
constexpr double max_order = 16.0;
// Kernel arguments k*r below this are replaced by the r = 0 limit.
constexpr double kernel_limit = 1e-8;
constexpr double k_cap = 4000.0;

void require_field(const RadialSmearing& s) {
  if (s.channel() == CouplingChannel::momentum)
    throw UnsupportedChannelError("momentum-channel smearings are not supported by the quadrature engine");
}

bool coarse(const QuadratureOptions& o) { return o.rel_tol > 1e-4; }

double gaussian_sigma(const RadialSmearing& s) { return std::get<GaussianProfile>(s.profile()).sigma; }

// ---------------------------------------------------------------------------
// Gaussian closed forms.
//
// J(b) = \int_0^inf exp(-a k^2) exp(i b k) dk and its b-derivatives.

struct DawsonJ {
  double a;

  std::array<cplx, 5> operator()(double b) const {
    const double sa = std::sqrt(a);
    std::array<cplx, 5> j;
    j[0] = {0.5 * std::sqrt(pi) / sa * std::exp(-b * b / (4.0 * a)), special::dawson(b / (2.0 * sa)) / sa};
    j[1] = I / (2.0 * a) - b / (2.0 * a) * j[0];
    j[2] = -(j[0] + b * j[1]) / (2.0 * a);
    j[3] = -(2.0 * j[1] + b * j[2]) / (2.0 * a);
    j[4] = -(3.0 * j[2] + b * j[3]) / (2.0 * a);
    return j;
  }
};

// (A/r) \int_0^inf exp(-a k^2) sin(k r) exp(i k T) (ik)^p dk for p = 0, 1.
std::array<cplx, 2> gaussian3(double A, double a, double T, double r) {
  const DawsonJ J{a};
  if (r < 1e-4 * std::sqrt(a)) {
    const auto j = J(T);
    const double r2 = r * r / 6.0;
    return {A / I * (j[1] + r2 * j[3]), A / I * (j[2] + r2 * j[4])};
  }
  const auto p = J(T + r);
  const auto m = J(T - r);
  const cplx pre = A / (r * 2.0 * I);
  return {pre * (p[0] - m[0]), pre * (p[1] - m[1])};
}

// C \int_0^pi J^{(p)}(T + r cos theta) dtheta, the d=2 Gaussian integral
// with J0 written as its angular average.
Estimate gaussian2_angular(double C, double a, double T, double r, int p) {
  const DawsonJ J{a};
  auto f = [&](double th) { return J(T + r * std::cos(th))[p]; };
  Estimate e = quad::adaptive(f, 0.0, pi, 1e-14, 25);
  return {C * e.value, std::abs(C) * e.error};
}

// ---------------------------------------------------------------------------
// Large-k expansions of each integrand factor.

// J_nu(kR) ~ sum over m and both signs of c e^{+-ikR} k^{-m-1/2}, multiplied
// by scale * k^{-extra_mu}.
quad::OscSeries hankel(double nu, double R, double extra_mu, double scale) {
  std::vector<quad::OscTerm> terms;
  double a = 1.0;
  const double base = 0.5 * std::sqrt(2.0 / pi) * scale;
  const double shift = nu * pi / 2.0 + pi / 4.0;
  for (int m = 0; m < hankel_terms; ++m) {
    if (m > 0) a *= (4.0 * nu * nu - (2.0 * m - 1) * (2.0 * m - 1)) / (8.0 * m);
    const double mag = base * a * std::pow(R, -m - 0.5);
    const cplx ip = std::pow(I, m);
    terms.push_back({R, m + 0.5 + extra_mu, mag * ip * std::polar(1.0, -shift)});
    terms.push_back({-R, m + 0.5 + extra_mu, mag * std::conj(ip) * std::polar(1.0, shift)});
  }
  return quad::OscSeries(std::move(terms), true);
}

quad::OscSeries ball_series(double R, Dim dim, double amp) {
  if (dim == Dim::three) {
    // 4 pi [sin(kR)/k^3 - R cos(kR)/k^2]
    const cplx s = 4.0 * pi * amp / (2.0 * I);
    const double c = -2.0 * pi * R * amp;
    return quad::OscSeries({{R, 3.0, s}, {-R, 3.0, -s}, {R, 2.0, c}, {-R, 2.0, c}});
  }
  // 2 pi R J1(kR) / k
  return hankel(1.0, R, 1.0, two_pi * R * amp);
}

quad::OscSeries profile_series(const RadialSmearing& s) {
  const auto& h = std::get<HardShellProfile>(s.profile());
  auto out = ball_series(h.r_outer, s.dim(), s.amplitude());
  if (h.r_inner > 0.0) {
    auto inner = ball_series(h.r_inner, s.dim(), -s.amplitude());
    std::vector<quad::OscTerm> t = out.terms();
    t.insert(t.end(), inner.terms().begin(), inner.terms().end());
    out = multiply(quad::OscSeries(std::move(t), out.truncated() || inner.truncated()),
                   quad::OscSeries::constant(1.0), max_order);
  }
  return out;
}

quad::OscSeries kernel_series(double r, Dim dim) {
  if (r == 0.0) return quad::OscSeries::constant(1.0);
  if (dim == Dim::three) {
    const cplx c = 1.0 / (2.0 * I * r);
    return quad::OscSeries({{r, 1.0, c}, {-r, 1.0, -c}});
  }
  return hankel(0.0, r, 0.0, 1.0);
}

double measure(Dim dim, double k) { return dim == Dim::three ? k / (4.0 * pi * pi) : 1.0 / (4.0 * pi); }

double kernel(Dim dim, double z) { return dim == Dim::three ? special::sinc(z) : special::bessel_j0(z); }

// ---------------------------------------------------------------------------
// Generic radial integral
//   \int_0^inf m(k) prod_f rho_f(k) kernel(k r) exp(i k T) (ik)^p dk
// for p = 0 and p = 1.

struct RadialProblem {
  Dim dim;
  std::vector<const RadialSmearing*> factors;
  double r;
  double T;
};

std::array<Estimate, 2> radial_integral(RadialProblem p, const QuadratureOptions& opts) {
  for (const auto* f : p.factors) require_field(*f);
  const bool crude = coarse(opts);

  double a = 0.0, omega = std::abs(p.T), s_min = std::numeric_limits<double>::infinity();
  bool has_gaussian = false;
  for (const auto* f : p.factors) {
    if (f->is_gaussian()) {
      has_gaussian = true;
      a += 0.5 * gaussian_sigma(*f) * gaussian_sigma(*f);
    } else {
      const auto& h = std::get<HardShellProfile>(f->profile());
      omega += h.r_outer;
      s_min = std::min(s_min, h.r_outer);
      if (h.r_inner > 0.0) s_min = std::min(s_min, h.r_inner);
    }
  }

  double K;
  if (has_gaussian) {
    K = std::sqrt((crude ? 12.0 : 46.0) / a);
    if (p.r * K < kernel_limit) p.r = 0.0;
  } else {
    const double reach = p.dim == Dim::three ? 20.0 : 40.0;
    if (p.r * k_cap < kernel_limit) p.r = 0.0;
    if (p.r > 0.0) s_min = std::min(s_min, p.r);
    K = crude ? 8.0 / s_min : std::min(k_cap, std::max(reach / s_min, 4.0));
  }
  omega += p.r;

  double h = two_pi / std::max(omega, 1e-12);
  if (has_gaussian) h = std::min(h, 1.0 / std::sqrt(a));
  h = std::min(h, K / 8.0);
  if (crude) h *= 4.0;

  const Dim dim = p.dim;
  auto integrand = [&](double k, std::span<cplx> out) {
    double v = measure(dim, k) * kernel(dim, k * p.r);
    for (const auto* f : p.factors) v *= radial_ft(*f, k);
    const cplx e = v * std::polar(1.0, k * p.T);
    out[0] = e;
    out[1] = I * k * e;
  };
  auto body = quad::panels_multi(integrand, 2, 0.0, K, h);
  std::array<Estimate, 2> res{body[0], body[1]};

  if (!has_gaussian) {
    quad::OscSeries series = multiply(quad::OscSeries({{0.0, dim == Dim::three ? -1.0 : 0.0,
                                                        measure(dim, 1.0)}}),
                                      kernel_series(p.r, dim), max_order);
    for (const auto* f : p.factors) series = multiply(series, profile_series(*f), max_order);
    series = multiply(series, quad::OscSeries({{p.T, 0.0, 1.0}}), max_order);
    const quad::OscSeries dseries = multiply(series, quad::OscSeries({{0.0, -1.0, I}}), max_order);
    const quad::OscSeries* s[2] = {&series, &dseries};
    for (int i = 0; i < 2; ++i) {
      Estimate tail;
      try {
        tail = s[i]->tail(K);
      } catch (const NumericError& e) {
        // A divergent tail: the integral does not exist at this point
        // (for example dI/dt exactly on a shell's light cone).
        res[i].error = std::numeric_limits<double>::infinity();
        continue;
      }
      if (crude) {
        res[i].error += std::abs(tail.value) + tail.error;
      } else {
        res[i].value += tail.value;
        res[i].error += tail.error;
      }
    }
  } else {
    // The dropped Gaussian tail is below exp(-46) of the peak.
    for (auto& e : res) e.error += crude ? 1e-5 * std::abs(e.value) : 0.0;
  }
  return res;
}

bool all_gaussian(const Generator& g) { return g.smearing.is_gaussian(); }

void check_point(const Generator& g, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(to_int(g.smearing.dim())))
    throw ConfigError("point has " + std::to_string(x.size()) + " components, generator is d=" +
                      std::to_string(to_int(g.smearing.dim())));
}

double distance_to_center(const Generator& g, std::span<const double> x) {
  check_point(g, x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    s += (x[i] - g.smearing.center()[i]) * (x[i] - g.smearing.center()[i]);
  return std::sqrt(s);
}

double closed_form_error(cplx v) { return 1e-14 * std::abs(v) + 1e-300; }

void check_accepted(const Estimate& e, const QuadratureOptions& opts, const char* what) {
  const double limit = std::max(1e3 * opts.rel_tol * std::abs(e.value), 1e-12);
  if (!(e.error <= limit))
    throw NumericError(std::string(what) + ": quadrature error estimate above tolerance", e.error);
}

// ---------------------------------------------------------------------------
// Position-space route for concentric profiles.

struct Support {
  double lo, hi;
};

Support support_of(const RadialSmearing& s) {
  if (s.is_gaussian()) return {0.0, s.support_radius()};
  const auto& h = std::get<HardShellProfile>(s.profile());
  return {h.r_inner, h.r_outer};
}

// Angular integral \int_0^pi dtheta / sqrt(A - B cos theta) over the part
// where the radicand is positive, from ap = A + B and am = A - B.
double angular2(double ap, double am, double B) {
  constexpr double floor = 1e-290;
  // Both radii within ~1e-100 of the origin: the r1 r2 weight kills the term.
  if (std::max({ap, std::abs(am), B}) < 1e-200) return 0.0;
  if (am >= 0.0) return ap > 0.0 ? 2.0 * special::carlson_rf(0.0, std::max(am, floor), ap) : 0.0;
  if (ap > 0.0) return 2.0 * special::carlson_rf(0.0, std::max(-am, floor), std::max(2.0 * B, floor));
  return 0.0;
}

double log_abs(double x) { return std::log(std::abs(x)); }

Estimate position_space(const Generator& gi, const Generator& gj) {
  const Dim dim = gi.smearing.dim();
  const double tau = gi.time - gj.time;
  const double at = std::abs(tau);
  const Support s1 = support_of(gi.smearing), s2 = support_of(gj.smearing);
  const double sgn = tau > 0 ? 1.0 : (tau < 0 ? -1.0 : 0.0);
  constexpr double inner_tol = 1e-13, outer_tol = 1e-12;

  double inner_err = 0.0;
  auto v1 = [&](double r) { return radial_value(gi.smearing, r); };
  auto v2 = [&](double r) { return radial_value(gj.smearing, r); };

  auto inner_breaks = [&](double r1) {
    return std::vector<double>{r1, r1 - at, r1 + at, at - r1};
  };
  std::vector<double> outer_breaks;
  for (double e : {s2.lo, s2.hi})
    for (double b : {e, e - at, e + at, at - e}) outer_breaks.push_back(b);

  // Kernel of the double integral, real part (re = true) or the part
  // multiplying -sgn(tau) i.
  auto kern = [&](double r1, double r2, bool re) -> double {
    const double sp = (r1 + r2 - at) * (r1 + r2 + at);  // (r1+r2)^2 - tau^2
    const double sm = (r1 - r2 - at) * (r1 - r2 + at);  // (r1-r2)^2 - tau^2
    if (dim == Dim::three) {
      if (re) {
        if (sp == 0.0 || sm == 0.0) return 0.0;
        return log_abs(r1 + r2 - at) + log_abs(r1 + r2 + at) - log_abs(r1 - r2 - at) -
               log_abs(r1 - r2 + at);
      }
      return (sm < 0.0 && sp > 0.0) ? pi : 0.0;
    }
    const double B = 2.0 * r1 * r2;
    return re ? angular2(sp, sm, B) : angular2(-sm, -sp, B);
  };

  auto part = [&](bool re) {
    auto outer = [&](double r1) {
      const double w1 = r1 * v1(r1);
      if (w1 == 0.0) return 0.0;
      auto inner = [&](double r2) { return r2 * v2(r2) * kern(r1, r2, re); };
      double lo = s2.lo, hi = s2.hi;
      if (!re && dim == Dim::three) {
        lo = std::max(lo, std::abs(r1 - at));
        hi = std::min(hi, r1 + at);
        if (!(hi > lo)) return 0.0;
      }
      const Estimate e = quad::tanh_sinh(inner, lo, hi, inner_breaks(r1), inner_tol);
      inner_err = std::max(inner_err, std::abs(w1) * e.error);
      return w1 * e.value.real();
    };
    return quad::tanh_sinh(outer, s1.lo, s1.hi, outer_breaks, outer_tol);
  };

  Estimate re = part(true);
  Estimate out{re.value, re.error};
  if (sgn != 0.0) {
    Estimate im = part(false);
    out.value += cplx{0.0, -sgn * im.value.real()};
    out.error += im.error;
  }
  out.error += inner_err * (s1.hi - s1.lo);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Estimate pairing_estimate(const Generator& gi, const Generator& gj, const QuadratureOptions& opts,
                          Method method) {
  require_field(gi.smearing);
  require_field(gj.smearing);
  const Dim dim = gi.smearing.dim();
  if (gj.smearing.dim() != dim) throw ConfigError("pairing between generators of different dimension");
  const double dx = center_distance(gi.smearing.center(), gj.smearing.center(), dim);
  const double tau = gi.time - gj.time;

  if (method == Method::automatic && dim == Dim::three && all_gaussian(gi) && all_gaussian(gj)) {
    const double si = gaussian_sigma(gi.smearing), sj = gaussian_sigma(gj.smearing);
    const double A = two_pi * std::pow(si * sj, 3) * gi.smearing.amplitude() * gj.smearing.amplitude();
    const cplx v = gaussian3(A, 0.5 * (si * si + sj * sj), -tau, dx)[0];
    return {v, closed_form_error(v)};
  }
  return radial_integral({dim, {&gi.smearing, &gj.smearing}, dx, -tau}, opts)[0];
}

cplx pairing(const Generator& gi, const Generator& gj, const QuadratureOptions& opts) {
  const Estimate e = pairing_estimate(gi, gj, opts);
  check_accepted(e, opts, "pairing");
  return e.value;
}

Estimate pairing_oracle(const Generator& gi, const Generator& gj) {
  require_field(gi.smearing);
  require_field(gj.smearing);
  const Dim dim = gi.smearing.dim();
  if (gj.smearing.dim() != dim) throw ConfigError("pairing between generators of different dimension");
  const double dx = center_distance(gi.smearing.center(), gj.smearing.center(), dim);
  const double tau = gi.time - gj.time;
  if (all_gaussian(gi) && all_gaussian(gj)) {
    if (dim == Dim::three) return pairing_estimate(gi, gj, {}, Method::quadrature);
    const double si = gaussian_sigma(gi.smearing), sj = gaussian_sigma(gj.smearing);
    const double C = si * si * sj * sj * gi.smearing.amplitude() * gj.smearing.amplitude();
    return gaussian2_angular(C, 0.5 * (si * si + sj * sj), -tau, dx, 0);
  }
  if (dx == 0.0) return position_space(gi, gj);
  throw UsageError("no independent pairing route for non-concentric hard-shell pairs");
}

ModeSample mode_sample(const Generator& g, double t, double r, const QuadratureOptions& opts,
                       Method method) {
  require_field(g.smearing);
  const double T = t - g.time;
  if (method == Method::automatic && g.smearing.dim() == Dim::three && all_gaussian(g)) {
    const double s = gaussian_sigma(g.smearing);
    const double A = std::pow(two_pi * s * s, 1.5) / (4.0 * pi * pi) * g.smearing.amplitude();
    const auto v = gaussian3(A, 0.5 * s * s, T, r);
    return {{v[0], closed_form_error(v[0])}, {v[1], closed_form_error(v[1])}};
  }
  const auto res = radial_integral({g.smearing.dim(), {&g.smearing}, r, T}, opts);
  return {res[0], res[1]};
}

Estimate mode_function_estimate(const Generator& g, double t, std::span<const double> x,
                                const QuadratureOptions& opts, Method method) {
  return mode_sample(g, t, distance_to_center(g, x), opts, method).value;
}

Estimate mode_function_dt_estimate(const Generator& g, double t, std::span<const double> x,
                                   const QuadratureOptions& opts, Method method) {
  return mode_sample(g, t, distance_to_center(g, x), opts, method).dt;
}

cplx mode_function(const Generator& g, double t, std::span<const double> x, const QuadratureOptions& opts) {
  const Estimate e = mode_function_estimate(g, t, x, opts);
  check_accepted(e, opts, "mode_function");
  return e.value;
}

cplx mode_function_dt(const Generator& g, double t, std::span<const double> x,
                      const QuadratureOptions& opts) {
  const Estimate e = mode_function_dt_estimate(g, t, x, opts);
  check_accepted(e, opts, "mode_function_dt");
  return e.value;
}

Estimate mode_function_oracle(const Generator& g, double t, std::span<const double> x, bool dt) {
  require_field(g.smearing);
  if (!all_gaussian(g)) throw UsageError("mode_function_oracle covers Gaussian generators only");
  const double r = distance_to_center(g, x);
  if (g.smearing.dim() == Dim::three) {
    const auto s = mode_sample(g, t, r, {}, Method::quadrature);
    return dt ? s.dt : s.value;
  }
  const double s = gaussian_sigma(g.smearing);
  return gaussian2_angular(s * s / two_pi * g.smearing.amplitude(), 0.5 * s * s, t - g.time, r, dt ? 1 : 0);
}

// ---------------------------------------------------------------------------

PairingMatrix::PairingMatrix(Dim dim, std::size_t n) : dim_(dim), n_(n), s_(n * n), err_(n * n) {}

PairingMatrix PairingMatrix::compute(std::span<const Generator> gens, const QuadratureOptions& opts,
                                     unsigned threads) {
  if (gens.empty()) throw ConfigError("pairing matrix needs at least one generator");
  const Dim dim = gens.front().smearing.dim();
  for (const auto& g : gens)
    if (g.smearing.dim() != dim) throw ConfigError("generators of mixed dimension");
  const std::size_t n = gens.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<Estimate> vals(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    vals[p] = pairing_estimate(gens[pairs[p].first], gens[pairs[p].second], opts);
    check_accepted(vals[p], opts, "pairing");
  });
  PairingMatrix m(dim, n);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    cplx v = vals[p].value;
    if (i == j) v = {v.real(), 0.0};
    m.set(i, j, v, vals[p].error);
  }
  return m;
}

double PairingMatrix::max_error() const noexcept {
  double m = 0.0;
  for (double e : err_) m = std::max(m, e);
  return m;
}

void PairingMatrix::set(std::size_t i, std::size_t j, cplx value, double error) {
  s_[i * n_ + j] = value;
  s_[j * n_ + i] = std::conj(value);
  err_[i * n_ + j] = err_[j * n_ + i] = error;
}

Eigen::MatrixXcd PairingMatrix::matrix() const {
  Eigen::MatrixXcd m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

PairingMatrix PairingMatrix::subset(std::span<const std::size_t> idx) const {
  PairingMatrix m(dim_, idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a; b < idx.size(); ++b) m.set(a, b, (*this)(idx[a], idx[b]), error(idx[a], idx[b]));
  return m;
}

}  // namespace qicsim
