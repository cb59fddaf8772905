#include "qicsim/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "qicsim/error.hpp"

namespace qicsim::quad {
namespace {

using GK21 = boost::math::quadrature::gauss_kronrod<double, 21>;
constexpr double eps = std::numeric_limits<double>::epsilon();

}  // namespace

Estimate panels(const CFunction& f, double a, double b, double h) {
  if (!(b > a)) return {};
  const auto n = static_cast<long>(std::ceil((b - a) / h));
  const double w = (b - a) / static_cast<double>(n);
  Estimate out;
  double magnitude = 0.0;
  for (long i = 0; i < n; ++i) {
    const double lo = a + static_cast<double>(i) * w;
    const double hi = (i + 1 == n) ? b : a + static_cast<double>(i + 1) * w;
    double err = 0.0;
    const cplx v = GK21::integrate(f, lo, hi, 0, 0.0, &err);
    out.value += v;
    out.error += err;
    magnitude += std::abs(v);
  }
  out.error += 4 * eps * magnitude;
  return out;
}

std::vector<Estimate> panels_multi(const std::function<void(double, std::span<cplx>)>& f,
                                   std::size_t n, double a, double b, double h) {
  std::vector<Estimate> out(n);
  if (!(b > a)) return out;
  const auto& xk = GK21::abscissa();
  const auto& wk = GK21::weights();
  const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
  const auto panels_n = static_cast<long>(std::ceil((b - a) / h));
  const double w = (b - a) / static_cast<double>(panels_n);
  std::vector<cplx> fp(n), fm(n), kr(n), gr(n);
  std::vector<double> magnitude(n, 0.0);
  for (long i = 0; i < panels_n; ++i) {
    const double lo = a + static_cast<double>(i) * w;
    const double hi = (i + 1 == panels_n) ? b : a + static_cast<double>(i + 1) * w;
    const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    // Kronrod abscissae: index 0 is the centre, odd indices are the
    // embedded Gauss nodes (10-point rule has no centre node).
    f(c, fp);
    for (std::size_t j = 0; j < n; ++j) {
      kr[j] = fp[j] * wk[0];
      gr[j] = 0.0;
    }
    for (std::size_t q = 1; q < xk.size(); ++q) {
      f(c + hw * xk[q], fp);
      f(c - hw * xk[q], fm);
      for (std::size_t j = 0; j < n; ++j) {
        const cplx s = fp[j] + fm[j];
        kr[j] += s * wk[q];
        if (q % 2 == 1) gr[j] += s * wg[q / 2];
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = kr[j] * hw;
      out[j].value += v;
      out[j].error += std::abs(v - gr[j] * hw);
      magnitude[j] += std::abs(v);
    }
  }
  for (std::size_t j = 0; j < n; ++j) out[j].error += 4 * eps * magnitude[j];
  return out;
}

Estimate adaptive(const CFunction& f, double a, double b, double rel_tol, int max_depth) {
  Estimate out;
  double l1 = 0.0;
  out.value = GK21::integrate(f, a, b, static_cast<unsigned>(max_depth), rel_tol, &out.error, &l1);
  out.error += 4 * eps * l1;
  return out;
}

Estimate tanh_sinh(const RFunction& f, double a, double b, std::vector<double> breaks,
                   double rel_tol) {
  if (!(b > a)) return {};
  std::vector<double> pts{a};
  std::sort(breaks.begin(), breaks.end());
  const double gap = 1e-14 * (std::abs(a) + std::abs(b));
  for (double p : breaks)
    if (p > pts.back() + gap && p < b - gap) pts.push_back(p);
  pts.push_back(b);

  static thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  Estimate out;
  double l1_total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double err = 0.0, l1 = 0.0;
    const double v = integrator.integrate(f, pts[i], pts[i + 1], rel_tol, &err, &l1);
    out.value += v;
    out.error += err;
    l1_total += l1;
  }
  out.error += 4 * eps * l1_total;
  return out;
}

OscSeries multiply(const OscSeries& a, const OscSeries& b, double max_order) {
  if (a.empty() || b.empty()) return {};
  auto lead = [](const OscSeries& s) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : s.terms_) m = std::min(m, t.mu);
    return m;
  };
  const double cut = lead(a) + lead(b) + max_order + 1e-9;
  std::vector<OscTerm> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  bool dropped = false;
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) {
      if (x.mu + y.mu <= cut)
        out.push_back({x.omega + y.omega, x.mu + y.mu, x.coeff * y.coeff});
      else
        dropped = true;
    }
  OscSeries s(std::move(out), dropped || a.truncated_ || b.truncated_);
  s.merge();
  return s;
}

void OscSeries::merge() {
  double scale = 0.0;
  for (const auto& t : terms_) scale = std::max(scale, std::abs(t.omega));
  const double snap = 1e-12 * std::max(scale, 1.0);
  for (auto& t : terms_)
    if (std::abs(t.omega) <= snap) t.omega = 0.0;
  std::sort(terms_.begin(), terms_.end(), [](const OscTerm& x, const OscTerm& y) {
    return x.omega != y.omega ? x.omega < y.omega : x.mu < y.mu;
  });
  std::vector<OscTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && std::abs(merged.back().omega - t.omega) <= snap &&
        std::abs(merged.back().mu - t.mu) < 1e-9) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const OscTerm& t) { return t.coeff == cplx{}; });
  terms_ = std::move(merged);
}

cplx OscSeries::eval(double k) const {
  cplx s{};
  for (const auto& t : terms_) s += t.coeff * std::polar(std::pow(k, -t.mu), t.omega * k);
  return s;
}

double OscSeries::min_frequency() const noexcept {
  double m = 0.0;
  for (const auto& t : terms_)
    if (t.omega != 0.0 && (m == 0.0 || std::abs(t.omega) < m)) m = std::abs(t.omega);
  return m;
}

Estimate oscillatory_tail(double omega, const std::vector<OscTerm>& group, double K) {
  if (omega == 0.0) {
    Estimate out;
    for (const auto& t : group) {
      if (t.mu <= 1.0)
        throw NumericError("non-oscillatory tail term k^-" + std::to_string(t.mu) + " diverges",
                           std::numeric_limits<double>::infinity());
      out.value += t.coeff * std::pow(K, 1.0 - t.mu) / (t.mu - 1.0);
    }
    return out;
  }
  for (const auto& t : group)
    if (t.mu <= 0.0)
      throw NumericError("oscillatory tail term k^-" + std::to_string(t.mu) + " does not decay",
                         std::numeric_limits<double>::infinity());
  // Rotate the contour into the half plane where exp(i omega k) decays:
  // k = K + i sgn(omega) s / |omega|.
  const double sgn = omega > 0 ? 1.0 : -1.0;
  const double w = std::abs(omega);
  const cplx step{0.0, sgn / (w * K)};
  auto g = [&](double s) {
    cplx acc{};
    const cplx z = 1.0 + step * s;
    for (const auto& t : group) acc += t.coeff * std::pow(K, -t.mu) * std::pow(z, -t.mu);
    return acc * std::exp(-s);
  };
  Estimate inner = adaptive(g, 0.0, 60.0, 1e-14);
  const cplx pre = cplx{0.0, sgn / w} * std::polar(1.0, omega * K);
  return {pre * inner.value, std::abs(pre) * inner.error};
}

Estimate OscSeries::tail(double K) const {
  std::map<double, std::vector<OscTerm>> groups;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) {
    groups[t.omega].push_back(t);
    top = std::max(top, t.mu);
  }
  Estimate out;
  double magnitude = 0.0, truncation = 0.0;
  for (const auto& [omega, group] : groups) {
    const Estimate e = oscillatory_tail(omega, group, K);
    out.value += e.value;
    out.error += e.error;
    magnitude += std::abs(e.value);
    std::vector<OscTerm> last;
    for (const auto& t : group)
      if (t.mu >= top - 1e-9) last.push_back(t);
    if (!last.empty()) truncation += std::abs(oscillatory_tail(omega, last, K).value);
  }
  out.error += 8 * eps * magnitude;
  if (truncated_) out.error += truncation;
  return out;
}

}  // namespace qicsim::quad
