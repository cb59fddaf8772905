#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace qicsim {

using cplx = std::complex<double>;

/// A quadrature result together with its estimated absolute error.
struct Estimate {
  cplx value{};
  double error = 0.0;
};

namespace quad {

using CFunction = std::function<cplx(double)>;
using RFunction = std::function<double(double)>;

/// Sum of fixed 21-point Gauss-Kronrod panels of width <= h over [a, b],
/// accumulated left to right.
Estimate panels(const CFunction& f, double a, double b, double h);

/// Vector-valued variant of `panels`: f(k, out) fills `n` components from
/// one shared evaluation.
std::vector<Estimate> panels_multi(const std::function<void(double, std::span<cplx>)>& f,
                                   std::size_t n, double a, double b, double h);

/// Adaptive Gauss-Kronrod on [a, b] for a complex integrand.
Estimate adaptive(const CFunction& f, double a, double b, double rel_tol, int max_depth = 18);

/// Adaptive tanh-sinh on [a, b] for a real integrand with possible endpoint
/// singularities. `breaks` are interior points where the integrand is
/// non-smooth; the interval is split there.
Estimate tanh_sinh(const RFunction& f, double a, double b, std::vector<double> breaks,
                   double rel_tol);

/// c * exp(i omega k) * k^{-mu}
struct OscTerm {
  double omega;
  double mu;
  cplx coeff;
};

/// Large-k expansion of an integrand as a finite sum of OscTerms.
class OscSeries {
 public:
  OscSeries() = default;
  /// `truncated` marks an asymptotic (rather than exact) expansion.
  explicit OscSeries(std::vector<OscTerm> terms, bool truncated = false)
      : terms_(std::move(terms)), truncated_(truncated) {}

  static OscSeries constant(cplx c) { return OscSeries({{0.0, 0.0, c}}); }

  const std::vector<OscTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  bool truncated() const noexcept { return truncated_; }

  /// Product of two expansions; terms whose power exceeds the leading power
  /// by more than `max_order` are dropped.
  friend OscSeries multiply(const OscSeries& a, const OscSeries& b, double max_order);

  cplx eval(double k) const;

  /// \int_K^inf of the series. `error` covers the highest retained order
  /// (a truncation proxy) plus the contour quadratures.
  Estimate tail(double K) const;

  /// Smallest nonzero |omega| in the series, or 0 if none.
  double min_frequency() const noexcept;

 private:
  void merge();
  std::vector<OscTerm> terms_;
  bool truncated_ = false;
};

/// \int_K^inf exp(i omega k) sum_j c_j k^{-mu_j} dk for a fixed frequency.
Estimate oscillatory_tail(double omega, const std::vector<OscTerm>& same_frequency, double K);

}  // namespace quad
}  // namespace qicsim
