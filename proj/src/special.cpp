#include "qicsim/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_dawson.h>
#include <gsl/gsl_sf_ellint.h>

#include <cmath>
#include <string>

#include "qicsim/error.hpp"

namespace qicsim::special {
namespace {

const bool handler_off = [] {
  gsl_set_error_handler_off();
  return true;
}();

double checked(int status, const gsl_sf_result& r, const char* name) {
  if (status != GSL_SUCCESS) throw NumericError(std::string(name) + ": " + gsl_strerror(status), r.err);
  return r.val;
}

// Below this argument the closed forms lose digits to cancellation; the
// truncated series is accurate to ~1e-17 there.
constexpr double series_cut = 0.5;

}  // namespace

double bessel_j0(double x) {
  gsl_sf_result r;
  return checked(gsl_sf_bessel_J0_e(x, &r), r, "bessel_j0");
}

double bessel_j1(double x) {
  gsl_sf_result r;
  return checked(gsl_sf_bessel_J1_e(x, &r), r, "bessel_j1");
}

double dawson(double x) {
  gsl_sf_result r;
  return checked(gsl_sf_dawson_e(x, &r), r, "dawson");
}

double carlson_rf(double x, double y, double z) {
  gsl_sf_result r;
  return checked(gsl_sf_ellint_RF_e(x, y, z, GSL_PREC_DOUBLE, &r), r, "carlson_rf");
}

double ball3_shape(double x) {
  x = std::abs(x);
  if (x < series_cut) {
    // sum_{n>=1} (-1)^{n+1} 2n x^{2n-2} / (2n+1)!
    const double x2 = x * x;
    double term = 1.0 / 3.0, sum = term;
    for (int n = 2; n <= 12; ++n) {
      term *= -x2 * n / ((n - 1) * (2.0 * n) * (2.0 * n + 1));
      sum += term;
    }
    return sum;
  }
  return (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

double ball2_shape(double x) {
  x = std::abs(x);
  if (x < series_cut) {
    // 2 J1(x)/x = sum_m (-1)^m (x/2)^{2m} / (m! (m+1)!)
    const double q = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m <= 12; ++m) {
      term *= q / (m * (m + 1.0));
      sum += term;
    }
    return sum;
  }
  return 2.0 * bessel_j1(x) / x;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

}  // namespace qicsim::special
