#pragma once

namespace qicsim::special {

// Thin wrappers over GSL with the library's error handler disabled; a
// failing evaluation throws NumericError.

double bessel_j0(double x);
double bessel_j1(double x);
/// Dawson's integral F(x) = exp(-x^2) \int_0^x exp(t^2) dt.
double dawson(double x);
/// Carlson's symmetric elliptic integral R_F(x, y, z).
double carlson_rf(double x, double y, double z);

/// (sin x - x cos x) / x^3, with a Taylor series for small x.
double ball3_shape(double x);
/// 2 J1(x) / x, with a Taylor series for small x.
double ball2_shape(double x);
/// sin(x) / x.
double sinc(double x);

}  // namespace qicsim::special
