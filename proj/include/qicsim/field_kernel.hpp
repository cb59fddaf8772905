#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "qicsim/generator.hpp"
#include "qicsim/quadrature.hpp"

namespace qicsim {

struct QuadratureOptions {
  /// Target relative accuracy. Values above 1e-4 switch to a coarse scheme
  /// with short cutoffs and no asymptotic tail (useful for sensitivity runs).
  double rel_tol = 1e-10;
};

enum class Method {
  /// Closed forms where available (Gaussian, d=3), radial quadrature otherwise.
  automatic,
  /// Always the radial k-space quadrature.
  quadrature,
};

/// Vacuum pairing S_ij = <0|O_i O_j|0>
///   = \int d^dk / ((2pi)^d 2|k|) exp(-i|k|(t_i - t_j)) v~_i(k) v~_j(k)^*.
/// (1/i)<[O_i,O_j]> = 2 Im S_ij and (1/i)<[O_i, f(O_j)]> = 2 Re S_ij.
Estimate pairing_estimate(const Generator& gi, const Generator& gj, const QuadratureOptions& opts = {},
                          Method method = Method::automatic);

/// As pairing_estimate, but throws NumericError if the error estimate is far
/// outside the requested tolerance.
cplx pairing(const Generator& gi, const Generator& gj, const QuadratureOptions& opts = {});

/// Independent second route for S_ij, for tests: the radial quadrature for
/// d=3 Gaussian pairs, an angular integral over Dawson functions for d=2
/// Gaussian pairs, and a position-space double integral over the radial
/// profiles for concentric pairs. Other pairs throw UsageError.
Estimate pairing_oracle(const Generator& gi, const Generator& gj);

/// I(t,x) = \int d^dk / ((2pi)^d 2|k|) exp(-i|k|(t0 - t)) exp(-ik.x) v~(k).
/// v^(2)(t,x) = -2 Im I and u^(2)(t,x) = 2 Re I.
Estimate mode_function_estimate(const Generator& g, double t, std::span<const double> x,
                                const QuadratureOptions& opts = {}, Method method = Method::automatic);
cplx mode_function(const Generator& g, double t, std::span<const double> x,
                   const QuadratureOptions& opts = {});

/// dI/dt by differentiating under the integral.
/// v^(1)(t,x) = 2 Im dI/dt and u^(1)(t,x) = -2 Re dI/dt.
Estimate mode_function_dt_estimate(const Generator& g, double t, std::span<const double> x,
                                   const QuadratureOptions& opts = {},
                                   Method method = Method::automatic);
cplx mode_function_dt(const Generator& g, double t, std::span<const double> x,
                      const QuadratureOptions& opts = {});

struct ModeSample {
  Estimate value;
  Estimate dt;
};

/// I and dI/dt at distance r from the generator center, sharing one pass
/// over the integrand.
ModeSample mode_sample(const Generator& g, double t, double r, const QuadratureOptions& opts = {},
                       Method method = Method::automatic);

/// Independent route for I (or dI/dt) of Gaussian generators: radial
/// quadrature for d=3, angular Dawson integral for d=2.
Estimate mode_function_oracle(const Generator& g, double t, std::span<const double> x, bool dt);

/// Hermitian matrix of pairings between an ordered list of generators.
class PairingMatrix {
 public:
  PairingMatrix(Dim dim, std::size_t n);

  /// Evaluates the upper triangle (in parallel) and mirrors it.
  static PairingMatrix compute(std::span<const Generator> gens, const QuadratureOptions& opts = {},
                               unsigned threads = 0);

  std::size_t size() const noexcept { return n_; }
  Dim dim() const noexcept { return dim_; }
  cplx operator()(std::size_t i, std::size_t j) const { return s_[i * n_ + j]; }
  double error(std::size_t i, std::size_t j) const { return err_[i * n_ + j]; }
  double max_error() const noexcept;

  /// Sets entry (i,j) and its conjugate at (j,i).
  void set(std::size_t i, std::size_t j, cplx value, double error = 0.0);

  Eigen::MatrixXcd matrix() const;
  PairingMatrix subset(std::span<const std::size_t> indices) const;

 private:
  Dim dim_;
  std::size_t n_;
  std::vector<cplx> s_;
  std::vector<double> err_;
};

}  // namespace qicsim
