#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <vector>

#include "qicsim/field_kernel.hpp"

namespace qicsim {

/// Bilinear forms on the 2k-dimensional span of {O_1..O_k, f(O_1)..f(O_k)}.
/// An operator is a real coefficient vector c, A = sum_m c_m B_m over that
/// basis.
struct ExtendedGram {
  std::size_t k = 0;
  /// <B_m B_n>.
  Eigen::MatrixXcd gram;
  /// (1/i)<[B_m, B_n]>, antisymmetric.
  Eigen::MatrixXd symplectic;
  /// Re <B_m B_n>, symmetric.
  Eigen::MatrixXd covariance;

  cplx expectation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  double commutator(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  double symmetric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

/// <O_i O_j> = S_ij, <f(O_i) f(O_j)> = S_ij, <O_i f(O_j)> = i S_ij and
/// <f(O_i) O_j> = -i S_ij.
ExtendedGram extended_gram(const PairingMatrix& s);

/// f on coefficient vectors: (a; b) -> (-b; a). Applying it twice negates.
Eigen::VectorXd apply_f(const Eigen::VectorXd& c);

/// Unit coefficient vector for O_i (conjugate = false) or f(O_i).
Eigen::VectorXd basis_vector(std::size_t k, std::size_t i, bool conjugate = false);

struct QicModeSet {
  std::vector<Generator> generators;
  PairingMatrix pairing{Dim::three, 0};
  /// Per retained mode.
  std::vector<double> alphas;
  std::vector<std::size_t> source;  ///< generator index each mode came from
  std::vector<Eigen::VectorXd> q, p;
  /// beta(i, j), gamma(i, j): generator i against retained mode j, also
  /// for skipped generators.
  Eigen::MatrixXd betas, gammas;
  std::vector<std::size_t> skipped;

  std::size_t mode_count() const noexcept { return q.size(); }
  Dim dim() const noexcept { return pairing.dim(); }
};

constexpr double default_degeneracy_eps = 1e-10;

/// Ordered recursion
///   Q_i = (O_i - sum_j (beta_ij Q_j + gamma_ij P_j)) / alpha_i
///   P_i = (f(O_i) - sum_j (beta_ij P_j - gamma_ij Q_j)) / alpha_i
/// with generator i skipped when alpha_i^2 <= eps * 2<O_i^2>. A clearly
/// negative alpha_i^2 throws NumericError.
QicModeSet build_qic(const PairingMatrix& s, std::vector<Generator> generators = {},
                     double degeneracy_eps = default_degeneracy_eps);
QicModeSet build_qic(std::vector<Generator> generators, double degeneracy_eps = default_degeneracy_eps,
                     const QuadratureOptions& opts = {}, unsigned threads = 0);

/// (1/i)<[X_a, X_b]> and Re<X_a X_b> over X = (Q_1..Q_m, P_1..P_m).
/// A set in standard form gives [[0, 1], [-1, 0]] and 1/2 times identity.
Eigen::MatrixXd mode_symplectic_gram(const QicModeSet& m);
Eigen::MatrixXd mode_covariance(const QicModeSet& m);
/// Largest entrywise deviation of the two matrices above from standard form.
double standard_form_residual(const QicModeSet& m);

/// One grid axis: values min, min + step, ... <= max. A fixed coordinate has
/// step 0 and min == max.
struct Axis {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

struct GridSpec {
  std::vector<Axis> axes;  ///< one per spatial dimension, x first

  std::size_t point_count() const;
  /// Coordinates of point `index`; the last axis varies fastest.
  std::array<double, 3> point(std::size_t index) const;
};

/// Validates an axis list against a dimension; throws UsageError for empty
/// or malformed axes.
void validate_grid(const GridSpec& g, Dim dim);

struct ModeWeights {
  std::size_t mode;
  std::vector<double> f1, f2, g1, g2;
};

/// Q_i = \int (F1 phi + F2 Pi), P_i = \int (G1 phi + G2 Pi) at time t.
struct FieldGrid {
  Dim dim = Dim::three;
  double time = 0.0;
  GridSpec grid;
  std::vector<ModeWeights> modes;
};

/// Weighting functions of the listed modes (all modes if empty) at time t.
FieldGrid weighting_grid(const QicModeSet& m, double t, const GridSpec& grid,
                         std::vector<std::size_t> modes = {}, const QuadratureOptions& opts = {},
                         unsigned threads = 0);

}  // namespace qicsim
