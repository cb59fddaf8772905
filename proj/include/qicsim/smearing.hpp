#pragma once

#include <array>
#include <complex>
#include <span>
#include <variant>

namespace qicsim {

/// Number of spatial dimensions of the Minkowski background.
enum class Dim : int { two = 2, three = 3 };

constexpr int to_int(Dim d) noexcept { return static_cast<int>(d); }

/// Which canonical field a smearing couples to: v^(1) multiplies phi,
/// v^(2) multiplies the conjugate momentum Pi.
enum class CouplingChannel { field, momentum };

using SpatialPoint = std::array<double, 3>;

struct GaussianProfile {
  double sigma;
};

struct HardShellProfile {
  double r_inner;
  double r_outer;
};

using RadialProfile = std::variant<GaussianProfile, HardShellProfile>;

/// Real, radially symmetric detector profile about `center`.
///
/// Gaussian: amplitude * exp(-|x - x0|^2 / 2 sigma^2).
/// Hard shell: amplitude on r_inner < |x - x0| < r_outer, zero elsewhere
/// (r_inner = 0 is a solid ball).
///
/// For d = 2 only the first two center components are used and the third
/// must be zero.
class RadialSmearing {
 public:
  static RadialSmearing gaussian(double sigma, Dim dim, SpatialPoint center = {},
                                 CouplingChannel channel = CouplingChannel::field,
                                 double amplitude = 1.0);
  static RadialSmearing hard_shell(double r_inner, double r_outer, Dim dim,
                                   SpatialPoint center = {},
                                   CouplingChannel channel = CouplingChannel::field,
                                   double amplitude = 1.0);

  const RadialProfile& profile() const noexcept { return profile_; }
  Dim dim() const noexcept { return dim_; }
  const SpatialPoint& center() const noexcept { return center_; }
  CouplingChannel channel() const noexcept { return channel_; }
  double amplitude() const noexcept { return amplitude_; }

  bool is_gaussian() const noexcept { return std::holds_alternative<GaussianProfile>(profile_); }
  /// Radius beyond which the profile vanishes (hard shell) or is below
  /// e^-40 of its peak (Gaussian).
  double support_radius() const noexcept;
  /// sigma for Gaussians, r_outer for shells.
  double length_scale() const noexcept;

  RadialSmearing with_amplitude(double amplitude) const;
  RadialSmearing with_center(SpatialPoint center) const;

 private:
  RadialSmearing(RadialProfile profile, Dim dim, SpatialPoint center, CouplingChannel channel,
                 double amplitude);

  RadialProfile profile_;
  Dim dim_;
  SpatialPoint center_;
  CouplingChannel channel_;
  double amplitude_;
};

/// Euclidean distance between two centers using the first d components.
double center_distance(const SpatialPoint& a, const SpatialPoint& b, Dim dim) noexcept;

/// Profile value at distance r from the center.
double radial_value(const RadialSmearing& s, double r) noexcept;

/// v(x). Throws ConfigError if x.size() differs from the smearing dimension.
double spatial_eval(const RadialSmearing& s, std::span<const double> x);

/// Radial factor rho(k) of the Fourier transform, with
/// v~(k) = \int d^dx v(x) e^{i k.x} = rho(|k|) e^{i k.x0}.
/// Throws UnsupportedChannelError for momentum-channel smearings.
double radial_ft(const RadialSmearing& s, double k);

/// Test oracle: \int d^dx v(x) e^{i k.x} by nested adaptive quadrature
/// (radial x angular) without any closed forms. Throws NumericError if the
/// quadrature misses its tolerance.
std::complex<double> ft_oracle(const RadialSmearing& s, std::span<const double> k_vec);

}  // namespace qicsim
