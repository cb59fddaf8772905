#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qicsim/field_kernel.hpp"

namespace qicsim {

/// Where a receiver sits relative to the smeared light cone of the sender.
enum class ConeClass { inside, on_cone, outside, mixed };

const char* to_string(ConeClass c) noexcept;

/// Classification of `bob` against the future light cone of `alice`'s
/// support, using the distance range covered by bob's support.
ConeClass classify(const Generator& alice, const Generator& bob);

/// Alice encodes one bit with coupling lambda_A = bit * alice.coupling at
/// alice.time; three Bob detectors decode at a common later time.
struct ChannelScenario {
  Generator alice;
  std::array<Generator, 3> bobs;
  Dim dim = Dim::three;
  std::array<ConeClass, 3> geometry{};
  /// Set when the bobs are not (inside, on the cone, outside) in order.
  std::vector<std::string> warnings;

  /// Validates (equal Bob times, positive delay, one dimension) and fills in
  /// geometry and warnings.
  static ChannelScenario make(Generator alice, std::array<Generator, 3> bobs);

  double delta_t() const noexcept { return bobs[0].time - alice.time; }
  /// Generators in pairing order: alice, b1, b2, b3.
  std::vector<Generator> generators() const;
};

/// Probabilities of Bob's outcomes. Index bits run over detectors with the
/// first detector most significant; bit value 0 is g and 1 is e.
struct OutcomeDistribution {
  std::size_t detectors = 0;
  std::vector<double> p;
  /// Sum before renormalization.
  double raw_sum = 1.0;

  double operator[](std::size_t i) const { return p[i]; }
};

/// Outcome index helper: outcome_index({1, 0, 0}) is (e, g, g).
std::size_t outcome_index(std::initializer_list<int> bits);

/// Core evaluation of the joint distribution for n commuting Bob operators:
///   p(z) = 1/2 sum_{s_A} sum_{s, s'} prod_i q_i(z_i, s_i, s_i')
///          exp(-1/2 sum_ij d_i d_j Re S_BiBj) exp(2 i lambda_A s_A sum_i d_i Im S_BiA)
/// with d_i = lambda_i (s_i - s_i') and q_i = 1/4 (g) or s_i s_i'/4 (e).
/// Terms are summed in a fixed lexicographic order.
OutcomeDistribution joint_distribution_general(const Eigen::MatrixXd& re_bb, const std::vector<double>& im_ba,
                                               const std::vector<double>& lambda_b, double lambda_a);

/// Same, for Bob operators given as real coefficient vectors over the
/// generators of `s` (so probes may be linear combinations of smearings).
/// Throws ConfigError if the Bob operators do not commute.
OutcomeDistribution joint_distribution_general(const PairingMatrix& s, const Eigen::VectorXd& alice,
                                               const std::vector<Eigen::VectorXd>& bobs,
                                               const std::vector<double>& lambda_b, double lambda_a);

/// Pairings among (alice, b1, b2, b3).
PairingMatrix channel_pairing(const ChannelScenario& sc, const QuadratureOptions& opts = {}, unsigned threads = 0);

OutcomeDistribution joint_distribution(const ChannelScenario& sc, int bit, const PairingMatrix& s);
OutcomeDistribution joint_distribution(const ChannelScenario& sc, int bit, const QuadratureOptions& opts = {});

/// Marginal over the detectors whose bit is set in `subset` (bit i for
/// detector i). Throws UsageError for an empty or out-of-range subset.
OutcomeDistribution marginalize(const OutcomeDistribution& p, unsigned subset);

enum class LogBase { two, e };

const char* to_string(LogBase b) noexcept;

/// I(A;B) for prior q of bit 0: p_AB(0, b) = q p0(b), p_AB(1, b) = (1 - q) p1(b).
double mutual_information(double q, const std::vector<double>& p0, const std::vector<double>& p1, LogBase base);

struct CapacityPoint {
  double capacity = 0.0;
  double q = 0.5;
  double tolerance = 0.0;
};

/// max_q I(A;B) by golden-section search; equal conditionals give (0, 1/2).
CapacityPoint capacity(const std::vector<double>& p0, const std::vector<double>& p1, LogBase base,
                       double tol = 1e-10);

struct SubsetCapacity {
  unsigned subset;
  std::string label;
  CapacityPoint result;
};

struct CapacityResult {
  LogBase base = LogBase::two;
  std::vector<SubsetCapacity> entries;  ///< B1, B2, B3, B1B2, B2B3, B1B3, B1B2B3
  double pairing_error = 0.0;          ///< largest pairing error estimate used

  const SubsetCapacity& at(unsigned subset) const;
};

/// Detector subsets in the column order of the published capacity table.
const std::array<unsigned, 7>& table_subsets() noexcept;
std::string subset_label(unsigned subset);

CapacityResult capacity_table(const OutcomeDistribution& p0, const OutcomeDistribution& p1, LogBase base,
                              unsigned threads = 0);
CapacityResult capacity_table(const ChannelScenario& sc, LogBase base, const QuadratureOptions& opts = {},
                              unsigned threads = 0);

}  // namespace qicsim
