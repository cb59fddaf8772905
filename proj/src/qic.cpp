#include "qicsim/qic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qicsim/error.hpp"
#include "qicsim/parallel.hpp"

namespace qicsim {
namespace {

// alpha^2 below -consistency * 2<O^2> means the pairings are inconsistent
// rather than merely degenerate.
constexpr double consistency = 1e-6;

double dot(const Eigen::VectorXd& row, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index m = 0; m < v.size(); ++m) s += row[m] * v[m];
  return s;
}

}  // namespace

cplx ExtendedGram::expectation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return a.cast<cplx>().dot(gram * b.cast<cplx>());
}

double ExtendedGram::commutator(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return a.dot(symplectic * b);
}

double ExtendedGram::symmetric(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return a.dot(covariance * b);
}

ExtendedGram extended_gram(const PairingMatrix& s) {
  const auto k = static_cast<Eigen::Index>(s.size());
  const Eigen::MatrixXcd S = s.matrix();
  const cplx i{0.0, 1.0};
  ExtendedGram g;
  g.k = s.size();
  g.gram.resize(2 * k, 2 * k);
  g.gram << S, i * S, -i * S, S;
  g.symplectic = 2.0 * g.gram.imag();
  g.covariance = g.gram.real();
  return g;
}

Eigen::VectorXd apply_f(const Eigen::VectorXd& c) {
  const Eigen::Index k = c.size() / 2;
  Eigen::VectorXd out(c.size());
  out.head(k) = -c.tail(k);
  out.tail(k) = c.head(k);
  return out;
}

Eigen::VectorXd basis_vector(std::size_t k, std::size_t i, bool conjugate) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * k));
  e[static_cast<Eigen::Index>(conjugate ? k + i : i)] = 1.0;
  return e;
}

QicModeSet build_qic(const PairingMatrix& s, std::vector<Generator> generators, double eps) {
  const std::size_t n = s.size();
  if (n == 0) throw ConfigError("build_qic needs at least one generator");
  if (!generators.empty() && generators.size() != n)
    throw ConfigError("generator list does not match the pairing matrix");
  for (const auto& g : generators)
    if (g.smearing.channel() == CouplingChannel::momentum)
      throw UnsupportedChannelError("momentum-channel generators are not supported");

  const ExtendedGram eg = extended_gram(s);
  QicModeSet m;
  m.generators = std::move(generators);
  m.pairing = s;
  m.betas = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.gammas = m.betas;

  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd row = eg.symplectic.row(static_cast<Eigen::Index>(i)).transpose();
    const double norm2 = 2.0 * s(i, i).real();
    double a2 = norm2;
    std::vector<double> beta(m.q.size()), gamma(m.q.size());
    for (std::size_t j = 0; j < m.q.size(); ++j) {
      beta[j] = dot(row, m.p[j]);
      gamma[j] = -dot(row, m.q[j]);
      a2 -= beta[j] * beta[j] + gamma[j] * gamma[j];
      m.betas(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = beta[j];
      m.gammas(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gamma[j];
    }
    if (a2 <= eps * norm2) {
      if (a2 < -consistency * norm2)
        throw NumericError("alpha^2 of generator " + std::to_string(i) + " is negative", a2);
      m.skipped.push_back(i);
      continue;
    }
    Eigen::VectorXd q = basis_vector(n, i, false);
    Eigen::VectorXd p = basis_vector(n, i, true);
    for (std::size_t j = 0; j < m.q.size(); ++j) {
      q -= beta[j] * m.q[j] + gamma[j] * m.p[j];
      p -= beta[j] * m.p[j] - gamma[j] * m.q[j];
    }
    const double alpha = std::sqrt(a2);
    m.alphas.push_back(alpha);
    m.source.push_back(i);
    m.q.push_back(q / alpha);
    m.p.push_back(p / alpha);
  }
  return m;
}

QicModeSet build_qic(std::vector<Generator> generators, double eps, const QuadratureOptions& opts,
                     unsigned threads) {
  if (generators.empty()) throw ConfigError("build_qic needs at least one generator");
  PairingMatrix s = PairingMatrix::compute(generators, opts, threads);
  return build_qic(s, std::move(generators), eps);
}

namespace {

std::vector<Eigen::VectorXd> mode_vectors(const QicModeSet& m) {
  std::vector<Eigen::VectorXd> x = m.q;
  x.insert(x.end(), m.p.begin(), m.p.end());
  return x;
}

}  // namespace

Eigen::MatrixXd mode_symplectic_gram(const QicModeSet& m) {
  const ExtendedGram eg = extended_gram(m.pairing);
  const auto x = mode_vectors(m);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = eg.commutator(x[a], x[b]);
  return out;
}

Eigen::MatrixXd mode_covariance(const QicModeSet& m) {
  const ExtendedGram eg = extended_gram(m.pairing);
  const auto x = mode_vectors(m);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = eg.symmetric(x[a], x[b]);
  return out;
}

double standard_form_residual(const QicModeSet& m) {
  const auto n = static_cast<Eigen::Index>(m.mode_count());
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd half = 0.5 * Eigen::MatrixXd::Identity(2 * n, 2 * n);
  return std::max((mode_symplectic_gram(m) - omega).cwiseAbs().maxCoeff(),
                  (mode_covariance(m) - half).cwiseAbs().maxCoeff());
}

// ---------------------------------------------------------------------------

std::vector<double> Axis::values() const {
  if (step == 0.0) return {min};
  const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = min + static_cast<double>(i) * step;
  return v;
}

std::size_t GridSpec::point_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values().size();
  return axes.empty() ? 0 : n;
}

std::array<double, 3> GridSpec::point(std::size_t index) const {
  std::array<double, 3> x{};
  for (std::size_t a = axes.size(); a-- > 0;) {
    const auto v = axes[a].values();
    x[a] = v[index % v.size()];
    index /= v.size();
  }
  return x;
}

void validate_grid(const GridSpec& g, Dim dim) {
  if (g.axes.size() != static_cast<std::size_t>(to_int(dim)))
    throw UsageError("grid needs " + std::to_string(to_int(dim)) + " axes, got " +
                     std::to_string(g.axes.size()));
  for (const auto& a : g.axes) {
    if (!std::isfinite(a.min) || !std::isfinite(a.max) || !std::isfinite(a.step))
      throw UsageError("grid axis values must be finite");
    if (a.step < 0.0) throw UsageError("grid step must be positive");
    if (a.step == 0.0 && a.min != a.max) throw UsageError("zero-size grid: axis step is 0 over a range");
    if (a.max < a.min) throw UsageError("zero-size grid: axis max below min");
  }
}

FieldGrid weighting_grid(const QicModeSet& m, double t, const GridSpec& grid, std::vector<std::size_t> modes,
                         const QuadratureOptions& opts, unsigned threads) {
  if (m.generators.size() != m.pairing.size())
    throw UsageError("weighting_grid needs the generators the mode set was built from");
  const Dim dim = m.dim();
  validate_grid(grid, dim);
  if (modes.empty())
    for (std::size_t i = 0; i < m.mode_count(); ++i) modes.push_back(i);
  for (auto i : modes)
    if (i >= m.mode_count()) throw UsageError("mode index " + std::to_string(i) + " out of range");

  const std::size_t k = m.generators.size();
  const std::size_t np = grid.point_count();
  const int d = to_int(dim);

  // Each generator's mode function depends only on the distance to its
  // center; evaluate once per distinct distance.
  std::vector<std::vector<double>> dist(k, std::vector<double>(np));
  std::vector<std::vector<double>> radii(k);
  for (std::size_t g = 0; g < k; ++g) {
    const auto& c = m.generators[g].smearing.center();
    for (std::size_t i = 0; i < np; ++i) {
      const auto x = grid.point(i);
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
      dist[g][i] = std::sqrt(s);
    }
    radii[g] = dist[g];
    std::sort(radii[g].begin(), radii[g].end());
    radii[g].erase(std::unique(radii[g].begin(), radii[g].end()), radii[g].end());
  }
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t g = 0; g < k; ++g)
    for (std::size_t r = 0; r < radii[g].size(); ++r) jobs.emplace_back(g, r);
  std::vector<ModeSample> samples(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto [g, r] = jobs[j];
    samples[j] = mode_sample(m.generators[g], t, radii[g][r], opts);
    for (const Estimate* e : {&samples[j].value, &samples[j].dt})
      if (!(e->error <= std::max(1e3 * opts.rel_tol * std::abs(e->value), 1e-12)))
        throw NumericError("mode function error estimate above tolerance", e->error);
  });
  std::vector<std::size_t> offset(k + 1, 0);
  for (std::size_t g = 0; g < k; ++g) offset[g + 1] = offset[g] + radii[g].size();

  FieldGrid out;
  out.dim = dim;
  out.time = t;
  out.grid = grid;
  for (auto mi : modes) {
    ModeWeights w{mi, std::vector<double>(np), std::vector<double>(np), std::vector<double>(np),
                  std::vector<double>(np)};
    const auto& q = m.q[mi];
    const auto& p = m.p[mi];
    for (std::size_t i = 0; i < np; ++i) {
      double f1 = 0, f2 = 0, g1 = 0, g2 = 0;
      for (std::size_t g = 0; g < k; ++g) {
        const auto it = std::lower_bound(radii[g].begin(), radii[g].end(), dist[g][i]);
        const ModeSample& s = samples[offset[g] + static_cast<std::size_t>(it - radii[g].begin())];
        const double v1 = 2.0 * s.dt.value.imag(), v2 = -2.0 * s.value.value.imag();
        const double u1 = -2.0 * s.dt.value.real(), u2 = 2.0 * s.value.value.real();
        const auto a = static_cast<Eigen::Index>(g), b = static_cast<Eigen::Index>(k + g);
        f1 += q[a] * v1 + q[b] * u1;
        f2 += q[a] * v2 + q[b] * u2;
        g1 += p[a] * v1 + p[b] * u1;
        g2 += p[a] * v2 + p[b] * u2;
      }
      w.f1[i] = f1;
      w.f2[i] = f2;
      w.g1[i] = g1;
      w.g2[i] = g2;
    }
    out.modes.push_back(std::move(w));
  }
  return out;
}

}  // namespace qicsim
