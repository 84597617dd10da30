#include "qb/single_excitation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qb {

namespace {

constexpr double kExceptionalFlagTol = 1e-12;
constexpr double kResidualTol = 1e-9;
constexpr double kBiorthoTol = 1e-10;
constexpr double kConditionLimit = 1e8;

complexd site_frequency(const LatticeSpec& spec, bool odd) {
  // Omega_{A,B} = Delta - i*gamma/2, same convention as the K diagonal.
  return odd ? complexd(spec.delta_a, -0.5 * spec.gamma_a)
             : complexd(spec.delta_b, -0.5 * spec.gamma_b);
}

}  // namespace

Eigen::MatrixXcd EffectiveHamiltonian::dense() const {
  const int n = dim();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diagonal(i);
    if (i + 1 < n) {
      m(i, i + 1) = off_diagonal;
      m(i + 1, i) = off_diagonal;
    }
  }
  return m;
}

double EffectiveHamiltonian::frobenius_norm() const {
  double s = diagonal.squaredNorm();
  s += 2.0 * (dim() - 1) * std::norm(off_diagonal);
  return std::sqrt(s);
}

EffectiveHamiltonian build_effective_hamiltonian(const LatticeSpec& spec) {
  spec.validate();
  if (spec.gamma_collective != 0.0)
    throw validation_error(
        "single-excitation engine models individual decay only; "
        "gamma_collective must be 0 (use the exact oracle for superradiance)");
  EffectiveHamiltonian h;
  h.diagonal.resize(spec.n_sites);
  for (int j = 1; j <= spec.n_sites; ++j) {
    auto [delta, gamma] = spec.site_params(j);
    h.diagonal(j - 1) = complexd(delta, -0.5 * gamma);
  }
  h.off_diagonal = spec.coupling;
  return h;
}

SpectralData analytic_spectrum(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  const int half = n / 2;
  const complexd wa = site_frequency(spec, true);
  const complexd wb = site_frequency(spec, false);
  const complexd sum = 0.5 * (wa + wb);
  const complexd diff = wa - wb;

  SpectralData out;
  out.omega.resize(n);
  out.momenta.resize(half);
  const double scale = std::max({std::abs(wa), std::abs(wb),
                                 std::abs(spec.coupling), 1.0});
  for (int l = 1; l <= half; ++l) {
    const double k = 2.0 * std::numbers::pi * l / (n + 1);
    out.momenta[l - 1] = k;
    const complexd g = 2.0 * spec.coupling * std::cos(0.5 * k);
    const complexd arg = diff * diff + 4.0 * g * g;
    if (std::abs(arg) < kExceptionalFlagTol * scale * scale)
      out.near_exceptional.push_back(l);
    const complexd root = 0.5 * std::sqrt(arg);
    out.omega(out.index(Band::minus, l)) = sum - root;
    out.omega(out.index(Band::plus, l)) = sum + root;
  }
  return out;
}

double BiorthogonalBasis::max_biorthogonality_error() const {
  const Eigen::MatrixXcd gram = right.transpose() * right;
  return (gram - Eigen::MatrixXcd::Identity(n(), n())).cwiseAbs().maxCoeff();
}

double BiorthogonalBasis::max_completeness_error() const {
  const Eigen::MatrixXcd s = right * right.transpose();
  return (s - Eigen::MatrixXcd::Identity(n(), n())).cwiseAbs().maxCoeff();
}

double BiorthogonalBasis::max_residual(const EffectiveHamiltonian& h,
                                       const SpectralData& spectral) const {
  const Eigen::MatrixXcd k = h.dense();
  double worst = 0.0;
  for (int i = 0; i < n(); ++i) {
    const double r =
        (k * right.col(i) - spectral.omega(i) * right.col(i)).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

namespace {

// Greedy nearest-complex-distance matching of raw eigenvalues onto the
// analytic slot ordering. Slots are visited in vector order (minus band
// first, each band by increasing l), so ties resolve toward smaller k.
std::vector<int> match_to_analytic(const Eigen::VectorXcd& analytic,
                                   const Eigen::VectorXcd& raw) {
  const int n = static_cast<int>(analytic.size());
  std::vector<int> pick(n, -1);
  std::vector<bool> used(n, false);
  for (int slot = 0; slot < n; ++slot) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double d = std::abs(raw(i) - analytic(slot));
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    pick[slot] = best;
    used[best] = true;
  }
  return pick;
}

// Rescale columns so the unconjugated self-product is 1.
void biorthonormalize(Eigen::MatrixXcd& right) {
  for (int i = 0; i < right.cols(); ++i) {
    const complexd c = right.col(i).transpose() * right.col(i);
    const double unit = right.col(i).norm();
    if (std::abs(c) < unit * unit / kConditionLimit)
      throw engine_error(
          "biorthonormalization ill-conditioned (condition estimate > 1e8); "
          "spectrum is at or near an exceptional point");
    right.col(i) /= std::sqrt(c);
  }
}

}  // namespace

std::pair<SpectralData, BiorthogonalBasis> numerical_spectrum(
    const EffectiveHamiltonian& h) {
  const int n = h.dim();
  if (n < 2 || n % 2 != 0)
    throw validation_error("effective Hamiltonian dimension must be even >= 2");

  // Recover the analytic labels from the tridiagonal structure itself.
  LatticeSpec spec;
  spec.n_sites = n;
  spec.delta_a = h.diagonal(0).real();
  spec.gamma_a = -2.0 * h.diagonal(0).imag();
  spec.delta_b = h.diagonal(1).real();
  spec.gamma_b = -2.0 * h.diagonal(1).imag();
  spec.coupling = h.off_diagonal.real();
  SpectralData labels = analytic_spectrum(spec);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h.dense(), true);
  if (solver.info() != Eigen::Success)
    throw engine_error("dense non-Hermitian eigendecomposition failed");

  const std::vector<int> pick =
      match_to_analytic(labels.omega, solver.eigenvalues());

  SpectralData spectral = labels;
  BiorthogonalBasis basis;
  basis.right.resize(n, n);
  basis.numerical_fallback = true;
  for (int slot = 0; slot < n; ++slot) {
    spectral.omega(slot) = solver.eigenvalues()(pick[slot]);
    basis.right.col(slot) = solver.eigenvectors().col(pick[slot]);
  }
  biorthonormalize(basis.right);
  return {std::move(spectral), std::move(basis)};
}

BiorthogonalBasis analytic_eigenbasis(const LatticeSpec& spec) {
  const EffectiveHamiltonian h = build_effective_hamiltonian(spec);
  SpectralData spectral = analytic_spectrum(spec);
  const int n = spec.n_sites;
  const int half = n / 2;

  if (!spectral.near_exceptional.empty()) {
    auto [s, b] = numerical_spectrum(h);
    return b;
  }

  const complexd wa = site_frequency(spec, true);
  const complexd wb = site_frequency(spec, false);

  BiorthogonalBasis basis;
  basis.right.resize(n, n);
  for (int l = 1; l <= half; ++l) {
    const double k = spectral.momenta[l - 1];
    const complexd g = 2.0 * spec.coupling * std::cos(0.5 * k);
    for (Band band : {Band::minus, Band::plus}) {
      const complexd omega = spectral.value(band, l);
      // Sublattice weights (a, b) solve the per-momentum two-level problem
      // [[wa, g], [g, wb]] (a, b)^T = omega (a, b)^T. Pick the better
      // conditioned of the two equivalent forms.
      complexd a = g, b = omega - wa;
      const complexd a2 = omega - wb, b2 = g;
      if (std::abs(a2) + std::abs(b2) > std::abs(a) + std::abs(b)) {
        a = a2;
        b = b2;
      }
      if (std::abs(a) + std::abs(b) == 0.0) {
        // Fully degenerate (decoupled uniform chain): coordinate patterns.
        a = (band == Band::plus) ? 1.0 : 0.0;
        b = (band == Band::plus) ? 0.0 : 1.0;
      }
      Eigen::VectorXcd v(n);
      for (int m = 1; m <= half; ++m) {
        v(2 * m - 2) = a * std::sin(k * (m - 0.5));  // odd site 2m-1
        v(2 * m - 1) = b * std::sin(k * m);          // even site 2m
      }
      basis.right.col(spectral.index(band, l)) = v;
    }
  }

  try {
    biorthonormalize(basis.right);
  } catch (const engine_error&) {
    auto [s, b] = numerical_spectrum(h);
    return b;
  }

  const double scale = std::max(h.frobenius_norm(), 1.0);
  if (basis.max_residual(h, spectral) > kResidualTol * scale ||
      basis.max_biorthogonality_error() > kBiorthoTol) {
    auto [s, b] = numerical_spectrum(h);
    return b;
  }
  return basis;
}

void PureState1X::validate() const {
  const double total = std::norm(amp_g) + amp_e.squaredNorm();
  if (std::abs(total - 1.0) > 1e-12)
    throw validation_error("pure single-excitation state is not normalized");
}

PureState1X PureState1X::ground(int n_sites) {
  return {complexd(1.0, 0.0), Eigen::VectorXcd::Zero(n_sites)};
}

PureState1X PureState1X::two_site_superposition(int n_sites, int j1, int j2) {
  if (j1 < 1 || j1 > n_sites || j2 < 1 || j2 > n_sites || j1 == j2)
    throw validation_error("two_site_superposition needs distinct sites in range");
  PureState1X s{complexd(1.0 / std::numbers::sqrt2, 0.0),
                Eigen::VectorXcd::Zero(n_sites)};
  s.amp_e(j1 - 1) = 0.5;
  s.amp_e(j2 - 1) = 0.5;
  return s;
}

SingleExcitationEngine::SingleExcitationEngine(const LatticeSpec& spec)
    : spec_(spec),
      spectral_(analytic_spectrum(spec)),
      basis_(analytic_eigenbasis(spec)) {
  if (basis_.numerical_fallback) {
    // Eigenvalues must track the basis actually in use.
    auto [s, b] = numerical_spectrum(build_effective_hamiltonian(spec));
    spectral_ = std::move(s);
    basis_ = std::move(b);
  }
}

SingleExcitationEngine::SingleExcitationEngine(const LatticeSpec& spec,
                                               SpectralData spectral,
                                               BiorthogonalBasis basis)
    : spec_(spec), spectral_(std::move(spectral)), basis_(std::move(basis)) {
  if (spectral_.n() != spec.n_sites || basis_.n() != spec.n_sites)
    throw validation_error("spectral/basis dimension mismatch with spec");
}

void SingleExcitationEngine::check_site(int j) const {
  if (j < 1 || j > spec_.n_sites)
    throw validation_error("site index out of range");
}

Eigen::MatrixXcd SingleExcitationEngine::amplitudes(
    const PureState1X& state0, const std::vector<double>& times) const {
  state0.validate();
  if (state0.n_sites() != spec_.n_sites)
    throw validation_error("initial state size does not match lattice");
  const int n = spec_.n_sites;
  // Biorthogonal expansion coefficients <K_n*|Phi>.
  const Eigen::VectorXcd alpha = basis_.right.transpose() * state0.amp_e;
  Eigen::MatrixXcd psi(n, times.size());
  Eigen::VectorXcd mode(n);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    for (int m = 0; m < n; ++m)
      mode(m) = alpha(m) * std::exp(complexd(0.0, -t) * spectral_.omega(m));
    psi.col(ti) = basis_.right * mode;
  }
  return psi;
}

std::vector<double> SingleExcitationEngine::sigma_z(
    const PureState1X& state0, int j, const std::vector<double>& times) const {
  check_site(j);
  const Eigen::MatrixXcd psi = amplitudes(state0, times);
  std::vector<double> out(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    out[ti] = 2.0 * std::norm(psi(j - 1, ti)) - 1.0;
  return out;
}

std::vector<double> SingleExcitationEngine::sigma_x(
    const PureState1X& state0, int j, const std::vector<double>& times) const {
  check_site(j);
  const Eigen::MatrixXcd psi = amplitudes(state0, times);
  // <sigma_j^x> = 2 Re <e_j|rho|g>; the ground amplitude of the decaying
  // branch stays at its initial value because the jump term only feeds
  // |g><g| populations.
  const complexd g_conj = std::conj(state0.amp_g);
  std::vector<double> out(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    out[ti] = 2.0 * (psi(j - 1, ti) * g_conj).real();
  return out;
}

std::vector<complexd> SingleExcitationEngine::correlation(
    const PureState1X& state0, int j, int jp,
    const std::vector<double>& times) const {
  check_site(j);
  check_site(jp);
  const Eigen::MatrixXcd psi = amplitudes(state0, times);
  // <sigma_j^+ sigma_jp^-> = <e_jp|rho|e_j>.
  std::vector<complexd> out(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    out[ti] = psi(jp - 1, ti) * std::conj(psi(j - 1, ti));
  return out;
}

namespace {
std::string site_suffix(int j) { return "_" + std::to_string(j); }
}  // namespace

Trajectory trajectory_sigma_z(const LatticeSpec& spec,
                              const PureState1X& state0, int j,
                              const std::vector<double>& times) {
  SingleExcitationEngine engine(spec);
  Trajectory traj(times, spec, "single-excitation");
  traj.add_column("sz" + site_suffix(j), engine.sigma_z(state0, j, times));
  return traj;
}

Trajectory trajectory_sigma_x(const LatticeSpec& spec,
                              const PureState1X& state0, int j,
                              const std::vector<double>& times) {
  SingleExcitationEngine engine(spec);
  Trajectory traj(times, spec, "single-excitation");
  traj.add_column("sx" + site_suffix(j), engine.sigma_x(state0, j, times));
  return traj;
}

Trajectory trajectory_correlation(const LatticeSpec& spec,
                                  const PureState1X& state0, int j, int jp,
                                  const std::vector<double>& times) {
  SingleExcitationEngine engine(spec);
  const auto corr = engine.correlation(state0, j, jp, times);
  std::vector<double> re(corr.size()), im(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) {
    re[i] = corr[i].real();
    im[i] = corr[i].imag();
  }
  Trajectory traj(times, spec, "single-excitation");
  const std::string suffix = site_suffix(j) + site_suffix(jp);
  traj.add_column("corr_re" + suffix, std::move(re));
  traj.add_column("corr_im" + suffix, std::move(im));
  return traj;
}

DecayBandReport decay_band_report(const LatticeSpec& spec,
                                  DecayConvention reference) {
  const SpectralData spectral = analytic_spectrum(spec);
  DecayBandReport report;
  report.uniform_reference = (reference == DecayConvention::half_gamma)
                                 ? 0.5 * spec.gamma_a
                                 : spec.gamma_a;
  for (Band band : {Band::minus, Band::plus}) {
    for (int l = 1; l <= spectral.half(); ++l) {
      const complexd w = spectral.value(band, l);
      report.rows.push_back({l, spectral.momenta[l - 1], band, w.real(),
                             w.imag(), std::abs(w.imag())});
    }
  }
  return report;
}

}  // namespace qb
