#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "qb/lattice.hpp"

namespace qb {

using complexd = std::complex<double>;

/// Tridiagonal complex symmetric generator of the single-excitation dynamics,
/// measured relative to the ground-state energy: diagonal entries are
/// Delta_j - i*gamma_j/2, off-diagonal the coupling.
struct EffectiveHamiltonian {
  Eigen::VectorXcd diagonal;
  complexd off_diagonal;

  int dim() const { return static_cast<int>(diagonal.size()); }
  Eigen::MatrixXcd dense() const;
  double frobenius_norm() const;
};

// Throws validation_error for nonzero gamma_collective: this engine models
// individual decay only.
EffectiveHamiltonian build_effective_hamiltonian(const LatticeSpec& spec);

enum class Band { minus = 0, plus = 1 };

/// Two-band complex spectrum. omega holds the minus band (l = 1..N/2) followed
/// by the plus band, matching the ordering used by the trajectory sums.
struct SpectralData {
  Eigen::VectorXcd omega;
  std::vector<double> momenta;            // k_l = 2*pi*l/(N+1)
  std::vector<int> near_exceptional;      // l values where the root nearly vanishes

  int n() const { return static_cast<int>(omega.size()); }
  int half() const { return n() / 2; }
  // Position of (band, l) in omega; l is 1-based.
  int index(Band band, int l) const {
    return (band == Band::minus ? 0 : half()) + l - 1;
  }
  complexd value(Band band, int l) const { return omega(index(band, l)); }
};

// Closed-form spectrum: omega_k^± = (Omega_A+Omega_B)/2
// ± sqrt((Omega_A-Omega_B)^2 + 16 lambda^2 cos^2(k/2))/2 with
// Omega_{A,B} = Delta_{A,B} - i*gamma_{A,B}/2.
SpectralData analytic_spectrum(const LatticeSpec& spec);

/// Right eigenvectors of the complex symmetric K, scaled so that the
/// unconjugated transpose of each column is its biorthonormal left partner:
/// right.col(n).transpose() * right.col(m) = delta_nm.
struct BiorthogonalBasis {
  Eigen::MatrixXcd right;
  bool numerical_fallback = false;

  int n() const { return static_cast<int>(right.cols()); }
  Eigen::RowVectorXcd left(int n) const { return right.col(n).transpose(); }

  double max_biorthogonality_error() const;
  double max_completeness_error() const;
  double max_residual(const EffectiveHamiltonian& h,
                      const SpectralData& spectral) const;
};

// Dense non-Hermitian eigendecomposition with eigenvalues matched to the
// analytic band/momentum labels by greedy nearest-complex-distance
// assignment. Throws engine_error if biorthonormalization is ill-conditioned
// (condition estimate > 1e8), signaling an exceptional point.
std::pair<SpectralData, BiorthogonalBasis> numerical_spectrum(
    const EffectiveHamiltonian& h);

// Closed-form eigenbasis from the sublattice sine patterns. Falls back to
// numerical_spectrum when the residual check fails; the fallback is recorded
// in BiorthogonalBasis::numerical_fallback.
BiorthogonalBasis analytic_eigenbasis(const LatticeSpec& spec);

/// Pure state in span{|g>, |e_1>..|e_N>}; normalized to 1 within 1e-12.
struct PureState1X {
  complexd amp_g;
  Eigen::VectorXcd amp_e;

  int n_sites() const { return static_cast<int>(amp_e.size()); }
  void validate() const;

  static PureState1X ground(int n_sites);
  // |g>/sqrt(2) + (|e_j1> + |e_j2>)/2
  static PureState1X two_site_superposition(int n_sites, int j1, int j2);
};

/// Evaluates the closed-form trajectories. Holds the eigenbasis so repeated
/// observables reuse one decomposition.
class SingleExcitationEngine {
 public:
  explicit SingleExcitationEngine(const LatticeSpec& spec);
  SingleExcitationEngine(const LatticeSpec& spec, SpectralData spectral,
                         BiorthogonalBasis basis);

  std::vector<double> sigma_z(const PureState1X& state0, int j,
                              const std::vector<double>& times) const;
  std::vector<double> sigma_x(const PureState1X& state0, int j,
                              const std::vector<double>& times) const;
  std::vector<complexd> correlation(const PureState1X& state0, int j, int jp,
                                    const std::vector<double>& times) const;

  const LatticeSpec& spec() const { return spec_; }
  const SpectralData& spectrum() const { return spectral_; }
  const BiorthogonalBasis& basis() const { return basis_; }

 private:
  // Single-excitation amplitudes at each time: psi(t) = R diag(exp(-i W t)) a
  // with a the biorthogonal expansion of state0.
  Eigen::MatrixXcd amplitudes(const PureState1X& state0,
                              const std::vector<double>& times) const;
  void check_site(int j) const;

  LatticeSpec spec_;
  SpectralData spectral_;
  BiorthogonalBasis basis_;
};

Trajectory trajectory_sigma_z(const LatticeSpec& spec,
                              const PureState1X& state0, int j,
                              const std::vector<double>& times);
Trajectory trajectory_sigma_x(const LatticeSpec& spec,
                              const PureState1X& state0, int j,
                              const std::vector<double>& times);
// Two real columns: corr_re_<j>_<jp> and corr_im_<j>_<jp>.
Trajectory trajectory_correlation(const LatticeSpec& spec,
                                  const PureState1X& state0, int j, int jp,
                                  const std::vector<double>& times);

/// Reference-line convention for the uniform-lattice decay rate printed by
/// decay_band_report: half_gamma is the convention the dynamics use
/// (|Im Omega| = gamma/2 for a uniform lattice); full_gamma is provided for
/// comparison only.
enum class DecayConvention { half_gamma, full_gamma };

struct DecayBandReport {
  struct Row {
    int l;
    double k;
    Band band;
    double re_omega;
    double im_omega;
    double abs_im;
  };
  std::vector<Row> rows;
  double uniform_reference;
};

DecayBandReport decay_band_report(
    const LatticeSpec& spec,
    DecayConvention reference = DecayConvention::half_gamma);

}  // namespace qb
