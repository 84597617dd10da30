#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qb/integrator.hpp"
#include "qb/lattice.hpp"
#include "qb/single_excitation.hpp"

namespace qb {

struct PurcellResult {
  double rate;
  bool bad_cavity_warning;  // eta/kappa >= 0.1: adiabatic elimination suspect
};

/// Purcell-enhanced collective emission rate 4*eta^2/kappa of the
/// adiabatically eliminated cavity.
PurcellResult purcell_rate(double eta, double kappa);

/// Dense density matrix over the full 2^N spin Hilbert space. Tensor order:
/// site 1 is the most significant qubit; per-site basis bit 1 = |up>
/// (sigma^z = +1), bit 0 = |down>.
struct DensityMatrix {
  Eigen::MatrixXcd rho;
  int n_sites = 0;

  Eigen::Index dim() const { return rho.rows(); }
  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  // Throws validation_error on Hermiticity/trace/positivity breaches.
  void validate(double tol = 1e-10, double positivity_tol = 1e-8) const;

  static DensityMatrix from_pure(const Eigen::VectorXcd& psi, int n_sites);
  static DensityMatrix fully_charged(int n_sites);
  static DensityMatrix ground(int n_sites);
  static DensityMatrix from_pure_1x(const PureState1X& state);
};

/// Brute-force Lindblad superoperator: commutator with the chain Hamiltonian,
/// the N local decay channels, and optionally the collective superradiant
/// channel. apply() assumes a Hermitian argument (preserved by the flow),
/// which lets the commutator reuse a single sparse product.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const LatticeSpec& spec, int max_sites = 12);

  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho) const;
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

  Eigen::Index dim() const { return dim_; }
  const LatticeSpec& spec() const { return spec_; }

 private:
  LatticeSpec spec_;
  int n_;
  Eigen::Index dim_;
  Eigen::VectorXd ham_diag_;      // sum_j Delta_j/2 s_j(basis state)
  Eigen::VectorXd decay_weight_;  // (1/2) sum_j gamma_j n_j(basis state)
  Eigen::VectorXcd coeff_;        // -i ham_diag - decay_weight
  std::vector<double> gamma_;
  Eigen::SparseMatrix<std::complex<double>> collective_lower_;
  Eigen::SparseMatrix<std::complex<double>> collective_number_;  // J^+ J^-
  mutable Eigen::MatrixXcd scratch_;
};

/// Named expectation values of a density matrix: sz_j, sx_j for every site,
/// corr_re/corr_im for every n < m pair, plus normalized energy and
/// population.
std::map<std::string, double> observables(const DensityMatrix& rho,
                                          const LatticeSpec& spec);

struct OracleRunOptions {
  std::vector<std::string> observable_names;  // trajectory columns
  double invariant_tol = 1e-6;                // abort threshold per sample
};

struct OracleRun {
  Trajectory trajectory;
  DensityMatrix final_state;
};

/// Fixed-step RK4 on the full density matrix, recording the requested
/// observables at sampled times. Trace and Hermiticity are monitored at every
/// sample; breaches beyond invariant_tol abort with a step-size diagnostic.
OracleRun propagate(const LindbladGenerator& gen, const DensityMatrix& rho0,
                    const IntegratorConfig& cfg, const OracleRunOptions& opts);

}  // namespace qb
