#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qb/integrator.hpp"
#include "qb/lattice.hpp"

namespace qb {

/// Mean-field state of the second-order cumulant closure: populations
/// <sigma_j^z> plus the strictly-upper-triangular pair correlations
/// <sigma_n^+ sigma_m^-> (n < m). Lower-triangular values are conjugates by
/// convention; the diagonal is derived as (1 + sz)/2 and never stored.
struct CumulantState {
  Eigen::VectorXd sz;      // size N
  Eigen::VectorXcd corr;   // packed upper triangle, size N(N-1)/2

  int n_sites() const { return static_cast<int>(sz.size()); }

  // Packed offset of the 0-based pair (a, b), a < b.
  static Eigen::Index pair_index(int a, int b, int n) {
    return static_cast<Eigen::Index>(a) * (2 * n - a - 1) / 2 + (b - a - 1);
  }

  // <sigma_n^+ sigma_m^-> for any 1-based pair, including the derived
  // diagonal and conjugated lower triangle.
  std::complex<double> correlation(int n, int m) const;

  // Largest violation of the physical bounds |sz| <= 1, |corr| <= 1.
  double bound_violation() const;
};

CumulantState init_fully_charged(const LatticeSpec& spec);
CumulantState init_ground(const LatticeSpec& spec);

/// Right-hand side of the closed cumulant equations (storage phase only:
/// gamma_collective must be zero). Out-of-range neighbor terms are dropped,
/// matching the open boundary condition.
CumulantState derivative(const LatticeSpec& spec, const CumulantState& state);

/// Named per-state observable used to populate trajectory columns.
struct CumulantObservable {
  std::string name;
  std::function<double(const LatticeSpec&, const CumulantState&)> eval;
};

// Built-in extractors.
CumulantObservable observe_sz(int j);
CumulantObservable observe_corr_re(int n, int m);
CumulantObservable observe_corr_im(int n, int m);
CumulantObservable observe_total_excitation();

struct CumulantRun {
  Trajectory trajectory;
  CumulantState final_state;
};

/// Fixed-step RK4 propagation. Aborts with engine_error if a state invariant
/// is violated by more than 1e-3 (instability signal; use a smaller dt).
CumulantRun integrate(const LatticeSpec& spec, const CumulantState& state0,
                      const IntegratorConfig& cfg,
                      const std::vector<CumulantObservable>& observables);

double total_excitation(const CumulantState& state);

}  // namespace qb
