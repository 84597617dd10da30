#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qb/cumulant.hpp"
#include "qb/lattice.hpp"

namespace qb {

/// Normalized energy E = <H_S> / (sum_j Delta_j/2), with the interaction part
/// reconstructed from the nearest-neighbor correlations.
double energy_from_cumulant(const LatticeSpec& spec, const CumulantState& state);

/// Gap-weighted population P = sum_j (Delta_j/2) sz_j / sum_j (Delta_j/2).
double population_from_cumulant(const LatticeSpec& spec,
                                const CumulantState& state);

// Trajectory columns for the cumulant engine built on the two reductions
// above.
CumulantObservable observe_energy();
CumulantObservable observe_population();

/// Pointwise comparison of a dimeric run against its uniform reference.
/// Times where the reference energy is nearly zero are flagged: the relative
/// excess is ill-conditioned there and excluded from fits.
struct ExcessReport {
  std::vector<double> times;
  std::vector<double> relative_excess;  // (E_d - E_u) / E_u
  std::vector<double> absolute_excess;  // E_d - E_u
  std::vector<bool> ill_conditioned;    // |E_u| below threshold
  LatticeSpec spec_d;
  LatticeSpec spec_u;

  static constexpr double kIllConditionedThreshold = 0.05;
};

/// Builds the report from two trajectories carrying the given energy column.
/// The time grids must match exactly.
ExcessReport excess_report(const Trajectory& traj_d, const Trajectory& traj_u,
                           const std::string& column = "energy");

struct TimeWindow {
  double t0;
  double t1;
};

/// Least-squares slope of log(E_d/E_u) = log(1 + relative_excess) against
/// log t over the window, skipping flagged times and t <= 0. Throws
/// validation_error if the ratio is nonpositive anywhere in the window or if
/// fewer than two usable points remain.
double power_law_fit(const ExcessReport& report, const TimeWindow& window);

/// Time of the maximum absolute excess if it is strictly interior; nullopt
/// when the discrete argmax sits on either boundary. Ties resolve to the
/// earliest time.
std::optional<double> turnover_time(const ExcessReport& report);

struct RatioPoint {
  double ratio;
  double relative_excess;
  std::string error;  // empty on success
};

/// One cumulant run per detuning ratio plus the uniform reference, all fully
/// charged, probed at t_probe. Per-ratio failures are captured in the output
/// instead of aborting the sweep.
std::vector<RatioPoint> ratio_sweep(const LatticeSpec& base_spec,
                                    const std::vector<double>& ratios,
                                    double t_probe, double dt = 0.01);

/// Pearson correlation of the two signals over the window; -1 means
/// anti-phase. Throws validation_error on mismatched grids, an empty window,
/// or a zero-variance signal.
double synchronization_score(const std::vector<double>& times,
                             const std::vector<double>& x1,
                             const std::vector<double>& x2,
                             const TimeWindow& window);

}  // namespace qb
