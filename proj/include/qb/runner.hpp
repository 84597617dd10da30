#pragma once

#include <ostream>
#include <vector>

#include "qb/config.hpp"
#include "qb/lattice.hpp"
#include "qb/single_excitation.hpp"

namespace qb {

/// Sample grid produced by the fixed-step engines: t=0, then every
/// sample_every-th step, always including the final step.
std::vector<double> sample_times(const IntegratorConfig& cfg);

/// Resolves a declarative initial state into single-excitation amplitudes.
/// Throws validation_error for fully-charged (outside the sector).
PureState1X make_pure_state(const InitialState& state, int n_sites);

/// Dispatches a resolved run description to the matching engine and returns
/// the sampled trajectory. Unsupported observable/engine combinations throw
/// validation_error; engine instability throws engine_error.
Trajectory run_config(const RunConfig& rc);

/// Cross-engine consistency suite at small N; prints one line per check with
/// tolerance and observed deviation. Returns true iff every check passes.
bool run_verify(std::ostream& out);

}  // namespace qb
