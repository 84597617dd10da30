#include "qb/lattice.hpp"

#include <algorithm>
#include <cstdio>

namespace qb {

void LatticeSpec::validate() const {
  if (n_sites < 2 || n_sites % 2 != 0)
    throw validation_error("n_sites must be even and >= 2, got " +
                           std::to_string(n_sites));
  if (delta_a <= 0.0) throw validation_error("delta_a must be positive");
  if (gamma_a < 0.0 || gamma_b < 0.0)
    throw validation_error("decay rates must be nonnegative");
  if (gamma_collective < 0.0)
    throw validation_error("gamma_collective must be nonnegative");
}

bool LatticeSpec::is_uniform() const {
  return delta_a == delta_b && gamma_a == gamma_b;
}

std::pair<double, double> LatticeSpec::site_params(int j) const {
  if (j < 1 || j > n_sites)
    throw validation_error("site index " + std::to_string(j) +
                           " out of range 1.." + std::to_string(n_sites));
  return (j % 2 == 1) ? std::pair{delta_a, gamma_a} : std::pair{delta_b, gamma_b};
}

std::string LatticeSpec::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "n_sites=%d delta_a=%.17g delta_b=%.17g gamma_a=%.17g "
                "gamma_b=%.17g coupling=%.17g gamma_collective=%.17g",
                n_sites, delta_a, delta_b, gamma_a, gamma_b, coupling,
                gamma_collective);
  return buf;
}

LatticeSpec make_spec(int n_sites, double delta_b_ratio, double gamma_over_gap,
                      double coupling) {
  if (delta_b_ratio <= 0.0 || delta_b_ratio > 1.0)
    throw validation_error("delta_b_ratio must lie in (0, 1]");
  if (gamma_over_gap < 0.0)
    throw validation_error("gamma_over_gap must be nonnegative");
  LatticeSpec spec;
  spec.n_sites = n_sites;
  spec.delta_a = 1.0;
  spec.delta_b = delta_b_ratio;
  spec.gamma_a = gamma_over_gap;
  spec.gamma_b = gamma_over_gap * delta_b_ratio;
  spec.coupling = coupling;
  spec.gamma_collective = 0.0;
  spec.validate();
  return spec;
}

Trajectory::Trajectory(std::vector<double> times, LatticeSpec spec,
                       std::string engine)
    : times_(std::move(times)), spec_(spec), engine_(std::move(engine)) {
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (times_[i] <= times_[i - 1])
      throw validation_error("trajectory times must be strictly increasing");
}

void Trajectory::add_column(const std::string& name,
                            std::vector<double> values) {
  if (values.size() != times_.size())
    throw validation_error("column '" + name + "' has length " +
                           std::to_string(values.size()) + ", expected " +
                           std::to_string(times_.size()));
  if (has_column(name))
    throw validation_error("duplicate trajectory column '" + name + "'");
  names_.push_back(name);
  values_.push_back(std::move(values));
}

bool Trajectory::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& Trajectory::column(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end())
    throw validation_error("no trajectory column named '" + name + "'");
  return values_[static_cast<std::size_t>(it - names_.begin())];
}

}  // namespace qb
