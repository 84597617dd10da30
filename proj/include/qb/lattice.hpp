#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qb/errors.hpp"

namespace qb {

/// Parameters of the dimeric spin chain. All frequencies and rates are in
/// units of delta_a (conventionally 1.0), times in units of 1/delta_a.
/// Sites are 1-based; odd sites are type A, even sites type B.
struct LatticeSpec {
  int n_sites = 2;
  double delta_a = 1.0;           // detuning of odd (A) sites
  double delta_b = 1.0;           // detuning of even (B) sites
  double gamma_a = 0.0;           // spontaneous decay of A sites
  double gamma_b = 0.0;           // spontaneous decay of B sites
  double coupling = 0.0;          // nearest-neighbor strength
  double gamma_collective = 0.0;  // superradiant rate (0 in storage phase)

  // Throws validation_error if any invariant is violated.
  void validate() const;

  bool is_uniform() const;

  // (detuning, decay) of site j, 1-based.
  std::pair<double, double> site_params(int j) const;
  double site_detuning(int j) const { return site_params(j).first; }
  double site_decay(int j) const { return site_params(j).second; }

  // One-line key=value rendering for file headers.
  std::string summary() const;

  bool operator==(const LatticeSpec&) const = default;
};

/// Convenience constructor enforcing the gamma-proportional-to-gap rule:
/// delta_a = 1, delta_b = delta_b_ratio, gamma_a = gamma_over_gap,
/// gamma_b = gamma_over_gap * delta_b_ratio, gamma_collective = 0.
LatticeSpec make_spec(int n_sites, double delta_b_ratio, double gamma_over_gap,
                      double coupling);

/// Time grid plus named real observable columns.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<double> times, LatticeSpec spec, std::string engine);

  // Throws validation_error on length mismatch or duplicate name.
  void add_column(const std::string& name, std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  bool has_column(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
  const std::vector<std::string>& column_names() const { return names_; }
  const LatticeSpec& spec() const { return spec_; }
  const std::string& engine() const { return engine_; }

 private:
  std::vector<double> times_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> values_;
  LatticeSpec spec_;
  std::string engine_;
};

}  // namespace qb
