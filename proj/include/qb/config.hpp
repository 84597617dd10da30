#pragma once

#include <string>
#include <vector>

#include "qb/errors.hpp"
#include "qb/integrator.hpp"
#include "qb/lattice.hpp"

namespace qb {

/// Flat ordered key=value store with dotted section prefixes
/// (lattice.n_sites, integrator.dt, ...). Lines starting with '#' and blank
/// lines are ignored on parse; render preserves insertion order so that
/// parse(render(c)) == c.
class Config {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;  // throws config_error
  std::string get_or(const std::string& key, const std::string& fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  std::string render() const;
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool operator==(const Config&) const = default;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct InitialState {
  enum class Kind { fully_charged, ground, pure_1x, two_site };
  Kind kind = Kind::fully_charged;
  // pure-1x: 2(N+1) reals, re/im pairs for |g> then |e_1>..|e_N>.
  std::vector<double> amplitudes;
  // two-site: |g>/sqrt(2) + (|e_site1> + |e_site2>)/2.
  int site1 = 0;
  int site2 = 0;
};

/// Fully resolved run description. Observable names are normalized
/// (sigma_z_* -> sz_*, sigma_x_* -> sx_*) and sz_all is expanded.
struct RunConfig {
  std::string engine;  // single-excitation | cumulant | oracle
  LatticeSpec lattice;
  IntegratorConfig integrator;
  std::vector<std::string> observables;
  InitialState initial_state;
  std::string output_path;
  std::string output_format = "csv";

  // Throws config_error on unknown/missing/malformed keys and
  // validation_error on semantic violations (bad engine, incompatible
  // initial state, invalid lattice).
  static RunConfig from_config(const Config& config);
};

}  // namespace qb
