#include "qb/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace qb {

double energy_from_cumulant(const LatticeSpec& spec,
                            const CumulantState& state) {
  if (state.n_sites() != spec.n_sites)
    throw validation_error("state size does not match lattice");
  const int n = spec.n_sites;
  double gap_sum = 0.0, e = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double half_gap = 0.5 * spec.site_detuning(j);
    gap_sum += half_gap;
    e += half_gap * state.sz(j - 1);
  }
  for (int j = 1; j < n; ++j)
    e += 2.0 * spec.coupling * state.correlation(j, j + 1).real();
  return e / gap_sum;
}

double population_from_cumulant(const LatticeSpec& spec,
                                const CumulantState& state) {
  if (state.n_sites() != spec.n_sites)
    throw validation_error("state size does not match lattice");
  const int n = spec.n_sites;
  double gap_sum = 0.0, p = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double half_gap = 0.5 * spec.site_detuning(j);
    gap_sum += half_gap;
    p += half_gap * state.sz(j - 1);
  }
  return p / gap_sum;
}

CumulantObservable observe_energy() {
  return {"energy", [](const LatticeSpec& spec, const CumulantState& s) {
            return energy_from_cumulant(spec, s);
          }};
}

CumulantObservable observe_population() {
  return {"population", [](const LatticeSpec& spec, const CumulantState& s) {
            return population_from_cumulant(spec, s);
          }};
}

ExcessReport excess_report(const Trajectory& traj_d, const Trajectory& traj_u,
                           const std::string& column) {
  const auto& td = traj_d.times();
  const auto& tu = traj_u.times();
  if (td.size() != tu.size())
    throw validation_error("trajectories have different lengths");
  for (std::size_t i = 0; i < td.size(); ++i)
    if (td[i] != tu[i])
      throw validation_error("trajectory time grids do not match");

  const auto& ed = traj_d.column(column);
  const auto& eu = traj_u.column(column);

  ExcessReport report;
  report.times = td;
  report.spec_d = traj_d.spec();
  report.spec_u = traj_u.spec();
  report.relative_excess.resize(td.size());
  report.absolute_excess.resize(td.size());
  report.ill_conditioned.resize(td.size());
  for (std::size_t i = 0; i < td.size(); ++i) {
    report.absolute_excess[i] = ed[i] - eu[i];
    const bool bad = std::abs(eu[i]) < ExcessReport::kIllConditionedThreshold;
    report.ill_conditioned[i] = bad;
    report.relative_excess[i] = bad ? 0.0 : (ed[i] - eu[i]) / eu[i];
  }
  return report;
}

double power_law_fit(const ExcessReport& report, const TimeWindow& window) {
  if (!(window.t1 > window.t0))
    throw validation_error("fit window must have positive length");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    const double t = report.times[i];
    if (t < window.t0 || t > window.t1 || t <= 0.0) continue;
    if (report.ill_conditioned[i]) continue;
    const double ratio = 1.0 + report.relative_excess[i];
    if (!(ratio > 0.0))
      throw validation_error("nonpositive energy ratio inside fit window");
    const double x = std::log(t), y = std::log(ratio);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw validation_error("fewer than two usable points in fit window");
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw validation_error("degenerate fit window");
  return (n * sxy - sx * sy) / denom;
}

std::optional<double> turnover_time(const ExcessReport& report) {
  const auto& a = report.absolute_excess;
  if (a.size() < 3) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] > a[best]) best = i;
  if (best == 0 || best + 1 == a.size()) return std::nullopt;
  return report.times[best];
}

std::vector<RatioPoint> ratio_sweep(const LatticeSpec& base_spec,
                                    const std::vector<double>& ratios,
                                    double t_probe, double dt) {
  base_spec.validate();
  if (!(t_probe > 0.0)) throw validation_error("t_probe must be positive");

  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_probe;
  cfg.sample_every = cfg.n_steps() > 1 ? static_cast<int>(cfg.n_steps()) : 1;

  const auto final_energy = [&](double ratio) {
    const LatticeSpec spec =
        make_spec(base_spec.n_sites, ratio, base_spec.gamma_a,
                  base_spec.coupling);
    const CumulantRun run =
        integrate(spec, init_fully_charged(spec), cfg, {observe_energy()});
    return run.trajectory.column("energy").back();
  };

  double e_uniform;
  try {
    e_uniform = final_energy(1.0);
  } catch (const std::exception& ex) {
    std::vector<RatioPoint> out;
    for (double r : ratios)
      out.push_back({r, 0.0, std::string("uniform reference failed: ") + ex.what()});
    return out;
  }

  std::vector<RatioPoint> out;
  out.reserve(ratios.size());
  for (double r : ratios) {
    RatioPoint point{r, 0.0, ""};
    try {
      if (!(r > 0.0 && r <= 1.0))
        throw validation_error("ratio must be in (0, 1]");
      if (std::abs(e_uniform) < ExcessReport::kIllConditionedThreshold)
        throw validation_error("uniform reference energy too close to zero");
      point.relative_excess = (final_energy(r) - e_uniform) / e_uniform;
    } catch (const std::exception& ex) {
      point.error = ex.what();
    }
    out.push_back(point);
  }
  return out;
}

double synchronization_score(const std::vector<double>& times,
                             const std::vector<double>& x1,
                             const std::vector<double>& x2,
                             const TimeWindow& window) {
  if (times.size() != x1.size() || times.size() != x2.size())
    throw validation_error("signals and time grid have different lengths");
  double s1 = 0.0, s2 = 0.0;
  long n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.t0 || times[i] > window.t1) continue;
    s1 += x1[i];
    s2 += x2[i];
    ++n;
  }
  if (n < 2) throw validation_error("window contains fewer than two samples");
  const double m1 = s1 / n, m2 = s2 / n;
  double c11 = 0.0, c22 = 0.0, c12 = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.t0 || times[i] > window.t1) continue;
    const double d1 = x1[i] - m1, d2 = x2[i] - m2;
    c11 += d1 * d1;
    c22 += d2 * d2;
    c12 += d1 * d2;
  }
  if (c11 == 0.0 || c22 == 0.0)
    throw validation_error("zero-variance signal in window");
  return c12 / std::sqrt(c11 * c22);
}

}  // namespace qb
