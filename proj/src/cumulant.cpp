#include "qb/cumulant.hpp"

#include <cmath>
#include <cstdio>

namespace qb {

namespace {

using complexd = std::complex<double>;

constexpr double kAbortTol = 1e-3;

// Flat layout used by the stepper: [sz(0..N), re/im pairs of the packed
// upper-triangular correlations].
Eigen::VectorXd pack(const CumulantState& s) {
  const int n = s.n_sites();
  const Eigen::Index pairs = s.corr.size();
  Eigen::VectorXd y(n + 2 * pairs);
  y.head(n) = s.sz;
  for (Eigen::Index p = 0; p < pairs; ++p) {
    y(n + 2 * p) = s.corr(p).real();
    y(n + 2 * p + 1) = s.corr(p).imag();
  }
  return y;
}

CumulantState unpack(const Eigen::VectorXd& y, int n) {
  CumulantState s;
  s.sz = y.head(n);
  const Eigen::Index pairs = (y.size() - n) / 2;
  s.corr.resize(pairs);
  for (Eigen::Index p = 0; p < pairs; ++p)
    s.corr(p) = complexd(y(n + 2 * p), y(n + 2 * p + 1));
  return s;
}

// Right-hand side of the closed set on the flat layout.
class CumulantOde {
 public:
  explicit CumulantOde(const LatticeSpec& spec) : n_(spec.n_sites), lambda_(spec.coupling) {
    delta_.resize(n_);
    gamma_.resize(n_);
    for (int j = 1; j <= n_; ++j) {
      auto [d, g] = spec.site_params(j);
      delta_[j - 1] = d;
      gamma_[j - 1] = g;
    }
  }

  void operator()(const Eigen::VectorXd& y, double /*t*/,
                  Eigen::VectorXd& dy) const {
    dy.resize(y.size());
    const auto corr = [&](int a, int b) -> complexd {
      if (a < 0 || b < 0 || a >= n_ || b >= n_) return {0.0, 0.0};
      if (a < b) {
        const Eigen::Index p = n_ + 2 * CumulantState::pair_index(a, b, n_);
        return {y(p), y(p + 1)};
      }
      if (a > b) {
        const Eigen::Index p = n_ + 2 * CumulantState::pair_index(b, a, n_);
        return {y(p), -y(p + 1)};
      }
      return {0.5 * (1.0 + y(a)), 0.0};
    };

    // Populations: correlation currents through the two adjacent bonds plus
    // local decay.
    for (int i = 0; i < n_; ++i) {
      const double flow =
          corr(i, i + 1).imag() - (i > 0 ? corr(i - 1, i).imag() : 0.0);
      dy(i) = 4.0 * lambda_ * flow - gamma_[i] * (1.0 + y(i));
    }

    const complexd ilam(0.0, lambda_);
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        const complexd c = corr(a, b);
        complexd rate =
            complexd(-(gamma_[a] + gamma_[b]) * 0.5, delta_[a] - delta_[b]) * c;
        if (b == a + 1) {
          rate -= 0.5 * ilam * (y(a) - y(b));
          rate -= ilam * (y(a) * corr(a - 1, b) - y(b) * corr(a, b + 1));
        } else {
          rate -= ilam * y(a) * (corr(a - 1, b) + corr(a + 1, b));
          rate += ilam * y(b) * (corr(a, b - 1) + corr(a, b + 1));
        }
        const Eigen::Index p = n_ + 2 * CumulantState::pair_index(a, b, n_);
        dy(p) = rate.real();
        dy(p + 1) = rate.imag();
      }
    }
  }

 private:
  int n_;
  double lambda_;
  std::vector<double> delta_;
  std::vector<double> gamma_;
};

void require_storage_phase(const LatticeSpec& spec) {
  if (spec.gamma_collective != 0.0)
    throw validation_error(
        "cumulant closure is derived for gamma_collective = 0; superradiant "
        "runs must use the exact oracle");
}

}  // namespace

complexd CumulantState::correlation(int n, int m) const {
  const int sites = n_sites();
  if (n < 1 || m < 1 || n > sites || m > sites)
    throw validation_error("correlation index out of range");
  if (n == m) return {0.5 * (1.0 + sz(n - 1)), 0.0};
  if (n < m) return corr(pair_index(n - 1, m - 1, sites));
  return std::conj(corr(pair_index(m - 1, n - 1, sites)));
}

double CumulantState::bound_violation() const {
  double v = 0.0;
  for (Eigen::Index i = 0; i < sz.size(); ++i)
    v = std::max(v, std::abs(sz(i)) - 1.0);
  for (Eigen::Index p = 0; p < corr.size(); ++p)
    v = std::max(v, std::abs(corr(p)) - 1.0);
  return std::max(v, 0.0);
}

CumulantState init_fully_charged(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  return {Eigen::VectorXd::Ones(n),
          Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n) * (n - 1) / 2)};
}

CumulantState init_ground(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.n_sites;
  return {-Eigen::VectorXd::Ones(n),
          Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n) * (n - 1) / 2)};
}

CumulantState derivative(const LatticeSpec& spec, const CumulantState& state) {
  spec.validate();
  require_storage_phase(spec);
  if (state.n_sites() != spec.n_sites)
    throw validation_error("state size does not match lattice");
  CumulantOde ode(spec);
  Eigen::VectorXd dy;
  ode(pack(state), 0.0, dy);
  return unpack(dy, spec.n_sites);
}

CumulantObservable observe_sz(int j) {
  return {"sz_" + std::to_string(j),
          [j](const LatticeSpec&, const CumulantState& s) {
            return s.sz(j - 1);
          }};
}

CumulantObservable observe_corr_re(int n, int m) {
  return {"corr_re_" + std::to_string(n) + "_" + std::to_string(m),
          [n, m](const LatticeSpec&, const CumulantState& s) {
            return s.correlation(n, m).real();
          }};
}

CumulantObservable observe_corr_im(int n, int m) {
  return {"corr_im_" + std::to_string(n) + "_" + std::to_string(m),
          [n, m](const LatticeSpec&, const CumulantState& s) {
            return s.correlation(n, m).imag();
          }};
}

CumulantObservable observe_total_excitation() {
  return {"total_excitation", [](const LatticeSpec&, const CumulantState& s) {
            return total_excitation(s);
          }};
}

CumulantRun integrate(const LatticeSpec& spec, const CumulantState& state0,
                      const IntegratorConfig& cfg,
                      const std::vector<CumulantObservable>& observables) {
  spec.validate();
  require_storage_phase(spec);
  cfg.validate();
  if (state0.n_sites() != spec.n_sites)
    throw validation_error("state size does not match lattice");

  const CumulantOde ode(spec);
  Eigen::VectorXd y = pack(state0);
  Eigen::VectorXd k1, k2, k3, k4, tmp;

  std::vector<double> times;
  std::vector<std::vector<double>> columns(observables.size());

  const auto record = [&](double t, const CumulantState& s) {
    if (s.bound_violation() > kAbortTol) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "cumulant state left physical bounds by %.3g at t=%.6g; "
                    "integration is unstable, reduce dt (current dt=%.3g)",
                    s.bound_violation(), t, cfg.dt);
      throw engine_error(msg);
    }
    times.push_back(t);
    for (std::size_t c = 0; c < observables.size(); ++c)
      columns[c].push_back(observables[c].eval(spec, s));
  };

  record(0.0, state0);
  const long steps = cfg.n_steps();
  for (long step = 1; step <= steps; ++step) {
    rk4_step(ode, (step - 1) * cfg.dt, cfg.dt, y, k1, k2, k3, k4, tmp);
    if (step % cfg.sample_every == 0 || step == steps)
      record(step * cfg.dt, unpack(y, spec.n_sites));
  }

  CumulantRun run{Trajectory(std::move(times), spec, "cumulant"),
                  unpack(y, spec.n_sites)};
  for (std::size_t c = 0; c < observables.size(); ++c)
    run.trajectory.add_column(observables[c].name, std::move(columns[c]));
  return run;
}

double total_excitation(const CumulantState& state) {
  return 0.5 * (state.sz.array() + 1.0).sum();
}

}  // namespace qb
