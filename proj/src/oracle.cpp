#include "qb/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <functional>

namespace qb {

namespace {

using complexd = std::complex<double>;
using Index = Eigen::Index;

// Bit mask of 1-based site j; site 1 is the most significant qubit.
Index site_mask(int n_sites, int j) {
  return Index(1) << (n_sites - j);
}

}  // namespace

PurcellResult purcell_rate(double eta, double kappa) {
  if (!(kappa > 0.0)) throw validation_error("cavity linewidth must be positive");
  return {4.0 * eta * eta / kappa, std::abs(eta) / kappa >= 0.1};
}

double DensityMatrix::trace_error() const {
  return std::abs(rho.trace() - complexd(1.0, 0.0));
}

double DensityMatrix::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double tol, double positivity_tol) const {
  if (rho.rows() != rho.cols() || rho.rows() != (Index(1) << n_sites))
    throw validation_error("density matrix dimension must be 2^n_sites");
  if (hermiticity_error() > tol)
    throw validation_error("density matrix is not Hermitian within tolerance");
  if (trace_error() > tol)
    throw validation_error("density matrix trace deviates from 1");
  if (min_eigenvalue() < -positivity_tol)
    throw validation_error("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const Eigen::VectorXcd& psi,
                                       int n_sites) {
  if (psi.size() != (Index(1) << n_sites))
    throw validation_error("state vector dimension must be 2^n_sites");
  return {psi * psi.adjoint(), n_sites};
}

DensityMatrix DensityMatrix::fully_charged(int n_sites) {
  const Index dim = Index(1) << n_sites;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(dim - 1) = 1.0;
  return from_pure(psi, n_sites);
}

DensityMatrix DensityMatrix::ground(int n_sites) {
  const Index dim = Index(1) << n_sites;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = 1.0;
  return from_pure(psi, n_sites);
}

DensityMatrix DensityMatrix::from_pure_1x(const PureState1X& state) {
  state.validate();
  const int n = state.n_sites();
  const Index dim = Index(1) << n;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = state.amp_g;
  for (int j = 1; j <= n; ++j) psi(site_mask(n, j)) = state.amp_e(j - 1);
  return from_pure(psi, n);
}

LindbladGenerator::LindbladGenerator(const LatticeSpec& spec, int max_sites)
    : spec_(spec), n_(spec.n_sites) {
  spec.validate();
  if (n_ > max_sites)
    throw validation_error(
        "oracle capped at " + std::to_string(max_sites) +
        " sites (dense 2^N representation); requested " + std::to_string(n_));
  dim_ = Index(1) << n_;

  gamma_.resize(n_);
  std::vector<double> delta(n_);
  for (int j = 1; j <= n_; ++j) {
    auto [d, g] = spec.site_params(j);
    delta[j - 1] = d;
    gamma_[j - 1] = g;
  }

  // Diagonal of the chain Hamiltonian sum_j Delta_j/2 sigma_j^z; the
  // flip-flop part is applied on the fly from the bit masks.
  ham_diag_.resize(dim_);
  for (Index b = 0; b < dim_; ++b) {
    double e = 0.0;
    for (int j = 1; j <= n_; ++j)
      e += 0.5 * delta[j - 1] * ((b & site_mask(n_, j)) ? 1.0 : -1.0);
    ham_diag_(b) = e;
  }

  decay_weight_.resize(dim_);
  for (Index b = 0; b < dim_; ++b) {
    double w = 0.0;
    for (int j = 1; j <= n_; ++j)
      if (b & site_mask(n_, j)) w += 0.5 * gamma_[j - 1];
    decay_weight_(b) = w;
  }
  coeff_ = complexd(0.0, -1.0) * ham_diag_.cast<complexd>() -
           decay_weight_.cast<complexd>();

  if (spec.gamma_collective > 0.0) {
    std::vector<Eigen::Triplet<complexd>> lower;
    for (Index b = 0; b < dim_; ++b)
      for (int j = 1; j <= n_; ++j) {
        const Index m = site_mask(n_, j);
        if (b & m) lower.emplace_back(b ^ m, b, 1.0);
      }
    collective_lower_.resize(dim_, dim_);
    collective_lower_.setFromTriplets(lower.begin(), lower.end());
    collective_lower_.makeCompressed();
    collective_number_ =
        (collective_lower_.adjoint() * collective_lower_).pruned();
  }
}

void LindbladGenerator::apply(const Eigen::MatrixXcd& rho,
                              Eigen::MatrixXcd& drho) const {
  // Fused column pass for -i[H, rho] minus the decay anticommutator.
  // With a[b] = -i h_b - w_b (diagonal Hamiltonian h, decay weight w), the
  // diagonal parts contribute (a[r] + conj(a[c])) rho(r,c). The flip-flop
  // part of -i H rho shuffles rows within a column (bit pairs differing on
  // adjacent sites), while +i rho H pulls in whole partner columns; both hit
  // contiguous runs. Since the argument is Hermitian and the generator
  // preserves Hermiticity, only the upper triangle (r <= c) is computed;
  // the lower triangle is mirrored afterwards. Multiplications by +-i lam
  // are spelled out on the real/imag parts, which the compiler vectorizes
  // where the complex operator* does not.
  drho.resize(dim_, dim_);
  const double lam = spec_.coupling;
  const complexd* a = coeff_.data();
  for (Index c = 0; c < dim_; ++c) {
    const complexd* yc = rho.data() + c * dim_;
    complexd* dc = drho.data() + c * dim_;
    const complexd ac = std::conj(a[c]);
    for (Index r = 0; r <= c; ++r) dc[r] = (a[r] + ac) * yc[r];
    if (lam == 0.0) continue;
    double* dd = reinterpret_cast<double*>(dc);
    const double* yd = reinterpret_cast<const double*>(yc);
    for (int j = 1; j < n_; ++j) {
      const Index m1 = site_mask(n_, j), m2 = site_mask(n_, j + 1);
      const Index shift = m1 - m2;  // pattern-10 row minus its 01 partner
      for (Index base = 0; base + m1 <= c + shift && base < dim_;
           base += 2 * m1)
        for (Index r0 = base + m1; r0 < base + 2 * m1; r0 += 2 * m2) {
          const Index lim_r = std::min(r0 + m2, c + 1);
          for (Index r = r0; r < lim_r; ++r) {
            const Index p = r - shift;
            dd[2 * r] += lam * yd[2 * p + 1];
            dd[2 * r + 1] -= lam * yd[2 * p];
          }
          const Index lim_p = std::min(r0 + m2, c + shift + 1);
          for (Index r = r0; r < lim_p; ++r) {
            const Index p = r - shift;
            dd[2 * p] += lam * yd[2 * r + 1];
            dd[2 * p + 1] -= lam * yd[2 * r];
          }
        }
      if (bool(c & m1) != bool(c & m2)) {
        const double* yp = reinterpret_cast<const double*>(
            rho.data() + (c ^ (m1 | m2)) * dim_);
        for (Index r = 0; r <= c; ++r) {
          dd[2 * r] -= lam * yp[2 * r + 1];
          dd[2 * r + 1] += lam * yp[2 * r];
        }
      }
    }
  }

  // Jump refill toward lower excitation on the upper triangle: rows and
  // columns with the site bit cleared receive gamma_j times the bit-set
  // block; r <= c guarantees the source (r|mask, c|mask) is upper too.
  for (int j = 1; j <= n_; ++j) {
    const double g = gamma_[j - 1];
    if (g == 0.0) continue;
    const Index mask = site_mask(n_, j);
    for (Index cb = 0; cb < dim_; cb += 2 * mask)
      for (Index c = cb; c < cb + mask; ++c) {
        const complexd* rc = rho.data() + (c | mask) * dim_;
        complexd* dc = drho.data() + c * dim_;
        for (Index rb = 0; rb <= c; rb += 2 * mask) {
          const Index lim = std::min(rb + mask, c + 1);
          for (Index r = rb; r < lim; ++r) dc[r] += g * rc[r | mask];
        }
      }
  }

  // Mirror the computed upper triangle onto the lower one, tiled so both
  // the strided reads and the contiguous writes stay cache resident.
  constexpr Index kTile = 48;
  for (Index rb = 0; rb < dim_; rb += kTile)
    for (Index cb = rb; cb < dim_; cb += kTile) {
      const Index re = std::min(rb + kTile, dim_);
      const Index ce = std::min(cb + kTile, dim_);
      for (Index r = rb; r < re; ++r) {
        complexd* dcol = drho.data() + r * dim_;
        for (Index c = std::max(cb, r + 1); c < ce; ++c)
          dcol[c] = std::conj(drho(r, c));
      }
    }

  if (spec_.gamma_collective > 0.0) {
    const double gc = spec_.gamma_collective;
    scratch_.noalias() = collective_lower_ * rho;
    drho.noalias() += gc * (scratch_ * collective_lower_.adjoint());
    scratch_.noalias() = collective_number_ * rho;
    drho -= (0.5 * gc) * (scratch_ + scratch_.adjoint().eval());
  }
}

Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& rho) const {
  Eigen::MatrixXcd out;
  apply(rho, out);
  return out;
}

namespace {

double expect_sz(const Eigen::MatrixXcd& rho, int n, int j) {
  const Index mask = site_mask(n, j);
  double v = 0.0;
  for (Index b = 0; b < rho.rows(); ++b)
    v += rho(b, b).real() * ((b & mask) ? 1.0 : -1.0);
  return v;
}

double expect_sx(const Eigen::MatrixXcd& rho, int n, int j) {
  const Index mask = site_mask(n, j);
  complexd v = 0.0;
  for (Index b = 0; b < rho.rows(); ++b) v += rho(b, b ^ mask);
  return v.real();
}

complexd expect_corr(const Eigen::MatrixXcd& rho, int n, int a, int b) {
  // <sigma_a^+ sigma_b^-> = Tr(sigma_a^+ sigma_b^- rho).
  const Index ma = site_mask(n, a), mb = site_mask(n, b);
  if (a == b) {
    double v = 0.0;
    for (Index c = 0; c < rho.rows(); ++c)
      if (c & ma) v += rho(c, c).real();
    return v;
  }
  complexd v = 0.0;
  for (Index c = 0; c < rho.rows(); ++c)
    if ((c & mb) && !(c & ma)) v += rho(c, c ^ ma ^ mb);
  return v;
}

double expect_energy(const Eigen::MatrixXcd& rho, const LatticeSpec& spec) {
  const int n = spec.n_sites;
  double gap_sum = 0.0, e = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double half_gap = 0.5 * spec.site_detuning(j);
    gap_sum += half_gap;
    e += half_gap * expect_sz(rho, n, j);
  }
  for (int j = 1; j < n; ++j)
    e += 2.0 * spec.coupling * expect_corr(rho, n, j, j + 1).real();
  return e / gap_sum;
}

double expect_population(const Eigen::MatrixXcd& rho, const LatticeSpec& spec) {
  const int n = spec.n_sites;
  double gap_sum = 0.0, p = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double half_gap = 0.5 * spec.site_detuning(j);
    gap_sum += half_gap;
    p += half_gap * expect_sz(rho, n, j);
  }
  return p / gap_sum;
}

double expect_total_excitation(const Eigen::MatrixXcd& rho, int n) {
  double v = 0.0;
  for (int j = 1; j <= n; ++j) v += 0.5 * (1.0 + expect_sz(rho, n, j));
  return v;
}

using Extractor = std::function<double(const Eigen::MatrixXcd&)>;

Extractor make_extractor(const std::string& name, const LatticeSpec& spec) {
  const int n = spec.n_sites;
  const auto site_of = [n](const std::string& s, std::size_t pos) {
    const int j = std::stoi(s.substr(pos));
    if (j < 1 || j > n) throw validation_error("observable site out of range: " + s);
    return j;
  };
  if (name.rfind("sz_", 0) == 0) {
    const int j = site_of(name, 3);
    return [n, j](const Eigen::MatrixXcd& r) { return expect_sz(r, n, j); };
  }
  if (name.rfind("sx_", 0) == 0) {
    const int j = site_of(name, 3);
    return [n, j](const Eigen::MatrixXcd& r) { return expect_sx(r, n, j); };
  }
  if (name.rfind("corr_re_", 0) == 0 || name.rfind("corr_im_", 0) == 0) {
    const bool re = name[5] == 'r';
    const std::string tail = name.substr(8);
    const auto sep = tail.find('_');
    if (sep == std::string::npos)
      throw validation_error("malformed correlation observable: " + name);
    const int a = site_of(tail, 0), b = site_of(tail, sep + 1);
    return [n, a, b, re](const Eigen::MatrixXcd& r) {
      const complexd c = expect_corr(r, n, a, b);
      return re ? c.real() : c.imag();
    };
  }
  if (name == "energy")
    return [spec](const Eigen::MatrixXcd& r) { return expect_energy(r, spec); };
  if (name == "population")
    return [spec](const Eigen::MatrixXcd& r) {
      return expect_population(r, spec);
    };
  if (name == "total_excitation")
    return [n](const Eigen::MatrixXcd& r) {
      return expect_total_excitation(r, n);
    };
  throw validation_error("unknown observable '" + name + "'");
}

}  // namespace

std::map<std::string, double> observables(const DensityMatrix& dm,
                                          const LatticeSpec& spec) {
  if (dm.n_sites != spec.n_sites)
    throw validation_error("density matrix does not match lattice size");
  const int n = spec.n_sites;
  std::map<std::string, double> out;
  for (int j = 1; j <= n; ++j) {
    out["sz_" + std::to_string(j)] = expect_sz(dm.rho, n, j);
    out["sx_" + std::to_string(j)] = expect_sx(dm.rho, n, j);
  }
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      const complexd c = expect_corr(dm.rho, n, a, b);
      const std::string suffix = std::to_string(a) + "_" + std::to_string(b);
      out["corr_re_" + suffix] = c.real();
      out["corr_im_" + suffix] = c.imag();
    }
  out["energy"] = expect_energy(dm.rho, spec);
  out["population"] = expect_population(dm.rho, spec);
  return out;
}

OracleRun propagate(const LindbladGenerator& gen, const DensityMatrix& rho0,
                    const IntegratorConfig& cfg, const OracleRunOptions& opts) {
  cfg.validate();
  if (rho0.n_sites != gen.spec().n_sites)
    throw validation_error("initial state does not match lattice size");
  rho0.validate();

  std::vector<Extractor> extractors;
  extractors.reserve(opts.observable_names.size());
  for (const auto& name : opts.observable_names)
    extractors.push_back(make_extractor(name, gen.spec()));

  Eigen::MatrixXcd y = rho0.rho;
  Eigen::MatrixXcd k1, k2, k3, k4, tmp;
  const auto deriv = [&gen](const Eigen::MatrixXcd& state, double,
                            Eigen::MatrixXcd& d) { gen.apply(state, d); };

  std::vector<double> times;
  std::vector<std::vector<double>> columns(extractors.size());
  const auto record = [&](double t) {
    const double trace_err = std::abs(y.trace() - complexd(1.0, 0.0));
    const double herm_err = (y - y.adjoint()).cwiseAbs().maxCoeff();
    if (trace_err > opts.invariant_tol || herm_err > opts.invariant_tol) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "density matrix invariants broken at t=%.6g "
                    "(trace err %.3g, hermiticity err %.3g); reduce dt=%.3g",
                    t, trace_err, herm_err, cfg.dt);
      throw engine_error(msg);
    }
    times.push_back(t);
    for (std::size_t c = 0; c < extractors.size(); ++c)
      columns[c].push_back(extractors[c](y));
  };

  record(0.0);
  const long steps = cfg.n_steps();
  for (long step = 1; step <= steps; ++step) {
    rk4_step(deriv, (step - 1) * cfg.dt, cfg.dt, y, k1, k2, k3, k4, tmp);
    if (step % cfg.sample_every == 0 || step == steps) record(step * cfg.dt);
  }

  OracleRun run{Trajectory(std::move(times), gen.spec(), "oracle"),
                DensityMatrix{std::move(y), gen.spec().n_sites}};
  for (std::size_t c = 0; c < extractors.size(); ++c)
    run.trajectory.add_column(opts.observable_names[c], std::move(columns[c]));
  run.final_state.validate(opts.invariant_tol, opts.invariant_tol);
  return run;
}

}  // namespace qb
