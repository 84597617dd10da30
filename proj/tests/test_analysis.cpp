#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "qb/analysis.hpp"

using namespace qb;

namespace {

Trajectory synthetic(const std::vector<double>& times,
                     const std::vector<double>& energy,
                     const LatticeSpec& spec) {
  Trajectory traj(times, spec, "synthetic");
  traj.add_column("energy", energy);
  return traj;
}

std::vector<double> linspace(double t0, double t1, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = t0 + (t1 - t0) * i / (n - 1);
  return out;
}

}  // namespace

TEST_CASE("excess report basics") {
  const LatticeSpec spec = make_spec(4, 0.25, 0.05, 0.05);
  const auto t = linspace(0.0, 10.0, 11);
  std::vector<double> eu(t.size()), ed(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    eu[i] = std::exp(-0.1 * t[i]);
    ed[i] = std::exp(-0.05 * t[i]);
  }

  SUBCASE("identical inputs give zero everywhere") {
    const auto r = excess_report(synthetic(t, eu, spec), synthetic(t, eu, spec));
    for (double v : r.relative_excess) CHECK(v == 0.0);
    for (double v : r.absolute_excess) CHECK(v == 0.0);
    CHECK(r.relative_excess.front() == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("pointwise values and antisymmetry") {
    const auto r = excess_report(synthetic(t, ed, spec), synthetic(t, eu, spec));
    const auto swapped =
        excess_report(synthetic(t, eu, spec), synthetic(t, ed, spec));
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(r.absolute_excess[i] == doctest::Approx(ed[i] - eu[i]));
      CHECK(r.relative_excess[i] ==
            doctest::Approx((ed[i] - eu[i]) / eu[i]).epsilon(1e-12));
      CHECK(swapped.absolute_excess[i] ==
            doctest::Approx(-r.absolute_excess[i]).epsilon(1e-12));
    }
  }
  SUBCASE("grid mismatch is refused") {
    auto t2 = t;
    t2.back() += 0.5;
    CHECK_THROWS_AS(
        excess_report(synthetic(t, ed, spec), synthetic(t2, eu, spec)),
        validation_error);
  }
  SUBCASE("near-zero reference is flagged") {
    std::vector<double> tiny(t.size(), 0.01);
    const auto r =
        excess_report(synthetic(t, ed, spec), synthetic(t, tiny, spec));
    for (bool b : r.ill_conditioned) CHECK(b);
  }
}

TEST_CASE("power-law fit") {
  const LatticeSpec spec = make_spec(4, 0.25, 0.05, 0.05);
  const auto t = linspace(1.0, 50.0, 200);

  SUBCASE("exact synthetic exponent") {
    std::vector<double> eu(t.size(), 1.0), ed(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      ed[i] = std::pow(t[i], 1.5) * 1e-3;
    // E_d/E_u = 1 + rel; build energies so the ratio is exactly t^1.5.
    for (std::size_t i = 0; i < t.size(); ++i) {
      eu[i] = 0.5;
      ed[i] = 0.5 * std::pow(t[i], 1.5);
    }
    const auto r = excess_report(synthetic(t, ed, spec), synthetic(t, eu, spec));
    CHECK(power_law_fit(r, {2.0, 40.0}) == doctest::Approx(1.5).epsilon(1e-6));
  }
  SUBCASE("constant ratio gives zero exponent") {
    std::vector<double> eu(t.size(), 0.5), ed(t.size(), 0.75);
    const auto r = excess_report(synthetic(t, ed, spec), synthetic(t, eu, spec));
    CHECK(power_law_fit(r, {2.0, 40.0}) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("nonpositive ratio in window throws") {
    std::vector<double> eu(t.size(), 0.5), ed(t.size(), -0.5);
    const auto r = excess_report(synthetic(t, ed, spec), synthetic(t, eu, spec));
    CHECK_THROWS_AS(power_law_fit(r, {2.0, 40.0}), validation_error);
  }
  SUBCASE("degenerate window throws") {
    std::vector<double> eu(t.size(), 0.5), ed(t.size(), 0.75);
    const auto r = excess_report(synthetic(t, ed, spec), synthetic(t, eu, spec));
    CHECK_THROWS_AS(power_law_fit(r, {40.0, 2.0}), validation_error);
    CHECK_THROWS_AS(power_law_fit(r, {100.0, 200.0}), validation_error);
  }
}

TEST_CASE("turnover time") {
  const LatticeSpec spec = make_spec(4, 0.25, 0.05, 0.05);
  const auto t = linspace(0.0, 6.0, 601);

  SUBCASE("t exp(-t) peaks near one") {
    std::vector<double> eu(t.size(), 1.0), ed(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      ed[i] = 1.0 + t[i] * std::exp(-t[i]);
    const auto r = excess_report(synthetic(t, ed, spec), synthetic(t, eu, spec));
    const auto peak = turnover_time(r);
    REQUIRE(peak.has_value());
    CHECK(*peak == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("flat zero excess has no interior turnover") {
    std::vector<double> eu(t.size(), 1.0);
    const auto r = excess_report(synthetic(t, eu, spec), synthetic(t, eu, spec));
    CHECK_FALSE(turnover_time(r).has_value());
  }
  SUBCASE("monotone excess peaks on the boundary") {
    std::vector<double> eu(t.size(), 1.0), ed(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) ed[i] = 1.0 + t[i];
    const auto r = excess_report(synthetic(t, ed, spec), synthetic(t, eu, spec));
    CHECK_FALSE(turnover_time(r).has_value());
  }
}

TEST_CASE("synchronization score") {
  const auto t = linspace(0.0, 10.0, 500);
  std::vector<double> x1(t.size()), x2(t.size()), anti(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    x1[i] = std::sin(2.0 * t[i]);
    x2[i] = 0.3 * std::sin(2.0 * t[i]) + 5.0;  // affine image of x1
    anti[i] = -x1[i];
  }
  const TimeWindow w{1.0, 9.0};
  CHECK(synchronization_score(t, x1, x1, w) == doctest::Approx(1.0));
  CHECK(synchronization_score(t, x1, anti, w) == doctest::Approx(-1.0));
  CHECK(synchronization_score(t, x1, x2, w) == doctest::Approx(1.0));

  std::vector<double> flat(t.size(), 2.0);
  CHECK_THROWS_AS(synchronization_score(t, x1, flat, w), validation_error);
  CHECK_THROWS_AS(synchronization_score(t, x1, anti, {4.0, 4.0001}),
                  validation_error);
}

TEST_CASE("ratio sweep") {
  const LatticeSpec base = make_spec(8, 0.25, 0.05, 0.05);

  SUBCASE("uniform ratio has zero excess") {
    const auto points = ratio_sweep(base, {1.0}, 2.0);
    REQUIRE(points.size() == 1);
    CHECK(points[0].error.empty());
    CHECK(std::abs(points[0].relative_excess) < 1e-9);
  }
  SUBCASE("permuting ratios permutes outputs") {
    const std::vector<double> a{0.2, 0.5, 0.8};
    const std::vector<double> b{0.8, 0.2, 0.5};
    const auto pa = ratio_sweep(base, a, 2.0);
    const auto pb = ratio_sweep(base, b, 2.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto match = std::find_if(pb.begin(), pb.end(), [&](const auto& p) {
        return p.ratio == a[i];
      });
      REQUIRE(match != pb.end());
      CHECK(match->relative_excess == pa[i].relative_excess);
    }
  }
  SUBCASE("bad ratios are reported per point, not thrown") {
    const auto points = ratio_sweep(base, {0.5, 1.5}, 2.0);
    REQUIRE(points.size() == 2);
    CHECK(points[0].error.empty());
    CHECK_FALSE(points[1].error.empty());
  }
}
