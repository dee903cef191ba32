#include <cmath>
#include <numbers>
#include <random>

#include "calr/analysis_checks.hpp"
#include "calr/errors.hpp"
#include "doctest.h"

using namespace calr;

TEST_CASE("alpha identity") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 200; ++i) {
    double R[3] = {u(rng), u(rng), u(rng)};
    std::sort(R, R + 3);
    if (R[0] == R[1] || R[1] == R[2]) continue;
    const double alpha = std::log(R[2] / R[1]) / std::log(R[2] / R[0]);
    CHECK(std::abs(std::log(R[1]) - (alpha * std::log(R[0]) + (1 - alpha) * std::log(R[2]))) <=
          4e-16 * (1 + std::abs(std::log(R[1]))));
  }
}

TEST_CASE("three spheres: single modes are equality cases") {
  for (int dim : {2, 3})
    for (int l = 0; l <= 32; ++l) {
      const auto rep = three_spheres_check({{{l, dim == 2 && l > 0 ? 1 : 0}, cplx(1.0, 0.0)}}, dim, 1, 2, 4);
      CHECK(std::abs(rep.ratio - 1.0) <= 1e-12);
      CHECK(rep.pass);
    }
  // cos(l theta) = (e^{il theta} + e^{-il theta}) / 2.
  for (int l = 1; l <= 32; ++l) {
    const auto rep = three_spheres_check({{{l, -1}, 0.5}, {{l, 1}, 0.5}}, 2, 1, 2, 4);
    CHECK(std::abs(rep.ratio - 1.0) <= 1e-12);
  }
  const auto c = three_spheres_check({{{0, 0}, 3.0}}, 2, 1, 2, 4);
  CHECK(c.n1 == doctest::Approx(3 * std::sqrt(2 * std::numbers::pi)));
}

TEST_CASE("three spheres: random harmonics are log-convex") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    ModeTable v;
    for (int l = 0; l < 10; ++l) {
      if (l == 0) {
        v.push_back({{0, 0}, cplx(nd(rng), nd(rng))});
        continue;
      }
      for (int k : {-1, 1}) v.push_back({{l, k}, cplx(nd(rng), nd(rng)) * std::pow(0.5, l)});
    }
    const auto rep = three_spheres_check(v, 2, 0.5, 1.3, 3.0);
    CHECK(rep.ratio <= 1.0 + 1e-10);
    CHECK(rep.ratio < 1.0);
  }
  CHECK_THROWS_AS(three_spheres_check({{{1, 1}, 1.0}}, 2, 2, 1, 4), ValidationError);
}

TEST_CASE("plasmon pairs for the identity coefficient") {
  const double R1 = 1, R2 = 2, R3 = 4;
  const auto pairs = plasmon_pairs(RadialProfile::constant(1.0), R1, R2, 2, 12);
  for (int l = 1; l <= 12; ++l) {
    const PlasmonPair& p = pairs[l];
    for (double r : {1.0, 1.3, 1.9, 2.0}) {
      CHECK(std::abs(p.v_at(r).first - std::pow(r / R3, l)) <= 1e-14 * std::pow(r / R3, l));
      const double w = std::pow(R2 * R2 / (R3 * r), l);
      CHECK(std::abs(p.w_at(r).first - w) <= 1e-13 * w);
    }
    CHECK(std::abs(p.v_at(R3).first - 1.0) <= 1e-14);
    const auto id = reflection_identity(p);
    CHECK(id.trace <= 1e-13);
    CHECK(id.flux <= 1e-13);
  }
  for (double r : {1.0, 1.5, 2.0})
    CHECK(std::abs(pairs[0].w_at(r).first - std::log(r / R1) / std::log(R2 / R1)) <= 1e-14);

  // The unit ball keeps the identity, so a = 2 couples differently at R1 but
  // still satisfies both reflection identities; v_l is still normalized at R3.
  const auto twos = plasmon_pairs(RadialProfile::constant(2.0), R1, R2, 2, 12);
  for (int l = 1; l <= 12; ++l) {
    const auto id = reflection_identity(twos[l]);
    CHECK(id.trace <= 1e-13);
    CHECK(id.flux <= 1e-13);
    CHECK(std::abs(twos[l].v_at(R3).first - 1.0) <= 1e-14);
  }
}

TEST_CASE("reflection identities for a smooth coefficient") {
  for (int dim : {2, 3}) {
    const auto pairs = plasmon_pairs(RadialProfile::expression("2+sin(r)"), 1, 2, dim, 32);
    for (int l = 1; l <= 32; ++l) {
      const auto id = reflection_identity(pairs[l]);
      CHECK(id.trace <= 1e-11);
      CHECK(id.flux <= 1e-11);
    }
  }
}

TEST_CASE("density residuals") {
  const auto pairs = plasmon_pairs(RadialProfile::expression("2+sin(r)"), 1, 2, 2, 12);
  // Target equal to the trace of v_5 - w_5.
  const auto [v5, pv5] = pairs[5].v_at(1.0, true);
  const auto [w5, pw5] = pairs[5].w_at(1.0);
  DensityTarget t5;
  t5.inner = {{{5, 1}, v5 - w5}};
  CHECK(density_residual(pairs, t5, DensityFamily::Difference, 4).relative() == doctest::Approx(1.0));
  for (int m : {5, 8, 12}) CHECK(density_residual(pairs, t5, DensityFamily::Difference, m).relative() <= 1e-14);

  DensityTarget c;
  c.inner = {{{0, 0}, 2.5}};
  CHECK(density_residual(pairs, c, DensityFamily::Flux, 0).residual <= 1e-15);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  DensityTarget t;
  for (int l = 0; l <= 16; ++l) {
    const double w = std::exp(-0.5 * l);
    if (l == 0)
      t.inner.push_back({{0, 0}, w * nd(rng)});
    else
      for (int k : {-1, 1}) t.inner.push_back({{l, k}, w * cplx(nd(rng), nd(rng))});
  }
  for (auto fam : {DensityFamily::Difference, DensityFamily::Flux}) {
    double prev = 1e300;
    for (int m = 0; m <= 12; ++m) {
      const double r = density_residual(pairs, t, fam, m).residual;
      CHECK(r <= prev * (1 + 1e-12));
      prev = r;
    }
  }
  DensityTarget joint = t;
  joint.outer = t.inner;
  double prev = 1e300;
  for (int m = 0; m <= 12; ++m) {
    const double r = density_residual(pairs, joint, DensityFamily::Joint, m).residual;
    CHECK(r <= prev * (1 + 1e-12));
    prev = r;
  }
  CHECK_THROWS_AS(density_residual(pairs, t, DensityFamily::Difference, 13), ValidationError);
  CHECK_THROWS_AS(density_residual(pairs, joint, DensityFamily::Flux, 3), ValidationError);
  CHECK(parse_density_family(to_string(DensityFamily::Joint)) == DensityFamily::Joint);
}

TEST_CASE("rigidity") {
  for (int dim : {2, 3}) {
    const RigidityReport r = rigidity_check(RadialProfile::constant(1.0), 1, 2, dim, 40);
    CHECK(r.pass());
    for (const auto& row : r.rows) {
      CHECK(row.det_trace > 0);
      CHECK(row.det_flux > 0);
    }
  }
  // 2D identity: (w - v)(R1) / w(R1) = 1 - (R1 / R2)^{2l}.
  const RigidityReport r2 = rigidity_check(RadialProfile::constant(1.0), 1, 2, 2, 10);
  for (const auto& row : r2.rows) CHECK(row.det_trace == doctest::Approx(1 - std::pow(0.25, row.ell)).epsilon(1e-13));

  const auto pairs = plasmon_pairs(RadialProfile::constant(1.0), 1, 2, 2, 10);
  const RigidityReport fake = rigidity_check(
      [&](int l) {
        PlasmonPair p = pairs.at(l);
        p.w = {p.v(Discretization::column(1, false)), p.v(Discretization::column(1, true))};
        return p;
      },
      10);
  CHECK_FALSE(fake.pass());
  CHECK(fake.degenerate_orders.size() == 10);
}
