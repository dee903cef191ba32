#include <cmath>
#include <numbers>
#include <random>

#include "calr/errors.hpp"
#include "calr/medium.hpp"
#include "calr/spectral_solver.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace calr;

namespace {

LayeredMedium mn() { return build_doubly_complementary(RadialProfile::constant(1.0), 1.0, 4.0, 8.0, 2); }

double rel_diff(const Eigen::VectorXcd& a, const std::vector<cplx>& b) {
  double num = 0, den = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a(i) - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST_CASE("mode solve agrees with the dense oracle") {
  const RadialProfile smooth = RadialProfile::expression("2+sin(r)");
  for (int dim : {2, 3}) {
    for (const auto& a : {RadialProfile::constant(1.0), smooth}) {
      const LayeredMedium m = build_doubly_complementary(a, 1.0, 4.0, 8.0, dim);
      const Discretization disc(m, 1.5, 12);
      for (int ell : {0, 1, 5, 12})
        for (double delta : {1e-1, 1e-4}) {
          const Eigen::VectorXcd x = solve_mode_system(assemble_mode_system(disc, ell, delta, 1.0));
          CHECK(rel_diff(x, oracle::dense_mode_solve(disc, ell, delta, 1.0)) <= 1e-12);
        }
    }
  }
}

TEST_CASE("all-positive sanity medium: single mode") {
  const LayeredMedium m = mn().with_positive_shell();
  const Discretization disc(m, 6.0, 4);
  const Eigen::VectorXcd x = solve_mode_system(assemble_mode_system(disc, 3, 1e-3, cplx(0.5, -1.0)));
  CHECK(rel_diff(x, oracle::dense_mode_solve(disc, 3, 1e-3, cplx(0.5, -1.0))) <= 1e-13);
}

TEST_CASE("coefficients match the closed-form power-law elimination") {
  const LayeredMedium m = mn();
  const ModeSpectrum src = ModeSpectrum::single(2, 1.5, {5, 1}, 1.0);
  const Field f = solve_field(m, src, 1e-4, 5);
  const oracle::PowerLawField ref(m, 5, 1e-4, 1.5, 1.0);
  double scale = 0;
  for (double r : {0.03, 0.1, 0.2, 0.5, 1.0, 1.2, 1.5, 2.0, 3.9, 6.0}) scale = std::max(scale, std::abs(ref.at(r).first));
  for (double r : {0.03, 0.1, 0.2, 0.5, 0.9, 1.2, 1.5, 2.0, 3.9, 6.0, 7.9}) {
    for (bool outer : {false, true}) {
      const auto [u, p] = f.radial(0, r, outer);
      const auto [ur, pr] = ref.at(r, outer);
      CHECK(std::abs(u - ur) <= 1e-10 * scale);
      CHECK(std::abs(p - pr) <= 1e-10 * std::max(scale, std::abs(pr)));
    }
  }
}

TEST_CASE("delta = 0 is singular") {
  const Discretization disc(mn(), 1.5, 4);
  CHECK_THROWS_AS(solve_mode_system(assemble_mode_system(disc, 3, 0.0, 1.0)), ResonanceSingular);
  CHECK_THROWS_AS(solve_field(mn(), ModeSpectrum::single(2, 1.5, {3, 1}, 1.0), 0.0, 4), ValidationError);
  // Conditioning degrades as delta shrinks.
  const double c1 = assemble_mode_system(disc, 3, 1e-2, 1.0).rcond;
  const double c2 = assemble_mode_system(disc, 3, 1e-6, 1.0).rcond;
  CHECK(c2 < c1);
}

TEST_CASE("monopole flux relation across the shell at delta = 1") {
  const LayeredMedium m = mn();
  const ModeSpectrum src = ModeSpectrum::single(2, 1.5, {0, 0}, 1.0);
  const Field f = solve_field(m, src, 1.0, 0);
  // a = 1 in 2D: p is the ln-coefficient of each piece.
  const cplx d_shell = f.radial(0, 0.5).second;
  const cplx d_annulus = f.radial(0, 1.2).second;
  const cplx d_core = f.radial(0, 0.1).second;
  CHECK(std::abs(d_shell - (-d_annulus / cplx(1.0, -1.0))) <= 1e-13 * std::abs(d_annulus));
  CHECK(std::abs(d_core - cplx(-1.0, 1.0) * d_shell) <= 1e-13 * std::abs(d_shell));
  // Innermost piece carries no ln term.
  CHECK(std::abs(f.segment_coefficients(0, 0).second) == 0.0);
}

TEST_CASE("linearity, mode decoupling and residuals") {
  const LayeredMedium m = build_doubly_complementary(RadialProfile::expression("2+sin(r)"), 1.0, 4.0, 8.0, 2);
  auto disc = std::make_shared<const Discretization>(m, 1.5, 20);
  const ModeSpectrum zero{2, 1.5, 20, {}, false};
  const Field z = solve_field(disc, zero, 1e-3);
  CHECK(z.modes.empty());

  const ModeSpectrum one = ModeSpectrum::single(2, 1.5, {4, -1}, cplx(0.0, 2.0), 20);
  const Field f1 = solve_field(disc, one, 1e-3);
  REQUIRE(f1.modes.size() == 1);
  CHECK(f1.modes[0] == ModeIndex{4, -1});

  const ModeSpectrum g1 = ModeSpectrum::geometric(2, 1.5, 0.7, 20);
  ModeSpectrum g2 = ModeSpectrum::geometric(2, 1.5, 0.4, 20);
  for (auto& [mi, v] : g2.coefficients) v *= cplx(std::cos(mi.l), std::sin(mi.l));
  const cplx alpha(0.3, -1.1), beta(2.0, 0.5);
  const Field lhs = solve_field(disc, linear_combination(alpha, g1, beta, g2), 1e-5);
  const Field rhs = linear_combination(alpha, solve_field(disc, g1, 1e-5), beta, solve_field(disc, g2, 1e-5));
  REQUIRE(lhs.modes == rhs.modes);
  for (std::size_t i = 0; i < lhs.modes.size(); ++i)
    CHECK((lhs.coefficients[i] - rhs.coefficients[i]).norm() <= 1e-12 * rhs.coefficients[i].norm());

  for (const Field& f : {lhs, f1}) {
    const ResidualReport rr = interface_residual(f, f.modes.size() == 1 ? one : linear_combination(alpha, g1, beta, g2));
    CHECK(rr.value <= 1e-11);
    CHECK(rr.flux <= 1e-11);
    CHECK(rr.outer <= 1e-11);
  }
}

TEST_CASE("energy identity: layer quadrature equals the source pairing") {
  const LayeredMedium m = mn();
  const ModeSpectrum src = ModeSpectrum::geometric(2, 1.5, 0.6, 30);
  for (double delta : {1e-1, 1e-4}) {
    const Field f = solve_field(m, src, delta, 30);
    cplx lhs = 0;
    for (std::size_t j = 0; j < m.layers.size(); ++j)
      lhs += m.sign(j, delta) * gradient_energy(f, m.layers[j].inner, m.layers[j].outer);
    cplx rhs = 0;
    for (std::size_t i = 0; i < f.modes.size(); ++i)
      rhs -= angular_weight(2) * 1.5 * src.coefficient(f.modes[i]) * std::conj(f.radial(i, 1.5).first);
    CHECK(std::abs(lhs.real() - rhs.real()) <= 1e-9 * std::abs(rhs));
    CHECK(std::abs(lhs.imag() - rhs.imag()) <= 1e-9 * std::abs(rhs));
    CHECK(std::abs(weighted_energy(f, 0.0, 8.0) - rhs) <= 1e-9 * std::abs(rhs));
  }
}

TEST_CASE("evaluate, angular DFT round trip and trace norms") {
  LayeredMedium one;
  one.dim = 2;
  one.omega_radius = 4.0;
  one.layers = {{0.0, 4.0, RadialProfile::constant(1.0), false}};
  auto disc = std::make_shared<const Discretization>(one, std::nullopt, 2);
  Field f;
  f.disc = disc;
  f.delta = 1.0;
  f.modes = {{2, 1}};
  f.coefficients = {Eigen::VectorXcd::Constant(1, 16.0)};  // phi+ = (r/4)^2
  CHECK(std::abs(evaluate(f, Eigen::Vector2d(2, 0)) - 4.0) <= 1e-14);
  CHECK(std::abs(evaluate(f.scaled(0.0), Eigen::Vector2d(1, 1))) == 0.0);

  const LayeredMedium m = mn();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  ModeSpectrum src{2, 1.5, 10, {}, false};
  src.coefficients.push_back({{0, 0}, cplx(nd(rng), nd(rng))});
  for (int l = 1; l <= 10; ++l)
    for (int k : {-1, 1}) src.coefficients.push_back({{l, k}, cplx(nd(rng), nd(rng))});
  const Field u = solve_field(m, src, 1e-2, 10);
  const int N = 64;
  for (double r : {0.1, 0.6, 1.5, 3.0, 6.0}) {
    std::vector<cplx> samples(N);
    for (int j = 0; j < N; ++j) {
      const double th = 2 * std::numbers::pi * j / N;
      samples[j] = evaluate(u, Eigen::Vector2d(r * std::cos(th), r * std::sin(th)));
    }
    double scale = 0, err = 0, l2 = 0;
    for (std::size_t i = 0; i < u.modes.size(); ++i) {
      const int n = u.modes[i].k * u.modes[i].l;
      cplx c = 0;
      for (int j = 0; j < N; ++j) c += samples[j] * std::polar(1.0, -2 * std::numbers::pi * n * j / N);
      c /= double(N);
      const cplx ref = u.radial(i, r).first;
      scale = std::max(scale, std::abs(ref));
      err = std::max(err, std::abs(c - ref));
    }
    CHECK(err <= 1e-12 * scale);
    for (const cplx& s : samples) l2 += std::norm(s) * r * 2 * std::numbers::pi / N;
    CHECK(trace_norm(u, r, 0.0) == doctest::Approx(std::sqrt(l2)).epsilon(1e-10));
  }

  CHECK(trace_norm({{{0, 0}, 1.0}}, 1.0, 0.5, 2) == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(trace_norm({{{3, 1}, 1.0}}, 1.0, 0.5, 2) ==
        doctest::Approx(std::pow(10.0, 0.25) * std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("gradient energy: closed form and cross terms") {
  LayeredMedium one;
  one.dim = 2;
  one.omega_radius = 2.0;
  one.layers = {{0.0, 0.5, RadialProfile::constant(1.0), false}, {0.5, 2.0, RadialProfile::constant(1.0), false}};
  auto disc = std::make_shared<const Discretization>(one, std::nullopt, 1);
  auto field = [&](cplx c, cplx d) {
    Field f;
    f.disc = disc;
    f.delta = 1.0;
    f.modes = {{1, 1}};
    Eigen::VectorXcd x(3);
    x << 0.0, 2.0 * c, 2.0 * d;  // phi+ = r/2, phi- = 0.5/r on [0.5, 2]
    f.coefficients = {x};
    return f;
  };
  CHECK(gradient_energy(field(1, 0), 1.0, 2.0) == doctest::Approx(6 * std::numbers::pi).epsilon(1e-13));
  const double both = gradient_energy(field(1, 1), 1.0, 2.0);
  CHECK(both == doctest::Approx(gradient_energy(field(1, 0), 1.0, 2.0) + gradient_energy(field(0, 1), 1.0, 2.0))
                    .epsilon(1e-13));
  // 2 pi l |d|^2 (a^{-2l} - b^{-2l}) for u = 1/r.
  CHECK(gradient_energy(field(0, 1), 1.0, 2.0) == doctest::Approx(2 * std::numbers::pi * 0.75).epsilon(1e-13));
}
