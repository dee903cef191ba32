#include <cmath>
#include <numbers>

#include "calr/basis.hpp"
#include "calr/medium.hpp"
#include "doctest.h"

using namespace calr;

namespace {

// Fourth-order Runge-Kutta on (u, p), p = a r^{d-1} u', from r = x to r = y.
std::pair<double, double> rk4(const RadialProfile& a, int ell, int dim, double x, double y, double u,
                              double p, int steps) {
  const double lam = double(ell) * (ell + dim - 2);
  auto f = [&](double r, double uu, double pp) {
    const double ar = a(r) * std::pow(r, dim - 1);
    return std::pair{pp / ar, a(r) * lam * std::pow(r, dim - 3) * uu};
  };
  const double h = (y - x) / steps;
  double r = x;
  for (int i = 0; i < steps; ++i) {
    const auto [k1u, k1p] = f(r, u, p);
    const auto [k2u, k2p] = f(r + h / 2, u + h / 2 * k1u, p + h / 2 * k1p);
    const auto [k3u, k3p] = f(r + h / 2, u + h / 2 * k2u, p + h / 2 * k2p);
    const auto [k4u, k4p] = f(r + h, u + h * k3u, p + h * k3p);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    r += h;
  }
  return {u, p};
}

// Composite Simpson Gram entries of (grad, l2) on [x, y].
GramPair simpson_gram(const RadialBasis& b, double x, double y, int n) {
  GramPair g;
  const double h = (y - x) / n;
  for (int i = 0; i <= n; ++i) {
    const double r = x + i * h;
    const double w = (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3 * std::pow(r, b.dim - 1);
    const BasisValues v = b.eval(r);
    const double ar = b.profile(r) * std::pow(r, b.dim - 1);
    const double u[2] = {v.up, v.um}, du[2] = {v.pp / ar, v.pm / ar};
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j = 0; j < 2; ++j) {
        g.grad(i2, j) += w * (du[i2] * du[j] + b.lambda() * u[i2] * u[j] / (r * r));
        g.l2(i2, j) += w * u[i2] * u[j];
      }
  }
  return g;
}

}  // namespace

TEST_CASE("closed-form pairs for constant coefficients") {
  const BasisPtr b2 = fundamental_pair(RadialProfile::constant(1.0), 3, 1.0, 4.0, 2);
  for (double r : {1.0, 2.0, 3.5, 4.0}) {
    const BasisValues v = b2->eval(r);
    CHECK(v.up == doctest::Approx(std::pow(r / 4, 3)));
    CHECK(v.um == doctest::Approx(std::pow(r, -3)));
    CHECK(v.pp == doctest::Approx(3 * std::pow(r / 4, 3)));
    CHECK(v.pm == doctest::Approx(-3 * std::pow(r, -3)));
  }
  const auto [mp, mm] = power_exponents(0.0, 1, 3);
  CHECK(mp == doctest::Approx(1.0));
  CHECK(mm == doctest::Approx(-2.0));
  const BasisPtr b0 = fundamental_pair(RadialProfile::constant(1.0), 0, 2.0, 5.0, 2);
  CHECK(b0->eval(3.0).up == 1.0);
  CHECK(b0->eval(3.0).um == doctest::Approx(std::log(3.0 / 2.0)));
  CHECK(b0->eval(3.0).pm == doctest::Approx(1.0));
}

TEST_CASE("tabulated pair for a = r^2 matches an independent integrator") {
  const RadialProfile a = RadialProfile::function([](double r) { return r * r; }, "r^2");
  const double ra = 1.0, rb = 3.0;
  const BasisPtr b = fundamental_pair(a, 1, ra, rb, 2);
  // Growing solution: start at rb with value 1 and flux p+(rb), integrate inward.
  const BasisValues end = b->eval(rb);
  CHECK(end.up == doctest::Approx(1.0).epsilon(1e-13));
  for (double r : {1.0, 1.5, 2.2}) {
    const auto [u, p] = rk4(a, 1, 2, rb, r, end.up, end.pp, 20000);
    CHECK(std::abs(b->eval(r).up - u) <= 1e-10 * std::abs(u));
    CHECK(std::abs(b->eval(r).pp - p) <= 1e-10 * std::abs(p));
  }
  // Both members lie in span{r^m+, r^m-}, m = -1 +- sqrt(2); fit (A, B) from (u, p) at one end.
  const double mp = -1 + std::sqrt(2.0), mm = -1 - std::sqrt(2.0);
  auto check_family = [&](double r_fit, bool growing) {
    const BasisValues v = b->eval(r_fit);
    const double u = growing ? v.up : v.um, p = growing ? v.pp : v.pm;
    // u = A r^mp + B r^mm, p = r^3 u' = A mp r^{mp+2} + B mm r^{mm+2}
    const double det = std::pow(r_fit, mp) * mm * std::pow(r_fit, mm + 2) -
                       std::pow(r_fit, mm) * mp * std::pow(r_fit, mp + 2);
    const double A = (u * mm * std::pow(r_fit, mm + 2) - std::pow(r_fit, mm) * p) / det;
    const double B = (std::pow(r_fit, mp) * p - u * mp * std::pow(r_fit, mp + 2)) / det;
    for (double r : {1.2, 2.0, 2.9}) {
      const double ref = A * std::pow(r, mp) + B * std::pow(r, mm);
      const BasisValues w = b->eval(r);
      CHECK(std::abs((growing ? w.up : w.um) - ref) <= 1e-10 * std::abs(ref));
    }
  };
  check_family(rb, true);
  check_family(ra, false);
}

TEST_CASE("Abel identity: flux Wronskian is constant") {
  const RadialProfile smooth = RadialProfile::expression("2+sin(r)");
  const LayeredMedium m = build_doubly_complementary(smooth, 1.0, 4.0, 8.0, 3);
  for (int ell : {0, 1, 4, 12}) {
    for (std::size_t j = 1; j < m.layers.size(); ++j) {
      const auto& L = m.layers[j];
      const BasisPtr b = fundamental_pair(L.profile, ell, L.inner, L.outer, 3);
      auto W = [&](double r) {
        const BasisValues v = b->eval(r);
        return v.pp * v.um - v.pm * v.up;
      };
      const double w0 = W(L.inner + 0.1 * (L.outer - L.inner));
      for (double t : {0.3, 0.6, 0.9})
        CHECK(std::abs(W(L.inner + t * (L.outer - L.inner)) - w0) <= 1e-9 * std::abs(w0));
    }
  }
}

TEST_CASE("gram matrices") {
  // 2D, l = 1, u = r on [1, 2]: int |grad u|^2 = 2 pi (4 - 1).
  const BasisPtr b = fundamental_pair(RadialProfile::constant(1.0), 1, 1.0, 2.0, 2);
  const GramPair g = b->gram(1.0, 2.0);
  // u = r is 2 phi+ with phi+ = r / 2.
  CHECK(2 * std::numbers::pi * 4 * g.grad(0, 0) == doctest::Approx(6 * std::numbers::pi).epsilon(1e-13));
  CHECK(std::abs(g.grad(0, 1)) <= 1e-14);

  const RadialProfile smooth = RadialProfile::expression("2+sin(r)");
  for (int ell : {0, 3, 9}) {
    const BasisPtr nb = fundamental_pair(smooth, ell, 1.0, 4.0, 2);
    const GramPair q = nb->gram(1.3, 3.7), ref = simpson_gram(*nb, 1.3, 3.7, 20000);
    CHECK((q.grad - ref.grad).norm() <= 1e-10 * ref.grad.norm());
    CHECK((q.l2 - ref.l2).norm() <= 1e-10 * ref.l2.norm());
    const GramPair& whole = nb->segment_gram();
    CHECK((whole.grad - nb->gram(1.0, 4.0).grad).norm() == 0.0);
  }
}
