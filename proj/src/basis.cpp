#include "calr/basis.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/numeric/odeint.hpp>
#include <array>
#include <cmath>
#include <vector>

namespace calr {

namespace {

// Full 30-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_nodes() {
  static const auto rule = [] {
    using G = boost::math::quadrature::gauss<double, 30>;
    std::vector<double> x, w;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      x.push_back(G::abscissa()[i]);
      w.push_back(G::weights()[i]);
      if (G::abscissa()[i] != 0.0) {
        x.push_back(-G::abscissa()[i]);
        w.push_back(G::weights()[i]);
      }
    }
    return std::make_pair(x, w);
  }();
  return rule;
}

// int_x^y (r/ri)^mi (r/rj)^mj r^e dr, with n1 = mi + mj + e + 1.
double power_integral(double mi, double ri, double mj, double rj, double e, double x, double y) {
  const double n1 = mi + mj + e + 1.0;
  const double P = e * std::log(y) + mi * std::log(y / ri) + mj * std::log(y / rj) + std::log(y);
  // P is the log of the integrand times y at the upper end.
  if (x <= 0.0) {
    if (!(n1 > 0)) return std::numeric_limits<double>::infinity();
    return std::exp(P) / n1;
  }
  const double lyx = std::log(y / x);
  if (std::abs(n1) * lyx < 1e-12) return std::exp(P) * lyx;
  if (n1 > 0) return std::exp(P) * -std::expm1(-n1 * lyx) / n1;
  const double Q = P - n1 * lyx;
  return std::exp(Q) * -std::expm1(n1 * lyx) / -n1;
}

}  // namespace

std::pair<double, double> power_exponents(double k, int ell, int dim) {
  const double b = k + dim - 2;
  const double lam = double(ell) * (ell + dim - 2);
  const double disc = std::sqrt(b * b + 4 * lam);
  // Avoid cancellation in the smaller root.
  if (b >= 0) {
    const double mm = (-b - disc) / 2;
    return {mm != 0 ? -lam / mm : 0.0, mm};
  }
  const double mp = (-b + disc) / 2;
  return {mp, mp != 0 ? -lam / mp : 0.0};
}

RadialBasis::RadialBasis(RadialProfile a, int ell_, int dim_, double ra_, double rb_)
    : profile(std::move(a)), ell(ell_), dim(dim_), ra(ra_), rb(rb_) {
  if (ell < 0) throw ValidationError("negative mode order");
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  if (!(ra >= 0 && rb > ra)) throw ValidationError("invalid basis interval");
}

const GramPair& RadialBasis::segment_gram() const {
  std::call_once(cache_->once, [this] { cache_->value = gram(ra, rb); });
  return cache_->value;
}

GramPair RadialBasis::gram(double x, double y) const {
  GramPair g;
  if (!(y > x)) return g;
  const auto& [nodes, weights] = gauss_nodes();
  const double lam = lambda();
  const int d = dim;
  // Panels uniform in ln r (uniform in r when the interval touches 0); the
  // panel count resolves the exponential rate of r^{2m}.
  const bool logarithmic = x > 0;
  const double a = logarithmic ? std::log(x) : x, b = logarithmic ? std::log(y) : y;
  const double rate = 2.0 * (ell + d) * (logarithmic ? 1.0 : 1.0 / y);
  const int panels = std::max(8, static_cast<int>(std::ceil(rate * (b - a) / 4.0)));
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double c = a + h * (k + 0.5);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double s = c + 0.5 * h * nodes[q];
      const double r = logarithmic ? std::exp(s) : s;
      if (r <= 0) continue;
      const double w = 0.5 * h * weights[q] * (logarithmic ? r : 1.0) * std::pow(r, d - 1);
      const BasisValues bv = eval(r);
      const double ar = profile(r) * std::pow(r, d - 1);
      const double u[2] = {bv.up, bv.um};
      const double du[2] = {bv.pp / ar, bv.pm / ar};
      for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
          g.grad(i, j) += w * (du[i] * du[j] + lam * u[i] * u[j] / (r * r));
          g.l2(i, j) += w * u[i] * u[j];
        }
      }
    }
  }
  g.grad(1, 0) = g.grad(0, 1);
  g.l2(1, 0) = g.l2(0, 1);
  return g;
}

// ---------------------------------------------------------------- power

PowerBasis::PowerBasis(double c, double k, int ell_, int dim_, double ra_, double rb_)
    : RadialBasis(RadialProfile::power(c, k), ell_, dim_, ra_, rb_), c_(c), k_(k) {
  std::tie(m_plus, m_minus) = power_exponents(k, ell, dim);
}

BasisValues PowerBasis::eval(double r) const {
  BasisValues v;
  const double fluxfac = c_ * std::pow(r, k_ + dim - 2);  // a r^{d-1} / r
  if (ell == 0) {
    v.up = 1.0;
    v.pp = 0.0;
    if (ra > 0) {
      const double N = -(k_ + dim - 2);
      const double lr = std::log(r / ra);
      v.um = N == 0 ? lr / c_ : std::pow(ra, N) * std::expm1(N * lr) / (c_ * N);
      v.pm = 1.0;
    }
    return v;
  }
  v.up = std::exp(m_plus * std::log(r / rb));
  v.pp = fluxfac * m_plus * v.up;
  if (ra > 0) {
    v.um = std::exp(m_minus * std::log(r / ra));
    v.pm = fluxfac * m_minus * v.um;
  }
  return v;
}

GramPair PowerBasis::gram(double x, double y) const {
  if (ell == 0) return RadialBasis::gram(x, y);
  GramPair g;
  if (!(y > x)) return g;
  const std::array<double, 2> m{m_plus, m_minus};
  const std::array<double, 2> rr{rb, ra};
  const double lam = lambda();
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      if ((i == 1 || j == 1) && ra <= 0) continue;
      const double cg = m[i] * m[j] + lam;
      const double vg = cg == 0 ? 0.0 : cg * power_integral(m[i], rr[i], m[j], rr[j], dim - 3, x, y);
      const double vl = power_integral(m[i], rr[i], m[j], rr[j], dim - 1, x, y);
      g.grad(i, j) = g.grad(j, i) = vg;
      g.l2(i, j) = g.l2(j, i) = vl;
    }
  }
  return g;
}

// ---------------------------------------------------------------- numeric

struct NumericBasis::Table {
  using Interp = boost::math::interpolators::cardinal_cubic_hermite<std::vector<double>>;
  std::unique_ptr<Interp> y;  // ln u (or G for the l = 0 companion)
  std::unique_ptr<Interp> q;  // flux over value (unused for G)
  double t0, t1;
  bool log_form = true;

  BasisValues eval(double t) const {
    t = std::clamp(t, t0, t1);
    BasisValues v;
    if (log_form) {
      v.up = std::exp((*y)(t));
      v.pp = (*q)(t)*v.up;
    } else {
      v.up = (*y)(t);
      v.pp = 1.0;
    }
    return v;
  }
};

namespace {

using State = std::array<double, 2>;

std::shared_ptr<NumericBasis::Table> tabulate(const RadialProfile& a, int dim, double lam,
                                              double t_start, double t_end, double q_start,
                                              bool log_form, int intervals, double tol) {
  namespace odeint = boost::numeric::odeint;
  const int n = intervals + 1;
  const double h = (t_end - t_start) / intervals;
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = t_start + h * i;
  ts.back() = t_end;

  auto rhs = [&](const State& s, State& ds, double t) {
    const double r = std::exp(t);
    const double ar = a(r);
    const double w = std::pow(r, 2 - dim) / ar;
    if (log_form) {
      ds[0] = s[1] * w;
      ds[1] = ar * lam * std::pow(r, dim - 2) - s[1] * s[1] * w;
    } else {
      ds[0] = w;
      ds[1] = 0.0;
    }
  };

  std::vector<double> y(n), dy(n), q(n), dq(n);
  State s{0.0, q_start};
  int idx = 0;
  auto observer = [&](const State& st, double t) {
    State d;
    rhs(st, d, t);
    y[idx] = st[0];
    q[idx] = st[1];
    dy[idx] = d[0];
    dq[idx] = d[1];
    ++idx;
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  odeint::integrate_times(stepper, rhs, s, ts.begin(), ts.end(), h, observer);
  if (idx != n) throw SolverError("fundamental pair integration incomplete");
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(y[i]) || !std::isfinite(q[i]))
      throw SolverError("fundamental pair integration diverged");

  // Normalize so the value at t_end is 1 (log form) or 0 (companion form).
  const double shift = log_form ? y.back() : 0.0;
  for (auto& v : y) v -= shift;

  // cardinal interpolation needs ascending abscissae
  if (h < 0) {
    std::reverse(y.begin(), y.end());
    std::reverse(dy.begin(), dy.end());
    std::reverse(q.begin(), q.end());
    std::reverse(dq.begin(), dq.end());
  }
  auto tab = std::make_shared<NumericBasis::Table>();
  const double lo = std::min(t_start, t_end), dx = std::abs(h);
  tab->t0 = lo;
  tab->t1 = std::max(t_start, t_end);
  tab->log_form = log_form;
  tab->y = std::make_unique<NumericBasis::Table::Interp>(std::move(y), std::move(dy), lo, dx);
  tab->q = std::make_unique<NumericBasis::Table::Interp>(std::move(q), std::move(dq), lo, dx);
  // The interpolator's own upper end can sit one ulp below t1.
  tab->t1 = std::min({tab->t1, tab->y->domain().second, tab->q->domain().second});
  return tab;
}

}  // namespace

NumericBasis::NumericBasis(RadialProfile a, int ell_, int dim_, double ra_, double rb_,
                           int intervals, double tol)
    : RadialBasis(std::move(a), ell_, dim_, ra_, rb_) {
  if (!(ra > 0)) throw ValidationError("tabulated basis needs ra > 0");
  const double ta = std::log(ra), tb = std::log(rb);
  const double lam = lambda();
  if (ell == 0) {
    minus_ = tabulate(profile, dim, lam, ta, tb, 0.0, false, intervals, tol);
    return;
  }
  const auto [mp, mm] = power_exponents(0.0, ell, dim);
  // Frozen-coefficient start values; the forward (backward) sweep is attracted
  // to the dominant growing (decaying) branch.
  const double qa = profile(ra) * std::pow(ra, dim - 2) * mp;
  const double qb = profile(rb) * std::pow(rb, dim - 2) * mm;
  plus_ = tabulate(profile, dim, lam, ta, tb, qa, true, intervals, tol);
  minus_ = tabulate(profile, dim, lam, tb, ta, qb, true, intervals, tol);
}

BasisValues NumericBasis::eval(double r) const {
  const double t = std::log(r);
  BasisValues v;
  if (ell == 0) {
    v.up = 1.0;
    v.pp = 0.0;
    const BasisValues g = minus_->eval(t);
    v.um = g.up;
    v.pm = 1.0;
    return v;
  }
  const BasisValues p = plus_->eval(t), m = minus_->eval(t);
  v.up = p.up;
  v.pp = p.pp;
  v.um = m.up;
  v.pm = m.pp;
  return v;
}

// ---------------------------------------------------------------- mapped

MappedBasis::MappedBasis(BasisPtr parent, MapStep step, RadialProfile a, double ra_, double rb_)
    : RadialBasis(std::move(a), parent->ell, parent->dim, ra_, rb_),
      parent_(std::move(parent)),
      step_(step) {}

BasisValues MappedBasis::eval(double r) const {
  const BasisValues b = parent_->eval(step_.inverse(r));
  if (step_.kind == MapStep::Kind::Dilation) return b;
  BasisValues v;
  if (ell == 0) {
    v.up = 1.0;
    v.pp = 0.0;
    v.um = b.um;
    v.pm = -b.pm;
    return v;
  }
  v.up = b.um;
  v.pp = -b.pm;
  v.um = b.up;
  v.pm = -b.pp;
  return v;
}

// ---------------------------------------------------------------- factory

namespace {

BasisPtr mapped_chain(const RadialProfile& root, const std::vector<MapStep>& steps,
                      std::size_t count, int ell, double ra, double rb, int dim) {
  if (count == 0) return std::make_shared<NumericBasis>(root, ell, dim, ra, rb);
  const MapStep& last = steps[count - 1];
  double pa = last.inverse(ra), pb = last.inverse(rb);
  if (pa > pb) std::swap(pa, pb);
  BasisPtr parent = mapped_chain(root, steps, count - 1, ell, pa, pb, dim);
  RadialMap partial;
  for (std::size_t i = 0; i < count; ++i)
    partial = partial.then(steps[i].kind == MapStep::Kind::Kelvin ? RadialMap::kelvin(steps[i].param)
                                                                   : RadialMap::dilation(steps[i].param));
  return std::make_shared<MappedBasis>(parent, last, pushforward_isotropic(root, partial, dim), ra, rb);
}

}  // namespace

BasisPtr fundamental_pair(const RadialProfile& a, int ell, double ra, double rb, int dim) {
  if (auto pw = a.power_law()) return std::make_shared<PowerBasis>(pw->first, pw->second, ell, dim, ra, rb);
  const auto& steps = a.map().steps();
  if (!steps.empty()) return mapped_chain(a.root(), steps, steps.size(), ell, ra, rb, dim);
  return std::make_shared<NumericBasis>(a, ell, dim, ra, rb);
}

}  // namespace calr
