#include "calr/analysis_checks.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "calr/errors.hpp"
#include "calr/parallel.hpp"

namespace calr {

namespace {

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

void check_mode(const ModeIndex& m, int dim) {
  if (m.l < 0) throw ValidationError("negative mode order");
  if (dim == 2 ? (m.l == 0 ? m.k != 0 : std::abs(m.k) != 1) : std::abs(m.k) > m.l)
    throw ValidationError("invalid mode (" + std::to_string(m.l) + "," + std::to_string(m.k) + ")");
}

std::vector<int> angular_indices(int dim, int l) {
  if (l == 0) return {0};
  if (dim == 2) return {-1, 1};
  std::vector<int> ks;
  for (int k = -l; k <= l; ++k) ks.push_back(k);
  return ks;
}

}  // namespace

// ---------------------------------------------------------------- three spheres

ThreeSpheresReport three_spheres_check(const ModeTable& v, int dim, double R1, double R2, double R3,
                                       double tolerance) {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  if (!(0 < R1 && R1 < R2 && R2 < R3)) throw ValidationError("need 0 < R1 < R2 < R3");
  for (const auto& [m, c] : v) check_mode(m, dim);
  auto log_norm = [&](double R) {
    double acc = -std::numeric_limits<double>::infinity();
    for (const auto& [m, c] : v)
      if (c != 0.0) acc = log_sum_exp(acc, std::log(std::norm(c)) + 2.0 * m.l * std::log(R));
    return 0.5 * (std::log(angular_weight(dim)) + acc);
  };
  ThreeSpheresReport rep;
  rep.R1 = R1;
  rep.R2 = R2;
  rep.R3 = R3;
  rep.alpha = std::log(R3 / R2) / std::log(R3 / R1);
  rep.tolerance = tolerance;
  const double l1 = log_norm(R1), l2 = log_norm(R2), l3 = log_norm(R3);
  if (!std::isfinite(l1)) throw ValidationError("three-spheres sample is identically zero");
  rep.n1 = std::exp(l1);
  rep.n2 = std::exp(l2);
  rep.n3 = std::exp(l3);
  rep.ratio = std::exp(l2 - rep.alpha * l1 - (1.0 - rep.alpha) * l3);
  rep.pass = rep.ratio <= 1.0 + tolerance;
  return rep;
}

// ---------------------------------------------------------------- plasmon pairs

LayeredMedium plasmon_medium(const RadialProfile& a, double R1, double R2, int dim) {
  if (!(0 < R1 && R1 < R2)) throw ValidationError("need 0 < R1 < R2");
  const double R3 = R2 * R2 / R1;
  LayeredMedium m;
  m.dim = dim;
  m.omega_radius = R3;
  m.layers = {
      {0.0, R1, RadialProfile::constant(1.0), false},
      {R1, R2, a, false},
      {R2, R3, pushforward_isotropic(a, RadialMap::kelvin(R2), dim), false},
  };
  m.validate();
  return m;
}

std::pair<cplx, cplx> PlasmonPair::v_at(double r, bool outer_side) const {
  return radial_value(*disc, ell, v, r, outer_side);
}

std::pair<cplx, cplx> PlasmonPair::w_at(double r) const {
  const BasisValues b = inner->eval(r);
  return {w.first * b.up + w.second * b.um, w.first * b.pp + w.second * b.pm};
}

std::vector<PlasmonPair> plasmon_pairs(const RadialProfile& a, double R1, double R2, int dim,
                                       int max_order) {
  if (max_order < 0) throw ValidationError("max order must be non-negative");
  const LayeredMedium m = plasmon_medium(a, R1, R2, dim);
  auto disc = std::make_shared<const Discretization>(m, std::nullopt, max_order);
  std::vector<PlasmonPair> out(max_order + 1);
  parallel_for(out.size(), [&](std::size_t l) {
    PlasmonPair& p = out[l];
    p.ell = int(l);
    p.dim = dim;
    p.R1 = R1;
    p.R2 = R2;
    p.R3 = m.omega_radius;
    p.disc = disc;
    p.v = solve_mode_system(assemble_mode_system(*disc, int(l), 0.0, 0.0, 1.0));
    p.inner = BasisPtr(disc, &disc->basis(int(l), 1));
    if (l == 0) {
      p.w = {0.0, 1.0 / p.inner->eval(R2).um};
    } else {
      // The outer piece is the Kelvin image of the inner one with growing and
      // decaying roles exchanged.
      const auto& c = p.v;
      p.w = {c(Discretization::column(2, true)), c(Discretization::column(2, false))};
    }
  });
  return out;
}

PlasmonPair plasmon_pair(const RadialProfile& a, double R1, double R2, int dim, int ell) {
  if (ell < 0) throw ValidationError("mode order must be non-negative");
  return plasmon_pairs(a, R1, R2, dim, ell).back();
}

ReflectionIdentity reflection_identity(const PlasmonPair& p) {
  const auto [v, pv] = p.v_at(p.R2, true);
  const auto [w, pw] = p.w_at(p.R2);
  ReflectionIdentity r;
  const double tiny = std::numeric_limits<double>::min();
  r.trace = std::abs(w - v) / std::max({std::abs(w), std::abs(v), tiny});
  r.flux = std::abs(pw + pv) / std::max({std::abs(pw), std::abs(pv), tiny});
  return r;
}

// ---------------------------------------------------------------- density

std::string to_string(DensityFamily f) {
  switch (f) {
    case DensityFamily::Difference: return "difference";
    case DensityFamily::Flux: return "flux";
    case DensityFamily::Joint: return "joint";
  }
  return "?";
}

DensityFamily parse_density_family(const std::string& s) {
  if (s == "difference") return DensityFamily::Difference;
  if (s == "flux") return DensityFamily::Flux;
  if (s == "joint") return DensityFamily::Joint;
  throw ValidationError("unknown density family '" + s + "'");
}

DensityResult density_residual(const std::vector<PlasmonPair>& pairs, const DensityTarget& target,
                               DensityFamily family, int m) {
  if (m < 0 || std::size_t(m) >= pairs.size()) throw ValidationError("truncation exceeds the computed pairs");
  const int dim = pairs.front().dim;
  const double R1 = pairs.front().R1, R2 = pairs.front().R2;
  for (const auto& t : {target.inner, target.outer})
    for (const auto& [md, c] : t) check_mode(md, dim);
  if (family != DensityFamily::Joint && !target.outer.empty())
    throw ValidationError("outer data is only used by the joint family");

  // Elements never mix modes, so the projection splits into per-mode blocks
  // with one slot per circle (R1, and R2 for the joint family).
  const int circles = family == DensityFamily::Joint ? 2 : 1;
  const double s = family == DensityFamily::Flux ? -0.5 : 0.5;
  struct Block {
    std::vector<Eigen::Vector2cd> columns;
    Eigen::Vector2cd target = Eigen::Vector2cd::Zero();
  };
  std::map<ModeIndex, Block> blocks;
  for (int l = 0; l <= m; ++l) {
    const PlasmonPair& p = pairs.at(l);
    if (p.ell != l) throw ValidationError("pairs must be ordered by mode order");
    const auto [v1, pv1] = p.v_at(R1, true);
    const auto [w1, pw1] = p.w_at(R1);
    const auto [v2, pv2] = p.v_at(R2, true);
    const auto [w2, pw2] = p.w_at(R2);
    std::vector<Eigen::Vector2cd> cols;
    switch (family) {
      case DensityFamily::Difference:
        cols.push_back({l == 0 ? cplx(1.0) : v1 - w1, 0.0});
        break;
      case DensityFamily::Flux:
        cols.push_back({l == 0 ? cplx(1.0) : (pv1 + pw1) / std::pow(R1, dim - 1), 0.0});
        break;
      case DensityFamily::Joint:
        cols.push_back({v1, v2});
        cols.push_back({w1, w2});
        break;
    }
    for (int k : angular_indices(dim, l)) blocks[{l, k}].columns = cols;
  }
  for (const auto& [md, c] : target.inner) blocks[md].target(0) += c;
  for (const auto& [md, c] : target.outer) blocks[md].target(1) += c;

  DensityResult res;
  res.family = family;
  res.m = m;
  auto weights = [&](int l) {
    const double ang = angular_weight(dim) * std::pow(1.0 + double(l) * l, s);
    return Eigen::Vector2d(std::sqrt(ang * std::pow(R1, dim - 1)),
                           circles == 2 ? std::sqrt(ang * std::pow(R2, dim - 1)) : 0.0);
  };

  struct Solved {
    Eigen::MatrixXcd Y, Gs;
    Eigen::VectorXcd b, t;
    Eigen::VectorXd d;
  };
  std::vector<Solved> work;
  double emax = 0, emin = std::numeric_limits<double>::infinity();
  double target2 = 0, residual2 = 0;
  for (const auto& [md, blk] : blocks) {
    const Eigen::Vector2d wgt = weights(md.l);
    Solved sv;
    sv.t = (wgt.cast<cplx>().cwiseProduct(blk.target)).head(circles);
    target2 += sv.t.squaredNorm();
    if (blk.columns.empty()) {
      residual2 += sv.t.squaredNorm();
      continue;
    }
    res.elements += blk.columns.size();
    sv.Y.resize(circles, Eigen::Index(blk.columns.size()));
    for (std::size_t j = 0; j < blk.columns.size(); ++j)
      sv.Y.col(Eigen::Index(j)) = (wgt.cast<cplx>().cwiseProduct(blk.columns[j])).head(circles);
    const Eigen::MatrixXcd G = sv.Y.adjoint() * sv.Y;
    sv.b = sv.Y.adjoint() * sv.t;
    sv.d = G.diagonal().real().cwiseSqrt();
    for (Eigen::Index i = 0; i < sv.d.size(); ++i)
      if (!(sv.d(i) > 0)) throw SolverError("density family has a vanishing element");
    // Scaling keeps the conditioning report about directions, not magnitudes.
    sv.Gs = sv.d.cwiseInverse().asDiagonal() * G * sv.d.cwiseInverse().asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sv.Gs, Eigen::EigenvaluesOnly);
    emax = std::max(emax, eig.eigenvalues().maxCoeff());
    emin = std::min(emin, eig.eigenvalues().minCoeff());
    work.push_back(std::move(sv));
  }
  res.condition = emin > 0 ? emax / emin : std::numeric_limits<double>::infinity();
  res.regularized = !(res.condition < 1e12);
  for (auto& sv : work) {
    Eigen::MatrixXcd A = sv.Gs;
    if (res.regularized) A.diagonal().array() += 1e-12 * emax;
    const Eigen::VectorXcd x =
        sv.d.cwiseInverse().asDiagonal() * A.ldlt().solve(sv.d.cwiseInverse().asDiagonal() * sv.b);
    residual2 += (sv.t - sv.Y * x).squaredNorm();
  }
  res.target_norm = std::sqrt(target2);
  res.residual = std::sqrt(residual2);
  return res;
}

// ---------------------------------------------------------------- rigidity

RigidityReport rigidity_check(const RadialProfile& a, double R1, double R2, int dim, int max_order) {
  const auto pairs = plasmon_pairs(a, R1, R2, dim, max_order);
  return rigidity_check([&](int l) { return pairs.at(l); }, max_order);
}

RigidityReport rigidity_check(const PairProvider& provider, int max_order, double threshold) {
  if (max_order < 1) throw ValidationError("rigidity needs max order >= 1");
  RigidityReport rep;
  rep.threshold = threshold;
  const double tiny = std::numeric_limits<double>::min();
  std::vector<cplx> fluxes;
  int dim = 2;
  double R1 = 1;
  for (int l = 1; l <= max_order; ++l) {
    const PlasmonPair p = provider(l);
    dim = p.dim;
    R1 = p.R1;
    const auto [v, pv] = p.v_at(p.R1, true);
    const auto [w, pw] = p.w_at(p.R1);
    RigidityRow row;
    row.ell = l;
    row.det_trace = std::real(w - v) / std::max({std::abs(w), std::abs(v), tiny});
    row.det_flux = -std::real(pv + pw) / std::max({std::abs(pv), std::abs(pw), tiny});
    row.degenerate = !(row.det_trace > threshold) || !(row.det_flux > threshold);
    if (row.degenerate) rep.degenerate_orders.push_back(l);
    rep.rows.push_back(row);
    fluxes.push_back((pv + pw) / std::pow(p.R1, p.dim - 1));
  }

  // Total flux of V = sum_l (v_l + w_l) Y_l through |x| = R1; v_0 is constant
  // and contributes nothing, so the l = 0 condition reduces to this integral.
  double total_abs = 0;
  cplx total = 0;
  if (dim == 2) {
    const int Q = 4 * (max_order + 1);
    for (int j = 0; j < Q; ++j) {
      const double th = 2.0 * std::numbers::pi * j / Q;
      for (int l = 1; l <= max_order; ++l) total += fluxes[l - 1] * std::polar(1.0, l * th) / double(l);
    }
    total *= R1 * 2.0 * std::numbers::pi / Q;
    for (int l = 1; l <= max_order; ++l) total_abs += std::abs(fluxes[l - 1]) / l;
    total_abs *= 2.0 * std::numbers::pi * R1;
  } else {
    using GL = boost::math::quadrature::gauss<double, 30>;
    const int panels = std::max(4, max_order / 10 + 1);
    for (int pnl = 0; pnl < panels; ++pnl) {
      const double lo = -1.0 + 2.0 * pnl / panels, hi = -1.0 + 2.0 * (pnl + 1) / panels;
      total += GL::integrate(
          [&](double x) {
            const double theta = std::acos(std::clamp(x, -1.0, 1.0));
            double f = 0;
            for (int l = 1; l <= max_order; ++l)
              f += std::real(fluxes[l - 1]) / l *
                   boost::math::spherical_harmonic_r(static_cast<unsigned>(l), 0, theta, 0.0);
            return f;
          },
          lo, hi);
    }
    total *= 2.0 * std::numbers::pi * R1 * R1;
    for (int l = 1; l <= max_order; ++l) total_abs += std::abs(fluxes[l - 1]) / l;
    total_abs *= 4.0 * std::numbers::pi * R1 * R1;
  }
  rep.monopole_flux = total_abs > 0 ? std::abs(total) / total_abs : 0.0;
  return rep;
}

}  // namespace calr
