#include "calr/spectral_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <numbers>

#include "calr/parallel.hpp"

namespace calr {

double angular_weight(int dim) { return dim == 2 ? 2.0 * std::numbers::pi : 1.0; }

cplx angular_harmonic(int dim, ModeIndex m, const Eigen::VectorXd& x) {
  if (dim == 2) {
    const double theta = std::atan2(x(1), x(0));
    return std::polar(1.0, m.k * m.l * theta);
  }
  const double r = x.norm();
  const double polar = r > 0 ? std::acos(std::clamp(x(2) / r, -1.0, 1.0)) : 0.0;
  const double azimuth = std::atan2(x(1), x(0));
  return boost::math::spherical_harmonic(static_cast<unsigned>(m.l), m.k, polar, azimuth);
}

// ---------------------------------------------------------------- spectra

ModeSpectrum ModeSpectrum::geometric(int dim, double radius, double t, int max_mode) {
  ModeSpectrum s;
  s.dim = dim;
  s.radius = radius;
  s.cutoff = max_mode;
  s.infinite_tail = true;
  s.coefficients.push_back({{0, 0}, 1.0});
  for (int l = 1; l <= max_mode; ++l) {
    const double g = std::pow(t, l);
    if (g == 0) break;
    if (dim == 2) {
      s.coefficients.push_back({{l, -1}, g});
      s.coefficients.push_back({{l, 1}, g});
    } else {
      s.coefficients.push_back({{l, 0}, g});
    }
  }
  s.validate();
  return s;
}

ModeSpectrum ModeSpectrum::single(int dim, double radius, ModeIndex m, cplx g, int cutoff) {
  ModeSpectrum s;
  s.dim = dim;
  s.radius = radius;
  s.cutoff = cutoff < 0 ? m.l : cutoff;
  if (g != 0.0) s.coefficients.push_back({m, g});
  s.validate();
  return s;
}

void ModeSpectrum::validate() const {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  if (!(radius > 0)) throw ValidationError("source radius must be positive");
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const auto& [m, g] = coefficients[i];
    if (m.l < 0 || m.l > cutoff) throw ValidationError("mode order outside [0, cutoff]");
    if (dim == 2 && !((m.l == 0 && m.k == 0) || (m.l > 0 && (m.k == 1 || m.k == -1))))
      throw ValidationError("2D modes need k = 0 for l = 0 and k = +-1 otherwise");
    if (dim == 3 && std::abs(m.k) > m.l) throw ValidationError("3D modes need |k| <= l");
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
      throw ValidationError("non-finite source coefficient");
    if (i > 0 && !(coefficients[i - 1].first < m))
      throw ValidationError("source modes must be sorted and unique");
  }
}

ModeSpectrum ModeSpectrum::scaled(cplx factor) const {
  ModeSpectrum s = *this;
  for (auto& [m, g] : s.coefficients) g *= factor;
  if (factor == 0.0) s.coefficients.clear();
  return s;
}

cplx ModeSpectrum::coefficient(ModeIndex m) const {
  auto it = std::lower_bound(coefficients.begin(), coefficients.end(), m,
                             [](const auto& e, ModeIndex v) { return e.first < v; });
  return it != coefficients.end() && it->first == m ? it->second : cplx(0.0);
}

double ModeSpectrum::tail_estimate() const {
  if (!infinite_tail || coefficients.empty()) return 0.0;
  double gL = 0, gL1 = 0;
  for (const auto& [m, g] : coefficients) {
    if (m.l == cutoff) gL = std::max(gL, std::abs(g));
    if (m.l == cutoff - 1) gL1 = std::max(gL1, std::abs(g));
  }
  if (gL1 == 0) return gL;
  const double ratio = gL / gL1;
  return ratio < 1 ? gL * ratio / (1 - ratio) : std::numeric_limits<double>::infinity();
}

ModeSpectrum linear_combination(cplx alpha, const ModeSpectrum& a, cplx beta, const ModeSpectrum& b) {
  if (a.dim != b.dim || a.radius != b.radius)
    throw ValidationError("combined sources must share dimension and radius");
  ModeSpectrum s;
  s.dim = a.dim;
  s.radius = a.radius;
  s.cutoff = std::max(a.cutoff, b.cutoff);
  s.infinite_tail = a.infinite_tail || b.infinite_tail;
  std::size_t i = 0, j = 0;
  while (i < a.coefficients.size() || j < b.coefficients.size()) {
    ModeIndex m;
    cplx g = 0;
    if (j >= b.coefficients.size() ||
        (i < a.coefficients.size() && a.coefficients[i].first < b.coefficients[j].first)) {
      m = a.coefficients[i].first;
      g = alpha * a.coefficients[i++].second;
    } else if (i >= a.coefficients.size() || b.coefficients[j].first < a.coefficients[i].first) {
      m = b.coefficients[j].first;
      g = beta * b.coefficients[j++].second;
    } else {
      m = a.coefficients[i].first;
      g = alpha * a.coefficients[i++].second + beta * b.coefficients[j++].second;
    }
    if (g != 0.0) s.coefficients.push_back({m, g});
  }
  return s;
}

// ---------------------------------------------------------------- discretization

Discretization::Discretization(LayeredMedium medium, std::optional<double> source_radius,
                               int max_order)
    : medium_(std::move(medium)), source_radius_(source_radius), max_order_(max_order) {
  medium_.validate();
  if (max_order < 0) throw ValidationError("mode cutoff must be non-negative");
  for (std::size_t i = 0; i < medium_.layers.size(); ++i) {
    const Layer& L = medium_.layers[i];
    if (source_radius_ && *source_radius_ > L.inner && *source_radius_ < L.outer) {
      segments_.push_back({L.inner, *source_radius_, i, L.profile, L.plasmonic});
      source_interface_ = segments_.size() - 1;
      segments_.push_back({*source_radius_, L.outer, i, L.profile, L.plasmonic});
    } else {
      if (source_radius_ && *source_radius_ == L.outer && i + 1 < medium_.layers.size())
        throw ValidationError("source radius coincides with a material interface");
      segments_.push_back({L.inner, L.outer, i, L.profile, L.plasmonic});
    }
  }
  if (source_radius_ && !source_interface_)
    throw ValidationError("source radius must lie strictly inside the domain");
  if (segments_.front().ra != 0.0) throw ValidationError("innermost segment must start at 0");
  if (!segments_.front().profile.power_law())
    throw ValidationError("innermost layer needs a power-law profile");

  bases_.resize(max_order + 1);
  parallel_for(static_cast<std::size_t>(max_order + 1), [&](std::size_t ell) {
    auto& row = bases_[ell];
    row.reserve(segments_.size());
    for (const Segment& s : segments_)
      row.push_back(fundamental_pair(s.profile, static_cast<int>(ell), s.ra, s.rb, medium_.dim));
  });
}

const RadialBasis& Discretization::basis(int ell, std::size_t segment) const {
  if (ell < 0 || ell > max_order_) throw ValidationError("mode order beyond the cutoff");
  return *bases_[ell].at(segment);
}

int Discretization::column(std::size_t segment, bool decaying) {
  if (segment == 0) return decaying ? -1 : 0;
  return static_cast<int>(2 * segment - 1 + (decaying ? 1 : 0));
}

std::size_t Discretization::segment_at(double r, bool outer_side) const {
  if (!(r >= 0) || r > medium_.omega_radius) throw DomainError("radius outside the domain");
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    if (r < segments_[j].rb) return j;
    if (r == segments_[j].rb) return outer_side && j + 1 < segments_.size() ? j + 1 : j;
  }
  return segments_.size() - 1;
}

// ---------------------------------------------------------------- mode system

ModeSystem assemble_mode_system(const Discretization& disc, int ell, double delta, cplx jump,
                                cplx outer_value) {
  if (!(delta >= 0)) throw ValidationError("delta must be non-negative");
  const auto& segs = disc.segments();
  const std::size_t S = segs.size();
  const int n = static_cast<int>(disc.unknowns());
  const int d = disc.dim();
  ModeSystem sys;
  sys.ell = ell;
  sys.delta = delta;
  sys.matrix = Eigen::MatrixXcd::Zero(n, n);
  sys.rhs = Eigen::VectorXcd::Zero(n);
  auto sgn = [&](std::size_t j) { return segs[j].plasmonic ? shell_sign(delta) : cplx(1.0); };
  for (std::size_t j = 0; j < S; ++j) sys.resonant |= segs[j].plasmonic && delta == 0;

  auto put = [&](int row, std::size_t seg, double r, double vs, bool flux) {
    const BasisValues b = disc.basis(ell, seg).eval(r);
    const cplx f = flux ? sgn(seg) * vs : cplx(vs);
    sys.matrix(row, Discretization::column(seg, false)) += f * (flux ? b.pp : b.up);
    const int cm = Discretization::column(seg, true);
    if (cm >= 0) sys.matrix(row, cm) += f * (flux ? b.pm : b.um);
  };
  for (std::size_t i = 0; i + 1 < S; ++i) {
    const double r = segs[i].rb;
    const int rv = static_cast<int>(2 * i), rf = rv + 1;
    put(rv, i, r, 1.0, false);
    put(rv, i + 1, r, -1.0, false);
    put(rf, i, r, 1.0, true);
    put(rf, i + 1, r, -1.0, true);
    if (disc.source_interface() && *disc.source_interface() == i)
      sys.rhs(rf) = -std::pow(r, d - 1) * jump;
  }
  put(n - 1, S - 1, segs.back().rb, 1.0, false);
  sys.rhs(n - 1) = outer_value;

  for (int r = 0; r < n; ++r) {
    // Power-of-two scaling keeps the entries exact.
    const double s = sys.matrix.row(r).cwiseAbs().maxCoeff();
    if (s > 0) {
      const double f = std::ldexp(1.0, -std::ilogb(s));
      sys.matrix.row(r) *= f;
      sys.rhs(r) *= f;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys.matrix);
  const auto& sv = svd.singularValues();
  sys.rcond = sv(0) > 0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  return sys;
}

ModeSystem assemble_mode_system(const Discretization& disc, const ModeSpectrum& src, ModeIndex m,
                                double delta) {
  return assemble_mode_system(disc, m.l, delta, src.coefficient(m));
}

Eigen::VectorXcd solve_mode_system(const ModeSystem& sys) {
  if (sys.resonant)
    throw ResonanceSingular("plasmonic mode system is singular at delta = 0", sys.ell);
  if (!(sys.rcond > 1e-300) || !std::isfinite(sys.rcond))
    throw SolverError("mode system numerically singular", sys.ell);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu = sys.matrix.partialPivLu();
  Eigen::VectorXcd x = lu.solve(sys.rhs);
  // Iterative refinement with the residual in extended precision.
  using xcplx = std::complex<long double>;
  const Eigen::Index n = x.size();
  for (int it = 0; it < 4 && x.allFinite(); ++it) {
    Eigen::VectorXcd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      xcplx acc = xcplx(sys.rhs(i));
      for (Eigen::Index j = 0; j < n; ++j) acc -= xcplx(sys.matrix(i, j)) * xcplx(x(j));
      r(i) = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    const Eigen::VectorXcd dx = lu.solve(r);
    x += dx;
    if (dx.norm() <= 1e-17 * x.norm()) break;
  }
  const double res = (sys.matrix * x - sys.rhs).norm();
  const double scale = sys.matrix.norm() * x.norm() + sys.rhs.norm();
  if (!x.allFinite() || (scale > 0 && res > 1e-11 * scale))
    throw SolverError("mode system residual too large", sys.ell);
  return x;
}

std::pair<cplx, cplx> radial_value(const Discretization& disc, int ell, const Eigen::VectorXcd& c,
                                   double r, bool outer_side) {
  const std::size_t j = disc.segment_at(r, outer_side);
  const BasisValues b = disc.basis(ell, j).eval(r);
  cplx u = c(Discretization::column(j, false)) * b.up;
  cplx p = c(Discretization::column(j, false)) * b.pp;
  const int cm = Discretization::column(j, true);
  if (cm >= 0) {
    u += c(cm) * b.um;
    p += c(cm) * b.pm;
  }
  return {u, p};
}

// ---------------------------------------------------------------- field

std::pair<cplx, cplx> Field::radial(std::size_t mode, double r, bool outer_side) const {
  return radial_value(*disc, modes.at(mode).l, coefficients.at(mode), r, outer_side);
}

std::pair<cplx, cplx> Field::segment_coefficients(std::size_t mode, std::size_t segment) const {
  const auto& c = coefficients.at(mode);
  const int cm = Discretization::column(segment, true);
  return {c(Discretization::column(segment, false)), cm >= 0 ? c(cm) : cplx(0.0)};
}

Field Field::scaled(cplx factor) const {
  Field f = *this;
  for (auto& c : f.coefficients) c *= factor;
  return f;
}

Field linear_combination(cplx alpha, const Field& a, cplx beta, const Field& b) {
  if (a.disc != b.disc || a.modes != b.modes)
    throw ValidationError("fields must share discretization and modes");
  Field f = a;
  for (std::size_t i = 0; i < f.coefficients.size(); ++i)
    f.coefficients[i] = alpha * a.coefficients[i] + beta * b.coefficients[i];
  return f;
}

Field solve_field(std::shared_ptr<const Discretization> disc, const ModeSpectrum& src, double delta) {
  src.validate();
  if (!(delta > 0)) throw ValidationError("delta must be positive");
  if (src.dim != disc->dim()) throw ValidationError("source dimension differs from medium");
  if (!disc->source_radius() || *disc->source_radius() != src.radius)
    throw ValidationError("discretization was built for a different source radius");
  if (src.cutoff > disc->max_order()) throw ValidationError("source cutoff exceeds discretization");

  // Unit-jump radial solution per order, shared across angular indices.
  std::vector<int> orders;
  for (const auto& [m, g] : src.coefficients)
    if (orders.empty() || orders.back() != m.l) orders.push_back(m.l);
  std::vector<Eigen::VectorXcd> unit(orders.size());
  parallel_for(orders.size(), [&](std::size_t i) {
    unit[i] = solve_mode_system(assemble_mode_system(*disc, orders[i], delta, 1.0));
  });

  Field f;
  f.disc = disc;
  f.delta = delta;
  std::size_t oi = 0;
  for (const auto& [m, g] : src.coefficients) {
    while (orders[oi] != m.l) ++oi;
    f.modes.push_back(m);
    f.coefficients.push_back(g * unit[oi]);
  }
  return f;
}

Field solve_field(const LayeredMedium& m, const ModeSpectrum& src, double delta, int cutoff) {
  auto disc = std::make_shared<const Discretization>(m, src.radius, cutoff);
  return solve_field(disc, src, delta);
}

cplx evaluate(const Field& f, const Eigen::VectorXd& x) {
  const double r = x.norm();
  if (x.size() != f.dim()) throw ValidationError("point dimension differs from field");
  if (!(r < f.disc->medium().omega_radius)) throw DomainError("point outside the domain");
  cplx sum = 0;
  for (std::size_t i = 0; i < f.modes.size(); ++i) {
    if (r == 0) {
      if (f.modes[i].l == 0)
        sum += f.coefficients[i](0) * (f.dim() == 3 ? 0.5 / std::sqrt(std::numbers::pi) : 1.0);
      continue;
    }
    sum += f.radial(i, r).first * angular_harmonic(f.dim(), f.modes[i], x / r);
  }
  return sum;
}

namespace {

template <typename Fn>
void for_each_piece(const Field& f, double a, double b, Fn&& fn) {
  const auto& segs = f.disc->segments();
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const double x = std::max(a, segs[j].ra), y = std::min(b, segs[j].rb);
    if (y > x) fn(j, x, y);
  }
}

std::pair<double, double> quadratic_energy(const Field& f, double a, double b) {
  double total_grad = 0, total_l2 = 0;
  const auto& segs = f.disc->segments();
  for_each_piece(f, a, b, [&](std::size_t j, double x, double y) {
    const bool whole = x == segs[j].ra && y == segs[j].rb;
    int last_ell = -1;
    GramPair local;
    const GramPair* g = nullptr;
    for (std::size_t i = 0; i < f.modes.size(); ++i) {
      const int ell = f.modes[i].l;
      if (ell != last_ell) {
        const RadialBasis& basis = f.disc->basis(ell, j);
        if (whole) {
          g = &basis.segment_gram();
        } else {
          local = basis.gram(x, y);
          g = &local;
        }
        last_ell = ell;
      }
      const auto [c, d] = f.segment_coefficients(i, j);
      auto form = [&](const Eigen::Matrix2d& G) {
        return G(0, 0) * std::norm(c) + 2 * G(0, 1) * std::real(std::conj(c) * d) +
               (j == 0 ? 0.0 : G(1, 1) * std::norm(d));
      };
      total_grad += form(g->grad);
      total_l2 += form(g->l2);
    }
  });
  const double w = angular_weight(f.dim());
  return {w * total_grad, w * total_l2};
}

}  // namespace

double gradient_energy(const Field& f, double a, double b) { return quadratic_energy(f, a, b).first; }

double l2_energy(const Field& f, double a, double b) { return quadratic_energy(f, a, b).second; }

double h1_norm(const Field& f, double a, double b) {
  const auto [g, l] = quadratic_energy(f, a, b);
  return std::sqrt(g + l);
}

cplx weighted_energy(const Field& f, double a, double b) {
  cplx total = 0;
  const auto& segs = f.disc->segments();
  for_each_piece(f, a, b, [&](std::size_t j, double x, double y) {
    const cplx s = segs[j].plasmonic ? shell_sign(f.delta) : cplx(1.0);
    for (std::size_t i = 0; i < f.modes.size(); ++i) {
      const auto [uy, py] = f.radial(i, y, false);
      cplx term = py * std::conj(uy);
      if (x > 0) {
        const auto [ux, px] = f.radial(i, x, true);
        term -= px * std::conj(ux);
      }
      total += s * term;
    }
  });
  return angular_weight(f.dim()) * total;
}

double trace_norm(const std::vector<std::pair<ModeIndex, cplx>>& g, double R, double s, int dim) {
  double sum = 0;
  for (const auto& [m, v] : g) sum += std::pow(1.0 + double(m.l) * m.l, s) * std::norm(v);
  return std::sqrt(angular_weight(dim) * std::pow(R, dim - 1) * sum);
}

double trace_norm(const Field& f, double R, double s, bool flux) {
  std::vector<std::pair<ModeIndex, cplx>> g;
  g.reserve(f.modes.size());
  for (std::size_t i = 0; i < f.modes.size(); ++i) {
    const auto [u, p] = f.radial(i, R);
    g.push_back({f.modes[i], flux ? p / std::pow(R, f.dim() - 1) : u});
  }
  return trace_norm(g, R, s, f.dim());
}

ResidualReport interface_residual(const Field& f, const ModeSpectrum& src) {
  ResidualReport rep;
  const auto& segs = f.disc->segments();
  const int d = f.dim();
  for (std::size_t i = 0; i < f.modes.size(); ++i) {
    double scale_u = 0, scale_p = 0;
    std::vector<std::array<cplx, 4>> rows;
    for (std::size_t j = 0; j + 1 < segs.size(); ++j) {
      const double r = segs[j].rb;
      const auto [ui, pi] = f.radial(i, r, false);
      const auto [uo, po] = f.radial(i, r, true);
      const cplx si = segs[j].plasmonic ? shell_sign(f.delta) : cplx(1.0);
      const cplx so = segs[j + 1].plasmonic ? shell_sign(f.delta) : cplx(1.0);
      cplx jump = 0;
      if (f.disc->source_interface() && *f.disc->source_interface() == j)
        jump = std::pow(r, d - 1) * src.coefficient(f.modes[i]);
      scale_u = std::max({scale_u, std::abs(ui), std::abs(uo)});
      scale_p = std::max({scale_p, std::abs(si * pi), std::abs(so * po), std::abs(jump)});
      rows.push_back({ui - uo, so * po - si * pi - jump, 0, 0});
    }
    const auto [uR, pR] = f.radial(i, segs.back().rb);
    (void)pR;
    for (const auto& r : rows) {
      if (scale_u > 0) rep.value = std::max(rep.value, std::abs(r[0]) / scale_u);
      if (scale_p > 0) rep.flux = std::max(rep.flux, std::abs(r[1]) / scale_p);
    }
    if (scale_u > 0) rep.outer = std::max(rep.outer, std::abs(uR) / scale_u);
  }
  return rep;
}

}  // namespace calr
