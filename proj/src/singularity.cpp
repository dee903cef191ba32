#include "calr/singularity.hpp"

#include <cmath>
#include <limits>

#include "calr/errors.hpp"
#include "calr/parallel.hpp"

namespace calr {

namespace {

std::size_t unique_segment(const Discretization& disc, std::size_t layer) {
  std::size_t found = std::numeric_limits<std::size_t>::max();
  const auto& segs = disc.segments();
  for (std::size_t j = 0; j < segs.size(); ++j) {
    if (segs[j].layer != layer) continue;
    if (found != std::numeric_limits<std::size_t>::max())
      throw ValidationError("the source must not split the core, shell or inner ball");
    found = j;
  }
  if (found == std::numeric_limits<std::size_t>::max()) throw ValidationError("missing layer");
  return found;
}

std::pair<cplx, cplx> combine(const RadialBasis& b, std::pair<cplx, cplx> c, double r) {
  const BasisValues v = b.eval(r);
  return {c.first * v.up + c.second * v.um, c.first * v.pp + c.second * v.pm};
}

}  // namespace

std::pair<cplx, cplx> ReflectionPair::v1_at(std::size_t i, double r) const {
  return combine(*annulus.at(modes.at(i).l), v1.at(i), r);
}

std::pair<cplx, cplx> ReflectionPair::v2_at(std::size_t i, double r) const {
  return combine(*annulus.at(modes.at(i).l), v2.at(i), r);
}

ReflectionPair reflect(const Field& u) {
  const Discretization& disc = *u.disc;
  const LayeredMedium& m = disc.medium();
  if (!m.geometry || !m.annulus_profile || m.layers.size() != 5)
    throw ValidationError("reflection needs a doubly complementary medium");
  if (disc.source_radius() && *disc.source_radius() < m.geometry->r2)
    throw ValidationError("reflection needs the source outside the shell");

  ReflectionPair pair;
  pair.disc = u.disc;
  pair.r1 = m.geometry->r1;
  pair.r2 = m.geometry->r2;
  pair.r3 = m.geometry->r3;
  pair.modes = u.modes;

  const std::size_t inner = unique_segment(disc, 0), core = unique_segment(disc, 1),
                    shell = unique_segment(disc, 2);
  int top = 0;
  for (const auto& md : u.modes) top = std::max(top, md.l);
  pair.annulus.resize(top + 1);
  parallel_for(top + 1, [&](std::size_t l) {
    pair.annulus[l] = fundamental_pair(*m.annulus_profile, int(l), pair.r2, pair.r3, m.dim);
  });

  const std::size_t n = u.modes.size();
  pair.v1.resize(n);
  pair.v2.resize(n);
  pair.v2_inner.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int l = u.modes[i].l;
    const auto [c, d] = u.segment_coefficients(i, shell);
    if (l >= 1) {
      // The Kelvin map at r2 carries the shell's growing solution onto the
      // annulus decaying one and vice versa, with matching normalization.
      pair.v1[i] = {d, c};
    } else {
      // Annulus monopole basis {1, G}: G(r2) = 0 and unit flux.
      const auto [val, flux] = u.radial(i, pair.r2, false);
      pair.v1[i] = {val, -flux};
    }
    pair.v2[i] = u.segment_coefficients(i, core);
    pair.v2_inner[i] = u.segment_coefficients(i, inner).first;
  }
  return pair;
}

namespace {

// (value, flux) of v2 inside B_{r2}: the innermost piece of u composed with the
// dilation r -> r r2^2 / r3^2. The flux p is unchanged by the dilation.
std::pair<cplx, cplx> v2_inside(const ReflectionPair& pair, std::size_t i, double r) {
  const double lambda = (pair.r3 * pair.r3) / (pair.r2 * pair.r2);
  const BasisValues v = pair.disc->basis(pair.modes[i].l, 0).eval(r / lambda);
  return {pair.v2_inner[i] * v.up, pair.v2_inner[i] * v.pp};
}

std::pair<cplx, cplx> hv_at(const ReflectionPair& pair, const SingularPart& part, std::size_t i,
                            double r) {
  return combine(*pair.annulus.at(pair.modes[i].l), part.hv[i], r);
}

}  // namespace

SingularPart remove_singularity(const ReflectionPair& pair, const Field& u) {
  if (u.disc != pair.disc || u.modes != pair.modes)
    throw ValidationError("reflection pair does not belong to this field");
  SingularPart part;
  part.modes = pair.modes;
  const std::size_t n = pair.modes.size();
  part.hv.resize(n);
  const int dim = u.dim();
  const double s2 = std::pow(pair.r2, dim - 1), s3 = std::pow(pair.r3, dim - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx diff = pair.v1[i].second - pair.v2[i].second;
    // Decaying part of v1 - v2; the monopole carries the opposite sign.
    part.hv[i] = {0.0, pair.modes[i].l == 0 ? -diff : diff};

    const auto [h3, q3] = hv_at(pair, part, i, pair.r3);
    part.value_jump_r3.push_back({pair.modes[i], h3});
    part.flux_jump_r3.push_back({pair.modes[i], q3 / s3});

    const auto [uo, po] = u.radial(i, pair.r2, true);
    const auto [h2, q2] = hv_at(pair, part, i, pair.r2);
    const auto [vi, pi] = v2_inside(pair, i, pair.r2);
    part.value_jump_r2.push_back({pair.modes[i], uo - h2 - vi});
    part.flux_jump_r2.push_back({pair.modes[i], (po - q2 - pi) / s2});
  }
  part.value_jump_norm_r2 = trace_norm(part.value_jump_r2, pair.r2, 0.5, dim);
  part.flux_jump_norm_r2 = trace_norm(part.flux_jump_r2, pair.r2, -0.5, dim);
  part.value_jump_norm_r3 = trace_norm(part.value_jump_r3, pair.r3, 0.5, dim);
  part.flux_jump_norm_r3 = trace_norm(part.flux_jump_r3, pair.r3, -0.5, dim);
  return part;
}

std::pair<cplx, cplx> glued_value(const ReflectionPair& pair, const SingularPart& part,
                                  const Field& u, std::size_t i, double r, bool outer_side) {
  if (r > pair.r3 || (r == pair.r3 && outer_side)) return u.radial(i, r, outer_side);
  if (r > pair.r2 || (r == pair.r2 && outer_side)) {
    const auto [uv, up] = u.radial(i, r, outer_side);
    const auto [hv, hp] = hv_at(pair, part, i, r);
    return {uv - hv, up - hp};
  }
  return v2_inside(pair, i, r);
}

double glued_source_residual(const ReflectionPair& pair, const SingularPart& part, const Field& u,
                             const ModeSpectrum& src) {
  const double rho = src.radius;
  if (!(rho > pair.r2 && rho < pair.r3)) return 0.0;
  const double sd = std::pow(rho, u.dim() - 1);
  double worst = 0;
  for (std::size_t i = 0; i < pair.modes.size(); ++i) {
    const auto [vo, po] = glued_value(pair, part, u, i, rho, true);
    const auto [vi, pi] = glued_value(pair, part, u, i, rho, false);
    const cplx jump = sd * src.coefficient(pair.modes[i]);
    const double vs = std::max({std::abs(vo), std::abs(vi), std::numeric_limits<double>::min()});
    const double ps = std::max({std::abs(po), std::abs(pi), std::abs(jump),
                                std::numeric_limits<double>::min()});
    worst = std::max({worst, std::abs(vo - vi) / vs, std::abs(po - pi - jump) / ps});
  }
  return worst;
}

AuxiliaryW build_W_delta(const std::vector<std::pair<ModeIndex, cplx>>& g, double r0, double r2,
                         double r3, double delta, int dim) {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  if (!(r2 > 0 && r2 < r3 && r0 > r2)) throw ValidationError("need 0 < r2 < r3 and r0 > r2");
  if (!(delta > 0)) throw ValidationError("delta must be positive");
  AuxiliaryW w;
  w.dim = dim;
  w.r0 = r0;
  w.r2 = r2;
  w.r3 = r3;
  w.delta = delta;
  w.g = g;
  const double sq = std::sqrt(delta);
  double energy = 0;
  for (const auto& [m, gl] : g) {
    const double xi = m.l >= 1 ? sq * std::pow(r3 / r0, m.l) : 0.0;
    const cplx c = gl / (1.0 + xi);
    w.xi.push_back(xi);
    w.damped.push_back({m, c});

    const PowerBasis basis(1.0, 0.0, m.l, dim, r2, r3);
    Eigen::Vector2cd x;
    if (m.l == 0) {
      x << 0.0, c;
      w.h.push_back({m, 0.0});
    } else {
      x << c * std::pow(r3 / r2, basis.m_plus), -c;
      w.h.push_back({m, xi / (1.0 + xi) * gl * (basis.m_plus - basis.m_minus) / r2});
    }
    const GramPair gp = basis.gram(r2, r3);
    const Eigen::Matrix2d G = gp.grad + gp.l2;
    energy += std::real(x.dot(G * x));
  }
  w.w_norm = std::sqrt(angular_weight(dim) * energy);
  w.h_norm = trace_norm(w.h, r2, -0.5, dim);
  if (!std::isfinite(w.w_norm) || !std::isfinite(w.h_norm))
    throw SolverError("auxiliary field norm overflowed");
  return w;
}

std::vector<std::pair<ModeIndex, cplx>> auxiliary_coefficients(const ModeSpectrum& src, double r2,
                                                               double r3) {
  src.validate();
  const double rho = src.radius;
  const int dim = src.dim;
  if (!(r2 < rho && rho < r3)) throw ValidationError("source must lie inside the annulus");
  auto G = [&](double r) { return dim == 2 ? std::log(r / r2) : 1.0 / r2 - 1.0 / r; };
  std::vector<std::pair<ModeIndex, cplx>> out;
  out.reserve(src.coefficients.size());
  for (const auto& [m, gl] : src.coefficients) {
    cplx A;
    if (m.l == 0) {
      A = gl * std::pow(rho, dim - 1) * (G(rho) - G(r3)) / G(r3);
    } else {
      const auto [mp, mm] = power_exponents(0.0, m.l, dim);
      const double s = rho / r2;
      const double p = std::pow(s, mm - mp);
      const double q = std::pow(rho / r3, mp - mm);
      const double denom = ((1.0 - p) * (mp * q - mm) / (q - 1.0) - (mp - mm * p)) / rho;
      A = gl * std::pow(s, -mp) / denom;
    }
    out.push_back({m, -A});
  }
  return out;
}

ModeBoundReport check_mode_bounds(const AuxiliaryW& w) {
  ModeBoundReport rep;
  const double R3 = w.r3 / w.r2, R0 = w.r0 / w.r2;
  const bool h_applies = R0 * R0 > R3;
  constexpr double slack = 1.0 + 1e-12;
  for (std::size_t i = 0; i < w.g.size(); ++i) {
    const int l = w.g[i].first.l;
    if (l == 0 || w.g[i].second == 0.0) continue;
    ++rep.modes;
    const double xi2 = w.xi[i] * w.xi[i];
    // Common factor l |g|^2 cancels in both ratios.
    const double rw = std::exp(std::log(w.delta) + 2.0 * l * std::log(R3 / R0)) / (1.0 + xi2);
    rep.worst_w_ratio = std::max(rep.worst_w_ratio, rw);
    if (rw > slack) ++rep.w_violations;
    if (h_applies) {
      const double rh = std::exp(2.0 * l * std::log(R3 / (R0 * R0))) / (1.0 + xi2);
      rep.worst_h_ratio = std::max(rep.worst_h_ratio, rh);
      if (rh > slack) ++rep.h_violations;
    }
  }
  return rep;
}

}  // namespace calr
