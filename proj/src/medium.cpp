#include "calr/medium.hpp"

#include <cmath>
#include <cstdio>

namespace calr {

void LayeredMedium::validate(double lambda_max) const {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  if (layers.empty()) throw ValidationError("medium has no layers");
  if (layers.front().inner != 0.0) throw ValidationError("first layer must start at the origin");
  if (layers.back().outer != omega_radius)
    throw ValidationError("last layer must end at the domain radius");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& L = layers[i];
    if (!(L.outer > L.inner)) throw ValidationError("layer radii must increase");
    if (i > 0 && layers[i - 1].outer != L.inner) throw ValidationError("layers must be contiguous");
    const double lo = L.inner > 0 ? L.inner : L.outer * 1e-6;
    const auto [amin, amax] = profile_range(L.profile, lo, L.outer);
    if (!(amin > 0) || !(amax < lambda_max) || amax / amin > lambda_max)
      throw ValidationError("layer " + std::to_string(i) + " profile is not uniformly elliptic");
  }
}

std::size_t LayeredMedium::layer_index(double r) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    if (r <= layers[i].outer) return i;
  throw DomainError("radius outside the domain");
}

std::complex<double> LayeredMedium::sign(std::size_t layer, double delta) const {
  return layers.at(layer).plasmonic ? shell_sign(delta) : std::complex<double>(1.0);
}

LayeredMedium LayeredMedium::with_layer_profile(std::size_t layer, RadialProfile p) const {
  LayeredMedium m = *this;
  m.layers.at(layer).profile = std::move(p);
  return m;
}

LayeredMedium LayeredMedium::with_positive_shell() const {
  LayeredMedium m = *this;
  for (auto& L : m.layers) L.plasmonic = false;
  return m;
}

std::string LayeredMedium::describe() const {
  std::string out = "dim=" + std::to_string(dim);
  char buf[96];
  std::snprintf(buf, sizeof buf, " omega=%.17g", omega_radius);
  out += buf;
  for (const auto& L : layers) {
    std::snprintf(buf, sizeof buf, "\n[%.17g,%.17g]%s ", L.inner, L.outer,
                  L.plasmonic ? " plasmonic" : "");
    out += buf + L.profile.description();
  }
  return out;
}

LayeredMedium build_doubly_complementary(const RadialProfile& a, double r2, double r3,
                                         double omega_radius, int dim) {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  if (!(r2 > 0 && r2 < r3 && r3 < omega_radius))
    throw ValidationError("need 0 < r2 < r3 < omega_radius");
  const auto [amin, amax] = profile_range(a, r2, r3);
  if (!(amin > 0) || !std::isfinite(amax))
    throw ValidationError("annulus profile is not uniformly elliptic");

  ComplementaryGeometry g{r2 * r2 / r3, r2, r3};
  const RadialProfile shell = pushforward_isotropic(a, RadialMap::kelvin(r2), dim);
  // (G o F)^{-1} is the dilation by r2^2 / r3^2.
  const RadialProfile core = pushforward_isotropic(a, RadialMap::dilation(r2 * r2 / (r3 * r3)), dim);

  LayeredMedium m;
  m.dim = dim;
  m.omega_radius = omega_radius;
  m.geometry = g;
  m.annulus_profile = a;
  const RadialProfile one = RadialProfile::constant(1.0);
  m.layers = {
      {0.0, g.inner_transition(), one, false},
      {g.inner_transition(), g.r1, core, false},
      {g.r1, r2, shell, true},
      {r2, r3, a, false},
      {r3, omega_radius, one, false},
  };
  m.validate();
  return m;
}

ComplementarityReport verify_complementarity(const LayeredMedium& m, int sample_count, double tol) {
  if (!m.geometry || m.layers.size() != 5)
    throw ValidationError("medium was not built as doubly complementary");
  const auto& g = *m.geometry;
  const RadialProfile& a = m.layers[3].profile;
  const RadialProfile& shell = m.layers[2].profile;
  const RadialProfile& core = m.layers[1].profile;
  const RadialMap F = RadialMap::kelvin(g.r2);
  const RadialMap GF = RadialMap::dilation(g.r3 * g.r3 / (g.r2 * g.r2));

  ComplementarityReport rep;
  rep.tolerance = tol;
  rep.samples = sample_count;
  for (int i = 0; i < sample_count; ++i) {
    const double r = sample_count == 1 ? g.r2 : g.r2 + (g.r3 - g.r2) * i / (sample_count - 1);
    const double target = a(r);
    const double f_a = pushforward_factor(F, r, m.dim) * shell(F.inverse(r));
    const double gf_a = pushforward_factor(GF, r, m.dim) * core(GF.inverse(r));
    rep.shell_error = std::max(rep.shell_error, std::abs(f_a - target));
    rep.core_error = std::max(rep.core_error, std::abs(gf_a - target));
  }
  return rep;
}

}  // namespace calr
