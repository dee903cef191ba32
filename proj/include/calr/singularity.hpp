#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "calr/spectral_solver.hpp"

namespace calr {

/// Reflections of a field across the shell of a doubly complementary medium.
/// v1 = u o F^{-1} and v2 = v1 o G^{-1}, both written per mode on the
/// annulus basis over [r2, r3] (growing, decaying).
struct ReflectionPair {
  std::shared_ptr<const Discretization> disc;
  double r1 = 0, r2 = 0, r3 = 0;
  std::vector<ModeIndex> modes;
  std::vector<BasisPtr> annulus;  // indexed by l
  std::vector<std::pair<cplx, cplx>> v1, v2;
  /// v2 inside B_{r2}: the innermost coefficient of u carried by the dilation.
  std::vector<cplx> v2_inner;

  /// (value, flux p = a r^{d-1} d/dr) of v1 / v2 for mode i at r in [r2, r3].
  std::pair<cplx, cplx> v1_at(std::size_t i, double r) const;
  std::pair<cplx, cplx> v2_at(std::size_t i, double r) const;
};

/// Requires a doubly complementary medium and a source outside B_{r2}.
ReflectionPair reflect(const Field& u);

/// Resonant part hv of the field in (r2, r3) and the jumps of the glued field
/// V = {u outside B_{r3}; u - hv in (r2, r3); v2 inside B_{r2}}.
struct SingularPart {
  std::vector<ModeIndex> modes;
  std::vector<std::pair<cplx, cplx>> hv;  // on the annulus basis
  /// Per-mode jumps (outer minus inner): value and normal flux density.
  std::vector<std::pair<ModeIndex, cplx>> value_jump_r2, flux_jump_r2, value_jump_r3, flux_jump_r3;
  double value_jump_norm_r2 = 0, flux_jump_norm_r2 = 0;  // H^{1/2}, H^{-1/2}
  double value_jump_norm_r3 = 0, flux_jump_norm_r3 = 0;
};

SingularPart remove_singularity(const ReflectionPair& pair, const Field& u);

/// (value, flux) of the glued field V for mode i at r; `outer_side` picks the
/// limit from outside at an interface.
std::pair<cplx, cplx> glued_value(const ReflectionPair& pair, const SingularPart& part,
                                  const Field& u, std::size_t i, double r, bool outer_side = false);

/// Largest relative defect of V at the source radius: value continuity and
/// the prescribed flux jump. Zero when the source lies outside (r2, r3).
double glued_source_residual(const ReflectionPair& pair, const SingularPart& part, const Field& u,
                             const ModeSpectrum& src);

/// Damped auxiliary field on (r2, r3):
///   W_delta = sum g_l / (1 + xi_l) psi_l,  psi_l = (r/r2)^{m+} - (r/r2)^{m-},
/// with xi_l = delta^{1/2} (r3/r0)^l for l >= 1 and the monopole undamped
/// (psi_0 = G with G(r2) = 0 and unit flux).
struct AuxiliaryW {
  int dim = 2;
  double r0 = 0, r2 = 0, r3 = 0, delta = 0;
  std::vector<std::pair<ModeIndex, cplx>> g;        // undamped coefficients
  std::vector<std::pair<ModeIndex, cplx>> damped;   // g / (1 + xi)
  std::vector<double> xi;                           // per entry of g
  std::vector<std::pair<ModeIndex, cplx>> h;        // d/dr (W - W_delta) at r2
  double w_norm = 0;  // ||W_delta||_{H^1(r2 < |x| < r3)}
  double h_norm = 0;  // ||h_delta||_{H^{-1/2}(|x| = r2)}
};

AuxiliaryW build_W_delta(const std::vector<std::pair<ModeIndex, cplx>>& g, double r0, double r2,
                         double r3, double delta, int dim);

/// Coefficients g of W = w - phi on (r2, r0), where phi solves the annulus
/// Dirichlet problem with the source and w is the zero-Cauchy-data extension
/// (w = 0 below the source radius). Homogeneous annulus a = 1.
std::vector<std::pair<ModeIndex, cplx>> auxiliary_coefficients(const ModeSpectrum& src, double r2,
                                                               double r3);

/// Per-mode bounds on the damped field and on h_delta:
///   l|g|^2 r3^{2l} / (1 + xi^2) <= l|g|^2 r0^{2l} / delta,
///   l xi^2 |g|^2 / (1 + xi^2)   <= delta l |g|^2 r0^{2l}   (needs r0^2 > r2 r3),
/// with radii measured in units of r2.
struct ModeBoundReport {
  std::size_t modes = 0;
  std::size_t w_violations = 0, h_violations = 0;
  double worst_w_ratio = 0, worst_h_ratio = 0;  // lhs / rhs
  bool pass() const { return w_violations == 0 && h_violations == 0; }
};

ModeBoundReport check_mode_bounds(const AuxiliaryW& w);

}  // namespace calr
