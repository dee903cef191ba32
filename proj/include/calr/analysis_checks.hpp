#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "calr/spectral_solver.hpp"

namespace calr {

using ModeTable = std::vector<std::pair<ModeIndex, cplx>>;

// ---------------------------------------------------------------- three spheres

struct ThreeSpheresReport {
  double R1 = 0, R2 = 0, R3 = 0;
  double alpha = 0;           // ln(R3/R2) / ln(R3/R1)
  double n1 = 0, n2 = 0, n3 = 0;  // circle L2 norms divided by R^{(d-1)/2}
  double ratio = 0;           // n2 / (n1^alpha n3^{1-alpha})
  double tolerance = 0;
  bool pass = false;          // ratio <= 1 + tolerance
};

/// v = sum c_m r^l Y_m, harmonic in B_{R3}.
ThreeSpheresReport three_spheres_check(const ModeTable& v, int dim, double R1, double R2, double R3,
                                       double tolerance = 1e-10);

// ---------------------------------------------------------------- plasmon pairs

/// Medium a1: identity in B_{R1}, a on (R1, R2), its Kelvin push-forward at R2
/// on (R2, R3) with R3 = R2^2 / R1. The domain radius is R3.
LayeredMedium plasmon_medium(const RadialProfile& a, double R1, double R2, int dim);

/// Radial parts of v_l (regular in B_{R3}, v_l(R3) = 1) and of w_l = v_l o K
/// on (R1, R2). For l = 0, v_0 = 1 and w_0 solves the Dirichlet problem with
/// w_0(R2) = 1, w_0(R1) = 0.
struct PlasmonPair {
  int ell = 0;
  int dim = 2;
  double R1 = 0, R2 = 0, R3 = 0;
  std::shared_ptr<const Discretization> disc;  // of plasmon_medium, no source
  Eigen::VectorXcd v;                          // layout of Discretization::column
  BasisPtr inner;                              // basis of a on [R1, R2]
  std::pair<cplx, cplx> w;                     // (growing, decaying) on `inner`

  /// (value, flux p = a r^{d-1} d/dr).
  std::pair<cplx, cplx> v_at(double r, bool outer_side = false) const;
  std::pair<cplx, cplx> w_at(double r) const;
};

/// Pairs for l = 0..max_order sharing one discretization.
std::vector<PlasmonPair> plasmon_pairs(const RadialProfile& a, double R1, double R2, int dim,
                                       int max_order);
PlasmonPair plasmon_pair(const RadialProfile& a, double R1, double R2, int dim, int ell);

struct ReflectionIdentity {
  double trace = 0;  // |w - v| / max(|w|, |v|) at R2
  double flux = 0;   // |p_w + p_v| / max(|p_w|, |p_v|) at R2
};

/// Only meaningful for l >= 1.
ReflectionIdentity reflection_identity(const PlasmonPair& p);

// ---------------------------------------------------------------- density

enum class DensityFamily {
  Difference,  // traces on |x| = R1 of {v_0 - w_0} and {v_l - w_l}
  Flux,        // flux densities on |x| = R1 of {1} and {v_l + w_l}, H^{-1/2}
  Joint,       // traces on |x| = R1 and |x| = R2 of {v_l, w_l}
};

std::string to_string(DensityFamily f);
DensityFamily parse_density_family(const std::string& s);

struct DensityTarget {
  ModeTable inner;  // data on |x| = R1
  ModeTable outer;  // data on |x| = R2 (Joint only)
};

struct DensityResult {
  DensityFamily family = DensityFamily::Difference;
  int m = 0;                 // highest order used
  std::size_t elements = 0;
  double target_norm = 0;
  double residual = 0;       // absolute, in the family's trace norm
  double condition = 0;      // of the Gram matrix
  bool regularized = false;  // Tikhonov fallback was used
  double relative() const { return target_norm > 0 ? residual / target_norm : residual; }
};

/// Least-squares projection of the target onto the family restricted to
/// orders <= m. `pairs` must cover orders 0..m.
DensityResult density_residual(const std::vector<PlasmonPair>& pairs, const DensityTarget& target,
                               DensityFamily family, int m);

// ---------------------------------------------------------------- rigidity

struct RigidityRow {
  int ell = 0;
  double det_trace = 0;  // (w - v)(R1), normalized; v - w + c = 0 has only the trivial solution
  double det_flux = 0;   // -(p_v + p_w)(R1), normalized; flux condition of v + w
  bool degenerate = false;
};

struct RigidityReport {
  std::vector<RigidityRow> rows;
  double monopole_flux = 0;  // quadrature of the l = 0 flux of v + w through |x| = R1
  double threshold = 1e-12;
  std::vector<int> degenerate_orders;
  bool pass() const { return degenerate_orders.empty() && std::abs(monopole_flux) <= 1e-10; }
};

using PairProvider = std::function<PlasmonPair(int ell)>;

RigidityReport rigidity_check(const RadialProfile& a, double R1, double R2, int dim, int max_order);
/// Same, with the pairs supplied by `provider` (l = 1..max_order).
RigidityReport rigidity_check(const PairProvider& provider, int max_order, double threshold = 1e-12);

}  // namespace calr
