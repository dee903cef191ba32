#pragma once

#include <Eigen/Core>
#include <memory>
#include <mutex>

#include "calr/profile.hpp"

namespace calr {

/// Values and radial fluxes p = a r^{d-1} u' of the two fundamental solutions.
struct BasisValues {
  double up = 0, pp = 0;  // growing solution
  double um = 0, pm = 0;  // decaying solution
};

/// Unweighted per-mode Gram matrices over [x, y]:
///   grad(i,j) = int r^{d-1} (phi_i' phi_j' + lambda phi_i phi_j / r^2) dr
///   l2(i,j)   = int r^{d-1} phi_i phi_j dr
struct GramPair {
  Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d l2 = Eigen::Matrix2d::Zero();
};

/// Fundamental pair of (a r^{d-1} u')' = a lambda r^{d-3} u, lambda = l(l+d-2), on [ra, rb].
///
/// Scaling: phi+ = 1 at rb and phi- = 1 at ra, so both stay <= 1 inside the
/// segment for l >= 1. For l = 0 the pair is {1, G} with G(ra) = 0 and unit
/// flux. When ra = 0 only phi+ is available (phi- reads as zero).
class RadialBasis {
 public:
  RadialBasis(RadialProfile a, int ell, int dim, double ra, double rb);
  virtual ~RadialBasis() = default;

  virtual BasisValues eval(double r) const = 0;
  virtual GramPair gram(double x, double y) const;
  /// gram(ra, rb), computed once.
  const GramPair& segment_gram() const;

  double lambda() const { return double(ell) * (ell + dim - 2); }

  RadialProfile profile;
  int ell, dim;
  double ra, rb;

 private:
  struct GramCache {
    std::once_flag once;
    GramPair value;
  };
  std::shared_ptr<GramCache> cache_ = std::make_shared<GramCache>();
};

using BasisPtr = std::shared_ptr<const RadialBasis>;

/// Closed form for a = C r^k: phi+- = (r/r_{b,a})^{m+-}, m^2 + (k+d-2) m - lambda = 0.
class PowerBasis : public RadialBasis {
 public:
  PowerBasis(double c, double k, int ell, int dim, double ra, double rb);
  BasisValues eval(double r) const override;
  GramPair gram(double x, double y) const override;
  double m_plus, m_minus;

 private:
  double c_, k_;
};

/// Tabulated solution of the Riccati form (ln u)' = q/(a r^{d-1}),
/// q' = a lambda r^{d-3} - q^2/(a r^{d-1}); phi+ integrated outward, phi- inward.
class NumericBasis : public RadialBasis {
 public:
  NumericBasis(RadialProfile a, int ell, int dim, double ra, double rb, int intervals = 4096,
               double tolerance = 1e-13);
  BasisValues eval(double r) const override;

  struct Table;

 private:
  std::shared_ptr<const Table> plus_, minus_;
};

/// Composition of a parent basis with one map step: u(rho) = u_parent(T^{-1} rho).
/// A Kelvin step swaps growing and decaying roles (for l >= 1) and negates the flux.
class MappedBasis : public RadialBasis {
 public:
  MappedBasis(BasisPtr parent, MapStep step, RadialProfile a, double ra, double rb);
  BasisValues eval(double r) const override;

 private:
  BasisPtr parent_;
  MapStep step_;
};

/// Builds the basis suited to `a`: closed form for power laws, mapped for
/// push-forwards of a non-power profile, tabulated otherwise.
BasisPtr fundamental_pair(const RadialProfile& a, int ell, double ra, double rb, int dim);

/// Exponents (m+, m-) for a = C r^k.
std::pair<double, double> power_exponents(double k, int ell, int dim);

}  // namespace calr
