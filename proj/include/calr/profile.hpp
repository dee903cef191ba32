#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "calr/errors.hpp"

namespace calr {

/// Point inversion x -> R^2 x / |x|^2.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1> kelvin_map(
    const Eigen::MatrixBase<Derived>& x, double R) {
  const auto n2 = x.squaredNorm();
  if (!(n2 > 0)) throw DomainError("kelvin_map: point at the origin");
  return (R * R / n2) * x;
}

/// One elementary radial map.
struct MapStep {
  enum class Kind { Kelvin, Dilation };
  Kind kind;
  double param;  // Kelvin radius or dilation factor

  double forward(double r) const { return kind == Kind::Kelvin ? param * param / r : param * r; }
  double inverse(double r) const { return kind == Kind::Kelvin ? param * param / r : r / param; }
};

/// Composition of radial maps; steps[0] is applied first.
class RadialMap {
 public:
  RadialMap() = default;
  static RadialMap kelvin(double R);
  static RadialMap dilation(double lambda);

  /// Returns other o this (this applied first).
  RadialMap then(const RadialMap& other) const;
  RadialMap inverse() const;

  double forward(double r) const;
  double inverse(double rho) const;
  /// True when the map reverses radial orientation (odd number of inversions).
  bool reverses() const;
  bool identity() const { return steps_.empty(); }
  const std::vector<MapStep>& steps() const { return steps_; }
  std::string description() const;

 private:
  std::vector<MapStep> steps_;
};

/// Isotropic radial coefficient a(r) > 0.
///
/// A profile is either a power law C r^k, an arbitrary function, or the
/// push-forward of a root profile under a radial map in a fixed dimension.
/// Power laws are closed under push-forward and stay closed form.
class RadialProfile {
 public:
  static RadialProfile constant(double c);
  static RadialProfile power(double c, double k);
  static RadialProfile function(std::function<double(double)> f, std::string description);
  static RadialProfile expression(const std::string& text);

  double operator()(double r) const;

  /// (C, k) when the profile is C r^k.
  std::optional<std::pair<double, double>> power_law() const;
  bool is_constant() const;

  /// Non-power profiles: the profile that was pushed forward and the map used.
  /// For root profiles returns *this and the identity map.
  RadialProfile root() const;
  const RadialMap& map() const;
  int map_dimension() const;
  /// Stable identity shared by copies; used for basis caching.
  const void* id() const { return impl_.get(); }

  std::string description() const;

  /// Returns a copy with `delta` added to every value.
  RadialProfile shifted(double delta) const;

  struct Impl;

 private:
  explicit RadialProfile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;

  friend RadialProfile pushforward_isotropic(const RadialProfile&, const RadialMap&, int);
};

/// Radial profile of T_*(a I):
///   Kelvin(R):    (R^2/rho^2)^{d-2} a(R^2/rho)
///   Dilation(l):  l^{2-d} a(rho/l)
RadialProfile pushforward_isotropic(const RadialProfile& a, const RadialMap& map, int dim);

/// Multiplicative Jacobian factor of the push-forward at image radius rho.
double pushforward_factor(const RadialMap& map, double rho, int dim);

/// Smallest and largest sampled value on [ra, rb].
std::pair<double, double> profile_range(const RadialProfile& a, double ra, double rb,
                                        int samples = 257);

}  // namespace calr
