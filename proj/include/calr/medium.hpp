#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "calr/profile.hpp"

namespace calr {

struct Layer {
  double inner;
  double outer;
  RadialProfile profile;
  bool plasmonic = false;  // carries the -1 + i delta sign
};

/// Radii of a doubly complementary construction: r1 = r2^2 / r3.
struct ComplementaryGeometry {
  double r1, r2, r3;
  double inner_transition() const { return r1 * r1 / r2; }
};

struct LayeredMedium {
  int dim = 2;
  double omega_radius = 1.0;
  std::vector<Layer> layers;  // contiguous, first starts at 0, last ends at omega_radius
  std::optional<ComplementaryGeometry> geometry;
  std::optional<RadialProfile> annulus_profile;

  /// Checks contiguity, ellipticity and dimension; throws ValidationError.
  void validate(double lambda_max = 1e8) const;

  std::size_t layer_index(double r) const;
  std::complex<double> sign(std::size_t layer, double delta) const;

  LayeredMedium with_layer_profile(std::size_t layer, RadialProfile p) const;
  /// Copy with every plasmonic flag cleared (all-positive sanity medium).
  LayeredMedium with_positive_shell() const;
  /// Deterministic text description used for serialization identity checks.
  std::string describe() const;
};

/// Shell sign s_delta = -1 + i delta.
inline std::complex<double> shell_sign(double delta) { return {-1.0, delta}; }

LayeredMedium build_doubly_complementary(const RadialProfile& a, double r2, double r3,
                                         double omega_radius, int dim);

struct ComplementarityReport {
  double shell_error = 0;  // max |F_* A - a| on [r2, r3]
  double core_error = 0;   // max |G_* F_* A - a| on [r2, r3]
  double tolerance = 0;
  int samples = 0;
  bool pass() const { return shell_error <= tolerance && core_error <= tolerance; }
};

ComplementarityReport verify_complementarity(const LayeredMedium& m, int sample_count,
                                             double tol);

}  // namespace calr
