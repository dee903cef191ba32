#pragma once

#include <string>
#include <vector>

#include "calr/resonance.hpp"

namespace calr {

/// Doubly complementary cloak around the annulus (r2, r3); depends only on
/// (a, r2, r3, R_Omega, d). Throws ValidationError if the complementarity check
/// fails at 1e-10.
LayeredMedium build_cloak(const RadialProfile& a, double r2, double r3, double omega_radius, int dim);

struct CloakDemoOptions {
  std::vector<double> deltas = log_deltas(1e-2, 1e-10, 17);
  int cutoff = 200;
  double decay_factor = 10.0;  // required first / last drop of the normalized far field
  double settle_tolerance = 1e-3;  // last far-field increment of u relative to its norm
  SweepOptions sweep;
  ClassifyPolicy policy;
  FarFieldPolicy far_policy;
  CriticalOptions critical;    // used only when the annulus profile is not a = 1
};

struct CloakDemoReport {
  ExtendabilityReport extension;
  CriticalRadius critical;
  VerdictClass predicted = VerdictClass::Indeterminate;  // from max extension radius vs r_*
  Sweep sweep;
  Verdict verdict;
  FarFieldVerdict far_field;
  bool source_visible = false;  // u far field settled to a nonzero limit
  bool flagged = false;   // Indeterminate verdict or source inside the threshold band
  bool asserted = false;  // a verdict was asserted (not flagged)
  bool pass = false;      // asserted and the verdict pair holds
  std::vector<std::string> notes;
};

/// Runs the sweep for a circle/sphere source and checks the verdict pair:
/// BlowUp with >= decay_factor drop of the normalized far field, or Bounded
/// with the far field of u settled to a nonzero limit.
CloakDemoReport cloak_demo(const LayeredMedium& cloak, const ModeSpectrum& src,
                           const CloakDemoOptions& opt = {});

}  // namespace calr
