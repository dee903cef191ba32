#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "calr/analysis_checks.hpp"
#include "calr/resonance.hpp"

namespace calr {

/// One line of a verification table.
struct CheckResult {
  std::string suite;
  std::string name;
  double value = 0;
  std::string relation;  // "<=", ">=", "in"
  double limit = 0;
  double limit_hi = 0;   // upper end for "in"
  bool pass = false;
};

CheckResult check_le(std::string suite, std::string name, double value, double limit);
CheckResult check_ge(std::string suite, std::string name, double value, double limit);
CheckResult check_in(std::string suite, std::string name, double value, double lo, double hi);
std::string format_check(const CheckResult& c);

/// a = 1, r2 = 1, r3 = 4, R = 8 in 2D.
LayeredMedium reference_cloak();

// ---------------------------------------------------------------- three spheres

struct ThreeSpheresSummary {
  double worst_equality = 0;      // max |ratio - 1| over r^l cos(l theta), l = 1..max_order
  double worst_random_ratio = 0;  // max ratio over random harmonics
};

ThreeSpheresSummary three_spheres_family(int max_order, int random_trials, int random_modes,
                                         std::uint64_t seed, double R1 = 1, double R2 = 2,
                                         double R3 = 4);

// ---------------------------------------------------------------- auxiliary field

struct WSlopes {
  double extension_radius = 0;
  double w_slope = 0;  // d log ||W_delta||_{H1} / d log delta
  double h_slope = 0;  // d log ||h_delta||_{H^{-1/2}} / d log delta
  bool bounds = true;  // per-mode bounds at every delta
};

WSlopes w_delta_slopes(const LayeredMedium& cloak, double source_radius, double t, int cutoff,
                       const std::vector<double>& deltas);

// ---------------------------------------------------------------- jumps

struct JumpRow {
  double delta = 0;
  double value_r2 = 0, flux_r2 = 0, value_r3 = 0, flux_r3 = 0;
  double source_residual = 0;
  double reflection_residual = 0;  // Cauchy data of v1 against the field at r2
};

/// Jumps of the glued field built from the normalized field v = c_delta u.
std::vector<JumpRow> jump_diagnostics(const LayeredMedium& cloak, double source_radius, double t,
                                      int cutoff, const std::vector<double>& deltas);

// ---------------------------------------------------------------- plasmon pairs

struct PlasmonSummary {
  double trace_identity = 0;  // worst over l = 1..max_order
  double flux_identity = 0;
  double density_difference = 0;  // worst relative residual at m = max_order
  double density_flux = 0;
  double density_joint = 0;
  bool density_monotone = true;
  double min_determinant = 0;
  double monopole_flux = 0;
  bool rigidity = false;
};

PlasmonSummary plasmon_summary(const RadialProfile& a, int dim, int max_order, int targets,
                               std::uint64_t seed, double R1 = 1, double R2 = 2);

// ---------------------------------------------------------------- suites

std::vector<std::string> suite_names();
/// Throws ValidationError for an unknown suite name.
std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed = 1);

}  // namespace calr
