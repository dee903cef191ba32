#pragma once

#include <string>
#include <vector>

#include "calr/spectral_solver.hpp"

namespace calr {

/// E_delta = delta * int_shell |grad u|^2.
double power(const Field& f);
double shell_energy(const Field& f);

struct Normalized {
  double c_delta;
  Field v;
};
/// c = (delta^{1/2} * shell gradient energy)^{-1/2}, v = c u.
Normalized normalize(const Field& u);
Normalized normalize(std::shared_ptr<const Discretization> disc, const ModeSpectrum& src, double delta);

struct SweepRow {
  double delta = 0;
  double power = 0;
  double shell_energy = 0;
  double u_farfield_h1 = 0;
  double v_farfield_h1 = 0;
  double c_delta = 0;
  double u_h1 = 0;            // H1 norm of u over the whole domain
  double u_increment = -1;    // far-field H1 norm of u(delta_k) - u(delta_{k-1}); -1 for the first row
  bool valid = true;
  std::string error;
};

struct SweepOptions {
  double far_margin = 0.1;  // far field is (r3 (1 + margin), R_Omega)
  bool keep_fields = false;
};

struct Sweep {
  std::vector<SweepRow> rows;
  std::vector<Field> fields;  // filled when keep_fields
};

/// delta values 10^{start}..10^{end} log-spaced, descending.
std::vector<double> log_deltas(double first, double last, int points);

Sweep delta_sweep(std::shared_ptr<const Discretization> disc, const ModeSpectrum& src,
                  const std::vector<double>& deltas, const SweepOptions& opt = {});
Sweep delta_sweep(const LayeredMedium& m, const ModeSpectrum& src, const std::vector<double>& deltas,
                  int cutoff, const SweepOptions& opt = {});

enum class VerdictClass { BlowUp, Bounded, Indeterminate };
std::string to_string(VerdictClass v);

struct ClassifyPolicy {
  double blowup_slope = -0.1;      // BlowUp needs slope <= this and a monotone tail
  double bounded_slope = 0.05;     // plateau: |slope| <= this
  double bounded_variation = 0.10; // and relative variation of E on the tail
  double decay_slope = 0.1;        // decaying power: slope >= this and non-increasing tail
  bool decaying_is_bounded = true;
  int min_rows = 5;
  double min_decades = 4.0;
};

struct Verdict {
  VerdictClass cls = VerdictClass::Indeterminate;
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  double variation = 0;
  bool monotone_tail = false;
  std::vector<SweepRow> rows;  // the fitted tail
  std::string note;
};

/// Least-squares slope of log E vs log delta over the smaller-delta half of the rows.
Verdict classify(const std::vector<SweepRow>& rows, const ClassifyPolicy& policy = {});

struct FarFieldPolicy {
  double jitter = 0.05;       // v may rise by at most this fraction between tail rows
  double cauchy_ratio = 0.5;  // successive u increments shrink at least this fast
};

/// Far-field behaviour along a sweep tail. Both properties can hold at once
/// (v also decays in the bounded regime when c_delta -> 0), so each power
/// verdict is paired with its own property.
struct FarFieldVerdict {
  bool v_decaying = false;  // v far field non-increasing (within jitter) and smaller at the end
  bool u_cauchy = false;    // u far-field increments contract by cauchy_ratio
  double v_decay = 0;       // first / last v far-field norm over the whole sweep
  double worst_cauchy_ratio = 0;
};

FarFieldVerdict far_field_verdict(const std::vector<SweepRow>& rows, const FarFieldPolicy& policy = {});

/// BlowUp pairs with a decaying v far field, Bounded with a Cauchy u far field.
/// Indeterminate verdicts are always consistent.
bool far_field_consistent(const Verdict& power_verdict, const FarFieldVerdict& far);

struct ExtendabilityReport {
  double target_radius = 0;
  std::vector<int> orders;
  std::vector<double> log_mode_energy;  // ln of per-order H1(B_R \ B_r2) energy of the extension
  std::vector<double> partial_sums;     // cumulative energy (may be +inf)
  bool finite_band = false;
  bool divergent = false;
  bool indeterminate = false;
  double log_ratio = 0;                 // fitted d ln E / d l
  double max_radius = 0;                // estimated maximal extension radius
};

/// Extension of the source field with zero Cauchy data on r = r2 up to radius R.
ExtendabilityReport extendability_test(const ModeSpectrum& src, const LayeredMedium& m, double R);

struct CriticalRadius {
  double value = 0;  // radius where the fitted power slope changes sign
  double lower = 0, upper = 0;  // radii where BlowUp / Bounded verdicts start
  bool exact = false;
  std::string warning;
};

struct CriticalOptions {
  double source_radius = 1.5;
  int cutoff = 200;
  std::vector<double> deltas = log_deltas(1e-2, 1e-10, 17);
  int iterations = 12;
};

/// sqrt(r2 r3) when the annulus coefficient is identically 1; otherwise a
/// bracket from bisection on t for sources g_l = t^l classified by sweeps.
CriticalRadius critical_radius(const LayeredMedium& m, const CriticalOptions& opt = {});

}  // namespace calr
