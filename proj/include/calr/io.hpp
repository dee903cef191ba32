#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "calr/resonance.hpp"
#include "json.hpp"

namespace calr {

using json = nlohmann::ordered_json;

struct SweepConfig {
  double delta_start = 1e-2;
  double delta_end = 1e-10;
  int points = 17;
  double far_margin = 0.1;

  std::vector<double> deltas() const { return log_deltas(delta_start, delta_end, points); }
};

struct RunConfig {
  int dimension = 2;
  double omega_radius = 8.0;
  double r2 = 1.0, r3 = 4.0;
  std::string profile_kind = "constant";  // constant | expr
  double profile_constant = 1.0;
  std::string profile_expr;
  ModeSpectrum source;
  std::string spectrum_kind = "geometric";  // geometric | explicit
  double spectrum_t = 0;
  int spectrum_max_mode = 0;
  SweepConfig sweep;
  int cutoff = 200;

  RadialProfile profile() const;
  /// Doubly complementary cloak of the config, checked.
  LayeredMedium medium() const;
};

/// Throws ValidationError on a missing or ill-typed field.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json to_json(const RunConfig& c);

/// %.17g; non-finite values print as nan / inf / -inf.
std::string format_double(double x);

/// Compact JSON with every floating-point number printed by format_double.
std::string dump_json(const json& j, int indent = 2);

inline constexpr const char* kSweepHeader = "delta,power,shell_energy,u_farfield_h1,v_farfield_h1,c_delta";
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Per-mode, per-segment coefficients with the segment radii and the medium description.
json field_to_json(const Field& f);

/// Log-log SVG of the power curve.
std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& title);

/// Throws ValidationError when the file cannot be written.
void write_file(const std::string& path, const std::string& text);

}  // namespace calr
