#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "calr/cloak.hpp"
#include "calr/errors.hpp"
#include "calr/io.hpp"
#include "calr/suites.hpp"

namespace {

using namespace calr;

constexpr int kOk = 0, kValidation = 1, kSolver = 2, kAssertion = 3;

// Summaries go to stdout when the numeric output went to a file.
std::ostream& summary_stream(const std::string& out) { return out.empty() ? std::cerr : std::cout; }

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

int cmd_solve(const std::string& config, double delta, int modes, const std::string& out) {
  RunConfig c = load_config(config);
  if (modes >= 0) {
    if (c.spectrum_kind == "geometric")
      c.source = ModeSpectrum::geometric(c.dimension, c.source.radius, c.spectrum_t,
                                         std::min(c.spectrum_max_mode, modes));
    c.cutoff = modes;
    c.source.cutoff = modes;
    c.source.validate();
  }
  if (!(delta > 0)) throw ValidationError("--delta must be positive");
  const LayeredMedium m = c.medium();
  const Field u = solve_field(m, c.source, delta, c.cutoff);
  json j = field_to_json(u);
  const Normalized nv = normalize(u);
  j["power"] = power(u);
  j["c_delta"] = nv.c_delta;
  emit(out, dump_json(j));
  summary_stream(out) << "power " << format_double(power(u)) << "\n";
  return kOk;
}

int cmd_sweep(const std::string& config, double start, double end, int points, const std::string& out,
              const std::string& plot) {
  RunConfig c = load_config(config);
  if (start > 0) c.sweep.delta_start = start;
  if (end > 0) c.sweep.delta_end = end;
  if (points > 0) c.sweep.points = points;
  const LayeredMedium m = c.medium();
  SweepOptions so;
  so.far_margin = c.sweep.far_margin;
  const Sweep sw = delta_sweep(m, c.source, c.sweep.deltas(), c.cutoff, so);
  emit(out, sweep_csv(sw.rows));
  if (!plot.empty()) write_file(plot, sweep_svg(sw.rows, "power vs delta"));
  const Verdict v = classify(sw.rows);
  char buf[160];
  std::snprintf(buf, sizeof buf, "verdict %s slope %.6g\n", to_string(v.cls).c_str(), v.slope);
  summary_stream(out) << buf;
  for (const SweepRow& r : sw.rows)
    if (!r.valid) summary_stream(out) << "row delta=" << format_double(r.delta) << " failed: " << r.error << "\n";
  return kOk;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_verify(const std::string& suites, std::uint64_t seed) {
  const std::vector<std::string> names = suites.empty() ? suite_names() : split(suites);
  for (const auto& n : names) {
    bool known = false;
    for (const auto& k : suite_names()) known = known || k == n;
    if (!known) throw ValidationError("unknown suite '" + n + "'");
  }
  bool ok = true;
  for (const auto& n : names) {
    for (const CheckResult& c : run_suite(n, seed)) {
      std::cout << format_check(c) << "\n";
      ok = ok && c.pass;
    }
  }
  std::cout << (ok ? "all checks passed" : "some checks failed") << "\n";
  return ok ? kOk : kAssertion;
}

int cmd_cloak(const std::string& config, const std::string& out) {
  const RunConfig c = load_config(config);
  const LayeredMedium m = c.medium();
  CloakDemoOptions opt;
  opt.deltas = c.sweep.deltas();
  opt.cutoff = c.cutoff;
  opt.sweep.far_margin = c.sweep.far_margin;
  opt.critical.cutoff = c.cutoff;
  opt.critical.deltas = opt.deltas;
  const CloakDemoReport rep = cloak_demo(m, c.source, opt);

  json j;
  j["predicted"] = to_string(rep.predicted);
  j["verdict"] = to_string(rep.verdict.cls);
  j["slope"] = rep.verdict.slope;
  j["maximal_extension_radius"] = rep.extension.max_radius;
  j["finite_band"] = rep.extension.finite_band;
  if (rep.critical.value > 0)
    j["critical_radius"] = {{"value", rep.critical.value},
                            {"lower", rep.critical.lower},
                            {"upper", rep.critical.upper},
                            {"exact", rep.critical.exact}};
  j["v_far_field_drop"] = rep.far_field.v_decay;
  j["v_decaying"] = rep.far_field.v_decaying;
  j["u_cauchy"] = rep.far_field.u_cauchy;
  j["source_visible"] = rep.source_visible;
  j["flagged"] = rep.flagged;
  j["asserted"] = rep.asserted;
  j["pass"] = rep.pass;
  j["notes"] = rep.notes;
  emit(out, dump_json(j));
  if (!out.empty()) {
    std::cout << "predicted " << to_string(rep.predicted) << ", verdict " << to_string(rep.verdict.cls)
              << (rep.asserted ? (rep.pass ? ", pass" : ", FAIL") : ", flagged") << "\n";
    write_file(out.substr(0, out.rfind('.')) + ".csv", sweep_csv(rep.sweep.rows));
  }
  return rep.asserted && !rep.pass ? kAssertion : kOk;
}

int cmd_extend(const std::string& config, double radius) {
  const RunConfig c = load_config(config);
  const LayeredMedium m = c.medium();
  const ExtendabilityReport r = extendability_test(c.source, m, radius > 0 ? radius : m.omega_radius);
  json j;
  j["target_radius"] = r.target_radius;
  j["finite_band"] = r.finite_band;
  j["divergent"] = r.divergent;
  j["indeterminate"] = r.indeterminate;
  j["log_ratio"] = r.log_ratio;
  j["max_radius"] = r.max_radius;
  std::cout << dump_json(j);
  return kOk;
}

int cmd_critical(const std::string& config, double source_radius, int iterations) {
  const RunConfig c = load_config(config);
  const LayeredMedium m = c.medium();
  CriticalOptions opt;
  if (source_radius > 0) opt.source_radius = source_radius;
  if (iterations > 0) opt.iterations = iterations;
  opt.cutoff = c.cutoff;
  opt.deltas = c.sweep.deltas();
  const CriticalRadius r = critical_radius(m, opt);
  json j;
  j["value"] = r.value;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["exact"] = r.exact;
  if (!r.warning.empty()) j["warning"] = r.warning;
  std::cout << dump_json(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anomalous localized resonance solver for radially layered plasmonic media"};
  app.require_subcommand(1);

  std::string config, out, plot, suites;
  double delta = 0, start = -1, end = -1, radius = -1, source_radius = -1;
  int modes = -1, points = -1, iterations = -1;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "Solve one loss value and dump the mode coefficients");
  solve->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  solve->add_option("--delta", delta, "Loss parameter")->required();
  solve->add_option("--modes", modes, "Highest mode order (overrides the config cutoff)");
  solve->add_option("--out", out, "Output JSON (stdout when omitted)");

  auto* sweep = app.add_subcommand("sweep", "Sweep the loss parameter and write the CSV table");
  sweep->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--delta-start", start, "Largest loss value");
  sweep->add_option("--delta-end", end, "Smallest loss value");
  sweep->add_option("--points", points, "Number of log-spaced loss values");
  sweep->add_option("--out", out, "Output CSV (stdout when omitted)");
  sweep->add_option("--plot", plot, "Optional SVG plot of the power curve");

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", suites, "Comma-separated: three-spheres,modes,rigidity,singularity");
  verify->add_option("--seed", seed, "Seed for random samples");

  auto* cloak = app.add_subcommand("cloak", "Predict and check cloaking for the configured source");
  cloak->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  cloak->add_option("--out", out, "Report JSON (stdout when omitted); the sweep goes next to it as CSV");

  auto* extend = app.add_subcommand("extend", "Zero-Cauchy-data extension test of the source");
  extend->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  extend->add_option("--radius", radius, "Target radius (default: domain radius)");

  auto* critical = app.add_subcommand("critical", "Critical radius of the configured medium");
  critical->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  critical->add_option("--source-radius", source_radius, "Probe source radius inside the annulus");
  critical->add_option("--iterations", iterations, "Bisection steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*solve) return cmd_solve(config, delta, modes, out);
    if (*sweep) return cmd_sweep(config, start, end, points, out, plot);
    if (*verify) return cmd_verify(suites, seed);
    if (*cloak) return cmd_cloak(config, out);
    if (*extend) return cmd_extend(config, radius);
    if (*critical) return cmd_critical(config, source_radius, iterations);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  }
  return kOk;
}
