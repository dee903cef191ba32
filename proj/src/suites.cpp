#include "calr/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "calr/errors.hpp"
#include "calr/singularity.hpp"

namespace calr {

namespace {

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::vector<int> orders_k(int dim, int l) {
  if (l == 0) return {0};
  if (dim == 2) return {-1, 1};
  return {0};
}

}  // namespace

CheckResult check_le(std::string suite, std::string name, double value, double limit) {
  return {std::move(suite), std::move(name), value, "<=", limit, 0, value <= limit};
}

CheckResult check_ge(std::string suite, std::string name, double value, double limit) {
  return {std::move(suite), std::move(name), value, ">=", limit, 0, value >= limit};
}

CheckResult check_in(std::string suite, std::string name, double value, double lo, double hi) {
  return {std::move(suite), std::move(name), value, "in", lo, hi, lo <= value && value <= hi};
}

std::string format_check(const CheckResult& c) {
  char buf[320];
  if (c.relation == "in")
    std::snprintf(buf, sizeof buf, "%-4s %-14s %-44s %.6g in [%.6g, %.6g]", c.pass ? "PASS" : "FAIL",
                  c.suite.c_str(), c.name.c_str(), c.value, c.limit, c.limit_hi);
  else
    std::snprintf(buf, sizeof buf, "%-4s %-14s %-44s %.6g %s %.6g", c.pass ? "PASS" : "FAIL",
                  c.suite.c_str(), c.name.c_str(), c.value, c.relation.c_str(), c.limit);
  return buf;
}

LayeredMedium reference_cloak() {
  return build_doubly_complementary(RadialProfile::constant(1.0), 1.0, 4.0, 8.0, 2);
}

ThreeSpheresSummary three_spheres_family(int max_order, int random_trials, int random_modes,
                                         std::uint64_t seed, double R1, double R2, double R3) {
  ThreeSpheresSummary s;
  for (int l = 1; l <= max_order; ++l) {
    // r^l cos(l theta) = (r^l e^{i l theta} + r^l e^{-i l theta}) / 2
    const ModeTable v{{{l, -1}, 0.5}, {{l, 1}, 0.5}};
    const auto rep = three_spheres_check(v, 2, R1, R2, R3);
    s.worst_equality = std::max(s.worst_equality, std::abs(rep.ratio - 1.0));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> order(0, 40);
  std::normal_distribution<double> normal;
  for (int t = 0; t < random_trials; ++t) {
    const int dim = t % 2 == 0 ? 2 : 3;
    ModeTable v;
    while (int(v.size()) < random_modes) {
      const int l = order(rng);
      int k = 0;
      if (dim == 2 && l > 0) k = rng() % 2 ? 1 : -1;
      if (dim == 3) k = int(rng() % (2 * l + 1)) - l;
      const ModeIndex m{l, k};
      if (std::any_of(v.begin(), v.end(), [&](const auto& e) { return e.first == m; })) continue;
      v.push_back({m, cplx(normal(rng), normal(rng))});
    }
    const auto rep = three_spheres_check(v, dim, R1, R2, R3);
    s.worst_random_ratio = std::max(s.worst_random_ratio, rep.ratio);
  }
  return s;
}

WSlopes w_delta_slopes(const LayeredMedium& cloak, double source_radius, double t, int cutoff,
                       const std::vector<double>& deltas) {
  if (!cloak.geometry) throw ValidationError("auxiliary field needs a doubly complementary medium");
  const auto& g = *cloak.geometry;
  const ModeSpectrum src = ModeSpectrum::geometric(cloak.dim, source_radius, t, cutoff);
  WSlopes out;
  out.extension_radius = extendability_test(src, cloak, cloak.omega_radius).max_radius;
  const auto coeff = auxiliary_coefficients(src, g.r2, g.r3);
  std::vector<double> x, yw, yh;
  for (double d : deltas) {
    const AuxiliaryW w = build_W_delta(coeff, out.extension_radius, g.r2, g.r3, d, cloak.dim);
    x.push_back(std::log(d));
    yw.push_back(std::log(w.w_norm));
    yh.push_back(std::log(w.h_norm));
    out.bounds = out.bounds && check_mode_bounds(w).pass();
  }
  out.w_slope = fitted_slope(x, yw);
  out.h_slope = fitted_slope(x, yh);
  return out;
}

std::vector<JumpRow> jump_diagnostics(const LayeredMedium& cloak, double source_radius, double t,
                                      int cutoff, const std::vector<double>& deltas) {
  const ModeSpectrum src = ModeSpectrum::geometric(cloak.dim, source_radius, t, cutoff);
  const auto disc = std::make_shared<const Discretization>(cloak, source_radius, cutoff);
  std::vector<JumpRow> rows;
  for (double d : deltas) {
    const Normalized nv = normalize(solve_field(disc, src, d));
    const ReflectionPair pair = reflect(nv.v);
    const SingularPart part = remove_singularity(pair, nv.v);
    JumpRow row;
    row.delta = d;
    row.value_r2 = part.value_jump_norm_r2;
    row.flux_r2 = part.flux_jump_norm_r2;
    row.value_r3 = part.value_jump_norm_r3;
    row.flux_r3 = part.flux_jump_norm_r3;
    row.source_residual = glued_source_residual(pair, part, nv.v, src.scaled(nv.c_delta));
    for (std::size_t i = 0; i < pair.modes.size(); ++i) {
      const auto [a, b] = pair.v1_at(i, pair.r2);
      const auto [c, e] = nv.v.radial(i, pair.r2, false);
      const double sv = std::max(std::abs(c), 1e-300), sp = std::max(std::abs(e), 1e-300);
      row.reflection_residual = std::max({row.reflection_residual, std::abs(a - c) / sv, std::abs(b + e) / sp});
    }
    rows.push_back(row);
  }
  return rows;
}

PlasmonSummary plasmon_summary(const RadialProfile& a, int dim, int max_order, int targets,
                               std::uint64_t seed, double R1, double R2) {
  PlasmonSummary s;
  const auto pairs = plasmon_pairs(a, R1, R2, dim, max_order);
  for (int l = 1; l <= max_order; ++l) {
    const ReflectionIdentity id = reflection_identity(pairs[l]);
    s.trace_identity = std::max(s.trace_identity, id.trace);
    s.flux_identity = std::max(s.flux_identity, id.flux);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int target_order = max_order + max_order / 2;
  for (int t = 0; t < targets; ++t) {
    DensityTarget tg;
    for (int l = 0; l <= target_order; ++l)
      for (int k : orders_k(dim, l))
        tg.inner.push_back({{l, k}, cplx(normal(rng), normal(rng)) * std::exp(-0.25 * l)});
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 8; m <= max_order; m *= 2) {
      const DensityResult r = density_residual(pairs, tg, DensityFamily::Difference, m);
      if (r.residual > prev * (1 + 1e-12)) s.density_monotone = false;
      prev = r.residual;
    }
    s.density_difference = std::max(
        s.density_difference, density_residual(pairs, tg, DensityFamily::Difference, max_order).relative());
    s.density_flux =
        std::max(s.density_flux, density_residual(pairs, tg, DensityFamily::Flux, max_order).relative());
    DensityTarget joint = tg;
    joint.outer = tg.inner;
    s.density_joint =
        std::max(s.density_joint, density_residual(pairs, joint, DensityFamily::Joint, max_order).relative());
  }
  const RigidityReport rig = rigidity_check([&](int l) { return pairs.at(l); }, max_order);
  s.min_determinant = std::numeric_limits<double>::infinity();
  for (const auto& r : rig.rows) s.min_determinant = std::min({s.min_determinant, r.det_trace, r.det_flux});
  s.monopole_flux = rig.monopole_flux;
  s.rigidity = rig.pass();
  return s;
}

std::vector<std::string> suite_names() { return {"three-spheres", "modes", "rigidity", "singularity"}; }

std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed) {
  std::vector<CheckResult> out;
  if (name == "three-spheres") {
    const auto s = three_spheres_family(32, 20, 20, seed);
    out.push_back(check_le(name, "single-order equality |ratio - 1|", s.worst_equality, 1e-10));
    out.push_back(check_le(name, "random harmonics ratio", s.worst_random_ratio, 1.0 + 1e-10));
  } else if (name == "modes") {
    const auto w = w_delta_slopes(reference_cloak(), 1.5, 0.6, 200, log_deltas(1e-2, 1e-8, 13));
    out.push_back(check_ge(name, "maximal extension radius", w.extension_radius, 2.0));
    out.push_back(check_in(name, "slope of ||W_delta||", w.w_slope, -0.52, -0.48));
    out.push_back(check_in(name, "slope of ||h_delta||", w.h_slope, 0.48, 0.52));
    out.push_back(check_ge(name, "per-mode bounds hold", w.bounds ? 1.0 : 0.0, 1.0));
  } else if (name == "rigidity") {
    for (const auto& [label, a] : {std::pair{"a=1", RadialProfile::constant(1.0)},
                                   std::pair{"a=2+sin r", RadialProfile::expression("2+sin(r)")}}) {
      const auto s = plasmon_summary(a, 2, 64, 10, seed);
      const std::string tag = std::string(" ") + label;
      out.push_back(check_le(name, "trace identity" + tag, s.trace_identity, 1e-11));
      out.push_back(check_le(name, "flux anti-symmetry" + tag, s.flux_identity, 1e-11));
      out.push_back(check_le(name, "density residual, difference" + tag, s.density_difference, 1e-3));
      out.push_back(check_le(name, "density residual, flux" + tag, s.density_flux, 1e-3));
      out.push_back(check_le(name, "density residual, joint" + tag, s.density_joint, 1e-3));
      out.push_back(check_ge(name, "smallest determinant" + tag, s.min_determinant, 1e-12));
      out.push_back(check_le(name, "monopole flux" + tag, std::abs(s.monopole_flux), 1e-10));
    }
  } else if (name == "singularity") {
    const auto rows = jump_diagnostics(reference_cloak(), 1.5, 0.85, 200, {1e-3, 1e-9});
    const JumpRow &a = rows.front(), &b = rows.back();
    out.push_back(check_ge(name, "value jump drop at r2", a.value_r2 / b.value_r2, 3.0));
    out.push_back(check_ge(name, "flux jump drop at r2", a.flux_r2 / b.flux_r2, 3.0));
    out.push_back(check_ge(name, "value jump drop at r3", a.value_r3 / b.value_r3, 3.0));
    out.push_back(check_ge(name, "flux jump drop at r3", a.flux_r3 / b.flux_r3, 3.0));
    out.push_back(check_le(name, "glued source residual",
                           std::max(a.source_residual, b.source_residual), 1e-10));
    out.push_back(check_le(name, "reflection Cauchy data at r2",
                           std::max(a.reflection_residual, b.reflection_residual), 1e-10));
  } else {
    throw ValidationError("unknown suite '" + name + "'");
  }
  return out;
}

}  // namespace calr
