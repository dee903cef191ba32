#include "calr/cloak.hpp"

#include <cmath>
#include <cstdio>

#include "calr/errors.hpp"

namespace calr {

LayeredMedium build_cloak(const RadialProfile& a, double r2, double r3, double omega_radius, int dim) {
  LayeredMedium m = build_doubly_complementary(a, r2, r3, omega_radius, dim);
  const ComplementarityReport rep = verify_complementarity(m, 257, 1e-10);
  if (!rep.pass()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "cloak is not doubly complementary (shell %.3g, core %.3g)",
                  rep.shell_error, rep.core_error);
    throw ValidationError(buf);
  }
  return m;
}

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

CloakDemoReport cloak_demo(const LayeredMedium& cloak, const ModeSpectrum& src,
                           const CloakDemoOptions& opt) {
  if (!cloak.geometry) throw ValidationError("cloak demo needs a doubly complementary medium");
  src.validate();
  const auto& g = *cloak.geometry;
  if (!(src.radius > g.r2 && src.radius < cloak.omega_radius))
    throw ValidationError("source must lie outside the shell and inside the domain");
  if (src.dim != cloak.dim) throw ValidationError("source and medium dimensions differ");

  CloakDemoReport rep;
  rep.extension = extendability_test(src, cloak, cloak.omega_radius);

  if (!rep.extension.finite_band && !rep.extension.indeterminate) {
    CriticalOptions copt = opt.critical;
    if (!(copt.source_radius > g.r2 && copt.source_radius < g.r3))
      copt.source_radius = 0.5 * (g.r2 + std::sqrt(g.r2 * g.r3));
    rep.critical = critical_radius(cloak, copt);
    if (!rep.critical.warning.empty()) rep.notes.push_back("critical radius: " + rep.critical.warning);
  }

  const double rmax = rep.extension.max_radius;
  if (rep.extension.finite_band) {
    rep.predicted = VerdictClass::Bounded;
    rep.notes.push_back("finite-band source: the zero-Cauchy-data extension exists to every radius");
  } else if (rep.extension.indeterminate) {
    rep.predicted = VerdictClass::Indeterminate;
    rep.notes.push_back("too few orders to estimate the maximal extension radius");
  } else if (rmax < rep.critical.lower) {
    rep.predicted = VerdictClass::BlowUp;
  } else if (rmax > rep.critical.upper) {
    rep.predicted = VerdictClass::Bounded;
  } else {
    rep.predicted = VerdictClass::Indeterminate;
    rep.notes.push_back(fmt("maximal extension %.6g lies inside the threshold band [%.6g, %.6g]", rmax,
                            rep.critical.lower, rep.critical.upper));
  }
  if (!rep.extension.finite_band && !rep.extension.indeterminate)
    rep.notes.push_back(fmt("maximal extension radius %.6g, critical radius %.6g", rmax, rep.critical.value));

  rep.sweep = delta_sweep(cloak, src, opt.deltas, opt.cutoff, opt.sweep);
  rep.verdict = classify(rep.sweep.rows, opt.policy);
  rep.far_field = far_field_verdict(rep.sweep.rows, opt.far_policy);
  for (auto it = rep.sweep.rows.rbegin(); it != rep.sweep.rows.rend(); ++it) {
    if (!it->valid) continue;
    rep.source_visible = it->u_farfield_h1 > 0 && it->u_increment >= 0 &&
                         it->u_increment <= opt.settle_tolerance * it->u_farfield_h1;
    break;
  }

  rep.flagged = rep.verdict.cls == VerdictClass::Indeterminate ||
                rep.predicted == VerdictClass::Indeterminate;
  rep.asserted = !rep.flagged;
  if (rep.asserted) {
    bool ok = rep.verdict.cls == rep.predicted;
    if (!ok) rep.notes.push_back("power verdict disagrees with the extension-radius prediction");
    if (rep.verdict.cls == VerdictClass::BlowUp) {
      const bool decay = rep.far_field.v_decaying && rep.far_field.v_decay >= opt.decay_factor;
      if (!decay)
        rep.notes.push_back(fmt("normalized far field dropped only %.3gx (need %.3gx)",
                                rep.far_field.v_decay, opt.decay_factor));
      ok = ok && decay;
    } else {
      if (!rep.source_visible)
        rep.notes.push_back("far field of u does not settle to a nonzero limit");
      ok = ok && rep.source_visible;
    }
    rep.pass = ok;
  } else {
    rep.notes.push_back("verdict not asserted");
  }
  rep.notes.push_back(
      "sources are supported on a circle or sphere; for a general codimension-one support the "
      "absence of a zero-Cauchy-data extension follows from unique continuation");
  return rep;
}

}  // namespace calr
