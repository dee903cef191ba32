#include "calr/resonance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "calr/parallel.hpp"

namespace calr {

namespace {

const ComplementaryGeometry& geometry_of(const LayeredMedium& m) {
  if (!m.geometry) throw ValidationError("medium has no shell geometry");
  return *m.geometry;
}

// Least-squares line y = a + b x.
struct LineFit {
  double slope = 0, intercept = 0, r2 = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = x[i];
    b(i) = y[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  LineFit f;
  f.intercept = c(0);
  f.slope = c(1);
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (A * c - b).squaredNorm();
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

std::vector<SweepRow> sorted_valid(const std::vector<SweepRow>& rows) {
  std::vector<SweepRow> out;
  for (const auto& r : rows)
    if (r.valid) out.push_back(r);
  std::stable_sort(out.begin(), out.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.delta > b.delta; });
  return out;
}

}  // namespace

double shell_energy(const Field& f) {
  const auto& g = geometry_of(f.disc->medium());
  return gradient_energy(f, g.r1, g.r2);
}

double power(const Field& f) { return f.delta * shell_energy(f); }

Normalized normalize(const Field& u) {
  const double e = shell_energy(u);
  if (!(e > 0)) throw SolverError("shell energy vanishes; normalization undefined");
  const double c = 1.0 / std::sqrt(std::sqrt(u.delta) * e);
  return {c, u.scaled(c)};
}

Normalized normalize(std::shared_ptr<const Discretization> disc, const ModeSpectrum& src, double delta) {
  return normalize(solve_field(std::move(disc), src, delta));
}

std::vector<double> log_deltas(double first, double last, int points) {
  if (points < 1 || !(first > 0) || !(last > 0)) throw ValidationError("invalid delta grid");
  std::vector<double> out(points);
  const double a = std::log10(first), b = std::log10(last);
  for (int i = 0; i < points; ++i)
    out[i] = points == 1 ? first : std::pow(10.0, a + (b - a) * i / (points - 1));
  return out;
}

Sweep delta_sweep(std::shared_ptr<const Discretization> disc, const ModeSpectrum& src,
                  const std::vector<double>& deltas, const SweepOptions& opt) {
  const auto& g = geometry_of(disc->medium());
  const double R = disc->medium().omega_radius;
  const double far_in = g.r3 * (1.0 + opt.far_margin);
  for (double d : deltas)
    if (!(d > 0 && d < 1)) throw ValidationError("sweep deltas must lie in (0, 1)");

  Sweep out;
  out.rows.resize(deltas.size());
  std::vector<Field> fields(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    row.delta = deltas[i];
    try {
      fields[i] = solve_field(disc, src, deltas[i]);
      const Field& u = fields[i];
      row.shell_energy = shell_energy(u);
      row.power = deltas[i] * row.shell_energy;
      row.u_farfield_h1 = h1_norm(u, far_in, R);
      row.u_h1 = h1_norm(u, 0.0, R);
      row.c_delta = row.shell_energy > 0 ? 1.0 / std::sqrt(std::sqrt(deltas[i]) * row.shell_energy)
                                         : std::numeric_limits<double>::quiet_NaN();
      row.v_farfield_h1 = row.c_delta * row.u_farfield_h1;
    } catch (const SolverError& e) {
      row.valid = false;
      row.error = e.what();
    }
  });
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (out.rows[i].valid && out.rows[i - 1].valid)
      out.rows[i].u_increment =
          h1_norm(linear_combination(1.0, fields[i], -1.0, fields[i - 1]), far_in, R);
  }
  if (opt.keep_fields) out.fields = std::move(fields);
  return out;
}

Sweep delta_sweep(const LayeredMedium& m, const ModeSpectrum& src, const std::vector<double>& deltas,
                  int cutoff, const SweepOptions& opt) {
  auto disc = std::make_shared<const Discretization>(m, src.radius, cutoff);
  return delta_sweep(disc, src, deltas, opt);
}

std::string to_string(VerdictClass v) {
  switch (v) {
    case VerdictClass::BlowUp: return "BlowUp";
    case VerdictClass::Bounded: return "Bounded";
    default: return "Indeterminate";
  }
}

Verdict classify(const std::vector<SweepRow>& input, const ClassifyPolicy& policy) {
  const std::vector<SweepRow> rows = sorted_valid(input);
  if (static_cast<int>(rows.size()) < policy.min_rows)
    throw ValidationError("classify needs at least " + std::to_string(policy.min_rows) + " valid rows");
  const double decades = std::log10(rows.front().delta / rows.back().delta);
  if (decades < policy.min_decades - 1e-9)
    throw ValidationError("classify needs rows spanning at least " +
                          std::to_string(policy.min_decades) + " decades");

  Verdict v;
  v.rows.assign(rows.begin() + rows.size() / 2, rows.end());
  std::vector<double> x, y;
  for (const auto& r : v.rows) {
    if (!(r.power > 0)) {
      v.note = "non-positive power in the tail";
      return v;
    }
    x.push_back(std::log(r.delta));
    y.push_back(std::log(r.power));
  }
  const LineFit fit = fit_line(x, y);
  v.slope = fit.slope;
  v.intercept = fit.intercept;
  v.r_squared = fit.r2;

  bool increasing = true, decreasing = true;
  for (std::size_t i = 1; i < v.rows.size(); ++i) {
    increasing &= v.rows[i].power >= v.rows[i - 1].power;
    decreasing &= v.rows[i].power <= v.rows[i - 1].power;
  }
  // Variation over the last two decades of delta.
  const double floor_delta = v.rows.back().delta * 100.0 * (1 + 1e-12);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& r : v.rows) {
    if (r.delta > floor_delta) continue;
    lo = std::min(lo, r.power);
    hi = std::max(hi, r.power);
  }
  v.variation = hi > 0 ? (hi - lo) / hi : 0.0;

  if (v.slope <= policy.blowup_slope && increasing) {
    v.cls = VerdictClass::BlowUp;
    v.monotone_tail = true;
  } else if (std::abs(v.slope) <= policy.bounded_slope && v.variation <= policy.bounded_variation) {
    v.cls = VerdictClass::Bounded;
    v.note = "plateau";
  } else if (policy.decaying_is_bounded && v.slope >= policy.decay_slope && decreasing) {
    v.cls = VerdictClass::Bounded;
    v.monotone_tail = true;
    v.note = "decaying power";
  }
  if (v.cls == VerdictClass::Indeterminate) v.monotone_tail = increasing || decreasing;
  return v;
}

FarFieldVerdict far_field_verdict(const std::vector<SweepRow>& input, const FarFieldPolicy& policy) {
  const std::vector<SweepRow> rows = sorted_valid(input);
  FarFieldVerdict v;
  if (rows.size() < 3) return v;
  const std::size_t start = rows.size() / 2;
  v.v_decay = rows.front().v_farfield_h1 / rows.back().v_farfield_h1;
  bool monotone = true;
  for (std::size_t i = start + 1; i < rows.size(); ++i)
    monotone &= rows[i].v_farfield_h1 <= (1.0 + policy.jitter) * rows[i - 1].v_farfield_h1;
  v.v_decaying = monotone && rows.back().v_farfield_h1 < rows[start].v_farfield_h1;

  bool cauchy = true;
  for (std::size_t i = start + 1; i < rows.size(); ++i) {
    const double prev = rows[i - 1].u_increment, cur = rows[i].u_increment;
    if (prev < 0 || cur < 0) {
      cauchy = false;
      continue;
    }
    const double ratio = prev > 0 ? cur / prev : (cur > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    v.worst_cauchy_ratio = std::max(v.worst_cauchy_ratio, ratio);
    cauchy &= ratio <= policy.cauchy_ratio;
  }
  v.u_cauchy = cauchy;
  return v;
}

bool far_field_consistent(const Verdict& p, const FarFieldVerdict& f) {
  switch (p.cls) {
    case VerdictClass::BlowUp: return f.v_decaying;
    case VerdictClass::Bounded: return f.u_cauchy;
    default: return true;
  }
}

// ---------------------------------------------------------------- extendability

namespace {

struct Piece {
  double ra, rb;
  RadialProfile profile;
};

std::vector<Piece> pieces_between(const LayeredMedium& m, double from, double to) {
  std::vector<Piece> out;
  for (const auto& L : m.layers) {
    const double a = std::max(from, L.inner), b = std::min(to, L.outer);
    if (b > a) out.push_back({a, b, L.profile});
  }
  if (to > m.omega_radius) out.push_back({std::max(from, m.omega_radius), to, m.layers.back().profile});
  return out;
}

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// ln of the H1 energy on (r0, R) of the order-l radial function with zero
// value and unit flux jump at r0.
double log_unit_extension_energy(const std::vector<Piece>& pieces, int ell, int dim, double r0) {
  double u = 0.0, p = std::pow(r0, dim - 1);
  double log_scale = 0.0;
  double log_energy = -std::numeric_limits<double>::infinity();
  for (const Piece& pc : pieces) {
    const BasisPtr B = fundamental_pair(pc.profile, ell, pc.ra, pc.rb, dim);
    const BasisValues a = B->eval(pc.ra);
    Eigen::Matrix2d M;
    M << a.up, a.um, a.pp, a.pm;
    // Columns differ by many orders of magnitude at high order.
    const Eigen::Vector2d colscale = M.cwiseAbs().colwise().maxCoeff().transpose();
    const Eigen::Vector2d cd =
        (M * colscale.cwiseInverse().asDiagonal()).partialPivLu().solve(Eigen::Vector2d(u, p))
            .cwiseQuotient(colscale);
    const double s = cd.cwiseAbs().maxCoeff();
    if (!(s > 0)) continue;
    const Eigen::Vector2d c = cd / s;
    const GramPair G = B->gram(pc.ra, pc.rb);
    const double e = c.dot((G.grad + G.l2) * c);
    log_energy = log_sum_exp(log_energy, std::log(angular_weight(dim) * e) + 2 * (log_scale + std::log(s)));
    const BasisValues b = B->eval(pc.rb);
    u = c(0) * b.up + c(1) * b.um;
    p = c(0) * b.pp + c(1) * b.pm;
    log_scale += std::log(s);
  }
  return log_energy;
}

}  // namespace

ExtendabilityReport extendability_test(const ModeSpectrum& src, const LayeredMedium& m, double R) {
  src.validate();
  const auto& g = geometry_of(m);
  const double r0 = src.radius;
  if (!(g.r2 < r0 && r0 < R)) throw ValidationError("extendability needs r2 < r0 < R");
  ExtendabilityReport rep;
  rep.target_radius = R;
  rep.finite_band = !src.infinite_tail;

  const auto pieces = pieces_between(m, r0, R);
  // Collect per-order source weight sum_k |g_{l,k}|^2.
  std::vector<std::pair<int, double>> weights;
  for (const auto& [mode, coef] : src.coefficients) {
    if (weights.empty() || weights.back().first != mode.l) weights.push_back({mode.l, 0.0});
    weights.back().second += std::norm(coef);
  }
  rep.orders.resize(weights.size());
  rep.log_mode_energy.resize(weights.size());
  parallel_for(weights.size(), [&](std::size_t i) {
    rep.orders[i] = weights[i].first;
    rep.log_mode_energy[i] =
        std::log(weights[i].second) + log_unit_extension_energy(pieces, weights[i].first, m.dim, r0);
  });
  double acc = -std::numeric_limits<double>::infinity();
  for (double le : rep.log_mode_energy) {
    acc = log_sum_exp(acc, le);
    rep.partial_sums.push_back(std::exp(acc));
  }

  if (rep.finite_band) {
    rep.max_radius = std::numeric_limits<double>::infinity();
    return rep;
  }
  std::vector<double> x, y;
  const int top = rep.orders.empty() ? 0 : rep.orders.back();
  for (std::size_t i = 0; i < rep.orders.size(); ++i) {
    if (rep.orders[i] >= 1 && rep.orders[i] >= top / 2) {
      x.push_back(rep.orders[i]);
      y.push_back(rep.log_mode_energy[i]);
    }
  }
  if (x.size() < 8) {
    rep.indeterminate = true;
    return rep;
  }
  const LineFit fit = fit_line(x, y);
  rep.log_ratio = fit.slope;
  rep.divergent = fit.slope > 0;
  rep.max_radius = R * std::exp(-fit.slope / 2.0);
  return rep;
}

CriticalRadius critical_radius(const LayeredMedium& m, const CriticalOptions& opt) {
  const auto& g = geometry_of(m);
  CriticalRadius out;
  const auto& a = m.annulus_profile;
  if (a && a->is_constant() && a->power_law()->first == 1.0) {
    out.value = out.lower = out.upper = std::sqrt(g.r2 * g.r3);
    out.exact = true;
    return out;
  }
  const double r0 = opt.source_radius;
  if (!(g.r2 < r0 && r0 < g.r3)) throw ValidationError("critical radius probe must lie in the annulus");
  auto disc = std::make_shared<const Discretization>(m, r0, opt.cutoff);
  std::vector<std::pair<double, double>> seen;  // (t, slope)
  auto slope_at = [&](double t) {
    const auto src = ModeSpectrum::geometric(m.dim, r0, t, opt.cutoff);
    const double s = classify(delta_sweep(disc, src, opt.deltas).rows).slope;
    seen.push_back({t, s});
    return s;
  };
  // Larger t moves the source extension radius r0/t inward; the power slope
  // decreases through zero across the threshold.
  const double t_min = r0 / g.r3, t_max = std::min(0.99, r0 / g.r2);
  const ClassifyPolicy pol;
  auto crossing = [&](double level) {
    double lo = t_min, hi = t_max;
    if (!(slope_at(lo) > level && slope_at(hi) <= level)) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < opt.iterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope_at(mid) <= level ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double t0 = crossing(0.0);
  const double t_blow = crossing(pol.blowup_slope);
  const double t_bounded = crossing(pol.decay_slope);
  if (std::isnan(t0) || std::isnan(t_blow) || std::isnan(t_bounded)) {
    out.lower = g.r2;
    out.upper = g.r3;
    out.value = std::sqrt(g.r2 * g.r3);
    out.warning = "probe sources do not bracket the threshold; returning the annulus";
    return out;
  }
  out.value = r0 / t0;
  out.lower = r0 / t_blow;
  out.upper = r0 / t_bounded;
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 1; i < seen.size(); ++i) {
    if (seen[i].second > seen[i - 1].second + 1e-9) {
      out.lower = std::min(out.lower, r0 / seen[i].first);
      out.upper = std::max(out.upper, r0 / seen[i - 1].first);
      out.warning = "power slope is non-monotone in t; bracket widened";
    }
  }
  return out;
}

}  // namespace calr
