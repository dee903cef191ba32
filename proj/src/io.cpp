#include "calr/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "calr/cloak.hpp"
#include "calr/errors.hpp"

namespace calr {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("config: missing '") + key + "'");
  return j.at(key);
}

double get_real(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw ValidationError(std::string("config: '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(std::string("config: '") + key + "' must be finite");
  return x;
}

int get_int(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer()) throw ValidationError(std::string("config: '") + key + "' must be an integer");
  return v.get<int>();
}

double opt_real(const json& j, const char* key, double fallback) {
  return j.contains(key) ? get_real(j, key) : fallback;
}

ModeSpectrum parse_explicit(const json& list, int dim, double radius, int cutoff) {
  if (!list.is_array()) throw ValidationError("config: 'coefficients' must be an array");
  ModeSpectrum s;
  s.dim = dim;
  s.radius = radius;
  s.cutoff = cutoff;
  for (const json& e : list) {
    ModeIndex m{get_int(e, "l"), e.contains("k") ? get_int(e, "k") : 0};
    const cplx g(opt_real(e, "re", 0.0), opt_real(e, "im", 0.0));
    if (g != 0.0) s.coefficients.push_back({m, g});
  }
  std::sort(s.coefficients.begin(), s.coefficients.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  s.validate();
  return s;
}

void emit(std::string& out, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(std::size_t(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        emit(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const json& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        emit(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

RadialProfile RunConfig::profile() const {
  return profile_kind == "expr" ? RadialProfile::expression(profile_expr)
                                : RadialProfile::constant(profile_constant);
}

LayeredMedium RunConfig::medium() const {
  return build_cloak(profile(), r2, r3, omega_radius, dimension);
}

RunConfig parse_config(const json& j) {
  try {
    RunConfig c;
    c.dimension = get_int(j, "dimension");
    if (c.dimension != 2 && c.dimension != 3) throw ValidationError("config: dimension must be 2 or 3");
    c.omega_radius = get_real(j, "omega_radius");
    const json& ann = require(j, "annulus");
    c.r2 = get_real(ann, "r2");
    c.r3 = get_real(ann, "r3");
    if (!(c.r2 > 0 && c.r2 < c.r3 && c.r3 < c.omega_radius))
      throw ValidationError("config: need 0 < r2 < r3 < omega_radius");

    const json& prof = require(j, "profile");
    c.profile_kind = require(prof, "kind").get<std::string>();
    if (c.profile_kind == "constant") {
      c.profile_constant = get_real(prof, "value");
      if (!(c.profile_constant > 0)) throw ValidationError("config: constant profile must be positive");
    } else if (c.profile_kind == "expr") {
      const json& v = require(prof, "value");
      if (!v.is_string()) throw ValidationError("config: expr profile needs a string value");
      c.profile_expr = v.get<std::string>();
      RadialProfile::expression(c.profile_expr);
    } else {
      throw ValidationError("config: profile kind must be 'constant' or 'expr'");
    }

    c.cutoff = j.contains("cutoff") ? get_int(j, "cutoff") : 200;
    if (c.cutoff < 0) throw ValidationError("config: cutoff must be non-negative");

    const json& src = require(j, "source");
    const double radius = get_real(src, "radius");
    if (!(radius > 0 && radius < c.omega_radius))
      throw ValidationError("config: source radius must lie in (0, omega_radius)");
    const json& spec = require(src, "spectrum");
    c.spectrum_kind = require(spec, "kind").get<std::string>();
    if (c.spectrum_kind == "geometric") {
      c.spectrum_t = get_real(spec, "t");
      c.spectrum_max_mode = spec.contains("max_mode") ? get_int(spec, "max_mode") : c.cutoff;
      if (!(c.spectrum_t >= 0)) throw ValidationError("config: t must be non-negative");
      if (c.spectrum_max_mode < 0) throw ValidationError("config: max_mode must be non-negative");
      c.source = ModeSpectrum::geometric(c.dimension, radius, c.spectrum_t,
                                         std::min(c.spectrum_max_mode, c.cutoff));
      c.source.cutoff = c.cutoff;
      // The series is infinite unless max_mode truncates it below the cutoff.
      c.source.infinite_tail = c.spectrum_max_mode >= c.cutoff && c.spectrum_t > 0;
    } else if (c.spectrum_kind == "explicit") {
      c.source = parse_explicit(require(spec, "coefficients"), c.dimension, radius, c.cutoff);
    } else {
      throw ValidationError("config: spectrum kind must be 'geometric' or 'explicit'");
    }

    if (j.contains("sweep")) {
      const json& sw = j.at("sweep");
      if (!sw.is_object()) throw ValidationError("config: 'sweep' must be an object");
      c.sweep.delta_start = opt_real(sw, "delta_start", c.sweep.delta_start);
      c.sweep.delta_end = opt_real(sw, "delta_end", c.sweep.delta_end);
      c.sweep.points = sw.contains("points") ? get_int(sw, "points") : c.sweep.points;
      c.sweep.far_margin = opt_real(sw, "far_margin", c.sweep.far_margin);
      if (!(c.sweep.delta_start > 0 && c.sweep.delta_end > 0 && c.sweep.points >= 2))
        throw ValidationError("config: sweep needs positive deltas and at least 2 points");
    }
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  try {
    return parse_config(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["dimension"] = c.dimension;
  j["omega_radius"] = c.omega_radius;
  j["annulus"] = {{"r2", c.r2}, {"r3", c.r3}};
  if (c.profile_kind == "expr")
    j["profile"] = {{"kind", "expr"}, {"value", c.profile_expr}};
  else
    j["profile"] = {{"kind", "constant"}, {"value", c.profile_constant}};
  json spec;
  spec["kind"] = c.spectrum_kind;
  if (c.spectrum_kind == "geometric") {
    spec["t"] = c.spectrum_t;
    spec["max_mode"] = c.spectrum_max_mode;
  } else {
    json list = json::array();
    for (const auto& [m, g] : c.source.coefficients)
      list.push_back({{"l", m.l}, {"k", m.k}, {"re", g.real()}, {"im", g.imag()}});
    spec["coefficients"] = list;
  }
  j["source"] = {{"radius", c.source.radius}, {"spectrum", spec}};
  j["sweep"] = {{"delta_start", c.sweep.delta_start},
                {"delta_end", c.sweep.delta_end},
                {"points", c.sweep.points},
                {"far_margin", c.sweep.far_margin}};
  j["cutoff"] = c.cutoff;
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const json& j, int indent) {
  std::string out;
  emit(out, j, indent, 0);
  out += '\n';
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    os << format_double(r.delta) << ',' << format_double(r.power) << ','
       << format_double(r.shell_energy) << ',' << format_double(r.u_farfield_h1) << ','
       << format_double(r.v_farfield_h1) << ',' << format_double(r.c_delta) << '\n';
  }
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_sweep_csv(os, rows);
  return os.str();
}

json field_to_json(const Field& f) {
  const Discretization& disc = *f.disc;
  json j;
  j["dimension"] = f.dim();
  j["delta"] = f.delta;
  j["cutoff"] = disc.max_order();
  j["medium"] = disc.medium().describe();
  json segs = json::array();
  for (const Segment& s : disc.segments())
    segs.push_back({{"inner", s.ra}, {"outer", s.rb}, {"layer", s.layer}, {"plasmonic", s.plasmonic}});
  j["segments"] = segs;
  json modes = json::array();
  for (std::size_t i = 0; i < f.modes.size(); ++i) {
    json per = json::array();
    for (std::size_t s = 0; s < disc.segments().size(); ++s) {
      const auto [c, d] = f.segment_coefficients(i, s);
      per.push_back({c.real(), c.imag(), d.real(), d.imag()});
    }
    modes.push_back({{"l", f.modes[i].l}, {"k", f.modes[i].k}, {"coefficients", per}});
  }
  j["coefficient_layout"] = "per segment: growing re, growing im, decaying re, decaying im";
  j["modes"] = modes;
  return j;
}

std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& title) {
  std::vector<std::pair<double, double>> pts;
  for (const SweepRow& r : rows)
    if (r.valid && r.delta > 0 && r.power > 0) pts.push_back({std::log10(r.delta), std::log10(r.power)});
  const double W = 640, H = 400, pad = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts[0].first;
    y0 = y1 = pts[0].second;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    if (x1 - x0 < 1e-12) x1 = x0 + 1;
    if (y1 - y0 < 1e-12) y1 = y0 + 1;
  }
  const auto X = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
  const auto Y = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\">\n", W, H);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                pad, pad, W - 2 * pad, H - 2 * pad);
  out += buf;
  std::string escaped;
  for (char ch : title) {
    if (ch == '<') escaped += "&lt;";
    else if (ch == '>') escaped += "&gt;";
    else if (ch == '&') escaped += "&amp;";
    else escaped += ch;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"14\">", pad, pad - 20);
  out += buf + escaped + "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"12\">log10 delta [%.3g, %.3g]</text>\n", pad,
                H - 20, x0, x1);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"12\">log10 power [%.3g, %.3g]</text>\n", pad,
                pad - 5, y0, y1);
  out += buf;
  if (!pts.empty()) {
    out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(x), Y(y));
      out += buf;
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace calr
