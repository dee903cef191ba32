#include "calr/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "calr/expression.hpp"

namespace calr {

RadialMap RadialMap::kelvin(double R) {
  if (!(R > 0)) throw ValidationError("Kelvin radius must be positive");
  RadialMap m;
  m.steps_.push_back({MapStep::Kind::Kelvin, R});
  return m;
}

RadialMap RadialMap::dilation(double lambda) {
  if (!(lambda > 0)) throw ValidationError("dilation factor must be positive");
  RadialMap m;
  m.steps_.push_back({MapStep::Kind::Dilation, lambda});
  return m;
}

RadialMap RadialMap::then(const RadialMap& other) const {
  RadialMap m = *this;
  m.steps_.insert(m.steps_.end(), other.steps_.begin(), other.steps_.end());
  return m;
}

RadialMap RadialMap::inverse() const {
  RadialMap m;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    if (it->kind == MapStep::Kind::Kelvin) m.steps_.push_back(*it);
    else m.steps_.push_back({MapStep::Kind::Dilation, 1.0 / it->param});
  }
  return m;
}

double RadialMap::forward(double r) const {
  if (!(r > 0)) throw DomainError("radial map evaluated at non-positive radius");
  for (const auto& s : steps_) r = s.forward(r);
  return r;
}

double RadialMap::inverse(double rho) const {
  if (!(rho > 0)) throw DomainError("radial map evaluated at non-positive radius");
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) rho = it->inverse(rho);
  return rho;
}

bool RadialMap::reverses() const {
  return std::count_if(steps_.begin(), steps_.end(), [](const MapStep& s) {
           return s.kind == MapStep::Kind::Kelvin;
         }) % 2 == 1;
}

std::string RadialMap::description() const {
  if (steps_.empty()) return "identity";
  std::string out;
  char buf[64];
  for (const auto& s : steps_) {
    std::snprintf(buf, sizeof buf, "%s(%.17g)",
                  s.kind == MapStep::Kind::Kelvin ? "kelvin" : "dilation", s.param);
    if (!out.empty()) out += " then ";
    out += buf;
  }
  return out;
}

double pushforward_factor(const RadialMap& map, double rho, int dim) {
  double factor = 1.0;
  for (auto it = map.steps().rbegin(); it != map.steps().rend(); ++it) {
    if (it->kind == MapStep::Kind::Kelvin) {
      const double R2 = it->param * it->param;
      factor *= std::pow(R2 / (rho * rho), dim - 2);
    } else {
      factor *= std::pow(it->param, 2 - dim);
    }
    rho = it->inverse(rho);
  }
  return factor;
}

struct RadialProfile::Impl {
  std::optional<std::pair<double, double>> power;  // (C, k)
  std::function<double(double)> fn;
  std::string description;
  // push-forward data
  std::shared_ptr<const Impl> root;
  RadialMap map;
  int dim = 0;
};

namespace {
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

RadialProfile RadialProfile::constant(double c) { return power(c, 0.0); }

RadialProfile RadialProfile::power(double c, double k) {
  if (!(c > 0) || !std::isfinite(c) || !std::isfinite(k))
    throw ValidationError("power profile needs a positive finite coefficient");
  auto impl = std::make_shared<Impl>();
  impl->power = std::make_pair(c, k);
  impl->description = k == 0 ? fmt(c) : fmt(c) + "*r^" + fmt(k);
  return RadialProfile(impl);
}

RadialProfile RadialProfile::function(std::function<double(double)> f, std::string description) {
  auto impl = std::make_shared<Impl>();
  impl->fn = std::move(f);
  impl->description = std::move(description);
  return RadialProfile(impl);
}

RadialProfile RadialProfile::expression(const std::string& text) {
  Expression e(text);
  return function([e](double r) { return e(r); }, text);
}

double RadialProfile::operator()(double r) const {
  const Impl& p = *impl_;
  if (p.power) return p.power->second == 0 ? p.power->first : p.power->first * std::pow(r, p.power->second);
  if (p.root) {
    const double x = p.map.inverse(r);
    return pushforward_factor(p.map, r, p.dim) * RadialProfile(p.root)(x);
  }
  return p.fn(r);
}

std::optional<std::pair<double, double>> RadialProfile::power_law() const { return impl_->power; }

bool RadialProfile::is_constant() const { return impl_->power && impl_->power->second == 0; }

RadialProfile RadialProfile::root() const {
  return impl_->root ? RadialProfile(impl_->root) : *this;
}

const RadialMap& RadialProfile::map() const { return impl_->map; }

int RadialProfile::map_dimension() const { return impl_->dim; }

std::string RadialProfile::description() const { return impl_->description; }

RadialProfile RadialProfile::shifted(double delta) const {
  RadialProfile base = *this;
  return function([base, delta](double r) { return base(r) + delta; },
                  "(" + description() + ")+" + fmt(delta));
}

RadialProfile pushforward_isotropic(const RadialProfile& a, const RadialMap& map, int dim) {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  if (map.identity()) return a;
  if (auto pw = a.power_law()) {
    double c = pw->first, k = pw->second;
    for (const auto& s : map.steps()) {
      if (s.kind == MapStep::Kind::Kelvin) {
        const double R = s.param;
        c *= std::pow(R, 2.0 * (dim - 2) + 2.0 * k);
        k = -2.0 * (dim - 2) - k;
      } else {
        c *= std::pow(s.param, 2.0 - dim - k);
      }
    }
    return RadialProfile::power(c, k);
  }
  auto impl = std::make_shared<RadialProfile::Impl>();
  if (a.impl_->root) {
    if (a.impl_->dim != dim) throw ValidationError("push-forward dimension mismatch");
    impl->root = a.impl_->root;
    impl->map = a.impl_->map.then(map);
  } else {
    impl->root = a.impl_;
    impl->map = map;
  }
  impl->dim = dim;
  impl->description = "pushforward[" + impl->map.description() + "](" +
                      RadialProfile(impl->root).description() + ")";
  return RadialProfile(impl);
}

std::pair<double, double> profile_range(const RadialProfile& a, double ra, double rb, int samples) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < samples; ++i) {
    const double r = ra + (rb - ra) * i / (samples - 1);
    if (r <= 0) continue;
    const double v = a(r);
    if (!std::isfinite(v)) return {std::numeric_limits<double>::quiet_NaN(), hi};
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace calr
