#include "bethe/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "bethe/errors.hpp"

namespace bethe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double piecewise_total_mass(const std::vector<double>& bp, const std::vector<double>& val) {
  double mass = 0.0;
  for (std::size_t i = 0; i < val.size(); ++i) mass += val[i] * (bp[i + 1] - bp[i]);
  return mass;
}

}  // namespace

const char* to_string(DisorderKind kind) {
  switch (kind) {
    case DisorderKind::UniformSymmetric: return "uniform-symmetric";
    case DisorderKind::Gaussian: return "gaussian";
    case DisorderKind::Cauchy: return "cauchy";
    case DisorderKind::PiecewiseDensity: return "piecewise-density";
  }
  return "unknown";
}

DisorderSpec DisorderSpec::uniform_symmetric(double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("uniform-symmetric: half_width must be positive and finite");
  }
  DisorderSpec s;
  s.kind = DisorderKind::UniformSymmetric;
  s.half_width = half_width;
  return s;
}

DisorderSpec DisorderSpec::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("gaussian: sigma must be positive and finite");
  }
  DisorderSpec s;
  s.kind = DisorderKind::Gaussian;
  s.sigma = sigma;
  return s;
}

DisorderSpec DisorderSpec::cauchy(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("cauchy: scale must be positive and finite");
  }
  DisorderSpec s;
  s.kind = DisorderKind::Cauchy;
  s.scale = scale;
  return s;
}

DisorderSpec DisorderSpec::piecewise(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size()) {
    throw ConfigError("piecewise-density: need m+1 breakpoints and m values");
  }
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) {
      throw ConfigError("piecewise-density: breakpoints must be strictly increasing");
    }
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("piecewise-density: values must be nonnegative and finite");
    }
  }
  const double mass = piecewise_total_mass(breakpoints, values);
  if (std::abs(mass - 1.0) > 1e-9) {
    throw ConfigError("piecewise-density: density must integrate to 1 (got " +
                      std::to_string(mass) + ")");
  }
  DisorderSpec s;
  s.kind = DisorderKind::PiecewiseDensity;
  s.breakpoints = std::move(breakpoints);
  s.values = std::move(values);
  s.cumulative.assign(s.breakpoints.size(), 0.0);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    s.cumulative[i + 1] = s.cumulative[i] + s.values[i] * (s.breakpoints[i + 1] - s.breakpoints[i]);
  }
  s.cumulative.back() = 1.0;
  return s;
}

bool DisorderSpec::bounded() const {
  return kind == DisorderKind::UniformSymmetric || kind == DisorderKind::PiecewiseDensity;
}

double DisorderSpec::support_lo() const {
  switch (kind) {
    case DisorderKind::UniformSymmetric: return -half_width;
    case DisorderKind::PiecewiseDensity: return breakpoints.front();
    default: return -kInf;
  }
}

double DisorderSpec::support_hi() const {
  switch (kind) {
    case DisorderKind::UniformSymmetric: return half_width;
    case DisorderKind::PiecewiseDensity: return breakpoints.back();
    default: return kInf;
  }
}

double DisorderSpec::density(double v) const {
  switch (kind) {
    case DisorderKind::UniformSymmetric:
      return std::abs(v) <= half_width ? 0.5 / half_width : 0.0;
    case DisorderKind::Gaussian: {
      const double t = v / sigma;
      return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    case DisorderKind::Cauchy:
      return scale / (std::numbers::pi * (v * v + scale * scale));
    case DisorderKind::PiecewiseDensity: {
      if (v < breakpoints.front() || v > breakpoints.back()) return 0.0;
      const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), v);
      std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin());
      if (idx == 0) idx = 1;                       // v == front
      if (idx >= breakpoints.size()) idx = breakpoints.size() - 1;  // v == back
      return values[idx - 1];
    }
  }
  return 0.0;
}

double DisorderSpec::cdf(double v) const {
  switch (kind) {
    case DisorderKind::UniformSymmetric:
      if (v <= -half_width) return 0.0;
      if (v >= half_width) return 1.0;
      return 0.5 * (v / half_width + 1.0);
    case DisorderKind::Gaussian:
      return 0.5 * std::erfc(-v / (sigma * std::sqrt(2.0)));
    case DisorderKind::Cauchy:
      return 0.5 + std::atan(v / scale) / std::numbers::pi;
    case DisorderKind::PiecewiseDensity: {
      if (v <= breakpoints.front()) return 0.0;
      if (v >= breakpoints.back()) return 1.0;
      const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), v);
      const std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
      return cumulative[idx] + values[idx] * (v - breakpoints[idx]);
    }
  }
  return 0.0;
}

double DisorderSpec::draw_at(const RandomStream& rng, std::uint64_t index) const {
  const auto [u1, u2] = rng.uniform_pair_at(index);
  switch (kind) {
    case DisorderKind::UniformSymmetric:
      return half_width * (2.0 * u1 - 1.0);
    case DisorderKind::Gaussian:
      // Box-Muller, one variate per counter block for random access.
      return sigma * std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
    case DisorderKind::Cauchy:
      return scale * std::tan(std::numbers::pi * (u1 - 0.5));
    case DisorderKind::PiecewiseDensity: {
      // Inverse CDF: u1 picks the plateau, u2 the position inside it.
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u1);
      std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
      if (idx == 0) idx = 1;
      if (idx >= cumulative.size()) idx = cumulative.size() - 1;
      const std::size_t seg = idx - 1;
      // Zero-width mass cannot occur (values >= 0 and edges strictly increase),
      // but a zero-height plateau can: u1 then lands exactly on a cumulative
      // boundary and the draw falls back to the plateau start.
      const double lo = breakpoints[seg];
      const double hi = breakpoints[seg + 1];
      return lo + u2 * (hi - lo);
    }
  }
  return 0.0;
}

std::vector<double> DisorderSpec::sample(std::uint64_t seed, std::uint64_t stream,
                                         std::size_t n) const {
  RandomStream rng(seed, stream);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = draw_at(rng, i);
  return out;
}

// ---------------------------------------------------------------------------
// JSON schema: {"kind": <string>, "params": {...}}
// ---------------------------------------------------------------------------

std::string DisorderSpec::to_json_string() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  nlohmann::ordered_json p;
  switch (kind) {
    case DisorderKind::UniformSymmetric: p["half_width"] = half_width; break;
    case DisorderKind::Gaussian: p["sigma"] = sigma; break;
    case DisorderKind::Cauchy: p["scale"] = scale; break;
    case DisorderKind::PiecewiseDensity:
      p["breakpoints"] = breakpoints;
      p["values"] = values;
      break;
  }
  j["params"] = p;
  return j.dump();
}

DisorderSpec DisorderSpec::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("disorder spec: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError("disorder spec: expected {\"kind\": ..., \"params\": {...}}");
  }
  const std::string kind = j["kind"].get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  try {
    if (kind == "uniform-symmetric") {
      return uniform_symmetric(params.value("half_width", 1.0));
    }
    if (kind == "gaussian") {
      return gaussian(params.value("sigma", 1.0));
    }
    if (kind == "cauchy") {
      return cauchy(params.value("scale", 1.0));
    }
    if (kind == "piecewise-density") {
      if (!params.contains("breakpoints") || !params.contains("values")) {
        throw ConfigError("piecewise-density: params need breakpoints and values");
      }
      return piecewise(params["breakpoints"].get<std::vector<double>>(),
                       params["values"].get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("disorder spec: bad params: ") + e.what());
  }
  throw ConfigError("disorder spec: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Minimal function and regularity constant
// ---------------------------------------------------------------------------

namespace {

double window_average(const DisorderSpec& spec, double v, double w) {
  return (spec.cdf(v + w) - spec.cdf(v - w)) / (2.0 * w);
}

}  // namespace

double minimal_function(const DisorderSpec& spec, double v) {
  constexpr int kGridDepth = 20;  // windows 1, 1/2, ..., 2^-20
  double best = kInf;
  int best_j = 0;
  for (int j = 0; j <= kGridDepth; ++j) {
    const double w = std::ldexp(1.0, -j);
    const double a = window_average(spec, v, w);
    if (a < best) {
      best = a;
      best_j = j;
    }
  }
  if (best == 0.0) return 0.0;

  // Golden-section refinement in log(window) around the grid minimum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -static_cast<double>(std::min(best_j + 1, kGridDepth)) * std::numbers::ln2;
  double hi = -static_cast<double>(std::max(best_j - 1, 0)) * std::numbers::ln2;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = window_average(spec, v, std::exp(x1));
  double f2 = window_average(spec, v, std::exp(x2));
  double prev = best;
  for (int iter = 0; iter < 200; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = window_average(spec, v, std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = window_average(spec, v, std::exp(x2));
    }
    const double cur = std::min(f1, f2);
    if (std::abs(prev - cur) < 1e-6 && iter >= 8) {
      prev = std::min(prev, cur);
      break;
    }
    prev = std::min(prev, cur);
  }
  return std::min(best, prev);
}

RegularityResult regularity_constant(const DisorderSpec& spec, std::span<const double> grid,
                                     double cap) {
  if (grid.empty()) throw ConfigError("regularity_constant: empty grid");
  RegularityResult out;
  out.constant = 0.0;
  for (double v : grid) {
    const double rho = spec.density(v);
    const double m = minimal_function(spec, v);
    double ratio;
    if (rho == 0.0) {
      ratio = m == 0.0 ? 1.0 : 0.0;  // 0/0 counts as 1
    } else if (m == 0.0) {
      ratio = kInf;
    } else {
      ratio = rho / m;
    }
    if (ratio > out.constant) {
      out.constant = ratio;
      out.worst_point = v;
    }
    if (ratio > cap) {
      out.bounded = false;
      out.worst_point = v;
      out.constant = ratio;
      return out;
    }
  }
  if (out.constant < 1.0) out.constant = 1.0;  // density <= 1*M held everywhere
  return out;
}

}  // namespace bethe
