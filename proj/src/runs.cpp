#include "bethe/runs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>

#include <json.hpp>

#include "bethe/disorder.hpp"
#include "bethe/errors.hpp"
#include "bethe/lyapunov.hpp"
#include "bethe/oracle.hpp"
#include "bethe/parallel.hpp"
#include "bethe/phase.hpp"
#include "bethe/rng.hpp"
#include "bethe/scatter.hpp"
#include "bethe/tree_green.hpp"
#include "bethe/verify.hpp"
#include "bethe/version.hpp"

namespace bethe {

namespace {

using ordered_json = nlohmann::ordered_json;

// Reports carry nine significant digits; parsing the formatted value back
// keeps JSON emission identical to what a reader reloads.
double round9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

ordered_json complex_json(cdouble z) {
  return ordered_json{{"re", round9(z.real())}, {"im", round9(z.imag())}};
}

ordered_json round9_list(std::span<const double> xs) {
  ordered_json arr = ordered_json::array();
  for (double x : xs) arr.push_back(round9(x));
  return arr;
}

// Strict parameter front end: every key must be consumed by the command.
class ParamReader {
 public:
  ParamReader(std::string command, const std::string& text) : command_(std::move(command)) {
    if (text.empty()) {
      obj_ = ordered_json::object();
      return;
    }
    ordered_json parsed = ordered_json::parse(text, nullptr, false);
    if (parsed.is_discarded()) throw ConfigError("parameters are not valid JSON");
    if (parsed.is_null()) parsed = ordered_json::object();
    if (!parsed.is_object()) throw ConfigError("parameters must be a JSON object");
    obj_ = std::move(parsed);
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double require_double(const std::string& key) {
    const ordered_json& v = fetch(key);
    if (!v.is_number()) throw bad_type(key, "a number");
    return v.get<double>();
  }
  double get_double(const std::string& key, double fallback) {
    return has(key) ? require_double(key) : fallback;
  }

  int require_int(const std::string& key) {
    const ordered_json& v = fetch(key);
    if (!v.is_number_integer()) throw bad_type(key, "an integer");
    return v.get<int>();
  }
  int get_int(const std::string& key, int fallback) {
    return has(key) ? require_int(key) : fallback;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const ordered_json& v = fetch(key);
    if (!(v.is_number_integer() && v.get<std::int64_t>() >= 0) && !v.is_number_unsigned()) {
      throw bad_type(key, "a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const ordered_json& v = fetch(key);
    if (!v.is_string()) throw bad_type(key, "a string");
    return v.get<std::string>();
  }

  std::vector<double> require_double_list(const std::string& key) {
    const ordered_json& v = fetch(key);
    if (!v.is_array() || v.empty()) throw bad_type(key, "a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& item : v) {
      if (!item.is_number()) throw bad_type(key, "a nonempty array of numbers");
      out.push_back(item.get<double>());
    }
    return out;
  }

  DisorderSpec disorder() {
    if (!has("disorder")) return DisorderSpec::uniform_symmetric(1.0);
    const ordered_json& v = fetch("disorder");
    if (!v.is_object()) throw bad_type("disorder", "an object");
    return DisorderSpec::from_json_string(v.dump());
  }

  int threads() { return resolve_threads(get_int("threads", 0)); }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!consumed_.contains(key)) {
        throw ConfigError("unknown parameter '" + key + "' for command '" + command_ + "'");
      }
    }
  }

 private:
  const ordered_json& fetch(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      throw ConfigError("missing parameter '" + key + "' for command '" + command_ + "'");
    }
    consumed_.insert(key);
    return *it;
  }
  ConfigError bad_type(const std::string& key, const std::string& expected) const {
    return ConfigError("parameter '" + key + "' must be " + expected);
  }

  std::string command_;
  ordered_json obj_;
  std::set<std::string> consumed_;
};

// Energy grids arrive either as an explicit array or as min/max/steps.
std::vector<double> grid_axis(ParamReader& p, const std::string& list_key,
                              const std::string& prefix, double dflt_min, double dflt_max,
                              int dflt_steps) {
  if (p.has(list_key)) {
    for (const char* suffix : {"_min", "_max", "_steps"}) {
      if (p.has(prefix + suffix)) {
        throw ConfigError("pass either '" + list_key + "' or '" + prefix + suffix +
                          "', not both");
      }
    }
    return p.require_double_list(list_key);
  }
  const double lo = p.get_double(prefix + "_min", dflt_min);
  const double hi = p.get_double(prefix + "_max", dflt_max);
  const int steps = p.get_int(prefix + "_steps", dflt_steps);
  return linspace(lo, hi, steps);
}

VertexKind parse_vertex(const std::string& name) {
  if (name == "rooted") return VertexKind::Rooted;
  if (name == "lattice") return VertexKind::Lattice;
  throw ConfigError("vertex must be 'rooted' or 'lattice'");
}

struct CommandOutput {
  ordered_json params;
  ordered_json result;
};

ordered_json disorder_echo(const DisorderSpec& spec) {
  return ordered_json::parse(spec.to_json_string());
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

CommandOutput cmd_free(ParamReader& p) {
  const int k = p.require_int("K");
  const double energy = p.require_double("E");
  const double eta = p.get_double("eta", 0.0);
  p.threads();
  if (k < 2) throw ConfigError("K must be at least 2");
  if (eta < 0.0) throw ConfigError("eta must be nonnegative");
  p.finish();

  const cdouble z{energy, eta};
  const cdouble gamma0 = free_forward_green(k, z);
  const cdouble g0 = free_lattice_green(k, z);

  CommandOutput out;
  out.params = {{"K", k}, {"E", energy}, {"eta", eta}};
  out.result = {{"gamma0", complex_json(gamma0)},
                {"g0", complex_json(g0)},
                {"lyapunov", round9(-std::log(std::abs(gamma0)))}};
  return out;
}

CommandOutput cmd_spectrum(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  p.threads();
  if (k < 2) throw ConfigError("K must be at least 2");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  p.finish();

  const auto [lo, hi] = spectrum_edges(k, lambda);
  CommandOutput out;
  out.params = {{"K", k}, {"lambda", lambda}};
  out.result = {{"edges", {round9(lo), round9(hi)}},
                {"weak_disorder_threshold", round9(weak_disorder_threshold(k))}};
  return out;
}

CommandOutput cmd_lyap(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  const double energy = p.require_double("E");
  if (p.has("etas") && p.has("eta")) throw ConfigError("pass either 'eta' or 'etas', not both");
  std::vector<double> etas =
      p.has("etas") ? p.require_double_list("etas") : std::vector<double>{p.get_double("eta", 1e-3)};
  const int depth = p.get_int("depth", default_depth(k));
  const int n = p.get_int("n", 2000);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const std::string vertex_name = p.get_string("vertex", "rooted");
  const VertexKind vertex = parse_vertex(vertex_name);
  const std::string method = p.get_string("method", "depth");
  const int pool_size = p.get_int("pool_size", 10000);
  const int warmup = p.get_int("warmup", 20);
  const int sweeps = p.get_int("sweeps", 20);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  if (method != "depth" && method != "pool") throw ConfigError("method must be 'depth' or 'pool'");
  if (method == "pool" && vertex == VertexKind::Lattice) {
    throw ConfigError("the pool estimator tracks forward values; use vertex 'rooted'");
  }
  p.finish();

  ordered_json estimates = ordered_json::array();
  std::vector<double> means, stderrs;
  for (double eta : etas) {
    ordered_json row;
    row["eta"] = eta;
    if (method == "depth") {
      const LyapunovEstimate est =
          estimate_finite_depth(k, spec, lambda, energy, eta, depth, n, seed, threads, vertex);
      row["mean"] = round9(est.mean);
      row["stderr"] = round9(est.stderr_);
      row["resonances"] = est.resonance_count;
      row["analytic"] = est.analytic;
      means.push_back(est.mean);
      stderrs.push_back(est.stderr_);
    } else {
      const PopulationResult est = population_dynamics(k, spec, lambda, energy, eta, pool_size,
                                                       warmup, sweeps, seed, threads);
      row["mean"] = round9(est.mean);
      row["stderr"] = round9(est.stderr_);
      row["resonances"] = est.resonance_count;
      row["collapsed"] = est.collapsed;
      means.push_back(est.mean);
      stderrs.push_back(est.stderr_);
    }
    estimates.push_back(std::move(row));
  }

  double value = means[0];
  double value_stderr = stderrs[0];
  ordered_json extrapolation;
  if (etas.size() == 2) {
    throw ConfigError("eta extrapolation needs at least three values; pass one or three or more");
  }
  if (etas.size() >= 3) {
    const EtaExtrapolation fit = extrapolate_eta(etas, means, stderrs);
    value = fit.value;
    value_stderr = fit.stderr_;
    extrapolation = {{"value", round9(fit.value)},
                     {"stderr", round9(fit.stderr_)},
                     {"slope", round9(fit.slope)},
                     {"dropped_point", fit.dropped_point},
                     {"etas_used", round9_list(fit.etas_used)}};
  }

  CommandOutput out;
  out.params = {{"K", k},          {"lambda", lambda},
                {"E", energy},     {"etas", etas},
                {"depth", depth},  {"n", n},
                {"seed", seed},    {"vertex", vertex_name},
                {"method", method}, {"disorder", disorder_echo(spec)}};
  if (method == "pool") {
    out.params["pool_size"] = pool_size;
    out.params["warmup"] = warmup;
    out.params["sweeps"] = sweeps;
  }
  out.result = {{"estimates", std::move(estimates)},
                {"value", round9(value)},
                {"stderr", round9(value_stderr)},
                {"threshold", round9(std::log(static_cast<double>(k)))},
                {"criterion", to_string(delocalization_criterion(value, value_stderr, k))}};
  if (!extrapolation.is_null()) out.result["extrapolation"] = std::move(extrapolation);
  return out;
}

CommandOutput cmd_acdensity(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  const double energy = p.require_double("E");
  const double eta = p.require_double("eta");
  const int depth = p.get_int("depth", default_depth(k));
  const int n = p.get_int("n", 2000);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const DensityEstimate est = ac_density(k, spec, lambda, energy, eta, depth, n, seed, threads);
  CommandOutput out;
  out.params = {{"K", k},         {"lambda", lambda}, {"E", energy},
                {"eta", eta},     {"depth", depth},   {"n", n},
                {"seed", seed},   {"disorder", disorder_echo(spec)}};
  out.result = {{"density", round9(est.mean)},
                {"ac_fraction", round9(est.ac_fraction)},
                {"stderr", round9(est.stderr_)},
                {"analytic", est.analytic}};
  return out;
}

CommandOutput cmd_phase(ParamReader& p) {
  const int k = p.require_int("K");
  PhaseGrid grid;
  grid.lambdas = grid_axis(p, "lambdas", "lambda", 0.0, 0.5, 6);
  grid.energies = grid_axis(p, "energies", "E", -4.0, 4.0, 17);
  const double eta = p.get_double("eta", 1e-3);
  const int depth = p.get_int("depth", default_depth(k));
  const int n = p.get_int("n", 400);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const PhaseMap map = scan(grid, k, spec, eta, depth, n, seed, threads);
  CommandOutput out;
  out.params = {{"K", k},
                {"lambdas", grid.lambdas},
                {"energies", grid.energies},
                {"eta", eta},
                {"depth", depth},
                {"n", n},
                {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = {{"map", ordered_json::parse(phase_to_json(map))}, {"csv", phase_to_csv(map)}};
  return out;
}

CommandOutput cmd_edge_window(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  const double eta = p.get_double("eta", 1e-3);
  const int depth = p.get_int("depth", default_depth(k));
  const int n = p.get_int("n", 400);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const EdgeWindowResult res = edge_window(k, spec, lambda, eta, depth, n, seed, threads);
  CommandOutput out;
  out.params = {{"K", k},        {"lambda", lambda}, {"eta", eta},
                {"depth", depth}, {"n", n},          {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = {{"delta", round9(res.delta)},
                {"delta_max", round9(res.delta_max)},
                {"resolution", round9(res.resolution)},
                {"holds_at_edge", res.holds_at_edge},
                {"probes_evaluated", res.probes_evaluated}};
  return out;
}

CommandOutput cmd_scatter(ParamReader& p) {
  const int k_branch = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  const std::vector<double> energies = grid_axis(p, "energies", "E", -3.0, 3.0, 13);
  const double eta = p.get_double("eta", 1e-3);
  const double k_wave = p.get_double("k", 1.5707963267948966);
  const int depth = p.get_int("depth", default_depth(k_branch));
  const int n = p.get_int("n", 500);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const ScatterProfile profile = transmission_profile(k_branch, spec, lambda, energies, eta,
                                                      k_wave, depth, n, seed, threads);
  ordered_json rows = ordered_json::array();
  for (const ScatterRow& r : profile.rows) {
    rows.push_back({{"E", round9(r.energy)},
                    {"k", round9(r.k)},
                    {"u_wire", round9(r.u_wire)},
                    {"mean_abs_R", round9(r.mean_abs_r)},
                    {"frac_subunitary", round9(r.frac_subunitary)},
                    {"mean_Im_G", round9(r.mean_im_g)}});
  }
  CommandOutput out;
  out.params = {{"K", k_branch}, {"lambda", lambda}, {"energies", energies},
                {"eta", eta},    {"k", k_wave},      {"depth", depth},
                {"n", n},        {"seed", seed},     {"disorder", disorder_echo(spec)}};
  out.result = {{"rows", std::move(rows)}, {"csv", scatter_to_csv(profile)}};
  return out;
}

// Uniform envelope for the verification commands.
ordered_json verify_result(const std::string& check, const ordered_json& params, std::int64_t n,
                           std::int64_t violations, ordered_json fitted, bool pass) {
  return {{"check", check},   {"params", params},
          {"n", n},           {"violations", violations},
          {"fitted_constants", std::move(fitted)}, {"pass", pass}};
}

CommandOutput cmd_verify_lb(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.require_double("lambda");
  const int depth = p.require_int("R");
  const int n = p.require_int("n");
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const MonotoneBoundReport rep = check_monotone_bound(k, spec, lambda, depth, n, seed, threads);
  CommandOutput out;
  out.params = {{"K", k}, {"lambda", lambda}, {"R", depth}, {"n", n}, {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = verify_result("lb", out.params, n, rep.violations,
                             {{"energy", round9(rep.energy)},
                              {"bound", round9(rep.bound)},
                              {"min_sample", round9(rep.min_sample)},
                              {"min_margin", round9(rep.min_margin)}},
                             rep.pass);
  return out;
}

CommandOutput cmd_verify_gap(ParamReader& p) {
  const int k = p.require_int("K");
  if (p.has("lambdas") && p.has("lambda")) {
    throw ConfigError("pass either 'lambda' or 'lambdas', not both");
  }
  std::vector<double> lambdas = p.has("lambdas") ? p.require_double_list("lambdas")
                                                 : std::vector<double>{p.require_double("lambda")};
  const int depth = p.get_int("depth", default_depth(k));
  const int n = p.get_int("n", 2000);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const LyapunovGapReport rep = check_lyapunov_gap(k, spec, lambdas, depth, n, seed, threads);
  ordered_json rows = ordered_json::array();
  for (const LyapunovGapRow& row : rep.rows) {
    rows.push_back({{"lambda", round9(row.lambda)},
                    {"threshold_distance", round9(row.threshold_distance)},
                    {"l_hat", round9(row.l_hat)},
                    {"l_hat_stderr", round9(row.l_hat_stderr)},
                    {"l0_ref", round9(row.l0_ref)},
                    {"gap", round9(row.gap)}});
  }
  CommandOutput out;
  out.params = {{"K", k}, {"lambdas", lambdas}, {"depth", depth}, {"n", n}, {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = verify_result("gap", out.params, n, 0, {{"rows", std::move(rows)}}, rep.pass);
  return out;
}

CommandOutput cmd_verify_trunc(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  const double energy = p.require_double("E");
  const double eta = p.require_double("eta");
  const int depth = p.require_int("R");
  const int margin = p.get_int("M", 6);
  const int n = p.get_int("n", 100);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  if (n < 1) throw ConfigError("need at least one instance");
  p.finish();

  std::vector<double> residuals(n), gaps(n), sums(n);
  parallel_for(n, threads, [&](std::int64_t s) {
    const TruncationReport rep =
        truncation_error(k, spec, lambda, energy, eta, depth, margin, seed,
                         substream(stream_group::kVerifySamples, s));
    residuals[s] = rep.identity_residual;
    gaps[s] = rep.triangle_gap;
    sums[s] = rep.boundary_sum;
  });
  std::sort(sums.begin(), sums.end());
  CommandOutput out;
  out.params = {{"K", k},   {"lambda", lambda}, {"E", energy}, {"eta", eta},
                {"R", depth}, {"M", margin},    {"n", n},      {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = verify_result(
      "trunc", out.params, n, 0,
      {{"max_identity_residual", round9(*std::max_element(residuals.begin(), residuals.end()))},
       {"min_triangle_gap", round9(*std::min_element(gaps.begin(), gaps.end()))},
       {"median_boundary_sum", round9(sums[sums.size() / 2])}},
      true);
  return out;
}

CommandOutput cmd_verify_boundary(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  const double energy = p.require_double("E");
  const int r_max = p.require_int("R");
  const int r_min = p.get_int("r_min", std::max(2, r_max - 4));
  const int n = p.get_int("n", 400);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const BoundaryDecayReport rep =
      boundary_decay(k, spec, lambda, energy, r_min, r_max, n, seed, threads);
  ordered_json depths = ordered_json::array();
  for (int d : rep.depths) depths.push_back(d);
  CommandOutput out;
  out.params = {{"K", k},       {"lambda", lambda}, {"E", energy}, {"r_min", r_min},
                {"R", r_max},   {"n", n},           {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = verify_result("boundary", out.params, rep.n_samples, 0,
                             {{"rate", round9(rep.rate)},
                              {"delta_hat", round9(rep.delta_hat)},
                              {"depths", std::move(depths)},
                              {"log_mean_max", round9_list(rep.log_mean_max)},
                              {"exceed_fraction", round9_list(rep.exceed_fraction)}},
                             rep.pass);
  return out;
}

CommandOutput cmd_verify_moments(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.get_double("lambda", 0.0);
  const double energy = p.require_double("E");
  const double eta = p.get_double("eta", 0.0);
  const double s = p.get_double("s", 0.5);
  const int depth = p.get_int("depth", 10);
  const int n = p.get_int("n", 400);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const FractionalMomentProfile prof =
      fractional_moment(k, spec, lambda, energy, eta, s, depth, n, seed, threads);
  const double slope_bound = -0.5 * s * std::log(static_cast<double>(k)) + 0.05;
  const double exact_slope = -0.5 * s * std::log(static_cast<double>(k));
  if (lambda == 0.0) {
    if (std::abs(prof.slope - exact_slope) > 1e-6) {
      throw VerificationError("clean moment slope " + std::to_string(prof.slope) +
                              " deviates from the closed form");
    }
  } else if (prof.slope > slope_bound) {
    throw VerificationError("moment slope " + std::to_string(prof.slope) +
                            " exceeds the decay bound " + std::to_string(slope_bound));
  }
  ordered_json depths = ordered_json::array();
  for (int d : prof.depths) depths.push_back(d);
  CommandOutput out;
  out.params = {{"K", k},     {"lambda", lambda}, {"E", energy}, {"eta", eta},
                {"s", s},     {"depth", depth},   {"n", n},      {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = verify_result("moments", out.params, n, 0,
                             {{"slope", round9(prof.slope)},
                              {"slope_bound", round9(slope_bound)},
                              {"exact_slope", round9(exact_slope)},
                              {"analytic", prof.analytic},
                              {"depths", std::move(depths)},
                              {"log_moment_mean", round9_list(prof.log_moment_mean)}},
                             true);
  return out;
}

CommandOutput cmd_verify_lifshitz(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.require_double("lambda");
  const int depth = p.require_int("R");
  const std::vector<double> deltas = p.require_double_list("deltas");
  const int n = p.get_int("n", 2000);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  // The truncated operator lives on depth R-1, matching the cut convention.
  const TreeTopology topo = TreeTopology::build(k, depth - 1);
  const EdgeProbabilityResult res =
      edge_probability(topo, spec, lambda, deltas, n, seed, threads);

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
    if (deltas[i + 1] >= deltas[i] && res.probabilities[i + 1] < res.probabilities[i]) {
      monotone = false;
    }
  }
  double fitted_c = 0.0;
  const double k_pow_r = std::pow(static_cast<double>(k), depth);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] > 0.0 && res.probabilities[i] > 0.0) {
      fitted_c = std::max(fitted_c,
                          res.probabilities[i] / (k_pow_r * std::pow(deltas[i], 1.5)));
    }
  }
  CommandOutput out;
  out.params = {{"K", k}, {"lambda", lambda}, {"R", depth}, {"deltas", deltas},
                {"n", n}, {"seed", seed},     {"disorder", disorder_echo(spec)}};
  out.result = verify_result("lifshitz", out.params, n, 0,
                             {{"probabilities", round9_list(res.probabilities)},
                              {"ci_low", round9_list(res.ci_low)},
                              {"ci_high", round9_list(res.ci_high)},
                              {"counts", res.counts},
                              {"spectrum_bottom", round9(res.spectrum_bottom)},
                              {"min_eig_mean", round9(res.min_eig_mean)},
                              {"min_eig_min", round9(res.min_eig_min)},
                              {"fitted_c", round9(fitted_c)},
                              {"monotone", monotone}},
                             monotone);
  return out;
}

CommandOutput cmd_verify_main(ParamReader& p) {
  const int k = p.require_int("K");
  const double lambda = p.require_double("lambda");
  const double energy = p.require_double("E");
  const int depth = p.require_int("R");
  const int margin = p.get_int("M", 6);
  const int n = p.get_int("n", 400);
  const std::uint64_t seed = p.get_u64("seed", 1);
  const DisorderSpec spec = p.disorder();
  const int threads = p.threads();
  p.finish();

  const MainTermReport rep =
      main_term_bound(k, spec, lambda, energy, depth, margin, n, seed, threads);
  CommandOutput out;
  out.params = {{"K", k},   {"lambda", lambda}, {"E", energy}, {"R", depth},
                {"M", margin}, {"n", n},        {"seed", seed},
                {"disorder", disorder_echo(spec)}};
  out.result = verify_result("main", out.params, n, rep.violations,
                             {{"fraction_above", round9(rep.fraction_above)},
                              {"threshold", round9(rep.threshold)},
                              {"free_ref", round9(rep.free_ref)},
                              {"l0_ref", round9(rep.l0_ref)},
                              {"delta_hat", round9(rep.delta_hat)},
                              {"delta_e", round9(rep.delta_e)},
                              {"edge_exceed_probability", round9(rep.edge_exceed_probability)},
                              {"decaying_correction", rep.decaying_correction}},
                             rep.pass);
  return out;
}

}  // namespace

std::string run_command(const std::string& command, const std::string& params_json) {
  using Handler = std::function<CommandOutput(ParamReader&)>;
  static const std::vector<std::pair<std::string, Handler>> handlers = {
      {"free", cmd_free},
      {"spectrum", cmd_spectrum},
      {"lyap", cmd_lyap},
      {"acdensity", cmd_acdensity},
      {"phase", cmd_phase},
      {"edge_window", cmd_edge_window},
      {"scatter", cmd_scatter},
      {"verify_lb", cmd_verify_lb},
      {"verify_gap", cmd_verify_gap},
      {"verify_trunc", cmd_verify_trunc},
      {"verify_boundary", cmd_verify_boundary},
      {"verify_moments", cmd_verify_moments},
      {"verify_lifshitz", cmd_verify_lifshitz},
      {"verify_main", cmd_verify_main},
  };
  const auto it = std::find_if(handlers.begin(), handlers.end(),
                               [&](const auto& h) { return h.first == command; });
  if (it == handlers.end()) throw ConfigError("unknown command: " + command);

  ParamReader reader(command, params_json);
  CommandOutput output = it->second(reader);

  ordered_json report;
  report["tool"] = {{"name", kToolName}, {"version", kVersion}};
  report["command"] = command;
  report["params"] = std::move(output.params);
  report["result"] = std::move(output.result);
  return report.dump(2);
}

}  // namespace bethe
