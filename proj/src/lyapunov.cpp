#include "bethe/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bethe/errors.hpp"
#include "bethe/parallel.hpp"
#include "bethe/rng.hpp"

namespace bethe {

cdouble sample_lattice_green(const TreeTopology& topo, const DisorderSpec& spec, double lambda,
                             const SpectralPoint& pt, std::uint64_t seed, std::uint64_t group,
                             std::int64_t sample, std::int64_t* resonances) {
  const int K = topo.branching;
  const std::uint64_t base = static_cast<std::uint64_t>(sample) * (K + 2);
  std::vector<cdouble> gammas(K + 1);
  for (int j = 0; j <= K; ++j) {
    gammas[j] = forward_root(topo, spec, lambda, seed, substream(group, base + j), pt, resonances);
  }
  RandomStream rs(seed, substream(group, base + K + 1));
  const double v0 = spec.draw_at(rs, 0);
  return homogeneous_vertex_green(lambda, v0, pt, gammas);
}

LyapunovEstimate estimate_finite_depth(int branching, const DisorderSpec& spec, double lambda,
                                       double energy, double eta, int depth, int n_samples,
                                       std::uint64_t seed, int threads, VertexKind vertex) {
  if (eta < 0.0) throw ConfigError("eta must be nonnegative");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (depth < 1) throw ConfigError("depth must be at least 1");
  if (n_samples < 2) throw ConfigError("need at least two samples");

  LyapunovEstimate out;
  out.eta = eta;
  out.depth = depth;
  out.n_samples = n_samples;

  if (lambda == 0.0) {
    const cdouble z{energy, eta};
    const cdouble g = (vertex == VertexKind::Rooted) ? free_forward_green(branching, z)
                                                     : free_lattice_green(branching, z);
    out.mean = -std::log(std::abs(g));
    out.analytic = true;
    return out;
  }

  const TreeTopology topo = TreeTopology::build(branching, depth);
  const SpectralPoint pt{energy, eta, lambda};
  std::vector<double> logs(n_samples);
  std::vector<std::int64_t> resonances(n_samples, 0);
  parallel_for(n_samples, threads, [&](std::int64_t s) {
    cdouble g;
    if (vertex == VertexKind::Rooted) {
      const std::uint64_t stream = substream(stream_group::kLyapunovSamples, s);
      g = forward_root(topo, spec, lambda, seed, stream, pt, &resonances[s]);
    } else {
      g = sample_lattice_green(topo, spec, lambda, pt, seed, stream_group::kLyapunovSamples, s,
                               &resonances[s]);
    }
    logs[s] = -std::log(std::abs(g));
  });

  const MeanStderr ms = mean_stderr(logs);
  out.mean = ms.mean;
  out.stderr_ = ms.stderr_;
  out.resonance_count = std::accumulate(resonances.begin(), resonances.end(), std::int64_t{0});
  return out;
}

int default_depth(int branching) {
  if (branching < 2) throw ConfigError("tree branching must be at least 2");
  int depth = 1;
  double leaves = branching;
  while (leaves < 1e4) {
    leaves *= branching;
    ++depth;
  }
  return depth;
}

PopulationResult population_dynamics(int branching, const DisorderSpec& spec, double lambda,
                                     double energy, double eta, int pool_size, int warmup_sweeps,
                                     int measure_sweeps, std::uint64_t seed, int /*threads*/) {
  if (branching < 2) throw ConfigError("tree branching must be at least 2");
  if (pool_size < 2) throw ConfigError("pool size must be at least 2");
  if (warmup_sweeps < 0 || measure_sweeps < 1) throw ConfigError("bad sweep counts");
  if (eta < 0.0 || lambda < 0.0) throw ConfigError("eta and lambda must be nonnegative");

  const cdouble z{energy, eta};
  const int K = branching;
  const std::int64_t n = pool_size;
  std::vector<cdouble> pool(n, free_forward_green(branching, z));

  PopulationResult out;
  out.eta = eta;
  out.pool_size = pool_size;
  out.warmup_sweeps = warmup_sweeps;
  out.measure_sweeps = measure_sweeps;

  std::vector<double> batch_means;
  batch_means.reserve(measure_sweeps);
  const int total_sweeps = warmup_sweeps + measure_sweeps;
  for (int sweep = 0; sweep < total_sweeps; ++sweep) {
    RandomStream rs_pot(seed, substream(stream_group::kPopulationPotential, sweep));
    RandomStream rs_pick(seed, substream(stream_group::kPopulationPick, sweep));
    for (std::int64_t i = 0; i < n; ++i) {
      cdouble den = lambda * spec.draw_at(rs_pot, static_cast<std::uint64_t>(i)) - z;
      for (int k = 0; k < K; ++k) {
        const double u = rs_pick.uniform_at(static_cast<std::uint64_t>(i) * K + k);
        const auto idx = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(u * n));
        den -= pool[idx];
      }
      const double mag = std::abs(den);
      if (mag < 1e-300) {
        ++out.resonance_count;
        den = (mag == 0.0) ? cdouble{1e-300, 0.0} : den * (1e-300 / mag);
      }
      pool[i] = 1.0 / den;
    }
    if (sweep >= warmup_sweeps) {
      CompensatedSum acc;
      for (const cdouble& g : pool) acc.add(-std::log(std::abs(g)));
      batch_means.push_back(acc.value() / static_cast<double>(n));
    }
  }

  const MeanStderr ms = mean_stderr(batch_means);
  out.mean = ms.mean;
  out.stderr_ = ms.stderr_;

  if (lambda > 0.0) {
    double spread = 0.0;
    for (const cdouble& g : pool) spread = std::max(spread, std::abs(g - pool[0]));
    out.collapsed = spread < 1e-12 * (1.0 + std::abs(pool[0]));
  }
  return out;
}

EtaExtrapolation extrapolate_eta(std::span<const double> etas, std::span<const double> means,
                                 std::span<const double> stderrs) {
  const std::int64_t n = std::ssize(etas);
  if (n < 3) throw ConfigError("eta extrapolation needs at least three points");
  if (std::ssize(means) != n || std::ssize(stderrs) != n) {
    throw ConfigError("eta extrapolation inputs must have equal lengths");
  }
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return etas[a] < etas[b]; });

  std::vector<double> x, y, sig;
  for (auto i : order) {
    x.push_back(etas[i]);
    y.push_back(means[i]);
    sig.push_back(stderrs[i]);
  }

  EtaExtrapolation out;
  if (n >= 3) {
    bool up = false, down = false;
    for (std::int64_t i = 0; i + 1 < n; ++i) {
      if (y[i + 1] > y[i]) up = true;
      if (y[i + 1] < y[i]) down = true;
    }
    if (up && down) {
      x.pop_back();
      y.pop_back();
      sig.pop_back();
      out.dropped_point = true;
    }
  }

  const std::int64_t m = std::ssize(x);
  const bool have_sigma = std::any_of(sig.begin(), sig.end(), [](double s) { return s > 0.0; });
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::int64_t i = 0; i < m; ++i) {
    const double w = have_sigma ? 1.0 / (std::max(sig[i], 1e-12) * std::max(sig[i], 1e-12)) : 1.0;
    S += w;
    Sx += w * x[i];
    Sy += w * y[i];
    Sxx += w * x[i] * x[i];
    Sxy += w * x[i] * y[i];
  }
  const double det = S * Sxx - Sx * Sx;
  if (!(det > 0.0)) throw ConfigError("eta extrapolation needs two distinct eta values");
  out.slope = (S * Sxy - Sx * Sy) / det;
  out.value = (Sxx * Sy - Sx * Sxy) / det;
  double var_intercept = Sxx / det;
  if (!have_sigma) {
    double rss = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
      const double r = y[i] - (out.value + out.slope * x[i]);
      rss += r * r;
    }
    var_intercept *= (m > 2) ? rss / static_cast<double>(m - 2) : 0.0;
  }
  out.stderr_ = std::sqrt(std::max(0.0, var_intercept));
  out.etas_used = std::move(x);
  return out;
}

CriterionVerdict delocalization_criterion(double value, double stderr_, int branching) {
  const double threshold = std::log(static_cast<double>(branching));
  if (value + 2.0 * stderr_ < threshold) return CriterionVerdict::Holds;
  if (value - 2.0 * stderr_ >= threshold) return CriterionVerdict::Fails;
  return CriterionVerdict::Undecided;
}

const char* to_string(CriterionVerdict verdict) {
  switch (verdict) {
    case CriterionVerdict::Holds: return "holds";
    case CriterionVerdict::Fails: return "fails";
    default: return "undecided";
  }
}

DensityEstimate ac_density(int branching, const DisorderSpec& spec, double lambda, double energy,
                           double eta, int depth, int n_samples, std::uint64_t seed, int threads) {
  if (eta < 0.0 || lambda < 0.0) throw ConfigError("eta and lambda must be nonnegative");
  constexpr double kInvPi = 0.3183098861837907;
  DensityEstimate out;
  if (lambda == 0.0) {
    const double im = free_lattice_green(branching, {energy, eta}).imag();
    out.mean = im * kInvPi;
    out.ac_fraction = im > 10.0 * eta ? 1.0 : 0.0;
    out.analytic = true;
    return out;
  }
  if (depth < 1) throw ConfigError("depth must be at least 1");
  if (n_samples < 2) throw ConfigError("need at least two samples");
  const TreeTopology topo = TreeTopology::build(branching, depth);
  const SpectralPoint pt{energy, eta, lambda};
  std::vector<double> densities(n_samples);
  std::vector<double> above(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t s) {
    std::int64_t scratch = 0;
    const cdouble g = sample_lattice_green(topo, spec, lambda, pt, seed,
                                           stream_group::kDensitySamples, s, &scratch);
    densities[s] = g.imag() * kInvPi;
    above[s] = g.imag() > 10.0 * eta ? 1.0 : 0.0;
  });
  const MeanStderr ms = mean_stderr(densities);
  out.mean = ms.mean;
  out.stderr_ = ms.stderr_;
  out.ac_fraction = compensated_total(above) / static_cast<double>(n_samples);
  return out;
}

FractionalMomentProfile fractional_moment(int branching, const DisorderSpec& spec, double lambda,
                                          double energy, double eta, double s, int depth,
                                          int n_samples, std::uint64_t seed, int threads) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("moment order must lie in (0,1)");
  if (depth < 2) throw ConfigError("moment profile needs depth at least 2");
  if (eta < 0.0 || lambda < 0.0) throw ConfigError("eta and lambda must be nonnegative");

  FractionalMomentProfile out;
  out.s = s;
  out.n_samples = n_samples;
  out.depths.resize(depth);
  std::iota(out.depths.begin(), out.depths.end(), 1);

  if (lambda == 0.0) {
    const double log_g = std::log(std::abs(free_forward_green(branching, {energy, eta})));
    for (int r = 1; r <= depth; ++r) {
      out.log_moment_mean.push_back(s * (r + 1) * log_g);
      out.log_moment_stderr.push_back(0.0);
    }
    out.slope = s * log_g;
    out.analytic = true;
    return out;
  }

  if (n_samples < 2) throw ConfigError("need at least two samples");
  const TreeTopology topo = TreeTopology::build(branching, depth);
  const SpectralPoint pt{energy, eta, lambda};
  std::vector<std::vector<double>> weight(depth, std::vector<double>(n_samples));
  parallel_for(n_samples, threads, [&](std::int64_t smp) {
    const std::uint64_t stream = substream(stream_group::kMomentSamples, smp);
    const PotentialSample pot = PotentialSample::draw(topo, spec, lambda, seed, stream);
    const GreenState state = forward_recursion(topo, pot, pt);
    double log_g = std::log(std::abs(state.gamma[0]));
    std::int64_t node = 0;
    for (int r = 1; r <= depth; ++r) {
      node = topo.child(node, 0);
      log_g += std::log(std::abs(state.gamma[node]));
      weight[r - 1][smp] = std::exp(s * log_g);
    }
  });

  for (int r = 1; r <= depth; ++r) {
    const MeanStderr ms = mean_stderr(weight[r - 1]);
    if (!(ms.mean > 0.0) || !std::isfinite(ms.mean)) {
      throw NumericsError("fractional moment mean is degenerate");
    }
    out.log_moment_mean.push_back(std::log(ms.mean));
    out.log_moment_stderr.push_back(ms.stderr_ / ms.mean);
  }

  double xb = 0, yb = 0;
  for (int r = 0; r < depth; ++r) {
    xb += out.depths[r];
    yb += out.log_moment_mean[r];
  }
  xb /= depth;
  yb /= depth;
  double num = 0, den = 0;
  for (int r = 0; r < depth; ++r) {
    num += (out.depths[r] - xb) * (out.log_moment_mean[r] - yb);
    den += (out.depths[r] - xb) * (out.depths[r] - xb);
  }
  out.slope = num / den;
  return out;
}

}  // namespace bethe
