#include "bethe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bethe/errors.hpp"
#include "bethe/lyapunov.hpp"
#include "bethe/oracle.hpp"
#include "bethe/parallel.hpp"
#include "bethe/rng.hpp"

namespace bethe {

namespace {

void require_support_in_unit_interval(const DisorderSpec& spec) {
  if (!spec.bounded() || spec.support_lo() < -1.0 || spec.support_hi() > 1.0) {
    throw ConfigError("this check needs potentials supported in [-1,1]");
  }
}

std::string sample_tag(std::uint64_t seed, std::uint64_t stream) {
  return "seed=" + std::to_string(seed) + " stream=" + std::to_string(stream);
}

// Boundary magnitude sum across the cut between depth R-1 and depth R, plus
// the signed cut sum used by the resolvent identity.
struct CutSums {
  cdouble signed_sum{0.0, 0.0};
  double magnitude_sum = 0.0;
};

CutSums cut_sums(const TreeTopology& topo_full, const GreenState& state_full,
                 const TreeTopology& topo_trunc, const GreenState& state_trunc, int cut_depth) {
  const std::vector<cdouble> trunc_level = level_green(topo_trunc, state_trunc, cut_depth - 1);
  const std::vector<cdouble> full_level = level_green(topo_full, state_full, cut_depth);
  const std::int64_t parent_begin = topo_full.level_begin(cut_depth - 1);
  const std::int64_t begin = topo_full.level_begin(cut_depth);
  CutSums sums;
  for (std::int64_t i = begin; i < topo_full.level_end(cut_depth); ++i) {
    const cdouble trunc_part = trunc_level[topo_full.parent(i) - parent_begin];
    const cdouble full_part = full_level[i - begin];
    sums.signed_sum += trunc_part * full_part;
    sums.magnitude_sum += std::abs(trunc_part) * std::abs(full_part);
  }
  return sums;
}

double ols_slope(std::span<const int> x, std::span<const double> y, double* intercept) {
  const std::int64_t n = std::ssize(x);
  double xb = 0, yb = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    xb += x[i];
    yb += y[i];
  }
  xb /= static_cast<double>(n);
  yb /= static_cast<double>(n);
  double num = 0, den = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    num += (x[i] - xb) * (y[i] - yb);
    den += (x[i] - xb) * (x[i] - xb);
  }
  const double slope = num / den;
  if (intercept != nullptr) *intercept = yb - slope * xb;
  return slope;
}

}  // namespace

MonotoneBoundReport check_monotone_bound(int branching, const DisorderSpec& spec, double lambda,
                                         int depth, int n_samples, std::uint64_t seed,
                                         int threads) {
  if (!(lambda > 0.0)) throw ConfigError("the bound is about lambda > 0");
  require_support_in_unit_interval(spec);
  if (n_samples < 1) throw ConfigError("need at least one sample");

  const TreeTopology topo = TreeTopology::build(branching, depth);
  const double energy = spectrum_edges(branching, lambda).first;
  const SpectralPoint pt{energy, 0.0, lambda};

  // Saturating configuration, evaluated through the identical code path so a
  // V = +1 sample reproduces it bit for bit.
  const PotentialSample extremal = PotentialSample::constant(topo, 1.0, lambda);
  const double bound = forward_recursion(topo, extremal, pt).gamma[0].real();
  if (!(bound > 0.0)) throw VerificationError("saturating configuration is not positive");

  std::vector<double> lefts(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t s) {
    const std::uint64_t stream = substream(stream_group::kVerifySamples, s);
    const PotentialSample pot = PotentialSample::draw(topo, spec, lambda, seed, stream);
    lefts[s] = forward_recursion(topo, pot, pt).gamma[0].real();
  });

  MonotoneBoundReport report;
  report.lambda = lambda;
  report.energy = energy;
  report.bound = bound;
  report.depth = depth;
  report.n_samples = n_samples;
  report.min_sample = *std::min_element(lefts.begin(), lefts.end());
  report.min_margin = report.min_sample - bound;

  const double slack = 1e-12 * (1.0 + std::abs(bound));
  for (std::int64_t s = 0; s < n_samples; ++s) {
    if (!(lefts[s] > 0.0) || lefts[s] < bound - slack) {
      throw VerificationError(
          "monotone bound violated at " +
          sample_tag(seed, substream(stream_group::kVerifySamples, s)));
    }
  }
  report.violations = 0;
  report.pass = true;
  return report;
}

LyapunovGapReport check_lyapunov_gap(int branching, const DisorderSpec& spec,
                                     std::span<const double> lambdas, int depth, int n_samples,
                                     std::uint64_t seed, int threads) {
  if (lambdas.empty()) throw ConfigError("need at least one lambda");
  require_support_in_unit_interval(spec);
  const double threshold_lambda = weak_disorder_threshold(branching);
  const double log_k = std::log(static_cast<double>(branching));
  const double e0 = -2.0 * std::sqrt(static_cast<double>(branching));

  LyapunovGapReport report;
  report.depth = depth;
  report.n_samples = n_samples;
  std::uint64_t row_index = 0;
  for (double lambda : lambdas) {
    if (!(lambda >= 0.0 && lambda < threshold_lambda)) {
      throw ConfigError("lambda must lie in [0, weak-disorder threshold)");
    }
    const double edge = spectrum_edges(branching, lambda).first;
    const std::uint64_t row_seed = derive_seed(seed, stream_group::kVerifySamples, row_index);
    const LyapunovEstimate est = estimate_finite_depth(branching, spec, lambda, edge, 0.0, depth,
                                                       n_samples, row_seed, threads);
    LyapunovGapRow row;
    row.lambda = lambda;
    row.threshold_distance = threshold_lambda - lambda;
    row.l_hat = est.mean;
    row.l_hat_stderr = est.stderr_;
    row.l0_ref = free_lyapunov(branching, e0 - 2.0 * lambda);
    row.gap = log_k - est.mean;
    if (!(row.l0_ref < log_k)) {
      throw VerificationError("clean reference exponent reached log K at lambda=" +
                              std::to_string(lambda));
    }
    if (est.mean + 3.0 * est.stderr_ > row.l0_ref + 1e-12) {
      throw VerificationError("sampled exponent exceeds the clean ceiling at lambda=" +
                              std::to_string(lambda) + ", seed=" + std::to_string(row_seed));
    }
    report.rows.push_back(row);
    ++row_index;
  }
  report.pass = true;
  return report;
}

TruncationReport truncation_error(int branching, const DisorderSpec& spec, double lambda,
                                  double energy, double eta, int truncation_depth, int margin,
                                  std::uint64_t seed, std::uint64_t stream) {
  if (truncation_depth < 1) throw ConfigError("truncation depth must be at least 1");
  if (margin < 2) throw ConfigError("full-tree margin must be at least 2");
  if (!(eta > 0.0)) throw ConfigError("truncation check needs eta > 0");

  const int full_depth = truncation_depth + margin;
  const TreeTopology topo_full = TreeTopology::build(branching, full_depth);
  const TreeTopology topo_trunc = TreeTopology::build(branching, truncation_depth - 1);
  const PotentialSample pot = PotentialSample::draw(topo_full, spec, lambda, seed, stream);
  const SpectralPoint pt{energy, eta, lambda};

  const GreenState state_full = forward_recursion(topo_full, pot, pt);
  const GreenState state_trunc = forward_recursion(topo_trunc, pot, pt);
  const CutSums sums = cut_sums(topo_full, state_full, topo_trunc, state_trunc, truncation_depth);

  TruncationReport report;
  report.truncation_depth = truncation_depth;
  report.full_depth = full_depth;
  report.full_value = state_full.gamma[0];
  report.truncated_value = state_trunc.gamma[0];
  report.boundary_sum = sums.magnitude_sum;
  const cdouble difference = report.full_value - report.truncated_value;
  report.identity_residual = std::abs(difference + sums.signed_sum);
  report.triangle_gap = sums.magnitude_sum - std::abs(difference);

  const double tol = 1e-10 * (1.0 + std::abs(report.full_value));
  if (report.identity_residual > tol) {
    throw VerificationError("resolvent identity residual " +
                            std::to_string(report.identity_residual) + " at " +
                            sample_tag(seed, stream));
  }
  if (report.triangle_gap < -1e-10) {
    throw VerificationError("boundary sum fails the triangle bound at " +
                            sample_tag(seed, stream));
  }
  report.pass = true;
  return report;
}

BoundaryDecayReport boundary_decay(int branching, const DisorderSpec& spec, double lambda,
                                   double energy, int depth_min, int depth_max, int n_samples,
                                   std::uint64_t seed, int threads) {
  if (depth_min < 2 || depth_max <= depth_min) {
    throw ConfigError("need 2 <= depth_min < depth_max");
  }
  const int n_eff = (lambda == 0.0) ? 1 : n_samples;  // clean case is deterministic
  if (n_eff < 1) throw ConfigError("need at least one sample");

  std::vector<TreeTopology> topos;
  for (int r = depth_min; r <= depth_max; ++r) topos.push_back(TreeTopology::build(branching, r - 1));
  const TreeTopology topo_draw = TreeTopology::build(branching, depth_max - 1);
  const SpectralPoint pt{energy, 0.0, lambda};
  const int n_depths = static_cast<int>(topos.size());

  std::vector<std::vector<double>> maxima(n_depths, std::vector<double>(n_eff));
  parallel_for(n_eff, threads, [&](std::int64_t s) {
    const std::uint64_t stream = substream(stream_group::kVerifySamples, s);
    const PotentialSample pot = PotentialSample::draw(topo_draw, spec, lambda, seed, stream);
    for (int d = 0; d < n_depths; ++d) {
      const GreenState state = forward_recursion(topos[d], pot, pt);
      const std::vector<cdouble> level = level_green(topos[d], state, topos[d].depth);
      double best = 0.0;
      for (const cdouble& g : level) best = std::max(best, std::abs(g));
      maxima[d][s] = best;
    }
  });

  BoundaryDecayReport report;
  report.n_samples = n_eff;
  std::vector<int> depths(n_depths);
  for (int d = 0; d < n_depths; ++d) {
    depths[d] = depth_min + d;
    report.log_mean_max.push_back(std::log(compensated_total(maxima[d]) / n_eff));
  }
  report.depths = depths;

  double intercept = 0.0;
  const double slope = ols_slope(depths, report.log_mean_max, &intercept);
  report.rate = -slope;
  report.delta_hat = report.rate / std::log(static_cast<double>(branching)) - 0.5;

  for (int d = 0; d < n_depths; ++d) {
    const double envelope = 1.5 * std::exp(intercept + slope * depths[d]);
    std::int64_t above = 0;
    for (double m : maxima[d]) above += (m > envelope) ? 1 : 0;
    report.exceed_fraction.push_back(static_cast<double>(above) / n_eff);
  }
  report.pass = report.rate > 0.5 * std::log(static_cast<double>(branching)) &&
                report.exceed_fraction.back() <= report.exceed_fraction.front() + 1e-12;
  return report;
}

MainTermReport main_term_bound(int branching, const DisorderSpec& spec, double lambda,
                               double energy, int truncation_depth, int margin, int n_samples,
                               std::uint64_t seed, int threads) {
  require_support_in_unit_interval(spec);
  if (!(lambda > 0.0 && lambda < weak_disorder_threshold(branching))) {
    throw ConfigError("lambda must lie in (0, weak-disorder threshold)");
  }
  if (truncation_depth < 3) throw ConfigError("truncation depth must be at least 3");
  if (margin < 2) throw ConfigError("full-tree margin must be at least 2");
  if (n_samples < 2) throw ConfigError("need at least two samples");

  const int R = truncation_depth;
  const TreeTopology topo_full = TreeTopology::build(branching, R + margin);
  const TreeTopology topo_trunc = TreeTopology::build(branching, R - 1);
  const SpectralPoint pt{energy, 0.0, lambda};
  const double edge = spectrum_edges(branching, lambda).first;

  std::vector<double> g_full_abs(n_samples);
  std::vector<double> first_margin(n_samples);
  std::vector<double> min_eigs(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t s) {
    const std::uint64_t stream = substream(stream_group::kVerifySamples, s);
    const PotentialSample pot = PotentialSample::draw(topo_full, spec, lambda, seed, stream);
    const GreenState state_full = forward_recursion(topo_full, pot, pt);
    const GreenState state_trunc = forward_recursion(topo_trunc, pot, pt);
    const CutSums sums = cut_sums(topo_full, state_full, topo_trunc, state_trunc, R);
    g_full_abs[s] = std::abs(state_full.gamma[0]);
    first_margin[s] =
        g_full_abs[s] - (state_trunc.gamma[0].real() - sums.magnitude_sum);
    const EigenResult eig = smallest_eigenvalue(assemble(topo_trunc, pot));
    if (!eig.converged) throw NumericsError("eigenvalue iteration did not converge");
    min_eigs[s] = eig.value;
  });

  MainTermReport report;
  report.lambda = lambda;
  report.energy = energy;
  report.truncation_depth = R;
  report.full_depth = R + margin;
  report.n_samples = n_samples;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    if (first_margin[s] < -1e-10) {
      throw VerificationError("truncation lower bound violated at " +
                              sample_tag(seed, substream(stream_group::kVerifySamples, s)));
    }
  }
  report.violations = 0;

  std::vector<double> sorted = min_eigs;
  std::sort(sorted.begin(), sorted.end());
  const auto pct_index = static_cast<std::int64_t>(0.05 * (n_samples - 1));
  report.delta_e = sorted[pct_index] - edge;
  std::int64_t under = 0;
  for (double mu : min_eigs) under += (mu < edge + report.delta_e) ? 1 : 0;
  report.edge_exceed_probability = static_cast<double>(under) / n_samples;

  const BoundaryDecayReport decay = boundary_decay(branching, spec, lambda, energy,
                                                   std::max(2, R - 4), R, n_samples, seed, threads);
  report.delta_hat = decay.delta_hat;

  const double e0 = -2.0 * std::sqrt(static_cast<double>(branching));
  report.free_ref = free_forward_green(branching, {e0 - 2.0 * lambda, 0.0}).real();
  report.l0_ref = -std::log(report.free_ref);
  const double log_k = std::log(static_cast<double>(branching));
  const double bracket = 1.0 - std::exp(-0.5 * report.delta_hat * R * log_k) -
                         std::exp(R * (log_k - 2.0 * report.l0_ref));
  report.threshold = report.free_ref * bracket;

  std::int64_t above = 0;
  for (double g : g_full_abs) above += (g >= report.threshold) ? 1 : 0;
  report.fraction_above = static_cast<double>(above) / n_samples;
  report.pass = true;
  return report;
}

}  // namespace bethe
