#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "bethe/disorder.hpp"
#include "bethe/tree_green.hpp"

namespace bethe {

// Deterministic operator inequality at the spectrum bottom: for potentials
// supported in [-1,1], the forward Green value at E_lambda dominates the
// clean value shifted two disorder widths down, with equality when every
// potential entry is +1. Any sampled violation is a hard failure carrying the
// offending (seed, stream) pair.
struct MonotoneBoundReport {
  double lambda = 0.0;
  double energy = 0.0;      // pinned to the spectrum bottom -(2 sqrt K + lambda)
  double bound = 0.0;       // saturating configuration at the same depth
  double min_sample = 0.0;  // smallest sampled left side
  double min_margin = 0.0;  // min_sample - bound
  int depth = 0;
  int n_samples = 0;
  std::int64_t violations = 0;
  bool pass = false;
};

MonotoneBoundReport check_monotone_bound(int branching, const DisorderSpec& spec, double lambda,
                                         int depth, int n_samples, std::uint64_t seed,
                                         int threads);

// Exponent gap at the spectrum bottom: the sampled exponent at E_lambda must
// sit three standard errors under the clean reference -log Gamma_0(E_0 - 2
// lambda), which itself must sit under log K. Reported per lambda so a sweep
// shows the gap shrinking as lambda approaches the weak-disorder threshold.
struct LyapunovGapRow {
  double lambda = 0.0;
  double threshold_distance = 0.0;  // weak-disorder threshold minus lambda
  double l_hat = 0.0;
  double l_hat_stderr = 0.0;
  double l0_ref = 0.0;
  double gap = 0.0;  // log K - l_hat
};

struct LyapunovGapReport {
  std::vector<LyapunovGapRow> rows;
  int depth = 0;
  int n_samples = 0;
  bool pass = false;
};

LyapunovGapReport check_lyapunov_gap(int branching, const DisorderSpec& spec,
                                     std::span<const double> lambdas, int depth, int n_samples,
                                     std::uint64_t seed, int threads);

// One-sample resolvent surgery across the depth-R cut: removing the edges
// below depth R-1 changes the root Green value by exactly minus the sum of
// truncated-times-full path products over the cut, and in magnitude by at
// most the boundary sum S. Both are asserted, not just reported.
struct TruncationReport {
  int truncation_depth = 0;  // R; the truncated operator lives on depth <= R-1
  int full_depth = 0;        // R + M proxy for the infinite tree
  cdouble full_value;
  cdouble truncated_value;
  double boundary_sum = 0.0;       // S = sum |G_trunc(0,parent)| |G_full(0,x)|
  double identity_residual = 0.0;  // signed identity mismatch
  double triangle_gap = 0.0;       // S - |full - truncated|, >= -1e-10
  bool pass = false;
};

TruncationReport truncation_error(int branching, const DisorderSpec& spec, double lambda,
                                  double energy, double eta, int truncation_depth, int margin,
                                  std::uint64_t seed, std::uint64_t stream);

// Decay of the largest boundary Green value as the truncation deepens. The
// per-depth sample means fit a rate; the envelope check counts samples above
// 1.5x the fitted line, a margin that marks genuine outliers rather than
// ordinary fluctuation around the mean.
struct BoundaryDecayReport {
  std::vector<int> depths;
  std::vector<double> log_mean_max;  // log of the mean over samples of the boundary max
  std::vector<double> exceed_fraction;
  double rate = 0.0;       // decay per level, positive when shrinking
  double delta_hat = 0.0;  // rate / log K - 1/2
  int n_samples = 0;
  bool pass = false;  // rate above (1/2) log K and exceedances not growing
};

BoundaryDecayReport boundary_decay(int branching, const DisorderSpec& spec, double lambda,
                                   double energy, int depth_min, int depth_max, int n_samples,
                                   std::uint64_t seed, int threads);

// Lower bound on the full Green magnitude from its truncation: the exact
// triangle step |G| >= G_trunc - S is asserted per sample; the composed
// threshold against the clean reference is counted as a fraction. The
// correction bracket uses the decaying exponent reading; the growing reading
// exceeds one for every depth and cannot bound anything, so it is rejected
// and flagged in the report rather than silently substituted.
struct MainTermReport {
  double lambda = 0.0;
  double energy = 0.0;
  int truncation_depth = 0;
  int full_depth = 0;
  int n_samples = 0;
  std::int64_t violations = 0;   // first-inequality failures (hard)
  double fraction_above = 0.0;   // samples meeting the composed threshold
  double threshold = 0.0;        // clean reference times the correction bracket
  double free_ref = 0.0;         // Gamma_0(E_0 - 2 lambda)
  double l0_ref = 0.0;           // -log of the same
  double delta_hat = 0.0;        // boundary-decay fit reused in the bracket
  double delta_e = 0.0;          // 5th percentile of sampled minimum eigenvalues - E_lambda
  double edge_exceed_probability = 0.0;  // fraction of min eigenvalues under E_lambda + delta_e
  bool decaying_correction = true;
  bool pass = false;
};

MainTermReport main_term_bound(int branching, const DisorderSpec& spec, double lambda,
                               double energy, int truncation_depth, int margin, int n_samples,
                               std::uint64_t seed, int threads);

}  // namespace bethe
