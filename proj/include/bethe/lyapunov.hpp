#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bethe/disorder.hpp"
#include "bethe/tree_green.hpp"

namespace bethe {

// Which Green value the exponent is read from: the forward value at a tree
// root (one parent missing), or the value at a vertex with all K+1 neighbors
// present. The two differ already at lambda = 0, so the choice is explicit
// everywhere rather than a convention buried in a formula.
enum class VertexKind { Rooted, Lattice };

// One disorder sample of the Green value at a vertex with all K+1 neighbors
// present: K+1 independent forward subtrees of the given depth plus a center
// potential, drawn from disjoint substream members of `group`.
cdouble sample_lattice_green(const TreeTopology& topo, const DisorderSpec& spec, double lambda,
                             const SpectralPoint& pt, std::uint64_t seed, std::uint64_t group,
                             std::int64_t sample, std::int64_t* resonances);

struct LyapunovEstimate {
  double mean = 0.0;     // average of -log |G| over samples
  double stderr_ = 0.0;
  double eta = 0.0;
  int depth = 0;
  int n_samples = 0;
  std::int64_t resonance_count = 0;
  bool analytic = false;  // clean-tree closed form, no sampling
};

// Finite-depth sample average of -log |G| at E + i eta. At lambda = 0 the
// finite-depth recursion inside the spectrum circles the fixed point without
// converging (the multiplier has modulus one), so that case returns the
// closed-form limit instead of iterating.
LyapunovEstimate estimate_finite_depth(int branching, const DisorderSpec& spec, double lambda,
                                       double energy, double eta, int depth, int n_samples,
                                       std::uint64_t seed, int threads,
                                       VertexKind vertex = VertexKind::Rooted);

// Smallest depth R with branching^R >= 10^4 leaves.
int default_depth(int branching);

struct PopulationResult {
  double mean = 0.0;       // -log |Gamma| under the pool distribution
  double stderr_ = 0.0;    // from per-sweep batch means
  double eta = 0.0;
  int pool_size = 0;
  int warmup_sweeps = 0;
  int measure_sweeps = 0;
  std::int64_t resonance_count = 0;
  bool collapsed = false;  // pool degenerated to one value (lambda > 0 only)
};

// Stationary forward distribution via a resampled pool, initialized at the
// clean-tree fixed point. Updates are sequential by construction; the threads
// argument is accepted for interface symmetry and ignored.
PopulationResult population_dynamics(int branching, const DisorderSpec& spec, double lambda,
                                     double energy, double eta, int pool_size, int warmup_sweeps,
                                     int measure_sweeps, std::uint64_t seed, int threads);

struct EtaExtrapolation {
  double value = 0.0;    // intercept at eta = 0
  double stderr_ = 0.0;
  double slope = 0.0;
  bool dropped_point = false;  // largest eta removed after a non-monotone profile
  std::vector<double> etas_used;
};

// Weighted linear fit of mean(eta) with extrapolation to eta = 0. A profile
// that is not monotone across the given etas drops the largest eta once and
// refits; the flag records that this happened.
EtaExtrapolation extrapolate_eta(std::span<const double> etas, std::span<const double> means,
                                 std::span<const double> stderrs);

enum class CriterionVerdict { Holds, Fails, Undecided };

// Compares an extrapolated exponent against log K with a two-sigma band.
CriterionVerdict delocalization_criterion(double value, double stderr_, int branching);
const char* to_string(CriterionVerdict verdict);

struct DensityEstimate {
  double mean = 0.0;           // Im G / pi at a homogeneous vertex
  double ac_fraction = 0.0;    // samples with Im G above 10 eta
  double stderr_ = 0.0;
  bool analytic = false;
};

// Spectral density at E + i eta from the homogeneous-vertex Green value.
DensityEstimate ac_density(int branching, const DisorderSpec& spec, double lambda, double energy,
                           double eta, int depth, int n_samples, std::uint64_t seed, int threads);

struct FractionalMomentProfile {
  double s = 0.5;
  std::vector<int> depths;
  std::vector<double> log_moment_mean;    // log of the sample mean of |G(0,x_r)|^s
  std::vector<double> log_moment_stderr;  // delta method on the sample mean
  double slope = 0.0;                     // least-squares rate in depth
  int n_samples = 0;
  bool analytic = false;
};

// Moments E[|G(0,x_r)|^s] along the leftmost branch, r = 1..depth, all depths
// read from one recursion per sample. s must lie in (0,1).
FractionalMomentProfile fractional_moment(int branching, const DisorderSpec& spec, double lambda,
                                          double energy, double eta, double s, int depth,
                                          int n_samples, std::uint64_t seed, int threads);

}  // namespace bethe
