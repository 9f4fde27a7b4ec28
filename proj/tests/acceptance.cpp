// Acceptance gate: one criterion per function, one [PASS]/[FAIL] line each.
// With no argument every criterion runs; a single numeric argument selects
// one. The exit code is the number of failed criteria, so a harness can pin
// an expected failure on a specific criterion without masking the others.
//
// Criterion 2 is expected to stay red: the smallest eigenvalue of the free
// depth-10 binary tree is -2*sqrt(2)*cos(pi/12), which sits 0.0964 above the
// infinite-tree band bottom, and the required gap is 0.05. The finite-depth
// gap is 2*sqrt(K)*(1 - cos(pi/(R+2))), so at K=2 the requirement is first
// met at depth 15. The check runs faithfully and reports the measured gap.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bethe/disorder.hpp"
#include "bethe/errors.hpp"
#include "bethe/lyapunov.hpp"
#include "bethe/oracle.hpp"
#include "bethe/phase.hpp"
#include "bethe/rng.hpp"
#include "bethe/scatter.hpp"
#include "bethe/tree_green.hpp"
#include "bethe/verify.hpp"

namespace {

using namespace bethe;

constexpr double kPi = 3.141592653589793;
constexpr double kLog2 = 0.6931471805599453;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

const DisorderSpec& uniform_unit() {
  static const DisorderSpec spec = DisorderSpec::uniform_symmetric(1.0);
  return spec;
}

// 1. Clean exponent from the eta ladder matches the closed form at six
// energies spanning band center, band edge, and beyond.
Outcome clean_exponent_closed_form() {
  const std::vector<double> etas = {1e-2, 1e-3, 1e-4};
  double worst_err = 0.0;
  double worst_sigma = 0.0;
  bool ok = true;
  for (double energy : {0.0, 1.0, 2.0, 2.5, 3.0, 3.5}) {
    std::vector<double> means, sigmas;
    for (double eta : etas) {
      const LyapunovEstimate est =
          estimate_finite_depth(2, uniform_unit(), 0.0, energy, eta, default_depth(2), 2000, 1, 0);
      means.push_back(est.mean);
      sigmas.push_back(est.stderr_);
    }
    const EtaExtrapolation ext = extrapolate_eta(etas, means, sigmas);
    const double err = std::abs(ext.value - free_lyapunov(2, energy));
    worst_err = std::max(worst_err, err);
    worst_sigma = std::max(worst_sigma, ext.stderr_);
    if (err > std::max(3.0 * ext.stderr_, 1e-3) || !(ext.stderr_ < 2e-3)) ok = false;
  }
  return {ok, "six energies at K=2: max |extrapolated - closed form| = " + fmt(worst_err) +
                  " (floor 1e-3), max stderr = " + fmt(worst_sigma) + " (< 2e-3)"};
}

// 2. Band edges are exact, and free-tree minima walk down toward the band
// bottom; the gap at depth 10 is compared against 0.05.
Outcome spectrum_edges_and_free_minima() {
  for (int k : {2, 4}) {
    for (double lambda : {0.0, 0.5, 1.0}) {
      const auto [lo, hi] = spectrum_edges(k, lambda);
      const double edge = 2.0 * std::sqrt(static_cast<double>(k)) + lambda;
      if (lo != -edge || hi != edge) {
        return {false, "edge mismatch at K=" + std::to_string(k) + ", lambda=" + fmt(lambda)};
      }
    }
  }

  const double bottom = -2.0 * std::sqrt(2.0);
  double previous = 0.0;
  double final_eig = 0.0;
  for (int depth = 4; depth <= 10; ++depth) {
    const TreeTopology topo = TreeTopology::build(2, depth);
    const PotentialSample pot = PotentialSample::constant(topo, 0.0, 0.0);
    const EigenResult eig = smallest_eigenvalue(assemble(topo, pot));
    if (!eig.converged) return {false, "eigenvalue solve failed at depth " + std::to_string(depth)};
    const double closed = bottom * std::cos(kPi / (depth + 2));
    if (std::abs(eig.value - closed) > 1e-8) {
      return {false, "free minimum off the closed form at depth " + std::to_string(depth) +
                         ": " + fmt(eig.value) + " vs " + fmt(closed)};
    }
    if (depth > 4 && !(eig.value < previous)) {
      return {false, "free minima stopped decreasing at depth " + std::to_string(depth)};
    }
    previous = eig.value;
    final_eig = eig.value;
  }
  const double gap = final_eig - bottom;
  const bool ok = gap < 0.05;
  return {ok, "edges exact at six (K, lambda) pairs; minima match the closed form and decrease; "
              "gap to the band bottom at depth 10 is " +
                  fmt(gap) + " (required < 0.05; the closed form first reaches 0.05 at depth 15)"};
}

// 3. Forward recursion against the dense resolvent column on random small
// instances, every vertex compared.
Outcome recursion_matches_dense_resolvent() {
  RandomStream rs(31, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int k = rs.next_uniform() < 0.5 ? 2 : 3;
    const int depth = 1 + std::min(3, static_cast<int>(rs.next_uniform() * 4.0));
    const double lambda = rs.next_uniform();
    const double energy = -3.5 + 7.0 * rs.next_uniform();
    const TreeTopology topo = TreeTopology::build(k, depth);
    const PotentialSample pot = PotentialSample::draw(topo, uniform_unit(), lambda, 1000 + i, 0);
    const SpectralPoint pt{energy, 1e-3, lambda};
    const GreenState state = forward_recursion(topo, pot, pt);
    const std::vector<cdouble> column = resolvent_column(assemble(topo, pot), pt.z(), 0);
    for (std::int64_t x = 0; x < topo.node_count; ++x) {
      const double rel =
          std::abs(path_green(topo, state, x) - column[x]) / (1.0 + std::abs(column[x]));
      worst = std::max(worst, rel);
    }
  }
  return {worst <= 1e-10,
          "100 random instances (K <= 3, depth <= 4, lambda <= 1, eta = 1e-3), worst relative "
          "mismatch " +
              fmt(worst) + " (allowed 1e-10)"};
}

// 4. Deterministic lower bound at the spectrum bottom over 10^3 samples.
Outcome pointwise_bound_holds() {
  try {
    const MonotoneBoundReport rep = check_monotone_bound(2, uniform_unit(), 0.05, 10, 1000, 2024, 0);
    return {rep.pass && rep.violations == 0,
            "1000 samples at K=2, lambda=0.05, depth 10: zero violations, smallest margin " +
                fmt(rep.min_margin)};
  } catch (const VerificationError& e) {
    return {false, std::string("bound violated: ") + e.what()};
  }
}

// 5. Resolvent surgery identity and triangle bound over 10^3 instances.
Outcome truncation_identity_closes() {
  double max_residual = 0.0;
  double min_gap = 1e300;
  try {
    for (std::int64_t s = 0; s < 1000; ++s) {
      const TruncationReport rep = truncation_error(
          2, uniform_unit(), 0.3, -2.5, 1e-4, 8, 6, 7, substream(stream_group::kVerifySamples, s));
      max_residual = std::max(max_residual, rep.identity_residual);
      min_gap = std::min(min_gap, rep.triangle_gap);
    }
  } catch (const VerificationError& e) {
    return {false, std::string("identity failed: ") + e.what()};
  }
  return {max_residual < 1e-10 && min_gap >= -1e-10,
          "1000 instances (K=2, cut depth 8, margin 6, eta=1e-4): max identity residual " +
              fmt(max_residual) + " (< 1e-10), min triangle gap " + fmt(min_gap)};
}

// 6. Near the shifted lower edge the exponent stays under log 2 with margin,
// and the criterion window at the edge is at least 0.01 wide.
Outcome near_edge_criterion_window() {
  const double lambda = 0.05;
  const double energy = -(2.0 * std::sqrt(2.0) + lambda) + 0.01;
  const LyapunovEstimate est =
      estimate_finite_depth(2, uniform_unit(), lambda, energy, 0.0, 16, 400, 6, 0);
  const bool gap_ok = est.mean + 3.0 * est.stderr_ < kLog2;
  const EdgeWindowResult win = edge_window(2, uniform_unit(), lambda, 1e-3, 16, 400, 6, 0);
  const bool window_ok = win.delta >= 0.01;
  return {gap_ok && window_ok,
          "exponent at the edge + 0.01 is " + fmt(est.mean) + " +- " + fmt(est.stderr_) +
              " (needs mean + 3 sigma < " + fmt(kLog2) + "); window width " + fmt(win.delta) +
              " of cap " + fmt(win.delta_max) + " (needs >= 0.01)"};
}

// 7. At lambda = 0 the criterion region is exactly |E| < K+1: the exponent
// crosses log K at K+1, located by bisection, and the verdict flips there.
Outcome clean_region_boundary() {
  double worst = 0.0;
  bool verdicts_ok = true;
  for (int k : {2, 3, 4}) {
    const double log_k = std::log(static_cast<double>(k));
    double lo = 2.0 * std::sqrt(static_cast<double>(k));
    double hi = k + 2.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (free_lyapunov(k, mid) - log_k < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    worst = std::max(worst, std::abs(0.5 * (lo + hi) - (k + 1.0)));
    for (double side : {1.0, -1.0}) {
      const double inside = side * (k + 1.0 - 1e-4);
      const double outside = side * (k + 1.0 + 1e-4);
      verdicts_ok = verdicts_ok &&
                    delocalization_criterion(free_lyapunov(k, inside), 0.0, k) ==
                        CriterionVerdict::Holds &&
                    delocalization_criterion(free_lyapunov(k, outside), 0.0, k) ==
                        CriterionVerdict::Fails;
    }
  }
  return {worst < 1e-6 && verdicts_ok,
          "K in {2,3,4}: crossing located within " + fmt(worst) +
              " of K+1 (allowed 1e-6); verdict flips across both boundaries"};
}

// 8. Small-eigenvalue probabilities near the bottom: monotone in the window
// width and bounded by C * K^R * width^(3/2) with a fitted constant.
Outcome edge_probability_shape() {
  const std::vector<double> deltas = {0.02, 0.04, 0.08};
  const TreeTopology topo = TreeTopology::build(2, 5);  // cut convention: R = 6 lives on depth 5
  const EdgeProbabilityResult res =
      edge_probability(topo, uniform_unit(), 0.05, deltas, 2000, 4, 0);
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < res.probabilities.size(); ++i) {
    if (res.probabilities[i + 1] < res.probabilities[i]) monotone = false;
  }
  double fitted_c = 0.0;
  const double k_pow_r = 64.0;  // K^R at K=2, R=6
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (res.probabilities[i] > 0.0) {
      fitted_c = std::max(fitted_c, res.probabilities[i] / (k_pow_r * std::pow(deltas[i], 1.5)));
    }
  }
  bool bounded = true;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (res.probabilities[i] > fitted_c * k_pow_r * std::pow(deltas[i], 1.5) + 1e-12) {
      bounded = false;
    }
  }
  std::string note;
  if (res.min_eig_min > res.spectrum_bottom + deltas.back()) {
    note = "; all counts are zero at this size (smallest sampled eigenvalue " +
           fmt(res.min_eig_min) + " sits above bottom + " + fmt(deltas.back()) + " = " +
           fmt(res.spectrum_bottom + deltas.back()) + "), so the bound holds with C = 0";
  }
  return {monotone && bounded,
          "probabilities {" + fmt(res.probabilities[0]) + ", " + fmt(res.probabilities[1]) + ", " +
              fmt(res.probabilities[2]) + "} over widths {0.02, 0.04, 0.08}: monotone, fitted C = " +
              fmt(fitted_c) + note};
}

// 9. Fractional moment decay: exact closed-form slope at lambda = 0, bounded
// slope in the near-edge regime at lambda = 0.05.
Outcome fractional_moment_decay() {
  const double exact = -0.25 * kLog2;  // s = 1/2, K = 2
  const FractionalMomentProfile clean =
      fractional_moment(2, uniform_unit(), 0.0, 0.5, 0.0, 0.5, 10, 2000, 1, 0);
  const bool clean_ok = clean.analytic && std::abs(clean.slope - exact) < 1e-6;

  const double energy = -(2.0 * std::sqrt(2.0) + 0.05) + 0.01;
  const FractionalMomentProfile noisy =
      fractional_moment(2, uniform_unit(), 0.05, energy, 0.0, 0.5, 12, 800, 5, 0);
  const bool noisy_ok = noisy.slope <= exact + 0.05;
  return {clean_ok && noisy_ok,
          "clean slope " + fmt(clean.slope) + " vs closed form " + fmt(exact) +
              " (within 1e-6); near-edge slope " + fmt(noisy.slope) + " (needs <= " +
              fmt(exact + 0.05) + ")"};
}

// 10. Reflection magnitude is sub-unitary exactly when the Green value has
// positive imaginary part; the explicit wire reproduces the matching formula.
Outcome reflection_unitarity() {
  RandomStream rs(99, 0);
  bool exact_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const double a = rs.next_uniform();
    const double b = rs.next_uniform();
    const double c = rs.next_uniform();
    const cdouble g{6.0 * (a - 0.5), (i % 2 == 0) ? 3.0 * b : 0.0};
    const double k = 0.05 + (kPi - 0.1) * c;
    const double mag = reflection_magnitude(g, k);
    if (g.imag() > 0.0 ? !(mag < 1.0) : mag != 1.0) exact_ok = false;
  }

  const TreeTopology topo = TreeTopology::build(2, 3);
  const double energy = 0.37;
  const double k_wave = 1.1;
  const double u_wire = energy - 2.0 * std::cos(k_wave);
  double worst_wire = 0.0;
  {
    const PotentialSample pot = PotentialSample::constant(topo, 0.0, 0.0);
    const cdouble g = forward_recursion(topo, pot, {energy, 0.0, 0.0}).gamma[0];
    worst_wire = std::abs(wire_tree_reflection(topo, pot, k_wave, u_wire, 200) -
                          reflection_coefficient(g, k_wave));
  }
  {
    const PotentialSample pot = PotentialSample::draw(topo, uniform_unit(), 0.3, 77, 5);
    const cdouble g = forward_recursion(topo, pot, {energy, 0.0, 0.3}).gamma[0];
    worst_wire = std::max(worst_wire,
                          std::abs(wire_tree_reflection(topo, pot, k_wave, u_wire, 200) -
                                   reflection_coefficient(g, k_wave)));
  }
  return {exact_ok && worst_wire < 1e-6,
          "10^4 random (g, k): sub-unitary iff Im g > 0, real g lands on 1.0 exactly; wire "
          "cross-check differs by " +
              fmt(worst_wire) + " (allowed 1e-6)"};
}

// 11. The CLI produces byte-identical reports when only --threads changes.
Outcome thread_reproducibility() {
#ifndef BETHE_LAB_CLI
  return {false, "CLI path was not provided at compile time"};
#else
  const std::string cli = BETHE_LAB_CLI;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"lyap", "lyap --K=2 --lambda=0.3 --E=1.0 --eta=0.01 --depth=8 --n=500 --seed=7"},
      {"phase-csv",
       "phase --K=2 --lambda_min=0 --lambda_max=0.08 --lambda_steps=3 --E_min=-3.4 --E_max=3.4 "
       "--E_steps=5 --eta=0.01 --depth=8 --n=200 --seed=3 --format=csv"},
      {"verify-lb", "verify lb --K=2 --lambda=0.05 --R=8 --n=400 --seed=11"},
      {"scatter", "scatter --K=2 --lambda=0.3 --energies=0.3,1.1 --eta=0.01 --k=1.3 --depth=6 "
                  "--n=64 --seed=42"},
      {"acdensity", "acdensity --K=2 --lambda=0.1 --E=0.5 --eta=0.01 --depth=10 --n=400 --seed=13"},
  };

  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::vector<std::string> outputs;
    for (int threads : {1, 4}) {
      const std::string path = "acc11_" + std::to_string(i) + "_" + std::to_string(threads) + ".out";
      const std::string command = "\"" + cli + "\" " + cases[i].second +
                                  " --threads=" + std::to_string(threads) + " --output=" + path;
      if (std::system(command.c_str()) != 0) {
        return {false, cases[i].first + " exited nonzero under --threads=" +
                           std::to_string(threads)};
      }
      std::ifstream in(path, std::ios::binary);
      std::stringstream buffer;
      buffer << in.rdbuf();
      if (!in) return {false, "could not read back output of " + cases[i].first};
      outputs.push_back(buffer.str());
      std::remove(path.c_str());
    }
    if (outputs[0] != outputs[1] || outputs[0].empty()) {
      return {false, cases[i].first + " differs between --threads=1 and --threads=4"};
    }
  }
  return {true, "five commands (JSON and CSV forms) byte-identical across --threads 1 and 4"};
#endif
}

struct Entry {
  int number;
  const char* name;
  Outcome (*run)();
};

const Entry kEntries[] = {
    {1, "clean exponent closed form", clean_exponent_closed_form},
    {2, "spectrum edges and free minima", spectrum_edges_and_free_minima},
    {3, "recursion vs dense resolvent", recursion_matches_dense_resolvent},
    {4, "pointwise bound at the bottom", pointwise_bound_holds},
    {5, "truncation identity", truncation_identity_closes},
    {6, "near-edge criterion window", near_edge_criterion_window},
    {7, "clean criterion region", clean_region_boundary},
    {8, "edge probability shape", edge_probability_shape},
    {9, "fractional moment decay", fractional_moment_decay},
    {10, "reflection unitarity and wire", reflection_unitarity},
    {11, "thread-count reproducibility", thread_reproducibility},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > 11) {
      std::fprintf(stderr, "usage: %s [criterion number 1..11]\n", argv[0]);
      return 64;
    }
  }

  int failures = 0;
  int ran = 0;
  for (const Entry& entry : kEntries) {
    if (only != 0 && entry.number != only) continue;
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("unexpected exception: ") + e.what()};
    }
    std::printf("[%s] criterion %2d (%s): %s\n", outcome.pass ? "PASS" : "FAIL", entry.number,
                entry.name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
    ++ran;
  }
  if (ran > 1) std::printf("%d of %d criteria passed\n", ran - failures, ran);
  return failures;
}
