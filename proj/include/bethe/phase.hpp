#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bethe/disorder.hpp"
#include "bethe/lyapunov.hpp"

namespace bethe {

std::vector<double> linspace(double lo, double hi, int n);

struct PhaseGrid {
  std::vector<double> lambdas;   // >= 0, ascending
  std::vector<double> energies;  // ascending
};

enum class PhaseClass { OutsideSpectrum, CriterionHolds, CriterionFails, Undecided };
const char* to_string(PhaseClass cls);

struct PhaseCell {
  double lambda = 0.0;
  double energy = 0.0;
  double l_mean = 0.0;    // NaN when the cell lies outside the spectrum
  double l_stderr = 0.0;  // NaN likewise
  PhaseClass cls = PhaseClass::Undecided;
};

struct PhaseMap {
  PhaseGrid grid;
  double eta = 0.0;
  int depth = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
  int branching = 2;
  std::string disorder;            // serialized distribution
  std::int64_t failed_cells = 0;   // estimator failures, left undecided
  std::vector<PhaseCell> cells;    // row-major, lambda outer, energy inner
};

// Classifies every grid cell by the exponent-versus-log-K criterion. Points
// beyond the spectrum edge are labeled outside regardless of any estimate;
// lambda = 0 rows use the clean closed form. Each cell samples from its own
// derived seed, so the map is independent of traversal or thread order.
PhaseMap scan(const PhaseGrid& grid, int branching, const DisorderSpec& spec, double eta,
              int depth, int n_samples, std::uint64_t seed, int threads);

// CSV with header lambda,E,L_mean,L_stderr,class; nine significant digits.
std::string phase_to_csv(const PhaseMap& map);

// Full-precision JSON that reloads bit for bit; NaN cells become null.
std::string phase_to_json(const PhaseMap& map);
PhaseMap phase_from_json(const std::string& text);

struct EdgeWindowResult {
  double delta = 0.0;        // widest window below the spectrum edge that holds
  double delta_max = 0.0;    // search cap: |spectrum edge|
  double resolution = 1e-3;
  bool holds_at_edge = false;
  int probes_evaluated = 0;
};

// Largest delta such that the criterion holds on eight probe energies spread
// over (edge - delta, edge], found by bisection at fixed resolution. A failure
// directly at the edge short-circuits to zero.
EdgeWindowResult edge_window(int branching, const DisorderSpec& spec, double lambda, double eta,
                             int depth, int n_samples, std::uint64_t seed, int threads);

}  // namespace bethe
