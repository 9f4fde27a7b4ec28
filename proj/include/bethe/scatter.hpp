#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bethe/disorder.hpp"
#include "bethe/tree_green.hpp"

namespace bethe {

// Reflection amplitude of a plane wave on a discrete half-line wire attached
// at a vertex with Green value g: R = -(1 + e^{ik} g) / (1 + e^{-ik} g).
// Matching is oriented so Im g > 0 gives |R| < 1. Requires k in (0, pi) and
// Im g >= 0; a vanishing denominator (bound-state resonance) is an error.
cdouble reflection_coefficient(cdouble g, double k);

// |R| computed as the ratio of the two moduli, so a real g lands on 1.0
// exactly: both moduli then share identical components bit for bit.
double reflection_magnitude(cdouble g, double k);

struct ScatterRow {
  double energy = 0.0;
  double k = 0.0;
  double u_wire = 0.0;  // wire potential making the dispersion hit `energy`
  double mean_abs_r = 0.0;
  double frac_subunitary = 0.0;  // |R| < 1 - 10 eta
  double mean_im_g = 0.0;
};

struct ScatterProfile {
  std::vector<ScatterRow> rows;
  double eta = 0.0;
  double k = 0.0;
  int depth = 0;
  int n_samples = 0;
};

// Per-energy reflection statistics with the vertex Green value sampled at
// E + i eta; the wire offset tracks the energy at fixed wave number.
ScatterProfile transmission_profile(int branching, const DisorderSpec& spec, double lambda,
                                    std::span<const double> energies, double eta, double k,
                                    int depth, int n_samples, std::uint64_t seed, int threads);

// CSV with header E,k,u_wire,mean_abs_R,frac_subunitary,mean_Im_G.
std::string scatter_to_csv(const ScatterProfile& profile);

// Direct cross-check: tree plus an explicit finite wire solved as one linear
// system, with the plane-wave form pinned at the far end. The wire dynamics
// are satisfied exactly by that form, so the wire length does not bias R.
cdouble wire_tree_reflection(const TreeTopology& topo, const PotentialSample& pot, double k,
                             double u_wire, int wire_sites);

}  // namespace bethe
