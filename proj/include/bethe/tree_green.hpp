#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bethe/disorder.hpp"

namespace bethe {

using cdouble = std::complex<double>;

// Rooted tree with fixed branching number K, nodes indexed breadth-first:
// root 0, children of i are K*i+1 ... K*i+K, parent of i is (i-1)/K. Nodes at
// depth d occupy the contiguous index block [level_begin(d), level_end(d)).
struct TreeTopology {
  int branching = 2;   // K >= 2
  int depth = 0;       // R >= 0; leaves sit at this depth
  std::int64_t node_count = 1;
  std::vector<std::int64_t> level_offsets;  // depth+2 entries, last == node_count

  static TreeTopology build(int branching, int depth);

  std::int64_t parent(std::int64_t i) const { return (i - 1) / branching; }
  std::int64_t child(std::int64_t i, int c) const { return branching * i + 1 + c; }
  std::int64_t level_begin(int d) const { return level_offsets[d]; }
  std::int64_t level_end(int d) const { return level_offsets[d + 1]; }
  bool is_leaf(std::int64_t i) const { return i >= level_offsets[depth]; }
  int depth_of(std::int64_t i) const;
};

struct SpectralPoint {
  double energy = 0.0;
  double eta = 0.0;     // >= 0
  double lambda = 0.0;  // >= 0
  cdouble z() const { return {energy, eta}; }
};

// One disorder realization on a tree. values[i] pairs with node i; restricting
// to a shallower depth is the index prefix, so truncations reuse the sample.
struct PotentialSample {
  std::vector<double> values;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  static PotentialSample draw(const TreeTopology& topo, const DisorderSpec& spec, double lambda,
                              std::uint64_t seed, std::uint64_t stream);
  static PotentialSample constant(const TreeTopology& topo, double value, double lambda);
};

// Forward (single-parent) Green values gamma[i] = <i|(H_subtree - z)^{-1}|i>
// for the subtree hanging below node i. eta > 0 keeps Im gamma > 0; at eta = 0
// a vanishing denominator is clamped and counted in resonance_count.
struct GreenState {
  std::vector<cdouble> gamma;
  SpectralPoint point;
  std::int64_t resonance_count = 0;
};

GreenState forward_recursion(const TreeTopology& topo, const PotentialSample& pot,
                             const SpectralPoint& pt);

// Root value only, O(depth) memory; same arithmetic as forward_recursion.
cdouble forward_root(const TreeTopology& topo, const DisorderSpec& spec, double lambda,
                     std::uint64_t seed, std::uint64_t stream, const SpectralPoint& pt,
                     std::int64_t* resonances = nullptr);

// Signed off-diagonal Green value G(0,x) = gamma_0 * prod_path (-gamma_j).
cdouble path_green(const TreeTopology& topo, const GreenState& state, std::int64_t target);
double path_green_magnitude(const TreeTopology& topo, const GreenState& state,
                            std::int64_t target);

// G(0,x) for every node x at the given depth, in index order.
std::vector<cdouble> level_green(const TreeTopology& topo, const GreenState& state, int depth);

// Green value at a vertex of the homogeneous (K+1)-neighbor tree, fed by K+1
// independent forward values.
cdouble homogeneous_vertex_green(double lambda, double v0, const SpectralPoint& pt,
                                 std::span<const cdouble> gammas);

// ---------------------------------------------------------------------------
// Closed forms for the clean tree
// ---------------------------------------------------------------------------

// Forward fixed point: root of K*g^2 + z*g + 1 = 0 with g ~ -1/z at infinity;
// boundary values on the real axis are taken from the upper half plane.
cdouble free_forward_green(int branching, cdouble z);

// Finite-depth forward value of the clean tree (depth iterations from a leaf).
cdouble free_forward_green_depth(int branching, cdouble z, int depth);

// Green value at a homogeneous vertex of the clean tree.
cdouble free_lattice_green(int branching, cdouble z);

// -log |forward fixed point| at E + i0. Equals log sqrt(K) on the spectrum,
// crosses log K exactly at |E| = K+1.
double free_lyapunov(int branching, double energy);

// Spectrum of hopping plus bounded potential (support [-1,1]) scaled by lambda.
std::pair<double, double> spectrum_edges(int branching, double lambda);

// Largest disorder strength the edge-window analysis tolerates: (sqrt(K)-1)^2/2.
double weak_disorder_threshold(int branching);

}  // namespace bethe
