#include "bethe/tree_green.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bethe/errors.hpp"
#include "bethe/rng.hpp"

namespace bethe {

namespace {

// Denominators smaller than this are treated as resonances and clamped.
constexpr double kResonanceFloor = 1e-300;

cdouble clamp_denominator(cdouble den, std::int64_t* resonances) {
  const double mag = std::abs(den);
  if (mag >= kResonanceFloor) return den;
  if (resonances != nullptr) ++*resonances;
  if (mag == 0.0) return {kResonanceFloor, 0.0};
  return den * (kResonanceFloor / mag);
}

}  // namespace

TreeTopology TreeTopology::build(int branching, int depth) {
  if (branching < 2) throw ConfigError("tree branching must be at least 2");
  if (depth < 0) throw ConfigError("tree depth must be nonnegative");
  TreeTopology topo;
  topo.branching = branching;
  topo.depth = depth;
  topo.level_offsets.resize(depth + 2);
  std::int64_t total = 0;
  std::int64_t level = 1;
  for (int d = 0; d <= depth; ++d) {
    topo.level_offsets[d] = total;
    if (level > (std::int64_t{1} << 40) || total > (std::int64_t{1} << 40)) {
      throw ConfigError("tree with this branching and depth exceeds the node budget");
    }
    total += level;
    level *= branching;
  }
  topo.level_offsets[depth + 1] = total;
  topo.node_count = total;
  return topo;
}

int TreeTopology::depth_of(std::int64_t i) const {
  auto it = std::upper_bound(level_offsets.begin(), level_offsets.end(), i);
  return static_cast<int>(it - level_offsets.begin()) - 1;
}

PotentialSample PotentialSample::draw(const TreeTopology& topo, const DisorderSpec& spec,
                                      double lambda, std::uint64_t seed, std::uint64_t stream) {
  PotentialSample sample;
  sample.lambda = lambda;
  sample.seed = seed;
  sample.stream = stream;
  sample.values.resize(topo.node_count);
  RandomStream rs(seed, stream);
  for (std::int64_t i = 0; i < topo.node_count; ++i) {
    sample.values[i] = spec.draw_at(rs, static_cast<std::uint64_t>(i));
  }
  return sample;
}

PotentialSample PotentialSample::constant(const TreeTopology& topo, double value, double lambda) {
  PotentialSample sample;
  sample.lambda = lambda;
  sample.values.assign(topo.node_count, value);
  return sample;
}

GreenState forward_recursion(const TreeTopology& topo, const PotentialSample& pot,
                             const SpectralPoint& pt) {
  if (std::ssize(pot.values) < topo.node_count) {
    throw ConfigError("potential sample shorter than the tree");
  }
  GreenState state;
  state.point = pt;
  state.gamma.resize(topo.node_count);
  const cdouble z = pt.z();
  const int K = topo.branching;
  for (std::int64_t i = topo.node_count - 1; i >= 0; --i) {
    cdouble den = pt.lambda * pot.values[i] - z;
    if (!topo.is_leaf(i)) {
      for (int c = 0; c < K; ++c) den -= state.gamma[topo.child(i, c)];
    }
    state.gamma[i] = 1.0 / clamp_denominator(den, &state.resonance_count);
  }
  return state;
}

cdouble forward_root(const TreeTopology& topo, const DisorderSpec& spec, double lambda,
                     std::uint64_t seed, std::uint64_t stream, const SpectralPoint& pt,
                     std::int64_t* resonances) {
  RandomStream rs(seed, stream);
  const cdouble z = pt.z();
  const int K = topo.branching;
  std::function<cdouble(std::int64_t, int)> visit = [&](std::int64_t node, int d) -> cdouble {
    cdouble den = lambda * spec.draw_at(rs, static_cast<std::uint64_t>(node)) - z;
    if (d < topo.depth) {
      for (int c = 0; c < K; ++c) den -= visit(topo.child(node, c), d + 1);
    }
    return 1.0 / clamp_denominator(den, resonances);
  };
  return visit(0, 0);
}

cdouble path_green(const TreeTopology& topo, const GreenState& state, std::int64_t target) {
  cdouble value = state.gamma[0];
  for (std::int64_t i = target; i != 0; i = topo.parent(i)) value *= -state.gamma[i];
  return value;
}

double path_green_magnitude(const TreeTopology& topo, const GreenState& state,
                            std::int64_t target) {
  // Log accumulation; resonant factors would otherwise overflow the product.
  double log_sum = std::log(std::abs(state.gamma[0]));
  for (std::int64_t i = target; i != 0; i = topo.parent(i)) {
    log_sum += std::log(std::abs(state.gamma[i]));
  }
  return std::exp(log_sum);
}

std::vector<cdouble> level_green(const TreeTopology& topo, const GreenState& state, int depth) {
  if (depth < 0 || depth > topo.depth) throw ConfigError("level depth outside the tree");
  const std::int64_t end = topo.level_end(depth);
  std::vector<cdouble> prefix(end);
  prefix[0] = state.gamma[0];
  for (std::int64_t i = 1; i < end; ++i) {
    prefix[i] = prefix[topo.parent(i)] * -state.gamma[i];
  }
  return {prefix.begin() + topo.level_begin(depth), prefix.end()};
}

cdouble homogeneous_vertex_green(double lambda, double v0, const SpectralPoint& pt,
                                 std::span<const cdouble> gammas) {
  cdouble den = lambda * v0 - pt.z();
  for (const cdouble& g : gammas) den -= g;
  return 1.0 / clamp_denominator(den, nullptr);
}

cdouble free_forward_green(int branching, cdouble z) {
  const double root_k = std::sqrt(static_cast<double>(branching));
  if (z.imag() == 0.0) z = {z.real(), 0.0};  // boundary values from above
  const cdouble w = std::sqrt(z - 2.0 * root_k) * std::sqrt(z + 2.0 * root_k);
  return (-z + w) / (2.0 * branching);
}

cdouble free_forward_green_depth(int branching, cdouble z, int depth) {
  cdouble g = -1.0 / z;
  for (int d = 0; d < depth; ++d) {
    g = 1.0 / (-z - static_cast<double>(branching) * g);
  }
  return g;
}

cdouble free_lattice_green(int branching, cdouble z) {
  const cdouble g = free_forward_green(branching, z);
  return 1.0 / (-z - static_cast<double>(branching + 1) * g);
}

double free_lyapunov(int branching, double energy) {
  return -std::log(std::abs(free_forward_green(branching, {energy, 0.0})));
}

std::pair<double, double> spectrum_edges(int branching, double lambda) {
  const double edge = 2.0 * std::sqrt(static_cast<double>(branching)) + lambda;
  return {-edge, edge};
}

double weak_disorder_threshold(int branching) {
  const double s = std::sqrt(static_cast<double>(branching)) - 1.0;
  return 0.5 * s * s;
}

}  // namespace bethe
