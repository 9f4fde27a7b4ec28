#include <doctest.h>

#include <cmath>
#include <complex>

#include "bethe/disorder.hpp"
#include "bethe/errors.hpp"
#include "bethe/tree_green.hpp"

using namespace bethe;

namespace {
constexpr double kRoot2 = 1.4142135623730951;
}

TEST_CASE("topology indexing") {
  const TreeTopology topo = TreeTopology::build(2, 3);
  CHECK(topo.node_count == 15);
  CHECK(topo.level_begin(0) == 0);
  CHECK(topo.level_end(0) == 1);
  CHECK(topo.level_begin(3) == 7);
  CHECK(topo.level_end(3) == 15);
  CHECK(topo.child(0, 0) == 1);
  CHECK(topo.child(0, 1) == 2);
  CHECK(topo.parent(topo.child(5, 1)) == 5);
  CHECK(topo.depth_of(0) == 0);
  CHECK(topo.depth_of(14) == 3);
  CHECK(topo.is_leaf(7));
  CHECK_FALSE(topo.is_leaf(6));

  const TreeTopology ternary = TreeTopology::build(3, 2);
  CHECK(ternary.node_count == 13);
  for (std::int64_t i = 1; i < ternary.node_count; ++i) {
    CHECK(ternary.parent(i) < i);
  }
  CHECK_THROWS_AS(TreeTopology::build(1, 3), ConfigError);
  CHECK_THROWS_AS(TreeTopology::build(2, -1), ConfigError);
}

TEST_CASE("free forward value solves its own fixed point") {
  for (int k : {2, 3, 4}) {
    for (const cdouble z : {cdouble{0.3, 1e-3}, cdouble{-2.0, 1e-6}, cdouble{3.7, 0.0},
                            cdouble{0.0, 2.0}, cdouble{-2.0 * std::sqrt(double(k)), 0.0}}) {
      const cdouble g = free_forward_green(k, z);
      const cdouble residual = g - 1.0 / (-z - double(k) * g);
      CHECK(std::abs(residual) < 1e-10);
      if (z.imag() > 0.0) CHECK(g.imag() > 0.0);  // Herglotz
    }
  }
  // In-band boundary values carry the ac component; outside they are real.
  CHECK(free_forward_green(2, {1.0, 0.0}).imag() > 0.1);
  CHECK(free_forward_green(2, {3.0, 0.0}).imag() == 0.0);
  CHECK(free_forward_green(2, {-3.0, 0.0}).imag() == 0.0);
}

TEST_CASE("finite depth free values match the recursion on a tree") {
  const int k = 2;
  const TreeTopology topo = TreeTopology::build(k, 6);
  const PotentialSample pot = PotentialSample::constant(topo, 0.0, 0.0);
  for (const cdouble z : {cdouble{0.4, 1e-2}, cdouble{3.1, 0.0}, cdouble{-1.2, 1e-4}}) {
    const GreenState state = forward_recursion(topo, pot, SpectralPoint{z.real(), z.imag(), 0.0});
    const cdouble closed = free_forward_green_depth(k, z, 6);
    CHECK(std::abs(state.gamma[0] - closed) < 1e-12);
  }
  // Out of band the depth iteration contracts onto the infinite-tree value.
  CHECK(std::abs(free_forward_green_depth(k, {4.0, 0.0}, 40) - free_forward_green(k, {4.0, 0.0})) <
        1e-12);
}

TEST_CASE("lattice green closes over K+1 forward values") {
  for (int k : {2, 3}) {
    for (const cdouble z : {cdouble{0.0, 1e-6}, cdouble{1.3, 1e-3}, cdouble{4.0, 0.0}}) {
      const cdouble gamma = free_forward_green(k, z);
      std::vector<cdouble> gammas(k + 1, gamma);
      const cdouble via_vertex =
          homogeneous_vertex_green(0.0, 0.0, SpectralPoint{z.real(), z.imag(), 0.0}, gammas);
      CHECK(std::abs(via_vertex - free_lattice_green(k, z)) < 1e-12);
    }
  }
  // Spot value: K=2 at the band center, Im G = sqrt(2)/3.
  const cdouble g0 = free_lattice_green(2, {0.0, 0.0});
  CHECK(g0.real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g0.imag() == doctest::Approx(kRoot2 / 3.0).epsilon(1e-12));
}

TEST_CASE("free lyapunov exponent piecewise form") {
  for (int k : {2, 3, 4}) {
    const double logk = std::log(double(k));
    CHECK(free_lyapunov(k, 0.0) == doctest::Approx(0.5 * logk).epsilon(1e-12));
    CHECK(free_lyapunov(k, 2.0 * std::sqrt(double(k))) ==
          doctest::Approx(0.5 * logk).epsilon(1e-9));
    CHECK(free_lyapunov(k, double(k) + 1.0) == doctest::Approx(logk).epsilon(1e-9));
    CHECK(free_lyapunov(k, -double(k) - 1.0) == doctest::Approx(logk).epsilon(1e-9));
    CHECK(free_lyapunov(k, double(k) + 5.0) > logk);
    // Monotone growth outside the spectrum.
    double prev = 0.5 * logk;
    for (double e = 2.0 * std::sqrt(double(k)); e < k + 4.0; e += 0.05) {
      const double cur = free_lyapunov(k, e);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("spectrum edges and the weak disorder threshold") {
  const auto [lo, hi] = spectrum_edges(2, 0.5);
  CHECK(lo == -(2.0 * kRoot2 + 0.5));
  CHECK(hi == 2.0 * kRoot2 + 0.5);
  CHECK(weak_disorder_threshold(2) ==
        doctest::Approx(0.5 * (kRoot2 - 1.0) * (kRoot2 - 1.0)).epsilon(1e-15));
  CHECK(weak_disorder_threshold(4) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("potential samples are reproducible prefixes") {
  const DisorderSpec spec = DisorderSpec::uniform_symmetric(1.0);
  const TreeTopology deep = TreeTopology::build(2, 6);
  const TreeTopology shallow = TreeTopology::build(2, 4);
  const PotentialSample a = PotentialSample::draw(deep, spec, 0.3, 11, 5);
  const PotentialSample b = PotentialSample::draw(shallow, spec, 0.3, 11, 5);
  REQUIRE(std::ssize(b.values) == shallow.node_count);
  for (std::int64_t i = 0; i < shallow.node_count; ++i) CHECK(a.values[i] == b.values[i]);
  for (double v : a.values) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  const PotentialSample c = PotentialSample::constant(shallow, 1.0, 0.3);
  for (double v : c.values) CHECK(v == 1.0);
}

TEST_CASE("resonances at eta zero are clamped and counted") {
  // A single site with potential putting the eigenvalue exactly at E.
  const TreeTopology topo = TreeTopology::build(2, 0);
  const PotentialSample pot = PotentialSample::constant(topo, 1.0, 0.7);
  const GreenState state = forward_recursion(topo, pot, SpectralPoint{0.7, 0.0, 0.7});
  CHECK(state.resonance_count == 1);
  CHECK(std::isfinite(std::abs(state.gamma[0])));
}

TEST_CASE("path products compose the gamma chain") {
  const TreeTopology topo = TreeTopology::build(2, 5);
  const DisorderSpec spec = DisorderSpec::uniform_symmetric(1.0);
  const PotentialSample pot = PotentialSample::draw(topo, spec, 0.4, 3, 9);
  const SpectralPoint pt{0.8, 1e-3, 0.4};
  const GreenState state = forward_recursion(topo, pot, pt);

  // Walk the two leftmost paths by hand.
  std::int64_t x = 0;
  cdouble expected = state.gamma[0];
  for (int d = 1; d <= 5; ++d) {
    x = topo.child(x, d % 2);
    expected *= -state.gamma[x];
    CHECK(std::abs(path_green(topo, state, x) - expected) < 1e-13 * std::abs(expected));
    CHECK(path_green_magnitude(topo, state, x) ==
          doctest::Approx(std::abs(path_green(topo, state, x))).epsilon(1e-12));
  }

  for (int d : {0, 1, 3, 5}) {
    const std::vector<cdouble> level = level_green(topo, state, d);
    REQUIRE(std::ssize(level) == topo.level_end(d) - topo.level_begin(d));
    for (std::int64_t i = 0; i < std::ssize(level); ++i) {
      const std::int64_t node = topo.level_begin(d) + i;
      CHECK(std::abs(level[i] - path_green(topo, state, node)) < 1e-12 * (1.0 + std::abs(level[i])));
    }
  }
}

TEST_CASE("forward root matches the full recursion") {
  const TreeTopology topo = TreeTopology::build(3, 4);
  const DisorderSpec spec = DisorderSpec::gaussian(0.8);
  const SpectralPoint pt{-1.1, 1e-4, 0.25};
  const PotentialSample pot = PotentialSample::draw(topo, spec, 0.25, 21, 4);
  const GreenState state = forward_recursion(topo, pot, pt);
  std::int64_t resonances = 0;
  const cdouble root = forward_root(topo, spec, 0.25, 21, 4, pt, &resonances);
  CHECK(std::abs(root - state.gamma[0]) < 1e-13 * (1.0 + std::abs(root)));
  CHECK(resonances == state.resonance_count);
}
