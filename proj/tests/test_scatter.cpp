#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bethe/disorder.hpp"
#include "bethe/errors.hpp"
#include "bethe/rng.hpp"
#include "bethe/scatter.hpp"
#include "bethe/tree_green.hpp"

using namespace bethe;

namespace {
constexpr double kPi = 3.141592653589793;
const DisorderSpec kUniform = DisorderSpec::uniform_symmetric(1.0);
}  // namespace

TEST_CASE("unit imaginary green value at sixty degrees") {
  // tan(pi/12) = 2 - sqrt(3), worked by hand from the matching formula.
  const double expected = 2.0 - std::sqrt(3.0);
  CHECK(reflection_magnitude({0.0, 1.0}, kPi / 3.0) == doctest::Approx(expected).epsilon(1e-9));
  const cdouble r = reflection_coefficient({0.0, 1.0}, kPi / 3.0);
  CHECK(std::abs(r) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("real green values reflect with unit magnitude exactly") {
  for (double g : {-3.0, -0.5, 0.0, 0.25, 7.0}) {
    for (double k : {0.3, kPi / 2.0, 2.8}) {
      CHECK(reflection_magnitude({g, 0.0}, k) == 1.0);
    }
  }
}

TEST_CASE("absorption happens exactly when the green value has positive imaginary part") {
  RandomStream rs(2024, 1);
  for (int i = 0; i < 400; ++i) {
    const auto [a, b] = rs.next_uniform_pair();
    const double c = rs.next_uniform();
    const double im = (i % 2 == 0) ? 3.0 * b : 0.0;
    const cdouble g{6.0 * (a - 0.5), im};
    const double k = 0.05 + (kPi - 0.1) * c;
    const double mag = reflection_magnitude(g, k);
    if (g.imag() > 0.0) {
      CHECK(mag < 1.0);
    } else {
      CHECK(mag == 1.0);
    }
  }
}

TEST_CASE("invalid matching inputs are rejected") {
  CHECK_THROWS_AS(reflection_coefficient({0.5, -0.1}, 1.0), ConfigError);
  CHECK_THROWS_AS(reflection_magnitude({0.5, -0.1}, 1.0), ConfigError);
  for (double k : {0.0, kPi, -1.0, 4.0}) {
    CHECK_THROWS_AS(reflection_coefficient({0.0, 1.0}, k), ConfigError);
  }
}

TEST_CASE("explicit wire agrees with the matching formula") {
  const TreeTopology topo = TreeTopology::build(2, 3);
  const double energy = 0.37;
  const double k = 1.1;
  const double u_wire = energy - 2.0 * std::cos(k);

  SUBCASE("clean tree") {
    const PotentialSample pot = PotentialSample::constant(topo, 0.0, 0.0);
    const cdouble g = forward_recursion(topo, pot, {energy, 0.0, 0.0}).gamma[0];
    CHECK(g.imag() == 0.0);
    const cdouble expected = reflection_coefficient(g, k);
    const cdouble actual = wire_tree_reflection(topo, pot, k, u_wire, 200);
    CHECK(std::abs(actual - expected) < 1e-6);
    CHECK(std::abs(actual) == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("disordered tree") {
    const PotentialSample pot = PotentialSample::draw(topo, kUniform, 0.3, 77, 5);
    const cdouble g = forward_recursion(topo, pot, {energy, 0.0, 0.3}).gamma[0];
    const cdouble expected = reflection_coefficient(g, k);
    const cdouble actual = wire_tree_reflection(topo, pot, k, u_wire, 200);
    CHECK(std::abs(actual - expected) < 1e-6);
    CHECK(std::abs(actual) == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("wire length does not bias the amplitude") {
    const PotentialSample pot = PotentialSample::draw(topo, kUniform, 0.3, 77, 5);
    const cdouble short_wire = wire_tree_reflection(topo, pot, k, u_wire, 5);
    const cdouble long_wire = wire_tree_reflection(topo, pot, k, u_wire, 120);
    CHECK(std::abs(short_wire - long_wire) < 1e-9);
    CHECK_THROWS_AS(wire_tree_reflection(topo, pot, k, u_wire, 2), ConfigError);
  }
}

TEST_CASE("clean transmission rows come from the closed-form lattice value") {
  const std::vector<double> energies = {0.5, 4.0};
  const double eta = 1e-3;
  const double k = kPi / 2.0;
  const ScatterProfile profile = transmission_profile(2, kUniform, 0.0, energies, eta, k, 0, 1, 1, 1);
  REQUIRE(profile.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const ScatterRow& row = profile.rows[i];
    const cdouble g = free_lattice_green(2, {energies[i], eta});
    CHECK(row.energy == energies[i]);
    CHECK(row.u_wire == doctest::Approx(energies[i] - 2.0 * std::cos(k)).epsilon(1e-12));
    CHECK(row.mean_abs_r == doctest::Approx(reflection_magnitude(g, k)).epsilon(1e-12));
    CHECK(row.mean_im_g == doctest::Approx(g.imag()).epsilon(1e-12));
  }
  CHECK(profile.rows[0].frac_subunitary == 1.0);  // inside the band
  CHECK(profile.rows[1].frac_subunitary == 0.0);  // outside, |R| within 10 eta of one

  const std::string csv = scatter_to_csv(profile);
  CHECK(csv.rfind("E,k,u_wire,mean_abs_R,frac_subunitary,mean_Im_G\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += (c == '\n') ? 1 : 0;
  CHECK(lines == 3);
}

TEST_CASE("disordered transmission is reproducible across thread counts") {
  const std::vector<double> energies = {0.3, 1.1, 2.0};
  const ScatterProfile one = transmission_profile(2, kUniform, 0.3, energies, 1e-2, 1.3, 6, 64, 42, 1);
  const ScatterProfile four = transmission_profile(2, kUniform, 0.3, energies, 1e-2, 1.3, 6, 64, 42, 4);
  CHECK(scatter_to_csv(one) == scatter_to_csv(four));
  double max_frac = 0.0;
  for (const ScatterRow& row : one.rows) {
    CHECK(row.mean_im_g > 0.0);
    CHECK(row.mean_abs_r > 0.0);
    CHECK(row.mean_abs_r < 1.0);
    CHECK(row.frac_subunitary >= 0.0);
    CHECK(row.frac_subunitary <= 1.0);
    max_frac = std::max(max_frac, row.frac_subunitary);
  }
  // Off-resonant energies can keep every sample above the subunitary cut;
  // somewhere on the grid the tree must absorb.
  CHECK(max_frac > 0.0);
}

TEST_CASE("profile input validation") {
  const std::vector<double> energies = {0.5};
  const std::vector<double> none;
  CHECK_THROWS_AS(transmission_profile(1, kUniform, 0.0, energies, 1e-3, 1.0, 4, 8, 1, 1),
                  ConfigError);
  CHECK_THROWS_AS(transmission_profile(2, kUniform, 0.0, energies, 0.0, 1.0, 4, 8, 1, 1),
                  ConfigError);
  CHECK_THROWS_AS(transmission_profile(2, kUniform, 0.0, none, 1e-3, 1.0, 4, 8, 1, 1), ConfigError);
  CHECK_THROWS_AS(transmission_profile(2, kUniform, -0.1, energies, 1e-3, 1.0, 4, 8, 1, 1),
                  ConfigError);
  CHECK_THROWS_AS(transmission_profile(2, kUniform, 0.3, energies, 1e-3, 1.0, 4, 1, 1, 1),
                  ConfigError);
}
