#include "bethe/scatter.hpp"

#include <cmath>
#include <cstdio>

#include "bethe/errors.hpp"
#include "bethe/lyapunov.hpp"
#include "bethe/oracle.hpp"
#include "bethe/parallel.hpp"
#include "bethe/rng.hpp"

namespace bethe {

namespace {

void require_wave_number(double k) {
  if (!(k > 0.0 && k < 3.141592653589793)) throw ConfigError("wave number must lie in (0, pi)");
}

void require_physical_green(cdouble g) {
  if (g.imag() < 0.0) {
    throw ConfigError("vertex Green value must have nonnegative imaginary part");
  }
}

void append_g9(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

}  // namespace

cdouble reflection_coefficient(cdouble g, double k) {
  require_wave_number(k);
  require_physical_green(g);
  const cdouble phase{std::cos(k), std::sin(k)};
  const cdouble num = 1.0 + phase * g;
  const cdouble den = 1.0 + std::conj(phase) * g;
  if (std::abs(den) < 1e-14 * (1.0 + std::abs(g))) {
    throw NumericsError("reflection pole: bound state at the attachment vertex");
  }
  return -num / den;
}

double reflection_magnitude(cdouble g, double k) {
  require_wave_number(k);
  require_physical_green(g);
  const cdouble phase{std::cos(k), std::sin(k)};
  const double num = std::abs(1.0 + phase * g);
  const double den = std::abs(1.0 + std::conj(phase) * g);
  if (den < 1e-14 * (1.0 + std::abs(g))) {
    throw NumericsError("reflection pole: bound state at the attachment vertex");
  }
  return num / den;
}

ScatterProfile transmission_profile(int branching, const DisorderSpec& spec, double lambda,
                                    std::span<const double> energies, double eta, double k,
                                    int depth, int n_samples, std::uint64_t seed, int threads) {
  require_wave_number(k);
  if (branching < 2) throw ConfigError("tree branching must be at least 2");
  if (!(eta > 0.0)) throw ConfigError("transmission profile needs eta > 0");
  if (energies.empty()) throw ConfigError("need at least one energy");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (lambda > 0.0 && n_samples < 2) throw ConfigError("need at least two samples");

  ScatterProfile profile;
  profile.eta = eta;
  profile.k = k;
  profile.depth = depth;
  profile.n_samples = n_samples;
  const double subunitary_cut = 1.0 - 10.0 * eta;

  const TreeTopology topo =
      (lambda > 0.0) ? TreeTopology::build(branching, depth) : TreeTopology{};
  std::int64_t energy_index = 0;
  for (double energy : energies) {
    ScatterRow row;
    row.energy = energy;
    row.k = k;
    row.u_wire = energy - 2.0 * std::cos(k);
    if (lambda == 0.0) {
      const cdouble g = free_lattice_green(branching, {energy, eta});
      row.mean_abs_r = reflection_magnitude(g, k);
      row.frac_subunitary = (row.mean_abs_r < subunitary_cut) ? 1.0 : 0.0;
      row.mean_im_g = g.imag();
    } else {
      const SpectralPoint pt{energy, eta, lambda};
      std::vector<double> abs_r(n_samples);
      std::vector<double> im_g(n_samples);
      parallel_for(n_samples, threads, [&](std::int64_t s) {
        std::int64_t scratch = 0;
        const cdouble g =
            sample_lattice_green(topo, spec, lambda, pt, seed, stream_group::kScatterSamples,
                                 energy_index * n_samples + s, &scratch);
        abs_r[s] = reflection_magnitude(g, k);
        im_g[s] = g.imag();
      });
      std::int64_t sub = 0;
      for (double r : abs_r) sub += (r < subunitary_cut) ? 1 : 0;
      row.mean_abs_r = compensated_total(abs_r) / n_samples;
      row.frac_subunitary = static_cast<double>(sub) / n_samples;
      row.mean_im_g = compensated_total(im_g) / n_samples;
    }
    profile.rows.push_back(row);
    ++energy_index;
  }
  return profile;
}

std::string scatter_to_csv(const ScatterProfile& profile) {
  std::string out = "E,k,u_wire,mean_abs_R,frac_subunitary,mean_Im_G\n";
  for (const ScatterRow& row : profile.rows) {
    append_g9(out, row.energy);
    out += ',';
    append_g9(out, row.k);
    out += ',';
    append_g9(out, row.u_wire);
    out += ',';
    append_g9(out, row.mean_abs_r);
    out += ',';
    append_g9(out, row.frac_subunitary);
    out += ',';
    append_g9(out, row.mean_im_g);
    out += '\n';
  }
  return out;
}

cdouble wire_tree_reflection(const TreeTopology& topo, const PotentialSample& pot, double k,
                             double u_wire, int wire_sites) {
  require_wave_number(k);
  if (wire_sites < 3) throw ConfigError("wire needs at least three sites");
  const std::int64_t n_tree = topo.node_count;
  const std::int64_t n = n_tree + wire_sites + 1;  // tree, wire, reflection amplitude
  if (n > ExplicitHamiltonian::kMaxDimension) {
    throw ConfigError("wire-tree system exceeds the dimension cap");
  }
  if (std::ssize(pot.values) < n_tree) throw ConfigError("potential sample shorter than the tree");

  const double energy = u_wire + 2.0 * std::cos(k);
  const auto wire_col = [&](int xi) { return n_tree + xi - 1; };  // xi = 1..wire_sites
  const std::int64_t r_col = n_tree + wire_sites;

  std::vector<cdouble> m(n * n, cdouble{0.0, 0.0});
  std::vector<cdouble> rhs(n, cdouble{0.0, 0.0});
  const auto at = [&](std::int64_t row, std::int64_t col) -> cdouble& { return m[row * n + col]; };

  // Tree rows: (H - E) psi = 0, root additionally coupled to wire site 1.
  for (std::int64_t i = 0; i < n_tree; ++i) {
    at(i, i) = pot.lambda * pot.values[i] - energy;
    if (i > 0) {
      at(i, topo.parent(i)) = 1.0;
      at(topo.parent(i), i) = 1.0;
    }
  }
  at(0, wire_col(1)) = 1.0;

  // Wire rows xi = 1..wire_sites-1; site 0 of the wire is the tree root.
  for (int xi = 1; xi < wire_sites; ++xi) {
    const std::int64_t row = wire_col(xi);
    at(row, row) = u_wire - energy;
    at(row, xi == 1 ? 0 : wire_col(xi - 1)) = 1.0;
    at(row, wire_col(xi + 1)) = 1.0;
  }

  // Far-end pinning: psi(xi) = e^{ik xi} + R e^{-ik xi} on the last two sites.
  for (int xi : {wire_sites - 1, wire_sites}) {
    const std::int64_t row = (xi == wire_sites) ? wire_col(xi) : r_col;
    at(row, wire_col(xi)) = 1.0;
    at(row, r_col) = -std::exp(cdouble{0.0, -k * xi});
    rhs[row] = std::exp(cdouble{0.0, k * xi});
  }

  DenseLU<cdouble> lu;
  lu.factor(n, std::move(m));
  lu.solve(rhs);
  return rhs[r_col];
}

}  // namespace bethe
