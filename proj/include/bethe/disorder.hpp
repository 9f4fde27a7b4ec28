#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bethe/rng.hpp"

namespace bethe {

enum class DisorderKind { UniformSymmetric, Gaussian, Cauchy, PiecewiseDensity };

const char* to_string(DisorderKind kind);

// Single-site potential distribution. Construct through the factories, which
// validate parameters; piecewise densities must integrate to one.
struct DisorderSpec {
  DisorderKind kind = DisorderKind::UniformSymmetric;
  double half_width = 1.0;            // uniform-symmetric
  double sigma = 1.0;                 // gaussian
  double scale = 1.0;                 // cauchy
  std::vector<double> breakpoints;    // piecewise: m+1 strictly increasing edges
  std::vector<double> values;         // piecewise: m nonnegative plateau heights
  std::vector<double> cumulative;     // piecewise: mass up to each breakpoint

  static DisorderSpec uniform_symmetric(double half_width = 1.0);
  static DisorderSpec gaussian(double sigma = 1.0);
  static DisorderSpec cauchy(double scale = 1.0);
  static DisorderSpec piecewise(std::vector<double> breakpoints, std::vector<double> values);

  bool bounded() const;
  double support_lo() const;  // -inf for unbounded kinds
  double support_hi() const;

  double density(double v) const;
  double cdf(double v) const;

  // Value of draw `index` from the given stream; pure in (stream, index).
  double draw_at(const RandomStream& rng, std::uint64_t index) const;
  std::vector<double> sample(std::uint64_t seed, std::uint64_t stream, std::size_t n) const;

  std::string to_json_string() const;
  static DisorderSpec from_json_string(const std::string& text);
};

// Minimal function M(v): infimum over window half-widths in (0,1] of the
// density averaged over [v-w, v+w]. Evaluated on a geometric grid of window
// sizes down to 2^-20 and refined locally until the value moves < 1e-6.
double minimal_function(const DisorderSpec& spec, double v);

struct RegularityResult {
  double constant = 1.0;     // sup over the grid of density / minimal function
  bool bounded = true;       // false if any ratio exceeded the cap
  double worst_point = 0.0;  // grid point attaining the sup (or first cap hit)
};

// Smallest b with density <= b * M over the grid; ratio 0/0 counts as 1 and a
// ratio above `cap` marks the distribution unbounded at this resolution.
RegularityResult regularity_constant(const DisorderSpec& spec, std::span<const double> grid,
                                     double cap = 1e6);

}  // namespace bethe
