#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bethe/disorder.hpp"
#include "bethe/tree_green.hpp"

namespace bethe {

// Dense LU with partial pivoting; factor once, solve many right-hand sides.
template <typename T>
class DenseLU {
 public:
  void factor(std::int64_t n, std::vector<T> matrix);
  void solve(std::span<T> rhs) const;
  std::int64_t size() const { return n_; }

 private:
  std::int64_t n_ = 0;
  std::vector<T> lu_;
  std::vector<std::int64_t> pivots_;
};

extern template class DenseLU<double>;
extern template class DenseLU<std::complex<double>>;

// Explicit sparse form of H = hopping + lambda * V on a finite tree, for
// cross-checking the recursion against direct linear algebra. Kept small on
// purpose; dimension is capped so dense factorizations stay affordable.
struct ExplicitHamiltonian {
  static constexpr std::int64_t kMaxDimension = 5000;

  std::int64_t dimension = 0;
  std::vector<double> diagonal;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;  // parent < child
  double shift_hint = 0.0;  // strictly below the spectrum, for inverse iteration

  // y = H x
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> dense() const;  // row-major dimension^2
};

ExplicitHamiltonian assemble(const TreeTopology& topo, const PotentialSample& pot);

// Column x -> <x|(H - z)^{-1}|column> via dense complex LU.
std::vector<cdouble> resolvent_column(const ExplicitHamiltonian& ham, cdouble z,
                                      std::int64_t column);

struct EigenResult {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimum eigenvalue by shifted inverse power iteration. The shift starts at
// ham.shift_hint and is tightened to just below the first eigenvalue by
// bisection on the factorization inertia, so the iteration contracts fast even
// when low eigenvalues cluster; residual is ||H x - mu x||_2 at the returned
// vector.
EigenResult smallest_eigenvalue(const ExplicitHamiltonian& ham, double tol = 1e-10,
                                int max_iterations = 500);

struct EdgeProbabilityResult {
  std::vector<double> window_offsets;   // Delta E >= 0, per threshold
  std::vector<std::int64_t> counts;     // samples with min eig <= E_lambda + Delta E
  std::vector<double> probabilities;
  std::vector<double> ci_low;           // Wilson 95% interval
  std::vector<double> ci_high;
  int n_samples = 0;
  double spectrum_bottom = 0.0;         // E_lambda for the requested disorder strength
  double min_eig_mean = 0.0;
  double min_eig_min = 0.0;
};

// P[min eig of H on the depth-(R-1) tree <= E_lambda + Delta E] by Monte
// Carlo over disorder samples; one eigenvalue solve per sample, all
// thresholds share it.
EdgeProbabilityResult edge_probability(const TreeTopology& topo, const DisorderSpec& spec,
                                       double lambda, std::span<const double> window_offsets,
                                       int n_samples, std::uint64_t seed, int threads);

}  // namespace bethe
