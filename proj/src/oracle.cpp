#include "bethe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bethe/errors.hpp"
#include "bethe/parallel.hpp"
#include "bethe/rng.hpp"

namespace bethe {

template <typename T>
void DenseLU<T>::factor(std::int64_t n, std::vector<T> matrix) {
  if (n <= 0 || std::ssize(matrix) != n * n) throw ConfigError("factor: bad matrix shape");
  n_ = n;
  lu_ = std::move(matrix);
  pivots_.resize(n);
  T* a = lu_.data();
  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t pivot = k;
    double best = std::abs(a[k * n + k]);
    for (std::int64_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(a[i * n + k]);
      if (cand > best) {
        best = cand;
        pivot = i;
      }
    }
    if (best < 1e-300) throw NumericsError("factor: matrix is numerically singular");
    pivots_[k] = pivot;
    if (pivot != k) {
      std::swap_ranges(a + k * n, a + (k + 1) * n, a + pivot * n);
    }
    const T inv_diag = T(1.0) / a[k * n + k];
    for (std::int64_t i = k + 1; i < n; ++i) {
      const T m = a[i * n + k] * inv_diag;
      a[i * n + k] = m;
      const T* row_k = a + k * n;
      T* row_i = a + i * n;
      for (std::int64_t j = k + 1; j < n; ++j) row_i[j] -= m * row_k[j];
    }
  }
}

template <typename T>
void DenseLU<T>::solve(std::span<T> rhs) const {
  if (std::ssize(rhs) != n_) throw ConfigError("solve: rhs length mismatch");
  const T* a = lu_.data();
  const std::int64_t n = n_;
  for (std::int64_t k = 0; k < n; ++k) {
    if (pivots_[k] != k) std::swap(rhs[k], rhs[pivots_[k]]);
    const T* row = a + k * n;
    T acc = rhs[k];
    for (std::int64_t j = 0; j < k; ++j) acc -= row[j] * rhs[j];
    rhs[k] = acc;
  }
  for (std::int64_t k = n - 1; k >= 0; --k) {
    const T* row = a + k * n;
    T acc = rhs[k];
    for (std::int64_t j = k + 1; j < n; ++j) acc -= row[j] * rhs[j];
    rhs[k] = acc / row[k];
  }
}

template class DenseLU<double>;
template class DenseLU<std::complex<double>>;

void ExplicitHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  for (std::int64_t i = 0; i < dimension; ++i) y[i] = diagonal[i] * x[i];
  for (const auto& [a, b] : edges) {
    y[a] += x[b];
    y[b] += x[a];
  }
}

std::vector<double> ExplicitHamiltonian::dense() const {
  std::vector<double> m(dimension * dimension, 0.0);
  for (std::int64_t i = 0; i < dimension; ++i) m[i * dimension + i] = diagonal[i];
  for (const auto& [a, b] : edges) {
    m[a * dimension + b] = 1.0;
    m[b * dimension + a] = 1.0;
  }
  return m;
}

ExplicitHamiltonian assemble(const TreeTopology& topo, const PotentialSample& pot) {
  if (topo.node_count > ExplicitHamiltonian::kMaxDimension) {
    throw ConfigError("explicit matrix exceeds the dimension cap");
  }
  if (std::ssize(pot.values) < topo.node_count) {
    throw ConfigError("potential sample shorter than the tree");
  }
  ExplicitHamiltonian ham;
  ham.dimension = topo.node_count;
  ham.diagonal.resize(topo.node_count);
  double min_diag = 0.0;
  for (std::int64_t i = 0; i < topo.node_count; ++i) {
    ham.diagonal[i] = pot.lambda * pot.values[i];
    min_diag = std::min(min_diag, ham.diagonal[i]);
  }
  ham.edges.reserve(topo.node_count - 1);
  for (std::int64_t i = 1; i < topo.node_count; ++i) ham.edges.emplace_back(topo.parent(i), i);
  // Hopping norm on the tree is below 2 sqrt(K), so this sits under every
  // eigenvalue for any potential, bounded or not.
  ham.shift_hint = min_diag - 2.0 * std::sqrt(static_cast<double>(topo.branching)) - 1.0;
  return ham;
}

std::vector<cdouble> resolvent_column(const ExplicitHamiltonian& ham, cdouble z,
                                      std::int64_t column) {
  if (column < 0 || column >= ham.dimension) throw ConfigError("resolvent column out of range");
  const std::int64_t n = ham.dimension;
  std::vector<cdouble> m(n * n, cdouble{0.0, 0.0});
  for (std::int64_t i = 0; i < n; ++i) m[i * n + i] = ham.diagonal[i] - z;
  for (const auto& [a, b] : ham.edges) {
    m[a * n + b] = 1.0;
    m[b * n + a] = 1.0;
  }
  DenseLU<cdouble> lu;
  lu.factor(n, std::move(m));
  std::vector<cdouble> rhs(n, cdouble{0.0, 0.0});
  rhs[column] = 1.0;
  lu.solve(rhs);
  return rhs;
}

namespace {

// Eigenvalues of H below sigma, by Sylvester inertia of H - sigma.  assemble
// indexes every child above its parent, so sweeping the edge list backwards
// eliminates leaf to root with no fill-in.
std::int64_t count_below(const ExplicitHamiltonian& ham, double sigma, std::vector<double>& d) {
  d.assign(ham.diagonal.begin(), ham.diagonal.end());
  for (double& v : d) v -= sigma;
  for (auto it = ham.edges.rbegin(); it != ham.edges.rend(); ++it) {
    double& child = d[it->second];
    if (child == 0.0) child = -1e-300;  // grazing pivot counts as crossed
    d[it->first] -= 1.0 / child;
  }
  std::int64_t negatives = 0;
  for (double v : d) negatives += v < 0.0 ? 1 : 0;
  return negatives;
}

}  // namespace

EigenResult smallest_eigenvalue(const ExplicitHamiltonian& ham, double tol, int max_iterations) {
  const std::int64_t n = ham.dimension;

  // A shift a fixed distance under the spectrum stalls once eigenvalue
  // spacings shrink below it, so bracket the minimum by inertia bisection
  // first and factor just underneath it; the power step then contracts hard.
  std::vector<double> scratch;
  double lo = ham.shift_hint;
  for (double step = 1.0; count_below(ham, lo, scratch) > 0; step *= 2.0) lo -= step;
  std::vector<std::int64_t> degree(n, 0);
  for (const auto& [a, b] : ham.edges) {
    ++degree[a];
    ++degree[b];
  }
  double hi = ham.diagonal[0] + static_cast<double>(degree[0]);
  for (std::int64_t i = 1; i < n; ++i) {
    hi = std::max(hi, ham.diagonal[i] + static_cast<double>(degree[i]));
  }
  const double width_target = std::max(1e-12, std::min(1e-9, tol));
  while (hi - lo > width_target) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket hit rounding resolution
    if (count_below(ham, mid, scratch) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  std::vector<double> shifted = ham.dense();
  for (std::int64_t i = 0; i < n; ++i) shifted[i * n + i] -= lo;
  DenseLU<double> lu;
  lu.factor(n, std::move(shifted));

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> hx(n);
  EigenResult result;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    lu.solve(x);
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NumericsError("inverse iteration produced a degenerate vector");
    }
    for (double& v : x) v /= norm;
    ham.apply(x, hx);
    double mu = 0.0;
    for (std::int64_t i = 0; i < n; ++i) mu += x[i] * hx[i];
    double res = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double r = hx[i] - mu * x[i];
      res += r * r;
    }
    result.value = mu;
    result.residual = std::sqrt(res);
    result.iterations = iter;
    if (result.residual <= tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

EdgeProbabilityResult edge_probability(const TreeTopology& topo, const DisorderSpec& spec,
                                       double lambda, std::span<const double> window_offsets,
                                       int n_samples, std::uint64_t seed, int threads) {
  if (n_samples < 1) throw ConfigError("edge probability needs at least one sample");
  if (window_offsets.empty()) throw ConfigError("edge probability needs at least one window");
  for (double d : window_offsets) {
    if (!(d >= 0.0)) throw ConfigError("window offsets must be nonnegative");
  }

  std::vector<double> min_eigs(n_samples);
  parallel_for(n_samples, threads, [&](std::int64_t s) {
    const std::uint64_t stream = substream(stream_group::kEdgeProbability, s);
    const PotentialSample pot = PotentialSample::draw(topo, spec, lambda, seed, stream);
    const ExplicitHamiltonian ham = assemble(topo, pot);
    const EigenResult eig = smallest_eigenvalue(ham);
    if (!eig.converged) throw NumericsError("eigenvalue iteration did not converge");
    min_eigs[s] = eig.value;
  });

  EdgeProbabilityResult out;
  out.window_offsets.assign(window_offsets.begin(), window_offsets.end());
  out.n_samples = n_samples;
  out.spectrum_bottom = spectrum_edges(topo.branching, lambda).first;
  out.min_eig_mean = compensated_total(min_eigs) / n_samples;
  out.min_eig_min = *std::min_element(min_eigs.begin(), min_eigs.end());

  constexpr double kZ = 1.96;  // 95% Wilson interval
  const double n = static_cast<double>(n_samples);
  for (double delta : window_offsets) {
    std::int64_t count = 0;
    const double threshold = out.spectrum_bottom + delta;
    for (double mu : min_eigs) count += (mu <= threshold) ? 1 : 0;
    const double p_hat = static_cast<double>(count) / n;
    const double denom = 1.0 + kZ * kZ / n;
    const double center = (p_hat + kZ * kZ / (2.0 * n)) / denom;
    const double half =
        (kZ / denom) * std::sqrt(p_hat * (1.0 - p_hat) / n + kZ * kZ / (4.0 * n * n));
    out.counts.push_back(count);
    out.probabilities.push_back(p_hat);
    out.ci_low.push_back(std::max(0.0, center - half));
    out.ci_high.push_back(std::min(1.0, center + half));
  }
  return out;
}

}  // namespace bethe
