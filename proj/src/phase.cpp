#include "bethe/phase.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <json.hpp>

#include "bethe/errors.hpp"
#include "bethe/rng.hpp"
#include "bethe/tree_green.hpp"
#include "bethe/version.hpp"

namespace bethe {

namespace {

using ordered_json = nlohmann::ordered_json;

PhaseClass class_from_verdict(CriterionVerdict verdict) {
  switch (verdict) {
    case CriterionVerdict::Holds: return PhaseClass::CriterionHolds;
    case CriterionVerdict::Fails: return PhaseClass::CriterionFails;
    default: return PhaseClass::Undecided;
  }
}

PhaseClass class_from_name(const std::string& name) {
  if (name == "outside-spectrum") return PhaseClass::OutsideSpectrum;
  if (name == "criterion-holds") return PhaseClass::CriterionHolds;
  if (name == "criterion-fails") return PhaseClass::CriterionFails;
  if (name == "undecided") return PhaseClass::Undecided;
  throw ConfigError("unknown phase class: " + name);
}

void append_g9(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("linspace needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return out;
}

const char* to_string(PhaseClass cls) {
  switch (cls) {
    case PhaseClass::OutsideSpectrum: return "outside-spectrum";
    case PhaseClass::CriterionHolds: return "criterion-holds";
    case PhaseClass::CriterionFails: return "criterion-fails";
    default: return "undecided";
  }
}

PhaseMap scan(const PhaseGrid& grid, int branching, const DisorderSpec& spec, double eta,
              int depth, int n_samples, std::uint64_t seed, int threads) {
  if (grid.lambdas.empty() || grid.energies.empty()) throw ConfigError("empty phase grid");
  if (!(eta > 0.0)) throw ConfigError("phase scan needs eta > 0");
  if (branching < 2) throw ConfigError("tree branching must be at least 2");
  for (double l : grid.lambdas) {
    if (l < 0.0) throw ConfigError("lambda must be nonnegative");
  }

  PhaseMap map;
  map.grid = grid;
  map.eta = eta;
  map.depth = depth;
  map.n_samples = n_samples;
  map.seed = seed;
  map.branching = branching;
  map.disorder = spec.to_json_string();
  map.cells.reserve(grid.lambdas.size() * grid.energies.size());

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t cell_index = 0;
  for (double lambda : grid.lambdas) {
    for (double energy : grid.energies) {
      PhaseCell cell;
      cell.lambda = lambda;
      cell.energy = energy;
      const double edge = spectrum_edges(map.branching, lambda).second;
      if (std::abs(energy) > edge) {
        cell.l_mean = nan;
        cell.l_stderr = nan;
        cell.cls = PhaseClass::OutsideSpectrum;
      } else if (lambda == 0.0) {
        cell.l_mean = free_lyapunov(map.branching, energy);
        cell.l_stderr = 0.0;
        cell.cls = class_from_verdict(delocalization_criterion(cell.l_mean, 0.0, map.branching));
      } else {
        try {
          const std::uint64_t cell_seed = derive_seed(seed, stream_group::kPhaseScan, cell_index);
          const LyapunovEstimate est = estimate_finite_depth(
              map.branching, spec, lambda, energy, eta, depth, n_samples, cell_seed, threads);
          cell.l_mean = est.mean;
          cell.l_stderr = est.stderr_;
          cell.cls = class_from_verdict(
              delocalization_criterion(est.mean, est.stderr_, map.branching));
        } catch (const NumericsError&) {
          cell.l_mean = nan;
          cell.l_stderr = nan;
          cell.cls = PhaseClass::Undecided;
          ++map.failed_cells;
        }
      }
      map.cells.push_back(cell);
      ++cell_index;
    }
  }
  return map;
}

std::string phase_to_csv(const PhaseMap& map) {
  std::string out = "lambda,E,L_mean,L_stderr,class\n";
  for (const PhaseCell& cell : map.cells) {
    append_g9(out, cell.lambda);
    out += ',';
    append_g9(out, cell.energy);
    out += ',';
    append_g9(out, cell.l_mean);
    out += ',';
    append_g9(out, cell.l_stderr);
    out += ',';
    out += to_string(cell.cls);
    out += '\n';
  }
  return out;
}

std::string phase_to_json(const PhaseMap& map) {
  ordered_json j;
  j["tool"]["name"] = kToolName;
  j["tool"]["version"] = kVersion;
  j["grid"]["lambdas"] = map.grid.lambdas;
  j["grid"]["energies"] = map.grid.energies;
  j["eta"] = map.eta;
  j["depth"] = map.depth;
  j["n_samples"] = map.n_samples;
  j["seed"] = map.seed;
  j["branching"] = map.branching;
  j["failed_cells"] = map.failed_cells;
  j["disorder"] = ordered_json::parse(map.disorder);
  ordered_json cells = ordered_json::array();
  for (const PhaseCell& cell : map.cells) {
    ordered_json c;
    c["lambda"] = cell.lambda;
    c["energy"] = cell.energy;
    c["l_mean"] = cell.l_mean;      // NaN serializes as null
    c["l_stderr"] = cell.l_stderr;
    c["class"] = to_string(cell.cls);
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j.dump();
}

PhaseMap phase_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  PhaseMap map;
  map.grid.lambdas = j.at("grid").at("lambdas").get<std::vector<double>>();
  map.grid.energies = j.at("grid").at("energies").get<std::vector<double>>();
  map.eta = j.at("eta").get<double>();
  map.depth = j.at("depth").get<int>();
  map.n_samples = j.at("n_samples").get<int>();
  map.seed = j.at("seed").get<std::uint64_t>();
  map.branching = j.at("branching").get<int>();
  map.failed_cells = j.at("failed_cells").get<std::int64_t>();
  map.disorder = j.at("disorder").dump();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : j.at("cells")) {
    PhaseCell cell;
    cell.lambda = c.at("lambda").get<double>();
    cell.energy = c.at("energy").get<double>();
    cell.l_mean = c.at("l_mean").is_null() ? nan : c.at("l_mean").get<double>();
    cell.l_stderr = c.at("l_stderr").is_null() ? nan : c.at("l_stderr").get<double>();
    cell.cls = class_from_name(c.at("class").get<std::string>());
    map.cells.push_back(cell);
  }
  return map;
}

EdgeWindowResult edge_window(int branching, const DisorderSpec& spec, double lambda, double eta,
                             int depth, int n_samples, std::uint64_t seed, int threads) {
  if (!(lambda >= 0.0 && lambda < weak_disorder_threshold(branching))) {
    throw ConfigError("lambda must lie in [0, weak-disorder threshold)");
  }
  EdgeWindowResult out;
  const double edge = spectrum_edges(branching, lambda).second;
  out.delta_max = edge;

  std::map<double, CriterionVerdict> memo;
  auto probe = [&](double energy) {
    auto it = memo.find(energy);
    if (it != memo.end()) return it->second;
    CriterionVerdict verdict;
    if (lambda == 0.0) {
      verdict = delocalization_criterion(free_lyapunov(branching, energy), 0.0, branching);
    } else {
      const std::uint64_t probe_seed =
          derive_seed(seed, stream_group::kPhaseScan, std::bit_cast<std::uint64_t>(energy));
      const LyapunovEstimate est = estimate_finite_depth(branching, spec, lambda, energy, eta,
                                                         depth, n_samples, probe_seed, threads);
      verdict = delocalization_criterion(est.mean, est.stderr_, branching);
    }
    memo.emplace(energy, verdict);
    return verdict;
  };
  auto window_holds = [&](double delta) {
    for (int i = 0; i < 8; ++i) {
      if (probe(edge - delta * i / 8.0) != CriterionVerdict::Holds) return false;
    }
    return true;
  };

  out.holds_at_edge = probe(edge) == CriterionVerdict::Holds;
  if (!out.holds_at_edge) {
    out.delta = 0.0;
    out.probes_evaluated = static_cast<int>(memo.size());
    return out;
  }
  if (window_holds(out.delta_max)) {
    out.delta = out.delta_max;
  } else {
    double lo = 0.0, hi = out.delta_max;
    while (hi - lo > out.resolution) {
      const double mid = 0.5 * (lo + hi);
      if (window_holds(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.delta = lo;
  }
  out.probes_evaluated = static_cast<int>(memo.size());
  return out;
}

}  // namespace bethe
