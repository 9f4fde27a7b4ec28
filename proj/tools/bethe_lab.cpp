// Command-line front end.  All computation goes through the C API; this file
// only translates flags into the JSON parameter object and routes the report.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bethe/capi.h"

namespace {

using ordered_json = nlohmann::ordered_json;

enum class FlagKind { Int, UInt, Double, String, DoubleList, Object };

struct FlagDef {
  const char* key;
  FlagKind kind;
  const char* help;
};

// One flag vocabulary shared by every subcommand; each command picks a subset.
// Keys match the JSON parameter names one for one.
const std::map<std::string, FlagDef> kFlagTable = {
    {"K", {"K", FlagKind::Int, "branching factor (children per vertex)"}},
    {"E", {"E", FlagKind::Double, "energy"}},
    {"eta", {"eta", FlagKind::Double, "imaginary regularization"}},
    {"etas", {"etas", FlagKind::DoubleList, "eta ladder for extrapolation (comma separated)"}},
    {"lambda", {"lambda", FlagKind::Double, "disorder strength"}},
    {"lambdas", {"lambdas", FlagKind::DoubleList, "disorder strengths (comma separated)"}},
    {"lambda_min", {"lambda_min", FlagKind::Double, "grid start for lambda"}},
    {"lambda_max", {"lambda_max", FlagKind::Double, "grid end for lambda"}},
    {"lambda_steps", {"lambda_steps", FlagKind::Int, "grid points for lambda"}},
    {"energies", {"energies", FlagKind::DoubleList, "energy grid (comma separated)"}},
    {"E_min", {"E_min", FlagKind::Double, "grid start for energy"}},
    {"E_max", {"E_max", FlagKind::Double, "grid end for energy"}},
    {"E_steps", {"E_steps", FlagKind::Int, "grid points for energy"}},
    {"depth", {"depth", FlagKind::Int, "tree depth for estimators"}},
    {"R", {"R", FlagKind::Int, "truncation depth"}},
    {"M", {"M", FlagKind::Int, "depth margin beyond the truncation"}},
    {"r_min", {"r_min", FlagKind::Int, "smallest depth in the decay fit"}},
    {"n", {"n", FlagKind::Int, "sample count"}},
    {"seed", {"seed", FlagKind::UInt, "base seed"}},
    {"s", {"s", FlagKind::Double, "fractional moment order in (0,1)"}},
    {"k", {"k", FlagKind::Double, "wire wave number in (0,pi)"}},
    {"deltas", {"deltas", FlagKind::DoubleList, "edge window offsets (comma separated)"}},
    {"vertex", {"vertex", FlagKind::String, "'rooted' or 'lattice'"}},
    {"method", {"method", FlagKind::String, "'depth' or 'pool'"}},
    {"pool_size", {"pool_size", FlagKind::Int, "population pool size"}},
    {"warmup", {"warmup", FlagKind::Int, "population warmup sweeps"}},
    {"sweeps", {"sweeps", FlagKind::Int, "population measurement sweeps"}},
    {"disorder", {"disorder", FlagKind::Object, "disorder spec as JSON text"}},
    {"threads", {"threads", FlagKind::Int, "worker threads (0 = all available)"}},
};

struct Invocation {
  std::string command;                       // name passed to bethe_run
  std::map<std::string, std::string> flags;  // raw text of flags the user set
  std::string config_path;
  std::string output_path;
  std::string format = "json";
};

ordered_json parse_flag_value(const std::string& key, const std::string& text) {
  const FlagDef& def = kFlagTable.at(key);
  std::size_t pos = 0;
  try {
    switch (def.kind) {
      case FlagKind::Int: {
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) break;
        return v;
      }
      case FlagKind::UInt: {
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size() || text.find('-') != std::string::npos) break;
        return v;
      }
      case FlagKind::Double: {
        const double v = std::stod(text, &pos);
        if (pos != text.size()) break;
        return v;
      }
      case FlagKind::String:
        return text;
      case FlagKind::DoubleList: {
        ordered_json arr = ordered_json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const double v = std::stod(item, &pos);
          if (pos != item.size()) throw std::invalid_argument(item);
          arr.push_back(v);
        }
        if (arr.empty()) break;
        return arr;
      }
      case FlagKind::Object: {
        ordered_json obj = ordered_json::parse(text, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) break;
        return obj;
      }
    }
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--" + key, "cannot parse '" + text + "'");
}

void add_flags(CLI::App* cmd, Invocation& inv, const std::vector<std::string>& keys) {
  for (const std::string& key : keys) {
    const FlagDef& def = kFlagTable.at(key);
    cmd->add_option_function<std::string>(
        "--" + key,
        [&inv, key](const std::string& text) {
          parse_flag_value(key, text);  // reject malformed input at parse time
          inv.flags[key] = text;
        },
        def.help);
  }
  cmd->add_option("--config", inv.config_path, "JSON file with parameter defaults");
  cmd->add_option("--output", inv.output_path, "write the report here instead of stdout");
  cmd->add_option("--format", inv.format, "'json' (default) or 'csv' where available")
      ->check(CLI::IsMember({"json", "csv"}));
}

int run_invocation(const Invocation& inv) {
  ordered_json params = ordered_json::object();
  if (!inv.config_path.empty()) {
    std::ifstream in(inv.config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot read config file '%s'\n", inv.config_path.c_str());
      return 3;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    ordered_json loaded = ordered_json::parse(buffer.str(), nullptr, false);
    if (loaded.is_discarded() || !loaded.is_object()) {
      std::fprintf(stderr, "error: config file '%s' is not a JSON object\n",
                   inv.config_path.c_str());
      return 1;
    }
    params = std::move(loaded);
  }
  for (const auto& [key, text] : inv.flags) {
    params[key] = parse_flag_value(key, text);
  }

  bethe_report* report = nullptr;
  const bethe_status status = bethe_run(inv.command.c_str(), params.dump().c_str(), &report);
  if (status != BETHE_OK) {
    std::fprintf(stderr, "error: %s\n", bethe_last_error());
    return static_cast<int>(status);
  }

  std::string payload = bethe_report_json(report);
  bethe_report_free(report);
  if (inv.format == "csv") {
    const ordered_json doc = ordered_json::parse(payload);
    if (!doc.contains("result") || !doc["result"].contains("csv")) {
      std::fprintf(stderr, "error: command '%s' has no CSV form\n", inv.command.c_str());
      return 1;
    }
    payload = doc["result"]["csv"].get<std::string>();
  } else {
    payload += "\n";
  }

  if (inv.output_path.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
    return 0;
  }
  std::ofstream out(inv.output_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "error: cannot write '%s'\n", inv.output_path.c_str());
    return 3;
  }
  out << payload;
  return out ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Green functions, Lyapunov exponents, and spectral statistics on regular trees"};
  app.set_version_flag("--version", std::string(bethe_version()));
  app.require_subcommand(1);

  // One Invocation per leaf subcommand; callbacks record which one fired.
  std::vector<Invocation> slots(20);
  int fired = -1;
  int slot = 0;
  const auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& about,
                        const std::string& command, const std::vector<std::string>& keys) {
    CLI::App* cmd = parent->add_subcommand(name, about);
    const int index = slot++;
    slots[index].command = command;
    add_flags(cmd, slots[index], keys);
    cmd->callback([&fired, index] { fired = index; });
    return cmd;
  };

  const std::vector<std::string> mc_base = {"K", "lambda", "E", "eta", "depth",
                                            "n", "seed",   "disorder", "threads"};

  leaf(&app, "free", "closed-form Green functions of the clean lattice", "free",
       {"K", "E", "eta", "threads"});
  leaf(&app, "spectrum", "spectrum edges and the weak-disorder threshold", "spectrum",
       {"K", "lambda", "threads"});
  leaf(&app, "lyap", "Lyapunov exponent estimators with eta extrapolation", "lyap",
       {"K", "lambda", "E", "eta", "etas", "depth", "n", "seed", "vertex", "method", "pool_size",
        "warmup", "sweeps", "disorder", "threads"});
  leaf(&app, "acdensity", "spectral density from the regularized resolvent", "acdensity", mc_base);
  leaf(&app, "phase", "classify a (lambda, E) grid against the delocalization criterion", "phase",
       {"K", "lambdas", "lambda_min", "lambda_max", "lambda_steps", "energies", "E_min", "E_max",
        "E_steps", "eta", "depth", "n", "seed", "disorder", "threads"});
  leaf(&app, "edge-window", "bisect the criterion window width at the spectral edge",
       "edge_window", {"K", "lambda", "eta", "depth", "n", "seed", "disorder", "threads"});
  leaf(&app, "scatter", "reflection statistics for a wire attached to the tree", "scatter",
       {"K", "lambda", "energies", "E_min", "E_max", "E_steps", "eta", "k", "depth", "n", "seed",
        "disorder", "threads"});

  CLI::App* verify = app.add_subcommand("verify", "checked inequalities and decay properties");
  verify->require_subcommand(1);
  leaf(verify, "lb", "pointwise lower bound on the forward value", "verify_lb",
       {"K", "lambda", "R", "n", "seed", "disorder", "threads"});
  leaf(verify, "gap", "Lyapunov gap below log K near the shifted edge", "verify_gap",
       {"K", "lambda", "lambdas", "depth", "n", "seed", "disorder", "threads"});
  leaf(verify, "trunc", "resolvent identity across a depth cut", "verify_trunc",
       {"K", "lambda", "E", "eta", "R", "M", "n", "seed", "disorder", "threads"});
  leaf(verify, "boundary", "decay rate of boundary Green values", "verify_boundary",
       {"K", "lambda", "E", "R", "r_min", "n", "seed", "disorder", "threads"});
  leaf(verify, "moments", "fractional moment decay in depth", "verify_moments",
       {"K", "lambda", "E", "eta", "s", "depth", "n", "seed", "disorder", "threads"});
  leaf(verify, "lifshitz", "small-eigenvalue probability near the spectrum bottom",
       "verify_lifshitz", {"K", "lambda", "R", "deltas", "n", "seed", "disorder", "threads"});
  leaf(verify, "main", "main-term lower bound for the truncated Green function", "verify_main",
       {"K", "lambda", "E", "R", "M", "n", "seed", "disorder", "threads"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (fired < 0) {
    std::fprintf(stderr, "error: no subcommand selected\n%s\n", app.help().c_str());
    return 1;
  }
  return run_invocation(slots[fired]);
}
