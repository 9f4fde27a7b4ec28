#include "bethe/capi.h"

#include <new>
#include <string>

#include "bethe/errors.hpp"
#include "bethe/runs.hpp"
#include "bethe/tree_green.hpp"
#include "bethe/version.hpp"

struct bethe_report {
  std::string json;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

// Translates the exception taxonomy into status codes at the boundary.
template <typename Fn>
bethe_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return BETHE_OK;
  } catch (const bethe::ConfigError& e) {
    set_error(e.what());
    return BETHE_ERR_CONFIG;
  } catch (const bethe::VerificationError& e) {
    set_error(e.what());
    return BETHE_ERR_VERIFICATION;
  } catch (const bethe::NumericsError& e) {
    set_error(e.what());
    return BETHE_ERR_NUMERICS;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return BETHE_ERR_NUMERICS;
  } catch (const std::exception& e) {
    set_error(e.what());
    return BETHE_ERR_CONFIG;
  }
}

}  // namespace

extern "C" {

bethe_status bethe_run(const char* command, const char* params_json, bethe_report** out) {
  if (out != nullptr) *out = nullptr;
  if (command == nullptr || out == nullptr) {
    set_error("bethe_run requires a command and an output handle");
    return BETHE_ERR_CONFIG;
  }
  return guarded([&] {
    std::string json = bethe::run_command(command, params_json ? params_json : "");
    *out = new bethe_report{std::move(json)};
  });
}

const char* bethe_report_json(const bethe_report* report) {
  return report ? report->json.c_str() : "";
}

void bethe_report_free(bethe_report* report) { delete report; }

const char* bethe_last_error(void) { return g_last_error.c_str(); }

const char* bethe_version(void) { return bethe::kVersion; }

bethe_status bethe_free_forward_green(int branching, double energy, double eta, double* out_re,
                                      double* out_im) {
  if (out_re == nullptr || out_im == nullptr) {
    set_error("null output pointer");
    return BETHE_ERR_CONFIG;
  }
  return guarded([&] {
    if (branching < 2) throw bethe::ConfigError("branching must be at least 2");
    const bethe::cdouble g = bethe::free_forward_green(branching, {energy, eta});
    *out_re = g.real();
    *out_im = g.imag();
  });
}

bethe_status bethe_free_lattice_green(int branching, double energy, double eta, double* out_re,
                                      double* out_im) {
  if (out_re == nullptr || out_im == nullptr) {
    set_error("null output pointer");
    return BETHE_ERR_CONFIG;
  }
  return guarded([&] {
    if (branching < 2) throw bethe::ConfigError("branching must be at least 2");
    const bethe::cdouble g = bethe::free_lattice_green(branching, {energy, eta});
    *out_re = g.real();
    *out_im = g.imag();
  });
}

bethe_status bethe_free_lyapunov(int branching, double energy, double* out) {
  if (out == nullptr) {
    set_error("null output pointer");
    return BETHE_ERR_CONFIG;
  }
  return guarded([&] {
    if (branching < 2) throw bethe::ConfigError("branching must be at least 2");
    *out = bethe::free_lyapunov(branching, energy);
  });
}

bethe_status bethe_spectrum_edges(int branching, double lambda, double* out_lo, double* out_hi) {
  if (out_lo == nullptr || out_hi == nullptr) {
    set_error("null output pointer");
    return BETHE_ERR_CONFIG;
  }
  return guarded([&] {
    if (branching < 2) throw bethe::ConfigError("branching must be at least 2");
    if (lambda < 0.0) throw bethe::ConfigError("lambda must be nonnegative");
    const auto [lo, hi] = bethe::spectrum_edges(branching, lambda);
    *out_lo = lo;
    *out_hi = hi;
  });
}

}  // extern "C"
