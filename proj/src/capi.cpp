// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "btlab/bergman.hpp"
#include "btlab/experiment.hpp"
#include "btlab/presets.hpp"
#include "btlab/toeplitz.hpp"

struct btl_space {
  std::shared_ptr<const btlab::BergmanSpace> space;
};

struct btl_toeplitz {
  btlab::ToeplitzMatrix op;
};

namespace {

thread_local std::string g_last_error;

btl_status status_of(btlab::ErrorKind kind) {
  using btlab::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return BTL_INVALID_ARGUMENT;
    case ErrorKind::kDomain: return BTL_DOMAIN;
    case ErrorKind::kEvaluation: return BTL_EVALUATION;
    case ErrorKind::kNumerical: return BTL_NUMERICAL;
    case ErrorKind::kShiftRejected: return BTL_SHIFT_REJECTED;
    case ErrorKind::kTruncation: return BTL_TRUNCATION;
    case ErrorKind::kConfig: return BTL_CONFIG;
    case ErrorKind::kStatistics: return BTL_STATISTICS;
    case ErrorKind::kReliability: return BTL_RELIABILITY;
    case ErrorKind::kIo: return BTL_IO;
  }
  return BTL_INTERNAL;
}

template <class Fn>
btl_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    fn();
    return BTL_OK;
  } catch (const btlab::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("config: ") + e.what();
    return BTL_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BTL_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BTL_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BTL_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) btlab::raise(btlab::ErrorKind::kInvalidArgument, what);
}

char* duplicate(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

Eigen::VectorXcd read_vector(const double* data, Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {data[2 * i], data[2 * i + 1]};
  return v;
}

void write_vector(const Eigen::VectorXcd& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[2 * i] = v(i).real();
    out[2 * i + 1] = v(i).imag();
  }
}

}  // namespace

extern "C" {

const char* btl_status_string(btl_status status) {
  switch (status) {
    case BTL_OK: return "ok";
    case BTL_INVALID_ARGUMENT: return "invalid argument";
    case BTL_DOMAIN: return "domain error";
    case BTL_EVALUATION: return "evaluation error";
    case BTL_NUMERICAL: return "numerical error";
    case BTL_SHIFT_REJECTED: return "shift rejected";
    case BTL_TRUNCATION: return "truncation error";
    case BTL_CONFIG: return "config error";
    case BTL_STATISTICS: return "statistics error";
    case BTL_RELIABILITY: return "reliability error";
    case BTL_IO: return "io error";
    case BTL_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* btl_last_error(void) { return g_last_error.c_str(); }

const char* btl_version(void) { return btlab::library_version(); }

void btl_string_free(char* s) { std::free(s); }

btl_status btl_space_create(const char* preset, int truncation, btl_space** out) {
  return guarded([&] {
    require(preset && out, "null argument");
    *out = nullptr;
    auto space = btlab::make_space(btlab::space_preset(preset), truncation);
    *out = new btl_space{std::move(space)};
  });
}

void btl_space_destroy(btl_space* space) { delete space; }

btl_status btl_space_dimension(const btl_space* space, size_t* out) {
  return guarded([&] {
    require(space && out, "null argument");
    *out = static_cast<size_t>(space->space->basis.degrees.size());
  });
}

btl_status btl_space_basis_json(const btl_space* space, char** out) {
  return guarded([&] {
    require(space && out, "null argument");
    *out = duplicate(space->space->basis.to_json().dump());
  });
}

btl_status btl_toeplitz_create(const btl_space* space, const char* symbol, btl_toeplitz** out) {
  return guarded([&] {
    require(space && symbol && out, "null argument");
    *out = nullptr;
    auto op = btlab::toeplitz_matrix(space->space, btlab::symbol_preset(symbol));
    *out = new btl_toeplitz{std::move(op)};
  });
}

void btl_toeplitz_destroy(btl_toeplitz* op) { delete op; }

btl_status btl_toeplitz_spectrum(const btl_toeplitz* op, double* values) {
  return guarded([&] {
    require(op && values, "null argument");
    const auto& ev = op->op.eig.values;
    for (Eigen::Index i = 0; i < ev.size(); ++i) values[i] = ev(i);
  });
}

btl_status btl_toeplitz_resolvent(const btl_toeplitz* op, double c_re, double c_im, const double* psi, double* out) {
  return guarded([&] {
    require(op && psi && out, "null argument");
    const auto r = btlab::resolvent_apply(op->op, {c_re, c_im}, read_vector(psi, op->op.matrix.rows()));
    write_vector(r.coefficients, out);
  });
}

btl_status btl_toeplitz_semigroup(const btl_toeplitz* op, double t, const double* psi, double* out) {
  return guarded([&] {
    require(op && psi && out, "null argument");
    write_vector(btlab::semigroup_apply(op->op, t, read_vector(psi, op->op.matrix.rows())), out);
  });
}

btl_status btl_run_experiment(const char* config_json, const btl_run_options* options, char** report,
                              int* passed) {
  return guarded([&] {
    require(config_json && report && passed, "null argument");
    *report = nullptr;
    *passed = 0;
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      btlab::raise(btlab::ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
    }
    btlab::RunOptions opts;
    if (options) {
      if (options->output_dir) opts.output_dir = options->output_dir;
      if (options->has_seed) opts.seed = options->seed;
      opts.workers = options->workers;
    }
    const auto result = btlab::run_experiment(cfg, opts);
    *report = duplicate(result.report.dump(2));
    *passed = result.passed ? 1 : 0;
  });
}

btl_status btl_list_presets(char** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = duplicate(btlab::preset_catalog());
  });
}

btl_status btl_config_schema(char** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = duplicate(btlab::config_schema());
  });
}

}  // extern "C"
