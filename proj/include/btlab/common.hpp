// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace btlab {

using cplx = std::complex<double>;

/// Real scalar field on a chart, z -> f(z).
using ScalarField = std::function<double(cplx)>;
/// Complex-valued field on a chart; also used for frame coefficients of sections.
using ComplexField = std::function<cplx(cplx)>;

enum class ErrorKind {
  kInvalidArgument,
  kDomain,
  kEvaluation,
  kNumerical,
  kShiftRejected,
  kTruncation,
  kConfig,
  kStatistics,
  kReliability,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception of the library; the kind maps one-to-one onto C API status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

std::string format_point(cplx z);

}  // namespace btlab
