// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/common.hpp"

#include <cstdio>

namespace btlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kEvaluation: return "evaluation error";
    case ErrorKind::kNumerical: return "numerical error";
    case ErrorKind::kShiftRejected: return "shift rejected";
    case ErrorKind::kTruncation: return "truncation error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kStatistics: return "statistics error";
    case ErrorKind::kReliability: return "reliability error";
    case ErrorKind::kIo: return "i/o error";
  }
  return "unknown error";
}

void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

std::string format_point(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.6g%+.6gi)", z.real(), z.imag());
  return buf;
}

}  // namespace btlab
