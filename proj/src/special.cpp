// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/special.hpp"

#include <cmath>

namespace btlab {

namespace {

cplx series(double a, double b, double c, cplx x) {
  cplx term{1.0, 0.0};
  cplx sum = term;
  for (int n = 0; n < 200000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
    if (term == cplx{}) return sum;
  }
  raise(ErrorKind::kEvaluation, "2F1 series did not converge at x = " + format_point(x));
}

}  // namespace

cplx hyp2f1(double a, double b, double c, cplx x) {
  if (c <= 0.0 && c == std::floor(c))
    raise(ErrorKind::kEvaluation, "2F1 undefined for non-positive integer c");
  // Pfaff maps Re x < 1/2 into the unit disk; prefer whichever argument is smaller.
  const bool pfaff_ok = x.real() < 0.5;
  const cplx y = pfaff_ok ? x / (x - 1.0) : cplx{};
  if (std::abs(x) < 1.0 && (!pfaff_ok || std::abs(x) <= std::abs(y))) return series(a, b, c, x);
  if (pfaff_ok) return std::pow(1.0 - x, -a) * series(a, c - b, c, y);
  raise(ErrorKind::kEvaluation, "2F1 argument " + format_point(x) + " outside the supported region");
}

}  // namespace btlab
