// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "btlab/common.hpp"

namespace btlab {

/// Gauss hypergeometric 2F1(a, b; c; x) for |x| < 1 or Re x < 1/2.
/// Throws an evaluation error outside that region or when c is a non-positive integer.
cplx hyp2f1(double a, double b, double c, cplx x);

}  // namespace btlab
