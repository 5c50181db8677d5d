// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Radial-times-angular product rules for integrals against d^2z/pi.

#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "btlab/common.hpp"

namespace btlab {

/// Nodes and log-weights of a one-dimensional Gauss rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> log_weights;
};

/// Gauss rule for the weight x^alpha e^-x on (0, inf).
GaussRule gauss_laguerre(int n, double alpha);
/// Gauss rule for the weight (1-x)^a (1+x)^b on (-1, 1).
GaussRule gauss_jacobi(int n, double a, double b);

/// Which radial substitution a rule is built on.
enum class RadialFamily {
  kGaussianPlane,     ///< Gauss-Laguerre in u = r^2, matches e^{-|z|^2}
  kExponentialPlane,  ///< Gauss-Laguerre in r, matches e^{-|z|}
  kSphere,            ///< Gauss-Jacobi(0,0) in t = r^2/(1+r^2)
};

const char* to_string(RadialFamily family) noexcept;

struct RadialNode {
  double r;
  /// Approximates 2 r dr, so that sum_i weight_i g(r_i) ~ int g(r) 2r dr.
  double weight;
  double log_weight;
};

/// Product rule: int F d^2z/pi ~ sum_i sum_j (weight_i / K) F(r_i e^{2 pi i j/K}).
struct QuadratureRule {
  RadialFamily family = RadialFamily::kGaussianPlane;
  std::vector<RadialNode> radial;
  int angular_count = 1;
  double domain_radius = std::numeric_limits<double>::infinity();
  /// Polynomial degree in the family's radial variable integrated exactly.
  int exactness_degree = 0;

  std::size_t size() const noexcept { return radial.size() * static_cast<std::size_t>(angular_count); }
  std::size_t radial_index(std::size_t k) const noexcept { return k / angular_count; }
  int angular_index(std::size_t k) const noexcept { return static_cast<int>(k % angular_count); }
  cplx node(std::size_t k) const;
  double weight(std::size_t k) const noexcept { return radial[radial_index(k)].weight / angular_count; }
  double log_weight(std::size_t k) const;
};

QuadratureRule make_rule(RadialFamily family, int radial_count, int angular_count);

}  // namespace btlab
