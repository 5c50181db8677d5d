// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Riemann surfaces presented in a single isothermal chart, holomorphic maps
// between them, and the local differential operators built from the
// conformal factor.

#pragma once

#include <limits>
#include <string>

#include "btlab/common.hpp"

namespace btlab {

inline constexpr double kDefaultStep = 1e-4;
/// |Phi'(z)| below this marks a singular point of a holomorphic map.
inline constexpr double kSingularThreshold = 1e-12;

struct ChartDomain {
  double radius = std::numeric_limits<double>::infinity();

  bool contains(cplx z, double margin = 0.0) const noexcept {
    return std::abs(z) + margin < radius;
  }
};

struct SurfaceModel {
  std::string name;
  ChartDomain domain;
  /// Conformal factor squared; the metric is (gamma^2/2)(dz dzbar + dzbar dz).
  ScalarField gamma_sq;

  static SurfaceModel flat_plane();
  /// Stereographic chart of CP^1 with gamma^2 = (1+|z|^2)^-2.
  static SurfaceModel round_sphere();
};

struct HoloMap {
  std::string name;
  ComplexField phi;
  ComplexField dphi;
  SurfaceModel source;
  SurfaceModel target;
  /// Polynomial degree of phi, used to size target truncations (0 if not polynomial).
  int degree = 1;

  bool is_singular(cplx z) const { return std::abs(dphi(z)) < kSingularThreshold; }
};

HoloMap identity_map(const SurfaceModel& surface);
/// z -> z^2 on the flat plane.
HoloMap square_map();
/// z -> alpha z + beta on the round sphere; fixes the point excluded from the chart.
HoloMap moebius_map(cplx alpha, cplx beta);

/// Five-point estimate of (1/gamma^2)(d1^2 + d2^2) field at z.
cplx laplace_beltrami(const SurfaceModel& surface, const ComplexField& field, cplx z,
                      double step = kDefaultStep);

/// lambda^2(z) = gamma_target^2(Phi(z)) |Phi'(z)|^2 / gamma_source^2(z); zero at singular points.
double dilatation_sq(const HoloMap& map, cplx z);

/// |Laplace-Beltrami(test o Phi)(z)| on the source surface.
double harmonic_morphism_residual(const HoloMap& map, const ComplexField& test, cplx z,
                                  double step = kDefaultStep);

ScalarField pullback_weight(const HoloMap& map, ScalarField weight);

/// Largest |Cauchy-Riemann residual| of phi at z from centered differences.
double cauchy_riemann_residual(const HoloMap& map, cplx z, double step = kDefaultStep);

}  // namespace btlab
