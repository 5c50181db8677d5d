// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/surface.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace btlab {

SurfaceModel SurfaceModel::flat_plane() {
  return {"flat", ChartDomain{}, [](cplx) { return 1.0; }};
}

SurfaceModel SurfaceModel::round_sphere() {
  return {"sphere", ChartDomain{}, [](cplx z) {
            const double s = 1.0 + std::norm(z);
            return 1.0 / (s * s);
          }};
}

HoloMap identity_map(const SurfaceModel& surface) {
  return {"identity", [](cplx z) { return z; }, [](cplx) { return cplx{1.0, 0.0}; },
          surface, surface, 1};
}

HoloMap square_map() {
  const auto flat = SurfaceModel::flat_plane();
  return {"square-map", [](cplx z) { return z * z; }, [](cplx z) { return 2.0 * z; }, flat,
          flat, 2};
}

HoloMap moebius_map(cplx alpha, cplx beta) {
  if (std::abs(alpha) == 0.0) raise(ErrorKind::kInvalidArgument, "moebius map needs alpha != 0");
  const auto sphere = SurfaceModel::round_sphere();
  char name[128];
  std::snprintf(name, sizeof(name), "moebius:%.17g%+.17gi,%.17g%+.17gi", alpha.real(),
                alpha.imag(), beta.real(), beta.imag());
  return {name, [alpha, beta](cplx z) { return alpha * z + beta; },
          [alpha](cplx) { return alpha; }, sphere, sphere, 1};
}

cplx laplace_beltrami(const SurfaceModel& surface, const ComplexField& field, cplx z,
                      double step) {
  if (!(step > 0.0)) raise(ErrorKind::kInvalidArgument, "stencil step must be positive");
  if (!surface.domain.contains(z, step))
    raise(ErrorKind::kDomain, "stencil at " + format_point(z) + " leaves the chart domain");
  const cplx h{step, 0.0};
  const cplx ih{0.0, step};
  const cplx lap =
      (field(z + h) + field(z - h) + field(z + ih) + field(z - ih) - 4.0 * field(z)) /
      (step * step);
  return lap / surface.gamma_sq(z);
}

double dilatation_sq(const HoloMap& map, cplx z) {
  if (!map.source.domain.contains(z))
    raise(ErrorKind::kDomain, "dilatation at " + format_point(z) + " outside the chart");
  const cplx d = map.dphi(z);
  if (std::abs(d) < kSingularThreshold) return 0.0;
  return map.target.gamma_sq(map.phi(z)) * std::norm(d) / map.source.gamma_sq(z);
}

double harmonic_morphism_residual(const HoloMap& map, const ComplexField& test, cplx z,
                                  double step) {
  if (map.is_singular(z))
    raise(ErrorKind::kDomain, "harmonic morphism residual at singular point " + format_point(z));
  const ComplexField pulled = [&](cplx w) { return test(map.phi(w)); };
  return std::abs(laplace_beltrami(map.source, pulled, z, step));
}

ScalarField pullback_weight(const HoloMap& map, ScalarField weight) {
  return [phi = map.phi, weight = std::move(weight)](cplx z) { return weight(phi(z)); };
}

double cauchy_riemann_residual(const HoloMap& map, cplx z, double step) {
  // d/dzbar phi = (d1 + i d2) phi / 2 must vanish.
  const cplx d1 = (map.phi(z + cplx{step, 0}) - map.phi(z - cplx{step, 0})) / (2 * step);
  const cplx d2 = (map.phi(z + cplx{0, step}) - map.phi(z - cplx{0, step})) / (2 * step);
  return std::abs(0.5 * (d1 + cplx{0, 1} * d2));
}

}  // namespace btlab
