// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "btlab/surface.hpp"

using btlab::cplx;

namespace {
const btlab::ComplexField abs2 = [](cplx z) { return cplx{std::norm(z), 0.0}; };
}

TEST_CASE("laplace_beltrami on the plane and the sphere") {
  const auto flat = btlab::SurfaceModel::flat_plane();
  const auto sphere = btlab::SurfaceModel::round_sphere();
  CHECK(std::abs(btlab::laplace_beltrami(flat, abs2, 0.0, 1e-3) - 4.0) < 1e-8);
  const btlab::ComplexField re = [](cplx z) { return cplx{z.real(), 0.0}; };
  CHECK(std::abs(btlab::laplace_beltrami(flat, re, {0.3, -1.2}, 1e-3)) < 1e-8);
  CHECK(std::abs(btlab::laplace_beltrami(sphere, abs2, 0.0, 1e-3) - 4.0) < 1e-8);
  // 4 (1 + |z|^2)^2 away from the origin.
  CHECK(std::abs(btlab::laplace_beltrami(sphere, abs2, {1.0, 0.0}, 1e-4) - 16.0) < 1e-5);
  CHECK_THROWS_AS(btlab::laplace_beltrami(flat, abs2, 0.0, 0.0), btlab::Error);
}

TEST_CASE("dilatation of the shipped maps") {
  CHECK(btlab::dilatation_sq(btlab::square_map(), 1.0) == doctest::Approx(4.0));
  CHECK(btlab::dilatation_sq(btlab::square_map(), {0.5, 0.5}) == doctest::Approx(2.0));
  CHECK(btlab::dilatation_sq(btlab::square_map(), 0.0) == 0.0);
  const auto id = btlab::identity_map(btlab::SurfaceModel::round_sphere());
  CHECK(btlab::dilatation_sq(id, {0.7, 2.0}) == doctest::Approx(1.0));
  const auto m = btlab::moebius_map(2.0, 0.0);
  CHECK(btlab::dilatation_sq(m, 0.0) == doctest::Approx(4.0));
  const cplx z{0.4, -0.3};
  const cplx a{0.8, 0.6}, b{0.2, -0.5};
  const double s = 1.0 + std::norm(z), t = 1.0 + std::norm(a * z + b);
  CHECK(btlab::dilatation_sq(btlab::moebius_map(a, b), z) == doctest::Approx(std::norm(a) * s * s / (t * t)));
  CHECK_THROWS_AS(btlab::moebius_map(0.0, 1.0), btlab::Error);
}

TEST_CASE("holomorphic maps are harmonic morphisms") {
  const auto sq = btlab::square_map();
  const btlab::ComplexField re = [](cplx w) { return cplx{w.real(), 0.0}; };
  const btlab::ComplexField im = [](cplx w) { return cplx{w.imag(), 0.0}; };
  CHECK(btlab::harmonic_morphism_residual(sq, re, {1.0, 1.0}, 1e-3) < 1e-6);
  CHECK(btlab::harmonic_morphism_residual(sq, im, 2.0, 1e-3) < 1e-6);
  // |z^2|^2 = |z|^4 has Laplacian 16 |z|^2.
  CHECK(btlab::harmonic_morphism_residual(sq, abs2, 1.0, 1e-3) == doctest::Approx(16.0).epsilon(1e-5));
  CHECK_THROWS_AS(btlab::harmonic_morphism_residual(sq, re, 0.0, 1e-3), btlab::Error);
  CHECK(btlab::cauchy_riemann_residual(sq, {0.3, 0.9}) < 1e-9);
}

TEST_CASE("pullback weights compose") {
  const btlab::ScalarField modulus = [](cplx w) { return std::abs(w); };
  const auto pulled = btlab::pullback_weight(btlab::square_map(), modulus);
  for (cplx z : {cplx{0.3, 0.1}, cplx{-2.0, 1.5}}) CHECK(pulled(z) == doctest::Approx(std::norm(z)));
  const btlab::ScalarField fs = [](cplx w) { return 3.0 * std::log1p(std::norm(w)); };
  const auto pulled2 = btlab::pullback_weight(btlab::moebius_map(2.0, 0.0), fs);
  const cplx z{0.25, 0.5};
  CHECK(pulled2(z) == doctest::Approx(3.0 * std::log1p(4.0 * std::norm(z))));
  const auto same = btlab::pullback_weight(btlab::identity_map(btlab::SurfaceModel::flat_plane()), fs);
  CHECK(same(z) == fs(z));
}
