// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "btlab/presets.hpp"
#include "btlab/special.hpp"
#include "btlab/toeplitz.hpp"

using btlab::cplx;

namespace {

btlab::SymbolField sym(std::string name, btlab::ScalarField f) { return {std::move(name), std::move(f)}; }

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("closed-form Toeplitz spectra") {
  const auto fock = btlab::make_space(btlab::BundleModel::fock(), 20);
  const auto T = btlab::toeplitz_matrix(fock, btlab::symbol_preset("abs2:1"));
  for (int n = 0; n <= 20; ++n) CHECK(std::abs(T.eig.values(n) - (n + 1)) < 1e-8 * (n + 1));
  CHECK(max_abs(T.matrix - Eigen::VectorXcd::LinSpaced(21, 1, 21).asDiagonal().toDenseMatrix()) < 1e-10 * 21);

  const auto bg = btlab::make_space(btlab::BundleModel::barut_girardello(), 20);
  const auto B = btlab::toeplitz_matrix(bg, btlab::symbol_preset("inv4r:1"));
  for (int n = 0; n <= 20; ++n) {
    const double want = 1.0 / (8.0 * (20 - n) + 4.0);
    CHECK(std::abs(B.eig.values(n) - want) < 1e-8 * want);
  }
  const auto one = btlab::toeplitz_matrix(btlab::make_space(btlab::BundleModel::cp1(5), 5), btlab::symbol_preset("one"));
  CHECK(max_abs(one.matrix - Eigen::MatrixXcd::Identity(6, 6)) < 1e-12);
}

TEST_CASE("spectrum of a small Hermitian matrix") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m(0, 0) = 3;
  m(1, 1) = 1;
  m(2, 2) = 2;
  const auto s = btlab::spectrum(m);
  CHECK(s.values(0) == doctest::Approx(1));
  CHECK(s.values(1) == doctest::Approx(2));
  CHECK(s.values(2) == doctest::Approx(3));
}

TEST_CASE("Toeplitz forms are linear, Hermitian and positive") {
  const auto s = btlab::make_space(btlab::BundleModel::fock(), 12);
  const auto f = sym("f", [](cplx z) { return std::exp(-std::norm(z - cplx{0.5, 0.2})); });
  const auto g = sym("g", [](cplx z) { return std::cos(z.real()) * std::sin(z.imag()); });
  const double a = 1.7, b = -0.4;
  const auto Tf = btlab::toeplitz_matrix(s, f);
  const auto Tg = btlab::toeplitz_matrix(s, g);
  const auto Tfg = btlab::toeplitz_matrix(s, sym("af+bg", [&](cplx z) { return a * f.f(z) + b * g.f(z); }));
  CHECK(max_abs(Tfg.matrix - (a * Tf.matrix + b * Tg.matrix)) < 1e-10);
  CHECK(max_abs(Tf.matrix - Tf.matrix.adjoint()) < 1e-10);
  CHECK(Tf.min_eigenvalue() >= -1e-10);
  const auto bump = btlab::toeplitz_matrix(s, btlab::symbol_preset("bump"));
  CHECK(bump.min_eigenvalue() >= -1e-10);
}

TEST_CASE("spectra are homogeneous in the symbol") {
  const auto bg = btlab::make_space(btlab::BundleModel::barut_girardello(), 10);
  const auto T1 = btlab::toeplitz_matrix(bg, btlab::symbol_preset("inv4r:1"));
  const auto T3 = btlab::toeplitz_matrix(bg, btlab::symbol_preset("inv4r:3.5"));
  CHECK((T3.eig.values - 3.5 * T1.eig.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("semigroup") {
  const auto s = btlab::make_space(btlab::BundleModel::fock(), 8);
  const auto T = btlab::toeplitz_matrix(s, btlab::symbol_preset("abs2:1"));
  const auto e0 = s->basis.monomial_coefficients(0);
  CHECK((btlab::semigroup_apply(T, 0.0, e0) - e0).norm() < 1e-14);
  CHECK((btlab::semigroup_apply(T, 1.0, e0) - std::exp(-1.0) * e0).norm() < 1e-12);
  CHECK(btlab::semigroup_apply(T, 1.0, Eigen::VectorXcd::Zero(9)).norm() == 0.0);
  CHECK_THROWS_AS(btlab::semigroup_apply(T, -0.1, e0), btlab::Error);
}

TEST_CASE("resolvent") {
  const auto bg = btlab::make_space(btlab::BundleModel::barut_girardello(), 10);
  const auto T = btlab::toeplitz_matrix(bg, btlab::symbol_preset("inv4r:1"));
  const auto r = btlab::resolvent_apply(T, -1.0, bg->basis.monomial_coefficients(0));
  CHECK((r.coefficients - 0.8 * bg->basis.monomial_coefficients(0)).norm() < 1e-12);
  CHECK(r.spectral_gap > 1.0);
  CHECK_THROWS_AS(btlab::resolvent_apply(T, 0.1, bg->basis.monomial_coefficients(0)), btlab::Error);

  // T_{1 + 4|z|^2} on Fock applied to the projection of 4|z|^2.
  const auto fock = btlab::make_space(btlab::BundleModel::fock(), 10);
  const auto T2 = btlab::toeplitz_matrix(fock, sym("1+4|z|^2", [](cplx z) { return 1.0 + 4.0 * std::norm(z); }));
  const auto r2 = btlab::resolvent_apply(T2, 0.0, btlab::ComplexField([](cplx z) { return cplx{4.0 * std::norm(z), 0}; }));
  CHECK((r2.coefficients - 0.8 * fock->basis.monomial_coefficients(0)).norm() < 1e-12);

  // (T - c1)^-1 - (T - c2)^-1 = (c1 - c2)(T - c1)^-1 (T - c2)^-1.
  const auto Tb = btlab::toeplitz_matrix(fock, btlab::symbol_preset("bump"));
  const cplx c1{-0.5, 0.3}, c2{-2.0, -1.0};
  const Eigen::VectorXcd psi = Eigen::VectorXcd::LinSpaced(11, 1.0, 2.0);
  const auto a = btlab::resolvent_apply(Tb, c1, psi).coefficients;
  const auto b = btlab::resolvent_apply(Tb, c2, psi).coefficients;
  const auto ab = btlab::resolvent_apply(Tb, c1, btlab::resolvent_apply(Tb, c2, psi).coefficients).coefficients;
  CHECK((a - b - (c1 - c2) * ab).norm() < 1e-8 * a.norm());
}

TEST_CASE("transformation check for the square map") {
  const auto bg = btlab::make_space(btlab::BundleModel::barut_girardello(), 6);
  const auto target_bundle = btlab::pullback_bundle(btlab::square_map(), btlab::BundleModel::barut_girardello(),
                                                    btlab::RadialFamily::kGaussianPlane, {});
  const auto target = btlab::make_space(target_bundle, 14);
  const auto f = btlab::symbol_preset("inv4r:1");
  const auto grid = btlab::default_sample_grid();
  CHECK(grid.size() == 25);
  for (int n = 0; n <= 3; ++n) {
    const auto rep = btlab::transformation_check(bg, target, btlab::square_map(), f, -1.0,
                                                 bg->basis.monomial_coefficients(n), grid);
    CHECK(rep.max_rel_dev < 1e-8);
    CHECK(rep.max_rel_dev_variant < 1e-8);
    CHECK(rep.gap_source > 0);
    CHECK(rep.gap_pencil > 0);
    const cplx coeff = 4.0 * (2 * n + 1) / (1.0 + 4.0 * (2 * n + 1));
    for (std::size_t k = 0; k < grid.size(); ++k)
      CHECK(btlab::relative_deviation(rep.lhs[k], coeff * std::pow(grid[k], 2 * n)) < 1e-8);
  }
  // Degree 2n beyond the target truncation.
  const auto small_target = btlab::make_space(target_bundle, 5);
  CHECK_THROWS_AS(btlab::transformation_check(bg, small_target, btlab::square_map(), f, -1.0,
                                              bg->basis.monomial_coefficients(3), grid),
                  btlab::Error);
  // Shift above the source spectrum.
  CHECK_THROWS_AS(btlab::transformation_check(bg, target, btlab::square_map(), f, 1.0,
                                              bg->basis.monomial_coefficients(0), grid),
                  btlab::Error);
}

TEST_CASE("transformation check degenerates for the identity map") {
  const auto s = btlab::make_space(btlab::BundleModel::fock(), 8);
  const auto id = btlab::identity_map(s->bundle.surface);
  const auto target = btlab::make_space(btlab::pullback_bundle(id, s->bundle, btlab::RadialFamily::kGaussianPlane, {}), 8);
  const auto rep = btlab::transformation_check(s, target, id, btlab::symbol_preset("bump"), {-0.7, 0.4},
                                               s->basis.monomial_coefficients(3), btlab::default_sample_grid());
  CHECK(rep.max_rel_dev < 1e-10);
}

TEST_CASE("Moebius maps on CP1") {
  for (int k : {2, 5}) {
    const auto map = btlab::map_preset("moebius:0.8+0.3i,0.4-0.2i", btlab::SurfaceModel::round_sphere());
    const auto bundle = btlab::BundleModel::cp1(k);
    const auto rule = btlab::make_rule(btlab::RadialFamily::kSphere, 64, 48);
    const auto src = btlab::make_space(bundle, rule, k);
    const auto tgt = btlab::make_space(btlab::pullback_bundle(map, bundle, btlab::RadialFamily::kSphere, k), rule, k);
    const auto f = btlab::symbol_preset("moebius-inverse:1", &map);
    for (int n = 0; n <= k; ++n) {
      const auto rep = btlab::transformation_check(src, tgt, map, f, -1.0, src->basis.monomial_coefficients(n),
                                                   btlab::default_sample_grid());
      CHECK(rep.max_rel_dev < 1e-6);
    }
  }
  // beta = 0: the spectra of T_f and T_{lambda^2} are mutually inverse up to c'.
  const auto map = btlab::map_preset("moebius:0.6,0", btlab::SurfaceModel::round_sphere());
  const auto bundle = btlab::BundleModel::cp1(5);
  const auto src = btlab::make_space(bundle, 5);
  const auto tgt = btlab::make_space(btlab::pullback_bundle(map, bundle, btlab::RadialFamily::kSphere, 5), 5);
  const auto Tf = btlab::toeplitz_matrix(src, btlab::symbol_preset("moebius-inverse:2", &map));
  const auto Tl = btlab::toeplitz_matrix(tgt, btlab::symbol_preset("dilatation", &map));
  for (int j = 0; j <= 5; ++j) CHECK(std::abs(Tf.eig.values(j) * Tl.eig.values(5 - j) / 2.0 - 1.0) < 1e-8);
}

TEST_CASE("hypergeometric function") {
  CHECK(std::abs(btlab::hyp2f1(1, 1, 2, 0.5) - (-std::log(0.5) / 0.5)) < 1e-14);
  CHECK(std::abs(btlab::hyp2f1(1, 1, 2, -3.0) - std::log(4.0) / 3.0) < 1e-13);
  CHECK(std::abs(btlab::hyp2f1(-2, 3, 4, 0.5) - 0.4) < 1e-13);
  CHECK(std::abs(btlab::hyp2f1(0.5, 0.5, 1.5, 0.25) - std::asin(0.5) / 0.5) < 1e-14);
  CHECK_THROWS_AS(btlab::hyp2f1(1, 1, -1, 0.2), btlab::Error);
}
