// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "btlab/bergman.hpp"
#include "btlab/presets.hpp"
#include "btlab/quadrature.hpp"

using btlab::cplx;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

btlab::ComplexField monomial(int n) {
  return [n](cplx z) { return std::pow(z, n); };
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("Gauss rules integrate polynomials exactly") {
  const auto lag = btlab::gauss_laguerre(12, 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < lag.nodes.size(); ++i) s += std::exp(lag.log_weights[i]) * std::pow(lag.nodes[i], 7);
  CHECK(s == doctest::Approx(factorial(7)).epsilon(1e-13));
  const auto gen = btlab::gauss_laguerre(10, 1.5);
  s = 0.0;
  for (std::size_t i = 0; i < gen.nodes.size(); ++i) s += std::exp(gen.log_weights[i]) * gen.nodes[i] * gen.nodes[i];
  CHECK(s == doctest::Approx(std::tgamma(4.5)).epsilon(1e-13));
  const auto leg = btlab::gauss_jacobi(8, 0.0, 0.0);
  s = 0.0;
  for (std::size_t i = 0; i < leg.nodes.size(); ++i) s += std::exp(leg.log_weights[i]) * std::pow(leg.nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
  CHECK_THROWS_AS(btlab::gauss_laguerre(0, 0.0), btlab::Error);
}

TEST_CASE("inner products of monomials") {
  const auto fock = btlab::BundleModel::fock();
  const auto bg = btlab::BundleModel::barut_girardello();
  const auto cp1 = btlab::BundleModel::cp1(2);
  CHECK(btlab::inner_product(fock, btlab::default_rule(fock, 3), monomial(3), monomial(3)).real() ==
        doctest::Approx(6.0).epsilon(1e-13));
  // d^2z/pi with e^{-|z|} gives 2 (2n+1)!.
  CHECK(btlab::inner_product(bg, btlab::default_rule(bg, 1), monomial(1), monomial(1)).real() ==
        doctest::Approx(12.0).epsilon(1e-13));
  CHECK(btlab::inner_product(cp1, btlab::default_rule(cp1, 2), monomial(1), monomial(1)).real() ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("inner product is conjugate symmetric") {
  const auto fock = btlab::BundleModel::fock();
  const auto rule = btlab::default_rule(fock, 8);
  std::mt19937_64 gen(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<cplx> a(6), b(6);
    for (auto& x : a) x = {g(gen), g(gen)};
    for (auto& x : b) x = {g(gen), g(gen)};
    auto poly = [](std::vector<cplx> c) {
      return btlab::ComplexField([c](cplx z) {
        cplx s = 0;
        for (std::size_t i = c.size(); i-- > 0;) s = s * z + c[i];
        return s;
      });
    };
    const cplx ab = btlab::inner_product(fock, rule, poly(a), poly(b));
    const cplx ba = btlab::inner_product(fock, rule, poly(b), poly(a));
    CHECK(rel(ab, std::conj(ba)) < 1e-13);
  }
}

TEST_CASE("Gram matrices match the Gamma and Beta closed forms") {
  const auto fock = btlab::make_space(btlab::BundleModel::fock(), 20);
  const auto bg = btlab::make_space(btlab::BundleModel::barut_girardello(), 20);
  for (int n = 0; n <= 20; ++n) {
    CHECK(rel(fock->basis.gram(n, n), factorial(n)) < 1e-8);
    CHECK(rel(bg->basis.gram(n, n), 2.0 * factorial(2 * n + 1)) < 1e-8);
  }
  CHECK(std::abs(fock->basis.gram(3, 5)) < 1e-10 * factorial(5));
  for (int k : {2, 5, 12}) {
    const auto cp = btlab::make_space(btlab::BundleModel::cp1(k), k);
    for (int n = 0; n <= k; ++n)
      CHECK(rel(cp->basis.gram(n, n), factorial(n) * factorial(k - n) / factorial(k + 1)) < 1e-8);
  }
  const auto small = btlab::make_space(btlab::BundleModel::cp1(2), 2);
  CHECK(small->basis.gram(0, 0).real() == doctest::Approx(1.0 / 3.0));
  CHECK(small->basis.gram(1, 1).real() == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(btlab::make_space(btlab::BundleModel::cp1(2), 3), btlab::Error);
  CHECK_THROWS_AS(btlab::make_space(btlab::BundleModel::fock(), -1), btlab::Error);
}

TEST_CASE("orthonormal basis and Cholesky factor") {
  const auto s = btlab::make_space(btlab::BundleModel::fock(), 10);
  const auto& b = s->basis;
  CHECK((b.chol * b.chol.adjoint() - b.gram).norm() / b.gram.norm() < 1e-14);
  for (int n = 0; n <= 10; ++n) {
    const auto c = b.monomial_coefficients(n);
    CHECK(b.degree_of(c) == n);
    const cplx z{0.4, -0.7};
    CHECK(rel(b.value(c, z), std::pow(z, n)) < 1e-12);
  }
  CHECK_THROWS_AS(b.monomial_coefficients(11), btlab::Error);
}

TEST_CASE("reproducing kernel") {
  const auto s = btlab::make_space(btlab::BundleModel::fock(), 20);
  CHECK(std::abs(btlab::reproducing_kernel(s->basis, 0.0, 0.0) - 1.0) < 1e-14);
  double series = 0.0;
  for (int n = 0; n <= 20; ++n) series += 1.0 / factorial(n);
  CHECK(rel(btlab::reproducing_kernel(s->basis, 1.0, 1.0), series) < 1e-12);
  CHECK(std::abs(series - std::exp(1.0)) < 1e-14);
  const cplx x{0.3, 0.8}, y{-1.1, 0.4};
  const cplx kxy = btlab::reproducing_kernel(s->basis, x, y);
  CHECK(std::abs(kxy - std::conj(btlab::reproducing_kernel(s->basis, y, x))) < 1e-13);
  CHECK(rel(kxy, std::exp(x * std::conj(y))) < 1e-9);
  // (K(., y), psi) = psi(y) for psi in the truncated space.
  const auto psi = [](cplx z) { return cplx{1.0, 2.0} + 3.0 * z - std::pow(z, 4); };
  const btlab::ComplexField ky = [&](cplx z) { return btlab::reproducing_kernel(s->basis, z, y); };
  CHECK(rel(btlab::inner_product(s->bundle, s->rule, ky, psi), psi(y)) < 1e-8);
}

TEST_CASE("Bergman projection") {
  const auto s = btlab::make_space(btlab::BundleModel::fock(), 12);
  const auto& b = s->basis;
  const auto c2 = btlab::bergman_project(*s, monomial(2));
  CHECK((c2 - b.monomial_coefficients(2)).norm() < 1e-12);
  const btlab::ComplexField F = [](cplx z) { return 4.0 * std::norm(z) * z * z; };
  CHECK((btlab::bergman_project(*s, F) - 12.0 * b.monomial_coefficients(2)).norm() < 1e-9 * 12);
  CHECK(btlab::bergman_project(*s, [](cplx) { return cplx{}; }).norm() == 0.0);

  // Idempotence and self-adjointness on non-holomorphic fields.
  const btlab::ComplexField G = [](cplx z) { return std::conj(z) * std::exp(-0.3 * std::norm(z)) + z * z * z; };
  const auto pg = btlab::bergman_project(*s, G);
  const auto ppg = btlab::bergman_project(*s, btlab::section_field(s, pg));
  CHECK((pg - ppg).norm() < 1e-10 * pg.norm());
  const btlab::ComplexField H = [](cplx z) { return std::sin(z.real()) + cplx{0, 1} * std::norm(z) * z; };
  const auto ph = btlab::bergman_project(*s, H);
  // (P G, H) = (G, P H).
  const cplx lhs = btlab::inner_product(s->bundle, s->rule, btlab::section_field(s, pg), H);
  const cplx rhs = btlab::inner_product(s->bundle, s->rule, G, btlab::section_field(s, ph));
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("basis JSON round trip") {
  const auto s = btlab::make_space(btlab::BundleModel::cp1(4), 4);
  const auto doc = s->basis.to_json();
  const auto back = btlab::BergmanBasis::from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.degrees == s->basis.degrees);
  CHECK((back.gram - s->basis.gram).norm() == 0.0);
  CHECK((back.chol - s->basis.chol).norm() < 1e-15);
  auto broken = doc;
  broken["degrees"] = {0, 1};
  CHECK_THROWS_AS(btlab::BergmanBasis::from_json(broken), btlab::Error);
}

TEST_CASE("pull-back of the BG bundle under z^2 is Fock-like") {
  const auto bg = btlab::BundleModel::barut_girardello();
  const auto target = btlab::pullback_bundle(btlab::square_map(), bg, btlab::RadialFamily::kGaussianPlane, {});
  const cplx z{0.6, -0.2};
  CHECK(target.weight(z) == doctest::Approx(std::norm(z)));
  CHECK(btlab::weight_ddbar(target, z) == doctest::Approx(1.0));
  CHECK(btlab::weight_ddbar(target, z, 1e-4, true) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(btlab::weight_dz(target, z) - std::conj(z)) < 1e-12);
}

TEST_CASE("preset parsing") {
  CHECK(btlab::parse_complex("1.5") == cplx{1.5, 0});
  CHECK(btlab::parse_complex("-2i") == cplx{0, -2});
  CHECK(btlab::parse_complex("0.3-0.2i") == cplx{0.3, -0.2});
  CHECK(btlab::parse_complex("i") == cplx{0, 1});
  CHECK_THROWS_AS(btlab::parse_complex("abc"), btlab::Error);
  CHECK(btlab::space_preset("cp1:3").max_degree == 3);
  CHECK_THROWS_AS(btlab::space_preset("cp1:-1"), btlab::Error);
  CHECK_THROWS_AS(btlab::space_preset("bergman"), btlab::Error);
  CHECK_THROWS_AS(btlab::map_preset("cube", btlab::SurfaceModel::flat_plane()), btlab::Error);
  CHECK_THROWS_AS(btlab::symbol_preset("moebius-inverse:1"), btlab::Error);
  const auto m = btlab::moebius_params("moebius:0.5+0.5i,-1");
  REQUIRE(m);
  CHECK(m->alpha == cplx{0.5, 0.5});
  CHECK(m->beta == cplx{-1, 0});
  const auto cat = btlab::preset_catalog();
  for (const char* s : {"fock", "bg", "cp1:k", "square-map", "moebius:alpha,beta", "inv4r:c'", "c'/(4|z|)"})
    CHECK(cat.find(s) != std::string::npos);
}
