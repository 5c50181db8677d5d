// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "btlab/parallel.hpp"
#include "btlab/rng.hpp"
#include "btlab/stats.hpp"

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using btlab::PhiloxCounter;
  CHECK(btlab::philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(btlab::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(btlab::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("path streams are reproducible and distinct") {
  const btlab::PathStream a(42, 7), b(42, 7), c(42, 8), d(43, 7), e(42, 7, 1);
  CHECK(a.normals(3) == b.normals(3));
  CHECK(a.normals(3) != c.normals(3));
  CHECK(a.normals(3) != d.normals(3));
  CHECK(a.normals(3) != e.normals(3));
  CHECK(a.normals(3) != a.normals(4));
  for (std::uint32_t j = 0; j < 1000; ++j) {
    const auto [u, v] = a.uniforms(j);
    CHECK((u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0));
  }
}

TEST_CASE("normals have unit variance") {
  std::vector<double> xs;
  for (std::uint64_t p = 0; p < 20000; ++p) {
    const auto [x, y] = btlab::PathStream(1, p).normals(0);
    xs.push_back(x);
    xs.push_back(y);
  }
  const auto s = btlab::summarize(xs);
  CHECK(std::abs(s.mean) < 4.0 / std::sqrt(40000.0));
  CHECK(std::abs(s.variance - 1.0) < 0.03);
  const auto ks = btlab::ks_one_sample(xs, [](double x) { return btlab::normal_cdf(x, 0.0, 1.0); });
  CHECK(ks.p_value > 0.001);
}

TEST_CASE("pairwise summation") {
  std::vector<double> xs(100001, 0.1);
  CHECK(std::abs(btlab::pairwise_sum(xs) - 10000.1) < 1e-9);
  CHECK(btlab::pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("Kolmogorov-Smirnov") {
  CHECK(btlab::kolmogorov_survival(0.0) == doctest::Approx(1.0));
  CHECK(btlab::kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  std::vector<double> uniform;
  for (int i = 0; i < 1000; ++i) uniform.push_back((i + 0.5) / 1000.0);
  const auto good = btlab::ks_one_sample(uniform, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(good.statistic == doctest::Approx(0.0005));
  CHECK(good.p_value > 0.99);
  const auto bad = btlab::ks_one_sample(uniform, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  CHECK(bad.p_value < 1e-6);
  std::vector<double> shifted;
  for (double u : uniform) shifted.push_back(u + 0.2);
  CHECK(btlab::ks_two_sample(uniform, shifted).statistic == doctest::Approx(0.2).epsilon(0.01));
  CHECK(btlab::ks_two_sample(uniform, uniform).p_value > 0.99);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  for (unsigned w : {1u, 2u, 5u}) {
    std::vector<int> hits(1000, 0);
    btlab::parallel_for(hits.size(), w, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
  }
  CHECK_THROWS(btlab::parallel_for(500, 3, [](std::size_t i) {
    if (i == 321) throw std::runtime_error("boom");
  }));
}
