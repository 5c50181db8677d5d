// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "btlab.h"

TEST_CASE("space and Toeplitz handles") {
  btl_space* space = nullptr;
  REQUIRE(btl_space_create("fock", 6, &space) == BTL_OK);
  size_t dim = 0;
  REQUIRE(btl_space_dimension(space, &dim) == BTL_OK);
  CHECK(dim == 7);
  char* basis = nullptr;
  REQUIRE(btl_space_basis_json(space, &basis) == BTL_OK);
  CHECK(std::string(basis).find("\"degrees\"") != std::string::npos);
  btl_string_free(basis);

  btl_toeplitz* op = nullptr;
  REQUIRE(btl_toeplitz_create(space, "abs2:2", &op) == BTL_OK);
  std::vector<double> ev(dim);
  REQUIRE(btl_toeplitz_spectrum(op, ev.data()) == BTL_OK);
  for (size_t n = 0; n < dim; ++n) CHECK(ev[n] == doctest::Approx(2.0 * (n + 1)));

  std::vector<double> psi(2 * dim, 0.0), out(2 * dim);
  psi[0] = 1.0;
  REQUIRE(btl_toeplitz_resolvent(op, -2.0, 0.0, psi.data(), out.data()) == BTL_OK);
  CHECK(out[0] == doctest::Approx(0.25));
  REQUIRE(btl_toeplitz_semigroup(op, 0.5, psi.data(), out.data()) == BTL_OK);
  CHECK(out[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(btl_toeplitz_resolvent(op, 3.0, 0.0, psi.data(), out.data()) == BTL_SHIFT_REJECTED);
  CHECK(std::strlen(btl_last_error()) > 0);
  btl_toeplitz_destroy(op);
  btl_space_destroy(space);
}

TEST_CASE("errors map to status codes") {
  btl_space* space = nullptr;
  CHECK(btl_space_create("nope", 3, &space) == BTL_CONFIG);
  CHECK(space == nullptr);
  CHECK(btl_space_create("cp1:2", 5, &space) == BTL_INVALID_ARGUMENT);
  CHECK(btl_space_create(nullptr, 5, &space) == BTL_INVALID_ARGUMENT);
  CHECK(std::string(btl_status_string(BTL_SHIFT_REJECTED)) == "shift rejected");
  btl_space_destroy(nullptr);
}

TEST_CASE("experiments through the C API") {
  char* report = nullptr;
  int passed = -1;
  REQUIRE(btl_run_experiment(R"({"experiment": "spectrum", "truncation": 10})", nullptr, &report, &passed) == BTL_OK);
  CHECK(passed == 1);
  CHECK(std::string(report).find("\"eigenvalues\"") != std::string::npos);
  btl_string_free(report);
  CHECK(btl_run_experiment("{not json", nullptr, &report, &passed) == BTL_CONFIG);
  CHECK(btl_run_experiment(R"({"experiment": "spectrum", "extra": 1})", nullptr, &report, &passed) == BTL_CONFIG);
  CHECK(std::string(btl_last_error()).find("extra") != std::string::npos);

  char* text = nullptr;
  REQUIRE(btl_list_presets(&text) == BTL_OK);
  CHECK(std::string(text).find("moebius:alpha,beta") != std::string::npos);
  btl_string_free(text);
  REQUIRE(btl_config_schema(&text) == BTL_OK);
  CHECK(std::string(text).find("\"experiment\"") != std::string::npos);
  btl_string_free(text);
  CHECK(std::strlen(btl_version()) > 0);
}
