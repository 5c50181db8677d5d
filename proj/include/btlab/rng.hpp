// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Counter-based Philox4x32-10. Every (seed, path, tag, step) tuple maps to an
// independent block, so draws do not depend on scheduling.

#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace btlab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path, std::uint32_t tag = 0) noexcept;

  /// Two uniforms in (0, 1) with 53-bit resolution for the given step.
  std::pair<double, double> uniforms(std::uint32_t step) const noexcept;
  /// Two independent standard normals (Box-Muller) for the given step.
  std::pair<double, double> normals(std::uint32_t step) const noexcept;

 private:
  PhiloxKey key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
  std::uint32_t tag_;
};

}  // namespace btlab
