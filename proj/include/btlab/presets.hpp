// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// String identifiers for the built-in surfaces, bundles, maps and symbols.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "btlab/bergman.hpp"
#include "btlab/surface.hpp"
#include "btlab/toeplitz.hpp"

namespace btlab {

/// Parses "1.5", "-2i", "0.3-0.2i", "i". Throws a config error otherwise.
cplx parse_complex(std::string_view text);

SurfaceModel surface_preset(std::string_view id);
/// "fock", "bg", "cp1:k".
BundleModel space_preset(std::string_view id);
/// "identity", "square-map", "moebius:alpha,beta". identity acts on `surface`.
HoloMap map_preset(std::string_view id, const SurfaceModel& surface);

struct MoebiusParams {
  cplx alpha;
  cplx beta;
};

/// Parameters of a "moebius:alpha,beta" id, if it is one.
std::optional<MoebiusParams> moebius_params(std::string_view map_id);

/// Symbols: zero, one, const:a, abs2:c, inv4r:c', bump, moebius-inverse:c', dilatation.
/// moebius-inverse and dilatation read their parameters from `map`.
SymbolField symbol_preset(std::string_view id, const HoloMap* map = nullptr);

/// Human-readable catalog with parameter conventions.
std::string preset_catalog();

}  // namespace btlab
