// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/presets.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace btlab {

namespace {

[[noreturn]] void bad(std::string_view what, std::string_view id) {
  raise(ErrorKind::kConfig, std::string(what) + " '" + std::string(id) + "'");
}

double parse_real(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
    bad("not a real number in", context);
  return v;
}

/// Splits "name:args" into name and args (empty if no colon).
std::pair<std::string_view, std::string_view> split_id(std::string_view id) {
  const auto colon = id.find(':');
  if (colon == std::string_view::npos) return {id, {}};
  return {id.substr(0, colon), id.substr(colon + 1)};
}

}  // namespace

cplx parse_complex(std::string_view text) {
  if (text.empty()) bad("empty complex number", text);
  if (text.back() != 'i') return {parse_real(text, text), 0.0};
  const std::string_view body = text.substr(0, text.size() - 1);
  // The imaginary part starts at the last sign that is not an exponent sign or leading.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_of = [&](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s.front() == '+' ? s.substr(1) : s, text);
  };
  if (split == std::string_view::npos) return {0.0, imag_of(body)};
  return {parse_real(body.substr(0, split), text), imag_of(body.substr(split))};
}

SurfaceModel surface_preset(std::string_view id) {
  if (id == "flat") return SurfaceModel::flat_plane();
  if (id == "sphere") return SurfaceModel::round_sphere();
  bad("unknown surface preset", id);
}

BundleModel space_preset(std::string_view id) {
  if (id == "fock") return BundleModel::fock();
  if (id == "bg") return BundleModel::barut_girardello();
  const auto [name, args] = split_id(id);
  if (name == "cp1") {
    int k = -1;
    const auto res = std::from_chars(args.data(), args.data() + args.size(), k);
    if (args.empty() || res.ec != std::errc{} || res.ptr != args.data() + args.size() || k < 0 || k > 64)
      bad("cp1 needs an integer degree 0..64 in", id);
    return BundleModel::cp1(k);
  }
  bad("unknown space preset", id);
}

std::optional<MoebiusParams> moebius_params(std::string_view map_id) {
  const auto [name, args] = split_id(map_id);
  if (name != "moebius") return std::nullopt;
  const auto comma = args.find(',');
  if (comma == std::string_view::npos) bad("moebius needs 'moebius:alpha,beta' in", map_id);
  return MoebiusParams{parse_complex(args.substr(0, comma)), parse_complex(args.substr(comma + 1))};
}

HoloMap map_preset(std::string_view id, const SurfaceModel& surface) {
  if (id == "identity") return identity_map(surface);
  if (id == "square-map") return square_map();
  if (const auto m = moebius_params(id)) {
    if (m->alpha == cplx{}) bad("moebius needs alpha != 0 in", id);
    auto map = moebius_map(m->alpha, m->beta);
    map.name = std::string(id);
    return map;
  }
  bad("unknown map preset", id);
}

SymbolField symbol_preset(std::string_view id, const HoloMap* map) {
  const std::string name_str(id);
  const auto [name, args] = split_id(id);
  auto param = [&, args = args](double fallback) { return args.empty() ? fallback : parse_real(args, id); };
  if (id == "zero") return {name_str, [](cplx) { return 0.0; }};
  if (id == "one") return {name_str, [](cplx) { return 1.0; }};
  if (id == "bump") return {name_str, [](cplx z) { return std::norm(z) * std::exp(-std::norm(z)); }};
  if (name == "const") {
    if (args.empty()) bad("const needs a value in", id);
    const double a = param(0.0);
    return {name_str, [a](cplx) { return a; }};
  }
  if (name == "abs2") {
    const double c = param(1.0);
    return {name_str, [c](cplx z) { return c * std::norm(z); }};
  }
  if (name == "inv4r") {
    const double c = param(1.0);
    return {name_str, [c](cplx z) { return c / (4.0 * std::abs(z)); }};
  }
  if (name == "moebius-inverse") {
    const auto m = map ? moebius_params(map->name) : std::nullopt;
    if (!m) bad("moebius-inverse needs a moebius map, symbol", id);
    const double c = param(1.0);
    const double a2 = std::norm(m->alpha);
    const cplx beta = m->beta;
    return {name_str, [c, a2, beta](cplx w) {
              const double s = 1.0 + std::norm(w);
              const double q = 1.0 + std::norm(w - beta) / a2;
              return c / a2 * s * s / (q * q);
            }};
  }
  if (id == "dilatation") {
    if (!map) bad("dilatation needs a map, symbol", id);
    const HoloMap m = *map;
    return {name_str, [m](cplx z) { return dilatation_sq(m, z); }};
  }
  bad("unknown symbol preset", id);
}

std::string preset_catalog() {
  return R"(surfaces
  flat                 gamma^2 = 1
  sphere               gamma^2 = (1+|z|^2)^-2, stereographic chart

spaces
  fock                 weight |z|^2, dm = d^2z/pi
  bg                   weight |z|, dm = d^2z/pi
  cp1:k                weight k log(1+|z|^2), dm = d^2z/(pi (1+|z|^2)^2), dimension k+1

maps
  identity             z -> z
  square-map           z -> z^2 on the flat plane
  moebius:alpha,beta   z -> alpha z + beta on the sphere, e.g. moebius:2,0.3-0.2i

symbols
  zero                 0
  one                  1
  const:a              a
  abs2:c               c |z|^2
  inv4r:c'             c'/(4|z|)
  bump                 |z|^2 e^{-|z|^2}
  moebius-inverse:c'   (c'/|alpha|^2)(1+|z|^2)^2/(1+|z-beta|^2/|alpha|^2)^2, needs a moebius map
  dilatation           lambda^2 of the configured map
)";
}

}  // namespace btlab
