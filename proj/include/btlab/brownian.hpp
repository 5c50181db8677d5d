// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Brownian motion in an isothermal chart, additive functionals and their
// inverse time change, stochastic parallel transport in a Hermitian line
// bundle, and Feynman-Kac estimators built on them.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "btlab/bergman.hpp"
#include "btlab/stats.hpp"
#include "btlab/surface.hpp"
#include "btlab/toeplitz.hpp"

namespace btlab {

struct SimConfig {
  double D = 1.0;
  double dt = 1e-3;
  double T_max = 1.0;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  double kill_radius = 8.0;
  /// 0 selects the hardware concurrency; results never depend on it.
  unsigned workers = 0;
};

/// Throws a config error unless every field is in range and the step std
/// sqrt(2 D dt / gamma^2(x0)) is at most 0.1 chart units.
void validate(const SimConfig& cfg, const SurfaceModel& surface, cplx x0);

/// Number of Euler steps covering [0, horizon] at cfg.dt.
std::size_t step_count(const SimConfig& cfg, double horizon);

struct PathBundle {
  std::vector<double> times;
  std::size_t first_path = 0;
  std::size_t n_paths = 0;
  /// Row-major by path: positions[p * samples() + j].
  std::vector<cplx> positions;
  /// Cumulative additive functional, same layout; empty until computed.
  std::vector<double> functional;
  /// Cumulative log of the forward transport coefficient; empty until computed.
  std::vector<cplx> log_transport;
  /// Index of the last sample before the path left the chart (samples()-1 if alive).
  std::vector<std::size_t> last_valid;

  std::size_t samples() const noexcept { return times.size(); }
  bool alive(std::size_t p) const noexcept { return last_valid[p] + 1 == samples(); }
  cplx position(std::size_t p, std::size_t j) const noexcept { return positions[p * samples() + j]; }
  std::span<const cplx> path(std::size_t p) const noexcept {
    return {positions.data() + p * samples(), samples()};
  }
};

/// Euler-Maruyama without drift; each coordinate gets variance 2 D dt / gamma^2(B).
/// Simulates paths [first_path, first_path + count) of the ensemble defined by cfg.seed
/// over [0, cfg.T_max]. Paths leaving kill_radius are frozen.
PathBundle simulate_paths(const SurfaceModel& surface, cplx x0, const SimConfig& cfg,
                          std::size_t first_path = 0, std::optional<std::size_t> count = {});

/// Trapezoid accumulation of q along each path, frozen after the path is killed.
void additive_functional(PathBundle& paths, const ScalarField& q);

struct TimeChanged {
  std::vector<double> t_grid;
  std::size_t n_paths = 0;
  /// positions[p * t_grid.size() + i] = B(tau_p(t_i)).
  std::vector<cplx> positions;
  std::vector<double> tau;
  /// Paths whose functional reaches max(t_grid) before they were killed.
  std::vector<std::uint8_t> reached;
  std::size_t n_reached = 0;
};

/// Inverts A by monotone linear interpolation and resamples positions at tau(t).
TimeChanged time_change(const PathBundle& paths, const std::vector<double>& t_grid);

/// Applies Phi to every resampled position.
TimeChanged morphism_pushforward(TimeChanged paths, const HoloMap& map);

/// Positions at t_grid index i of the reached paths.
std::vector<cplx> reached_samples(const TimeChanged& paths, std::size_t i = 0);

struct InvarianceReport {
  std::size_t n = 0;
  KsResult ks_re;
  KsResult ks_im;
  double z_mean_re = 0.0;
  double z_mean_im = 0.0;
  double z_second_re = 0.0;
  double z_second_im = 0.0;

  bool ks_pass(double alpha = 0.01) const { return ks_re.p_value > alpha && ks_im.p_value > alpha; }
  bool mean_pass(double z = 3.0) const;
  bool second_moment_pass(double z = 3.0) const;
  bool pass() const { return ks_pass() && mean_pass() && second_moment_pass(); }
  nlohmann::json to_json() const;
};

/// Compares time-t marginals with Brownian motion started at x0: the exact Gaussian
/// with coordinate variance 2 D t on the flat plane, otherwise a reference ensemble.
InvarianceReport invariance_test(std::span<const cplx> samples, const SurfaceModel& surface, cplx x0,
                                 double D, double t,
                                 std::optional<std::span<const cplx>> reference = std::nullopt);

/// (2 / gamma^2(z)) d^2 weight / dz dzbar.
double curvature_rho(const BundleModel& bundle, cplx z, double step = kDefaultStep, bool force_fd = false);

/// Curvature potential entering e^{-D int rho_fk}; the sign makes the Feynman-Kac
/// generator annihilate holomorphic sections.
double fk_curvature_potential(const BundleModel& bundle, cplx z);

/// Cumulative log of the forward transport coefficient along a discrete curve,
/// midpoint rule for int d(weight)/dz dz. out[0] = 0.
std::vector<cplx> transport_along(const BundleModel& bundle, std::span<const cplx> curve);

/// Fills paths.log_transport; inverse transport is exp(-log_transport).
void parallel_transport(PathBundle& paths, const BundleModel& bundle);

/// log of |H u|^2 e^{-weight(B_j)} / (|u|^2 e^{-weight(B_0)}).
double log_norm_ratio(const PathBundle& paths, const BundleModel& bundle, std::size_t p, std::size_t j);

struct FKEstimate {
  cplx mean;
  double stderr_mean = 0.0;
  std::size_t n_effective = 0;
  double killed_fraction = 0.0;
  /// Deterministic bound on the truncated time tail (resolvent estimates only).
  double tail_bound = 0.0;

  nlohmann::json to_json() const;
};

/// Monte-Carlo value of e^{-t S_{D,f}} psi at x: mean of
/// exp(-int (D rho_fk + f)) H^{-1} psi(B_t) over surviving paths.
FKEstimate fk_semigroup_estimate(const BundleModel& bundle, const SymbolField& f, const ComplexField& psi,
                                 cplx x, double t, const SimConfig& cfg);

/// int_0^T e^{tc} (e^{-t S} psi)(x) dt by the trapezoid rule on t_grid with one shared
/// ensemble, plus the tail bound |estimate(T)| e^{Re c T} / (spectral_bound - Re c).
FKEstimate fk_resolvent_estimate(const BundleModel& bundle, const SymbolField& f, const ComplexField& psi,
                                 cplx x, cplx c, const SimConfig& cfg, const std::vector<double>& t_grid,
                                 double spectral_bound);

struct SubstitutionReport {
  FKEstimate source;
  FKEstimate target;
  /// Per-path source minus target.
  FKEstimate difference;
  /// Paths whose functional never reached t (excluded with the killed ones).
  double unreached_fraction = 0.0;

  bool agree(double z = 3.0) const;
  nlohmann::json to_json() const;
};

/// Source functional along Phi(B'_{tau(s)}) against the target functional with
/// potential lambda^2 (f o Phi + D rho_fk o Phi) along B' up to tau(t), on common paths.
SubstitutionReport substitution_check(const BundleModel& source, const BundleModel& target, const HoloMap& map,
                                      const SymbolField& f, const ComplexField& psi, cplx x_prime, double t,
                                      const SimConfig& cfg);

/// max |lambda^2(z) rho(Phi(z)) - rho'(z)| / |rho'(z)| over the points, by finite differences.
double curvature_identity_residual(const BundleModel& source, const BundleModel& target, const HoloMap& map,
                                   std::span<const cplx> points, double step = kDefaultStep);

/// CSV trace: path id, t, Re B, Im B, A, transport arg.
void write_trace_csv(std::ostream& out, const PathBundle& paths, std::size_t max_paths);

}  // namespace btlab
