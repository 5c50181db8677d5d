// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "btlab/parallel.hpp"
#include "btlab/rng.hpp"

namespace btlab {

namespace {

constexpr std::uint32_t kMotionTag = 0;

class Walker {
 public:
  Walker(const SurfaceModel& surface, double D, double dt, double kill_radius)
      : surface_(surface), two_d_dt_(2.0 * D * dt), kill_radius_(kill_radius) {}

  /// Advances z by one step; returns false (leaving z unchanged) if the step leaves the chart.
  bool step(cplx& z, const PathStream& stream, std::uint32_t j) const {
    const auto [n1, n2] = stream.normals(j);
    const double sd = std::sqrt(two_d_dt_ / surface_.gamma_sq(z));
    const cplx next = z + sd * cplx{n1, n2};
    if (!(std::abs(next) < kill_radius_) || !surface_.domain.contains(next)) return false;
    z = next;
    return true;
  }

 private:
  const SurfaceModel& surface_;
  double two_d_dt_;
  double kill_radius_;
};

std::size_t grid_index(double t, double dt) {
  const double x = t / dt;
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-6) raise(ErrorKind::kConfig, "time " + std::to_string(t) + " is not a multiple of dt");
  return static_cast<std::size_t>(r);
}

FKEstimate finish_estimate(std::vector<cplx> values, std::size_t total) {
  FKEstimate est;
  est.n_effective = values.size();
  est.killed_fraction = total == 0 ? 0.0 : 1.0 - static_cast<double>(values.size()) / total;
  if (est.killed_fraction > 0.5)
    raise(ErrorKind::kReliability, "killed fraction " + std::to_string(est.killed_fraction) + " exceeds 0.5");
  for (const cplx& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      raise(ErrorKind::kNumerical, "non-finite Feynman-Kac weight (overflow of the path functional)");
  const auto s = summarize(values);
  est.mean = s.mean;
  est.stderr_mean = s.stderr_mean;
  return est;
}

/// Values of the FK functional at the requested step indices along one path; empty if killed.
std::vector<cplx> fk_path(const BundleModel& bundle, const SymbolField& f, const ComplexField& psi, cplx x,
                          const SimConfig& cfg, const Walker& walker, std::uint64_t path,
                          const std::vector<std::size_t>& record) {
  const PathStream stream(cfg.seed, path, kMotionTag);
  auto potential = [&](cplx z) { return cfg.D * fk_curvature_potential(bundle, z) + f.f(z); };
  std::vector<cplx> out;
  out.reserve(record.size());
  std::size_t next = 0;
  while (next < record.size() && record[next] == 0) {
    out.push_back(psi(x));
    ++next;
  }
  cplx z = x;
  double v0 = potential(z);
  double integral = 0.0;
  cplx log_t{};
  for (std::size_t j = 0; next < record.size(); ++j) {
    const cplx prev = z;
    if (!walker.step(z, stream, static_cast<std::uint32_t>(j))) return {};
    log_t += weight_dz(bundle, 0.5 * (prev + z)) * (z - prev);
    const double v1 = potential(z);
    integral += 0.5 * (v0 + v1) * cfg.dt;
    v0 = v1;
    while (next < record.size() && record[next] == j + 1) {
      out.push_back(std::exp(-integral - log_t) * psi(z));
      ++next;
    }
  }
  return out;
}

}  // namespace

void validate(const SimConfig& cfg, const SurfaceModel& surface, cplx x0) {
  auto fail = [](const std::string& m) { raise(ErrorKind::kConfig, "simulation config: " + m); };
  if (!(cfg.D > 0.0) || !std::isfinite(cfg.D)) fail("D must be positive");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("dt must be positive");
  if (!(cfg.T_max >= 0.0) || !std::isfinite(cfg.T_max)) fail("T_max must be non-negative");
  if (cfg.n_paths == 0 || cfg.n_paths > 10'000'000) fail("n_paths must be in [1, 1e7]");
  if (!(cfg.kill_radius > 0.0)) fail("kill_radius must be positive");
  if (!(std::abs(x0) < cfg.kill_radius) || !surface.domain.contains(x0))
    fail("start point " + format_point(x0) + " lies outside the kill radius");
  const double sd = std::sqrt(2.0 * cfg.D * cfg.dt / surface.gamma_sq(x0));
  if (sd > 0.1)
    fail("step std " + std::to_string(sd) + " exceeds 0.1 chart units at the start point; reduce dt");
}

std::size_t step_count(const SimConfig& cfg, double horizon) {
  return static_cast<std::size_t>(std::ceil(horizon / cfg.dt - 1e-9));
}

PathBundle simulate_paths(const SurfaceModel& surface, cplx x0, const SimConfig& cfg, std::size_t first_path,
                          std::optional<std::size_t> count) {
  validate(cfg, surface, x0);
  if (first_path > cfg.n_paths) raise(ErrorKind::kInvalidArgument, "first_path beyond the ensemble");
  PathBundle b;
  b.first_path = first_path;
  b.n_paths = count.value_or(cfg.n_paths - first_path);
  const std::size_t steps = step_count(cfg, cfg.T_max);
  b.times.resize(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) b.times[j] = static_cast<double>(j) * cfg.dt;
  b.positions.assign(b.n_paths * b.samples(), x0);
  b.last_valid.assign(b.n_paths, steps);
  const Walker walker(surface, cfg.D, cfg.dt, cfg.kill_radius);
  parallel_for(b.n_paths, cfg.workers, [&](std::size_t p) {
    const PathStream stream(cfg.seed, first_path + p, kMotionTag);
    cplx* row = b.positions.data() + p * b.samples();
    cplx z = x0;
    for (std::size_t j = 0; j < steps; ++j) {
      if (!walker.step(z, stream, static_cast<std::uint32_t>(j))) {
        b.last_valid[p] = j;
        std::fill(row + j + 1, row + steps + 1, z);
        return;
      }
      row[j + 1] = z;
    }
  });
  return b;
}

void additive_functional(PathBundle& paths, const ScalarField& q) {
  const std::size_t m = paths.samples();
  paths.functional.assign(paths.n_paths * m, 0.0);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    double* a = paths.functional.data() + p * m;
    double q0 = 0.0;
    for (std::size_t j = 0; j <= paths.last_valid[p]; ++j) {
      const cplx z = paths.position(p, j);
      const double q1 = q(z);
      if (!(q1 >= 0.0)) raise(ErrorKind::kDomain, "additive functional: q < 0 at " + format_point(z));
      if (j > 0) a[j] = a[j - 1] + 0.5 * (q0 + q1) * (paths.times[j] - paths.times[j - 1]);
      q0 = q1;
    }
    std::fill(a + paths.last_valid[p] + 1, a + m, a[paths.last_valid[p]]);
  }
}

TimeChanged time_change(const PathBundle& paths, const std::vector<double>& t_grid) {
  if (paths.functional.size() != paths.positions.size())
    raise(ErrorKind::kInvalidArgument, "time_change: additive functional not computed");
  if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()) || t_grid.front() < 0.0)
    raise(ErrorKind::kInvalidArgument, "time_change: t_grid must be non-empty, sorted and non-negative");
  TimeChanged out;
  out.t_grid = t_grid;
  out.n_paths = paths.n_paths;
  const std::size_t g = t_grid.size();
  const std::size_t m = paths.samples();
  out.positions.assign(paths.n_paths * g, cplx{std::numeric_limits<double>::quiet_NaN(), 0.0});
  out.tau.assign(paths.n_paths * g, std::numeric_limits<double>::quiet_NaN());
  out.reached.assign(paths.n_paths, 0);
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    const double* a = paths.functional.data() + p * m;
    const std::size_t last = paths.last_valid[p];
    if (a[last] < t_grid.back()) continue;
    out.reached[p] = 1;
    ++out.n_reached;
    for (std::size_t i = 0; i < g; ++i) {
      const double t = t_grid[i];
      const std::size_t j = static_cast<std::size_t>(std::lower_bound(a, a + last + 1, t) - a);
      double tau;
      cplx z;
      if (j == 0) {
        tau = paths.times[0];
        z = paths.position(p, 0);
      } else {
        const double frac = (t - a[j - 1]) / (a[j] - a[j - 1]);
        tau = paths.times[j - 1] + frac * (paths.times[j] - paths.times[j - 1]);
        z = paths.position(p, j - 1) + frac * (paths.position(p, j) - paths.position(p, j - 1));
      }
      out.tau[p * g + i] = tau;
      out.positions[p * g + i] = z;
    }
  }
  if (out.n_reached == 0) raise(ErrorKind::kStatistics, "time_change: no path reaches the requested time");
  return out;
}

TimeChanged morphism_pushforward(TimeChanged paths, const HoloMap& map) {
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    if (!paths.reached[p]) continue;
    for (std::size_t i = 0; i < paths.t_grid.size(); ++i) {
      cplx& z = paths.positions[p * paths.t_grid.size() + i];
      z = map.phi(z);
    }
  }
  return paths;
}

std::vector<cplx> reached_samples(const TimeChanged& paths, std::size_t i) {
  std::vector<cplx> out;
  out.reserve(paths.n_reached);
  for (std::size_t p = 0; p < paths.n_paths; ++p)
    if (paths.reached[p]) out.push_back(paths.positions[p * paths.t_grid.size() + i]);
  return out;
}

bool InvarianceReport::mean_pass(double z) const { return std::abs(z_mean_re) <= z && std::abs(z_mean_im) <= z; }

bool InvarianceReport::second_moment_pass(double z) const {
  return std::abs(z_second_re) <= z && std::abs(z_second_im) <= z;
}

nlohmann::json InvarianceReport::to_json() const {
  return {{"n", n},
          {"ks_re", {{"statistic", ks_re.statistic}, {"p_value", ks_re.p_value}}},
          {"ks_im", {{"statistic", ks_im.statistic}, {"p_value", ks_im.p_value}}},
          {"z_mean_re", z_mean_re},
          {"z_mean_im", z_mean_im},
          {"z_second_re", z_second_re},
          {"z_second_im", z_second_im}};
}

InvarianceReport invariance_test(std::span<const cplx> samples, const SurfaceModel& surface, cplx x0, double D,
                                 double t, std::optional<std::span<const cplx>> reference) {
  constexpr std::size_t kMinPaths = 10000;
  if (samples.size() < kMinPaths)
    raise(ErrorKind::kStatistics, "invariance_test needs at least 10^4 surviving paths, got " +
                                      std::to_string(samples.size()));
  InvarianceReport rep;
  rep.n = samples.size();
  auto coord = [](std::span<const cplx> xs, bool im, double shift, bool square) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double v = (im ? xs[i].imag() : xs[i].real()) - shift;
      out[i] = square ? v * v : v;
    }
    return out;
  };
  const double mu[2] = {x0.real(), x0.imag()};
  if (reference) {
    if (reference->size() < kMinPaths) raise(ErrorKind::kStatistics, "reference ensemble smaller than 10^4");
    for (int c = 0; c < 2; ++c) {
      const bool im = c == 1;
      const auto ks = ks_two_sample(coord(samples, im, 0, false), coord(*reference, im, 0, false));
      auto zscore = [&](bool square) {
        const auto a = coord(samples, im, mu[c], square);
        const auto b = coord(*reference, im, mu[c], square);
        const auto sa = summarize(a);
        const auto sb = summarize(b);
        return (sa.mean - sb.mean) / std::hypot(sa.stderr_mean, sb.stderr_mean);
      };
      (im ? rep.ks_im : rep.ks_re) = ks;
      (im ? rep.z_mean_im : rep.z_mean_re) = zscore(false);
      (im ? rep.z_second_im : rep.z_second_re) = zscore(true);
    }
    return rep;
  }
  if (surface.name != "flat")
    raise(ErrorKind::kInvalidArgument, "invariance_test on a curved surface needs a reference ensemble");
  const double var = 2.0 * D * t;
  const double sd = std::sqrt(var);
  for (int c = 0; c < 2; ++c) {
    const bool im = c == 1;
    const double m = mu[c];
    const auto ks = ks_one_sample(coord(samples, im, 0, false), [m, sd](double v) { return normal_cdf(v, m, sd); });
    const auto first = summarize(coord(samples, im, m, false));
    const auto second = summarize(coord(samples, im, m, true));
    (im ? rep.ks_im : rep.ks_re) = ks;
    (im ? rep.z_mean_im : rep.z_mean_re) = first.mean / (sd / std::sqrt(static_cast<double>(rep.n)));
    (im ? rep.z_second_im : rep.z_second_re) = (second.mean - var) / second.stderr_mean;
  }
  return rep;
}

double curvature_rho(const BundleModel& bundle, cplx z, double step, bool force_fd) {
  return 2.0 * weight_ddbar(bundle, z, step, force_fd) / bundle.surface.gamma_sq(z);
}

double fk_curvature_potential(const BundleModel& bundle, cplx z) { return -curvature_rho(bundle, z); }

std::vector<cplx> transport_along(const BundleModel& bundle, std::span<const cplx> curve) {
  std::vector<cplx> out(curve.size());
  for (std::size_t j = 1; j < curve.size(); ++j)
    out[j] = out[j - 1] + weight_dz(bundle, 0.5 * (curve[j - 1] + curve[j])) * (curve[j] - curve[j - 1]);
  return out;
}

void parallel_transport(PathBundle& paths, const BundleModel& bundle) {
  const std::size_t m = paths.samples();
  paths.log_transport.assign(paths.n_paths * m, cplx{});
  for (std::size_t p = 0; p < paths.n_paths; ++p) {
    const auto trace = transport_along(bundle, paths.path(p).first(paths.last_valid[p] + 1));
    cplx* row = paths.log_transport.data() + p * m;
    std::copy(trace.begin(), trace.end(), row);
    std::fill(row + trace.size(), row + m, trace.back());
  }
}

double log_norm_ratio(const PathBundle& paths, const BundleModel& bundle, std::size_t p, std::size_t j) {
  if (paths.log_transport.size() != paths.positions.size())
    raise(ErrorKind::kInvalidArgument, "log_norm_ratio: transport not computed");
  const double lt = paths.log_transport[p * paths.samples() + j].real();
  return 2.0 * lt - bundle.weight(paths.position(p, j)) + bundle.weight(paths.position(p, 0));
}

nlohmann::json FKEstimate::to_json() const {
  return {{"mean", {mean.real(), mean.imag()}},
          {"stderr", stderr_mean},
          {"n_effective", n_effective},
          {"killed_fraction", killed_fraction},
          {"tail_bound", tail_bound}};
}

FKEstimate fk_semigroup_estimate(const BundleModel& bundle, const SymbolField& f, const ComplexField& psi, cplx x,
                                 double t, const SimConfig& cfg) {
  if (!(t >= 0.0)) raise(ErrorKind::kInvalidArgument, "semigroup time must be >= 0");
  validate(cfg, bundle.surface, x);
  if (t == 0.0) {
    FKEstimate est;
    est.mean = psi(x);
    est.n_effective = cfg.n_paths;
    return est;
  }
  SimConfig run = cfg;
  const std::size_t steps = step_count(cfg, t);
  run.dt = t / static_cast<double>(steps);
  const Walker walker(bundle.surface, run.D, run.dt, run.kill_radius);
  const std::vector<std::size_t> record{steps};
  std::vector<cplx> slots(run.n_paths);
  std::vector<std::uint8_t> ok(run.n_paths, 0);
  parallel_for(run.n_paths, run.workers, [&](std::size_t p) {
    const auto v = fk_path(bundle, f, psi, x, run, walker, p, record);
    if (!v.empty()) {
      slots[p] = v[0];
      ok[p] = 1;
    }
  });
  std::vector<cplx> values;
  values.reserve(run.n_paths);
  for (std::size_t p = 0; p < run.n_paths; ++p)
    if (ok[p]) values.push_back(slots[p]);
  return finish_estimate(std::move(values), run.n_paths);
}

FKEstimate fk_resolvent_estimate(const BundleModel& bundle, const SymbolField& f, const ComplexField& psi, cplx x,
                                 cplx c, const SimConfig& cfg, const std::vector<double>& t_grid,
                                 double spectral_bound) {
  const double gap = spectral_bound - c.real();
  if (!(gap > 0.0))
    raise(ErrorKind::kShiftRejected, "Re c = " + std::to_string(c.real()) + " is not below the spectral bound " +
                                         std::to_string(spectral_bound) + "; the time integral diverges");
  if (t_grid.size() < 2 || t_grid.front() != 0.0 || !std::is_sorted(t_grid.begin(), t_grid.end()))
    raise(ErrorKind::kInvalidArgument, "resolvent t_grid must start at 0 and increase");
  validate(cfg, bundle.surface, x);
  std::vector<std::size_t> record(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) record[i] = grid_index(t_grid[i], cfg.dt);
  std::vector<cplx> weights(t_grid.size());
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    const double h = 0.5 * (t_grid[i + 1] - t_grid[i]);
    weights[i] += h;
    weights[i + 1] += h;
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) weights[i] *= std::exp(c * t_grid[i]);

  const Walker walker(bundle.surface, cfg.D, cfg.dt, cfg.kill_radius);
  std::vector<cplx> integral(cfg.n_paths), terminal(cfg.n_paths);
  std::vector<std::uint8_t> ok(cfg.n_paths, 0);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t p) {
    const auto v = fk_path(bundle, f, psi, x, cfg, walker, p, record);
    if (v.empty()) return;
    cplx s{};
    for (std::size_t i = 0; i < v.size(); ++i) s += weights[i] * v[i];
    integral[p] = s;
    terminal[p] = v.back();
    ok[p] = 1;
  });
  std::vector<cplx> values, ends;
  for (std::size_t p = 0; p < cfg.n_paths; ++p)
    if (ok[p]) {
      values.push_back(integral[p]);
      ends.push_back(terminal[p]);
    }
  auto est = finish_estimate(std::move(values), cfg.n_paths);
  const double t_end = t_grid.back();
  est.tail_bound = std::abs(summarize(ends).mean) * std::exp(c.real() * t_end) / gap;
  return est;
}

bool SubstitutionReport::agree(double z) const {
  return std::abs(source.mean - target.mean) <= z * std::hypot(source.stderr_mean, target.stderr_mean);
}

nlohmann::json SubstitutionReport::to_json() const {
  return {{"source", source.to_json()},
          {"target", target.to_json()},
          {"difference", difference.to_json()},
          {"unreached_fraction", unreached_fraction}};
}

SubstitutionReport substitution_check(const BundleModel& source, const BundleModel& target, const HoloMap& map,
                                      const SymbolField& f, const ComplexField& psi, cplx x_prime, double t,
                                      const SimConfig& cfg) {
  if (!(t > 0.0)) raise(ErrorKind::kInvalidArgument, "substitution_check needs t > 0");
  validate(cfg, map.source, x_prime);
  const std::size_t steps = step_count(cfg, cfg.T_max);
  const Walker walker(map.source, cfg.D, cfg.dt, cfg.kill_radius);
  const double D = cfg.D;
  auto v_source = [&](cplx w) { return D * fk_curvature_potential(source, w) + f.f(w); };
  auto v_target = [&](cplx z) {
    return dilatation_sq(map, z) * f.f(map.phi(z)) + D * fk_curvature_potential(target, z);
  };

  enum : std::uint8_t { kKilled = 0, kUnreached = 1, kDone = 2 };
  std::vector<cplx> src(cfg.n_paths), tgt(cfg.n_paths);
  std::vector<std::uint8_t> state(cfg.n_paths, kKilled);
  parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t p) {
    const PathStream stream(cfg.seed, p, kMotionTag);
    // A uses the midpoint rule so that the source integrand and ds share a node.
    std::vector<cplx> zs{x_prime};
    std::vector<double> a{0.0};
    cplx z = x_prime;
    for (std::size_t j = 0; j < steps && a.back() < t; ++j) {
      const cplx prev = z;
      if (!walker.step(z, stream, static_cast<std::uint32_t>(j))) return;
      a.push_back(a.back() + dilatation_sq(map, 0.5 * (prev + z)) * cfg.dt);
      zs.push_back(z);
    }
    if (a.back() < t) {
      state[p] = kUnreached;
      return;
    }
    // Cut both curves at tau(t) by linear interpolation inside the last step.
    const std::size_t last = a.size() - 1;
    const double frac = (t - a[last - 1]) / (a[last] - a[last - 1]);
    zs[last] = zs[last - 1] + frac * (zs[last] - zs[last - 1]);

    std::vector<cplx> ws(zs.size());
    for (std::size_t j = 0; j < zs.size(); ++j) ws[j] = map.phi(zs[j]);

    double int_s = 0.0, int_t = 0.0;
    double vt0 = v_target(zs[0]);
    for (std::size_t j = 1; j < zs.size(); ++j) {
      const double ds = j == last ? t - a[j - 1] : a[j] - a[j - 1];
      const double dr = j == last ? frac * cfg.dt : cfg.dt;
      int_s += v_source(map.phi(0.5 * (zs[j - 1] + zs[j]))) * ds;
      const double vt1 = v_target(zs[j]);
      int_t += 0.5 * (vt0 + vt1) * dr;
      vt0 = vt1;
    }
    const cplx lt_s = transport_along(source, ws).back();
    const cplx lt_t = transport_along(target, zs).back();
    const cplx value = psi(ws.back());
    src[p] = std::exp(-int_s - lt_s) * value;
    tgt[p] = std::exp(-int_t - lt_t) * value;
    state[p] = kDone;
  });

  std::vector<cplx> vs, vt, vd;
  std::size_t unreached = 0;
  for (std::size_t p = 0; p < cfg.n_paths; ++p) {
    if (state[p] == kUnreached) ++unreached;
    if (state[p] != kDone) continue;
    vs.push_back(src[p]);
    vt.push_back(tgt[p]);
    vd.push_back(src[p] - tgt[p]);
  }
  SubstitutionReport rep;
  rep.unreached_fraction = static_cast<double>(unreached) / cfg.n_paths;
  rep.source = finish_estimate(std::move(vs), cfg.n_paths);
  rep.target = finish_estimate(std::move(vt), cfg.n_paths);
  rep.difference = finish_estimate(std::move(vd), cfg.n_paths);
  return rep;
}

double curvature_identity_residual(const BundleModel& source, const BundleModel& target, const HoloMap& map,
                                   std::span<const cplx> points, double step) {
  double worst = 0.0;
  for (cplx z : points) {
    if (map.is_singular(z)) raise(ErrorKind::kDomain, "curvature identity at singular point " + format_point(z));
    const double lhs = dilatation_sq(map, z) * curvature_rho(source, map.phi(z), step, true);
    const double rhs = curvature_rho(target, z, step, true);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst;
}

void write_trace_csv(std::ostream& out, const PathBundle& paths, std::size_t max_paths) {
  const auto old_precision = out.precision(17);
  out << "path,t,re,im,A,transport_arg\n";
  const std::size_t m = paths.samples();
  const bool has_a = paths.functional.size() == paths.positions.size();
  const bool has_t = paths.log_transport.size() == paths.positions.size();
  for (std::size_t p = 0; p < std::min(max_paths, paths.n_paths); ++p)
    for (std::size_t j = 0; j < m; ++j) {
      const cplx z = paths.position(p, j);
      out << paths.first_path + p << ',' << paths.times[j] << ',' << z.real() << ',' << z.imag() << ','
          << (has_a ? paths.functional[p * m + j] : 0.0) << ','
          << (has_t ? paths.log_transport[p * m + j].imag() : 0.0) << '\n';
    }
  out.precision(old_precision);
}

}  // namespace btlab
