// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace btlab {

namespace {

template <class T>
T cascade(std::span<const T> xs) noexcept {
  if (xs.size() <= 16) {
    T s{};
    for (const T& x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return cascade(xs.first(half)) + cascade(xs.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> xs) noexcept { return cascade(xs); }
cplx pairwise_sum(std::span<const cplx> xs) noexcept { return cascade(xs); }

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary s;
  s.n = xs.size();
  if (s.n == 0) raise(ErrorKind::kStatistics, "empty sample");
  s.mean = pairwise_sum(xs) / static_cast<double>(s.n);
  if (s.n > 1) {
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - s.mean) * (xs[i] - s.mean);
    s.variance = pairwise_sum(dev) / static_cast<double>(s.n - 1);
  }
  s.stderr_mean = std::sqrt(s.variance / static_cast<double>(s.n));
  return s;
}

ComplexSummary summarize(std::span<const cplx> xs) {
  ComplexSummary s;
  s.n = xs.size();
  if (s.n == 0) raise(ErrorKind::kStatistics, "empty sample");
  s.mean = pairwise_sum(xs) / static_cast<double>(s.n);
  if (s.n > 1) {
    std::vector<double> dev(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = std::norm(xs[i] - s.mean);
    s.stderr_mean = std::sqrt(pairwise_sum(dev) / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  }
  return s;
}

double kolmogorov_survival(double x) noexcept {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) raise(ErrorKind::kStatistics, "KS test needs a non-empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || ys.empty()) raise(ErrorKind::kStatistics, "KS test needs non-empty samples");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  const double se = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_survival((se + 0.12 + 0.11 / se) * d)};
}

double normal_cdf(double x, double mean, double sd) noexcept {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

}  // namespace btlab
