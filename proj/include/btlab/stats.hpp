// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "btlab/common.hpp"

namespace btlab {

/// Pairwise (cascade) summation; the result depends only on the order of xs.
double pairwise_sum(std::span<const double> xs) noexcept;
cplx pairwise_sum(std::span<const cplx> xs) noexcept;

struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double stderr_mean = 0.0;
  std::size_t n = 0;
};

SampleSummary summarize(std::span<const double> xs);

struct ComplexSummary {
  cplx mean;
  /// sqrt(var Re + var Im) / sqrt(n).
  double stderr_mean = 0.0;
  std::size_t n = 0;
};

ComplexSummary summarize(std::span<const cplx> xs);

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 x^2}.
double kolmogorov_survival(double x) noexcept;

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample test against a continuous cdf (asymptotic p with Stephens' small-n correction).
KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys);

double normal_cdf(double x, double mean, double sd) noexcept;

}  // namespace btlab
