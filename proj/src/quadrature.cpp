// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace btlab {
namespace {

// Three-term recurrence of the monic orthogonal polynomials,
// p_{k+1} = (x - a_k) p_k - b_k p_{k-1}, with b_0 = mu_0 the total mass.
struct Recurrence {
  std::vector<double> a;
  std::vector<double> b;
};

// Golub-Welsch for the nodes, Newton polish on p_n, Christoffel sums for the
// weights. The Christoffel form keeps relative accuracy for tiny tail weights.
GaussRule solve_rule(const Recurrence& rec, int n) {
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag(k) = rec.a[k];
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(rec.b[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) raise(ErrorKind::kNumerical, "Golub-Welsch eigensolver failed");

  GaussRule rule;
  rule.nodes.resize(n);
  rule.log_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      double p_prev = 0.0, p = 1.0, dp_prev = 0.0, dp = 0.0;
      for (int k = 0; k < n; ++k) {
        const double bk = k == 0 ? 0.0 : rec.b[k];
        const double p_next = (x - rec.a[k]) * p - bk * p_prev;
        const double dp_next = p + (x - rec.a[k]) * dp - bk * dp_prev;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
      }
      if (dp == 0.0 || !std::isfinite(p / dp)) break;
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    rule.nodes[i] = x;

    // Orthonormal recurrence q_k; weight = 1 / sum_k q_k(x)^2.
    double q_prev = 0.0;
    double q = 1.0 / std::sqrt(rec.b[0]);
    double sum = q * q;
    for (int k = 0; k + 1 < n; ++k) {
      const double sb_next = std::sqrt(rec.b[k + 1]);
      const double sb = k == 0 ? 0.0 : std::sqrt(rec.b[k]);
      const double q_next = ((x - rec.a[k]) * q - sb * q_prev) / sb_next;
      q_prev = q;
      q = q_next;
      sum += q * q;
    }
    rule.log_weights[i] = -std::log(sum);
  }
  return rule;
}

}  // namespace

GaussRule gauss_laguerre(int n, double alpha) {
  if (n < 1) raise(ErrorKind::kInvalidArgument, "Gauss-Laguerre needs n >= 1");
  if (!(alpha > -1.0)) raise(ErrorKind::kInvalidArgument, "Gauss-Laguerre needs alpha > -1");
  Recurrence rec;
  rec.a.resize(n);
  rec.b.resize(n);
  for (int k = 0; k < n; ++k) {
    rec.a[k] = 2.0 * k + alpha + 1.0;
    rec.b[k] = k == 0 ? std::tgamma(alpha + 1.0) : k * (k + alpha);
  }
  return solve_rule(rec, n);
}

GaussRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) raise(ErrorKind::kInvalidArgument, "Gauss-Jacobi needs n >= 1");
  if (!(a > -1.0 && b > -1.0)) raise(ErrorKind::kInvalidArgument, "Gauss-Jacobi needs a, b > -1");
  Recurrence rec;
  rec.a.resize(n);
  rec.b.resize(n);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0) {
      rec.a[k] = (b - a) / (ab + 2.0);
      rec.b[k] = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                          std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
      continue;
    }
    rec.a[k] = (b * b - a * a) / (s * (s + 2.0));
    if (k == 1) {
      rec.b[k] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      rec.b[k] = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
  }
  return solve_rule(rec, n);
}

const char* to_string(RadialFamily family) noexcept {
  switch (family) {
    case RadialFamily::kGaussianPlane: return "gaussian-plane";
    case RadialFamily::kExponentialPlane: return "exponential-plane";
    case RadialFamily::kSphere: return "sphere";
  }
  return "unknown";
}

cplx QuadratureRule::node(std::size_t k) const {
  const double r = radial[radial_index(k)].r;
  const double theta = 2.0 * std::numbers::pi * angular_index(k) / angular_count;
  return std::polar(r, theta);
}

double QuadratureRule::log_weight(std::size_t k) const {
  return radial[radial_index(k)].log_weight - std::log(static_cast<double>(angular_count));
}

QuadratureRule make_rule(RadialFamily family, int radial_count, int angular_count) {
  if (angular_count < 1) raise(ErrorKind::kInvalidArgument, "angular_count must be >= 1");
  QuadratureRule rule;
  rule.family = family;
  rule.angular_count = angular_count;
  rule.exactness_degree = 2 * radial_count - 1;
  rule.radial.reserve(radial_count);
  switch (family) {
    case RadialFamily::kGaussianPlane: {
      // 2r dr = du with u = r^2.
      const auto g = gauss_laguerre(radial_count, 0.0);
      for (int i = 0; i < radial_count; ++i) {
        const double u = g.nodes[i];
        const double lw = g.log_weights[i] + u;
        rule.radial.push_back({std::sqrt(u), std::exp(lw), lw});
      }
      break;
    }
    case RadialFamily::kExponentialPlane: {
      const auto g = gauss_laguerre(radial_count, 0.0);
      for (int i = 0; i < radial_count; ++i) {
        const double r = g.nodes[i];
        const double lw = g.log_weights[i] + r + std::log(2.0 * r);
        rule.radial.push_back({r, std::exp(lw), lw});
      }
      break;
    }
    case RadialFamily::kSphere: {
      // u = t/(1-t): 2r dr = du = dt/(1-t)^2, t = (1+x)/2.
      const auto g = gauss_jacobi(radial_count, 0.0, 0.0);
      for (int i = 0; i < radial_count; ++i) {
        const double t = 0.5 * (1.0 + g.nodes[i]);
        const double one_minus = 0.5 * (1.0 - g.nodes[i]);
        const double lw = g.log_weights[i] - std::log(2.0) - 2.0 * std::log(one_minus);
        rule.radial.push_back({std::sqrt(t / one_minus), std::exp(lw), lw});
      }
      break;
    }
  }
  return rule;
}

}  // namespace btlab
