// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Generalized Bergman spaces: holomorphic sections of a Hermitian line bundle
// over a chart, square-integrable against e^{-phi} w d^2z/pi. Sections are
// represented by their frame coefficient in the holomorphic frame; the
// computational space is spanned by the monomials z^0..z^N.

#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btlab/common.hpp"
#include "btlab/quadrature.hpp"
#include "btlab/surface.hpp"

namespace btlab {

struct BundleModel {
  std::string name;
  /// Frame norm h(e,e) = e^{-weight}.
  ScalarField weight;
  /// dm = measure_density(z) d^2z/pi.
  ScalarField measure_density;
  SurfaceModel surface;
  RadialFamily quadrature_family = RadialFamily::kGaussianPlane;
  /// Largest square-integrable monomial degree, if finite.
  std::optional<int> max_degree;
  /// Optional analytic d(weight)/dz; empty means finite differences.
  ComplexField weight_dz;
  /// Optional analytic d^2(weight)/dz dzbar; empty means finite differences.
  ScalarField weight_ddbar;

  static BundleModel fock();
  static BundleModel barut_girardello();
  static BundleModel cp1(int k);
  /// Trivial bundle with weight 0 over the flat plane (not a Bergman space; used by path tests).
  static BundleModel trivial_flat();
};

/// Pull-back bundle over map.source: weight o Phi, natural volume of the source metric.
BundleModel pullback_bundle(const HoloMap& map, const BundleModel& bundle, RadialFamily family,
                            std::optional<int> max_degree, std::string name = {});

/// d(weight)/dz, analytic when available.
cplx weight_dz(const BundleModel& bundle, cplx z, double step = kDefaultStep);
/// d^2(weight)/dz dzbar, analytic when available unless force_fd.
double weight_ddbar(const BundleModel& bundle, cplx z, double step = kDefaultStep,
                    bool force_fd = false);

/// Default rule for a bundle at truncation N: 2N+3 angular nodes.
QuadratureRule default_rule(const BundleModel& bundle, int N);

/// Quadrature nodes with the bundle's log-density log(weight_k e^{-phi} w) folded in.
struct WeightedNodes {
  std::vector<cplx> z;
  std::vector<double> log_amplitude;
};

WeightedNodes weighted_nodes(const BundleModel& bundle, const QuadratureRule& rule);

/// (psi, phi) = int conj(psi) phi e^{-weight} dm, conjugate-linear in psi.
cplx inner_product(const BundleModel& bundle, const QuadratureRule& rule, const ComplexField& psi,
                   const ComplexField& phi);

struct BergmanBasis {
  std::vector<int> degrees;
  /// gram(m, n) = (z^m, z^n).
  Eigen::MatrixXcd gram;
  /// Lower Cholesky factor, gram = chol chol^H.
  Eigen::MatrixXcd chol;
  /// e_n = sum_j coeff(n, j) z^j; coeff = conj(chol^{-1}).
  Eigen::MatrixXcd coeff;

  int dimension() const noexcept { return static_cast<int>(degrees.size()); }
  int truncation() const noexcept { return dimension() - 1; }
  Eigen::VectorXcd monomials(cplx z) const;
  /// Orthonormal basis values e_n(z).
  Eigen::VectorXcd evaluate(cplx z) const;
  /// Frame coefficient of sum_n c_n e_n at z.
  cplx value(const Eigen::VectorXcd& coefficients, cplx z) const;
  /// Orthonormal coordinates of the monomial z^n.
  Eigen::VectorXcd monomial_coefficients(int n) const;
  /// Orthonormal coordinates of the projection from monomial moments b_j = (z^j, F).
  Eigen::VectorXcd from_moments(const Eigen::VectorXcd& moments) const;
  /// Largest degree present in a coefficient vector (relative cutoff 1e-14).
  int degree_of(const Eigen::VectorXcd& coefficients) const;

  nlohmann::json to_json() const;
  static BergmanBasis from_json(const nlohmann::json& doc);
  static BergmanBasis from_gram(Eigen::MatrixXcd gram);
};

BergmanBasis gram_matrix(const BundleModel& bundle, const QuadratureRule& rule, int N);

/// Bundle, quadrature and basis bundled with the node-weighted monomial matrix.
struct BergmanSpace {
  BundleModel bundle;
  QuadratureRule rule;
  BergmanBasis basis;
  WeightedNodes nodes;
  /// weighted(k, n) = z_k^n exp(log_amplitude_k / 2).
  Eigen::MatrixXcd weighted;
};

std::shared_ptr<const BergmanSpace> make_space(BundleModel bundle, QuadratureRule rule, int N);
std::shared_ptr<const BergmanSpace> make_space(BundleModel bundle, int N);

/// K(x, y) = sum_n e_n(x) conj(e_n(y)), the kernel against e^{-weight} dm.
cplx reproducing_kernel(const BergmanBasis& basis, cplx x, cplx y);

/// Coefficients c_n = (e_n, F) of the orthogonal projection of an arbitrary field.
Eigen::VectorXcd bergman_project(const BergmanSpace& space, const ComplexField& F);

/// Section represented by orthonormal coefficients, as a field.
ComplexField section_field(std::shared_ptr<const BergmanSpace> space, Eigen::VectorXcd coefficients);

}  // namespace btlab
