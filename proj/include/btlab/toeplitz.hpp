// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

// Berezin-Toeplitz operators as matrices of quadratic forms in the
// orthonormal basis of a truncated Bergman space.

#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "btlab/bergman.hpp"
#include "btlab/surface.hpp"

namespace btlab {

struct SymbolField {
  std::string name;
  ScalarField f;
};

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

Spectrum spectrum(const Eigen::MatrixXcd& hermitian);

struct ToeplitzMatrix {
  Eigen::MatrixXcd matrix;
  std::shared_ptr<const BergmanSpace> space;
  SymbolField symbol;
  Spectrum eig;

  double min_eigenvalue() const { return eig.values(0); }
};

/// Matrix of psi, phi -> int f conj(psi) phi e^{-weight} dm in the orthonormal basis.
ToeplitzMatrix toeplitz_matrix(std::shared_ptr<const BergmanSpace> space, SymbolField f);

/// Same form in the monomial basis, A(m, n) = (z^m, f z^n).
Eigen::MatrixXcd toeplitz_monomial(const BergmanSpace& space, const ScalarField& f);

/// e^{-tT} psi.
Eigen::VectorXcd semigroup_apply(const ToeplitzMatrix& T, double t, const Eigen::VectorXcd& psi);

struct ResolventResult {
  cplx c;
  Eigen::VectorXcd coefficients;
  /// min spec(T) - Re c.
  double spectral_gap = 0.0;
};

/// (T - c)^{-1} psi for Re c below the spectrum.
ResolventResult resolvent_apply(const ToeplitzMatrix& T, cplx c, const Eigen::VectorXcd& psi);
/// Same after projecting an arbitrary field onto the holomorphic subspace.
ResolventResult resolvent_apply(const ToeplitzMatrix& T, cplx c, const ComplexField& F);

struct TransformationReport {
  std::vector<cplx> points;
  /// Source resolvent image evaluated at Phi(x').
  std::vector<cplx> lhs;
  /// Target pencil resolvent applied to the projection of lambda^2 (psi o Phi).
  std::vector<cplx> rhs;
  /// Target pencil resolvent applied to T'_{lambda^2} (psi o Phi).
  std::vector<cplx> rhs_variant;
  double max_rel_dev = 0.0;
  double max_rel_dev_variant = 0.0;
  double gap_source = 0.0;
  double gap_pencil = 0.0;
  int target_truncation = 0;

  nlohmann::json to_json() const;
};

/// Evaluates both sides of the resolvent transformation formula for Phi: M' -> M.
/// source lives on M, target on M' with the pulled-back bundle and natural volume.
TransformationReport transformation_check(std::shared_ptr<const BergmanSpace> source,
                                          std::shared_ptr<const BergmanSpace> target,
                                          const HoloMap& map, const SymbolField& f, cplx c,
                                          const Eigen::VectorXcd& psi,
                                          const std::vector<cplx>& sample_points);

/// |a - b| / max(|a|, |b|), zero when both vanish.
double relative_deviation(cplx a, cplx b);

/// 25 points: radii 0.3..1.5 times five angles.
std::vector<cplx> default_sample_grid();

}  // namespace btlab
