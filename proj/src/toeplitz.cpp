// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace btlab {

namespace {

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

/// chol^{-1} A chol^{-H} for Hermitian A.
Eigen::MatrixXcd to_orthonormal(const BergmanBasis& basis, const Eigen::MatrixXcd& a) {
  const auto lower = basis.chol.triangularView<Eigen::Lower>();
  const Eigen::MatrixXcd left = lower.solve(a);
  const Eigen::MatrixXcd adj = left.adjoint();
  return hermitize(lower.solve(adj));
}

}  // namespace

Spectrum spectrum(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitize(hermitian));
  if (solver.info() != Eigen::Success) raise(ErrorKind::kNumerical, "Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::MatrixXcd toeplitz_monomial(const BergmanSpace& space, const ScalarField& f) {
  const auto rows = space.weighted.rows();
  Eigen::VectorXd values(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const double v = f(space.nodes.z[k]);
    if (!std::isfinite(v))
      raise(ErrorKind::kEvaluation, "symbol is not finite at node " + format_point(space.nodes.z[k]));
    values(k) = v;
  }
  return hermitize(space.weighted.adjoint() * values.asDiagonal() * space.weighted);
}

ToeplitzMatrix toeplitz_matrix(std::shared_ptr<const BergmanSpace> space, SymbolField f) {
  if (!space) raise(ErrorKind::kInvalidArgument, "toeplitz_matrix: null space");
  ToeplitzMatrix t;
  t.matrix = to_orthonormal(space->basis, toeplitz_monomial(*space, f.f));
  if (!t.matrix.allFinite()) raise(ErrorKind::kEvaluation, "non-finite Toeplitz entry for symbol " + f.name);
  t.eig = spectrum(t.matrix);
  t.space = std::move(space);
  t.symbol = std::move(f);
  return t;
}

Eigen::VectorXcd semigroup_apply(const ToeplitzMatrix& T, double t, const Eigen::VectorXcd& psi) {
  if (!(t >= 0.0)) raise(ErrorKind::kInvalidArgument, "semigroup time must be >= 0");
  if (psi.size() != T.matrix.rows()) raise(ErrorKind::kInvalidArgument, "coefficient vector has wrong size");
  if (t == 0.0) return psi;
  const Eigen::VectorXcd modal = T.eig.vectors.adjoint() * psi;
  const Eigen::VectorXd decay = (-t * T.eig.values.array()).exp().matrix();
  return T.eig.vectors * (decay.cast<cplx>().asDiagonal() * modal);
}

ResolventResult resolvent_apply(const ToeplitzMatrix& T, cplx c, const Eigen::VectorXcd& psi) {
  if (psi.size() != T.matrix.rows()) raise(ErrorKind::kInvalidArgument, "coefficient vector has wrong size");
  ResolventResult out;
  out.c = c;
  out.spectral_gap = T.min_eigenvalue() - c.real();
  if (!(out.spectral_gap > 0.0))
    raise(ErrorKind::kShiftRejected, "Re c = " + std::to_string(c.real()) +
                                         " is not below the spectrum (min eigenvalue " +
                                         std::to_string(T.min_eigenvalue()) + ")");
  const Eigen::VectorXcd modal = T.eig.vectors.adjoint() * psi;
  Eigen::VectorXcd scaled(modal.size());
  for (Eigen::Index i = 0; i < modal.size(); ++i) scaled(i) = modal(i) / (T.eig.values(i) - c);
  out.coefficients = T.eig.vectors * scaled;
  return out;
}

ResolventResult resolvent_apply(const ToeplitzMatrix& T, cplx c, const ComplexField& F) {
  return resolvent_apply(T, c, bergman_project(*T.space, F));
}

double relative_deviation(cplx a, cplx b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::vector<cplx> default_sample_grid() {
  std::vector<cplx> points;
  for (double r : {0.3, 0.6, 0.9, 1.2, 1.5})
    for (int j = 0; j < 5; ++j) points.push_back(std::polar(r, 2.0 * std::numbers::pi * (j + 0.25) / 5.0));
  return points;
}

TransformationReport transformation_check(std::shared_ptr<const BergmanSpace> source,
                                          std::shared_ptr<const BergmanSpace> target,
                                          const HoloMap& map, const SymbolField& f, cplx c,
                                          const Eigen::VectorXcd& psi,
                                          const std::vector<cplx>& sample_points) {
  if (!source || !target) raise(ErrorKind::kInvalidArgument, "transformation_check: null space");
  TransformationReport rep;
  rep.target_truncation = target->basis.truncation();

  const int psi_degree = source->basis.degree_of(psi);
  if (map.degree <= 0 || psi_degree * map.degree > target->basis.truncation())
    raise(ErrorKind::kTruncation, "psi o Phi has degree " + std::to_string(psi_degree * std::max(map.degree, 1)) +
                                      " beyond target truncation " +
                                      std::to_string(target->basis.truncation()));

  const auto tf = toeplitz_matrix(source, f);
  rep.gap_source = tf.min_eigenvalue() - c.real();
  if (!(rep.gap_source > 0.0))
    raise(ErrorKind::kShiftRejected, "T_f > Re c fails: gap " + std::to_string(rep.gap_source));

  const auto lambda_sq = [map](cplx z) { return dilatation_sq(map, z); };
  const auto pulled_symbol = [map, f](cplx z) { return dilatation_sq(map, z) * f.f(map.phi(z)); };
  const Eigen::MatrixXcd a = to_orthonormal(target->basis, toeplitz_monomial(*target, pulled_symbol));
  const Eigen::MatrixXcd b = to_orthonormal(target->basis, toeplitz_monomial(*target, lambda_sq));
  rep.gap_pencil = spectrum(a - c.real() * b).values(0);
  if (!(rep.gap_pencil > 0.0))
    raise(ErrorKind::kShiftRejected,
          "T'_{lambda^2 f o Phi} > Re c T'_{lambda^2} fails: pencil minimum " + std::to_string(rep.gap_pencil));

  // (A - cB)^{-1} = V (M - c)^{-1} V^H with A V = B V M and V^H B V = I.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> pencil(a, b);
  if (pencil.info() != Eigen::Success)
    raise(ErrorKind::kNumerical, "pencil eigensolver failed (T'_{lambda^2} not positive definite)");
  const Eigen::MatrixXcd& v = pencil.eigenvectors();
  const Eigen::VectorXd& mu = pencil.eigenvalues();
  auto pencil_solve = [&](const Eigen::VectorXcd& rhs) {
    Eigen::VectorXcd modal = v.adjoint() * rhs;
    for (Eigen::Index i = 0; i < modal.size(); ++i) modal(i) /= (mu(i) - c);
    return Eigen::VectorXcd(v * modal);
  };

  const Eigen::VectorXcd left = resolvent_apply(tf, c, psi).coefficients;
  const auto src = source;
  const ComplexField psi_phi = [src, psi, map](cplx z) { return src->basis.value(psi, map.phi(z)); };
  const Eigen::VectorXcd projected =
      bergman_project(*target, [&](cplx z) { return dilatation_sq(map, z) * psi_phi(z); });
  const Eigen::VectorXcd right = pencil_solve(projected);
  const Eigen::VectorXcd right_variant = pencil_solve(b * bergman_project(*target, psi_phi));

  for (cplx x : sample_points) {
    const cplx l = source->basis.value(left, map.phi(x));
    const cplx r = target->basis.value(right, x);
    const cplx rv = target->basis.value(right_variant, x);
    rep.points.push_back(x);
    rep.lhs.push_back(l);
    rep.rhs.push_back(r);
    rep.rhs_variant.push_back(rv);
    rep.max_rel_dev = std::max(rep.max_rel_dev, relative_deviation(l, r));
    rep.max_rel_dev_variant = std::max(rep.max_rel_dev_variant, relative_deviation(l, rv));
  }
  return rep;
}

nlohmann::json TransformationReport::to_json() const {
  auto pairs = [](const std::vector<cplx>& xs) {
    auto a = nlohmann::json::array();
    for (cplx x : xs) a.push_back({x.real(), x.imag()});
    return a;
  };
  return {{"points", pairs(points)},
          {"lhs", pairs(lhs)},
          {"rhs", pairs(rhs)},
          {"rhs_variant", pairs(rhs_variant)},
          {"max_rel_dev", max_rel_dev},
          {"max_rel_dev_variant", max_rel_dev_variant},
          {"gap_source", gap_source},
          {"gap_pencil", gap_pencil},
          {"target_truncation", target_truncation}};
}

}  // namespace btlab
