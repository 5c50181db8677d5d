// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "btlab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace btlab {

BundleModel BundleModel::fock() {
  BundleModel b;
  b.name = "fock";
  b.weight = [](cplx z) { return std::norm(z); };
  b.measure_density = [](cplx) { return 1.0; };
  b.surface = SurfaceModel::flat_plane();
  b.quadrature_family = RadialFamily::kGaussianPlane;
  b.weight_dz = [](cplx z) { return std::conj(z); };
  b.weight_ddbar = [](cplx) { return 1.0; };
  return b;
}

BundleModel BundleModel::barut_girardello() {
  BundleModel b;
  b.name = "bg";
  b.weight = [](cplx z) { return std::abs(z); };
  b.measure_density = [](cplx) { return 1.0; };
  b.surface = SurfaceModel::flat_plane();
  b.quadrature_family = RadialFamily::kExponentialPlane;
  b.weight_dz = [](cplx z) {
    const double r = std::abs(z);
    return r == 0.0 ? cplx{} : std::conj(z) / (2.0 * r);
  };
  b.weight_ddbar = [](cplx z) { return 1.0 / (4.0 * std::abs(z)); };
  return b;
}

BundleModel BundleModel::cp1(int k) {
  if (k < 0) raise(ErrorKind::kInvalidArgument, "cp1 needs k >= 0 (no holomorphic sections otherwise)");
  BundleModel b;
  b.name = "cp1:" + std::to_string(k);
  const double kd = k;
  b.weight = [kd](cplx z) { return kd * std::log1p(std::norm(z)); };
  b.measure_density = [](cplx z) {
    const double s = 1.0 + std::norm(z);
    return 1.0 / (s * s);
  };
  b.surface = SurfaceModel::round_sphere();
  b.quadrature_family = RadialFamily::kSphere;
  b.max_degree = k;
  b.weight_dz = [kd](cplx z) { return kd * std::conj(z) / (1.0 + std::norm(z)); };
  b.weight_ddbar = [kd](cplx z) {
    const double s = 1.0 + std::norm(z);
    return kd / (s * s);
  };
  return b;
}

BundleModel BundleModel::trivial_flat() {
  BundleModel b;
  b.name = "trivial";
  b.weight = [](cplx) { return 0.0; };
  b.measure_density = [](cplx) { return 1.0; };
  b.surface = SurfaceModel::flat_plane();
  b.weight_dz = [](cplx) { return cplx{}; };
  b.weight_ddbar = [](cplx) { return 0.0; };
  return b;
}

BundleModel pullback_bundle(const HoloMap& map, const BundleModel& bundle, RadialFamily family,
                            std::optional<int> max_degree, std::string name) {
  BundleModel b;
  b.name = name.empty() ? bundle.name + "@" + map.name : std::move(name);
  b.weight = pullback_weight(map, bundle.weight);
  b.measure_density = map.source.gamma_sq;
  b.surface = map.source;
  b.quadrature_family = family;
  b.max_degree = max_degree;
  // Chain rule; weight is real so only the holomorphic derivative of Phi enters.
  b.weight_dz = [map, bundle](cplx z) { return weight_dz(bundle, map.phi(z)) * map.dphi(z); };
  b.weight_ddbar = [map, bundle](cplx z) {
    return weight_ddbar(bundle, map.phi(z)) * std::norm(map.dphi(z));
  };
  return b;
}

cplx weight_dz(const BundleModel& bundle, cplx z, double step) {
  if (bundle.weight_dz) return bundle.weight_dz(z);
  const double d1 = (bundle.weight(z + cplx{step, 0}) - bundle.weight(z - cplx{step, 0})) / (2 * step);
  const double d2 = (bundle.weight(z + cplx{0, step}) - bundle.weight(z - cplx{0, step})) / (2 * step);
  return 0.5 * cplx{d1, -d2};
}

double weight_ddbar(const BundleModel& bundle, cplx z, double step, bool force_fd) {
  if (bundle.weight_ddbar && !force_fd) return bundle.weight_ddbar(z);
  if (!bundle.surface.domain.contains(z, step))
    raise(ErrorKind::kDomain, "curvature stencil at " + format_point(z) + " leaves the chart");
  const auto& w = bundle.weight;
  const double lap = (w(z + cplx{step, 0}) + w(z - cplx{step, 0}) + w(z + cplx{0, step}) +
                      w(z - cplx{0, step}) - 4.0 * w(z)) /
                     (step * step);
  return 0.25 * lap;
}

QuadratureRule default_rule(const BundleModel& bundle, int N) {
  const int radial = std::max(N + 16, 32);
  return make_rule(bundle.quadrature_family, radial, 2 * N + 3);
}

WeightedNodes weighted_nodes(const BundleModel& bundle, const QuadratureRule& rule) {
  WeightedNodes out;
  const std::size_t n = rule.size();
  out.z.resize(n);
  out.log_amplitude.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z = rule.node(k);
    const double phi = bundle.weight(z);
    const double w = bundle.measure_density(z);
    if (!std::isfinite(phi) || !(w > 0.0) || !std::isfinite(w))
      raise(ErrorKind::kEvaluation, "degenerate bundle data at quadrature node " + format_point(z));
    out.z[k] = z;
    out.log_amplitude[k] = rule.log_weight(k) - phi + std::log(w);
  }
  return out;
}

cplx inner_product(const BundleModel& bundle, const QuadratureRule& rule, const ComplexField& psi,
                   const ComplexField& phi) {
  const auto nodes = weighted_nodes(bundle, rule);
  cplx sum{};
  for (std::size_t k = 0; k < nodes.z.size(); ++k) {
    const cplx a = psi(nodes.z[k]);
    const cplx b = phi(nodes.z[k]);
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
        !std::isfinite(b.imag()))
      raise(ErrorKind::kEvaluation, "non-finite section value at node " + format_point(nodes.z[k]));
    sum += std::conj(a) * b * std::exp(nodes.log_amplitude[k]);
  }
  return sum;
}

namespace {

Eigen::MatrixXcd weighted_monomials(const WeightedNodes& nodes, int N) {
  const auto rows = static_cast<Eigen::Index>(nodes.z.size());
  Eigen::MatrixXcd v(rows, N + 1);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const cplx z = nodes.z[k];
    const double log_r = std::log(std::abs(z));
    const double theta = std::arg(z);
    const double half_amp = 0.5 * nodes.log_amplitude[k];
    for (int n = 0; n <= N; ++n) v(k, n) = std::polar(std::exp(n * log_r + half_amp), n * theta);
  }
  return v;
}

void check_truncation(const BundleModel& bundle, int N) {
  if (N < 0) raise(ErrorKind::kInvalidArgument, "truncation N must be >= 0");
  if (bundle.max_degree && N > *bundle.max_degree)
    raise(ErrorKind::kInvalidArgument, "truncation N = " + std::to_string(N) + " exceeds the " +
                                           std::to_string(*bundle.max_degree + 1) +
                                           "-dimensional space of " + bundle.name);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (rows[i].size() != static_cast<std::size_t>(n))
      raise(ErrorKind::kConfig, "basis document: matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = cplx{rows[i][j].at(0).get<double>(), rows[i][j].at(1).get<double>()};
  }
  return m;
}

}  // namespace

Eigen::VectorXcd BergmanBasis::monomials(cplx z) const {
  Eigen::VectorXcd v(dimension());
  cplx p{1.0, 0.0};
  for (int n = 0; n < dimension(); ++n) {
    v(n) = p;
    p *= z;
  }
  return v;
}

Eigen::VectorXcd BergmanBasis::evaluate(cplx z) const { return coeff * monomials(z); }

cplx BergmanBasis::value(const Eigen::VectorXcd& coefficients, cplx z) const {
  return coefficients.transpose() * evaluate(z);
}

Eigen::VectorXcd BergmanBasis::monomial_coefficients(int n) const {
  if (n < 0 || n >= dimension())
    raise(ErrorKind::kTruncation, "monomial z^" + std::to_string(n) + " is outside the truncated space");
  return chol.row(n).conjugate().transpose();
}

Eigen::VectorXcd BergmanBasis::from_moments(const Eigen::VectorXcd& moments) const {
  return chol.triangularView<Eigen::Lower>().solve(moments);
}

int BergmanBasis::degree_of(const Eigen::VectorXcd& coefficients) const {
  const double scale = coefficients.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  for (Eigen::Index n = coefficients.size() - 1; n > 0; --n)
    if (std::abs(coefficients(n)) > 1e-14 * scale) return static_cast<int>(n);
  return 0;
}

BergmanBasis BergmanBasis::from_gram(Eigen::MatrixXcd gram) {
  BergmanBasis b;
  const auto n = gram.rows();
  b.degrees.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) b.degrees[i] = static_cast<int>(i);
  b.gram = 0.5 * (gram + gram.adjoint());
  Eigen::LLT<Eigen::MatrixXcd> llt(b.gram);
  if (llt.info() != Eigen::Success)
    raise(ErrorKind::kNumerical, "Gram matrix is not positive definite (quadrature failure)");
  b.chol = llt.matrixL();
  const Eigen::MatrixXcd inv =
      b.chol.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(n, n));
  b.coeff = inv.conjugate();
  return b;
}

nlohmann::json BergmanBasis::to_json() const {
  return {{"degrees", degrees}, {"gram", matrix_to_json(gram)}, {"chol", matrix_to_json(chol)}};
}

BergmanBasis BergmanBasis::from_json(const nlohmann::json& doc) {
  try {
    auto basis = from_gram(matrix_from_json(doc.at("gram")));
    const auto degrees = doc.at("degrees").get<std::vector<int>>();
    if (degrees != basis.degrees) raise(ErrorKind::kConfig, "basis document: degrees do not match gram");
    if (doc.contains("chol")) {
      const Eigen::MatrixXcd stored = matrix_from_json(doc.at("chol"));
      if ((stored - basis.chol).norm() > 1e-12 * basis.chol.norm())
        raise(ErrorKind::kConfig, "basis document: Cholesky factor inconsistent with gram");
    }
    return basis;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::kConfig, std::string("basis document: ") + e.what());
  }
}

BergmanBasis gram_matrix(const BundleModel& bundle, const QuadratureRule& rule, int N) {
  check_truncation(bundle, N);
  const auto nodes = weighted_nodes(bundle, rule);
  const Eigen::MatrixXcd v = weighted_monomials(nodes, N);
  return BergmanBasis::from_gram(v.adjoint() * v);
}

std::shared_ptr<const BergmanSpace> make_space(BundleModel bundle, QuadratureRule rule, int N) {
  check_truncation(bundle, N);
  auto space = std::make_shared<BergmanSpace>();
  space->nodes = weighted_nodes(bundle, rule);
  space->weighted = weighted_monomials(space->nodes, N);
  space->basis = BergmanBasis::from_gram(space->weighted.adjoint() * space->weighted);
  space->bundle = std::move(bundle);
  space->rule = std::move(rule);
  return space;
}

std::shared_ptr<const BergmanSpace> make_space(BundleModel bundle, int N) {
  auto rule = default_rule(bundle, N);
  return make_space(std::move(bundle), std::move(rule), N);
}

cplx reproducing_kernel(const BergmanBasis& basis, cplx x, cplx y) {
  return basis.evaluate(y).dot(basis.evaluate(x));
}

Eigen::VectorXcd bergman_project(const BergmanSpace& space, const ComplexField& F) {
  const auto rows = static_cast<Eigen::Index>(space.nodes.z.size());
  Eigen::VectorXcd samples(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const cplx value = F(space.nodes.z[k]);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      raise(ErrorKind::kEvaluation, "non-finite field value at node " + format_point(space.nodes.z[k]));
    samples(k) = value * std::exp(0.5 * space.nodes.log_amplitude[k]);
  }
  return space.basis.from_moments(space.weighted.adjoint() * samples);
}

ComplexField section_field(std::shared_ptr<const BergmanSpace> space, Eigen::VectorXcd coefficients) {
  return [space = std::move(space), c = std::move(coefficients)](cplx z) {
    return space->basis.value(c, z);
  };
}

}  // namespace btlab
