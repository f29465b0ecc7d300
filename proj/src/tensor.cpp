#include "plategamma/tensor.hpp"

#include <cmath>

namespace pg {

namespace {

// Index pairs of the Sym(3) basis, in storage order.
constexpr int kPair3[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
constexpr int kPair2[3][2] = {{0, 0}, {1, 1}, {0, 1}};

double weight3(int a) { return a < 3 ? 1.0 : kSqrt2; }
double weight2(int a) { return a < 2 ? 1.0 : kSqrt2; }

int index3(int i, int j) {
  if (i == j) return i;
  return 5 - (i + j - 1);
}

int index2(int i, int j) { return (i == j) ? i : 2; }

void check_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& m,
                     const char* what) {
  double scale = m.norm();
  if ((m - m.transpose()).norm() > 1e-12 * (scale > 0 ? scale : 1.0))
    throw Error(std::string(what) + ": representation matrix not symmetric");
}

}  // namespace

ElasticityTensor ElasticityTensor::from_basis_matrix(const Mat6& m) {
  check_symmetric(m, "ElasticityTensor");
  ElasticityTensor c;
  c.m_ = 0.5 * (m + m.transpose());
  return c;
}

ElasticityTensor ElasticityTensor::from_components(
    const std::function<double(int, int, int, int)>& c) {
  Mat6 m;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      m(a, b) = weight3(a) * weight3(b) *
                c(kPair3[a][0], kPair3[a][1], kPair3[b][0], kPair3[b][1]);
  return from_basis_matrix(m);
}

ElasticityTensor ElasticityTensor::isotropic(double lambda, double mu) {
  return from_components([lambda, mu](int i, int j, int k, int l) {
    auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    return lambda * d(i, j) * d(k, l) +
           mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
  });
}

ElasticityTensor ElasticityTensor::inverse() const {
  Eigen::SelfAdjointEigenSolver<Mat6> es(m_);
  double lo = es.eigenvalues()(0);
  double hi = es.eigenvalues()(5);
  if (lo < 1e-10 * std::max(hi, 0.0))
    throw CoercivityError("ElasticityTensor: not coercive (eigenvalues " +
                          std::to_string(lo) + " .. " + std::to_string(hi) +
                          ")");
  Mat6 inv = es.eigenvectors() *
             es.eigenvalues().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
  return from_basis_matrix(inv);
}

double ElasticityTensor::coercivity_constant() const {
  Eigen::SelfAdjointEigenSolver<Mat6> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double ElasticityTensor::component(int i, int j, int k, int l) const {
  int a = index3(i, j);
  int b = index3(k, l);
  return m_(a, b) / (weight3(a) * weight3(b));
}

PlaneTensor PlaneTensor::from_basis_matrix(const Mat3& m) {
  check_symmetric(m, "PlaneTensor");
  return PlaneTensor(0.5 * (m + m.transpose()));
}

PlaneTensor PlaneTensor::from_components(
    const std::function<double(int, int, int, int)>& c) {
  Mat3 m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      m(a, b) = weight2(a) * weight2(b) *
                c(kPair2[a][0], kPair2[a][1], kPair2[b][0], kPair2[b][1]);
  return from_basis_matrix(m);
}

PlaneTensor PlaneTensor::inverse() const {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m_);
  double lo = es.eigenvalues()(0);
  double hi = es.eigenvalues()(2);
  if (lo < 1e-10 * std::max(hi, 0.0))
    throw CoercivityError("PlaneTensor: not coercive (eigenvalues " +
                          std::to_string(lo) + " .. " + std::to_string(hi) +
                          ")");
  Mat3 inv = es.eigenvectors() *
             es.eigenvalues().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
  return from_basis_matrix(inv);
}

double PlaneTensor::coercivity_constant() const {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double PlaneTensor::component(int a, int b, int g, int d) const {
  int p = index2(a, b);
  int q = index2(g, d);
  return m_(p, q) / (weight2(p) * weight2(q));
}

Mat6 random_symmetric_mat6(Rng& rng, double scale) {
  Mat6 m;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j)
      m(i, j) = m(j, i) = rng.uniform(-scale, scale);
  return m;
}

ElasticityTensor random_spd_tensor(Rng& rng, double eig_lo, double eig_hi) {
  // Orthogonalize a random matrix, then conjugate a positive diagonal.
  Mat6 a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::HouseholderQR<Mat6> qr(a);
  Mat6 q = qr.householderQ();
  Vec6 d;
  for (int i = 0; i < 6; ++i) d[i] = rng.uniform(eig_lo, eig_hi);
  return ElasticityTensor::from_basis_matrix(q * d.asDiagonal() *
                                             q.transpose());
}

Sym3 random_sym3(Rng& rng, double scale) {
  return Sym3::from_components(
      rng.uniform(-scale, scale), rng.uniform(-scale, scale),
      rng.uniform(-scale, scale), rng.uniform(-scale, scale),
      rng.uniform(-scale, scale), rng.uniform(-scale, scale));
}

Sym2 random_sym2(Rng& rng, double scale) {
  return Sym2::from_components(rng.uniform(-scale, scale),
                               rng.uniform(-scale, scale),
                               rng.uniform(-scale, scale));
}

}  // namespace pg
