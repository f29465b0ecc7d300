#include "plategamma/material.hpp"

#include <algorithm>
#include <cmath>

namespace pg {

MaterialField make_homogeneous(const ElasticityTensor& c, std::string name) {
  MaterialField m;
  m.at = [c](double, double, double) { return c; };
  m.name = std::move(name);
  return m;
}

MaterialField make_isotropic(double youngs, double poisson) {
  return make_homogeneous(isotropic_stiffness(youngs, poisson), "isotropic");
}

MaterialField make_scaled(const ElasticityTensor& base,
                          const ProfileScale& scale, std::string name) {
  MaterialField m;
  m.at = [base, scale](double x1, double x2, double x3) {
    return base * scale(x1, x2, x3);
  };
  m.name = std::move(name);
  return m;
}

MaterialField make_blend(const ElasticityTensor& ca, const ElasticityTensor& cb,
                         const ProfileScale& weight) {
  MaterialField m;
  m.at = [ca, cb, weight](double x1, double x2, double x3) {
    double t = std::clamp(weight(x1, x2, x3), 0.0, 1.0);
    return ca * (1.0 - t) + cb * t;
  };
  m.name = "blend";
  return m;
}

MaterialField make_laminate(const std::vector<Layer>& layers) {
  if (layers.empty()) throw Error("laminate: no layers");
  MaterialField m;
  std::vector<double> breaks;
  breaks.push_back(layers.front().z_lo);
  for (const Layer& l : layers) {
    if (std::abs(l.z_lo - breaks.back()) > 1e-12)
      throw Error("laminate: layers must tile the thickness contiguously");
    breaks.push_back(l.z_hi);
  }
  if (std::abs(breaks.front() + 0.5) > 1e-12 ||
      std::abs(breaks.back() - 0.5) > 1e-12)
    throw Error("laminate: layers must cover (-1/2, 1/2)");
  m.thickness_breaks = breaks;
  m.at = [layers](double, double, double x3) {
    for (const Layer& l : layers)
      if (x3 <= l.z_hi || &l == &layers.back()) return l.stiffness;
    return layers.back().stiffness;
  };
  m.name = "laminate";
  return m;
}

ElasticityTensor isotropic_stiffness(double youngs, double poisson) {
  double lambda =
      youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  double mu = youngs / (2.0 * (1.0 + poisson));
  return ElasticityTensor::isotropic(lambda, mu);
}

ElasticityTensor stiffness_from_voigt(const Mat6& voigt) {
  Vec6 w;
  w << 1, 1, 1, kSqrt2, kSqrt2, kSqrt2;
  Mat6 m = w.asDiagonal() * voigt * w.asDiagonal();
  return ElasticityTensor::from_basis_matrix(m);
}

ElasticityTensor orthotropic_stiffness(double e1, double e2, double e3,
                                       double nu23, double nu13, double nu12,
                                       double g23, double g13, double g12) {
  Mat6 s = Mat6::Zero();
  s(0, 0) = 1.0 / e1;
  s(1, 1) = 1.0 / e2;
  s(2, 2) = 1.0 / e3;
  s(0, 1) = s(1, 0) = -nu12 / e1;
  s(0, 2) = s(2, 0) = -nu13 / e1;
  s(1, 2) = s(2, 1) = -nu23 / e2;
  s(3, 3) = 1.0 / g23;
  s(4, 4) = 1.0 / g13;
  s(5, 5) = 1.0 / g12;
  Mat6 voigt = s.inverse();
  return stiffness_from_voigt(voigt);
}

MaterialField random_material(Rng& rng, int x3_degree, bool even_in_x3) {
  ElasticityTensor base = random_spd_tensor(rng, 1.0, 4.0);
  std::vector<Mat6> pert;
  double pert_norm = 0;
  for (int k = 1; k <= x3_degree; ++k) {
    if (even_in_x3 && (k % 2 == 1)) {
      pert.push_back(Mat6::Zero());
      continue;
    }
    Mat6 p = random_symmetric_mat6(rng, 0.3);
    pert.push_back(p);
    pert_norm += p.norm();
  }
  // Shift keeps the field coercive for |x3| <= 1/2.
  Mat6 m0 = base.basis_matrix() + pert_norm * Mat6::Identity();
  MaterialField m;
  m.at = [m0, pert](double, double, double x3) {
    Mat6 acc = m0;
    double w = 1;
    for (const Mat6& p : pert) {
      w *= x3;
      acc += w * p;
    }
    return ElasticityTensor::from_basis_matrix(acc);
  };
  m.name = even_in_x3 ? "random-even" : "random";
  return m;
}

ElasticityTensor random_monoclinic_tensor(Rng& rng) {
  // Basis indices {0,1,2,5} (in-plane + normal) decouple from {3,4}
  // (transverse shears).
  Mat6 m = Mat6::Zero();
  Eigen::Matrix4d a4;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a4(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::Matrix4d spd4 =
      a4 * a4.transpose() + 0.5 * Eigen::Matrix4d::Identity();
  Mat2 a2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a2(i, j) = rng.uniform(-1.0, 1.0);
  Mat2 spd2 = a2 * a2.transpose() + 0.5 * Mat2::Identity();
  const int blk[4] = {0, 1, 2, 5};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(blk[i], blk[j]) = spd4(i, j);
  const int shr[2] = {3, 4};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(shr[i], shr[j]) = spd2(i, j);
  return ElasticityTensor::from_basis_matrix(m);
}

double sampled_coercivity(const MaterialField& mat, double l1, double l2,
                          int n1, int n2, int n3) {
  double worst = std::numeric_limits<double>::max();
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k) {
        double x1 = l1 * (i + 0.5) / n1;
        double x2 = l2 * (j + 0.5) / n2;
        double x3 = -0.5 + (k + 0.5) / n3;
        worst = std::min(worst, mat(x1, x2, x3).coercivity_constant());
      }
  return worst;
}

}  // namespace pg
