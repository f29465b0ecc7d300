#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plategamma/tensor.hpp"

namespace pg {

// Scalar modulation p(x3) * q(x1, x2) with p polynomial and q bilinear.
// Keeps quadrature exactness analyzable; no expression interpreter.
struct ProfileScale {
  std::vector<double> x3_coeffs = {1.0};      // p(x3) = sum c_k x3^k
  std::array<double, 4> plane = {1, 0, 0, 0};  // q = c0 + c1 x1 + c2 x2 + c3 x1 x2

  double operator()(double x1, double x2, double x3) const {
    double p = 0, m = 1;
    for (double c : x3_coeffs) {
      p += c * m;
      m *= x3;
    }
    double q = plane[0] + plane[1] * x1 + plane[2] * x2 + plane[3] * x1 * x2;
    return p * q;
  }

  bool trivial() const {
    return x3_coeffs.size() == 1 && x3_coeffs[0] == 1.0 && plane[0] == 1.0 &&
           plane[1] == 0.0 && plane[2] == 0.0 && plane[3] == 0.0;
  }
};

// Pointwise stiffness on the rescaled body.  Immutable; evaluation is pure,
// so fields may be sampled concurrently.
struct MaterialField {
  std::function<ElasticityTensor(double, double, double)> at;
  std::vector<double> thickness_breaks = {-0.5, 0.5};
  std::string name = "material";

  ElasticityTensor operator()(double x1, double x2, double x3) const {
    return at(x1, x2, x3);
  }
};

struct Layer {
  double z_lo, z_hi;
  ElasticityTensor stiffness;
};

MaterialField make_homogeneous(const ElasticityTensor& c,
                               std::string name = "homogeneous");
MaterialField make_isotropic(double youngs, double poisson);
MaterialField make_scaled(const ElasticityTensor& base,
                          const ProfileScale& scale,
                          std::string name = "scaled");
// Convex blend (1-t) Ca + t Cb with t = scale(x) clamped to [0, 1].
MaterialField make_blend(const ElasticityTensor& ca, const ElasticityTensor& cb,
                         const ProfileScale& weight);
MaterialField make_laminate(const std::vector<Layer>& layers);

// Engineering-constant builders.
ElasticityTensor isotropic_stiffness(double youngs, double poisson);
ElasticityTensor orthotropic_stiffness(double e1, double e2, double e3,
                                       double nu23, double nu13, double nu12,
                                       double g23, double g13, double g12);
// 6x6 stiffness given in the classical engineering-shear convention
// (rows/cols ordered 11, 22, 33, 23, 13, 12).
ElasticityTensor stiffness_from_voigt(const Mat6& voigt);

// Seeded random fields for tests and the self-check suite.
// Fully anisotropic, coercive, polynomial in x3 of the given degree.
MaterialField random_material(Rng& rng, int x3_degree = 2,
                              bool even_in_x3 = false);
// Random stiffness with a transverse symmetry plane: no coupling between
// in-plane/normal components and the two transverse-shear components.
ElasticityTensor random_monoclinic_tensor(Rng& rng);

// Smallest coercivity constant over a sample grid; the preflight check for
// any configured material.
double sampled_coercivity(const MaterialField& mat, double l1, double l2,
                          int n1 = 5, int n2 = 5, int n3 = 9);

}  // namespace pg
