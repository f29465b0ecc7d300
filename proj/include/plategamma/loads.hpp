#pragma once

#include <Eigen/Dense>

#include <array>

#include "plategamma/material.hpp"
#include "plategamma/tensor.hpp"

namespace pg {

// Polynomial in (x1, x2); coefficient c(i, j) multiplies x1^i x2^j.
class Poly2 {
 public:
  Poly2() = default;
  explicit Poly2(Eigen::MatrixXd coeffs) : c_(std::move(coeffs)) {}
  static Poly2 constant(double v) {
    Eigen::MatrixXd c(1, 1);
    c(0, 0) = v;
    return Poly2(c);
  }

  bool zero() const { return c_.size() == 0; }

  double operator()(double x1, double x2) const {
    if (zero()) return 0.0;
    double s = 0, p1 = 1;
    for (int i = 0; i < c_.rows(); ++i) {
      double p2 = 1;
      for (int j = 0; j < c_.cols(); ++j) {
        s += c_(i, j) * p1 * p2;
        p2 *= x2;
      }
      p1 *= x1;
    }
    return s;
  }

  Poly2 dx1() const {
    if (zero() || c_.rows() < 2) return Poly2();
    Eigen::MatrixXd d(c_.rows() - 1, c_.cols());
    for (int i = 1; i < c_.rows(); ++i) d.row(i - 1) = i * c_.row(i);
    return Poly2(d);
  }

  Poly2 dx2() const {
    if (zero() || c_.cols() < 2) return Poly2();
    Eigen::MatrixXd d(c_.rows(), c_.cols() - 1);
    for (int j = 1; j < c_.cols(); ++j) d.col(j - 1) = j * c_.col(j);
    return Poly2(d);
  }

  const Eigen::MatrixXd& coeffs() const { return c_; }

 private:
  Eigen::MatrixXd c_;
};

// Polynomial in x3.
class Poly1 {
 public:
  Poly1() = default;
  explicit Poly1(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  static Poly1 constant(double v) { return Poly1({v}); }

  bool zero() const { return c_.empty(); }

  double operator()(double x3) const {
    double s = 0, m = 1;
    for (double c : c_) {
      s += c * m;
      m *= x3;
    }
    return s;
  }

  const std::vector<double>& coeffs() const { return c_; }

 private:
  std::vector<double> c_;
};

// Separable scalar field plane(x1,x2) * thick(x3).
struct ScalarLoad {
  Poly2 plane;
  Poly1 thick;

  bool zero() const { return plane.zero() || thick.zero(); }
  double operator()(double x1, double x2, double x3) const {
    if (zero()) return 0.0;
    return plane(x1, x2) * thick(x3);
  }

  static ScalarLoad constant(double v) {
    return {Poly2::constant(v), Poly1::constant(1.0)};
  }
};

// Boundary displacement in Kirchhoff-Love form: the transverse strain
// components vanish identically, by construction.
struct KLDisplacement {
  Poly2 eta1, eta2, eta3;

  bool zero() const { return eta1.zero() && eta2.zero() && eta3.zero(); }

  Vec3 value(double x1, double x2, double x3) const {
    double d1 = eta3.dx1()(x1, x2);
    double d2 = eta3.dx2()(x1, x2);
    return Vec3(eta1(x1, x2) - x3 * d1, eta2(x1, x2) - x3 * d2, eta3(x1, x2));
  }

  // In-plane strain block E(eta) - x3 * Hess(eta3).
  Sym2 strain(double x1, double x2, double x3) const {
    double e11 = eta1.dx1()(x1, x2) - x3 * eta3.dx1().dx1()(x1, x2);
    double e22 = eta2.dx2()(x1, x2) - x3 * eta3.dx2().dx2()(x1, x2);
    double e12 = 0.5 * (eta1.dx2()(x1, x2) + eta2.dx1()(x1, x2)) -
                 x3 * eta3.dx1().dx2()(x1, x2);
    return Sym2::from_components(e11, e22, e12);
  }
};

// Load data on the rescaled body: volume force b, face tractions on the top
// and bottom faces, a traction on the lateral Neumann strip, a generalized
// force tensor H, and the boundary displacement g.
struct LoadSpec {
  std::array<ScalarLoad, 3> b;
  std::array<Poly2, 3> f_plus;   // on x3 = +1/2
  std::array<Poly2, 3> f_minus;  // on x3 = -1/2
  std::array<ScalarLoad, 3> f_lat;
  std::array<ScalarLoad, 6> h;  // components 11, 22, 33, 23, 13, 12
  KLDisplacement g;

  bool has_g() const { return !g.zero(); }

  Vec3 b_at(double x1, double x2, double x3) const {
    return Vec3(b[0](x1, x2, x3), b[1](x1, x2, x3), b[2](x1, x2, x3));
  }

  Vec3 f_plus_at(double x1, double x2) const {
    return Vec3(f_plus[0](x1, x2), f_plus[1](x1, x2), f_plus[2](x1, x2));
  }

  Vec3 f_minus_at(double x1, double x2) const {
    return Vec3(f_minus[0](x1, x2), f_minus[1](x1, x2), f_minus[2](x1, x2));
  }

  Vec3 f_lat_at(double x1, double x2, double x3) const {
    return Vec3(f_lat[0](x1, x2, x3), f_lat[1](x1, x2, x3),
                f_lat[2](x1, x2, x3));
  }

  Sym3 h_at(double x1, double x2, double x3) const {
    return Sym3::from_components(h[0](x1, x2, x3), h[1](x1, x2, x3),
                                 h[2](x1, x2, x3), h[3](x1, x2, x3),
                                 h[4](x1, x2, x3), h[5](x1, x2, x3));
  }

  Sym3 eg_at(double x1, double x2, double x3) const {
    if (!has_g()) return Sym3();
    return embed_plane(g.strain(x1, x2, x3));
  }

  // Generalized force F = H + C E(g).
  Sym3 f_at(double x1, double x2, double x3, const ElasticityTensor& c) const {
    Sym3 f = h_at(x1, x2, x3);
    if (has_g()) f += c.apply(eg_at(x1, x2, x3));
    return f;
  }
};

}  // namespace pg
