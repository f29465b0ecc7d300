#pragma once

#include <Eigen/Dense>

#include <functional>

#include "plategamma/common.hpp"

namespace pg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

// Symmetric second-order tensors are stored by their independent components
// and exposed in an orthonormal basis of Sym(3) (resp. Sym(2)) in which
// off-diagonal coordinates carry a sqrt(2) weight.  In that basis the
// Euclidean dot product equals the full tensor contraction A:B, a matrix
// acting on coordinates is a fourth-order tensor with minor symmetries, and
// matrix inversion/eigenvalues coincide with tensor inversion/eigenvalues.

class Sym3 {
 public:
  Sym3() : c_{0, 0, 0, 0, 0, 0} {}

  static Sym3 from_components(double a11, double a22, double a33, double a23,
                              double a13, double a12) {
    Sym3 a;
    a.c_[0] = a11;
    a.c_[1] = a22;
    a.c_[2] = a33;
    a.c_[3] = a23;
    a.c_[4] = a13;
    a.c_[5] = a12;
    return a;
  }

  static Sym3 from_matrix(const Mat3& m) {
    return from_components(m(0, 0), m(1, 1), m(2, 2),
                           0.5 * (m(1, 2) + m(2, 1)),
                           0.5 * (m(0, 2) + m(2, 0)),
                           0.5 * (m(0, 1) + m(1, 0)));
  }

  // Coordinates (a11, a22, a33, s2*a23, s2*a13, s2*a12).
  static Sym3 from_basis(const Vec6& v) {
    return from_components(v[0], v[1], v[2], v[3] / kSqrt2, v[4] / kSqrt2,
                           v[5] / kSqrt2);
  }

  static Sym3 identity() { return from_components(1, 1, 1, 0, 0, 0); }

  // Symmetrized dyad a (.) b = (a b^T + b a^T)/2.
  static Sym3 dyad(const Vec3& a, const Vec3& b) {
    return from_components(a[0] * b[0], a[1] * b[1], a[2] * b[2],
                           0.5 * (a[1] * b[2] + a[2] * b[1]),
                           0.5 * (a[0] * b[2] + a[2] * b[0]),
                           0.5 * (a[0] * b[1] + a[1] * b[0]));
  }

  double operator()(int i, int j) const {
    if (i == j) return c_[i];
    return c_[5 - (i + j - 1)];  // (1,2)->3, (0,2)->4, (0,1)->5
  }

  Vec6 basis() const {
    Vec6 v;
    v << c_[0], c_[1], c_[2], kSqrt2 * c_[3], kSqrt2 * c_[4], kSqrt2 * c_[5];
    return v;
  }

  Mat3 matrix() const {
    Mat3 m;
    m << c_[0], c_[5], c_[4], c_[5], c_[1], c_[3], c_[4], c_[3], c_[2];
    return m;
  }

  double dot(const Sym3& o) const { return basis().dot(o.basis()); }
  double norm() const { return basis().norm(); }

  // Transverse column (S13, S23, S33).
  Vec3 i3_vector() const { return Vec3(c_[4], c_[3], c_[2]); }

  Sym3 operator+(const Sym3& o) const {
    Sym3 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
  }
  Sym3 operator-(const Sym3& o) const {
    Sym3 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
  }
  Sym3 operator*(double s) const {
    Sym3 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = s * c_[k];
    return r;
  }
  Sym3& operator+=(const Sym3& o) {
    for (int k = 0; k < 6; ++k) c_[k] += o.c_[k];
    return *this;
  }

 private:
  double c_[6];  // 11, 22, 33, 23, 13, 12
};

inline Sym3 operator*(double s, const Sym3& a) { return a * s; }

class Sym2 {
 public:
  Sym2() : c_{0, 0, 0} {}

  static Sym2 from_components(double a11, double a22, double a12) {
    Sym2 a;
    a.c_[0] = a11;
    a.c_[1] = a22;
    a.c_[2] = a12;
    return a;
  }

  // Coordinates (a11, a22, s2*a12).
  static Sym2 from_basis(const Vec3& v) {
    return from_components(v[0], v[1], v[2] / kSqrt2);
  }

  static Sym2 identity() { return from_components(1, 1, 0); }

  static Sym2 dyad(const Vec2& a, const Vec2& b) {
    return from_components(a[0] * b[0], a[1] * b[1],
                           0.5 * (a[0] * b[1] + a[1] * b[0]));
  }

  double operator()(int i, int j) const { return (i == j) ? c_[i] : c_[2]; }

  Vec3 basis() const { return Vec3(c_[0], c_[1], kSqrt2 * c_[2]); }

  Mat2 matrix() const {
    Mat2 m;
    m << c_[0], c_[2], c_[2], c_[1];
    return m;
  }

  double dot(const Sym2& o) const { return basis().dot(o.basis()); }
  double norm() const { return basis().norm(); }

  Sym2 operator+(const Sym2& o) const {
    return from_components(c_[0] + o.c_[0], c_[1] + o.c_[1], c_[2] + o.c_[2]);
  }
  Sym2 operator-(const Sym2& o) const {
    return from_components(c_[0] - o.c_[0], c_[1] - o.c_[1], c_[2] - o.c_[2]);
  }
  Sym2 operator*(double s) const {
    return from_components(s * c_[0], s * c_[1], s * c_[2]);
  }
  Sym2& operator+=(const Sym2& o) {
    for (int k = 0; k < 3; ++k) c_[k] += o.c_[k];
    return *this;
  }

 private:
  double c_[3];  // 11, 22, 12
};

inline Sym2 operator*(double s, const Sym2& a) { return a * s; }

// In-plane block of a Sym3.
inline Sym2 plane_part(const Sym3& a) {
  return Sym2::from_components(a(0, 0), a(1, 1), a(0, 1));
}

// Sym3 with the given in-plane block and zero transverse column.
inline Sym3 embed_plane(const Sym2& a) {
  return Sym3::from_components(a(0, 0), a(1, 1), 0, 0, 0, a(0, 1));
}

// Sym3 with in-plane block `a` and transverse column (t1, t2, t3), i.e.
// S13 = t1, S23 = t2, S33 = t3.
inline Sym3 assemble_sym3(const Sym2& a, const Vec3& t) {
  return Sym3::from_components(a(0, 0), a(1, 1), t[2], t[1], t[0], a(0, 1));
}

// b (.) e3.
inline Sym3 odot_e3(const Vec3& b) {
  return Sym3::from_components(0, 0, b[2], 0.5 * b[1], 0.5 * b[0], 0);
}

// Fourth-order tensor on Sym(3) with minor and major symmetries, held as a
// symmetric 6x6 matrix in the orthonormal basis.  Required to be coercive
// wherever it models a stiffness; `inverse` enforces that.
class ElasticityTensor {
 public:
  ElasticityTensor() : m_(Mat6::Zero()) {}

  static ElasticityTensor from_basis_matrix(const Mat6& m);

  // Builds from the component function C(i,j,k,l), indices in {0,1,2}.
  // The function must carry the minor and major symmetries.
  static ElasticityTensor from_components(
      const std::function<double(int, int, int, int)>& c);

  static ElasticityTensor isotropic(double lambda, double mu);

  static ElasticityTensor identity() {
    return from_basis_matrix(Mat6::Identity());
  }

  Sym3 apply(const Sym3& e) const { return Sym3::from_basis(m_ * e.basis()); }

  // Quadratic form C e : e.
  double energy(const Sym3& e) const {
    Vec6 v = e.basis();
    return v.dot(m_ * v);
  }

  // Tensor inverse.  Throws CoercivityError when the smallest eigenvalue is
  // below 1e-10 times the largest.
  ElasticityTensor inverse() const;

  // Smallest eigenvalue of the representation; equals the best constant c
  // with C A:A >= c |A|^2.  May be <= 0, callers decide whether to reject.
  double coercivity_constant() const;

  double component(int i, int j, int k, int l) const;

  const Mat6& basis_matrix() const { return m_; }

  ElasticityTensor operator+(const ElasticityTensor& o) const {
    return from_basis_matrix(m_ + o.m_);
  }
  ElasticityTensor operator*(double s) const {
    return from_basis_matrix(s * m_);
  }

 private:
  Mat6 m_;
};

inline ElasticityTensor operator*(double s, const ElasticityTensor& c) {
  return c * s;
}

// Fourth-order tensor on Sym(2), symmetric 3x3 matrix in the orthonormal
// basis (11, 22, 12).
class PlaneTensor {
 public:
  PlaneTensor() : m_(Mat3::Zero()) {}

  static PlaneTensor from_basis_matrix(const Mat3& m);

  static PlaneTensor from_components(
      const std::function<double(int, int, int, int)>& c);

  static PlaneTensor identity() { return from_basis_matrix(Mat3::Identity()); }

  Sym2 apply(const Sym2& e) const { return Sym2::from_basis(m_ * e.basis()); }

  double energy(const Sym2& e) const {
    Vec3 v = e.basis();
    return v.dot(m_ * v);
  }

  PlaneTensor inverse() const;

  double coercivity_constant() const;

  double component(int a, int b, int g, int d) const;

  const Mat3& basis_matrix() const { return m_; }

  double norm() const { return m_.norm(); }

  PlaneTensor operator+(const PlaneTensor& o) const {
    return from_basis_matrix(m_ + o.m_);
  }
  PlaneTensor operator-(const PlaneTensor& o) const {
    return from_basis_matrix(m_ - o.m_);
  }
  PlaneTensor operator*(double s) const { return from_basis_matrix(s * m_); }

  // Composition (this o other) as linear maps on Sym(2).
  PlaneTensor compose(const PlaneTensor& o) const {
    return PlaneTensor(m_ * o.m_);
  }

 private:
  explicit PlaneTensor(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

inline PlaneTensor operator*(double s, const PlaneTensor& c) { return c * s; }

// Seeded SPD tensors for tests and the self-check suite: Q diag(d) Q^T with
// a random orthogonal Q and eigenvalues d in [eig_lo, eig_hi].
ElasticityTensor random_spd_tensor(Rng& rng, double eig_lo = 0.5,
                                   double eig_hi = 4.0);
Mat6 random_symmetric_mat6(Rng& rng, double scale = 1.0);
Sym3 random_sym3(Rng& rng, double scale = 1.0);
Sym2 random_sym2(Rng& rng, double scale = 1.0);

}  // namespace pg
