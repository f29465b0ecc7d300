#pragma once

#include <vector>

#include "plategamma/loads.hpp"
#include "plategamma/material.hpp"
#include "plategamma/quadrature.hpp"
#include "plategamma/tensor.hpp"

namespace pg {

// Transverse block c_ij = C_i3j3.  Positive definite whenever C is coercive.
struct ShearBlock {
  Mat3 m;
  Mat3 inv;

  Vec3 solve(const Vec3& rhs) const { return inv * rhs; }
};

ShearBlock shear_block(const ElasticityTensor& c);

// In-plane stiffness condensed over the transverse components:
// Cbar_abgd = C_abgd - C_abj3 cinv_ji C_i3gd.  Coercive with the same
// constant as C.
PlaneTensor plane_reduce(const ElasticityTensor& c);

// In-plane load tensor f_ab = C_abj3 cinv_ji F_i3.
Sym2 load_tensor(const ElasticityTensor& c, const ShearBlock& sb,
                 const Vec3& f_transverse);

// Thickness moments of a sampled plane tensor: integrals of x3^i Cbar.
struct Moments {
  PlaneTensor m0, m1, m2;
};

Moments thickness_moments(const std::vector<PlaneTensor>& cbar,
                          const Rule1D& rule);

// Condensed bending stiffness 12 (m2 - m1 m0^{-1} m1).
PlaneTensor hat_tensor(const Moments& mom);

// Inverse of the two-by-two block system coupling the zeroth and first
// stress moments.  The diagonal blocks are symmetric; the off-diagonal
// blocks are transposes of each other up to the factor 12 and are kept as
// plain basis matrices.
struct ComplianceBlocks {
  Mat3 nn, nm, mn, mm;

  Sym2 apply_nn(const Sym2& s) const { return Sym2::from_basis(nn * s.basis()); }
  Sym2 apply_nm(const Sym2& s) const { return Sym2::from_basis(nm * s.basis()); }
  Sym2 apply_mn(const Sym2& s) const { return Sym2::from_basis(mn * s.basis()); }
  Sym2 apply_mm(const Sym2& s) const { return Sym2::from_basis(mm * s.basis()); }
};

ComplianceBlocks compliance_blocks(const Moments& mom, const PlaneTensor& chat);

// Everything the in-plane limit problem needs at one point of the midplane,
// sampled on a through-thickness quadrature rule.
struct ReducedPoint {
  Rule1D rule;
  std::vector<ElasticityTensor> c;     // stiffness per node
  std::vector<ElasticityTensor> cinv;  // compliance per node
  std::vector<ShearBlock> shear;
  std::vector<PlaneTensor> cbar;
  std::vector<Vec3> f_transverse;  // (F13, F23, F33) per node
  std::vector<Sym3> f_full;        // generalized force per node
  std::vector<Sym2> f_plane;       // load tensor per node

  Moments mom;
  PlaneTensor chat;
  ComplianceBlocks blocks;

  Sym2 f_n, f_m;  // moments of the load tensor
  Sym2 cap_f_n, cap_f_m;  // moments of the in-plane block of F
  Sym2 z_n, z_m;  // load parts of the moment solution
  double c_density = 0.0;  // (1/2) int cinv F . F dx3

  static ReducedPoint build(std::vector<ElasticityTensor> c_samples,
                            std::vector<Sym3> f_samples, Rule1D rule);

  // The element of the affine-in-x3 stress class with resultants (sn, sm)
  // and transverse column fixed by F, at thickness node k.
  Sym3 affine_stress_at(const Sym2& sn, const Sym2& sm, int k) const;
};

// Through-thickness reconstruction of the minimizing correction for given
// resultants: Z solves the pointwise block system, Lambda = C Z - S.
struct PointReconstruction {
  Sym2 z_bar_n, z_bar_m;
  std::vector<Vec3> z;       // transverse profile vector per node
  std::vector<Sym3> big_z;   // Z = Zbar + z (.) e3
  std::vector<Sym3> cz;      // C Z
  std::vector<Sym3> lambda;  // C Z - S
};

PointReconstruction reconstruct(const ReducedPoint& rp, const Sym2& sn,
                                const Sym2& sm);

// Minimum of the cross-term functional over the orthogonal complement,
// in closed form, as a midplane density (integrated over the thickness).
double f_perp_density(const ReducedPoint& rp, const Sym2& sn, const Sym2& sm);

// Dual limit energy density: (1/2) int cinv S.S dx3 + f_perp density.
double dual_limit_density(const ReducedPoint& rp, const Sym2& sn,
                          const Sym2& sm);

// Cross-term functional density for an explicit correction field sampled at
// the thickness nodes: int [cinv S . Sc + (1/2) cinv Sc . Sc] dx3.
double cross_functional_density(const ReducedPoint& rp, const Sym2& sn,
                                const Sym2& sm, const std::vector<Sym3>& sc);

// In-plane quadrature set: points with weights.
struct InPlaneQuad {
  std::vector<double> x1, x2, w;
  int size() const { return static_cast<int>(x1.size()); }
};

// Reduced data sampled over a set of midplane points.  The per-point
// algebra is independent across points.
struct ReducedModel {
  InPlaneQuad grid;
  std::vector<ReducedPoint> pts;

  static ReducedModel build(const MaterialField& mat, const LoadSpec& loads,
                            const InPlaneQuad& grid, int x3_nodes);

  double f_perp(const std::vector<Sym2>& sn, const std::vector<Sym2>& sm) const;
  double dual_limit_energy(const std::vector<Sym2>& sn,
                           const std::vector<Sym2>& sm) const;
};

// Single-point model builder (midplane location given explicitly).
ReducedPoint reduce_at(const MaterialField& mat, const LoadSpec& loads,
                       double x1, double x2, int x3_nodes);

}  // namespace pg
