#pragma once

#include <Eigen/Sparse>

#include <functional>

#include "plategamma/loads.hpp"
#include "plategamma/mesh.hpp"
#include "plategamma/reduction.hpp"
#include "plategamma/stressfield.hpp"

namespace pg {

// Membrane unknowns: two displacement components per node (bilinear).
// Bending unknowns: value, both first derivatives and the mixed second
// derivative of the deflection per node (bicubic Hermite rectangles), so
// the deflection space is C1-conforming on the structured grid.

// Raw shape data of the bending element at one local point.
struct BendBasis {
  double val[16];
  double d1[16], d2[16];
  double d11[16], d22[16], d12[16];
};

// Evaluate the 16 bending shape functions on the reference cell, local
// coordinates (s, t) in [0,1]^2, physical cell size (hx, hy).  Ordering:
// corner-major, per corner (w, w_1, w_2, w_12).
BendBasis bend_basis(double s, double t, double hx, double hy);

// The four bilinear shape functions and their gradients.
struct MembraneBasis {
  double val[4];
  double d1[4], d2[4];
};
MembraneBasis membrane_basis(double s, double t, double hx, double hy);

// In-plane quadrature for the plate mesh: element-major tensor Gauss rule,
// n x n points per element.
InPlaneQuad plate_quadrature(const PlateMesh& mesh, int n = 4);

// Per-quadrature-point data consumed by the assembler: membrane, coupling
// and bending stiffness (basis matrices of the thickness moments) and the
// in-plane moments of the effective load tensor F - f.
struct PointStiffness {
  Mat3 a, b, d;
  Vec3 rn = Vec3::Zero(), rm = Vec3::Zero();
};

using StiffnessCallback = std::function<PointStiffness(int qp)>;

struct LimitSystem {
  Eigen::SparseMatrix<double> k;
  Eigen::VectorXd rhs;
  std::vector<int> reduced;  // full dof -> reduced index, -1 when fixed
  int n_full = 0, n_reduced = 0;
  int n_mem_full = 0;

  int mem_dof(const PlateMesh& mesh, int node, int comp) const {
    (void)mesh;
    return node * 2 + comp;
  }
  int bend_dof(const PlateMesh& mesh, int node, int comp) const {
    (void)mesh;
    return n_mem_full + node * 4 + comp;
  }
};

// Assemble the limit plate system.  `stiffness` supplies the constitutive
// data per quadrature point of plate_quadrature(mesh, qpn); `loads` (when
// given) contributes the work of volume and surface forces, integrated
// through the thickness with `rule`.
LimitSystem assemble_limit_system(const PlateMesh& mesh,
                                  const StiffnessCallback& stiffness,
                                  const LoadSpec* loads, const Rule1D* rule,
                                  int qpn = 4);

struct PlateSolveOptions {
  int qpn = 4;
  int x3_nodes = 8;
  double cg_tol = 1e-11;
  int direct_dof_limit = 200000;
};

// The solved limit problem together with everything needed to evaluate the
// limit fields anywhere on the body.
class KLSolution {
 public:
  PlateMesh mesh;
  Eigen::VectorXd mem;      // full membrane vector, 2 per node
  Eigen::VectorXd bend;     // full bending vector, 4 per node
  double solve_residual = 0.0;

  Vec2 displacement(double x1, double x2) const;
  double deflection(double x1, double x2) const;
  Vec2 deflection_gradient(double x1, double x2) const;
  Sym2 membrane_strain(double x1, double x2) const;
  Sym2 curvature(double x1, double x2) const;

  // In-plane strain block of the limit displacement at depth x3.
  Sym2 kl_strain(double x1, double x2, double x3) const {
    return membrane_strain(x1, x2) + (-x3) * curvature(x1, x2);
  }
};

KLSolution solve_limit(const PlateMesh& mesh, const MaterialField& mat,
                       const LoadSpec& loads,
                       const PlateSolveOptions& opts = {});

// Pointwise limit stress and transverse profile.  The stress satisfies
// T_i3 = F_i3 identically; sigma = T + C E(g).
struct LimitStressSample {
  Sym3 t;        // dual minimizer
  Sym3 sigma;    // physical limit stress
  Vec3 psi;      // transverse profile (psi_1, psi_2, psi_3)
  Sym3 profile;  // [ (E w)_ab, psi ] matrix, the limit of the scaled strains
};

LimitStressSample limit_stress_at(const KLSolution& sol,
                                  const MaterialField& mat,
                                  const LoadSpec& loads, double x1, double x2,
                                  double x3);

// Limit stress field sampled on a quadrature grid.
StressField limit_stress_field(const KLSolution& sol, const MaterialField& mat,
                               const LoadSpec& loads, const QuadGrid& grid,
                               StressField* profile = nullptr,
                               StressField* t_field = nullptr);

// Dual limit energy of the solved problem: (1/2) int cinv T.T over the body
// plus the load constant, evaluated through the closed-form density on the
// plate quadrature.
double limit_dual_energy(const KLSolution& sol, const ReducedModel& model);

// Resultants of the solved problem on the model grid.
void limit_resultants(const KLSolution& sol, const ReducedModel& model,
                      std::vector<Sym2>* n, std::vector<Sym2>* m);

// Residual of the weak in-plane equilibrium, re-evaluated from the solved
// fields against every free test function; returns the max abs entry
// relative to the load scale.
double equilibrium_residual(const KLSolution& sol, const ReducedModel& model,
                            const LoadSpec& loads, int qpn = 4);

// Max relative violation of the orthogonality between the condensed limit
// stress and `n_probes` random discrete test fields orthogonal to every
// Kirchhoff-Love strain (built by projecting random affine-in-x3 fields).
double structure_orthogonality_probe(const KLSolution& sol,
                                     const MaterialField& mat,
                                     const LoadSpec& loads, int n_probes,
                                     Rng& rng, int qpn = 4, int x3_nodes = 8);

}  // namespace pg
