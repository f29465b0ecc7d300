#pragma once

#include <Eigen/Sparse>

#include <functional>

#include "plategamma/loads.hpp"
#include "plategamma/material.hpp"
#include "plategamma/mesh.hpp"
#include "plategamma/stressfield.hpp"

namespace pg {

// Row scaling of the strain coordinates under the thin-body rescaling:
// in-plane entries unscaled, transverse shears 1/eps, normal 1/eps^2.
// Throws for nonpositive eps.
Vec6 scaled_strain_rows(double eps);

// Scaled strain of a displacement with the given gradient.
Sym3 scaled_strain(double eps, const Mat3& grad);

// Problem data as plain evaluators on the rescaled body, decoupled from the
// config layer so tests can transform them.
struct Evaluators3D {
  std::function<ElasticityTensor(double, double, double)> stiffness;
  std::function<Sym3(double, double, double)> gen_force;     // F = H + C E(g)
  std::function<Vec3(double, double, double)> volume_force;  // b
  std::function<Vec3(double, double)> traction_top;          // on x3 = z1
  std::function<Vec3(double, double)> traction_bottom;       // on x3 = z0
  std::function<Vec3(double, double, double)> traction_lateral;
  std::function<Sym3(double, double, double)> g_strain;      // E(g)
};

Evaluators3D make_evaluators(const MaterialField& mat, const LoadSpec& loads);

struct Solve3DOptions {
  double eps = 1.0;
  // Element-internal bubble strains, condensed per element.  Needed to keep
  // the coarse through-thickness meshes from locking in bending.
  bool enhanced = true;
  enum class Method { kAuto, kCG, kDirect };
  Method method = Method::kCG;
  double cg_tol = 1e-13;
  int cg_max_iter = 0;  // 0: cap grows like 1/eps
  int direct_dof_limit = 200000;
  // Optional boundary-value override for patch tests: called on boundary
  // nodes; returning true pins the node at *value.
  std::function<bool(double, double, double, Vec3*)> dirichlet_override;
};

// Quadrature grid matching the assembly: 2x2 per element in plane, two
// Gauss levels per element layer through the thickness.
QuadGrid brick_quadrature(const BrickMesh3D& mesh);

struct PrimalSolution3D {
  BrickMesh3D mesh;
  double eps = 1.0;
  Eigen::VectorXd u;          // nodal displacements, 3 per node
  StressField stress;         // T = C E^eps(u) including bubble strains
  StressField scaled_strain;  // E^eps(u)
  double primal_energy = 0;   // (1/2) a(u,u) - l(u)
  double dual_energy = 0;     // (1/2) int cinv T . T
  double load_work = 0;       // l(u)
  double duality_gap_rel = 0;
  int iterations = 0;
  double solve_residual = 0;
};

PrimalSolution3D solve_primal(const BrickMesh3D& mesh, const Evaluators3D& ev,
                              const Solve3DOptions& opts);

// Equilibrium residual of a stress field, re-evaluated by quadrature against
// every nodal test function: r_i = int (T - F) . E^eps phi_i - work(phi_i).
// Entries on constrained dofs are zero.  `scale` (optional) accumulates the
// absolute contributions per dof.
Eigen::VectorXd equilibrium_residual_vector(const BrickMesh3D& mesh,
                                            const Evaluators3D& ev,
                                            const StressField& t, double eps,
                                            Eigen::VectorXd* scale = nullptr);

// Work of the displacement loads against a nodal field: int b.v + tractions.
double displacement_work(const BrickMesh3D& mesh, const Evaluators3D& ev,
                         const Eigen::VectorXd& v);

// Nodal vector of the displacement-load work: entry i is the work against
// the i-th nodal basis function.
Eigen::VectorXd displacement_work_vector(const BrickMesh3D& mesh,
                                         const Evaluators3D& ev);

// Gram matrix of the scaled strains (unit stiffness), constrained dofs
// eliminated to zero rows/cols; vt G v = |E^eps v|_L2^2.
Eigen::SparseMatrix<double> scaled_strain_gram(const BrickMesh3D& mesh,
                                               double eps);

// Nodal interpolant of the limit-kinematics extension of midplane fields:
// v_a = eta_a - x3 d_a(eta3), v_3 = eta3.
Eigen::VectorXd kl_interpolant(
    const BrickMesh3D& mesh, const std::function<Vec2(double, double)>& eta,
    const std::function<double(double, double)>& eta3,
    const std::function<Vec2(double, double)>& grad_eta3);

}  // namespace pg
