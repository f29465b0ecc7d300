#include "plategamma/plate2d.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include <cmath>

namespace pg {

namespace {

// Cubic Hermite pair on [0,1], scaled for a physical cell of length h.
struct Hermite {
  double v0, s0, v1, s1;  // value-at-0, slope-at-0, value-at-1, slope-at-1
};

Hermite hermite_val(double s, double h) {
  return {1 - 3 * s * s + 2 * s * s * s, h * (s - 2 * s * s + s * s * s),
          3 * s * s - 2 * s * s * s, h * (s * s * s - s * s)};
}

Hermite hermite_d1(double s, double h) {
  return {(-6 * s + 6 * s * s) / h, 1 - 4 * s + 3 * s * s,
          (6 * s - 6 * s * s) / h, 3 * s * s - 2 * s};
}

Hermite hermite_d2(double s, double h) {
  return {(-6 + 12 * s) / (h * h), (-4 + 6 * s) / h, (6 - 12 * s) / (h * h),
          (6 * s - 2) / h};
}

// Local corner coordinates in the element order (0,0), (1,0), (1,1), (0,1).
constexpr int kCornerX[4] = {0, 1, 1, 0};
constexpr int kCornerY[4] = {0, 0, 1, 1};

}  // namespace

BendBasis bend_basis(double s, double t, double hx, double hy) {
  Hermite fx = hermite_val(s, hx), fx1 = hermite_d1(s, hx),
          fx2 = hermite_d2(s, hx);
  Hermite gy = hermite_val(t, hy), gy1 = hermite_d1(t, hy),
          gy2 = hermite_d2(t, hy);
  auto pick = [](const Hermite& h, int end, int kind) {
    // kind 0: value function, kind 1: slope function of that end.
    if (end == 0) return kind == 0 ? h.v0 : h.s0;
    return kind == 0 ? h.v1 : h.s1;
  };
  BendBasis b;
  for (int a = 0; a < 4; ++a) {
    int ex = kCornerX[a], ey = kCornerY[a];
    for (int dx = 0; dx < 2; ++dx)
      for (int dy = 0; dy < 2; ++dy) {
        // dof (dx, dy): dx differentiations in x, dy in y at the corner.
        int idx = a * 4 + dx + 2 * dy;
        b.val[idx] = pick(fx, ex, dx) * pick(gy, ey, dy);
        b.d1[idx] = pick(fx1, ex, dx) * pick(gy, ey, dy);
        b.d2[idx] = pick(fx, ex, dx) * pick(gy1, ey, dy);
        b.d11[idx] = pick(fx2, ex, dx) * pick(gy, ey, dy);
        b.d22[idx] = pick(fx, ex, dx) * pick(gy2, ey, dy);
        b.d12[idx] = pick(fx1, ex, dx) * pick(gy1, ey, dy);
      }
  }
  return b;
}

MembraneBasis membrane_basis(double s, double t, double hx, double hy) {
  MembraneBasis m;
  for (int a = 0; a < 4; ++a) {
    double nx = kCornerX[a] ? s : 1 - s;
    double ny = kCornerY[a] ? t : 1 - t;
    double dnx = kCornerX[a] ? 1.0 : -1.0;
    double dny = kCornerY[a] ? 1.0 : -1.0;
    m.val[a] = nx * ny;
    m.d1[a] = dnx * ny / hx;
    m.d2[a] = nx * dny / hy;
  }
  return m;
}

InPlaneQuad plate_quadrature(const PlateMesh& mesh, int n) {
  Rule1D g = gauss_legendre(n);
  InPlaneQuad q;
  q.x1.reserve(mesh.n_elems() * n * n);
  q.x2.reserve(mesh.n_elems() * n * n);
  q.w.reserve(mesh.n_elems() * n * n);
  double hx = mesh.hx(), hy = mesh.hy();
  for (int ej = 0; ej < mesh.ny; ++ej)
    for (int ei = 0; ei < mesh.nx; ++ei)
      for (int qj = 0; qj < n; ++qj)
        for (int qi = 0; qi < n; ++qi) {
          double s = 0.5 * (1 + g.x[qi]);
          double t = 0.5 * (1 + g.x[qj]);
          q.x1.push_back(mesh.node_x1(ei) + s * hx);
          q.x2.push_back(mesh.node_x2(ej) + t * hy);
          q.w.push_back(0.25 * g.w[qi] * g.w[qj] * hx * hy);
        }
  return q;
}

namespace {

// Strain matrices at one quadrature point: membrane 3x8, curvature 3x16.
void strain_matrices(const MembraneBasis& mb, const BendBasis& bb,
                     Eigen::Matrix<double, 3, 8>* bm,
                     Eigen::Matrix<double, 3, 16>* bbnd) {
  bm->setZero();
  for (int a = 0; a < 4; ++a) {
    (*bm)(0, 2 * a + 0) = mb.d1[a];
    (*bm)(1, 2 * a + 1) = mb.d2[a];
    (*bm)(2, 2 * a + 0) = mb.d2[a] / kSqrt2;
    (*bm)(2, 2 * a + 1) = mb.d1[a] / kSqrt2;
  }
  for (int i = 0; i < 16; ++i) {
    (*bbnd)(0, i) = bb.d11[i];
    (*bbnd)(1, i) = bb.d22[i];
    (*bbnd)(2, i) = kSqrt2 * bb.d12[i];
  }
}

struct DofMaps {
  std::vector<int> reduced;  // full -> reduced, -1 fixed
  int n_full, n_reduced, n_mem_full;
};

DofMaps build_dof_maps(const PlateMesh& mesh) {
  DofMaps dm;
  int nn = mesh.n_nodes();
  dm.n_mem_full = 2 * nn;
  dm.n_full = 6 * nn;
  dm.reduced.assign(dm.n_full, -1);
  int next = 0;
  for (int j = 0; j <= mesh.ny; ++j)
    for (int i = 0; i <= mesh.nx; ++i) {
      int nd = mesh.node(i, j);
      bool fixed = mesh.node_clamped(i, j);
      for (int c = 0; c < 2; ++c)
        if (!fixed) dm.reduced[2 * nd + c] = next++;
      for (int c = 0; c < 4; ++c)
        if (!fixed) dm.reduced[dm.n_mem_full + 4 * nd + c] = next++;
    }
  dm.n_reduced = next;
  return dm;
}

// Thickness moments of the separable load components at one midplane point.
struct WorkData {
  Vec3 b0 = Vec3::Zero(), b1 = Vec3::Zero();
  Vec3 fp = Vec3::Zero(), fm = Vec3::Zero();
};

WorkData work_data(const LoadSpec& loads, const Rule1D& rule, double x1,
                   double x2) {
  WorkData w;
  for (int k = 0; k < rule.size(); ++k) {
    Vec3 b = loads.b_at(x1, x2, rule.x[k]);
    w.b0 += rule.w[k] * b;
    w.b1 += rule.w[k] * rule.x[k] * b;
  }
  w.fp = loads.f_plus_at(x1, x2);
  w.fm = loads.f_minus_at(x1, x2);
  return w;
}

}  // namespace

LimitSystem assemble_limit_system(const PlateMesh& mesh,
                                  const StiffnessCallback& stiffness,
                                  const LoadSpec* loads, const Rule1D* rule,
                                  int qpn) {
  DofMaps dm = build_dof_maps(mesh);
  LimitSystem sys;
  sys.reduced = dm.reduced;
  sys.n_full = dm.n_full;
  sys.n_reduced = dm.n_reduced;
  sys.n_mem_full = dm.n_mem_full;
  sys.rhs = Eigen::VectorXd::Zero(dm.n_reduced);

  Rule1D g = gauss_legendre(qpn);
  double hx = mesh.hx(), hy = mesh.hy();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_elems()) * 24 * 24);

  int qp = 0;
  for (int ej = 0; ej < mesh.ny; ++ej)
    for (int ei = 0; ei < mesh.nx; ++ei) {
      Eigen::Matrix<double, 24, 24> ke = Eigen::Matrix<double, 24, 24>::Zero();
      Eigen::Matrix<double, 24, 1> fe = Eigen::Matrix<double, 24, 1>::Zero();

      for (int qj = 0; qj < qpn; ++qj)
        for (int qi = 0; qi < qpn; ++qi, ++qp) {
          double s = 0.5 * (1 + g.x[qi]);
          double t = 0.5 * (1 + g.x[qj]);
          double wq = 0.25 * g.w[qi] * g.w[qj] * hx * hy;
          MembraneBasis mb = membrane_basis(s, t, hx, hy);
          BendBasis bb = bend_basis(s, t, hx, hy);
          Eigen::Matrix<double, 3, 8> bm;
          Eigen::Matrix<double, 3, 16> bk;
          strain_matrices(mb, bb, &bm, &bk);

          PointStiffness ps = stiffness(qp);
          ke.block<8, 8>(0, 0) += wq * bm.transpose() * ps.a * bm;
          ke.block<8, 16>(0, 8) -= wq * bm.transpose() * ps.b * bk;
          ke.block<16, 8>(8, 0) -= wq * bk.transpose() * ps.b * bm;
          ke.block<16, 16>(8, 8) += wq * bk.transpose() * ps.d * bk;

          fe.head<8>() += wq * bm.transpose() * ps.rn;
          fe.tail<16>() -= wq * bk.transpose() * ps.rm;

          if (loads) {
            double x1 = mesh.node_x1(ei) + s * hx;
            double x2 = mesh.node_x2(ej) + t * hy;
            WorkData wd = work_data(*loads, *rule, x1, x2);
            for (int a = 0; a < 4; ++a)
              for (int c = 0; c < 2; ++c)
                fe[2 * a + c] +=
                    wq * (wd.b0[c] + wd.fp[c] + wd.fm[c]) * mb.val[a];
            for (int i = 0; i < 16; ++i) {
              fe[8 + i] += wq * (wd.b0[2] + wd.fp[2] + wd.fm[2]) * bb.val[i];
              for (int c = 0; c < 2; ++c) {
                double m1 = wd.b1[c] + 0.5 * (wd.fp[c] - wd.fm[c]);
                fe[8 + i] -= wq * m1 * (c == 0 ? bb.d1[i] : bb.d2[i]);
              }
            }
          }
        }

      auto nodes = mesh.elem_nodes(ei, ej);
      int dofs[24];
      for (int a = 0; a < 4; ++a) {
        dofs[2 * a + 0] = dm.reduced[2 * nodes[a] + 0];
        dofs[2 * a + 1] = dm.reduced[2 * nodes[a] + 1];
        for (int c = 0; c < 4; ++c)
          dofs[8 + 4 * a + c] = dm.reduced[dm.n_mem_full + 4 * nodes[a] + c];
      }
      for (int r = 0; r < 24; ++r) {
        if (dofs[r] < 0) continue;
        sys.rhs[dofs[r]] += fe[r];
        for (int c = 0; c < 24; ++c)
          if (dofs[c] >= 0) trip.emplace_back(dofs[r], dofs[c], ke(r, c));
      }
    }

  if (loads) {
    Rule1D line = gauss_legendre(qpn);
    for (const auto& seg : mesh.free_segments()) {
      bool along_x2 = (seg.edge == kX0 || seg.edge == kX1);
      double len = along_x2 ? hy : hx;
      auto nodes = mesh.elem_nodes(seg.ei, seg.ej);
      Eigen::Matrix<double, 24, 1> fe = Eigen::Matrix<double, 24, 1>::Zero();
      for (int q = 0; q < line.size(); ++q) {
        double u = 0.5 * (1 + line.x[q]);
        double wq = 0.5 * line.w[q] * len;
        double s, t;
        switch (seg.edge) {
          case kX0: s = 0, t = u; break;
          case kX1: s = 1, t = u; break;
          case kY0: s = u, t = 0; break;
          default: s = u, t = 1; break;
        }
        double x1 = mesh.node_x1(seg.ei) + s * hx;
        double x2 = mesh.node_x2(seg.ej) + t * hy;
        Vec3 fl0 = Vec3::Zero(), fl1 = Vec3::Zero();
        for (int k = 0; k < rule->size(); ++k) {
          Vec3 f = loads->f_lat_at(x1, x2, rule->x[k]);
          fl0 += rule->w[k] * f;
          fl1 += rule->w[k] * rule->x[k] * f;
        }
        MembraneBasis mb = membrane_basis(s, t, hx, hy);
        BendBasis bb = bend_basis(s, t, hx, hy);
        for (int a = 0; a < 4; ++a)
          for (int c = 0; c < 2; ++c)
            fe[2 * a + c] += wq * fl0[c] * mb.val[a];
        for (int i = 0; i < 16; ++i) {
          fe[8 + i] += wq * fl0[2] * bb.val[i];
          fe[8 + i] -= wq * (fl1[0] * bb.d1[i] + fl1[1] * bb.d2[i]);
        }
      }
      int dofs[24];
      for (int a = 0; a < 4; ++a) {
        dofs[2 * a + 0] = dm.reduced[2 * nodes[a] + 0];
        dofs[2 * a + 1] = dm.reduced[2 * nodes[a] + 1];
        for (int c = 0; c < 4; ++c)
          dofs[8 + 4 * a + c] = dm.reduced[dm.n_mem_full + 4 * nodes[a] + c];
      }
      for (int r = 0; r < 24; ++r)
        if (dofs[r] >= 0) sys.rhs[dofs[r]] += fe[r];
    }
  }

  sys.k.resize(dm.n_reduced, dm.n_reduced);
  sys.k.setFromTriplets(trip.begin(), trip.end());
  sys.k.makeCompressed();
  return sys;
}

namespace {

Eigen::VectorXd solve_reduced(const LimitSystem& sys,
                              const PlateSolveOptions& opts,
                              double* residual) {
  if (sys.n_reduced == 0) throw SolverError("plate solve: no free unknowns");
  Eigen::VectorXd x;
  if (sys.n_reduced <= opts.direct_dof_limit) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.k);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("plate solve: factorization failed (singular system)");
    x = ldlt.solve(sys.rhs);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg(sys.k);
    cg.setTolerance(opts.cg_tol);
    x = cg.solve(sys.rhs);
    if (cg.info() != Eigen::Success)
      throw SolverError("plate solve: cg stalled at residual " +
                        std::to_string(cg.error()));
  }
  double scale = sys.rhs.norm();
  *residual = (sys.k * x - sys.rhs).norm() / (scale > 0 ? scale : 1.0);
  if (*residual > 1e-8)
    throw SolverError("plate solve: residual " + std::to_string(*residual));
  return x;
}

}  // namespace

KLSolution solve_limit(const PlateMesh& mesh, const MaterialField& mat,
                       const LoadSpec& loads, const PlateSolveOptions& opts) {
  InPlaneQuad quad = plate_quadrature(mesh, opts.qpn);
  ReducedModel model = ReducedModel::build(mat, loads, quad, opts.x3_nodes);
  Rule1D rule = thickness_rule(opts.x3_nodes, mat.thickness_breaks);

  StiffnessCallback cb = [&model](int qp) {
    const ReducedPoint& rp = model.pts[qp];
    PointStiffness ps;
    ps.a = rp.mom.m0.basis_matrix();
    ps.b = rp.mom.m1.basis_matrix();
    ps.d = rp.mom.m2.basis_matrix();
    ps.rn = (rp.cap_f_n - rp.f_n).basis();
    ps.rm = (rp.cap_f_m - rp.f_m).basis();
    return ps;
  };

  LimitSystem sys = assemble_limit_system(mesh, cb, &loads, &rule, opts.qpn);

  KLSolution sol;
  sol.mesh = mesh;
  Eigen::VectorXd x = solve_reduced(sys, opts, &sol.solve_residual);

  sol.mem = Eigen::VectorXd::Zero(2 * mesh.n_nodes());
  sol.bend = Eigen::VectorXd::Zero(4 * mesh.n_nodes());
  for (int d = 0; d < sys.n_mem_full; ++d)
    if (sys.reduced[d] >= 0) sol.mem[d] = x[sys.reduced[d]];
  for (int d = 0; d < 4 * mesh.n_nodes(); ++d)
    if (sys.reduced[sys.n_mem_full + d] >= 0)
      sol.bend[d] = x[sys.reduced[sys.n_mem_full + d]];
  return sol;
}

namespace {

struct LocalEval {
  int ei, ej;
  double s, t;
  std::array<int, 4> nodes;
};

LocalEval locate(const PlateMesh& mesh, double x1, double x2) {
  LocalEval le;
  mesh.locate(x1, x2, &le.ei, &le.ej, &le.s, &le.t);
  le.nodes = mesh.elem_nodes(le.ei, le.ej);
  return le;
}

}  // namespace

Vec2 KLSolution::displacement(double x1, double x2) const {
  LocalEval le = locate(mesh, x1, x2);
  MembraneBasis mb = membrane_basis(le.s, le.t, mesh.hx(), mesh.hy());
  Vec2 u = Vec2::Zero();
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 2; ++c) u[c] += mb.val[a] * mem[2 * le.nodes[a] + c];
  return u;
}

double KLSolution::deflection(double x1, double x2) const {
  LocalEval le = locate(mesh, x1, x2);
  BendBasis bb = bend_basis(le.s, le.t, mesh.hx(), mesh.hy());
  double w = 0;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      w += bb.val[4 * a + c] * bend[4 * le.nodes[a] + c];
  return w;
}

Vec2 KLSolution::deflection_gradient(double x1, double x2) const {
  LocalEval le = locate(mesh, x1, x2);
  BendBasis bb = bend_basis(le.s, le.t, mesh.hx(), mesh.hy());
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) {
      g[0] += bb.d1[4 * a + c] * bend[4 * le.nodes[a] + c];
      g[1] += bb.d2[4 * a + c] * bend[4 * le.nodes[a] + c];
    }
  return g;
}

Sym2 KLSolution::membrane_strain(double x1, double x2) const {
  LocalEval le = locate(mesh, x1, x2);
  MembraneBasis mb = membrane_basis(le.s, le.t, mesh.hx(), mesh.hy());
  double e11 = 0, e22 = 0, e12 = 0;
  for (int a = 0; a < 4; ++a) {
    double u1 = mem[2 * le.nodes[a] + 0];
    double u2 = mem[2 * le.nodes[a] + 1];
    e11 += mb.d1[a] * u1;
    e22 += mb.d2[a] * u2;
    e12 += 0.5 * (mb.d2[a] * u1 + mb.d1[a] * u2);
  }
  return Sym2::from_components(e11, e22, e12);
}

Sym2 KLSolution::curvature(double x1, double x2) const {
  LocalEval le = locate(mesh, x1, x2);
  BendBasis bb = bend_basis(le.s, le.t, mesh.hx(), mesh.hy());
  double k11 = 0, k22 = 0, k12 = 0;
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) {
      double w = bend[4 * le.nodes[a] + c];
      k11 += bb.d11[4 * a + c] * w;
      k22 += bb.d22[4 * a + c] * w;
      k12 += bb.d12[4 * a + c] * w;
    }
  return Sym2::from_components(k11, k22, k12);
}

LimitStressSample limit_stress_at(const KLSolution& sol,
                                  const MaterialField& mat,
                                  const LoadSpec& loads, double x1, double x2,
                                  double x3) {
  ElasticityTensor c = mat(x1, x2, x3);
  Sym3 f = loads.f_at(x1, x2, x3, c);
  Sym2 zbar = sol.kl_strain(x1, x2, x3);
  ShearBlock sb = shear_block(c);
  Vec3 czbar = c.apply(embed_plane(zbar)).i3_vector();
  Vec3 z = sb.solve(f.i3_vector() - czbar);

  LimitStressSample out;
  out.t = c.apply(embed_plane(zbar) + odot_e3(z));
  out.psi = Vec3(0.5 * z[0], 0.5 * z[1], z[2]);
  Sym3 eg = loads.eg_at(x1, x2, x3);
  out.sigma = out.t + c.apply(eg);
  Sym2 ew = zbar + plane_part(eg);
  out.profile = assemble_sym3(ew, out.psi);
  return out;
}

StressField limit_stress_field(const KLSolution& sol, const MaterialField& mat,
                               const LoadSpec& loads, const QuadGrid& grid,
                               StressField* profile, StressField* t_field) {
  auto gp = std::make_shared<QuadGrid>(grid);
  StressField sigma(gp);
  if (profile) *profile = StressField(gp);
  if (t_field) *t_field = StressField(gp);
  for (int col = 0; col < grid.columns(); ++col)
    for (int lev = 0; lev < grid.levels(); ++lev) {
      LimitStressSample s = limit_stress_at(
          sol, mat, loads, grid.plane.x1[col], grid.plane.x2[col],
          grid.rule.x[lev]);
      sigma.at(col, lev) = s.sigma;
      if (profile) profile->at(col, lev) = s.profile;
      if (t_field) t_field->at(col, lev) = s.t;
    }
  return sigma;
}

void limit_resultants(const KLSolution& sol, const ReducedModel& model,
                      std::vector<Sym2>* n, std::vector<Sym2>* m) {
  n->resize(model.grid.size());
  m->resize(model.grid.size());
  for (int q = 0; q < model.grid.size(); ++q) {
    const ReducedPoint& rp = model.pts[q];
    Sym2 eps = sol.membrane_strain(model.grid.x1[q], model.grid.x2[q]);
    Sym2 kap = sol.curvature(model.grid.x1[q], model.grid.x2[q]);
    (*n)[q] = rp.mom.m0.apply(eps) - rp.mom.m1.apply(kap) + rp.f_n;
    (*m)[q] = rp.mom.m1.apply(eps) - rp.mom.m2.apply(kap) + rp.f_m;
  }
}

double limit_dual_energy(const KLSolution& sol, const ReducedModel& model) {
  std::vector<Sym2> n, m;
  limit_resultants(sol, model, &n, &m);
  return model.dual_limit_energy(n, m);
}

double equilibrium_residual(const KLSolution& sol, const ReducedModel& model,
                            const LoadSpec& loads, int qpn) {
  const PlateMesh& mesh = sol.mesh;
  std::vector<Sym2> n, m;
  limit_resultants(sol, model, &n, &m);

  DofMaps dm = build_dof_maps(mesh);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dm.n_reduced);
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(dm.n_reduced);
  Rule1D g = gauss_legendre(qpn);
  Rule1D rule = model.pts.empty() ? thickness_rule(8)
                                  : model.pts.front().rule;
  double hx = mesh.hx(), hy = mesh.hy();

  int qp = 0;
  for (int ej = 0; ej < mesh.ny; ++ej)
    for (int ei = 0; ei < mesh.nx; ++ei) {
      auto nodes = mesh.elem_nodes(ei, ej);
      for (int qj = 0; qj < qpn; ++qj)
        for (int qi = 0; qi < qpn; ++qi, ++qp) {
          double s = 0.5 * (1 + g.x[qi]);
          double t = 0.5 * (1 + g.x[qj]);
          double wq = 0.25 * g.w[qi] * g.w[qj] * hx * hy;
          MembraneBasis mb = membrane_basis(s, t, hx, hy);
          BendBasis bb = bend_basis(s, t, hx, hy);
          Eigen::Matrix<double, 3, 8> bm;
          Eigen::Matrix<double, 3, 16> bk;
          strain_matrices(mb, bb, &bm, &bk);

          const ReducedPoint& rp = model.pts[qp];
          Vec3 dn = (n[qp] - rp.cap_f_n).basis();
          Vec3 dmv = (m[qp] - rp.cap_f_m).basis();
          double x1 = mesh.node_x1(ei) + s * hx;
          double x2 = mesh.node_x2(ej) + t * hy;
          WorkData wd = work_data(loads, rule, x1, x2);

          Eigen::Matrix<double, 24, 1> fe = Eigen::Matrix<double, 24, 1>::Zero();
          fe.head<8>() = wq * bm.transpose() * dn;
          fe.tail<16>() = -wq * bk.transpose() * dmv;
          for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 2; ++c)
              fe[2 * a + c] -= wq * (wd.b0[c] + wd.fp[c] + wd.fm[c]) * mb.val[a];
          for (int i = 0; i < 16; ++i) {
            fe[8 + i] -= wq * (wd.b0[2] + wd.fp[2] + wd.fm[2]) * bb.val[i];
            for (int c = 0; c < 2; ++c) {
              double m1 = wd.b1[c] + 0.5 * (wd.fp[c] - wd.fm[c]);
              fe[8 + i] += wq * m1 * (c == 0 ? bb.d1[i] : bb.d2[i]);
            }
          }

          for (int a = 0; a < 4; ++a) {
            for (int c = 0; c < 2; ++c) {
              int d = dm.reduced[2 * nodes[a] + c];
              if (d >= 0) {
                r[d] += fe[2 * a + c];
                scale[d] += std::abs(fe[2 * a + c]);
              }
            }
            for (int c = 0; c < 4; ++c) {
              int d = dm.reduced[dm.n_mem_full + 4 * nodes[a] + c];
              if (d >= 0) {
                r[d] += fe[8 + 4 * a + c];
                scale[d] += std::abs(fe[8 + 4 * a + c]);
              }
            }
          }
        }
    }

  // Lateral strip work.
  Rule1D line = gauss_legendre(qpn);
  for (const auto& seg : mesh.free_segments()) {
    bool along_x2 = (seg.edge == kX0 || seg.edge == kX1);
    double len = along_x2 ? hy : hx;
    auto nodes = mesh.elem_nodes(seg.ei, seg.ej);
    for (int q = 0; q < line.size(); ++q) {
      double u = 0.5 * (1 + line.x[q]);
      double wq = 0.5 * line.w[q] * len;
      double s, t;
      switch (seg.edge) {
        case kX0: s = 0, t = u; break;
        case kX1: s = 1, t = u; break;
        case kY0: s = u, t = 0; break;
        default: s = u, t = 1; break;
      }
      double x1 = mesh.node_x1(seg.ei) + s * hx;
      double x2 = mesh.node_x2(seg.ej) + t * hy;
      Vec3 fl0 = Vec3::Zero(), fl1 = Vec3::Zero();
      for (int k = 0; k < rule.size(); ++k) {
        Vec3 f = loads.f_lat_at(x1, x2, rule.x[k]);
        fl0 += rule.w[k] * f;
        fl1 += rule.w[k] * rule.x[k] * f;
      }
      MembraneBasis mb = membrane_basis(s, t, hx, hy);
      BendBasis bb = bend_basis(s, t, hx, hy);
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 2; ++c) {
          int d = dm.reduced[2 * nodes[a] + c];
          if (d >= 0) {
            double v = wq * fl0[c] * mb.val[a];
            r[d] -= v;
            scale[d] += std::abs(v);
          }
        }
      for (int i = 0; i < 16; ++i) {
        int a = i / 4, c = i % 4;
        int d = dm.reduced[dm.n_mem_full + 4 * nodes[a] + c];
        if (d >= 0) {
          double v = wq * (fl0[2] * bb.val[i] -
                           (fl1[0] * bb.d1[i] + fl1[1] * bb.d2[i]));
          r[d] -= v;
          scale[d] += std::abs(v);
        }
      }
    }
  }

  double smax = scale.maxCoeff();
  if (smax <= 0) smax = 1.0;
  return r.cwiseAbs().maxCoeff() / smax;
}

double structure_orthogonality_probe(const KLSolution& sol,
                                     const MaterialField& mat,
                                     const LoadSpec& loads, int n_probes,
                                     Rng& rng, int qpn, int x3_nodes) {
  const PlateMesh& mesh = sol.mesh;
  InPlaneQuad quad = plate_quadrature(mesh, qpn);
  Rule1D rule = thickness_rule(x3_nodes, mat.thickness_breaks);

  // Gram operator of the discrete limit-kinematics strains in L2 of the
  // body: membrane block weight 1, bending block weight 1/12.
  StiffnessCallback gram = [](int) {
    PointStiffness ps;
    ps.a = Mat3::Identity();
    ps.b = Mat3::Zero();
    ps.d = Mat3::Identity() / 12.0;
    return ps;
  };
  LimitSystem gsys = assemble_limit_system(mesh, gram, nullptr, nullptr, qpn);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(gsys.k);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("structure probe: gram factorization failed");

  // Compliance-weighted limit stress samples.
  int nq = quad.size();
  std::vector<std::vector<Sym3>> cinv_t(nq, std::vector<Sym3>(rule.size()));
  for (int q = 0; q < nq; ++q)
    for (int k = 0; k < rule.size(); ++k) {
      ElasticityTensor c = mat(quad.x1[q], quad.x2[q], rule.x[k]);
      LimitStressSample smp = limit_stress_at(sol, mat, loads, quad.x1[q],
                                              quad.x2[q], rule.x[k]);
      cinv_t[q][k] = c.inverse().apply(smp.t);
    }

  Rule1D g = gauss_legendre(qpn);
  double hx = mesh.hx(), hy = mesh.hy();
  double worst = 0;

  for (int probe = 0; probe < n_probes; ++probe) {
    std::vector<Sym2> pa(nq), pb(nq);
    for (int q = 0; q < nq; ++q) {
      pa[q] = random_sym2(rng);
      pb[q] = random_sym2(rng);
    }

    // Project out the discrete limit strains: solve the gram system with
    // the pairing of the probe against each test strain.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(gsys.n_reduced);
    int qp = 0;
    for (int ej = 0; ej < mesh.ny; ++ej)
      for (int ei = 0; ei < mesh.nx; ++ei) {
        auto nodes = mesh.elem_nodes(ei, ej);
        for (int qj = 0; qj < qpn; ++qj)
          for (int qi = 0; qi < qpn; ++qi, ++qp) {
            double s = 0.5 * (1 + g.x[qi]);
            double t = 0.5 * (1 + g.x[qj]);
            double wq = 0.25 * g.w[qi] * g.w[qj] * hx * hy;
            MembraneBasis mb = membrane_basis(s, t, hx, hy);
            BendBasis bb = bend_basis(s, t, hx, hy);
            Eigen::Matrix<double, 3, 8> bm;
            Eigen::Matrix<double, 3, 16> bk;
            strain_matrices(mb, bb, &bm, &bk);
            Eigen::Matrix<double, 8, 1> fm = wq * bm.transpose() * pa[qp].basis();
            Eigen::Matrix<double, 16, 1> fb =
                -wq / 12.0 * bk.transpose() * pb[qp].basis();
            for (int a = 0; a < 4; ++a) {
              for (int c = 0; c < 2; ++c) {
                int d = gsys.reduced[2 * nodes[a] + c];
                if (d >= 0) rhs[d] += fm[2 * a + c];
              }
              for (int c = 0; c < 4; ++c) {
                int d = gsys.reduced[gsys.n_mem_full + 4 * nodes[a] + c];
                if (d >= 0) rhs[d] += fb[4 * a + c];
              }
            }
          }
      }
    Eigen::VectorXd y = ldlt.solve(rhs);

    KLSolution proj;
    proj.mesh = mesh;
    proj.mem = Eigen::VectorXd::Zero(2 * mesh.n_nodes());
    proj.bend = Eigen::VectorXd::Zero(4 * mesh.n_nodes());
    for (int d = 0; d < gsys.n_mem_full; ++d)
      if (gsys.reduced[d] >= 0) proj.mem[d] = y[gsys.reduced[d]];
    for (int d = 0; d < 4 * mesh.n_nodes(); ++d)
      if (gsys.reduced[gsys.n_mem_full + d] >= 0)
        proj.bend[d] = y[gsys.reduced[gsys.n_mem_full + d]];

    // Pair the projected-out probe with the compliance-weighted stress.
    double ip = 0, na = 0, nb = 0;
    for (int q = 0; q < nq; ++q) {
      Sym2 ares = pa[q] - proj.membrane_strain(quad.x1[q], quad.x2[q]);
      Sym2 bres = pb[q] + proj.curvature(quad.x1[q], quad.x2[q]);
      for (int k = 0; k < rule.size(); ++k) {
        double w = quad.w[q] * rule.w[k];
        Sym3 probe_field = embed_plane(ares + rule.x[k] * bres);
        ip += w * cinv_t[q][k].dot(probe_field);
        na += w * cinv_t[q][k].dot(cinv_t[q][k]);
        nb += w * probe_field.dot(probe_field);
      }
    }
    double rel = std::abs(ip) / std::max(1e-300, std::sqrt(na) * std::sqrt(nb));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace pg
