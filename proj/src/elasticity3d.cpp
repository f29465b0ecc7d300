#include "plategamma/elasticity3d.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>

namespace pg {

Vec6 scaled_strain_rows(double eps) {
  if (!(eps > 0)) throw Error("scaled strain: eps must be positive");
  Vec6 r;
  r << 1.0, 1.0, 1.0 / (eps * eps), 1.0 / eps, 1.0 / eps, 1.0;
  return r;
}

Sym3 scaled_strain(double eps, const Mat3& grad) {
  Sym3 e = Sym3::from_matrix(grad);
  Vec6 v = e.basis().cwiseProduct(scaled_strain_rows(eps));
  return Sym3::from_basis(v);
}

Evaluators3D make_evaluators(const MaterialField& mat, const LoadSpec& loads) {
  Evaluators3D ev;
  ev.stiffness = mat.at;
  ev.gen_force = [&mat, loads](double x1, double x2, double x3) {
    return loads.f_at(x1, x2, x3, mat(x1, x2, x3));
  };
  ev.volume_force = [loads](double x1, double x2, double x3) {
    return loads.b_at(x1, x2, x3);
  };
  ev.traction_top = [loads](double x1, double x2) {
    return loads.f_plus_at(x1, x2);
  };
  ev.traction_bottom = [loads](double x1, double x2) {
    return loads.f_minus_at(x1, x2);
  };
  ev.traction_lateral = [loads](double x1, double x2, double x3) {
    return loads.f_lat_at(x1, x2, x3);
  };
  ev.g_strain = [loads](double x1, double x2, double x3) {
    return loads.eg_at(x1, x2, x3);
  };
  return ev;
}

namespace {

constexpr int kCx[8] = {0, 1, 1, 0, 0, 1, 1, 0};
constexpr int kCy[8] = {0, 0, 1, 1, 0, 0, 1, 1};
constexpr int kCz[8] = {0, 0, 0, 0, 1, 1, 1, 1};

// Shared element data: the grid is uniform, so shape values, strain matrices
// and bubble strain matrices are identical for every element.
struct ElementKit {
  double hx, hy, hz;
  Vec6 rows;

  struct QP {
    double s, t, u, w;
    double n[8];
    Vec3 gn[8];
    Eigen::Matrix<double, 6, 24> b;
    Eigen::Matrix<double, 6, 9> benh;
  };
  std::array<QP, 8> qp;

  struct FaceQP {
    double s, t, w;  // in-plane local coords and weight
    double n[8];     // shapes at the face
  };
  std::array<FaceQP, 4> top, bottom;

  // Lateral face quadrature: local coordinates (a, u) on the face, 2x2.
  struct SideQP {
    double s, t, u, w;
    double n[8];
  };
  std::array<std::array<SideQP, 4>, 4> side;  // per edge id
};

void shapes(double s, double t, double u, double n[8]) {
  for (int a = 0; a < 8; ++a)
    n[a] = (kCx[a] ? s : 1 - s) * (kCy[a] ? t : 1 - t) * (kCz[a] ? u : 1 - u);
}

ElementKit build_kit(const BrickMesh3D& mesh, double eps) {
  ElementKit kit;
  kit.hx = mesh.base.hx();
  kit.hy = mesh.base.hy();
  kit.hz = mesh.hz();
  kit.rows = scaled_strain_rows(eps);

  Rule1D g = gauss_legendre(2);
  int q = 0;
  for (int qk = 0; qk < 2; ++qk)
    for (int qj = 0; qj < 2; ++qj)
      for (int qi = 0; qi < 2; ++qi, ++q) {
        auto& p = kit.qp[q];
        p.s = 0.5 * (1 + g.x[qi]);
        p.t = 0.5 * (1 + g.x[qj]);
        p.u = 0.5 * (1 + g.x[qk]);
        p.w = 0.125 * g.w[qi] * g.w[qj] * g.w[qk] * kit.hx * kit.hy * kit.hz;
        shapes(p.s, p.t, p.u, p.n);
        for (int a = 0; a < 8; ++a) {
          double nx = kCx[a] ? p.s : 1 - p.s, dx = (kCx[a] ? 1.0 : -1.0) / kit.hx;
          double ny = kCy[a] ? p.t : 1 - p.t, dy = (kCy[a] ? 1.0 : -1.0) / kit.hy;
          double nz = kCz[a] ? p.u : 1 - p.u, dz = (kCz[a] ? 1.0 : -1.0) / kit.hz;
          p.gn[a] = Vec3(dx * ny * nz, nx * dy * nz, nx * ny * dz);
        }
        p.b.setZero();
        for (int a = 0; a < 8; ++a)
          for (int c = 0; c < 3; ++c) {
            Vec3 ec = Vec3::Zero();
            ec[c] = 1.0;
            Vec6 col = Sym3::dyad(ec, p.gn[a]).basis();
            p.b.col(3 * a + c) = col.cwiseProduct(kit.rows);
          }
        p.benh.setZero();
        double xi[3] = {2 * p.s - 1, 2 * p.t - 1, 2 * p.u - 1};
        double h[3] = {kit.hx, kit.hy, kit.hz};
        for (int i = 0; i < 3; ++i) {
          double dphi = -4.0 * xi[i] / h[i];
          Vec3 ei = Vec3::Zero();
          ei[i] = 1.0;
          for (int c = 0; c < 3; ++c) {
            Vec3 ec = Vec3::Zero();
            ec[c] = 1.0;
            Vec6 col = (Sym3::dyad(ec, ei) * dphi).basis();
            p.benh.col(3 * i + c) = col.cwiseProduct(kit.rows);
          }
        }
      }

  int f = 0;
  for (int qj = 0; qj < 2; ++qj)
    for (int qi = 0; qi < 2; ++qi, ++f) {
      double s = 0.5 * (1 + g.x[qi]);
      double t = 0.5 * (1 + g.x[qj]);
      double w = 0.25 * g.w[qi] * g.w[qj] * kit.hx * kit.hy;
      kit.top[f] = {s, t, w, {}};
      kit.bottom[f] = {s, t, w, {}};
      shapes(s, t, 1.0, kit.top[f].n);
      shapes(s, t, 0.0, kit.bottom[f].n);
    }

  for (int edge = 0; edge < 4; ++edge) {
    bool along_x2 = (edge == kX0 || edge == kX1);
    double len = along_x2 ? kit.hy : kit.hx;
    int f2 = 0;
    for (int qk = 0; qk < 2; ++qk)
      for (int qa = 0; qa < 2; ++qa, ++f2) {
        double a = 0.5 * (1 + g.x[qa]);
        double u = 0.5 * (1 + g.x[qk]);
        double w = 0.25 * g.w[qa] * g.w[qk] * len * kit.hz;
        double s, t;
        switch (edge) {
          case kX0: s = 0, t = a; break;
          case kX1: s = 1, t = a; break;
          case kY0: s = a, t = 0; break;
          default: s = a, t = 1; break;
        }
        kit.side[edge][f2] = {s, t, u, w, {}};
        shapes(s, t, u, kit.side[edge][f2].n);
      }
  }
  return kit;
}

struct Dofs3D {
  std::vector<int> reduced;    // full dof -> reduced, -1 pinned
  Eigen::VectorXd pinned;      // full-size values on pinned dofs
  int n_reduced = 0;
};

Dofs3D build_dofs(const BrickMesh3D& mesh, const Solve3DOptions& opts) {
  Dofs3D d;
  int nn = mesh.n_nodes();
  d.reduced.assign(3 * nn, -1);
  d.pinned = Eigen::VectorXd::Zero(3 * nn);
  int next = 0;
  for (int k = 0; k <= mesh.nz; ++k)
    for (int j = 0; j <= mesh.base.ny; ++j)
      for (int i = 0; i <= mesh.base.nx; ++i) {
        int nd = mesh.node(i, j, k);
        bool boundary = (i == 0 || i == mesh.base.nx || j == 0 ||
                         j == mesh.base.ny || k == 0 || k == mesh.nz);
        bool pin = mesh.node_constrained(i, j);
        Vec3 val = Vec3::Zero();
        if (!pin && boundary && opts.dirichlet_override) {
          pin = opts.dirichlet_override(mesh.base.node_x1(i),
                                        mesh.base.node_x2(j), mesh.node_x3(k),
                                        &val);
        } else if (pin && opts.dirichlet_override) {
          opts.dirichlet_override(mesh.base.node_x1(i), mesh.base.node_x2(j),
                                  mesh.node_x3(k), &val);
        }
        for (int c = 0; c < 3; ++c) {
          if (pin)
            d.pinned[3 * nd + c] = val[c];
          else
            d.reduced[3 * nd + c] = next++;
        }
      }
  d.n_reduced = next;
  return d;
}

struct ElementRecovery {
  Eigen::Matrix<double, 9, 24> r;  // K_aa^{-1} K_au
  Eigen::Matrix<double, 9, 1> rf;  // K_aa^{-1} f_a
};

// Residual b - K x with extended-precision row accumulation.  The plain
// double evaluation loses ~3 digits to cancellation at small eps, which is
// exactly what limits the attainable duality gap.
Eigen::VectorXd precise_residual(const Eigen::SparseMatrix<double>& k,
                                 const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& x) {
  Eigen::VectorXd r(b.size());
  std::vector<long double> acc(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) acc[i] = b[i];
  for (int col = 0; col < k.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it)
      acc[it.row()] -= static_cast<long double>(it.value()) * x[col];
  for (Eigen::Index i = 0; i < b.size(); ++i)
    r[i] = static_cast<double>(acc[i]);
  return r;
}

// Preconditioned conjugate gradient with nodal 3x3 block Jacobi.
Eigen::VectorXd cg_block_jacobi(const Eigen::SparseMatrix<double>& k,
                                const Eigen::VectorXd& b, double tol,
                                int max_iter, int* iters, double* final_rel) {
  const int n = static_cast<int>(k.rows());
  std::vector<Mat3> blocks(n / 3, Mat3::Zero());
  for (int col = 0; col < n; ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
      int row = static_cast<int>(it.row());
      if (row / 3 == col / 3) blocks[row / 3](row % 3, col % 3) = it.value();
    }
  for (auto& blk : blocks) blk = blk.inverse().eval();
  auto precond = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd z(n);
    for (int nd = 0; nd < n / 3; ++nd)
      z.segment<3>(3 * nd) = blocks[nd] * r.segment<3>(3 * nd);
    return z;
  };

  double bnorm = b.norm();
  if (bnorm == 0) {
    *iters = 0;
    *final_rel = 0;
    return Eigen::VectorXd::Zero(n);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  double best = r.norm() / bnorm;
  int stall = 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    double rel = r.norm() / bnorm;
    if (rel <= tol) break;
    if (rel < best * 0.9999) {
      best = rel;
      stall = 0;
    } else if (++stall > 250) {
      break;  // rounding floor reached
    }
    Eigen::VectorXd q = k * p;
    double alpha = rz / p.dot(q);
    x += alpha * p;
    if ((it + 1) % 100 == 0)
      r = b - k * x;  // periodically recompute the true residual
    else
      r -= alpha * q;
    z = precond(r);
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  r = b - k * x;
  *iters = it;
  *final_rel = r.norm() / bnorm;
  return x;
}

}  // namespace

QuadGrid brick_quadrature(const BrickMesh3D& mesh) {
  QuadGrid grid;
  Rule1D g = gauss_legendre(2);
  double hx = mesh.base.hx(), hy = mesh.base.hy(), hz = mesh.hz();
  for (int ej = 0; ej < mesh.base.ny; ++ej)
    for (int ei = 0; ei < mesh.base.nx; ++ei)
      for (int qj = 0; qj < 2; ++qj)
        for (int qi = 0; qi < 2; ++qi) {
          grid.plane.x1.push_back(mesh.base.node_x1(ei) +
                                  0.5 * (1 + g.x[qi]) * hx);
          grid.plane.x2.push_back(mesh.base.node_x2(ej) +
                                  0.5 * (1 + g.x[qj]) * hy);
          grid.plane.w.push_back(0.25 * g.w[qi] * g.w[qj] * hx * hy);
        }
  for (int ek = 0; ek < mesh.nz; ++ek)
    for (int qk = 0; qk < 2; ++qk) {
      grid.rule.x.push_back(mesh.node_x3(ek) + 0.5 * (1 + g.x[qk]) * hz);
      grid.rule.w.push_back(0.5 * g.w[qk] * hz);
    }
  return grid;
}

PrimalSolution3D solve_primal(const BrickMesh3D& mesh, const Evaluators3D& ev,
                              const Solve3DOptions& opts) {
  ElementKit kit = build_kit(mesh, opts.eps);
  Dofs3D dofs = build_dofs(mesh, opts);
  if (dofs.n_reduced == 0) throw SolverError("3d solve: no free unknowns");

  const int nx = mesh.base.nx, ny = mesh.base.ny, nz = mesh.nz;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_elems()) * 24 * 24);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.n_reduced);
  std::vector<ElementRecovery> recov(
      opts.enhanced ? mesh.n_elems() : 0);

  auto elem_index = [&](int ei, int ej, int ek) {
    return (ek * ny + ej) * nx + ei;
  };

  for (int ek = 0; ek < nz; ++ek)
    for (int ej = 0; ej < ny; ++ej)
      for (int ei = 0; ei < nx; ++ei) {
        double ox = mesh.base.node_x1(ei), oy = mesh.base.node_x2(ej),
               oz = mesh.node_x3(ek);
        Eigen::Matrix<double, 24, 24> kuu =
            Eigen::Matrix<double, 24, 24>::Zero();
        Eigen::Matrix<double, 9, 9> kaa = Eigen::Matrix<double, 9, 9>::Zero();
        Eigen::Matrix<double, 9, 24> kau = Eigen::Matrix<double, 9, 24>::Zero();
        Eigen::Matrix<double, 24, 1> fu = Eigen::Matrix<double, 24, 1>::Zero();
        Eigen::Matrix<double, 9, 1> fa = Eigen::Matrix<double, 9, 1>::Zero();

        for (const auto& p : kit.qp) {
          double x1 = ox + p.s * kit.hx, x2 = oy + p.t * kit.hy,
                 x3 = oz + p.u * kit.hz;
          Mat6 m = ev.stiffness(x1, x2, x3).basis_matrix();
          kuu += p.w * p.b.transpose() * m * p.b;
          Vec6 fvec = ev.gen_force(x1, x2, x3).basis();
          fu += p.w * p.b.transpose() * fvec;
          Vec3 bv = ev.volume_force(x1, x2, x3);
          for (int a = 0; a < 8; ++a)
            for (int c = 0; c < 3; ++c) fu[3 * a + c] += p.w * p.n[a] * bv[c];
          if (opts.enhanced) {
            kaa += p.w * p.benh.transpose() * m * p.benh;
            kau += p.w * p.benh.transpose() * m * p.b;
            fa += p.w * p.benh.transpose() * fvec;
          }
        }

        if (ek == nz - 1)
          for (const auto& f : kit.top) {
            Vec3 tr = ev.traction_top(ox + f.s * kit.hx, oy + f.t * kit.hy);
            for (int a = 0; a < 8; ++a)
              for (int c = 0; c < 3; ++c)
                fu[3 * a + c] += f.w * f.n[a] * tr[c];
          }
        if (ek == 0)
          for (const auto& f : kit.bottom) {
            Vec3 tr = ev.traction_bottom(ox + f.s * kit.hx, oy + f.t * kit.hy);
            for (int a = 0; a < 8; ++a)
              for (int c = 0; c < 3; ++c)
                fu[3 * a + c] += f.w * f.n[a] * tr[c];
          }
        auto lateral = [&](Edge edge) {
          for (const auto& f : kit.side[edge]) {
            Vec3 tr = ev.traction_lateral(ox + f.s * kit.hx, oy + f.t * kit.hy,
                                          oz + f.u * kit.hz);
            for (int a = 0; a < 8; ++a)
              for (int c = 0; c < 3; ++c)
                fu[3 * a + c] += f.w * f.n[a] * tr[c];
          }
        };
        if (ei == 0 && !mesh.base.clamped[kX0]) lateral(kX0);
        if (ei == nx - 1 && !mesh.base.clamped[kX1]) lateral(kX1);
        if (ej == 0 && !mesh.base.clamped[kY0]) lateral(kY0);
        if (ej == ny - 1 && !mesh.base.clamped[kY1]) lateral(kY1);

        Eigen::Matrix<double, 24, 24> ke = kuu;
        Eigen::Matrix<double, 24, 1> fe = fu;
        if (opts.enhanced) {
          Eigen::LDLT<Eigen::Matrix<double, 9, 9>> ldlt(kaa);
          ElementRecovery& er = recov[elem_index(ei, ej, ek)];
          er.r = ldlt.solve(kau);
          er.rf = ldlt.solve(fa);
          ke -= kau.transpose() * er.r;
          fe -= kau.transpose() * er.rf;
        }

        auto nodes = mesh.elem_nodes(ei, ej, ek);
        int ed[24];
        for (int a = 0; a < 8; ++a)
          for (int c = 0; c < 3; ++c) ed[3 * a + c] = 3 * nodes[a] + c;
        for (int r = 0; r < 24; ++r) {
          int rr = dofs.reduced[ed[r]];
          if (rr < 0) continue;
          double f = fe[r];
          for (int c = 0; c < 24; ++c) {
            int rc = dofs.reduced[ed[c]];
            if (rc >= 0)
              trip.emplace_back(rr, rc, ke(r, c));
            else
              f -= ke(r, c) * dofs.pinned[ed[c]];
          }
          rhs[rr] += f;
        }
      }

  Eigen::SparseMatrix<double> k(dofs.n_reduced, dofs.n_reduced);
  k.setFromTriplets(trip.begin(), trip.end());
  k.makeCompressed();

  PrimalSolution3D sol;
  sol.mesh = mesh;
  sol.eps = opts.eps;

  Eigen::VectorXd x;
  bool direct = opts.method == Solve3DOptions::Method::kDirect ||
                (opts.method == Solve3DOptions::Method::kAuto &&
                 dofs.n_reduced <= opts.direct_dof_limit);
  if (direct) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(k);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("3d solve: factorization failed (singular system)");
    x = ldlt.solve(rhs);
    for (int pass = 0; pass < 6; ++pass) {
      Eigen::VectorXd r = precise_residual(k, rhs, x);
      if (r.norm() <= 1e-17 * rhs.norm()) break;
      x += ldlt.solve(r);
    }
    sol.iterations = 0;
    double bn = rhs.norm();
    sol.solve_residual =
        bn > 0 ? precise_residual(k, rhs, x).norm() / bn : 0.0;
  } else {
    int cap = opts.cg_max_iter > 0
                  ? opts.cg_max_iter
                  : static_cast<int>(20000.0 / opts.eps);
    x = cg_block_jacobi(k, rhs, opts.cg_tol, cap, &sol.iterations,
                        &sol.solve_residual);
    double bn = rhs.norm();
    for (int pass = 0; pass < 3 && bn > 0; ++pass) {
      Eigen::VectorXd r = precise_residual(k, rhs, x);
      if (r.norm() <= 0.2 * opts.cg_tol * bn) break;
      int polish_iters = 0;
      double polish_rel = 0;
      x += cg_block_jacobi(k, r, 0.05, 400, &polish_iters, &polish_rel);
      sol.iterations += polish_iters;
    }
    sol.solve_residual =
        bn > 0 ? precise_residual(k, rhs, x).norm() / bn : 0.0;
    if (sol.solve_residual > std::max(opts.cg_tol * 50, 1e-10))
      throw SolverError("3d solve: cg stopped at relative residual " +
                        std::to_string(sol.solve_residual) + " after " +
                        std::to_string(sol.iterations) + " iterations");
  }

  sol.u = dofs.pinned;
  for (int d = 0; d < static_cast<int>(dofs.reduced.size()); ++d)
    if (dofs.reduced[d] >= 0) sol.u[d] = x[dofs.reduced[d]];

  // Recover strains and stresses, accumulate the energies.
  auto grid = std::make_shared<QuadGrid>(brick_quadrature(mesh));
  sol.stress = StressField(grid);
  sol.scaled_strain = StressField(grid);
  long double a_acc = 0, load_acc = 0, dual_acc = 0;

  for (int ek = 0; ek < nz; ++ek)
    for (int ej = 0; ej < ny; ++ej)
      for (int ei = 0; ei < nx; ++ei) {
        double ox = mesh.base.node_x1(ei), oy = mesh.base.node_x2(ej),
               oz = mesh.node_x3(ek);
        auto nodes = mesh.elem_nodes(ei, ej, ek);
        Eigen::Matrix<double, 24, 1> ue;
        for (int a = 0; a < 8; ++a)
          for (int c = 0; c < 3; ++c) ue[3 * a + c] = sol.u[3 * nodes[a] + c];
        Eigen::Matrix<double, 9, 1> alpha = Eigen::Matrix<double, 9, 1>::Zero();
        if (opts.enhanced) {
          const ElementRecovery& er = recov[elem_index(ei, ej, ek)];
          alpha = er.rf - er.r * ue;
        }

        int q = 0;
        for (int qk = 0; qk < 2; ++qk)
          for (int qj = 0; qj < 2; ++qj)
            for (int qi = 0; qi < 2; ++qi, ++q) {
              const auto& p = kit.qp[q];
              double x1 = ox + p.s * kit.hx, x2 = oy + p.t * kit.hy,
                     x3 = oz + p.u * kit.hz;
              Vec6 e = p.b * ue;
              if (opts.enhanced) e += p.benh * alpha;
              ElasticityTensor c = ev.stiffness(x1, x2, x3);
              Vec6 t = c.basis_matrix() * e;

              int col = ((ej * nx + ei) * 2 + qj) * 2 + qi;
              int lev = ek * 2 + qk;
              sol.stress.at(col, lev) = Sym3::from_basis(t);
              sol.scaled_strain.at(col, lev) = Sym3::from_basis(e);

              a_acc += p.w * e.dot(t);
              Vec6 fvec = ev.gen_force(x1, x2, x3).basis();
              load_acc += p.w * fvec.dot(e);
              Vec3 bv = ev.volume_force(x1, x2, x3);
              Vec3 up = Vec3::Zero();
              for (int a = 0; a < 8; ++a)
                up += p.n[a] * ue.segment<3>(3 * a);
              load_acc += p.w * bv.dot(up);

              Vec6 ct = c.inverse().basis_matrix() * t;
              dual_acc += p.w * ct.dot(t);
            }

        auto face_work = [&](const auto& faces, bool top_face) {
          for (const auto& f : faces) {
            Vec3 tr = top_face ? ev.traction_top(ox + f.s * kit.hx,
                                                 oy + f.t * kit.hy)
                               : ev.traction_bottom(ox + f.s * kit.hx,
                                                    oy + f.t * kit.hy);
            Vec3 up = Vec3::Zero();
            for (int a = 0; a < 8; ++a)
              up += f.n[a] * ue.segment<3>(3 * a);
            load_acc += f.w * tr.dot(up);
          }
        };
        if (ek == nz - 1) face_work(kit.top, true);
        if (ek == 0) face_work(kit.bottom, false);
        auto side_work = [&](Edge edge) {
          for (const auto& f : kit.side[edge]) {
            Vec3 tr = ev.traction_lateral(ox + f.s * kit.hx, oy + f.t * kit.hy,
                                          oz + f.u * kit.hz);
            Vec3 up = Vec3::Zero();
            for (int a = 0; a < 8; ++a)
              up += f.n[a] * ue.segment<3>(3 * a);
            load_acc += f.w * tr.dot(up);
          }
        };
        if (ei == 0 && !mesh.base.clamped[kX0]) side_work(kX0);
        if (ei == nx - 1 && !mesh.base.clamped[kX1]) side_work(kX1);
        if (ej == 0 && !mesh.base.clamped[kY0]) side_work(kY0);
        if (ej == ny - 1 && !mesh.base.clamped[kY1]) side_work(kY1);
      }

  sol.primal_energy = static_cast<double>(0.5L * a_acc - load_acc);
  sol.dual_energy = static_cast<double>(0.5L * dual_acc);
  sol.load_work = static_cast<double>(load_acc);
  sol.duality_gap_rel = std::abs(sol.primal_energy + sol.dual_energy) /
                        std::max(std::abs(sol.dual_energy), 1e-300);
  return sol;
}

Eigen::VectorXd equilibrium_residual_vector(const BrickMesh3D& mesh,
                                            const Evaluators3D& ev,
                                            const StressField& t, double eps,
                                            Eigen::VectorXd* scale) {
  ElementKit kit = build_kit(mesh, eps);
  const int nx = mesh.base.nx, ny = mesh.base.ny, nz = mesh.nz;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(3 * mesh.n_nodes());
  if (scale) *scale = Eigen::VectorXd::Zero(3 * mesh.n_nodes());

  auto add = [&](int dof, double v) {
    r[dof] += v;
    if (scale) (*scale)[dof] += std::abs(v);
  };

  for (int ek = 0; ek < nz; ++ek)
    for (int ej = 0; ej < ny; ++ej)
      for (int ei = 0; ei < nx; ++ei) {
        double ox = mesh.base.node_x1(ei), oy = mesh.base.node_x2(ej),
               oz = mesh.node_x3(ek);
        auto nodes = mesh.elem_nodes(ei, ej, ek);
        int q = 0;
        for (int qk = 0; qk < 2; ++qk)
          for (int qj = 0; qj < 2; ++qj)
            for (int qi = 0; qi < 2; ++qi, ++q) {
              const auto& p = kit.qp[q];
              double x1 = ox + p.s * kit.hx, x2 = oy + p.t * kit.hy,
                     x3 = oz + p.u * kit.hz;
              int col = ((ej * nx + ei) * 2 + qj) * 2 + qi;
              int lev = ek * 2 + qk;
              Vec6 rv = (t.at(col, lev).basis() -
                         ev.gen_force(x1, x2, x3).basis());
              Eigen::Matrix<double, 24, 1> contrib =
                  p.w * p.b.transpose() * rv;
              Vec3 bv = ev.volume_force(x1, x2, x3);
              for (int a = 0; a < 8; ++a)
                for (int c = 0; c < 3; ++c)
                  add(3 * nodes[a] + c,
                      contrib[3 * a + c] - p.w * p.n[a] * bv[c]);
            }

        auto face_term = [&](const auto& faces, bool top_face) {
          for (const auto& f : faces) {
            Vec3 tr = top_face ? ev.traction_top(ox + f.s * kit.hx,
                                                 oy + f.t * kit.hy)
                               : ev.traction_bottom(ox + f.s * kit.hx,
                                                    oy + f.t * kit.hy);
            for (int a = 0; a < 8; ++a)
              for (int c = 0; c < 3; ++c)
                add(3 * nodes[a] + c, -f.w * f.n[a] * tr[c]);
          }
        };
        if (ek == nz - 1) face_term(kit.top, true);
        if (ek == 0) face_term(kit.bottom, false);
        auto side_term = [&](Edge edge) {
          for (const auto& f : kit.side[edge]) {
            Vec3 tr = ev.traction_lateral(ox + f.s * kit.hx, oy + f.t * kit.hy,
                                          oz + f.u * kit.hz);
            for (int a = 0; a < 8; ++a)
              for (int c = 0; c < 3; ++c)
                add(3 * nodes[a] + c, -f.w * f.n[a] * tr[c]);
          }
        };
        if (ei == 0 && !mesh.base.clamped[kX0]) side_term(kX0);
        if (ei == nx - 1 && !mesh.base.clamped[kX1]) side_term(kX1);
        if (ej == 0 && !mesh.base.clamped[kY0]) side_term(kY0);
        if (ej == ny - 1 && !mesh.base.clamped[kY1]) side_term(kY1);
      }

  // Constrained dofs carry reactions, not residuals.
  for (int k = 0; k <= mesh.nz; ++k)
    for (int j = 0; j <= mesh.base.ny; ++j)
      for (int i = 0; i <= mesh.base.nx; ++i)
        if (mesh.node_constrained(i, j))
          for (int c = 0; c < 3; ++c) {
            r[3 * mesh.node(i, j, k) + c] = 0;
            if (scale) (*scale)[3 * mesh.node(i, j, k) + c] = 0;
          }
  return r;
}

Eigen::VectorXd displacement_work_vector(const BrickMesh3D& mesh,
                                         const Evaluators3D& ev) {
  ElementKit kit = build_kit(mesh, 1.0);
  const int nx = mesh.base.nx, ny = mesh.base.ny, nz = mesh.nz;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(3 * mesh.n_nodes());
  for (int ek = 0; ek < nz; ++ek)
    for (int ej = 0; ej < ny; ++ej)
      for (int ei = 0; ei < nx; ++ei) {
        double ox = mesh.base.node_x1(ei), oy = mesh.base.node_x2(ej),
               oz = mesh.node_x3(ek);
        auto nodes = mesh.elem_nodes(ei, ej, ek);
        for (const auto& p : kit.qp) {
          Vec3 bv = ev.volume_force(ox + p.s * kit.hx, oy + p.t * kit.hy,
                                    oz + p.u * kit.hz);
          for (int a = 0; a < 8; ++a)
            for (int c = 0; c < 3; ++c)
              w[3 * nodes[a] + c] += p.w * p.n[a] * bv[c];
        }
        auto face_work = [&](const auto& faces, bool top_face) {
          for (const auto& f : faces) {
            Vec3 tr = top_face ? ev.traction_top(ox + f.s * kit.hx,
                                                 oy + f.t * kit.hy)
                               : ev.traction_bottom(ox + f.s * kit.hx,
                                                    oy + f.t * kit.hy);
            for (int a = 0; a < 8; ++a)
              for (int c = 0; c < 3; ++c)
                w[3 * nodes[a] + c] += f.w * f.n[a] * tr[c];
          }
        };
        if (ek == nz - 1) face_work(kit.top, true);
        if (ek == 0) face_work(kit.bottom, false);
        auto side_work = [&](Edge edge) {
          for (const auto& f : kit.side[edge]) {
            Vec3 tr = ev.traction_lateral(ox + f.s * kit.hx, oy + f.t * kit.hy,
                                          oz + f.u * kit.hz);
            for (int a = 0; a < 8; ++a)
              for (int c = 0; c < 3; ++c)
                w[3 * nodes[a] + c] += f.w * f.n[a] * tr[c];
          }
        };
        if (ei == 0 && !mesh.base.clamped[kX0]) side_work(kX0);
        if (ei == nx - 1 && !mesh.base.clamped[kX1]) side_work(kX1);
        if (ej == 0 && !mesh.base.clamped[kY0]) side_work(kY0);
        if (ej == ny - 1 && !mesh.base.clamped[kY1]) side_work(kY1);
      }
  return w;
}

double displacement_work(const BrickMesh3D& mesh, const Evaluators3D& ev,
                         const Eigen::VectorXd& v) {
  return displacement_work_vector(mesh, ev).dot(v);
}

Eigen::SparseMatrix<double> scaled_strain_gram(const BrickMesh3D& mesh,
                                               double eps) {
  ElementKit kit = build_kit(mesh, eps);
  const int nx = mesh.base.nx, ny = mesh.base.ny, nz = mesh.nz;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_elems()) * 24 * 24);
  Eigen::Matrix<double, 24, 24> ke = Eigen::Matrix<double, 24, 24>::Zero();
  for (const auto& p : kit.qp) ke += p.w * p.b.transpose() * p.b;
  for (int ek = 0; ek < nz; ++ek)
    for (int ej = 0; ej < ny; ++ej)
      for (int ei = 0; ei < nx; ++ei) {
        auto nodes = mesh.elem_nodes(ei, ej, ek);
        for (int a = 0; a < 8; ++a)
          for (int c = 0; c < 3; ++c)
            for (int b = 0; b < 8; ++b)
              for (int d = 0; d < 3; ++d)
                trip.emplace_back(3 * nodes[a] + c, 3 * nodes[b] + d,
                                  ke(3 * a + c, 3 * b + d));
      }
  Eigen::SparseMatrix<double> g(3 * mesh.n_nodes(), 3 * mesh.n_nodes());
  g.setFromTriplets(trip.begin(), trip.end());
  g.makeCompressed();
  return g;
}

Eigen::VectorXd kl_interpolant(
    const BrickMesh3D& mesh, const std::function<Vec2(double, double)>& eta,
    const std::function<double(double, double)>& eta3,
    const std::function<Vec2(double, double)>& grad_eta3) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * mesh.n_nodes());
  for (int k = 0; k <= mesh.nz; ++k)
    for (int j = 0; j <= mesh.base.ny; ++j)
      for (int i = 0; i <= mesh.base.nx; ++i) {
        double x1 = mesh.base.node_x1(i), x2 = mesh.base.node_x2(j),
               x3 = mesh.node_x3(k);
        int nd = mesh.node(i, j, k);
        Vec2 e = eta ? eta(x1, x2) : Vec2::Zero();
        double w = eta3 ? eta3(x1, x2) : 0.0;
        Vec2 gw = grad_eta3 ? grad_eta3(x1, x2) : Vec2::Zero();
        v[3 * nd + 0] = e[0] - x3 * gw[0];
        v[3 * nd + 1] = e[1] - x3 * gw[1];
        v[3 * nd + 2] = w;
      }
  return v;
}

}  // namespace pg
