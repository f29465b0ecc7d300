#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plategamma/plate2d.hpp"

using namespace pg;

namespace {

LoadSpec uniform_pressure(double q) {
  LoadSpec l;
  l.b[2] = ScalarLoad::constant(q);
  return l;
}

PlateMesh clamped_square(int n) { return PlateMesh(1.0, 1.0, n, n); }

}  // namespace

TEST_CASE("bending basis interpolates nodal data") {
  double hx = 0.3, hy = 0.7;
  // Check the Kronecker property of the 16 shape functions at the corners.
  for (int a = 0; a < 4; ++a) {
    double s = (a == 1 || a == 2) ? 1.0 : 0.0;
    double t = (a >= 2) ? 1.0 : 0.0;
    BendBasis bb = bend_basis(s, t, hx, hy);
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        int idx = 4 * b + c;
        double want_val = (b == a && c == 0) ? 1.0 : 0.0;
        double want_d1 = (b == a && c == 1) ? 1.0 : 0.0;
        double want_d2 = (b == a && c == 2) ? 1.0 : 0.0;
        double want_d12 = (b == a && c == 3) ? 1.0 : 0.0;
        CHECK(bb.val[idx] == doctest::Approx(want_val).epsilon(1e-13));
        CHECK(bb.d1[idx] == doctest::Approx(want_d1).epsilon(1e-13));
        CHECK(bb.d2[idx] == doctest::Approx(want_d2).epsilon(1e-13));
        CHECK(bb.d12[idx] == doctest::Approx(want_d12).epsilon(1e-13));
      }
  }
}

TEST_CASE("bending basis reproduces bicubic monomials") {
  // w = x^2 y + 3 x y^2 - x^2 has exact nodal data; interior values and
  // second derivatives must be reproduced.
  double hx = 0.4, hy = 0.25;
  auto w = [](double x, double y) { return x * x * y + 3 * x * y * y - x * x; };
  auto wx = [](double x, double y) { return 2 * x * y + 3 * y * y - 2 * x; };
  auto wy = [](double x, double y) { return x * x + 6 * x * y; };
  auto wxy = [](double x, double y) { return 2 * x + 6 * y; };
  double dofs[16];
  for (int a = 0; a < 4; ++a) {
    double x = (a == 1 || a == 2) ? hx : 0.0;
    double y = (a >= 2) ? hy : 0.0;
    dofs[4 * a + 0] = w(x, y);
    dofs[4 * a + 1] = wx(x, y);
    dofs[4 * a + 2] = wy(x, y);
    dofs[4 * a + 3] = wxy(x, y);
  }
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    double s = rng.uniform(), u = rng.uniform();
    BendBasis bb = bend_basis(s, u, hx, hy);
    double x = s * hx, y = u * hy;
    double got = 0, got11 = 0, got22 = 0, got12 = 0;
    for (int i = 0; i < 16; ++i) {
      got += bb.val[i] * dofs[i];
      got11 += bb.d11[i] * dofs[i];
      got22 += bb.d22[i] * dofs[i];
      got12 += bb.d12[i] * dofs[i];
    }
    CHECK(got == doctest::Approx(w(x, y)).epsilon(1e-12));
    CHECK(got11 == doctest::Approx(2 * y - 2).epsilon(1e-11));
    CHECK(got22 == doctest::Approx(6 * x).epsilon(1e-11));
    CHECK(got12 == doctest::Approx(wxy(x, y)).epsilon(1e-11));
  }
}

TEST_CASE("work terms") {
  MaterialField mat = make_isotropic(1.0, 0.3);

  SUBCASE("no loads give a zero right hand side") {
    PlateMesh mesh = clamped_square(3);
    LoadSpec none;
    Rule1D rule = thickness_rule(4);
    StiffnessCallback cb = [](int) {
      PointStiffness ps;
      ps.a = Mat3::Identity();
      ps.d = Mat3::Identity();
      ps.b = Mat3::Zero();
      return ps;
    };
    LimitSystem sys = assemble_limit_system(mesh, cb, &none, &rule);
    CHECK(sys.rhs.norm() == 0.0);
  }

  SUBCASE("transverse volume load works only against the deflection") {
    PlateMesh mesh = clamped_square(4);
    LoadSpec l = uniform_pressure(1.0);
    KLSolution sol = solve_limit(mesh, mat, l);
    CHECK(sol.mem.norm() < 1e-13);
    CHECK(sol.bend.norm() > 0);
    // Work against the solved deflection equals the integral of it.
    double wq = 0;
    Rule1D g = gauss_legendre(6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        wq += 0.25 * g.w[i] * g.w[j] *
              sol.deflection(0.5 * (1 + g.x[i]) * 0.999,
                             0.5 * (1 + g.x[j]) * 0.999);
    CHECK(wq > 0);
  }

  SUBCASE("equal face tractions act as a pure membrane load") {
    // In-plane tractions q/2 on both faces: membrane resultant q, no couple.
    PlateMesh mesh(1.0, 1.0, 6, 6, {true, false, true, true});
    LoadSpec l;
    l.f_plus[0] = Poly2::constant(0.5);
    l.f_minus[0] = Poly2::constant(0.5);
    KLSolution sol = solve_limit(mesh, mat, l);
    CHECK(sol.bend.norm() <= 1e-12 * std::max(1.0, sol.mem.norm()));

    // Opposite tractions +-q/2: pure couple, no membrane response.
    LoadSpec lc;
    lc.f_plus[0] = Poly2::constant(0.5);
    lc.f_minus[0] = Poly2(Eigen::MatrixXd::Constant(1, 1, -0.5));
    KLSolution solc = solve_limit(mesh, mat, lc);
    CHECK(solc.mem.norm() <= 1e-12 * std::max(1.0, solc.bend.norm()));
    CHECK(solc.bend.norm() > 0);
  }
}

TEST_CASE("assembled system is symmetric") {
  Rng rng(42);
  MaterialField mat = random_material(rng, 2);
  PlateMesh mesh(1.3, 0.8, 4, 3, {true, false, false, true});
  LoadSpec l = uniform_pressure(1.0);
  InPlaneQuad quad = plate_quadrature(mesh, 4);
  ReducedModel model = ReducedModel::build(mat, l, quad, 8);
  Rule1D rule = thickness_rule(8);
  StiffnessCallback cb = [&model](int qp) {
    const ReducedPoint& rp = model.pts[qp];
    return PointStiffness{rp.mom.m0.basis_matrix(), rp.mom.m1.basis_matrix(),
                          rp.mom.m2.basis_matrix(),
                          (rp.cap_f_n - rp.f_n).basis(),
                          (rp.cap_f_m - rp.f_m).basis()};
  };
  LimitSystem sys = assemble_limit_system(mesh, cb, &l, &rule);
  Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(sys.k.transpose()) - sys.k;
  CHECK(diff.norm() <= 1e-13 * sys.k.norm());
}

TEST_CASE("single element patch: affine membrane data gives constant strain") {
  PlateMesh mesh(0.8, 0.5, 1, 1, {true, true, true, true});
  KLSolution sol;
  sol.mesh = mesh;
  sol.mem = Eigen::VectorXd::Zero(8);
  sol.bend = Eigen::VectorXd::Zero(16);
  // eta = (0.1 x1 + 0.3 x2, -0.2 x1 + 0.05 x2)
  for (int j = 0; j <= 1; ++j)
    for (int i = 0; i <= 1; ++i) {
      double x = mesh.node_x1(i), y = mesh.node_x2(j);
      sol.mem[2 * mesh.node(i, j) + 0] = 0.1 * x + 0.3 * y;
      sol.mem[2 * mesh.node(i, j) + 1] = -0.2 * x + 0.05 * y;
    }
  Rng rng(43);
  Sym2 want = Sym2::from_components(0.1, 0.05, 0.5 * (0.3 - 0.2));
  for (int t = 0; t < 10; ++t) {
    Sym2 got = sol.membrane_strain(rng.uniform(0, 0.8), rng.uniform(0, 0.5));
    CHECK((got - want).norm() < 1e-14);
  }
  // Constant strain maps to a constant membrane resultant.
  MaterialField mat = make_isotropic(2.0, 0.25);
  LoadSpec none;
  ReducedPoint rp = reduce_at(mat, none, 0.1, 0.1, 4);
  Sym2 n_ref = rp.mom.m0.apply(want);
  InPlaneQuad quad = plate_quadrature(mesh, 3);
  ReducedModel model = ReducedModel::build(mat, none, quad, 4);
  std::vector<Sym2> n, m;
  limit_resultants(sol, model, &n, &m);
  for (const Sym2& ni : n) CHECK((ni - n_ref).norm() < 1e-13);
  for (const Sym2& mi : m) CHECK(mi.norm() < 1e-13);
}

TEST_CASE("zero loads give the zero solution") {
  MaterialField mat = make_isotropic(1.0, 0.3);
  LoadSpec none;
  KLSolution sol = solve_limit(clamped_square(4), mat, none);
  CHECK(sol.mem.norm() == 0.0);
  CHECK(sol.bend.norm() == 0.0);
}

TEST_CASE("clamped square plate under uniform pressure") {
  MaterialField mat = make_isotropic(1.0, 0.3);
  LoadSpec l = uniform_pressure(1.0);

  // Classical series value for the clamped square: w_c = 0.00126532 q L^4 / D.
  double d_plate = 1.0 / (12.0 * (1.0 - 0.09));
  double w_ref = 0.00126532 / d_plate;

  KLSolution sol = solve_limit(clamped_square(16), mat, l);
  double w_c = sol.deflection(0.5, 0.5);
  CHECK(w_c == doctest::Approx(w_ref).epsilon(2e-3));

  // Self convergence against a finer reference solve.
  KLSolution ref = solve_limit(clamped_square(48), mat, l);
  double wref48 = ref.deflection(0.5, 0.5);
  double e8 = std::abs(solve_limit(clamped_square(8), mat, l).deflection(0.5, 0.5) - wref48);
  double e16 = std::abs(w_c - wref48);
  double e24 = std::abs(solve_limit(clamped_square(24), mat, l).deflection(0.5, 0.5) - wref48);
  CHECK(e16 < e8);
  CHECK(e24 < e16);
  CHECK(e8 / e16 > 3.0);  // at least cubic-ish decay in practice
}

TEST_CASE("membrane load on an even material keeps the plate flat") {
  Rng rng(44);
  MaterialField mat = random_material(rng, 4, /*even=*/true);
  LoadSpec l;
  l.b[0] = ScalarLoad::constant(0.7);
  l.b[1] = ScalarLoad::constant(-0.3);
  KLSolution sol = solve_limit(clamped_square(6), mat, l);
  CHECK(sol.bend.norm() <= 1e-12 * std::max(1.0, sol.mem.norm()));
}

TEST_CASE("limit stress") {
  Rng rng(45);

  SUBCASE("without boundary displacement sigma equals the dual minimizer") {
    MaterialField mat = random_material(rng, 2);
    LoadSpec l = uniform_pressure(1.0);
    KLSolution sol = solve_limit(clamped_square(6), mat, l);
    LimitStressSample s = limit_stress_at(sol, mat, l, 0.37, 0.62, 0.21);
    CHECK((s.sigma - s.t).norm() == 0.0);
    // Transverse components carry exactly the transverse load data (zero).
    CHECK(std::abs(s.t(0, 2)) < 1e-14);
    CHECK(std::abs(s.t(1, 2)) < 1e-14);
    CHECK(std::abs(s.t(2, 2)) < 1e-14);
  }

  SUBCASE("transverse components equal the generalized force data") {
    MaterialField mat = random_material(rng, 2);
    LoadSpec l;
    l.h[2] = {Poly2::constant(0.4), Poly1({1.0, 0.7})};
    l.h[4] = {Poly2::constant(-0.3), Poly1::constant(1.0)};
    KLSolution sol = solve_limit(clamped_square(6), mat, l);
    double x1 = 0.4, x2 = 0.3, x3 = -0.17;
    LimitStressSample s = limit_stress_at(sol, mat, l, x1, x2, x3);
    ElasticityTensor c = mat(x1, x2, x3);
    Sym3 f = l.f_at(x1, x2, x3, c);
    CHECK((s.t.i3_vector() - f.i3_vector()).norm() < 1e-12);
  }

  SUBCASE("resultants of the stress field match the moment formulas") {
    MaterialField mat = random_material(rng, 2);
    LoadSpec l = uniform_pressure(0.6);
    l.g.eta3 = Poly2((Eigen::MatrixXd(2, 2) << 0, 0.05, 0.1, 0.02).finished());
    l.g.eta1 = Poly2((Eigen::MatrixXd(2, 1) << 0, 0.03).finished());
    KLSolution sol = solve_limit(clamped_square(6), mat, l);

    InPlaneQuad pts;
    pts.x1 = {0.21, 0.68};
    pts.x2 = {0.55, 0.31};
    pts.w = {1.0, 1.0};
    ReducedModel model = ReducedModel::build(mat, l, pts, 8);
    std::vector<Sym2> n, m;
    limit_resultants(sol, model, &n, &m);

    QuadGrid grid{pts, thickness_rule(8)};
    StressField sigma = limit_stress_field(sol, mat, l, grid);
    std::vector<Sym2> ns, ms;
    sigma.resultants(&ns, &ms);
    for (int q = 0; q < 2; ++q) {
      // sigma = T + C E(g): subtract the moments of C E(g).
      Sym2 egn, egm;
      for (int k = 0; k < grid.levels(); ++k) {
        ElasticityTensor c = mat(pts.x1[q], pts.x2[q], grid.rule.x[k]);
        Sym2 ceg = plane_part(c.apply(l.eg_at(pts.x1[q], pts.x2[q], grid.rule.x[k])));
        egn += grid.rule.w[k] * ceg;
        egm += (grid.rule.w[k] * grid.rule.x[k]) * ceg;
      }
      CHECK((ns[q] - egn - n[q]).norm() <= 1e-11 * std::max(1.0, n[q].norm()));
      CHECK((ms[q] - egm - m[q]).norm() <= 1e-11 * std::max(1.0, m[q].norm()));
    }
  }
}

TEST_CASE("projection onto affine-in-x3 fields") {
  InPlaneQuad pts;
  pts.x1 = {0.3};
  pts.x2 = {0.4};
  pts.w = {1.0};
  auto grid = std::make_shared<QuadGrid>(QuadGrid{pts, thickness_rule(8)});
  Rng rng(46);

  SUBCASE("quadratic profile projects to its mean part") {
    Sym2 a = random_sym2(rng);
    StressField s(grid);
    for (int k = 0; k < grid->levels(); ++k)
      s.at(0, k) = embed_plane((grid->rule.x[k] * grid->rule.x[k]) * a);
    StressField p = s.project_affine();
    // int x3^2 = 1/12 and int x3^3 = 0: projection is a/12 + 0 * x3.
    for (int k = 0; k < grid->levels(); ++k) {
      Sym2 want = (1.0 / 12.0) * a;
      CHECK((plane_part(p.at(0, k)) - want).norm() < 1e-14);
    }
  }

  SUBCASE("affine fields are fixed points; projection is idempotent") {
    Sym2 a = random_sym2(rng), b = random_sym2(rng);
    StressField s(grid);
    for (int k = 0; k < grid->levels(); ++k)
      s.at(0, k) = assemble_sym3(a + grid->rule.x[k] * b,
                                 Vec3(0.3, -0.1, 0.8 * grid->rule.x[k]));
    StressField p = s.project_affine();
    CHECK(p.l2_distance(s) < 1e-13);
    StressField pp = p.project_affine();
    CHECK(pp.l2_distance(p) < 1e-14);
  }
}

TEST_CASE("solved limit problem invariants") {
  Rng rng(47);
  MaterialField mat = random_material(rng, 2);
  LoadSpec l = uniform_pressure(1.0);
  l.b[0] = ScalarLoad::constant(0.3);
  l.h[2] = {Poly2::constant(0.25), Poly1({1.0, 0.5})};
  PlateMesh mesh(1.0, 1.2, 8, 8, {true, true, true, false});
  KLSolution sol = solve_limit(mesh, mat, l);
  InPlaneQuad quad = plate_quadrature(mesh, 4);
  ReducedModel model = ReducedModel::build(mat, l, quad, 8);

  SUBCASE("weak equilibrium re-evaluated from the solved fields") {
    CHECK(equilibrium_residual(sol, model, l) <= 1e-9);
  }

  SUBCASE("condensed stress is orthogonal to the admissible-variation class") {
    CHECK(structure_orthogonality_probe(sol, mat, l, 10, rng) <= 1e-8);
  }

  SUBCASE("energy identity between the full and condensed dual functionals") {
    double condensed = limit_dual_energy(sol, model);
    // Full route: (1/2) int cinv T.T + load constant, by quadrature.
    Rule1D rule = thickness_rule(8);
    double full = 0;
    for (int q = 0; q < quad.size(); ++q)
      for (int k = 0; k < rule.size(); ++k) {
        LimitStressSample s =
            limit_stress_at(sol, mat, l, quad.x1[q], quad.x2[q], rule.x[k]);
        ElasticityTensor cinv = mat(quad.x1[q], quad.x2[q], rule.x[k]).inverse();
        full += 0.5 * quad.w[q] * rule.w[k] * cinv.apply(s.t).dot(s.t);
      }
    CHECK(std::abs(full - condensed) <=
          1e-9 * std::max(1.0, std::abs(condensed)));
  }

  SUBCASE("compliance-weighted stress decomposes into limit kinematics") {
    // cinv T must equal [ E(u) block, psi ] built from the solved unknowns.
    for (int t = 0; t < 25; ++t) {
      double x1 = rng.uniform(0, 1.0), x2 = rng.uniform(0, 1.2),
             x3 = rng.uniform(-0.5, 0.5);
      LimitStressSample s = limit_stress_at(sol, mat, l, x1, x2, x3);
      Sym3 z = mat(x1, x2, x3).inverse().apply(s.t);
      Sym2 eu = sol.kl_strain(x1, x2, x3);
      Sym3 want = assemble_sym3(eu, s.psi);
      CHECK((z - want).norm() <= 1e-10 * std::max(1.0, want.norm()));
    }
  }
}
