#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plategamma/reduction.hpp"

using namespace pg;

namespace {

LoadSpec no_loads() { return LoadSpec{}; }

// Correction fields orthogonal to the affine-in-x3 class: random in-plane
// samples with their zeroth and first moments removed, zero transverse
// column.
std::vector<Sym3> random_orthogonal_correction(Rng& rng, const Rule1D& rule) {
  std::vector<Sym2> p(rule.size());
  for (auto& s : p) s = random_sym2(rng);
  Sym2 n, m;
  for (int k = 0; k < rule.size(); ++k) {
    n += rule.w[k] * p[k];
    m += (rule.w[k] * rule.x[k]) * p[k];
  }
  std::vector<Sym3> sc(rule.size());
  for (int k = 0; k < rule.size(); ++k) {
    Sym2 proj = n + (12.0 * rule.x[k]) * m;
    sc[k] = embed_plane(p[k] - proj);
  }
  return sc;
}

ReducedPoint random_point(Rng& rng, int x3_degree = 2, bool with_load = false,
                          bool even = false) {
  MaterialField mat = random_material(rng, x3_degree, even);
  LoadSpec loads;
  if (with_load) {
    loads.h[2] = {Poly2::constant(rng.uniform(-1, 1)), Poly1({0.5, 1.0})};
    loads.h[3] = {Poly2::constant(rng.uniform(-1, 1)), Poly1::constant(1.0)};
    loads.h[4] = {Poly2::constant(rng.uniform(-1, 1)), Poly1({1.0, -0.4})};
  }
  return reduce_at(mat, loads, 0.3, 0.4, 8);
}

}  // namespace

TEST_CASE("transverse block of the isotropic tensor") {
  ShearBlock sb = shear_block(ElasticityTensor::isotropic(1.0, 1.0));
  CHECK(sb.m(0, 0) == doctest::Approx(1.0));
  CHECK(sb.m(1, 1) == doctest::Approx(1.0));
  CHECK(sb.m(2, 2) == doctest::Approx(3.0));
  CHECK(std::abs(sb.m(0, 1)) < 1e-15);
  CHECK(std::abs(sb.m(0, 2)) < 1e-15);
}

TEST_CASE("transverse block matches the component oracle") {
  Rng rng(21);
  ShearBlock id = shear_block(ElasticityTensor::identity());
  CHECK(id.m(0, 0) == doctest::Approx(0.5));
  CHECK(id.m(2, 2) == doctest::Approx(1.0));
  for (int t = 0; t < 25; ++t) {
    ElasticityTensor c = random_spd_tensor(rng);
    ShearBlock sb = shear_block(c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(sb.m(i, j) == doctest::Approx(c.component(i, 2, j, 2)));
  }
}

TEST_CASE("monoclinic tensors decouple the transverse shears") {
  Rng rng(22);
  for (int t = 0; t < 10; ++t) {
    ElasticityTensor c = random_monoclinic_tensor(rng);
    ShearBlock sb = shear_block(c);
    CHECK(std::abs(sb.m(0, 2)) < 1e-14);
    CHECK(std::abs(sb.m(1, 2)) < 1e-14);
  }
}

TEST_CASE("plane reduction of the isotropic tensor") {
  PlaneTensor cb = plane_reduce(ElasticityTensor::isotropic(1.0, 1.0));
  CHECK(cb.component(0, 0, 0, 0) == doctest::Approx(8.0 / 3.0));
  CHECK(cb.component(0, 0, 1, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(cb.component(0, 1, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("plane reduction equals the minimum over transverse columns") {
  Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    ElasticityTensor c = random_spd_tensor(rng);
    PlaneTensor cb = plane_reduce(c);
    Sym2 abar = random_sym2(rng);
    double direct = cb.energy(abar);
    double minimum =
        oracle::min_transverse_energy(oracle::components_of(c), abar);
    double scale = std::max(1.0, std::abs(minimum));
    CHECK(std::abs(direct - minimum) <= 1e-9 * scale);
    // Condensation never drops below the coercivity constant of C.
    CHECK(direct >= c.coercivity_constant() * abar.dot(abar) - 1e-12);
  }
}

TEST_CASE("minimizing transverse column for the isotropic tensor") {
  ElasticityTensor c = ElasticityTensor::isotropic(1.0, 1.0);
  Sym2 abar = Sym2::identity();
  Vec3 bmin;
  oracle::min_transverse_energy(oracle::components_of(c), abar, &bmin);
  CHECK(bmin[0] == doctest::Approx(0.0));
  CHECK(bmin[1] == doctest::Approx(0.0));
  CHECK(bmin[2] == doctest::Approx(-2.0 / 3.0));
  // At the minimizer the transverse components of the stress vanish.
  Sym3 full = embed_plane(abar) + odot_e3(bmin);
  Vec3 tr = c.apply(full).i3_vector();
  CHECK(tr.norm() < 1e-12);
}

TEST_CASE("thickness moments") {
  Rule1D rule = thickness_rule(8);
  PlaneTensor c0 = PlaneTensor::identity() * 2.5;

  SUBCASE("constant profile") {
    std::vector<PlaneTensor> samples(rule.size(), c0);
    Moments m = thickness_moments(samples, rule);
    CHECK((m.m0 - c0).norm() < 1e-14);
    CHECK(m.m1.norm() < 1e-15);
    CHECK((m.m2 - c0 * (1.0 / 12.0)).norm() < 1e-15);
  }

  SUBCASE("affine profile (1 + x3) c0") {
    std::vector<PlaneTensor> samples;
    for (int k = 0; k < rule.size(); ++k)
      samples.push_back(c0 * (1.0 + rule.x[k]));
    Moments m = thickness_moments(samples, rule);
    CHECK((m.m1 - c0 * (1.0 / 12.0)).norm() < 1e-14);
  }

  SUBCASE("even profile has no first moment") {
    std::vector<PlaneTensor> samples;
    for (int k = 0; k < rule.size(); ++k)
      samples.push_back(c0 * (1.0 + rule.x[k] * rule.x[k]));
    Moments m = thickness_moments(samples, rule);
    CHECK(m.m1.norm() < 1e-15);
  }
}

TEST_CASE("condensed bending stiffness") {
  Rng rng(24);

  SUBCASE("homogeneous: equals the membrane tensor") {
    ReducedPoint rp = random_point(rng, /*x3_degree=*/0);
    CHECK((rp.chat - rp.mom.m0).norm() <= 1e-12 * rp.mom.m0.norm());
  }

  SUBCASE("zero direction gives zero energy") {
    ReducedPoint rp = random_point(rng);
    CHECK(rp.chat.energy(Sym2()) == 0.0);
  }

  SUBCASE("equals 12 x the minimum over constant offsets") {
    for (int t = 0; t < 20; ++t) {
      ReducedPoint rp = random_point(rng);
      Sym2 abar = random_sym2(rng);
      double direct = rp.chat.energy(abar);

      // Independent quadratic minimization over the offset Bbar in Sym(2):
      // finite differences on the quadrature sum.
      auto q = [&](const Sym2& bbar) {
        double acc = 0;
        for (int k = 0; k < rp.rule.size(); ++k) {
          Sym2 e = bbar + rp.rule.x[k] * abar;
          acc += rp.rule.w[k] *
                 oracle::contract2(rp.cbar[k].apply(e), e);
        }
        return acc;
      };
      Vec3 g;
      Mat3 h;
      double q0 = q(Sym2());
      for (int i = 0; i < 3; ++i) {
        Vec3 ei = Vec3::Zero();
        ei[i] = 1.0;
        Sym2 di = Sym2::from_basis(ei);
        double qp = q(di), qm = q(-1.0 * di);
        g[i] = 0.5 * (qp - qm);
        h(i, i) = qp - 2 * q0 + qm;
      }
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          Vec3 vp = Vec3::Zero();
          vp[i] = 1.0;
          vp[j] = 1.0;
          Vec3 vm = Vec3::Zero();
          vm[i] = 1.0;
          vm[j] = -1.0;
          h(i, j) = h(j, i) =
              0.25 * (q(Sym2::from_basis(vp)) + q(Sym2::from_basis(-1.0 * vp)) -
                      q(Sym2::from_basis(vm)) - q(Sym2::from_basis(-1.0 * vm)));
        }
      Vec3 bmin = h.ldlt().solve(-g);
      double minimum = 12.0 * q(Sym2::from_basis(bmin));
      CHECK(std::abs(direct - minimum) <=
            1e-9 * std::max(1.0, std::abs(minimum)));
    }
  }

  SUBCASE("coercivity is inherited") {
    for (int t = 0; t < 10; ++t) {
      MaterialField mat = random_material(rng, 2);
      ReducedPoint rp = reduce_at(mat, no_loads(), 0.0, 0.0, 8);
      double cinf = sampled_coercivity(mat, 1.0, 1.0, 1, 1, 33);
      CHECK(rp.chat.coercivity_constant() >= cinf - 1e-9);
      CHECK(rp.mom.m0.coercivity_constant() >= cinf - 1e-9);
    }
  }
}

TEST_CASE("compliance blocks") {
  Rng rng(25);

  SUBCASE("decoupled when the first moment vanishes") {
    ReducedPoint rp = random_point(rng, 4, false, /*even=*/true);
    CHECK(rp.mom.m1.norm() < 1e-13);
    CHECK((rp.blocks.nn - rp.mom.m0.inverse().basis_matrix()).norm() < 1e-12);
    CHECK(rp.blocks.nm.norm() < 1e-12);
    CHECK(rp.blocks.mn.norm() < 1e-12);
    CHECK((rp.blocks.mm - (rp.mom.m2 * 12.0).inverse().basis_matrix()).norm() <
          1e-12);
  }

  SUBCASE("block formulas match a direct 6x6 solve") {
    for (int t = 0; t < 20; ++t) {
      ReducedPoint rp = random_point(rng, 3);
      Sym2 rn = random_sym2(rng);
      Sym2 rm = random_sym2(rng);

      // Direct solve of the coupled moment system.
      Eigen::Matrix<double, 6, 6> sys;
      sys.block<3, 3>(0, 0) = rp.mom.m0.basis_matrix();
      sys.block<3, 3>(0, 3) = 12.0 * rp.mom.m1.basis_matrix();
      sys.block<3, 3>(3, 0) = rp.mom.m1.basis_matrix();
      sys.block<3, 3>(3, 3) = 12.0 * rp.mom.m2.basis_matrix();
      Eigen::Matrix<double, 6, 1> rhs;
      rhs.head<3>() = rn.basis();
      rhs.tail<3>() = rm.basis();
      Eigen::Matrix<double, 6, 1> sol = sys.fullPivLu().solve(rhs);

      Sym2 zn = rp.blocks.apply_nn(rn) + rp.blocks.apply_nm(rm);
      Sym2 zm = rp.blocks.apply_mn(rn) + rp.blocks.apply_mm(rm);
      CHECK((zn.basis() - sol.head<3>()).norm() <=
            1e-11 * std::max(1.0, sol.norm()));
      CHECK((zm.basis() - sol.tail<3>()).norm() <=
            1e-11 * std::max(1.0, sol.norm()));

      // Transpose relation between the off-diagonal blocks.
      CHECK((rp.blocks.nm - 12.0 * rp.blocks.mn.transpose()).norm() < 1e-10);
    }
  }

  SUBCASE("schur identity for the membrane block") {
    ReducedPoint rp = random_point(rng, 2);
    // nn - nm mm^{-1} mn = m0^{-1}
    Mat3 s =
        rp.blocks.nn - rp.blocks.nm * rp.blocks.mm.inverse() * rp.blocks.mn;
    CHECK((s - rp.mom.m0.inverse().basis_matrix()).norm() < 1e-11);
  }
}

TEST_CASE("load reduction") {
  Rng rng(26);

  SUBCASE("no transverse load, no load tensors") {
    ReducedPoint rp = random_point(rng, 2, /*with_load=*/false);
    CHECK(rp.f_n.norm() == 0.0);
    CHECK(rp.f_m.norm() == 0.0);
    CHECK(rp.z_n.norm() < 1e-14);
    CHECK(rp.z_m.norm() < 1e-14);
    CHECK(rp.c_density == 0.0);
  }

  SUBCASE("monoclinic with normal load only") {
    ElasticityTensor c = random_monoclinic_tensor(rng);
    double f33 = 0.8;
    ShearBlock sb = shear_block(c);
    Sym2 f = load_tensor(c, sb, Vec3(0, 0, f33));
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b)
        CHECK(f(a, b) == doctest::Approx(c.component(a, b, 2, 2) * f33 /
                                         c.component(2, 2, 2, 2))
                             .epsilon(1e-12));
  }

  SUBCASE("isotropic with unit normal load") {
    ElasticityTensor c = ElasticityTensor::isotropic(1.0, 1.0);
    ShearBlock sb = shear_block(c);
    Sym2 f = load_tensor(c, sb, Vec3(0, 0, 1.0));
    CHECK(f(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(f(1, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(std::abs(f(0, 1)) < 1e-15);
    // Energy density of the transverse load: (1/2) cinv F.F = 1/6.
    Vec3 fv(0, 0, 1.0);
    CHECK(0.5 * fv.dot(sb.solve(fv)) == doctest::Approx(1.0 / 6.0));
  }
}

TEST_CASE("reconstruction") {
  Rng rng(27);

  SUBCASE("zero data gives zero fields") {
    ReducedPoint rp = random_point(rng);
    PointReconstruction rec = reconstruct(rp, Sym2(), Sym2());
    for (const Sym3& l : rec.lambda) CHECK(l.norm() < 1e-13);
    for (const Sym3& z : rec.big_z) CHECK(z.norm() < 1e-13);
  }

  SUBCASE("homogeneous, membrane data only") {
    MaterialField mat = random_material(rng, 0);
    ReducedPoint rp = reduce_at(mat, no_loads(), 0, 0, 8);
    Sym2 sn = random_sym2(rng);
    PointReconstruction rec = reconstruct(rp, sn, Sym2());
    Sym2 want = rp.mom.m0.inverse().apply(sn);
    CHECK((rec.z_bar_n - want).norm() <= 1e-12 * std::max(1.0, want.norm()));
    CHECK(rec.z_bar_m.norm() < 1e-12);
  }

  SUBCASE("pointwise system residuals") {
    for (int t = 0; t < 20; ++t) {
      ReducedPoint rp = random_point(rng, 3, /*with_load=*/true);
      Sym2 sn = random_sym2(rng);
      Sym2 sm = random_sym2(rng);
      PointReconstruction rec = reconstruct(rp, sn, sm);

      // Transverse line: (C Z)_i3 = F_i3 at every node.
      for (int k = 0; k < rp.rule.size(); ++k) {
        Vec3 res = rec.cz[k].i3_vector() - rp.f_transverse[k];
        CHECK(res.norm() <= 1e-10 * std::max(1.0, rp.f_transverse[k].norm()));
      }

      // Moment lines: resultants of C Z equal the data.
      Sym2 n, m;
      for (int k = 0; k < rp.rule.size(); ++k) {
        Sym2 p = plane_part(rec.cz[k]);
        n += rp.rule.w[k] * p;
        m += (rp.rule.w[k] * rp.rule.x[k]) * p;
      }
      CHECK((n - sn).norm() <= 1e-10 * std::max(1.0, sn.norm()));
      CHECK((m - sm).norm() <= 1e-10 * std::max(1.0, sm.norm()));

      // The correction is orthogonal to every affine-in-x3 field.
      for (int probe = 0; probe < 20; ++probe) {
        Sym2 a = random_sym2(rng), b = random_sym2(rng);
        Vec3 ta(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        double ip = 0, scale = 0;
        for (int k = 0; k < rp.rule.size(); ++k) {
          Sym3 probe_field =
              assemble_sym3(a + rp.rule.x[k] * b, ta * (1.0 + rp.rule.x[k]));
          ip += rp.rule.w[k] * rec.lambda[k].dot(probe_field);
          scale += rp.rule.w[k] * rec.lambda[k].norm() * probe_field.norm();
        }
        CHECK(std::abs(ip) <= 1e-9 * std::max(1.0, scale));
      }
    }
  }

  SUBCASE("monoclinic material with in-plane transverse load free") {
    // Transverse-shear profile and shear part of the correction vanish.
    for (int t = 0; t < 10; ++t) {
      ElasticityTensor c0 = random_monoclinic_tensor(rng);
      MaterialField mat = make_homogeneous(c0);
      LoadSpec loads;
      loads.h[2] = {Poly2::constant(0.7), Poly1({1.0, 0.5})};  // F33 only
      ReducedPoint rp = reduce_at(mat, loads, 0, 0, 8);
      Sym2 sn = random_sym2(rng);
      Sym2 sm = random_sym2(rng);
      PointReconstruction rec = reconstruct(rp, sn, sm);
      for (int k = 0; k < rp.rule.size(); ++k) {
        CHECK(std::abs(rec.z[k][0]) < 1e-12);
        CHECK(std::abs(rec.z[k][1]) < 1e-12);
        CHECK(std::abs(rec.lambda[k](0, 2)) < 1e-12);
        CHECK(std::abs(rec.lambda[k](1, 2)) < 1e-12);
      }
    }
  }
}

TEST_CASE("minimized cross functional") {
  Rng rng(28);

  SUBCASE("homogeneous, no transverse load: closed form") {
    MaterialField mat = random_material(rng, 0);
    ReducedPoint rp = reduce_at(mat, no_loads(), 0, 0, 8);
    Sym2 sn = random_sym2(rng);
    Sym2 sm = random_sym2(rng);
    double got = f_perp_density(rp, sn, sm);
    PlaneTensor cbinv = rp.cbar[0].inverse();
    double want = 0;
    for (int k = 0; k < rp.rule.size(); ++k) {
      Sym3 sl = rp.affine_stress_at(sn, sm, k);
      Sym2 p = plane_part(sl);
      want += 0.5 * rp.rule.w[k] * (cbinv.apply(p).dot(p) -
                                     rp.cinv[k].apply(sl).dot(sl));
    }
    CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
  }

  SUBCASE("minimality against random orthogonal corrections") {
    ReducedPoint rp = random_point(rng, 2, /*with_load=*/true);
    Sym2 sn = random_sym2(rng);
    Sym2 sm = random_sym2(rng);
    double fmin = f_perp_density(rp, sn, sm);
    for (int t = 0; t < 100; ++t) {
      std::vector<Sym3> sc = random_orthogonal_correction(rng, rp.rule);
      double val = cross_functional_density(rp, sn, sm, sc);
      CHECK(fmin <= val + 1e-10 * std::max(1.0, std::abs(val)));
    }
    // Equality at the reconstructed minimizer.
    PointReconstruction rec = reconstruct(rp, sn, sm);
    double at_min = cross_functional_density(rp, sn, sm, rec.lambda);
    CHECK(std::abs(at_min - fmin) <= 1e-10 * std::max(1.0, std::abs(fmin)));

    // First-order stationarity along random admissible directions.
    for (int t = 0; t < 20; ++t) {
      std::vector<Sym3> dir = random_orthogonal_correction(rng, rp.rule);
      const double h = 1e-4;
      std::vector<Sym3> plus(rec.lambda), minus(rec.lambda);
      for (int k = 0; k < rp.rule.size(); ++k) {
        plus[k] += h * dir[k];
        minus[k] += (-h) * dir[k];
      }
      double d = (cross_functional_density(rp, sn, sm, plus) -
                  cross_functional_density(rp, sn, sm, minus)) /
                 (2 * h);
      CHECK(std::abs(d) <= 1e-8);
    }
  }
}

TEST_CASE("dual limit energy density") {
  Rng rng(29);

  SUBCASE("zero data, no load") {
    ReducedPoint rp = random_point(rng);
    CHECK(dual_limit_density(rp, Sym2(), Sym2()) == doctest::Approx(0.0));
  }

  SUBCASE("homogeneous, no load: condensed compliance form") {
    MaterialField mat = random_material(rng, 0);
    ReducedPoint rp = reduce_at(mat, no_loads(), 0, 0, 8);
    Sym2 sn = random_sym2(rng);
    Sym2 sm = random_sym2(rng);
    double got = dual_limit_density(rp, sn, sm);
    PlaneTensor cbinv = rp.cbar[0].inverse();
    double want = 0;
    for (int k = 0; k < rp.rule.size(); ++k) {
      Sym2 p = plane_part(rp.affine_stress_at(sn, sm, k));
      want += 0.5 * rp.rule.w[k] * cbinv.apply(p).dot(p);
    }
    CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
  }

  SUBCASE("additivity at the minimizer") {
    ReducedPoint rp = random_point(rng, 2, /*with_load=*/true);
    Sym2 sn = random_sym2(rng);
    Sym2 sm = random_sym2(rng);
    PointReconstruction rec = reconstruct(rp, sn, sm);
    // Full dual energy of S + Lambda equals the limit density.
    double full = 0;
    for (int k = 0; k < rp.rule.size(); ++k) {
      Sym3 s = rp.affine_stress_at(sn, sm, k) + rec.lambda[k];
      full += 0.5 * rp.rule.w[k] * rp.cinv[k].apply(s).dot(s);
    }
    double limit = dual_limit_density(rp, sn, sm);
    CHECK(std::abs(full - limit) <= 1e-10 * std::max(1.0, std::abs(limit)));
  }
}

TEST_CASE("even materials decouple membrane and bending") {
  Rng rng(30);
  for (int t = 0; t < 10; ++t) {
    ReducedPoint rp = random_point(rng, 4, false, /*even=*/true);
    CHECK(rp.mom.m1.norm() <= 1e-12);
    CHECK(rp.blocks.nm.norm() <= 1e-12);
    CHECK(rp.blocks.mn.norm() <= 1e-12);
  }
}
