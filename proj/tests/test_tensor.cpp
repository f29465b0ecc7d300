#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plategamma/quadrature.hpp"
#include "plategamma/tensor.hpp"

using namespace pg;

TEST_CASE("basis round trip and identity coordinates") {
  Sym3 id = Sym3::identity();
  Vec6 v = id.basis();
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 1.0);
  CHECK(v[2] == 1.0);
  CHECK(v[3] == 0.0);
  CHECK(v[4] == 0.0);
  CHECK(v[5] == 0.0);

  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    Sym3 a = random_sym3(rng);
    Sym3 b = Sym3::from_basis(a.basis());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(a(i, j) - b(i, j)) <=
              2 * std::numeric_limits<double>::epsilon() * std::abs(a(i, j)));
  }
}

TEST_CASE("basis coordinates preserve the contraction") {
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) {
    Sym3 a = random_sym3(rng);
    Sym3 b = random_sym3(rng);
    double via_basis = a.dot(b);
    double via_sum = oracle::contract(a, b);
    CHECK(std::abs(via_basis - via_sum) <=
          1e-14 * std::max(1.0, std::abs(via_sum)));
  }
}

TEST_CASE("off-diagonal tensors pick up the factor two") {
  Sym3 a = Sym3::from_components(0, 0, 0, 0.7, -0.2, 1.1);
  double expected = 2 * (0.7 * 0.7 + 0.2 * 0.2 + 1.1 * 1.1);
  CHECK(a.basis().squaredNorm() == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("isotropic apply matches the component oracle") {
  ElasticityTensor c = ElasticityTensor::isotropic(1.0, 1.0);
  auto comp = oracle::isotropic_components(1.0, 1.0);

  Sym3 tr = c.apply(Sym3::identity());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(tr(i, j) == doctest::Approx(i == j ? 5.0 : 0.0).epsilon(1e-14));

  CHECK(c.apply(Sym3()).norm() == 0.0);

  Sym3 e11 = Sym3::dyad(Vec3::UnitX(), Vec3::UnitX());
  Sym3 s = c.apply(e11);
  CHECK(s(0, 0) == doctest::Approx(3.0));
  CHECK(s(1, 1) == doctest::Approx(1.0));
  CHECK(s(2, 2) == doctest::Approx(1.0));
  CHECK(std::abs(s(0, 1)) < 1e-15);

  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    Sym3 e = random_sym3(rng);
    Sym3 got = c.apply(e);
    Sym3 want = oracle::apply_components(comp, e);
    CHECK((got - want).norm() <= 1e-13 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("apply matches the component oracle for anisotropic tensors") {
  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    ElasticityTensor c = random_spd_tensor(rng);
    auto comp = oracle::components_of(c);
    Sym3 e = random_sym3(rng);
    Sym3 got = c.apply(e);
    Sym3 want = oracle::apply_components(comp, e);
    CHECK((got - want).norm() <= 1e-12 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("inverse") {
  CHECK((ElasticityTensor::identity().inverse().basis_matrix() -
         Mat6::Identity())
            .norm() < 1e-14);

  Rng rng(15);
  for (int t = 0; t < 50; ++t) {
    ElasticityTensor c = random_spd_tensor(rng);
    ElasticityTensor ci = c.inverse();
    Sym3 e = random_sym3(rng);
    Sym3 back = ci.apply(c.apply(e));
    CHECK((back - e).norm() <= 1e-12 * std::max(1.0, e.norm()));
  }

  ElasticityTensor c = ElasticityTensor::isotropic(1.0, 1.0);
  Sym3 s = c.inverse().apply(Sym3::identity());
  for (int i = 0; i < 3; ++i)
    CHECK(s(i, i) == doctest::Approx(1.0 / 5.0).epsilon(1e-13));

  Mat6 singular = Mat6::Identity();
  singular(5, 5) = 0.0;
  CHECK_THROWS_AS(
      ElasticityTensor::from_basis_matrix(singular).inverse(),
      CoercivityError);
}

TEST_CASE("coercivity constant") {
  CHECK(ElasticityTensor::identity().coercivity_constant() ==
        doctest::Approx(1.0));
  // Isotropic eigenvalues: 3*lambda + 2*mu on traces, 2*mu on deviators.
  CHECK(ElasticityTensor::isotropic(1.0, 1.0).coercivity_constant() ==
        doctest::Approx(2.0).epsilon(1e-13));
  Mat6 indef = Mat6::Identity();
  indef(0, 0) = -0.5;
  CHECK(ElasticityTensor::from_basis_matrix(indef).coercivity_constant() <=
        0.0);
}

TEST_CASE("component accessor honours the sqrt2 weights") {
  ElasticityTensor c = ElasticityTensor::identity();
  // Identity as a map on symmetric tensors has C_1313 = 1/2.
  CHECK(c.component(0, 2, 0, 2) == doctest::Approx(0.5));
  CHECK(c.component(2, 2, 2, 2) == doctest::Approx(1.0));

  ElasticityTensor iso = ElasticityTensor::isotropic(2.0, 3.0);
  CHECK(iso.component(0, 0, 0, 0) == doctest::Approx(8.0));
  CHECK(iso.component(0, 0, 1, 1) == doctest::Approx(2.0));
  CHECK(iso.component(0, 1, 0, 1) == doctest::Approx(3.0));
  CHECK(iso.component(0, 2, 2, 0) == doctest::Approx(3.0));
}

TEST_CASE("plane tensor mirrors the 3d behaviour") {
  PlaneTensor p = PlaneTensor::from_components([](int a, int b, int g, int d) {
    auto dd = [](int x, int y) { return x == y ? 1.0 : 0.0; };
    return 2.0 * dd(a, b) * dd(g, d) + 1.5 * (dd(a, g) * dd(b, d) + dd(a, d) * dd(b, g));
  });
  Sym2 e = Sym2::from_components(0.3, -0.7, 0.25);
  Sym2 s = p.apply(e);
  // s_ab = 2 tr(e) d_ab + 3 e_ab
  CHECK(s(0, 0) == doctest::Approx(2 * (-0.4) + 3 * 0.3));
  CHECK(s(1, 1) == doctest::Approx(2 * (-0.4) - 3 * 0.7));
  CHECK(s(0, 1) == doctest::Approx(3 * 0.25));
  CHECK(p.coercivity_constant() == doctest::Approx(3.0).epsilon(1e-13));
  Sym2 back = p.inverse().apply(s);
  CHECK((back - e).norm() < 1e-14);
}

TEST_CASE("embeddings and transverse extraction") {
  Sym2 a = Sym2::from_components(1.0, 2.0, 0.5);
  Sym3 e = embed_plane(a);
  CHECK(e(0, 0) == 1.0);
  CHECK(e(1, 1) == 2.0);
  CHECK(e(0, 1) == 0.5);
  CHECK(e(2, 2) == 0.0);
  CHECK(e(0, 2) == 0.0);

  Vec3 b(3.0, -1.0, 2.0);
  Sym3 d = odot_e3(b);
  CHECK(d(0, 2) == doctest::Approx(1.5));
  CHECK(d(1, 2) == doctest::Approx(-0.5));
  CHECK(d(2, 2) == doctest::Approx(2.0));
  CHECK(d.i3_vector().isApprox(Vec3(1.5, -0.5, 2.0)));

  Sym3 s = assemble_sym3(a, Vec3(7.0, 8.0, 9.0));
  CHECK(s(0, 2) == 7.0);
  CHECK(s(1, 2) == 8.0);
  CHECK(s(2, 2) == 9.0);
  CHECK(plane_part(s).dot(a) == doctest::Approx(a.dot(a)));
}

TEST_CASE("gauss rules integrate polynomials exactly") {
  for (int n = 1; n <= 12; ++n) {
    Rule1D r = gauss_legendre(n);
    double wsum = 0;
    for (double w : r.w) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // Highest exact monomial: degree 2n-1 (odd, integral zero) and 2n-2.
    int d = 2 * n - 2;
    double exact = 2.0 / (d + 1);
    double got = r.integrate([d](double x) { return std::pow(x, d); });
    CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    double odd = r.integrate([n](double x) { return std::pow(x, 2 * n - 1); });
    CHECK(std::abs(odd) < 1e-14);
  }
}

TEST_CASE("composite thickness rule respects breaks") {
  Rule1D r = thickness_rule(4, {-0.5, -0.1, 0.3, 0.5});
  CHECK(r.size() == 12);
  double len = r.integrate([](double) { return 1.0; });
  CHECK(len == doctest::Approx(1.0).epsilon(1e-14));
  double m1 = r.integrate([](double x) { return x; });
  CHECK(std::abs(m1) < 1e-15);
  double m2 = r.integrate([](double x) { return x * x; });
  CHECK(m2 == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  // Piecewise constant jump aligned with a break integrates exactly.
  double j = r.integrate([](double x) { return x < -0.1 ? 2.0 : -1.0; });
  CHECK(j == doctest::Approx(2.0 * 0.4 - 1.0 * 0.6).epsilon(1e-14));
}
