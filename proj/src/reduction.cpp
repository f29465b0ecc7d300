#include "plategamma/reduction.hpp"

#include <cmath>

namespace pg {

ShearBlock shear_block(const ElasticityTensor& c) {
  ShearBlock sb;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sb.m(i, j) = c.component(i, 2, j, 2);
  Eigen::LLT<Mat3> llt(sb.m);
  if (llt.info() != Eigen::Success)
    throw CoercivityError("shear_block: transverse block not positive definite");
  sb.inv = llt.solve(Mat3::Identity());
  return sb;
}

PlaneTensor plane_reduce(const ElasticityTensor& c) {
  ShearBlock sb = shear_block(c);
  Mat3 m;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = 1.0;
    Sym2 a = Sym2::from_basis(e);
    Sym3 ca = c.apply(embed_plane(a));
    Vec3 b = sb.solve(ca.i3_vector());
    Sym2 corr = plane_part(c.apply(odot_e3(b)));
    m.col(k) = (plane_part(ca) - corr).basis();
  }
  return PlaneTensor::from_basis_matrix(m);
}

Sym2 load_tensor(const ElasticityTensor& c, const ShearBlock& sb,
                 const Vec3& f_transverse) {
  return plane_part(c.apply(odot_e3(sb.solve(f_transverse))));
}

Moments thickness_moments(const std::vector<PlaneTensor>& cbar,
                          const Rule1D& rule) {
  if (static_cast<int>(cbar.size()) != rule.size())
    throw Error("thickness_moments: sample count does not match the rule");
  Mat3 m0 = Mat3::Zero(), m1 = Mat3::Zero(), m2 = Mat3::Zero();
  for (int k = 0; k < rule.size(); ++k) {
    double x = rule.x[k], w = rule.w[k];
    m0 += w * cbar[k].basis_matrix();
    m1 += (w * x) * cbar[k].basis_matrix();
    m2 += (w * x * x) * cbar[k].basis_matrix();
  }
  return {PlaneTensor::from_basis_matrix(m0), PlaneTensor::from_basis_matrix(m1),
          PlaneTensor::from_basis_matrix(m2)};
}

PlaneTensor hat_tensor(const Moments& mom) {
  PlaneTensor m0inv = mom.m0.inverse();
  Mat3 hat = mom.m2.basis_matrix() - mom.m1.basis_matrix() *
                                         m0inv.basis_matrix() *
                                         mom.m1.basis_matrix();
  return PlaneTensor::from_basis_matrix(12.0 * hat);
}

ComplianceBlocks compliance_blocks(const Moments& mom,
                                   const PlaneTensor& chat) {
  PlaneTensor m0inv = mom.m0.inverse();
  PlaneTensor chatinv = chat.inverse();
  const Mat3 a0 = m0inv.basis_matrix();
  const Mat3 a1 = mom.m1.basis_matrix();
  const Mat3 hi = chatinv.basis_matrix();
  ComplianceBlocks b;
  b.nn = a0 + 12.0 * a0 * a1 * hi * a1 * a0;
  b.nm = -12.0 * a0 * a1 * hi;
  b.mn = -hi * a1 * a0;
  b.mm = hi;
  return b;
}

ReducedPoint ReducedPoint::build(std::vector<ElasticityTensor> c_samples,
                                 std::vector<Sym3> f_samples, Rule1D rule) {
  const int n = rule.size();
  if (static_cast<int>(c_samples.size()) != n ||
      static_cast<int>(f_samples.size()) != n)
    throw Error("ReducedPoint: sample count does not match the rule");

  ReducedPoint rp;
  rp.rule = std::move(rule);
  rp.c = std::move(c_samples);
  rp.f_full = std::move(f_samples);
  rp.cinv.reserve(n);
  rp.shear.reserve(n);
  rp.cbar.reserve(n);
  rp.f_transverse.reserve(n);
  rp.f_plane.reserve(n);

  std::vector<PlaneTensor> cbar;
  for (int k = 0; k < n; ++k) {
    rp.cinv.push_back(rp.c[k].inverse());
    rp.shear.push_back(shear_block(rp.c[k]));
    rp.cbar.push_back(plane_reduce(rp.c[k]));
    Vec3 ft = rp.f_full[k].i3_vector();
    rp.f_transverse.push_back(ft);
    rp.f_plane.push_back(load_tensor(rp.c[k], rp.shear[k], ft));
  }

  rp.mom = thickness_moments(rp.cbar, rp.rule);
  rp.chat = hat_tensor(rp.mom);
  rp.blocks = compliance_blocks(rp.mom, rp.chat);

  Sym2 fn, fm, capfn, capfm;
  double cdens = 0;
  for (int k = 0; k < n; ++k) {
    double x = rp.rule.x[k], w = rp.rule.w[k];
    fn += w * rp.f_plane[k];
    fm += (w * x) * rp.f_plane[k];
    Sym2 fp = plane_part(rp.f_full[k]);
    capfn += w * fp;
    capfm += (w * x) * fp;
    cdens += 0.5 * w * rp.f_transverse[k].dot(
                       rp.shear[k].solve(rp.f_transverse[k]));
  }
  rp.f_n = fn;
  rp.f_m = fm;
  rp.cap_f_n = capfn;
  rp.cap_f_m = capfm;
  rp.c_density = cdens;

  PlaneTensor m0inv = rp.mom.m0.inverse();
  rp.z_m = rp.blocks.apply_mm(rp.mom.m1.apply(m0inv.apply(fn)) - fm);

  Sym2 t = fn + 12.0 * rp.mom.m1.apply(rp.z_m);
  rp.z_n = -1.0 * m0inv.apply(t);
  return rp;
}

Sym3 ReducedPoint::affine_stress_at(const Sym2& sn, const Sym2& sm,
                                    int k) const {
  Sym2 plane = sn + (12.0 * rule.x[k]) * sm;
  return assemble_sym3(plane, f_transverse[k]);
}

PointReconstruction reconstruct(const ReducedPoint& rp, const Sym2& sn,
                                const Sym2& sm) {
  PointReconstruction rec;
  rec.z_bar_n = rp.blocks.apply_nn(sn) + rp.blocks.apply_nm(sm) + rp.z_n;
  rec.z_bar_m = rp.blocks.apply_mn(sn) + rp.blocks.apply_mm(sm) + rp.z_m;
  const int n = rp.rule.size();
  rec.z.reserve(n);
  rec.big_z.reserve(n);
  rec.cz.reserve(n);
  rec.lambda.reserve(n);
  for (int k = 0; k < n; ++k) {
    Sym2 zbar = rec.z_bar_n + (12.0 * rp.rule.x[k]) * rec.z_bar_m;
    Vec3 czbar_t = rp.c[k].apply(embed_plane(zbar)).i3_vector();
    Vec3 z = rp.shear[k].solve(rp.f_transverse[k] - czbar_t);
    Sym3 big_z = embed_plane(zbar) + odot_e3(z);
    Sym3 cz = rp.c[k].apply(big_z);
    rec.z.push_back(z);
    rec.big_z.push_back(big_z);
    rec.cz.push_back(cz);
    rec.lambda.push_back(cz - rp.affine_stress_at(sn, sm, k));
  }
  return rec;
}

double f_perp_density(const ReducedPoint& rp, const Sym2& sn, const Sym2& sm) {
  PointReconstruction rec = reconstruct(rp, sn, sm);
  double acc = 0;
  for (int k = 0; k < rp.rule.size(); ++k) {
    Sym2 zbar = rec.z_bar_n + (12.0 * rp.rule.x[k]) * rec.z_bar_m;
    Sym3 sl = rp.affine_stress_at(sn, sm, k);
    acc += rp.rule.w[k] * (rp.cbar[k].energy(zbar) -
                           rp.cinv[k].apply(sl).dot(sl));
  }
  return 0.5 * acc + rp.c_density;
}

double dual_limit_density(const ReducedPoint& rp, const Sym2& sn,
                          const Sym2& sm) {
  double acc = 0;
  for (int k = 0; k < rp.rule.size(); ++k) {
    Sym3 sl = rp.affine_stress_at(sn, sm, k);
    acc += rp.rule.w[k] * rp.cinv[k].apply(sl).dot(sl);
  }
  return 0.5 * acc + f_perp_density(rp, sn, sm);
}

double cross_functional_density(const ReducedPoint& rp, const Sym2& sn,
                                const Sym2& sm, const std::vector<Sym3>& sc) {
  if (static_cast<int>(sc.size()) != rp.rule.size())
    throw Error("cross_functional_density: sample count mismatch");
  double acc = 0;
  for (int k = 0; k < rp.rule.size(); ++k) {
    Sym3 sl = rp.affine_stress_at(sn, sm, k);
    acc += rp.rule.w[k] * (rp.cinv[k].apply(sl).dot(sc[k]) +
                           0.5 * rp.cinv[k].apply(sc[k]).dot(sc[k]));
  }
  return acc;
}

ReducedModel ReducedModel::build(const MaterialField& mat,
                                 const LoadSpec& loads,
                                 const InPlaneQuad& grid, int x3_nodes) {
  ReducedModel model;
  model.grid = grid;
  model.pts.reserve(grid.size());
  Rule1D rule = thickness_rule(x3_nodes, mat.thickness_breaks);
  for (int p = 0; p < grid.size(); ++p) {
    std::vector<ElasticityTensor> cs;
    std::vector<Sym3> fs;
    cs.reserve(rule.size());
    fs.reserve(rule.size());
    for (int k = 0; k < rule.size(); ++k) {
      ElasticityTensor c = mat(grid.x1[p], grid.x2[p], rule.x[k]);
      cs.push_back(c);
      fs.push_back(loads.f_at(grid.x1[p], grid.x2[p], rule.x[k], c));
    }
    model.pts.push_back(ReducedPoint::build(std::move(cs), std::move(fs), rule));
  }
  return model;
}

double ReducedModel::f_perp(const std::vector<Sym2>& sn,
                            const std::vector<Sym2>& sm) const {
  double acc = 0;
  for (int p = 0; p < grid.size(); ++p)
    acc += grid.w[p] * f_perp_density(pts[p], sn[p], sm[p]);
  return acc;
}

double ReducedModel::dual_limit_energy(const std::vector<Sym2>& sn,
                                       const std::vector<Sym2>& sm) const {
  double acc = 0;
  for (int p = 0; p < grid.size(); ++p)
    acc += grid.w[p] * dual_limit_density(pts[p], sn[p], sm[p]);
  return acc;
}

ReducedPoint reduce_at(const MaterialField& mat, const LoadSpec& loads,
                       double x1, double x2, int x3_nodes) {
  Rule1D rule = thickness_rule(x3_nodes, mat.thickness_breaks);
  std::vector<ElasticityTensor> cs;
  std::vector<Sym3> fs;
  for (int k = 0; k < rule.size(); ++k) {
    ElasticityTensor c = mat(x1, x2, rule.x[k]);
    cs.push_back(c);
    fs.push_back(loads.f_at(x1, x2, rule.x[k], c));
  }
  return ReducedPoint::build(std::move(cs), std::move(fs), std::move(rule));
}

}  // namespace pg
