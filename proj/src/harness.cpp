#include "plategamma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

namespace pg {

namespace {

// ---------------------------------------------------------------------------
// Field assembly on the 3d quadrature grid.

StressField gen_force_field(const Evaluators3D& ev, const QuadGrid& grid) {
  auto gp = std::make_shared<QuadGrid>(grid);
  StressField f(gp);
  for (int c = 0; c < grid.columns(); ++c)
    for (int l = 0; l < grid.levels(); ++l)
      f.at(c, l) =
          ev.gen_force(grid.plane.x1[c], grid.plane.x2[c], grid.rule.x[l]);
  return f;
}

StressField boundary_stress_field(const MaterialField& mat,
                                  const LoadSpec& loads, const QuadGrid& grid) {
  auto gp = std::make_shared<QuadGrid>(grid);
  StressField f(gp);
  if (!loads.has_g()) return f;
  for (int c = 0; c < grid.columns(); ++c)
    for (int l = 0; l < grid.levels(); ++l) {
      double x1 = grid.plane.x1[c], x2 = grid.plane.x2[c], x3 = grid.rule.x[l];
      f.at(c, l) = mat(x1, x2, x3).apply(loads.eg_at(x1, x2, x3));
    }
  return f;
}

StressField add_fields(const StressField& a, const StressField& b) {
  StressField out(a.grid_ptr());
  for (int c = 0; c < a.grid().columns(); ++c)
    for (int l = 0; l < a.grid().levels(); ++l)
      out.at(c, l) = a.at(c, l) + b.at(c, l);
  return out;
}

// ---------------------------------------------------------------------------
// One-dimensional cardinal bases of the plate spaces, as functions of the
// global coordinate.  Used to embed plate test functions into the 3d mesh.

struct Card1D {
  double val = 0, d = 0;
};

Card1D hat_1d(int i, double x, double h, int n) {
  int el = std::clamp(static_cast<int>(std::floor(x / h)), 0, n - 1);
  double s = x / h - el;
  Card1D c;
  if (i == el) {
    c.val = 1 - s;
    c.d = -1.0 / h;
  } else if (i == el + 1) {
    c.val = s;
    c.d = 1.0 / h;
  }
  return c;
}

// Cubic Hermite cardinal functions at grid node i: kind 0 interpolates the
// value, kind 1 the derivative.
Card1D hermite_1d(int i, int kind, double x, double h, int n) {
  int el = std::clamp(static_cast<int>(std::floor(x / h)), 0, n - 1);
  double s = x / h - el;
  Card1D c;
  double s2 = s * s, s3 = s2 * s;
  if (i == el) {
    if (kind == 0) {
      c.val = 1 - 3 * s2 + 2 * s3;
      c.d = (-6 * s + 6 * s2) / h;
    } else {
      c.val = h * (s - 2 * s2 + s3);
      c.d = 1 - 4 * s + 3 * s2;
    }
  } else if (i == el + 1) {
    if (kind == 0) {
      c.val = 3 * s2 - 2 * s3;
      c.d = (6 * s - 6 * s2) / h;
    } else {
      c.val = h * (s3 - s2);
      c.d = 3 * s2 - 2 * s;
    }
  }
  return c;
}

struct SparseVec {
  std::vector<int> idx;
  std::vector<double> val;

  double dot(const Eigen::VectorXd& v) const {
    double s = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) s += val[k] * v[idx[k]];
    return s;
  }
};

// Nodal interpolant of the limit-kinematics extension of one plate test
// function.  dof 0/1: membrane component; dof 2..5: bending kind
// (value, d1, d2, d12).
SparseVec kl_test_interpolant(const BrickMesh3D& mesh, const PlateMesh& plate,
                              int pi, int pj, int dof) {
  SparseVec v;
  double hx = plate.hx(), hy = plate.hy();
  double x1_lo = std::max(0.0, plate.node_x1(pi) - hx) - 1e-12;
  double x1_hi = std::min(plate.l1, plate.node_x1(pi) + hx) + 1e-12;
  double x2_lo = std::max(0.0, plate.node_x2(pj) - hy) - 1e-12;
  double x2_hi = std::min(plate.l2, plate.node_x2(pj) + hy) + 1e-12;

  for (int j = 0; j <= mesh.base.ny; ++j) {
    double x2 = mesh.base.node_x2(j);
    if (x2 < x2_lo || x2 > x2_hi) continue;
    for (int i = 0; i <= mesh.base.nx; ++i) {
      double x1 = mesh.base.node_x1(i);
      if (x1 < x1_lo || x1 > x1_hi) continue;
      if (dof < 2) {
        double w = hat_1d(pi, x1, hx, plate.nx).val *
                   hat_1d(pj, x2, hy, plate.ny).val;
        if (w == 0) continue;
        for (int k = 0; k <= mesh.nz; ++k) {
          v.idx.push_back(3 * mesh.node(i, j, k) + dof);
          v.val.push_back(w);
        }
      } else {
        int kind = dof - 2;
        int kx = (kind == 1 || kind == 3) ? 1 : 0;
        int ky = (kind == 2 || kind == 3) ? 1 : 0;
        Card1D cx = hermite_1d(pi, kx, x1, hx, plate.nx);
        Card1D cy = hermite_1d(pj, ky, x2, hy, plate.ny);
        double w = cx.val * cy.val;
        double g1 = cx.d * cy.val;
        double g2 = cx.val * cy.d;
        if (w == 0 && g1 == 0 && g2 == 0) continue;
        for (int k = 0; k <= mesh.nz; ++k) {
          double x3 = mesh.node_x3(k);
          int nd = mesh.node(i, j, k);
          if (g1 != 0) {
            v.idx.push_back(3 * nd + 0);
            v.val.push_back(-x3 * g1);
          }
          if (g2 != 0) {
            v.idx.push_back(3 * nd + 1);
            v.val.push_back(-x3 * g2);
          }
          if (w != 0) {
            v.idx.push_back(3 * nd + 2);
            v.val.push_back(w);
          }
        }
      }
    }
  }
  return v;
}

double quad_form(const Eigen::SparseMatrix<double>& g, const SparseVec& v) {
  // The interpolants are short; a scan over their entries is cheap.
  double acc = 0;
  for (std::size_t a = 0; a < v.idx.size(); ++a) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(g, v.idx[a]); it; ++it)
      for (std::size_t b = 0; b < v.idx.size(); ++b)
        if (v.idx[b] == it.row()) acc += v.val[b] * it.value() * v.val[a];
  }
  return acc;
}

// Weak resultant-equilibrium metric of a 3d stress field against the
// discrete limit test basis of the plate mesh: the midplane test functions
// are extended by the limit kinematics, interpolated onto the 3d mesh, and
// paired with the re-evaluated equilibrium residual.
double kl_equilibrium_residual(const BrickMesh3D& mesh, const PlateMesh& plate,
                               const Evaluators3D& ev, const StressField& t,
                               const StressField& f_field, double eps) {
  Eigen::VectorXd scale3;
  Eigen::VectorXd r3 = equilibrium_residual_vector(mesh, ev, t, eps, &scale3);
  Eigen::VectorXd w3 = displacement_work_vector(mesh, ev);
  Eigen::SparseMatrix<double> gram = scaled_strain_gram(mesh, eps);
  double tf_norm = t.l2_distance(f_field);

  for (int k = 0; k <= mesh.nz; ++k)
    for (int j = 0; j <= mesh.base.ny; ++j)
      for (int i = 0; i <= mesh.base.nx; ++i)
        if (mesh.node_constrained(i, j))
          w3.segment<3>(3 * mesh.node(i, j, k)).setZero();

  double worst = 0;
  for (int pj = 0; pj <= plate.ny; ++pj)
    for (int pi = 0; pi <= plate.nx; ++pi) {
      if (plate.node_clamped(pi, pj)) continue;
      for (int dof = 0; dof < 6; ++dof) {
        SparseVec v = kl_test_interpolant(mesh, plate, pi, pj, dof);
        if (v.idx.empty()) continue;
        double res = v.dot(r3);
        double den = tf_norm * std::sqrt(std::max(0.0, quad_form(gram, v))) +
                     std::abs(v.dot(w3));
        if (den < 1e-300) continue;
        worst = std::max(worst, std::abs(res) / den);
      }
    }
  return worst;
}

}  // namespace

StudyResult run_study(const ProblemConfig& cfg) {
  double coer = sampled_coercivity(cfg.material, cfg.l1, cfg.l2);
  if (!(coer > 0))
    throw CoercivityError("configured material is not coercive (sampled " +
                          std::to_string(coer) + ")");

  PlateMesh plate = cfg.plate_mesh();
  BrickMesh3D mesh = cfg.brick_mesh();

  PlateSolveOptions popts;
  popts.qpn = cfg.plate_qpn;
  popts.x3_nodes = cfg.thickness_nodes;
  KLSolution sol2d = solve_limit(plate, cfg.material, cfg.loads, popts);

  InPlaneQuad pq = plate_quadrature(plate, cfg.plate_qpn);
  ReducedModel pmodel =
      ReducedModel::build(cfg.material, cfg.loads, pq, cfg.thickness_nodes);

  StudyResult res;
  res.limit_energy = limit_dual_energy(sol2d, pmodel);
  res.limit_center_deflection = sol2d.deflection(0.5 * cfg.l1, 0.5 * cfg.l2);
  res.plate_equilibrium_rel =
      equilibrium_residual(sol2d, pmodel, cfg.loads, cfg.plate_qpn);

  Rng rng(cfg.seed);
  res.ortho_rel =
      structure_orthogonality_probe(sol2d, cfg.material, cfg.loads, 10, rng,
                                    cfg.plate_qpn, cfg.thickness_nodes);

  // Energy identity: the full dual energy of the limit stress equals the
  // condensed closed form on the same discrete measure.
  {
    Rule1D rule =
        thickness_rule(cfg.thickness_nodes, cfg.material.thickness_breaks);
    long double full = 0;
    for (int q = 0; q < pq.size(); ++q)
      for (int k = 0; k < rule.size(); ++k) {
        LimitStressSample s = limit_stress_at(sol2d, cfg.material, cfg.loads,
                                              pq.x1[q], pq.x2[q], rule.x[k]);
        ElasticityTensor cinv =
            cfg.material(pq.x1[q], pq.x2[q], rule.x[k]).inverse();
        full += 0.5L * pq.w[q] * rule.w[k] * cinv.apply(s.t).dot(s.t);
      }
    res.energy_identity_rel =
        std::abs(static_cast<double>(full) - res.limit_energy) /
        std::max(std::abs(res.limit_energy), 1e-300);
  }

  // Structure decomposition of the limit stress at seeded sample points.
  {
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
      double x1 = rng.uniform(0, cfg.l1);
      double x2 = rng.uniform(0, cfg.l2);
      double x3 = rng.uniform(-0.5, 0.5);
      LimitStressSample s =
          limit_stress_at(sol2d, cfg.material, cfg.loads, x1, x2, x3);
      Sym3 z = cfg.material(x1, x2, x3).inverse().apply(s.t);
      Sym3 want = assemble_sym3(sol2d.kl_strain(x1, x2, x3), s.psi);
      worst = std::max(worst, (z - want).norm() / std::max(1.0, want.norm()));
    }
    res.structure_rel = worst;
  }

  QuadGrid grid = brick_quadrature(mesh);
  StressField profile_limit;
  StressField sigma_limit = limit_stress_field(sol2d, cfg.material, cfg.loads,
                                               grid, &profile_limit, nullptr);
  res.limit_stress_norm = sigma_limit.l2_norm();

  Evaluators3D ev = make_evaluators(cfg.material, cfg.loads);
  StressField ceg = boundary_stress_field(cfg.material, cfg.loads, grid);
  StressField f_field = gen_force_field(ev, grid);
  StressField eg_field(sigma_limit.grid_ptr());
  for (int c = 0; c < grid.columns(); ++c)
    for (int l = 0; l < grid.levels(); ++l)
      eg_field.at(c, l) = cfg.loads.eg_at(grid.plane.x1[c], grid.plane.x2[c],
                                          grid.rule.x[l]);

  std::vector<double> eps = cfg.eps;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  res.rows.resize(eps.size());

  auto run_one = [&](std::size_t i) {
    Solve3DOptions opts;
    opts.eps = eps[i];
    opts.enhanced = cfg.enhanced;
    opts.method = cfg.method;
    opts.cg_tol = cfg.cg_tol;
    PrimalSolution3D sol = solve_primal(mesh, ev, opts);

    EpsRow row;
    row.eps = eps[i];
    row.duality_gap_rel = sol.duality_gap_rel;
    row.dual_energy = sol.dual_energy;
    row.iterations = sol.iterations;
    row.solve_residual = sol.solve_residual;
    row.energy_gap_rel = std::abs(sol.dual_energy - res.limit_energy) /
                         std::max(std::abs(res.limit_energy), 1e-300);

    StressField sigma_eps = add_fields(sol.stress, ceg);
    StressField diff = sigma_eps - sigma_limit;
    row.stress_err = diff.l2_norm();
    row.transverse_err = diff.transverse_l2_norm();

    std::vector<Sym2> n_eps, m_eps, n_lim, m_lim;
    sigma_eps.resultants(&n_eps, &m_eps);
    sigma_limit.resultants(&n_lim, &m_lim);
    row.resultant_n_err = l2_distance(grid.plane, n_eps, n_lim);
    row.resultant_m_err = l2_distance(grid.plane, m_eps, m_lim);

    StressField w_profile = add_fields(sol.scaled_strain, eg_field);
    row.kl_profile_dist = w_profile.l2_distance(profile_limit);

    row.equilibrium_rel =
        kl_equilibrium_residual(mesh, plate, ev, sol.stress, f_field, eps[i]);
    res.rows[i] = row;
  };

  int workers =
      std::max(1, std::min<int>(cfg.threads, static_cast<int>(eps.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < eps.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= eps.size()) break;
          run_one(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    double e0 = res.rows[i - 1].stress_err, e1 = res.rows[i].stress_err;
    double h0 = res.rows[i - 1].eps, h1 = res.rows[i].eps;
    if (e0 > 0 && e1 > 0 && h0 != h1)
      res.rows[i].stress_rate = std::log(e0 / e1) / std::log(h0 / h1);
  }

  const CheckThresholds& th = cfg.checks;
  StudyChecks& c = res.checks;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const EpsRow& r = res.rows[i];
    if (th.duality_gap_rel > 0 && r.duality_gap_rel > th.duality_gap_rel)
      c.duality = false;
    if (th.equilibrium_rel > 0 && r.equilibrium_rel > th.equilibrium_rel)
      c.equilibrium = false;
    if (th.liminf_slack_rel > 0 &&
        r.dual_energy <
            res.limit_energy - th.liminf_slack_rel * std::abs(res.limit_energy))
      c.liminf = false;
    if (i > 0) {
      const EpsRow& p = res.rows[i - 1];
      if (th.monotone_stress && !(r.stress_err < p.stress_err))
        c.monotone_stress = false;
      if (th.monotone_transverse && !(r.transverse_err < p.transverse_err))
        c.monotone_transverse = false;
      if (th.stress_ratio_max > 0 &&
          !(r.stress_err <= th.stress_ratio_max * p.stress_err))
        c.stress_ratio = false;
    }
  }
  if (!res.rows.empty() && th.energy_gap_rel > 0 &&
      res.rows.back().energy_gap_rel > th.energy_gap_rel)
    c.energy_gap = false;
  if (th.structure_rel > 0 && res.structure_rel > th.structure_rel)
    c.structure = false;
  if (th.ortho_rel > 0 && res.ortho_rel > th.ortho_rel) c.ortho = false;
  if (th.plate_equilibrium_rel > 0 &&
      res.plate_equilibrium_rel > th.plate_equilibrium_rel)
    c.plate_equilibrium = false;
  if (th.energy_identity_rel > 0 &&
      res.energy_identity_rel > th.energy_identity_rel)
    c.energy_identity = false;
  return res;
}

// ---------------------------------------------------------------------------
// Reports.

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_or_throw(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out.good()) throw Error("write failed for '" + path + "'");
}

const char* flag(bool ok) { return ok ? "pass" : "FAIL"; }

}  // namespace

void emit_report(const StudyResult& res, const ProblemConfig& cfg,
                 const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::string csv =
      "eps,stress_err,stress_rate,resultant_n_err,resultant_m_err,"
      "transverse_err,kl_profile_dist,duality_gap_rel,dual_energy,"
      "limit_energy,energy_gap_rel,equilibrium_rel,iterations,"
      "solve_residual,monotone_ok\n";
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const EpsRow& r = res.rows[i];
    bool monotone = i == 0 || r.stress_err < res.rows[i - 1].stress_err;
    csv += fmt(r.eps) + "," + fmt(r.stress_err) + "," + fmt(r.stress_rate) +
           "," + fmt(r.resultant_n_err) + "," + fmt(r.resultant_m_err) + "," +
           fmt(r.transverse_err) + "," + fmt(r.kl_profile_dist) + "," +
           fmt(r.duality_gap_rel) + "," + fmt(r.dual_energy) + "," +
           fmt(res.limit_energy) + "," + fmt(r.energy_gap_rel) + "," +
           fmt(r.equilibrium_rel) + "," + std::to_string(r.iterations) + "," +
           fmt(r.solve_residual) + "," + (monotone ? "1" : "0") + "\n";
  }
  write_or_throw(out_dir + "/report.csv", csv);

  std::string s;
  s += "thickness sweep: " + cfg.material.name + ", mesh " +
       std::to_string(cfg.nx) + "x" + std::to_string(cfg.ny) + "x" +
       std::to_string(cfg.nz) + ", plate " + std::to_string(cfg.plate_nx) +
       "x" + std::to_string(cfg.plate_ny) + "\n";
  s += "limit dual energy      " + fmt(res.limit_energy) + "\n";
  s += "limit stress L2 norm   " + fmt(res.limit_stress_norm) + "\n";
  s += "center deflection      " + fmt(res.limit_center_deflection) + "\n\n";
  s += "  eps        stress_err   rate    transverse   energy_gap  duality\n";
  for (const EpsRow& r : res.rows) {
    char line[160];
    std::snprintf(line, sizeof(line),
                  "  %-9.4g  %-11.5g  %-6.3f  %-11.5g  %-10.4g  %-9.3g\n",
                  r.eps, r.stress_err, r.stress_rate, r.transverse_err,
                  r.energy_gap_rel, r.duality_gap_rel);
    s += line;
  }
  s += "\nchecks\n";
  const StudyChecks& c = res.checks;
  s += std::string("  duality gap         ") + flag(c.duality) + "\n";
  s += std::string("  resultant equil.    ") + flag(c.equilibrium) + "\n";
  s += std::string("  stress monotone     ") + flag(c.monotone_stress) + "\n";
  s += std::string("  transverse monotone ") + flag(c.monotone_transverse) + "\n";
  s += std::string("  stress ratio        ") + flag(c.stress_ratio) + "\n";
  s += std::string("  energy gap          ") + flag(c.energy_gap) + "\n";
  s += std::string("  energy lower bound  ") + flag(c.liminf) + "\n";
  s += std::string("  structure decomp.   ") + flag(c.structure) + " (" +
       fmt(res.structure_rel) + ")\n";
  s += std::string("  stress orthogonality ") + flag(c.ortho) + " (" +
       fmt(res.ortho_rel) + ")\n";
  s += std::string("  plate equilibrium   ") + flag(c.plate_equilibrium) +
       " (" + fmt(res.plate_equilibrium_rel) + ")\n";
  s += std::string("  energy identity     ") + flag(c.energy_identity) + " (" +
       fmt(res.energy_identity_rel) + ")\n";
  s += std::string("\noverall: ") + (c.all() ? "PASS" : "FAIL") + "\n";
  write_or_throw(out_dir + "/summary.txt", s);

  if (cfg.gnuplot) {
    std::string dat = "# eps stress_err transverse_err energy_gap_rel\n";
    for (const EpsRow& r : res.rows)
      dat += fmt(r.eps) + " " + fmt(r.stress_err) + " " +
             fmt(r.transverse_err) + " " + fmt(r.energy_gap_rel) + "\n";
    write_or_throw(out_dir + "/convergence.dat", dat);
  }
}

void emit_reduced_model(const ProblemConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  PlateMesh plate = cfg.plate_mesh();

  auto sym_cols = [](const char* name) {
    std::string s;
    const char* suffix[6] = {"1111", "1122", "1112", "2222", "2212", "1212"};
    for (int k = 0; k < 6; ++k) s += std::string(",") + name + suffix[k];
    return s;
  };
  std::string csv = "x1,x2";
  csv += sym_cols("a");
  csv += sym_cols("b");
  csv += sym_cols("d");
  csv += sym_cols("chat");
  csv += ",fn11,fn22,fn12,fm11,fm22,fm12,zn11,zn22,zn12,zm11,zm22,zm12,c\n";

  auto sym_entries = [](const PlaneTensor& p) {
    std::string s;
    const int ij[6][4] = {{0, 0, 0, 0}, {0, 0, 1, 1}, {0, 0, 0, 1},
                          {1, 1, 1, 1}, {1, 1, 0, 1}, {0, 1, 0, 1}};
    for (const auto& e : ij)
      s += "," + fmt(p.component(e[0], e[1], e[2], e[3]));
    return s;
  };
  auto s2_entries = [](const Sym2& v) {
    return "," + fmt(v(0, 0)) + "," + fmt(v(1, 1)) + "," + fmt(v(0, 1));
  };

  for (int ej = 0; ej < plate.ny; ++ej)
    for (int ei = 0; ei < plate.nx; ++ei) {
      double x1 = (plate.node_x1(ei) + plate.node_x1(ei + 1)) / 2;
      double x2 = (plate.node_x2(ej) + plate.node_x2(ej + 1)) / 2;
      ReducedPoint rp =
          reduce_at(cfg.material, cfg.loads, x1, x2, cfg.thickness_nodes);
      csv += fmt(x1) + "," + fmt(x2);
      csv += sym_entries(rp.mom.m0);
      csv += sym_entries(rp.mom.m1);
      csv += sym_entries(rp.mom.m2);
      csv += sym_entries(rp.chat);
      csv += s2_entries(rp.f_n) + s2_entries(rp.f_m) + s2_entries(rp.z_n) +
             s2_entries(rp.z_m);
      csv += "," + fmt(rp.c_density) + "\n";
    }
  write_or_throw(out_dir + "/reduced_model.csv", csv);
}

// ---------------------------------------------------------------------------
// Self-check suite.

namespace {

// Quadratic minimization of C (A + b.e3):(A + b.e3) over b by central
// differences on the component form; shares nothing with the condensation
// path it cross-checks.
double min_transverse_energy_fd(const ElasticityTensor& c, const Sym2& abar) {
  auto energy = [&](const Vec3& b) {
    Sym3 full = embed_plane(abar) + odot_e3(b);
    double acc = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            acc += c.component(i, j, k, l) * full(i, j) * full(k, l);
    return acc;
  };
  Vec3 g;
  Mat3 h;
  double q0 = energy(Vec3::Zero());
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1.0;
    double qp = energy(e), qm = energy(-e);
    g[i] = 0.5 * (qp - qm);
    h(i, i) = qp - 2 * q0 + qm;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Vec3 epp = Vec3::Zero(), epm = Vec3::Zero();
      epp[i] = 1;
      epp[j] = 1;
      epm[i] = 1;
      epm[j] = -1;
      h(i, j) = h(j, i) = 0.25 * (energy(epp) + energy(-epp) - energy(epm) -
                                  energy(-epm));
    }
  return energy(h.ldlt().solve(-g));
}

double min_bending_energy_fd(const ReducedPoint& rp, const Sym2& abar) {
  auto q = [&](const Sym2& bbar) {
    double acc = 0;
    for (int k = 0; k < rp.rule.size(); ++k) {
      Sym2 e = bbar + rp.rule.x[k] * abar;
      acc += rp.rule.w[k] * rp.cbar[k].energy(e);
    }
    return acc;
  };
  Vec3 g;
  Mat3 h;
  double q0 = q(Sym2());
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1.0;
    Sym2 d = Sym2::from_basis(e);
    double qp = q(d), qm = q(-1.0 * d);
    g[i] = 0.5 * (qp - qm);
    h(i, i) = qp - 2 * q0 + qm;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Vec3 vp = Vec3::Zero(), vm = Vec3::Zero();
      vp[i] = 1;
      vp[j] = 1;
      vm[i] = 1;
      vm[j] = -1;
      h(i, j) = h(j, i) =
          0.25 * (q(Sym2::from_basis(vp)) + q(Sym2::from_basis(-1.0 * vp)) -
                  q(Sym2::from_basis(vm)) - q(Sym2::from_basis(-1.0 * vm)));
    }
  return 12.0 * q(Sym2::from_basis(h.ldlt().solve(-g)));
}

LoadSpec probe_loads(Rng& rng) {
  LoadSpec l;
  l.h[2] = {Poly2::constant(rng.uniform(-1, 1)), Poly1({1.0, 0.4})};
  l.h[3] = {Poly2::constant(rng.uniform(-1, 1)), Poly1::constant(1.0)};
  l.h[4] = {Poly2::constant(rng.uniform(-1, 1)), Poly1({0.5, -0.3})};
  return l;
}

}  // namespace

std::vector<CheckResult> check_suite(const ProblemConfig& cfg) {
  std::vector<CheckResult> out;
  Rng rng(cfg.seed);

  {
    CheckResult r{"plane-reduction-minimum", 0, 1e-9, false};
    for (int t = 0; t < 50; ++t) {
      MaterialField mat = random_material(rng, 2);
      double x3 = rng.uniform(-0.5, 0.5);
      ElasticityTensor c = mat(0, 0, x3);
      Sym2 abar = random_sym2(rng);
      double direct = plane_reduce(c).energy(abar);
      double minimum = min_transverse_energy_fd(c, abar);
      r.value = std::max(r.value, std::abs(direct - minimum) /
                                      std::max(1.0, std::abs(minimum)));
    }
    r.pass = r.value <= r.threshold;
    out.push_back(r);
  }

  {
    CheckResult r{"bending-reduction-minimum", 0, 1e-9, false};
    LoadSpec none;
    for (int t = 0; t < 50; ++t) {
      MaterialField mat = random_material(rng, 2);
      ReducedPoint rp = reduce_at(mat, none, 0, 0, cfg.thickness_nodes);
      Sym2 abar = random_sym2(rng);
      double direct = rp.chat.energy(abar);
      double minimum = min_bending_energy_fd(rp, abar);
      r.value = std::max(r.value, std::abs(direct - minimum) /
                                      std::max(1.0, std::abs(minimum)));
    }
    r.pass = r.value <= r.threshold;
    out.push_back(r);
  }

  {
    CheckResult r{"reconstruction-residual", 0, 1e-10, false};
    for (int t = 0; t < 20; ++t) {
      MaterialField mat = random_material(rng, 3);
      LoadSpec l = probe_loads(rng);
      ReducedPoint rp = reduce_at(mat, l, 0.2, 0.7, cfg.thickness_nodes);
      Sym2 sn = random_sym2(rng), sm = random_sym2(rng);
      PointReconstruction rec = reconstruct(rp, sn, sm);
      Sym2 n, m;
      for (int k = 0; k < rp.rule.size(); ++k) {
        Vec3 tres = rec.cz[k].i3_vector() - rp.f_transverse[k];
        r.value = std::max(r.value, tres.norm() /
                                        std::max(1.0, rp.f_transverse[k].norm()));
        Sym2 p = plane_part(rec.cz[k]);
        n += rp.rule.w[k] * p;
        m += (rp.rule.w[k] * rp.rule.x[k]) * p;
      }
      r.value = std::max(r.value, (n - sn).norm() / std::max(1.0, sn.norm()));
      r.value = std::max(r.value, (m - sm).norm() / std::max(1.0, sm.norm()));
    }
    r.pass = r.value <= r.threshold;
    out.push_back(r);
  }

  {
    CheckResult r{"correction-minimality", 0, 1e-10, false};
    MaterialField mat = random_material(rng, 2);
    LoadSpec l = probe_loads(rng);
    ReducedPoint rp = reduce_at(mat, l, 0.4, 0.3, cfg.thickness_nodes);
    Sym2 sn = random_sym2(rng), sm = random_sym2(rng);
    double fmin = f_perp_density(rp, sn, sm);
    PointReconstruction rec = reconstruct(rp, sn, sm);
    double at_min = cross_functional_density(rp, sn, sm, rec.lambda);
    r.value = std::abs(at_min - fmin) / std::max(1.0, std::abs(fmin));
    for (int t = 0; t < 100; ++t) {
      std::vector<Sym2> p(rp.rule.size());
      for (auto& s : p) s = random_sym2(rng);
      Sym2 n, m;
      for (int k = 0; k < rp.rule.size(); ++k) {
        n += rp.rule.w[k] * p[k];
        m += (rp.rule.w[k] * rp.rule.x[k]) * p[k];
      }
      std::vector<Sym3> sc(rp.rule.size());
      for (int k = 0; k < rp.rule.size(); ++k)
        sc[k] = embed_plane(p[k] - (n + (12.0 * rp.rule.x[k]) * m));
      double val = cross_functional_density(rp, sn, sm, sc);
      double viol = (fmin - val) / std::max(1.0, std::abs(val));
      r.value = std::max(r.value, viol);
    }
    r.pass = r.value <= r.threshold;
    out.push_back(r);
  }

  {
    CheckResult r{"even-material-decoupling", 0, 1e-12, false};
    LoadSpec none;
    for (int t = 0; t < 10; ++t) {
      MaterialField mat = random_material(rng, 4, /*even=*/true);
      ReducedPoint rp = reduce_at(mat, none, 0, 0, cfg.thickness_nodes);
      r.value = std::max(r.value, rp.mom.m1.norm());
    }
    r.pass = r.value <= r.threshold;
    out.push_back(r);
  }

  {
    CheckResult r{"homogeneous-compliance-identity", 0, 1e-10, false};
    LoadSpec none;
    for (int t = 0; t < 10; ++t) {
      MaterialField mat = random_material(rng, 0);
      ReducedPoint rp = reduce_at(mat, none, 0, 0, cfg.thickness_nodes);
      Sym2 sn = random_sym2(rng), sm = random_sym2(rng);
      double lhs = dual_limit_density(rp, sn, sm);
      PlaneTensor cbinv = rp.cbar[0].inverse();
      double rhs = 0;
      for (int k = 0; k < rp.rule.size(); ++k) {
        Sym2 p = plane_part(rp.affine_stress_at(sn, sm, k));
        rhs += 0.5 * rp.rule.w[k] * cbinv.apply(p).dot(p);
      }
      r.value = std::max(r.value,
                         std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    r.pass = r.value <= r.threshold;
    out.push_back(r);
  }

  {
    CheckResult r{"transverse-shear-free", 0, 1e-12, false};
    for (int t = 0; t < 10; ++t) {
      ElasticityTensor c0 = random_monoclinic_tensor(rng);
      MaterialField mat = make_homogeneous(c0);
      LoadSpec l;
      l.h[2] = {Poly2::constant(0.6), Poly1({1.0, 0.3})};  // normal force only
      ReducedPoint rp = reduce_at(mat, l, 0, 0, cfg.thickness_nodes);
      Sym2 sn = random_sym2(rng), sm = random_sym2(rng);
      PointReconstruction rec = reconstruct(rp, sn, sm);
      for (int k = 0; k < rp.rule.size(); ++k) {
        r.value = std::max(r.value, std::abs(rec.lambda[k](0, 2)));
        r.value = std::max(r.value, std::abs(rec.lambda[k](1, 2)));
      }
    }
    r.pass = r.value <= r.threshold;
    out.push_back(r);
  }

  {
    CheckResult r{"duality-identity", 0, cfg.checks.duality_gap_rel, false};
    BrickMesh3D mesh(PlateMesh(cfg.l1, cfg.l2, 6, 6, cfg.clamped), 3);
    Evaluators3D ev = make_evaluators(cfg.material, cfg.loads);
    Solve3DOptions opts;
    opts.eps = cfg.eps.empty() ? 0.2 : cfg.eps.front();
    opts.enhanced = cfg.enhanced;
    opts.method = cfg.method;
    opts.cg_tol = cfg.cg_tol;
    PrimalSolution3D sol = solve_primal(mesh, ev, opts);
    r.value = sol.duality_gap_rel;
    r.pass = r.value <= r.threshold || sol.dual_energy == 0;
    out.push_back(r);
  }

  {
    CheckResult r{"material-coercivity", 0, 0, false};
    r.value = sampled_coercivity(cfg.material, cfg.l1, cfg.l2);
    r.threshold = 1e-10;
    r.pass = r.value > r.threshold;
    out.push_back(r);
  }

  return out;
}

}  // namespace pg
