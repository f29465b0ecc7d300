#pragma once

#include <string>
#include <vector>

#include "plategamma/config.hpp"
#include "plategamma/plate2d.hpp"

namespace pg {

// Per-thickness row of the convergence study.
struct EpsRow {
  double eps = 0;
  double stress_err = 0;       // |sigma_eps - sigma|_L2
  double stress_rate = 0;      // log-ratio against the previous row
  double resultant_n_err = 0;  // midplane L2 of the zeroth-moment mismatch
  double resultant_m_err = 0;
  double transverse_err = 0;   // |(sigma_eps - sigma)_i3|_L2
  double kl_profile_dist = 0;  // scaled strain against the limit profile
  double duality_gap_rel = 0;
  double dual_energy = 0;
  double energy_gap_rel = 0;   // against the limit energy
  double equilibrium_rel = 0;  // weak resultant equilibrium of the 3d stress
  int iterations = 0;
  double solve_residual = 0;
};

struct StudyChecks {
  bool duality = true;
  bool equilibrium = true;
  bool monotone_stress = true;
  bool monotone_transverse = true;
  bool stress_ratio = true;
  bool energy_gap = true;
  bool liminf = true;
  bool structure = true;
  bool ortho = true;
  bool plate_equilibrium = true;
  bool energy_identity = true;

  bool all() const {
    return duality && equilibrium && monotone_stress && monotone_transverse &&
           stress_ratio && energy_gap && liminf && structure && ortho &&
           plate_equilibrium && energy_identity;
  }
};

struct StudyResult {
  std::vector<EpsRow> rows;
  double limit_energy = 0;
  double limit_stress_norm = 0;
  double limit_center_deflection = 0;
  double structure_rel = 0;
  double ortho_rel = 0;
  double plate_equilibrium_rel = 0;
  double energy_identity_rel = 0;
  StudyChecks checks;
};

// Full pipeline: preflight, limit solve, thickness sweep, metrics, checks.
StudyResult run_study(const ProblemConfig& cfg);

// Machine-readable outputs: report.csv, summary.txt, reduced_model.csv and
// optional gnuplot data.  Deterministic bytes for a given config.
void emit_report(const StudyResult& res, const ProblemConfig& cfg,
                 const std::string& out_dir);

// The reduced tensors sampled at the plate element centers.
void emit_reduced_model(const ProblemConfig& cfg, const std::string& out_dir);

// One named pass/fail line of the self-check suite.
struct CheckResult {
  std::string name;
  double value = 0;      // measured worst case
  double threshold = 0;
  bool pass = false;
};

// Seeded invariant suite over random constitutive data plus the configured
// problem; independent of any 3d solve except the duality spot check.
std::vector<CheckResult> check_suite(const ProblemConfig& cfg);

}  // namespace pg
