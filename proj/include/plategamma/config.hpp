#pragma once

#include <string>
#include <vector>

#include "plategamma/elasticity3d.hpp"
#include "plategamma/loads.hpp"
#include "plategamma/material.hpp"
#include "plategamma/mesh.hpp"

namespace pg {

// Pass/fail thresholds of the study-level checks.  Setting a threshold to
// zero disables that check.
struct CheckThresholds {
  double duality_gap_rel = 1e-11;
  double equilibrium_rel = 1e-8;
  bool monotone_stress = true;
  bool monotone_transverse = true;
  double stress_ratio_max = 0.8;
  double energy_gap_rel = 0.05;     // at the smallest thickness
  double liminf_slack_rel = 0.02;   // one-sided lower bound on dual energies
  double structure_rel = 1e-10;
  double ortho_rel = 1e-8;
  double plate_equilibrium_rel = 1e-9;
  double energy_identity_rel = 1e-9;
};

struct ProblemConfig {
  double l1 = 1.0, l2 = 1.0;
  std::array<bool, 4> clamped = {true, true, true, true};

  int nx = 16, ny = 16, nz = 4;
  int plate_nx = 32, plate_ny = 32;
  int thickness_nodes = 8;
  int plate_qpn = 4;

  MaterialField material = make_isotropic(1.0, 0.3);
  LoadSpec loads;

  std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};

  Solve3DOptions::Method method = Solve3DOptions::Method::kCG;
  double cg_tol = 1e-13;
  bool enhanced = true;

  CheckThresholds checks;
  std::uint64_t seed = 12345;
  bool gnuplot = false;
  int threads = 1;

  PlateMesh plate_mesh() const {
    return PlateMesh(l1, l2, plate_nx, plate_ny, clamped);
  }
  BrickMesh3D brick_mesh() const {
    return BrickMesh3D(PlateMesh(l1, l2, nx, ny, clamped), nz);
  }
};

// Parse the TOML study description.  Unknown material kinds, bad polynomial
// tables and malformed keys are reported with context.
ProblemConfig parse_config_text(const std::string& text);
ProblemConfig parse_config_file(const std::string& path);

// The desk-scale default study: clamped unit square, isotropic material,
// unit transverse load.
ProblemConfig default_config();

}  // namespace pg
