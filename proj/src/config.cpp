#include "plategamma/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "plategamma/toml.hpp"

namespace pg {

namespace {

Poly2 parse_poly2(const toml::Value& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + ": expected a matrix of rows");
  if (v.array.empty()) return Poly2();
  std::size_t cols = 0;
  for (const auto& row : v.array) {
    if (!row.is_array())
      throw ConfigError(what + ": each row must be an array");
    cols = std::max(cols, row.array.size());
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(v.array.size(), cols);
  for (std::size_t i = 0; i < v.array.size(); ++i)
    for (std::size_t j = 0; j < v.array[i].array.size(); ++j)
      c(i, j) = v.array[i].array[j].as_number(what);
  return Poly2(c);
}

Poly1 parse_poly1(const toml::Value& v, const std::string& what) {
  return Poly1(v.as_number_array(what));
}

ScalarLoad parse_scalar_load(const toml::Value& tbl, const std::string& what) {
  ScalarLoad s;
  if (const auto* p = tbl.find("plane")) s.plane = parse_poly2(*p, what);
  if (const auto* t = tbl.find("x3"))
    s.thick = parse_poly1(*t, what);
  else if (!s.plane.zero())
    s.thick = Poly1::constant(1.0);
  return s;
}

ProfileScale parse_scale(const toml::Value& mat, const char* x3_key,
                         const char* plane_key) {
  ProfileScale sc;
  if (const auto* p = mat.find(x3_key)) sc.x3_coeffs = p->as_number_array(x3_key);
  if (const auto* p = mat.find(plane_key)) {
    auto v = p->as_number_array(plane_key);
    if (v.size() != 4)
      throw ConfigError(std::string(plane_key) +
                        ": expected [c0, c_x1, c_x2, c_x1x2]");
    std::copy(v.begin(), v.end(), sc.plane.begin());
  }
  return sc;
}

ElasticityTensor parse_base_tensor(const toml::Value& mat,
                                   const std::string& kind) {
  if (kind == "isotropic") {
    return isotropic_stiffness(mat.at("youngs").as_number("youngs"),
                               mat.at("poisson").as_number("poisson"));
  }
  if (kind == "orthotropic") {
    return orthotropic_stiffness(
        mat.at("e1").as_number("e1"), mat.at("e2").as_number("e2"),
        mat.at("e3").as_number("e3"), mat.at("nu23").as_number("nu23"),
        mat.at("nu13").as_number("nu13"), mat.at("nu12").as_number("nu12"),
        mat.at("g23").as_number("g23"), mat.at("g13").as_number("g13"),
        mat.at("g12").as_number("g12"));
  }
  if (kind == "anisotropic") {
    auto v = mat.at("voigt").as_number_array("voigt");
    if (v.size() != 21)
      throw ConfigError(
          "anisotropic material: 'voigt' needs the 21 upper-triangle entries "
          "(rows 11,22,33,23,13,12)");
    Mat6 m;
    int idx = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) {
        m(i, j) = m(j, i) = v[idx++];
      }
    return stiffness_from_voigt(m);
  }
  throw ConfigError("unknown material kind '" + kind + "'");
}

MaterialField parse_material(const toml::Value& mat) {
  std::string kind = mat.string_or("kind", "isotropic");
  if (kind == "laminate") {
    const auto* layers = mat.find("layer");
    if (!layers || !layers->is_array() || layers->array.empty())
      throw ConfigError("laminate material: need [[material.layer]] entries");
    std::vector<Layer> ls;
    for (const auto& lt : layers->array) {
      Layer l;
      l.z_lo = lt.at("z_lo").as_number("z_lo");
      l.z_hi = lt.at("z_hi").as_number("z_hi");
      l.stiffness = parse_base_tensor(lt, lt.string_or("kind", "isotropic"));
      ls.push_back(l);
    }
    return make_laminate(ls);
  }
  if (kind == "blend") {
    const auto* a = mat.find("first");
    const auto* b = mat.find("second");
    if (!a || !b)
      throw ConfigError(
          "blend material: need [material.first] and [material.second]");
    ElasticityTensor ca =
        parse_base_tensor(*a, a->string_or("kind", "isotropic"));
    ElasticityTensor cb =
        parse_base_tensor(*b, b->string_or("kind", "isotropic"));
    ProfileScale w = parse_scale(mat, "weight_x3", "weight_plane");
    return make_blend(ca, cb, w);
  }
  ElasticityTensor base = parse_base_tensor(mat, kind);
  ProfileScale sc = parse_scale(mat, "scale_x3", "scale_plane");
  if (sc.trivial()) return make_homogeneous(base, kind);
  return make_scaled(base, sc, kind + "-graded");
}

LoadSpec parse_loads(const toml::Value& loads) {
  LoadSpec l;
  const char* b_keys[3] = {"b1", "b2", "b3"};
  const char* fp_keys[3] = {"fplus1", "fplus2", "fplus3"};
  const char* fm_keys[3] = {"fminus1", "fminus2", "fminus3"};
  const char* fl_keys[3] = {"flat1", "flat2", "flat3"};
  const char* h_keys[6] = {"h11", "h22", "h33", "h23", "h13", "h12"};
  for (int i = 0; i < 3; ++i) {
    if (const auto* v = loads.find(b_keys[i]))
      l.b[i] = parse_scalar_load(*v, b_keys[i]);
    if (const auto* v = loads.find(fp_keys[i]))
      l.f_plus[i] = parse_poly2(v->at("plane"), fp_keys[i]);
    if (const auto* v = loads.find(fm_keys[i]))
      l.f_minus[i] = parse_poly2(v->at("plane"), fm_keys[i]);
    if (const auto* v = loads.find(fl_keys[i]))
      l.f_lat[i] = parse_scalar_load(*v, fl_keys[i]);
  }
  for (int i = 0; i < 6; ++i)
    if (const auto* v = loads.find(h_keys[i]))
      l.h[i] = parse_scalar_load(*v, h_keys[i]);
  if (const auto* v = loads.find("g1")) l.g.eta1 = parse_poly2(v->at("plane"), "g1");
  if (const auto* v = loads.find("g2")) l.g.eta2 = parse_poly2(v->at("plane"), "g2");
  if (const auto* v = loads.find("g3")) l.g.eta3 = parse_poly2(v->at("plane"), "g3");
  return l;
}

}  // namespace

ProblemConfig parse_config_text(const std::string& text) {
  toml::Value root = toml::parse(text);
  if (root.int_or("version", 1) != 1)
    throw ConfigError("unsupported config version");

  ProblemConfig cfg;
  if (const auto* geo = root.find("geometry")) {
    cfg.l1 = geo->number_or("l1", 1.0);
    cfg.l2 = geo->number_or("l2", 1.0);
    if (const auto* edges = geo->find("clamped_edges")) {
      cfg.clamped = {false, false, false, false};
      if (!edges->is_array())
        throw ConfigError("clamped_edges: expected an array of edge names");
      for (const auto& e : edges->array) {
        const std::string& name = e.as_string("clamped_edges");
        if (name == "x0")
          cfg.clamped[kX0] = true;
        else if (name == "x1")
          cfg.clamped[kX1] = true;
        else if (name == "y0")
          cfg.clamped[kY0] = true;
        else if (name == "y1")
          cfg.clamped[kY1] = true;
        else
          throw ConfigError("clamped_edges: unknown edge '" + name + "'");
      }
      if (!(cfg.clamped[0] || cfg.clamped[1] || cfg.clamped[2] ||
            cfg.clamped[3]))
        throw ConfigError("clamped_edges: at least one edge must be clamped");
    }
  }
  if (const auto* mesh = root.find("mesh")) {
    cfg.nx = mesh->int_or("nx", cfg.nx);
    cfg.ny = mesh->int_or("ny", cfg.ny);
    cfg.nz = mesh->int_or("nz", cfg.nz);
    cfg.plate_nx = mesh->int_or("plate_nx", 2 * cfg.nx);
    cfg.plate_ny = mesh->int_or("plate_ny", 2 * cfg.ny);
  } else {
    cfg.plate_nx = 2 * cfg.nx;
    cfg.plate_ny = 2 * cfg.ny;
  }
  if (const auto* q = root.find("quadrature")) {
    cfg.thickness_nodes = q->int_or("thickness_nodes", cfg.thickness_nodes);
    cfg.plate_qpn = q->int_or("plate_qpn", cfg.plate_qpn);
  }
  if (const auto* mat = root.find("material")) cfg.material = parse_material(*mat);
  if (const auto* loads = root.find("loads")) cfg.loads = parse_loads(*loads);
  if (const auto* eps = root.find("eps")) {
    cfg.eps = eps->at("values").as_number_array("eps.values");
    for (double e : cfg.eps)
      if (!(e > 0) || e > 1.0)
        throw ConfigError("eps.values: thickness ratios must lie in (0, 1]");
    std::sort(cfg.eps.begin(), cfg.eps.end(), std::greater<double>());
  }
  if (const auto* sol = root.find("solver")) {
    std::string method = sol->string_or("method", "cg");
    if (method == "cg")
      cfg.method = Solve3DOptions::Method::kCG;
    else if (method == "direct")
      cfg.method = Solve3DOptions::Method::kDirect;
    else if (method == "auto")
      cfg.method = Solve3DOptions::Method::kAuto;
    else
      throw ConfigError("solver.method: unknown method '" + method + "'");
    cfg.cg_tol = sol->number_or("cg_tol", cfg.cg_tol);
    cfg.enhanced = sol->bool_or("enhanced_elements", cfg.enhanced);
  }
  if (const auto* checks = root.find("checks")) {
    CheckThresholds& t = cfg.checks;
    t.duality_gap_rel = checks->number_or("duality_gap_rel", t.duality_gap_rel);
    t.equilibrium_rel = checks->number_or("equilibrium_rel", t.equilibrium_rel);
    t.monotone_stress = checks->bool_or("monotone_stress", t.monotone_stress);
    t.monotone_transverse =
        checks->bool_or("monotone_transverse", t.monotone_transverse);
    t.stress_ratio_max = checks->number_or("stress_ratio_max", t.stress_ratio_max);
    t.energy_gap_rel = checks->number_or("energy_gap_rel", t.energy_gap_rel);
    t.liminf_slack_rel = checks->number_or("liminf_slack_rel", t.liminf_slack_rel);
    t.structure_rel = checks->number_or("structure_rel", t.structure_rel);
    t.ortho_rel = checks->number_or("ortho_rel", t.ortho_rel);
    t.plate_equilibrium_rel =
        checks->number_or("plate_equilibrium_rel", t.plate_equilibrium_rel);
    t.energy_identity_rel =
        checks->number_or("energy_identity_rel", t.energy_identity_rel);
  }
  if (const auto* rnd = root.find("random"))
    cfg.seed = static_cast<std::uint64_t>(rnd->number_or("seed", 12345));
  if (const auto* out = root.find("output"))
    cfg.gnuplot = out->bool_or("gnuplot", false);
  return cfg;
}

ProblemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ProblemConfig default_config() {
  ProblemConfig cfg;
  cfg.loads.b[2] = ScalarLoad::constant(1.0);
  return cfg;
}

}  // namespace pg
