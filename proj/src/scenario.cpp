#include "mscut/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace mscut {

namespace {

constexpr double kFar = 1e30;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- YAML helpers -------------------------------------------------------

void check_keys(const YAML::Node &node, const std::string &section,
                std::initializer_list<const char *> allowed) {
  if (!node.IsMap())
    throw config_error("'" + section + "' must be a mapping");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto &kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!keys.count(key))
      throw config_error("unknown key '" + key + "' in " + section);
  }
}

template <class T> T as(const YAML::Node &node, const std::string &what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception &) {
    throw config_error("invalid value for '" + what + "'");
  }
}

template <class T>
T get(const YAML::Node &parent, const char *key, const std::string &section,
      T fallback) {
  const YAML::Node node = parent[key];
  if (!node || node.IsNull())
    return fallback;
  return as<T>(node, section + "." + key);
}

Vec2 as_vec2(const YAML::Node &node, const std::string &what) {
  if (!node.IsSequence() || node.size() != 2)
    throw config_error("'" + what + "' must be a two-element list");
  return {as<double>(node[0], what), as<double>(node[1], what)};
}

std::vector<Pore> as_circles(const YAML::Node &node, const std::string &what) {
  std::vector<Pore> out;
  if (!node || node.IsNull())
    return out;
  if (!node.IsSequence())
    throw config_error("'" + what + "' must be a list of [x, y, r]");
  for (const auto &item : node) {
    if (!item.IsSequence() || item.size() != 3)
      throw config_error("entries of '" + what + "' must be [x, y, r]");
    out.push_back({Vec2(as<double>(item[0], what), as<double>(item[1], what)),
                   as<double>(item[2], what)});
  }
  return out;
}

YAML::Node parse_yaml(const std::string &text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception &e) {
    throw config_error(std::string("invalid YAML: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw io_error("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path resolve(const std::filesystem::path &base,
                              const std::string &p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty())
    path = base / path;
  return path.lexically_normal();
}

RveChoice parse_rve(const std::string &s) {
  if (s == "whole_domain")
    return RveChoice::WholeDomain;
  if (s == "inside_zooms")
    return RveChoice::InsideZooms;
  throw config_error("unknown RVE choice '" + s +
                     "' (expected whole_domain or inside_zooms)");
}

std::string_view rve_name(RveChoice c) {
  return c == RveChoice::WholeDomain ? "whole_domain" : "inside_zooms";
}

PorosityMode parse_porosity(const std::string &s) {
  if (s == "incremental")
    return PorosityMode::Incremental;
  if (s == "cumulative")
    return PorosityMode::Cumulative;
  throw config_error("unknown porosity mode '" + s +
                     "' (expected incremental or cumulative)");
}

PlaneModel parse_plane(const std::string &s) {
  if (s == "strain")
    return PlaneModel::Strain;
  if (s == "stress")
    return PlaneModel::Stress;
  throw config_error("unknown plane model '" + s +
                     "' (expected strain or stress)");
}

int parse_component(const std::string &s) {
  if (s == "x")
    return 0;
  if (s == "y")
    return 1;
  if (s == "both")
    return -1;
  throw config_error("unknown component '" + s + "' (expected x, y or both)");
}

BoundaryTag parse_tag(const YAML::Node &node, const std::string &what) {
  try {
    return parse_boundary_tag(as<std::string>(node, what));
  } catch (const Error &) {
    throw config_error("'" + what + "' must be one of bottom, right, top, left");
  }
}

Scenario scenario_from_node(const YAML::Node &root,
                            const std::filesystem::path &base_dir) {
  if (!root || !root.IsMap())
    throw config_error("scenario must be a YAML mapping");
  check_keys(root, "scenario",
             {"name", "description", "domain", "mesh", "geometry", "model",
              "mixing", "stabilization", "materials", "boundary", "quadrature",
              "solver", "output", "reference"});
  Scenario s;
  s.name = get<std::string>(root, "name", "scenario", s.name);
  s.description = get<std::string>(root, "description", "scenario", "");

  if (const auto d = root["domain"]) {
    check_keys(d, "domain", {"xmin", "ymin", "xmax", "ymax"});
    s.domain.xmin = get<double>(d, "xmin", "domain", s.domain.xmin);
    s.domain.ymin = get<double>(d, "ymin", "domain", s.domain.ymin);
    s.domain.xmax = get<double>(d, "xmax", "domain", s.domain.xmax);
    s.domain.ymax = get<double>(d, "ymax", "domain", s.domain.ymax);
  }
  if (const auto m = root["mesh"]) {
    check_keys(m, "mesh", {"nx", "ny", "refine_levels", "refine_band"});
    s.mesh.nx = get<int>(m, "nx", "mesh", s.mesh.nx);
    s.mesh.ny = get<int>(m, "ny", "mesh", s.mesh.ny);
    s.mesh.refine_levels = get<int>(m, "refine_levels", "mesh", 0);
    s.mesh.refine_band = get<double>(m, "refine_band", "mesh", 0.0);
  }
  if (const auto g = root["geometry"]) {
    check_keys(g, "geometry", {"pores", "zooms"});
    s.pores = as_circles(g["pores"], "geometry.pores");
    s.zooms = as_circles(g["zooms"], "geometry.zooms");
  }
  if (const auto m = root["model"])
    s.model = parse_model_kind(as<std::string>(m, "model"));
  if (const auto m = root["mixing"]) {
    check_keys(m, "mixing", {"width"});
    s.width = get<double>(m, "width", "mixing", s.width);
  }
  if (const auto st = root["stabilization"]) {
    check_keys(st, "stabilization", {"beta", "mode"});
    s.beta = get<double>(st, "beta", "stabilization", s.beta);
    if (st["mode"])
      s.mode = parse_regularization_mode(
          as<std::string>(st["mode"], "stabilization.mode"));
  }
  if (const auto m = root["materials"]) {
    check_keys(m, "materials", {"plane", "micro", "macro", "homogenization"});
    MaterialSpec &ms = s.materials;
    if (m["plane"])
      ms.plane = parse_plane(as<std::string>(m["plane"], "materials.plane"));
    if (const auto mi = m["micro"]) {
      check_keys(mi, "materials.micro", {"E", "nu"});
      ms.micro.youngs = get<double>(mi, "E", "materials.micro", ms.micro.youngs);
      ms.micro.poisson = get<double>(mi, "nu", "materials.micro", ms.micro.poisson);
    }
    if (const auto ma = m["macro"]) {
      check_keys(ma, "materials.macro", {"E", "nu"});
      if (const auto e = ma["E"]) {
        if (e.IsScalar() && e.Scalar() == "auto")
          ms.macro_youngs.reset();
        else
          ms.macro_youngs = as<double>(e, "materials.macro.E");
      }
      ms.macro_poisson = get<double>(ma, "nu", "materials.macro", ms.macro_poisson);
    }
    if (const auto h = m["homogenization"]) {
      check_keys(h, "materials.homogenization", {"rve", "eshelby", "porosity"});
      if (h["rve"])
        ms.rve = parse_rve(as<std::string>(h["rve"], "homogenization.rve"));
      ms.mmt.eshelby =
          get<double>(h, "eshelby", "materials.homogenization", ms.mmt.eshelby);
      if (h["porosity"])
        ms.mmt.mode = parse_porosity(
            as<std::string>(h["porosity"], "homogenization.porosity"));
    }
  }
  if (const auto b = root["boundary"]) {
    check_keys(b, "boundary",
               {"clamped", "loaded", "displacement", "traction", "rollers"});
    BoundarySpec &bs = s.boundary;
    if (b["clamped"])
      bs.clamped = parse_tag(b["clamped"], "boundary.clamped");
    if (b["loaded"])
      bs.loaded = parse_tag(b["loaded"], "boundary.loaded");
    if (b["displacement"])
      bs.displacement = as_vec2(b["displacement"], "boundary.displacement");
    if (b["traction"])
      bs.traction = as_vec2(b["traction"], "boundary.traction");
    if (const auto r = b["rollers"]) {
      if (!r.IsSequence())
        throw config_error("'boundary.rollers' must be a list of edges");
      for (const auto &e : r)
        bs.rollers.push_back(parse_tag(e, "boundary.rollers"));
    }
  }
  if (!s.boundary.displacement && !s.boundary.traction)
    s.boundary.traction = Vec2::Zero();
  if (const auto q = root["quadrature"]) {
    check_keys(q, "quadrature", {"bulk", "transition"});
    s.quadrature.bulk = get<int>(q, "bulk", "quadrature", s.quadrature.bulk);
    s.quadrature.transition =
        get<int>(q, "transition", "quadrature", s.quadrature.transition);
  }
  if (const auto sv = root["solver"]) {
    check_keys(sv, "solver",
               {"condition", "direct_limit", "cg_tolerance", "dense_limit",
                "lanczos_tolerance", "lanczos_steps"});
    SolverSpec &ss = s.solver;
    ss.condition = get<bool>(sv, "condition", "solver", ss.condition);
    ss.solve.direct_limit =
        get<int>(sv, "direct_limit", "solver", ss.solve.direct_limit);
    ss.solve.cg_tolerance =
        get<double>(sv, "cg_tolerance", "solver", ss.solve.cg_tolerance);
    ss.cond.dense_limit = get<int>(sv, "dense_limit", "solver", ss.cond.dense_limit);
    ss.cond.tolerance =
        get<double>(sv, "lanczos_tolerance", "solver", ss.cond.tolerance);
    ss.cond.max_steps = get<int>(sv, "lanczos_steps", "solver", ss.cond.max_steps);
  }
  if (const auto o = root["output"]) {
    check_keys(o, "output", {"vtk", "metrics"});
    s.vtk_file = get<std::string>(o, "vtk", "output", s.vtk_file);
    s.metrics_file = get<std::string>(o, "metrics", "output", s.metrics_file);
  }
  if (const auto r = root["reference"]) {
    check_keys(r, "reference", {"scenario", "margin", "component"});
    ReferenceSpec ref;
    if (!r["scenario"])
      throw config_error("'reference.scenario' is required");
    ref.scenario =
        resolve(base_dir, as<std::string>(r["scenario"], "reference.scenario"));
    if (r["margin"])
      ref.margin = as<double>(r["margin"], "reference.margin");
    if (r["component"])
      ref.component =
          parse_component(as<std::string>(r["component"], "reference.component"));
    s.reference = ref;
  }
  s.validate();
  return s;
}

void emit_circles(std::ostream &os, const char *key,
                  const std::vector<Pore> &circles) {
  os << "  " << key << ":";
  if (circles.empty()) {
    os << " []\n";
    return;
  }
  os << '\n';
  for (const Pore &p : circles)
    os << "    - [" << format_double(p.center.x()) << ", "
       << format_double(p.center.y()) << ", " << format_double(p.radius)
       << "]\n";
}

std::string quoted(const std::string &s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\')
      out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string vec_text(const Vec2 &v) {
  return "[" + format_double(v.x()) + ", " + format_double(v.y()) + "]";
}

std::string component_name(int c) {
  return c == 0 ? "x" : c == 1 ? "y" : "both";
}

} // namespace

// ---- Scenario -----------------------------------------------------------

std::string_view to_string(ModelKind kind) {
  switch (kind) {
  case ModelKind::Mixed:
    return "mixed";
  case ModelKind::MicroOnly:
    return "micro_only";
  case ModelKind::MacroOnly:
    return "macro_only";
  }
  return "mixed";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "mixed")
    return ModelKind::Mixed;
  if (name == "micro_only")
    return ModelKind::MicroOnly;
  if (name == "macro_only")
    return ModelKind::MacroOnly;
  throw config_error("unknown model '" + std::string(name) +
                     "' (expected mixed, micro_only or macro_only)");
}

void Scenario::validate() const {
  if (!(domain.width() > 0.0 && domain.height() > 0.0))
    throw config_error("domain must have positive width and height");
  if (mesh.nx < 1 || mesh.ny < 1)
    throw config_error("mesh.nx and mesh.ny must be at least 1");
  if (mesh.refine_levels < 0 || mesh.refine_levels > 12)
    throw config_error("mesh.refine_levels must lie in 0..12");
  if (!(mesh.refine_band >= 0.0))
    throw config_error("mesh.refine_band must be non-negative");
  for (const Pore &p : pores) {
    if (!(p.radius > 0.0))
      throw config_error("pore radius must be positive");
    if (p.center.x() < domain.xmin || p.center.x() > domain.xmax ||
        p.center.y() < domain.ymin || p.center.y() > domain.ymax)
      throw config_error("pore centre (" + format_double(p.center.x()) + ", " +
                         format_double(p.center.y()) + ") lies outside the domain");
  }
  for (const Pore &z : zooms)
    if (!(z.radius > 0.0))
      throw config_error("zoom radius must be positive");
  if (model == ModelKind::Mixed && zooms.empty())
    throw config_error("model 'mixed' needs at least one zoom");
  if (!(width > 0.0))
    throw config_error("mixing.width must be positive");
  if (!(beta >= 0.0))
    throw config_error("stabilization.beta must be non-negative");
  materials.micro.validate();
  if (materials.macro_youngs) {
    Material{*materials.macro_youngs, materials.macro_poisson}.validate();
  } else {
    Material{1.0, materials.macro_poisson}.validate();
    if (materials.rve == RveChoice::InsideZooms && zooms.empty())
      throw config_error("RVE 'inside_zooms' needs at least one zoom");
  }
  if (!(materials.mmt.eshelby > 0.0))
    throw config_error("materials.homogenization.eshelby must be positive");
  if (boundary.displacement.has_value() == boundary.traction.has_value())
    throw config_error("boundary needs exactly one of displacement or traction");
  if (boundary.clamped == boundary.loaded)
    throw config_error("clamped and loaded edges must differ");
  if (boundary.clamped == BoundaryTag::None || boundary.loaded == BoundaryTag::None)
    throw config_error("boundary edges must be bottom, right, top or left");
  for (BoundaryTag r : boundary.rollers)
    if (r == boundary.clamped || r == boundary.loaded || r == BoundaryTag::None)
      throw config_error("roller edge '" + std::string(to_string(r)) +
                         "' clashes with the clamped or loaded edge");
  if (quadrature.bulk < 1 || quadrature.bulk > 6 || quadrature.transition < 1 ||
      quadrature.transition > 6)
    throw config_error("quadrature degrees must lie in 1..6");
  if (solver.solve.direct_limit < 0 || !(solver.solve.cg_tolerance > 0.0) ||
      solver.cond.dense_limit < 0 || !(solver.cond.tolerance > 0.0) ||
      solver.cond.max_steps < 2)
    throw config_error("invalid solver settings");
  if (vtk_file.empty() || metrics_file.empty())
    throw config_error("output file names must not be empty");
  if (reference) {
    if (reference->margin && !(*reference->margin >= 0.0))
      throw config_error("reference.margin must be non-negative");
  }
}

Scenario parse_scenario(const std::string &text,
                        const std::filesystem::path &base_dir) {
  return scenario_from_node(parse_yaml(text), base_dir);
}

Scenario load_scenario(const std::filesystem::path &path) {
  Scenario s =
      parse_scenario(read_file(path), std::filesystem::absolute(path).parent_path());
  if (s.reference && !std::filesystem::exists(s.reference->scenario))
    throw config_error("reference scenario '" + s.reference->scenario.string() +
                       "' does not exist");
  return s;
}

std::string dump_scenario(const Scenario &s) {
  std::ostringstream os;
  os << "# effective scenario: every default spelled out\n";
  os << "name: " << quoted(s.name) << '\n';
  os << "description: " << quoted(s.description) << '\n';
  os << "domain: {xmin: " << format_double(s.domain.xmin)
     << ", ymin: " << format_double(s.domain.ymin)
     << ", xmax: " << format_double(s.domain.xmax)
     << ", ymax: " << format_double(s.domain.ymax) << "}\n";
  os << "mesh: {nx: " << s.mesh.nx << ", ny: " << s.mesh.ny
     << ", refine_levels: " << s.mesh.refine_levels
     << ", refine_band: " << format_double(s.mesh.refine_band) << "}\n";
  os << "geometry:\n";
  emit_circles(os, "pores", s.pores);
  emit_circles(os, "zooms", s.zooms);
  os << "model: " << to_string(s.model) << '\n';
  os << "mixing: {width: " << format_double(s.width) << "}\n";
  os << "stabilization: {beta: " << format_double(s.beta)
     << ", mode: " << to_string(s.mode) << "}\n";
  const MaterialSpec &m = s.materials;
  os << "materials:\n";
  os << "  plane: " << (m.plane == PlaneModel::Strain ? "strain" : "stress")
     << '\n';
  os << "  micro: {E: " << format_double(m.micro.youngs)
     << ", nu: " << format_double(m.micro.poisson) << "}\n";
  os << "  macro: {E: "
     << (m.macro_youngs ? format_double(*m.macro_youngs) : std::string("auto"))
     << ", nu: " << format_double(m.macro_poisson) << "}\n";
  os << "  homogenization: {rve: " << rve_name(m.rve)
     << ", eshelby: " << format_double(m.mmt.eshelby) << ", porosity: "
     << (m.mmt.mode == PorosityMode::Incremental ? "incremental" : "cumulative")
     << "}\n";
  const BoundarySpec &b = s.boundary;
  os << "boundary:\n";
  os << "  clamped: " << to_string(b.clamped) << '\n';
  os << "  loaded: " << to_string(b.loaded) << '\n';
  if (b.displacement)
    os << "  displacement: " << vec_text(*b.displacement) << '\n';
  if (b.traction)
    os << "  traction: " << vec_text(*b.traction) << '\n';
  os << "  rollers: [";
  for (std::size_t i = 0; i < b.rollers.size(); ++i)
    os << (i ? ", " : "") << to_string(b.rollers[i]);
  os << "]\n";
  os << "quadrature: {bulk: " << s.quadrature.bulk
     << ", transition: " << s.quadrature.transition << "}\n";
  os << "solver: {condition: " << (s.solver.condition ? "true" : "false")
     << ", direct_limit: " << s.solver.solve.direct_limit
     << ", cg_tolerance: " << format_double(s.solver.solve.cg_tolerance)
     << ", dense_limit: " << s.solver.cond.dense_limit
     << ", lanczos_tolerance: " << format_double(s.solver.cond.tolerance)
     << ", lanczos_steps: " << s.solver.cond.max_steps << "}\n";
  os << "output: {vtk: " << quoted(s.vtk_file)
     << ", metrics: " << quoted(s.metrics_file) << "}\n";
  if (s.reference) {
    os << "reference:\n";
    os << "  scenario: " << quoted(s.reference->scenario.string()) << '\n';
    if (s.reference->margin)
      os << "  margin: " << format_double(*s.reference->margin) << '\n';
    os << "  component: " << component_name(s.reference->component) << '\n';
  }
  return os.str();
}

// ---- Model --------------------------------------------------------------

LevelSet pore_level_set(const std::vector<Pore> &pores) {
  if (pores.empty())
    return LevelSet::constant(-kFar);
  std::vector<LevelSet> circles;
  circles.reserve(pores.size());
  for (const Pore &p : pores)
    circles.push_back(LevelSet::circle(p.center, p.radius));
  return LevelSet::unite(std::move(circles));
}

LevelSet zoom_level_set(const std::vector<Pore> &zooms) {
  if (zooms.empty())
    return LevelSet::constant(kFar);
  std::vector<LevelSet> circles;
  circles.reserve(zooms.size());
  for (const Pore &z : zooms)
    circles.push_back(LevelSet::circle(z.center, z.radius));
  return LevelSet::unite(std::move(circles))
      .with_convention(SignConvention::PositiveOutside);
}

Mesh2 build_mesh(const Scenario &s) {
  Mesh2 mesh = generate_rect(s.domain, s.mesh.nx, s.mesh.ny);
  if (s.mesh.refine_levels > 0 && !s.zooms.empty()) {
    const CellSet marked =
        mark_near(mesh, zoom_level_set(s.zooms), s.mesh.refine_band);
    mesh = refine(mesh, marked, s.mesh.refine_levels);
  }
  return mesh;
}

Model build_model(const Scenario &s) { return build_model(s, build_mesh(s)); }

Model build_model(const Scenario &s, Mesh2 mesh) {
  s.validate();
  Model m;
  m.mesh = std::move(mesh);
  switch (s.model) {
  case ModelKind::Mixed:
    m.pore_set = pore_level_set(s.pores);
    m.zoom_set = zoom_level_set(s.zooms);
    break;
  case ModelKind::MicroOnly:
    m.pore_set = pore_level_set(s.pores);
    m.zoom_set = LevelSet::constant(-kFar);
    break;
  case ModelKind::MacroOnly:
    m.pore_set = LevelSet::constant(-kFar);
    m.zoom_set = LevelSet::constant(kFar);
    break;
  }
  m.phi1 = project_p1(m.pore_set, m.mesh);
  m.phi2 = project_p1(m.zoom_set, m.mesh);

  MultiscaleConfig &c = m.config;
  c.micro = s.materials.micro;
  c.macro.poisson = s.materials.macro_poisson;
  if (s.materials.macro_youngs) {
    c.macro.youngs = *s.materials.macro_youngs;
  } else if (s.model == ModelKind::MicroOnly) {
    c.macro.youngs = c.micro.youngs; // unused: no macro weight anywhere
  } else {
    const PorePopulation pop =
        rve_population(s.pores, s.zooms, s.domain, s.materials.rve);
    m.homogenization = mmt_trajectory(c.micro.youngs, pop, s.materials.mmt);
    c.macro.youngs = m.homogenization->effective;
  }
  c.plane = s.materials.plane;
  c.half_width = 0.5 * s.width;
  c.beta = s.beta;
  c.mode = s.mode;
  c.quadrature = s.quadrature;

  const BoundarySpec &b = s.boundary;
  c.dirichlet.push_back({b.clamped, {true, true}, Vec2::Zero(),
                         Eigen::Matrix2d::Zero()});
  if (b.displacement)
    c.dirichlet.push_back(
        {b.loaded, {true, true}, *b.displacement, Eigen::Matrix2d::Zero()});
  else
    c.tractions.push_back({b.loaded, *b.traction});
  for (BoundaryTag r : b.rollers) {
    const bool vertical = r == BoundaryTag::Left || r == BoundaryTag::Right;
    c.dirichlet.push_back(
        {r, {vertical, !vertical}, Vec2::Zero(), Eigen::Matrix2d::Zero()});
  }
  return m;
}

// ---- Run ----------------------------------------------------------------

RunResult run_scenario(const Scenario &s, const RunOptions &options) {
  RunResult r;
  r.model = build_model(s);
  const Model &m = r.model;
  r.system = assemble(m.mesh, m.phi1, m.phi2, m.config, options.threads);
  r.reduced = reduce(r.system);
  if (r.reduced.matrix.rows() == 0)
    throw assembly_error("no free degrees of freedom");
  r.solve = solve_spd(r.reduced.matrix, r.reduced.rhs, s.solver.solve);
  if (s.solver.condition)
    r.solve.condition = cond_estimate(r.reduced.matrix, s.solver.cond);
  r.displacement = expand(r.system, r.reduced, r.solve.solution);
  r.stress = recover_stress(m.mesh, m.phi1, m.phi2, m.config, r.displacement);
  for (const auto &v : r.stress.mixed)
    if (!v.allFinite())
      throw solver_error("non-finite stress in the solution");

  MetricsRow &row = r.metrics;
  row.name = s.name;
  row.h_min = m.mesh.h_min();
  row.h_max = m.mesh.h_max();
  row.two_eps = s.width;
  row.beta = s.beta;
  row.mode = std::string(to_string(s.mode));
  row.dofs = r.system.num_dofs();
  row.active_dofs = r.system.num_active();
  row.free_dofs = static_cast<int>(r.reduced.dofs.size());
  row.ghost_facets = static_cast<int>(r.system.ghost_facets.size());
  row.kappa = r.solve.condition.value_or(kNaN);
  row.solver = r.solve.method;
  row.iterations = r.solve.iterations;
  row.residual = r.solve.residual;
  row.energy_macro = quadratic_energy(r.system.macro, r.displacement);
  row.energy_micro = quadratic_energy(r.system.micro, r.displacement);
  row.energy_ghost = quadratic_energy(r.system.ghost, r.displacement);
  row.l2_error = kNaN;
  row.energy_error = kNaN;
  return r;
}

void attach_reference_errors(RunResult &result, const Scenario &s,
                             const RunOptions &options) {
  if (!s.reference)
    return;
  const Scenario ref = load_scenario(s.reference->scenario);
  const RunResult rr = run_scenario(ref, options);
  ComparisonRegion region;
  region.component = s.reference->component;
  region.snap_tolerance = result.model.config.snap_tolerance;
  if (s.model == ModelKind::Mixed)
    region.phi2_below = -s.reference->margin.value_or(s.width);
  const Model &m = result.model;
  const ErrorNorms e = compare_to_reference(
      m.mesh, result.displacement, m.phi1, m.phi2,
      hooke_voigt(m.config.micro, m.config.plane), region, rr.model.mesh,
      rr.displacement);
  result.metrics.l2_error = e.l2_relative();
  result.metrics.energy_error = e.energy_relative();
}

void write_run_outputs(const RunResult &r, const Scenario &s,
                       const std::filesystem::path &out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw io_error("cannot create output directory '" + out_dir.string() +
                   "': " + ec.message());
  export_vtk(out_dir / s.vtk_file, r.model.mesh, r.displacement, r.stress);
  export_metrics(out_dir / s.metrics_file, {r.metrics});
  std::ofstream echo(out_dir / "scenario.effective.yaml", std::ios::binary);
  if (!echo)
    throw io_error("cannot write '" +
                   (out_dir / "scenario.effective.yaml").string() + "'");
  echo << dump_scenario(s);
}

// ---- Sweeps -------------------------------------------------------------

Sweep parse_sweep(const std::string &text, const std::filesystem::path &base_dir) {
  const YAML::Node root = parse_yaml(text);
  if (!root || !root.IsMap())
    throw config_error("sweep must be a YAML mapping");
  check_keys(root, "sweep",
             {"base", "scenario", "meshes", "widths", "modes", "betas", "offsets"});
  Sweep sw;
  if (root["base"] && root["scenario"])
    throw config_error("sweep takes either 'base' or 'scenario', not both");
  if (root["base"]) {
    const auto path = resolve(base_dir, as<std::string>(root["base"], "base"));
    sw.base = parse_scenario(read_file(path), path.parent_path());
  } else if (root["scenario"]) {
    sw.base = scenario_from_node(root["scenario"], base_dir);
  } else {
    throw config_error("sweep needs a 'base' scenario file or an inline 'scenario'");
  }
  const auto meshes = root["meshes"];
  if (!meshes || !meshes.IsSequence() || meshes.size() == 0)
    throw config_error("'meshes' must be a non-empty list of [nx, ny]");
  for (const auto &m : meshes) {
    if (!m.IsSequence() || m.size() != 2)
      throw config_error("entries of 'meshes' must be [nx, ny]");
    const int nx = as<int>(m[0], "meshes"), ny = as<int>(m[1], "meshes");
    if (nx < 1 || ny < 1)
      throw config_error("mesh sizes must be positive");
    sw.meshes.push_back({nx, ny});
  }
  auto list = [&](const char *key, auto parse, auto fallback) {
    using T = decltype(fallback);
    std::vector<T> out;
    const auto node = root[key];
    if (!node) {
      out.push_back(fallback);
      return out;
    }
    if (!node.IsSequence() || node.size() == 0)
      throw config_error(std::string("'") + key + "' must be a non-empty list");
    for (const auto &v : node)
      out.push_back(parse(v));
    return out;
  };
  sw.widths = list(
      "widths", [](const YAML::Node &v) { return as<double>(v, "widths"); },
      sw.base.width);
  sw.betas = list(
      "betas", [](const YAML::Node &v) { return as<double>(v, "betas"); },
      sw.base.beta);
  sw.modes = list(
      "modes",
      [](const YAML::Node &v) {
        return parse_regularization_mode(as<std::string>(v, "modes"));
      },
      sw.base.mode);
  sw.offsets = list(
      "offsets", [](const YAML::Node &v) { return as_vec2(v, "offsets"); },
      Vec2(Vec2::Zero()));
  for (double w : sw.widths)
    if (!(w > 0.0))
      throw config_error("sweep widths must be positive");
  for (double b : sw.betas)
    if (!(b >= 0.0))
      throw config_error("sweep betas must be non-negative");
  return sw;
}

Sweep load_sweep(const std::filesystem::path &path) {
  return parse_sweep(read_file(path), std::filesystem::absolute(path).parent_path());
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2)
    return kNaN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0)
    return kNaN;
  return (n * sxy - sx * sy) / den;
}

SweepResult run_sweep(const Sweep &sw, const RunOptions &options) {
  SweepResult out;
  std::vector<std::string> order;
  for (const Vec2 &off : sw.offsets)
    for (double width : sw.widths)
      for (RegularizationMode mode : sw.modes)
        for (double beta : sw.betas) {
          std::ostringstream key;
          key << "width=" << format_double(width) << " mode=" << to_string(mode)
              << " beta=" << format_double(beta)
              << " offset=" << format_double(off.x()) << ":"
              << format_double(off.y());
          order.push_back(key.str());
          std::vector<SweepRow> series_rows;
          for (const auto &[nx, ny] : sw.meshes) {
            SweepRow row;
            row.series = key.str();
            row.offset = off;
            row.nx = nx;
            row.ny = ny;
            MetricsRow &mr = row.metrics;
            mr.name = sw.base.name;
            mr.two_eps = width;
            mr.beta = beta;
            mr.mode = std::string(to_string(mode));
            mr.solver = "-";
            mr.kappa = kNaN;
            mr.residual = kNaN;
            mr.energy_macro = mr.energy_micro = mr.energy_ghost = kNaN;
            mr.l2_error = mr.energy_error = kNaN;
            row.lambda_min = row.lambda_max = kNaN;
            try {
              Scenario s = sw.base;
              s.width = width;
              s.beta = beta;
              s.mode = mode;
              s.mesh.nx = nx;
              s.mesh.ny = ny;
              for (Pore &p : s.pores)
                p.center += off;
              const Model m = build_model(s);
              mr.h_min = m.mesh.h_min();
              mr.h_max = m.mesh.h_max();
              const AssembledSystem sys =
                  assemble(m.mesh, m.phi1, m.phi2, m.config, options.threads);
              const ReducedSystem red = reduce(sys);
              mr.dofs = sys.num_dofs();
              mr.active_dofs = sys.num_active();
              mr.free_dofs = static_cast<int>(red.dofs.size());
              mr.ghost_facets = static_cast<int>(sys.ghost_facets.size());
              if (red.matrix.rows() == 0)
                throw assembly_error("no free degrees of freedom");
              const ExtremeEigenvalues ev =
                  extreme_eigenvalues(red.matrix, s.solver.cond);
              row.lambda_min = ev.min;
              row.lambda_max = ev.max;
              mr.kappa = ev.max / ev.min;
            } catch (const Error &e) {
              mr.status = std::string(to_string(e.category())) + ": " + e.what();
            } catch (const std::exception &e) {
              mr.status = std::string("error: ") + e.what();
            }
            series_rows.push_back(std::move(row));
          }
          std::stable_sort(series_rows.begin(), series_rows.end(),
                           [](const SweepRow &a, const SweepRow &b) {
                             return a.metrics.h_max > b.metrics.h_max;
                           });
          SeriesSlope slope;
          slope.series = key.str();
          std::vector<double> h, k;
          for (const SweepRow &r : series_rows)
            if (std::isfinite(r.metrics.kappa)) {
              h.push_back(r.metrics.h_max);
              k.push_back(r.metrics.kappa);
            }
          slope.points = static_cast<int>(h.size());
          slope.slope = loglog_slope(h, k);
          out.slopes.push_back(slope);
          for (SweepRow &r : series_rows)
            out.rows.push_back(std::move(r));
        }
  return out;
}

void write_sweep_outputs(const SweepResult &result,
                         const std::filesystem::path &out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw io_error("cannot create output directory '" + out_dir.string() +
                   "': " + ec.message());
  const auto table = out_dir / "condstudy.csv";
  std::ofstream os(table, std::ios::binary);
  if (!os)
    throw io_error("cannot write '" + table.string() + "'");
  os << "series,nx,ny,offset_x,offset_y,h_min,h_max,two_eps,beta,mode,dofs,"
        "active_dofs,free_dofs,ghost_facets,lambda_min,lambda_max,kappa,status\n";
  for (const SweepRow &r : result.rows) {
    const MetricsRow &m = r.metrics;
    std::string status = m.status;
    std::replace(status.begin(), status.end(), ',', ';');
    os << r.series << ',' << r.nx << ',' << r.ny << ','
       << format_double(r.offset.x()) << ',' << format_double(r.offset.y())
       << ',' << format_double(m.h_min) << ',' << format_double(m.h_max) << ','
       << format_double(m.two_eps) << ',' << format_double(m.beta) << ','
       << m.mode << ',' << m.dofs << ',' << m.active_dofs << ','
       << m.free_dofs << ',' << m.ghost_facets << ','
       << format_double(r.lambda_min) << ',' << format_double(r.lambda_max)
       << ',' << format_double(m.kappa) << ',' << status << '\n';
  }
  const auto slopes = out_dir / "condstudy_slopes.csv";
  std::ofstream ss(slopes, std::ios::binary);
  if (!ss)
    throw io_error("cannot write '" + slopes.string() + "'");
  ss << "series,points,slope\n";
  for (const SeriesSlope &s : result.slopes)
    ss << s.series << ',' << s.points << ',' << format_double(s.slope) << '\n';
  if (!os || !ss)
    throw io_error("failed writing sweep outputs under '" + out_dir.string() + "'");
}

// ---- Geometry validation ------------------------------------------------

GeometryReport validate_geometry(const Scenario &s) {
  s.validate();
  GeometryReport rep;
  const Mesh2 mesh = build_mesh(s);
  rep.h_min = mesh.h_min();
  rep.h_max = mesh.h_max();
  rep.cells = mesh.num_cells();
  const LevelSet pores = pore_level_set(s.pores);
  const CutDecomposition decomp(mesh, project_p1(pores, mesh));
  rep.discrete = measures(decomp, mesh);

  for (std::size_t i = 0; i < s.pores.size(); ++i) {
    const Pore &p = s.pores[i];
    rep.pore_area_exact += p.area();
    rep.interface_length_exact += 2.0 * std::numbers::pi * p.radius;
    if (p.center.x() - p.radius < s.domain.xmin ||
        p.center.x() + p.radius > s.domain.xmax ||
        p.center.y() - p.radius < s.domain.ymin ||
        p.center.y() + p.radius > s.domain.ymax)
      rep.exact_is_valid = false;
    for (std::size_t j = i + 1; j < s.pores.size(); ++j)
      if ((p.center - s.pores[j].center).norm() < p.radius + s.pores[j].radius)
        rep.exact_is_valid = false;
  }
  rep.matrix_area_exact = s.domain.area() - rep.pore_area_exact;
  if (!s.pores.empty())
    rep.pore_multi_cut = multi_cut_cells(mesh, pores);
  if (!s.zooms.empty())
    rep.zoom_multi_cut = multi_cut_cells(mesh, zoom_level_set(s.zooms));
  return rep;
}

std::string format_geometry_report(const GeometryReport &r) {
  std::ostringstream os;
  auto rel = [](double a, double b) {
    return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b);
  };
  os << "cells: " << r.cells << '\n';
  os << "h_min: " << format_double(r.h_min) << '\n';
  os << "h_max: " << format_double(r.h_max) << '\n';
  os << "matrix_area: " << format_double(r.discrete.negative_area)
     << " exact: " << format_double(r.matrix_area_exact)
     << " rel_error: " << format_double(rel(r.discrete.negative_area, r.matrix_area_exact))
     << '\n';
  os << "pore_area: " << format_double(r.discrete.positive_area)
     << " exact: " << format_double(r.pore_area_exact)
     << " rel_error: " << format_double(rel(r.discrete.positive_area, r.pore_area_exact))
     << '\n';
  os << "interface_length: " << format_double(r.discrete.interface_length)
     << " exact: " << format_double(r.interface_length_exact) << " rel_error: "
     << format_double(rel(r.discrete.interface_length, r.interface_length_exact))
     << '\n';
  if (!r.exact_is_valid)
    os << "note: pores overlap or cross the domain boundary; exact values "
          "assume disjoint pores inside the domain\n";
  auto warn = [&](const char *what, const std::vector<int> &cells) {
    if (cells.empty())
      return;
    os << "warning: " << cells.size() << " cell(s) cut more than once by the "
       << what << " level set (first: " << cells.front()
       << "); the P1 projection cannot represent this geometry\n";
  };
  warn("pore", r.pore_multi_cut);
  warn("zoom", r.zoom_multi_cut);
  return os.str();
}

} // namespace mscut
