#pragma once

#include "mscut/assembly.hpp"
#include "mscut/homogenize.hpp"
#include "mscut/post.hpp"
#include "mscut/solve.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mscut {

enum class ModelKind {
  Mixed,     ///< macro outside the zooms, micro inside, blended across the band
  MicroOnly, ///< pore-resolving model everywhere
  MacroOnly, ///< homogenized model everywhere
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct MeshSpec {
  int nx = 24;
  int ny = 20;
  /// Red refinement passes over cells near the zooms.
  int refine_levels = 0;
  /// Cells with a node inside a zoom or within this distance outside it are
  /// marked for refinement.
  double refine_band = 0.0;
};

struct MaterialSpec {
  Material micro;
  /// Unset means "auto": homogenized from the pore population.
  std::optional<double> macro_youngs = 1.0;
  double macro_poisson = 0.3;
  RveChoice rve = RveChoice::WholeDomain;
  MMTParams mmt;
  PlaneModel plane = PlaneModel::Strain;
};

struct BoundarySpec {
  BoundaryTag clamped = BoundaryTag::Bottom;
  BoundaryTag loaded = BoundaryTag::Top;
  /// Exactly one of these is set on the loaded edge.
  std::optional<Vec2> displacement;
  std::optional<Vec2> traction;
  /// Edges where only the normal displacement component is fixed to zero.
  std::vector<BoundaryTag> rollers;
};

struct SolverSpec {
  bool condition = false;
  SolveOptions solve;
  ConditionOptions cond;
};

struct ReferenceSpec {
  std::filesystem::path scenario; ///< absolute after loading
  /// Compare only where phi2 < -margin; defaults to the full mixing width.
  std::optional<double> margin;
  int component = 1; ///< 0 = x, 1 = y, -1 = both
};

struct Scenario {
  std::string name = "scenario";
  std::string description;
  Rect domain{0.0, 0.0, 12.0, 10.0};
  MeshSpec mesh;
  std::vector<Pore> pores;
  std::vector<Pore> zooms;
  ModelKind model = ModelKind::Mixed;
  double width = 0.1; ///< full mixing width 2 eps
  double beta = 0.005;
  RegularizationMode mode = RegularizationMode::CutOnly;
  MaterialSpec materials;
  BoundarySpec boundary;
  QuadratureDegrees quadrature;
  SolverSpec solver;
  std::string vtk_file = "solution.vtk";
  std::string metrics_file = "metrics.csv";
  std::optional<ReferenceSpec> reference;

  /// Throws a config error when an invariant is violated.
  void validate() const;
};

/// Parses a scenario; relative paths resolve against `base_dir`.
Scenario parse_scenario(const std::string &text,
                        const std::filesystem::path &base_dir = {});
Scenario load_scenario(const std::filesystem::path &path);
/// Effective scenario with every default spelled out; parse_scenario of the
/// result gives back an equivalent scenario.
std::string dump_scenario(const Scenario &scenario);

/// Level sets, mesh and assembly configuration derived from a scenario.
struct Model {
  Mesh2 mesh;
  LevelSet pore_set = LevelSet::constant(-1.0);
  LevelSet zoom_set = LevelSet::constant(1.0);
  NodalField phi1;
  NodalField phi2;
  MultiscaleConfig config;
  /// Set when the macro modulus was homogenized.
  std::optional<MMTTrajectory> homogenization;
};

LevelSet pore_level_set(const std::vector<Pore> &pores);
/// Positive outside every zoom.
LevelSet zoom_level_set(const std::vector<Pore> &zooms);

Mesh2 build_mesh(const Scenario &scenario);
Model build_model(const Scenario &scenario);
Model build_model(const Scenario &scenario, Mesh2 mesh);

struct RunOptions {
  int threads = 1;
};

struct RunResult {
  Model model;
  AssembledSystem system;
  ReducedSystem reduced;
  SolveReport solve;
  Eigen::VectorXd displacement;
  StressField stress;
  MetricsRow metrics;
};

/// Project, mesh, assemble, solve and post-process. Pure: writes no files.
RunResult run_scenario(const Scenario &scenario, const RunOptions &options = {});

/// Runs the reference scenario (if any) and fills the error columns.
void attach_reference_errors(RunResult &result, const Scenario &scenario,
                             const RunOptions &options = {});

/// VTK field file, metrics CSV and the echoed effective scenario.
void write_run_outputs(const RunResult &result, const Scenario &scenario,
                       const std::filesystem::path &out_dir);

/// Condition-number sweep: meshes x widths x modes x betas x pore offsets
/// over a base scenario.
struct Sweep {
  Scenario base;
  std::vector<std::array<int, 2>> meshes;
  std::vector<double> widths;
  std::vector<RegularizationMode> modes;
  std::vector<double> betas;
  std::vector<Vec2> offsets{Vec2::Zero()};
};

Sweep parse_sweep(const std::string &text,
                  const std::filesystem::path &base_dir = {});
Sweep load_sweep(const std::filesystem::path &path);

struct SweepRow {
  MetricsRow metrics;
  std::string series; ///< every sweep key except the mesh
  Vec2 offset = Vec2::Zero();
  int nx = 0;
  int ny = 0;
  double lambda_min = 0.0; ///< NaN on failure
  double lambda_max = 0.0;
};

struct SeriesSlope {
  std::string series;
  int points = 0;
  double slope = 0.0; ///< d log(kappa) / d log(h); NaN with < 2 points
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SeriesSlope> slopes;
};

/// Failures of single combinations are recorded in the row status.
SweepResult run_sweep(const Sweep &sweep, const RunOptions &options = {});

void write_sweep_outputs(const SweepResult &result,
                         const std::filesystem::path &out_dir);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

struct GeometryReport {
  Measures discrete;
  double pore_area_exact = 0.0;
  double matrix_area_exact = 0.0;
  double interface_length_exact = 0.0;
  bool exact_is_valid = true; ///< false when pores overlap or leave the domain
  std::vector<int> pore_multi_cut;
  std::vector<int> zoom_multi_cut;
  double h_min = 0.0;
  double h_max = 0.0;
  int cells = 0;
};

GeometryReport validate_geometry(const Scenario &scenario);
std::string format_geometry_report(const GeometryReport &report);

} // namespace mscut
