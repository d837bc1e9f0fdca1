#pragma once

#include "mscut/assembly.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mscut {

enum class DomainTag { Macro = 0, Micro = 1, Transition = 2, Void = 3 };

/// Cell-wise stresses (s_xx, s_yy, s_xy) of a P1 displacement field.
struct StressField {
  std::vector<Eigen::Vector3d> macro;
  std::vector<Eigen::Vector3d> micro; ///< zero in cells lying inside a pore
  std::vector<Eigen::Vector3d> mixed;
  std::vector<double> alpha;          ///< mixing weight at the centroid
  std::vector<DomainTag> domain;
};

/// Mixed stress alpha s_M + (1 - alpha) s_m with alpha taken from the P1
/// zoom field at the cell centroid, which reduces to s_M on the macro side
/// and s_m on the micro side of the band.
StressField recover_stress(const Mesh2 &mesh, const NodalField &phi1,
                           const NodalField &phi2,
                           const MultiscaleConfig &config,
                           const Eigen::VectorXd &u);

/// Uniform bucket grid for locating points in a triangulation.
class PointLocator {
public:
  explicit PointLocator(const Mesh2 &mesh);

  /// Index of a cell containing p (within a small tolerance), -1 outside.
  int locate(const Vec2 &p) const;

private:
  const Mesh2 *mesh_;
  int nx_ = 1, ny_ = 1;
  double dx_ = 1.0, dy_ = 1.0;
  std::vector<std::vector<int>> buckets_;
};

Vec2 displacement_at(const Mesh2 &mesh, const Eigen::VectorXd &u, int cell,
                     const Vec2 &p);

/// Engineering strain (e_xx, e_yy, gamma_xy) of cell c.
Eigen::Vector3d cell_strain(const Mesh2 &mesh, const Eigen::VectorXd &u,
                            int c);

/// Where to compare a solution against a reference: the matrix side of the
/// pores (phi1 < 0) intersected with phi2 < phi2_below.
struct ComparisonRegion {
  double phi2_below = 1e300;
  /// 0 or 1 restricts the L2 norm to one component, -1 uses both.
  int component = -1;
  int degree = 4;
  double snap_tolerance = 1e-12;
};

struct ErrorNorms {
  double l2 = 0.0;         ///< ||u_h - u_ref||
  double l2_reference = 0.0;
  double energy = 0.0;     ///< micro-material energy norm of the difference
  double energy_reference = 0.0;

  double l2_relative() const { return l2_reference > 0 ? l2 / l2_reference : l2; }
  double energy_relative() const {
    return energy_reference > 0 ? energy / energy_reference : energy;
  }
};

ErrorNorms compare_to_reference(const Mesh2 &mesh, const Eigen::VectorXd &u,
                                const NodalField &phi1, const NodalField &phi2,
                                const Eigen::Matrix3d &d_micro,
                                const ComparisonRegion &region,
                                const Mesh2 &reference_mesh,
                                const Eigen::VectorXd &reference_u);

/// Legacy ASCII VTK unstructured grid with the displacement as point data
/// and stresses, alpha and the domain tag as cell data.
void export_vtk(const std::filesystem::path &path, const Mesh2 &mesh,
                const Eigen::VectorXd &u, const StressField &stress);

struct MetricsRow {
  std::string name;
  double h_min = 0.0;
  double h_max = 0.0;
  double two_eps = 0.0;
  double beta = 0.0;
  std::string mode;
  int dofs = 0;
  int active_dofs = 0;
  int free_dofs = 0;
  int ghost_facets = 0;
  double kappa = 0.0; ///< NaN when not computed
  std::string solver;
  int iterations = 0;
  double residual = 0.0;
  double energy_macro = 0.0;
  double energy_micro = 0.0;
  double energy_ghost = 0.0;
  double l2_error = 0.0;     ///< NaN without a reference
  double energy_error = 0.0; ///< NaN without a reference
  std::string status = "ok";
};

std::string metrics_header();
std::string format_metrics_row(const MetricsRow &row);

/// Writes rows sorted by h_min, coarsest first (stable for ties).
void export_metrics(const std::filesystem::path &path,
                    std::vector<MetricsRow> rows);

/// Shortest round-trip decimal form of a double, "nan"/"inf" for
/// non-finite values.
std::string format_double(double v);

} // namespace mscut
