#pragma once

#include "mscut/cutgeom.hpp"
#include "mscut/levelset.hpp"
#include "mscut/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <span>
#include <string_view>
#include <vector>

namespace mscut {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Isotropic linear elastic material.
struct Material {
  double youngs = 1.0;
  double poisson = 0.3;

  double lame_lambda() const;
  double lame_mu() const;
  void validate() const;
};

enum class PlaneModel { Strain, Stress };

/// 3x3 constitutive matrix acting on (e_xx, e_yy, gamma_xy).
Eigen::Matrix3d hooke_voigt(const Material &m,
                            PlaneModel plane = PlaneModel::Strain);

using StrainDisplacement = Eigen::Matrix<double, 3, 6>;
using ElementMatrix = Eigen::Matrix<double, 6, 6>;
using FacetMatrix = Eigen::Matrix<double, 8, 8>;

/// Constant strain-displacement matrix of a P1 triangle, DOFs ordered
/// (ux0, uy0, ux1, uy1, ux2, uy2).
StrainDisplacement strain_displacement(const std::array<Vec2, 3> &x);

/// sum_q w_q weight_q B^T D B for a P1 triangle.
ElementMatrix element_stiffness(const std::array<Vec2, 3> &x,
                                const Eigen::Matrix3d &d,
                                const QuadratureRule &rule,
                                std::span<const double> weight);

struct FacetBlock {
  /// Facet nodes, then the node opposite the facet in cells[0] and cells[1].
  std::array<int, 4> nodes{};
  FacetMatrix matrix = FacetMatrix::Zero();
};

/// Ghost-penalty block (beta h_F / E_m) |F| J^T J, where J maps the eight
/// DOFs to the jump of the normal micro traction across the facet and
/// h_F = |F|.
FacetBlock ghost_penalty_facet(const Mesh2 &mesh, int facet,
                               const Eigen::Matrix3d &d_micro, double beta,
                               double e_micro);

enum class RegularizationMode {
  CutOnly,
  CutPlusTransitionPores,
  AllPoreElements,
};

std::string_view to_string(RegularizationMode mode);
RegularizationMode parse_regularization_mode(std::string_view name);

/// Roles of each cell relative to the pore (phi1) and zoom (phi2) level
/// sets, shared by facet selection, assembly and post-processing.
struct CellRoles {
  std::vector<char> macro_active;  ///< some node with phi2 > -eps
  std::vector<char> micro_active;  ///< some node with phi2 < eps, has matrix
  std::vector<char> pore_cut;      ///< cut by phi1 and micro_active
  std::vector<char> transition;    ///< nodal phi2 range meets [-eps, eps]
  std::vector<char> touches_pore;  ///< some pore part (phi1 side positive)
  std::vector<char> micro_region;  ///< some node with phi2 < eps

  bool fictitious(int c) const { return macro_active[c] || micro_active[c]; }
};

CellRoles cell_roles(const Mesh2 &mesh, const CutDecomposition &pores,
                     const NodalField &phi2, double eps);

/// Interior facets carrying ghost-penalty terms, sorted ascending.
///
/// CutOnly: facets between fictitious-domain cells where at least one side
/// is cut by the pore interface inside the micro region.
/// CutPlusTransitionPores: also facets touching cells that meet both the
/// transition band and the pores.
/// AllPoreElements: also facets touching any micro-region cell that meets a
/// pore; cells inside pores join the fictitious domain in this mode.
std::vector<int> facet_sets(const Mesh2 &mesh, const NodalField &phi1,
                            const NodalField &phi2, double eps,
                            RegularizationMode mode, double rel_tol = 1e-12);

std::vector<int> facet_sets(const Mesh2 &mesh, const CellRoles &roles,
                            RegularizationMode mode);

/// Essential condition on a tagged edge: u_d(x) = value_d + (gradient x)_d
/// for each fixed component d.
struct DirichletCondition {
  BoundaryTag edge = BoundaryTag::Bottom;
  std::array<bool, 2> fixed{true, true};
  Vec2 value = Vec2::Zero();
  Eigen::Matrix2d gradient = Eigen::Matrix2d::Zero();
};

struct TractionCondition {
  BoundaryTag edge = BoundaryTag::Top;
  Vec2 traction = Vec2::Zero();
};

struct QuadratureDegrees {
  int bulk = 1;
  int transition = 4;
};

struct MultiscaleConfig {
  Material micro;
  Material macro;
  PlaneModel plane = PlaneModel::Strain;
  double half_width = 0.05;
  double beta = 0.005;
  RegularizationMode mode = RegularizationMode::CutOnly;
  std::vector<DirichletCondition> dirichlet;
  std::vector<TractionCondition> tractions;
  Vec2 body_force_macro = Vec2::Zero();
  Vec2 body_force_micro = Vec2::Zero();
  QuadratureDegrees quadrature;
  double snap_tolerance = 1e-12;

  void validate() const;
};

/// Weight pairs (alpha_M, alpha_m) at every quadrature point used by the
/// volume terms, in assembly order.
struct QuadratureProbe {
  std::vector<double> macro_weight;
  std::vector<double> micro_weight;
};

struct AssembledSystem {
  SparseMatrix matrix; ///< macro + micro + ghost
  SparseMatrix macro;
  SparseMatrix micro;
  SparseMatrix ghost;
  Eigen::VectorXd load;
  std::vector<char> active;      ///< per DOF; zero-diagonal DOFs are inactive
  std::vector<char> constrained; ///< per DOF Dirichlet flag
  Eigen::VectorXd prescribed;    ///< Dirichlet values, zero elsewhere
  std::vector<int> ghost_facets;

  int num_dofs() const { return static_cast<int>(load.size()); }
  int num_active() const;
};

AssembledSystem assemble(const Mesh2 &mesh, const NodalField &phi1,
                         const NodalField &phi2, const MultiscaleConfig &config,
                         int threads = 1, QuadratureProbe *probe = nullptr);

/// Free (active, unconstrained) block with Dirichlet values moved to the
/// right-hand side.
struct ReducedSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<int> dofs; ///< global DOF of each reduced row
};

ReducedSystem reduce(const AssembledSystem &system);

/// Global displacement vector: reduced solution on free DOFs, prescribed
/// values on constrained ones, zero on inactive DOFs.
Eigen::VectorXd expand(const AssembledSystem &system,
                       const ReducedSystem &reduced,
                       const Eigen::VectorXd &solution);

double quadratic_energy(const SparseMatrix &a, const Eigen::VectorXd &u);

} // namespace mscut
