#include "mscut/assembly.hpp"
#include "mscut/mixing.hpp"
#include "mscut/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace mscut {

namespace {

using Triplet = Eigen::Triplet<double, int>;

std::array<double, 3> barycentric(const std::array<Vec2, 3> &x, const Vec2 &p) {
  const Vec2 e1 = x[1] - x[0], e2 = x[2] - x[0], d = p - x[0];
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  const double l1 = (d.x() * e2.y() - d.y() * e2.x()) / det;
  const double l2 = (e1.x() * d.y() - e1.y() * d.x()) / det;
  return {1.0 - l1 - l2, l1, l2};
}

double interpolate_cell(const std::array<double, 3> &values,
                        const std::array<Vec2, 3> &x, const Vec2 &p) {
  const auto l = barycentric(x, p);
  return l[0] * values[0] + l[1] * values[1] + l[2] * values[2];
}

Eigen::Matrix<double, 2, 3> traction_operator(const Vec2 &n) {
  Eigen::Matrix<double, 2, 3> t;
  t << n.x(), 0.0, n.y(), 0.0, n.y(), n.x();
  return t;
}

// Per-cell volume integrals; B^T D B is applied during the ordered merge.
struct CellIntegrals {
  double macro_measure = 0.0;
  double micro_measure = 0.0;
  std::array<double, 3> macro_shape{}; ///< int alpha N_i
  std::array<double, 3> micro_shape{}; ///< int (1 - alpha) N_i
  std::vector<double> probe_macro;
  std::vector<double> probe_micro;
};

void append_block(std::vector<Triplet> &triplets, const Cell &cell,
                  const ElementMatrix &k) {
  for (int a = 0; a < 3; ++a)
    for (int da = 0; da < 2; ++da)
      for (int b = 0; b < 3; ++b)
        for (int db = 0; db < 2; ++db) {
          const double v = k(2 * a + da, 2 * b + db);
          if (v != 0.0)
            triplets.emplace_back(2 * cell[a] + da, 2 * cell[b] + db, v);
        }
}

SparseMatrix from_triplets(int n, const std::vector<Triplet> &triplets) {
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

} // namespace

double Material::lame_lambda() const {
  return youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
}

double Material::lame_mu() const { return youngs / (2.0 * (1.0 + poisson)); }

void Material::validate() const {
  if (!(youngs > 0.0) || !std::isfinite(youngs))
    throw config_error("Young's modulus must be positive");
  if (!(poisson > -1.0 && poisson < 0.5))
    throw config_error("Poisson ratio must lie in (-1, 0.5)");
}

Eigen::Matrix3d hooke_voigt(const Material &m, PlaneModel plane) {
  m.validate();
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  if (plane == PlaneModel::Strain) {
    const double lambda = m.lame_lambda();
    const double mu = m.lame_mu();
    d << lambda + 2 * mu, lambda, 0, lambda, lambda + 2 * mu, 0, 0, 0, mu;
  } else {
    const double c = m.youngs / (1.0 - m.poisson * m.poisson);
    d << c, c * m.poisson, 0, c * m.poisson, c, 0, 0, 0,
        c * (1.0 - m.poisson) / 2.0;
  }
  return d;
}

StrainDisplacement strain_displacement(const std::array<Vec2, 3> &x) {
  const double two_area = (x[1] - x[0]).x() * (x[2] - x[0]).y() -
                          (x[1] - x[0]).y() * (x[2] - x[0]).x();
  StrainDisplacement b = StrainDisplacement::Zero();
  for (int i = 0; i < 3; ++i) {
    const Vec2 &xj = x[(i + 1) % 3];
    const Vec2 &xk = x[(i + 2) % 3];
    const double dndx = (xj.y() - xk.y()) / two_area;
    const double dndy = (xk.x() - xj.x()) / two_area;
    b(0, 2 * i) = dndx;
    b(1, 2 * i + 1) = dndy;
    b(2, 2 * i) = dndy;
    b(2, 2 * i + 1) = dndx;
  }
  return b;
}

ElementMatrix element_stiffness(const std::array<Vec2, 3> &x,
                                const Eigen::Matrix3d &d,
                                const QuadratureRule &rule,
                                std::span<const double> weight) {
  if (weight.size() != rule.weights.size())
    throw assembly_error("weight samples do not match the quadrature rule");
  double measure = 0.0;
  for (std::size_t q = 0; q < weight.size(); ++q)
    measure += rule.weights[q] * weight[q];
  if (measure == 0.0)
    return ElementMatrix::Zero();
  const StrainDisplacement b = strain_displacement(x);
  return measure * (b.transpose() * d * b);
}

FacetBlock ghost_penalty_facet(const Mesh2 &mesh, int facet,
                               const Eigen::Matrix3d &d_micro, double beta,
                               double e_micro) {
  const Facet &f = mesh.facets()[facet];
  if (!f.interior())
    throw assembly_error("ghost penalty requested on boundary facet " +
                         std::to_string(facet));
  FacetBlock block;
  auto opposite = [&](int cell) {
    for (int v : mesh.cells()[cell])
      if (v != f.nodes[0] && v != f.nodes[1])
        return v;
    throw assembly_error("facet is not an edge of its incident cell");
  };
  block.nodes = {f.nodes[0], f.nodes[1], opposite(f.cells[0]),
                 opposite(f.cells[1])};
  if (beta == 0.0)
    return block;

  const Vec2 n = mesh.facet_normal(facet);
  const Eigen::Matrix<double, 2, 3> t = traction_operator(n);
  Eigen::Matrix<double, 2, 8> jump = Eigen::Matrix<double, 2, 8>::Zero();
  for (int side = 0; side < 2; ++side) {
    const int cell = f.cells[side];
    const Cell &nodes = mesh.cells()[cell];
    const Eigen::Matrix<double, 2, 6> local =
        t * d_micro * strain_displacement(mesh.cell_coords(cell));
    const double sign = side == 0 ? 1.0 : -1.0;
    for (int i = 0; i < 3; ++i) {
      const int slot = static_cast<int>(
          std::find(block.nodes.begin(), block.nodes.end(), nodes[i]) -
          block.nodes.begin());
      jump.col(2 * slot) += sign * local.col(2 * i);
      jump.col(2 * slot + 1) += sign * local.col(2 * i + 1);
    }
  }
  const double length = mesh.facet_length(facet);
  block.matrix = (beta * length / e_micro) * length * (jump.transpose() * jump);
  return block;
}

std::string_view to_string(RegularizationMode mode) {
  switch (mode) {
  case RegularizationMode::CutOnly:
    return "cut_only";
  case RegularizationMode::CutPlusTransitionPores:
    return "cut_plus_transition_pores";
  case RegularizationMode::AllPoreElements:
    return "all_pore_elements";
  }
  return "cut_only";
}

RegularizationMode parse_regularization_mode(std::string_view name) {
  if (name == "cut_only")
    return RegularizationMode::CutOnly;
  if (name == "cut_plus_transition_pores")
    return RegularizationMode::CutPlusTransitionPores;
  if (name == "all_pore_elements")
    return RegularizationMode::AllPoreElements;
  throw config_error("unknown regularization mode '" + std::string(name) + "'");
}

CellRoles cell_roles(const Mesh2 &mesh, const CutDecomposition &pores,
                     const NodalField &phi2, double eps) {
  if (phi2.size() != mesh.nodes().size())
    throw geometry_error("nodal field size does not match mesh node count");
  const int n = mesh.num_cells();
  CellRoles r;
  r.macro_active.assign(n, 0);
  r.micro_active.assign(n, 0);
  r.pore_cut.assign(n, 0);
  r.transition.assign(n, 0);
  r.touches_pore.assign(n, 0);
  r.micro_region.assign(n, 0);
  for (int c = 0; c < n; ++c) {
    const Cell &cell = mesh.cells()[c];
    const auto [lo, hi] = std::minmax({phi2[cell[0]], phi2[cell[1]], phi2[cell[2]]});
    const CellClass cls = pores.cell_class(c);
    r.macro_active[c] = hi > -eps;
    r.micro_region[c] = lo < eps;
    r.micro_active[c] = r.micro_region[c] && cls != CellClass::PositiveSide;
    r.pore_cut[c] = r.micro_region[c] && cls == CellClass::Cut;
    r.transition[c] = lo <= eps && hi >= -eps;
    r.touches_pore[c] = cls != CellClass::NegativeSide;
  }
  return r;
}

std::vector<int> facet_sets(const Mesh2 &mesh, const CellRoles &roles,
                            RegularizationMode mode) {
  const int n = mesh.num_cells();
  std::vector<char> seed(n, 0), allowed(n, 0);
  for (int c = 0; c < n; ++c) {
    seed[c] = roles.pore_cut[c];
    allowed[c] = roles.fictitious(c);
    if (mode != RegularizationMode::CutOnly)
      seed[c] |= roles.transition[c] && roles.touches_pore[c];
    if (mode == RegularizationMode::AllPoreElements) {
      const bool pore_cell = roles.touches_pore[c] && roles.micro_region[c];
      seed[c] |= pore_cell;
      allowed[c] |= pore_cell;
    }
  }
  std::vector<int> out;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    const Facet &facet = mesh.facets()[f];
    if (!facet.interior())
      continue;
    const int k0 = facet.cells[0], k1 = facet.cells[1];
    if (allowed[k0] && allowed[k1] && (seed[k0] || seed[k1]))
      out.push_back(f);
  }
  return out;
}

std::vector<int> facet_sets(const Mesh2 &mesh, const NodalField &phi1,
                            const NodalField &phi2, double eps,
                            RegularizationMode mode, double rel_tol) {
  const CutDecomposition pores(mesh, phi1, rel_tol);
  return facet_sets(mesh, cell_roles(mesh, pores, phi2, eps), mode);
}

void MultiscaleConfig::validate() const {
  micro.validate();
  macro.validate();
  if (!(half_width > 0.0))
    throw config_error("mixing half-width must be positive");
  if (!(beta >= 0.0))
    throw config_error("ghost-penalty parameter must be non-negative");
  if (quadrature.bulk < 1 || quadrature.bulk > 6 || quadrature.transition < 1 ||
      quadrature.transition > 6)
    throw config_error("quadrature degrees must lie in 1..6");
  for (const auto &t : tractions)
    for (const auto &d : dirichlet)
      if (t.edge == d.edge)
        throw config_error("edge '" + std::string(to_string(t.edge)) +
                           "' carries both a traction and a displacement");
}

int AssembledSystem::num_active() const {
  return static_cast<int>(std::count(active.begin(), active.end(), 1));
}

AssembledSystem assemble(const Mesh2 &mesh, const NodalField &phi1,
                         const NodalField &phi2, const MultiscaleConfig &config,
                         int threads, QuadratureProbe *probe) {
  config.validate();
  if (phi1.size() != mesh.nodes().size() || phi2.size() != mesh.nodes().size())
    throw assembly_error("level-set fields do not match the mesh");

  const MixingWeight mixing(config.half_width);
  const double eps = config.half_width;
  const CutDecomposition pores(mesh, phi1, config.snap_tolerance);
  const CellRoles roles = cell_roles(mesh, pores, phi2, eps);
  const Eigen::Matrix3d d_macro = hooke_voigt(config.macro, config.plane);
  const Eigen::Matrix3d d_micro = hooke_voigt(config.micro, config.plane);

  const int n_cells = mesh.num_cells();
  const int n_dofs = 2 * mesh.num_nodes();
  std::vector<CellIntegrals> integrals(n_cells);

  parallel_for(n_cells, threads, [&](int c) {
    const auto x = mesh.cell_coords(c);
    const Cell &cell = mesh.cells()[c];
    const std::array<double, 3> phi = {phi2[cell[0]], phi2[cell[1]],
                                       phi2[cell[2]]};
    const int degree = roles.transition[c] ? config.quadrature.transition
                                           : config.quadrature.bulk;
    CellIntegrals &out = integrals[c];

    auto integrate = [&](const QuadratureRule &rule, bool macro_term) {
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const double a = mixing.alpha(interpolate_cell(phi, x, rule.points[q]));
        const double w = rule.weights[q] * (macro_term ? a : 1.0 - a);
        if (probe) {
          out.probe_macro.push_back(a);
          out.probe_micro.push_back(1.0 - a);
        }
        if (w == 0.0)
          continue;
        const auto l = barycentric(x, rule.points[q]);
        auto &shape = macro_term ? out.macro_shape : out.micro_shape;
        (macro_term ? out.macro_measure : out.micro_measure) += w;
        for (int i = 0; i < 3; ++i)
          shape[i] += w * l[i];
      }
    };

    if (roles.macro_active[c])
      integrate(triangle_quadrature(x, degree), true);
    if (roles.micro_active[c])
      integrate(cell_quadrature(pores, mesh, c, Side::Negative, degree), false);
  });

  AssembledSystem sys;
  sys.load = Eigen::VectorXd::Zero(n_dofs);
  {
    std::vector<Triplet> macro_t, micro_t;
    for (int c = 0; c < n_cells; ++c) {
      const CellIntegrals &ci = integrals[c];
      const Cell &cell = mesh.cells()[c];
      if (probe) {
        probe->macro_weight.insert(probe->macro_weight.end(),
                                   ci.probe_macro.begin(), ci.probe_macro.end());
        probe->micro_weight.insert(probe->micro_weight.end(),
                                   ci.probe_micro.begin(), ci.probe_micro.end());
      }
      if (ci.macro_measure == 0.0 && ci.micro_measure == 0.0)
        continue;
      const StrainDisplacement b = strain_displacement(mesh.cell_coords(c));
      if (ci.macro_measure != 0.0)
        append_block(macro_t, cell,
                     ci.macro_measure * (b.transpose() * d_macro * b));
      if (ci.micro_measure != 0.0)
        append_block(micro_t, cell,
                     ci.micro_measure * (b.transpose() * d_micro * b));
      for (int i = 0; i < 3; ++i)
        for (int d = 0; d < 2; ++d)
          sys.load[2 * cell[i] + d] +=
              ci.macro_shape[i] * config.body_force_macro[d] +
              ci.micro_shape[i] * config.body_force_micro[d];
    }
    sys.macro = from_triplets(n_dofs, macro_t);
    sys.micro = from_triplets(n_dofs, micro_t);
  }

  sys.ghost_facets = facet_sets(mesh, roles, config.mode);
  {
    const int n_ghost = static_cast<int>(sys.ghost_facets.size());
    std::vector<FacetBlock> blocks(n_ghost);
    parallel_for(n_ghost, threads, [&](int i) {
      blocks[i] = ghost_penalty_facet(mesh, sys.ghost_facets[i], d_micro,
                                      config.beta, config.micro.youngs);
    });
    std::vector<Triplet> ghost_t;
    ghost_t.reserve(static_cast<std::size_t>(n_ghost) * 64);
    for (const FacetBlock &blk : blocks)
      for (int a = 0; a < 4; ++a)
        for (int da = 0; da < 2; ++da)
          for (int b = 0; b < 4; ++b)
            for (int db = 0; db < 2; ++db) {
              const double v = blk.matrix(2 * a + da, 2 * b + db);
              if (v != 0.0)
                ghost_t.emplace_back(2 * blk.nodes[a] + da,
                                     2 * blk.nodes[b] + db, v);
            }
    sys.ghost = from_triplets(n_dofs, ghost_t);
  }

  sys.matrix = sys.macro + sys.micro;
  sys.matrix += sys.ghost;
  sys.matrix.makeCompressed();

  for (const TractionCondition &t : config.tractions)
    for (int f = 0; f < mesh.num_facets(); ++f) {
      const Facet &facet = mesh.facets()[f];
      if (facet.interior() || facet.tag != t.edge)
        continue;
      const double half = 0.5 * mesh.facet_length(f);
      for (int v : facet.nodes)
        for (int d = 0; d < 2; ++d)
          sys.load[2 * v + d] += half * t.traction[d];
    }

  const Eigen::VectorXd diag = sys.matrix.diagonal();
  sys.active.assign(n_dofs, 0);
  for (int i = 0; i < n_dofs; ++i)
    sys.active[i] = diag[i] != 0.0;

  sys.constrained.assign(n_dofs, 0);
  sys.prescribed = Eigen::VectorXd::Zero(n_dofs);
  for (const DirichletCondition &bc : config.dirichlet)
    for (int f = 0; f < mesh.num_facets(); ++f) {
      const Facet &facet = mesh.facets()[f];
      if (facet.interior() || facet.tag != bc.edge)
        continue;
      for (int v : facet.nodes) {
        const Vec2 value = bc.value + bc.gradient * mesh.nodes()[v];
        for (int d = 0; d < 2; ++d) {
          const int dof = 2 * v + d;
          if (!bc.fixed[d] || sys.constrained[dof])
            continue;
          sys.constrained[dof] = 1;
          sys.prescribed[dof] = value[d];
        }
      }
    }
  return sys;
}

ReducedSystem reduce(const AssembledSystem &system) {
  const int n = system.num_dofs();
  std::vector<int> slot(n, -1);
  ReducedSystem out;
  for (int i = 0; i < n; ++i)
    if (system.active[i] && !system.constrained[i]) {
      slot[i] = static_cast<int>(out.dofs.size());
      out.dofs.push_back(i);
    }
  const int m = static_cast<int>(out.dofs.size());
  out.rhs.resize(m);
  for (int r = 0; r < m; ++r)
    out.rhs[r] = system.load[out.dofs[r]];

  std::vector<Triplet> triplets;
  triplets.reserve(system.matrix.nonZeros());
  for (int j = 0; j < system.matrix.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(system.matrix, j); it; ++it) {
      const int i = static_cast<int>(it.row());
      if (slot[i] < 0)
        continue;
      if (slot[j] >= 0)
        triplets.emplace_back(slot[i], slot[j], it.value());
      else if (system.constrained[j] && system.active[j])
        out.rhs[slot[i]] -= it.value() * system.prescribed[j];
    }
  out.matrix.resize(m, m);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.matrix.makeCompressed();
  return out;
}

Eigen::VectorXd expand(const AssembledSystem &system,
                       const ReducedSystem &reduced,
                       const Eigen::VectorXd &solution) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(system.num_dofs());
  for (int i = 0; i < system.num_dofs(); ++i)
    if (system.constrained[i])
      u[i] = system.prescribed[i];
  for (std::size_t r = 0; r < reduced.dofs.size(); ++r)
    u[reduced.dofs[r]] = solution[static_cast<int>(r)];
  return u;
}

double quadratic_energy(const SparseMatrix &a, const Eigen::VectorXd &u) {
  return u.dot(a * u);
}

} // namespace mscut
