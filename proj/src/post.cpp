#include "mscut/post.hpp"
#include "mscut/mixing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mscut {

namespace {

std::array<double, 3> barycentric(const std::array<Vec2, 3> &x, const Vec2 &p) {
  const Vec2 e1 = x[1] - x[0], e2 = x[2] - x[0], d = p - x[0];
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  const double l1 = (d.x() * e2.y() - d.y() * e2.x()) / det;
  const double l2 = (e1.x() * d.y() - e1.y() * d.x()) / det;
  return {1.0 - l1 - l2, l1, l2};
}

Eigen::Matrix<double, 6, 1> cell_dofs(const Mesh2 &mesh,
                                      const Eigen::VectorXd &u, int c) {
  Eigen::Matrix<double, 6, 1> ue;
  const Cell &cell = mesh.cells()[c];
  for (int i = 0; i < 3; ++i) {
    ue[2 * i] = u[2 * cell[i]];
    ue[2 * i + 1] = u[2 * cell[i] + 1];
  }
  return ue;
}

} // namespace

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Eigen::Vector3d cell_strain(const Mesh2 &mesh, const Eigen::VectorXd &u,
                            int c) {
  return strain_displacement(mesh.cell_coords(c)) * cell_dofs(mesh, u, c);
}

StressField recover_stress(const Mesh2 &mesh, const NodalField &phi1,
                           const NodalField &phi2,
                           const MultiscaleConfig &config,
                           const Eigen::VectorXd &u) {
  if (u.size() != 2 * mesh.num_nodes())
    throw assembly_error("displacement vector does not match the mesh");
  const MixingWeight mixing(config.half_width);
  const double eps = config.half_width;
  const CutDecomposition pores(mesh, phi1, config.snap_tolerance);
  const Eigen::Matrix3d d_macro = hooke_voigt(config.macro, config.plane);
  const Eigen::Matrix3d d_micro = hooke_voigt(config.micro, config.plane);

  const int n = mesh.num_cells();
  StressField s;
  s.macro.resize(n);
  s.micro.resize(n);
  s.mixed.resize(n);
  s.alpha.resize(n);
  s.domain.resize(n);
  for (int c = 0; c < n; ++c) {
    const Eigen::Vector3d strain = cell_strain(mesh, u, c);
    const auto x = mesh.cell_coords(c);
    const Vec2 centroid = (x[0] + x[1] + x[2]) / 3.0;
    const double a = mixing.alpha(interpolate(phi2, mesh, c, centroid));
    const bool void_cell = pores.cell_class(c) == CellClass::PositiveSide;
    s.macro[c] = d_macro * strain;
    s.micro[c] = void_cell ? Eigen::Vector3d::Zero() : Eigen::Vector3d(d_micro * strain);
    if (a == 1.0)
      s.mixed[c] = s.macro[c];
    else if (a == 0.0)
      s.mixed[c] = s.micro[c];
    else
      s.mixed[c] = a * s.macro[c] + (1.0 - a) * s.micro[c];
    s.alpha[c] = a;

    if (in_transition(mesh, phi2, c, eps))
      s.domain[c] = DomainTag::Transition;
    else if (a == 1.0)
      s.domain[c] = DomainTag::Macro;
    else if (void_cell)
      s.domain[c] = DomainTag::Void;
    else
      s.domain[c] = DomainTag::Micro;
  }
  return s;
}

PointLocator::PointLocator(const Mesh2 &mesh) : mesh_(&mesh) {
  const Rect &d = mesh.domain();
  const int side = std::max(
      1, static_cast<int>(std::sqrt(static_cast<double>(mesh.num_cells()) / 2.0)));
  nx_ = ny_ = side;
  dx_ = d.width() / nx_;
  dy_ = d.height() / ny_;
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  auto clamp_x = [&](double v) {
    return std::clamp(static_cast<int>(std::floor((v - d.xmin) / dx_)), 0, nx_ - 1);
  };
  auto clamp_y = [&](double v) {
    return std::clamp(static_cast<int>(std::floor((v - d.ymin) / dy_)), 0, ny_ - 1);
  };
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto x = mesh.cell_coords(c);
    const double x0 = std::min({x[0].x(), x[1].x(), x[2].x()});
    const double x1 = std::max({x[0].x(), x[1].x(), x[2].x()});
    const double y0 = std::min({x[0].y(), x[1].y(), x[2].y()});
    const double y1 = std::max({x[0].y(), x[1].y(), x[2].y()});
    for (int j = clamp_y(y0); j <= clamp_y(y1); ++j)
      for (int i = clamp_x(x0); i <= clamp_x(x1); ++i)
        buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(c);
  }
}

int PointLocator::locate(const Vec2 &p) const {
  const Rect &d = mesh_->domain();
  const int i = static_cast<int>(std::floor((p.x() - d.xmin) / dx_));
  const int j = static_cast<int>(std::floor((p.y() - d.ymin) / dy_));
  if (i < -1 || j < -1 || i > nx_ || j > ny_)
    return -1;
  int best = -1;
  double best_min = -1e-9;
  for (const int c :
       buckets_[static_cast<std::size_t>(std::clamp(j, 0, ny_ - 1)) * nx_ +
                std::clamp(i, 0, nx_ - 1)]) {
    const auto l = barycentric(mesh_->cell_coords(c), p);
    const double m = std::min({l[0], l[1], l[2]});
    if (m >= 0.0)
      return c;
    if (m > best_min) {
      best_min = m;
      best = c;
    }
  }
  return best;
}

Vec2 displacement_at(const Mesh2 &mesh, const Eigen::VectorXd &u, int cell,
                     const Vec2 &p) {
  const auto l = barycentric(mesh.cell_coords(cell), p);
  const Cell &k = mesh.cells()[cell];
  Vec2 out = Vec2::Zero();
  for (int i = 0; i < 3; ++i)
    out += l[i] * Vec2(u[2 * k[i]], u[2 * k[i] + 1]);
  return out;
}

ErrorNorms compare_to_reference(const Mesh2 &mesh, const Eigen::VectorXd &u,
                                const NodalField &phi1, const NodalField &phi2,
                                const Eigen::Matrix3d &d_micro,
                                const ComparisonRegion &region,
                                const Mesh2 &reference_mesh,
                                const Eigen::VectorXd &reference_u) {
  if (region.component < -1 || region.component > 1)
    throw config_error("comparison component must be -1, 0 or 1");
  const CutDecomposition pores(mesh, phi1, region.snap_tolerance);
  const PointLocator locator(reference_mesh);
  double l2 = 0.0, l2_ref = 0.0, en = 0.0, en_ref = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (pores.cell_class(c) == CellClass::PositiveSide)
      continue;
    const QuadratureRule rule =
        cell_quadrature(pores, mesh, c, Side::Negative, region.degree);
    const Eigen::Vector3d strain = cell_strain(mesh, u, c);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Vec2 &p = rule.points[q];
      if (!(interpolate(phi2, mesh, c, p) < region.phi2_below))
        continue;
      const int rc = locator.locate(p);
      if (rc < 0)
        throw geometry_error("quadrature point outside the reference mesh");
      const Vec2 uh = displacement_at(mesh, u, c, p);
      const Vec2 ur = displacement_at(reference_mesh, reference_u, rc, p);
      const double w = rule.weights[q];
      if (region.component < 0) {
        l2 += w * (uh - ur).squaredNorm();
        l2_ref += w * ur.squaredNorm();
      } else {
        const double e = uh[region.component] - ur[region.component];
        l2 += w * e * e;
        l2_ref += w * ur[region.component] * ur[region.component];
      }
      const Eigen::Vector3d sr = cell_strain(reference_mesh, reference_u, rc);
      const Eigen::Vector3d de = strain - sr;
      en += w * de.dot(d_micro * de);
      en_ref += w * sr.dot(d_micro * sr);
    }
  }
  ErrorNorms out;
  out.l2 = std::sqrt(l2);
  out.l2_reference = std::sqrt(l2_ref);
  out.energy = std::sqrt(std::max(en, 0.0));
  out.energy_reference = std::sqrt(std::max(en_ref, 0.0));
  return out;
}

void export_vtk(const std::filesystem::path &path, const Mesh2 &mesh,
                const Eigen::VectorXd &u, const StressField &stress) {
  const int n = mesh.num_nodes(), m = mesh.num_cells();
  if (u.size() != 2 * n || static_cast<int>(stress.mixed.size()) != m)
    throw io_error("VTK export: field sizes do not match the mesh");
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\n"
     << "mscut solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (const Vec2 &p : mesh.nodes())
    os << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
  os << "CELLS " << m << ' ' << 4 * m << '\n';
  for (const Cell &c : mesh.cells())
    os << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  os << "CELL_TYPES " << m << '\n';
  for (int c = 0; c < m; ++c)
    os << "5\n";
  os << "POINT_DATA " << n << "\nVECTORS displacement double\n";
  for (int i = 0; i < n; ++i)
    os << format_double(u[2 * i]) << ' ' << format_double(u[2 * i + 1])
       << " 0\n";
  os << "CELL_DATA " << m << '\n';
  auto scalar = [&](const char *name, auto &&value) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < m; ++c)
      os << format_double(value(c)) << '\n';
  };
  scalar("sigma_xx", [&](int c) { return stress.mixed[c][0]; });
  scalar("sigma_yy", [&](int c) { return stress.mixed[c][1]; });
  scalar("sigma_xy", [&](int c) { return stress.mixed[c][2]; });
  scalar("sigma_yy_macro", [&](int c) { return stress.macro[c][1]; });
  scalar("sigma_yy_micro", [&](int c) { return stress.micro[c][1]; });
  scalar("alpha", [&](int c) { return stress.alpha[c]; });
  os << "SCALARS domain_tag int 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < m; ++c)
    os << static_cast<int>(stress.domain[c]) << '\n';

  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw io_error("cannot open '" + path.string() + "' for writing");
  file << os.str();
  if (!file)
    throw io_error("failed writing '" + path.string() + "'");
}

std::string metrics_header() {
  return "name,h_min,h_max,two_eps,beta,mode,dofs,active_dofs,free_dofs,"
         "ghost_facets,kappa,solver,iterations,residual,energy_macro,"
         "energy_micro,energy_ghost,l2_error,energy_error,status";
}

std::string format_metrics_row(const MetricsRow &r) {
  auto text = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  std::ostringstream os;
  os << text(r.name) << ',' << format_double(r.h_min) << ','
     << format_double(r.h_max) << ',' << format_double(r.two_eps) << ','
     << format_double(r.beta) << ',' << text(r.mode) << ',' << r.dofs << ','
     << r.active_dofs << ',' << r.free_dofs << ',' << r.ghost_facets << ','
     << format_double(r.kappa) << ',' << text(r.solver) << ',' << r.iterations
     << ',' << format_double(r.residual) << ',' << format_double(r.energy_macro)
     << ',' << format_double(r.energy_micro) << ','
     << format_double(r.energy_ghost) << ',' << format_double(r.l2_error) << ','
     << format_double(r.energy_error) << ',' << text(r.status);
  return os.str();
}

void export_metrics(const std::filesystem::path &path,
                    std::vector<MetricsRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MetricsRow &a, const MetricsRow &b) {
                     return a.h_min > b.h_min;
                   });
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw io_error("cannot open '" + path.string() + "' for writing");
  file << metrics_header() << '\n';
  for (const MetricsRow &r : rows)
    file << format_metrics_row(r) << '\n';
  if (!file)
    throw io_error("failed writing '" + path.string() + "'");
}

} // namespace mscut
