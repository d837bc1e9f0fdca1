#include "mscut/post.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mscut;

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path temp_dir(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mscut_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("stresses of an affine field and the mixing envelope") {
  const Mesh2 mesh = generate_rect({0, 0, 4, 3}, 8, 6);
  const NodalField phi1 =
      project_p1(LevelSet::circle(Vec2(1.5, 1.5), 0.6), mesh);
  const NodalField phi2 = project_p1(
      LevelSet::circle(Vec2(1.6, 1.4), 1.2).with_convention(SignConvention::PositiveOutside),
      mesh);
  MultiscaleConfig cfg;
  cfg.micro = {1.0, 0.3};
  cfg.macro = {0.6, 0.25};
  cfg.half_width = 0.4;
  Eigen::Matrix2d g;
  g << 0.01, -0.02, 0.005, -0.03;
  Eigen::VectorXd u(2 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    u.segment<2>(2 * i) = g * mesh.nodes()[i];
  const Eigen::Vector3d strain(g(0, 0), g(1, 1), g(0, 1) + g(1, 0));

  const StressField s = recover_stress(mesh, phi1, phi2, cfg, u);
  const Eigen::Vector3d sm = oracle::plane_strain(1.0, 0.3) * strain;
  const Eigen::Vector3d sM = oracle::plane_strain(0.6, 0.25) * strain;
  const CutDecomposition pores(mesh, phi1);
  int transition = 0, voids = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CHECK((s.macro[c] - sM).norm() <= 1e-14);
    if (pores.cell_class(c) == CellClass::PositiveSide)
      CHECK(s.micro[c].isZero());
    else
      CHECK((s.micro[c] - sm).norm() <= 1e-14);
    CHECK(s.mixed[c].allFinite());
    for (int k = 0; k < 3; ++k) {
      const double lo = std::min(s.macro[c][k], s.micro[c][k]);
      const double hi = std::max(s.macro[c][k], s.micro[c][k]);
      CHECK(s.mixed[c][k] >= lo - 1e-12);
      CHECK(s.mixed[c][k] <= hi + 1e-12);
    }
    transition += s.domain[c] == DomainTag::Transition;
    voids += s.domain[c] == DomainTag::Void;
    if (s.alpha[c] == 1.0)
      CHECK(s.mixed[c] == s.macro[c]);
    if (s.alpha[c] == 0.0)
      CHECK(s.mixed[c] == s.micro[c]);
  }
  CHECK(transition > 0);
  CHECK(voids > 0);
}

TEST_CASE("point location and interpolation") {
  const Mesh2 mesh = generate_rect({-1, 0, 3, 2}, 9, 5);
  const PointLocator loc(mesh);
  oracle::Gen gen(71);
  Eigen::VectorXd u(2 * mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    u.segment<2>(2 * i) = Vec2(2 * mesh.nodes()[i].x() - 1, mesh.nodes()[i].y());
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 p(gen.uniform(-1, 3), gen.uniform(0, 2));
    const int c = loc.locate(p);
    REQUIRE(c >= 0);
    const Vec2 v = displacement_at(mesh, u, c, p);
    CHECK(v.x() == doctest::Approx(2 * p.x() - 1).epsilon(1e-12));
    CHECK(v.y() == doctest::Approx(p.y()).epsilon(1e-12));
  }
  CHECK(loc.locate(Vec2(5, 5)) == -1);
  CHECK(loc.locate(mesh.nodes().back()) >= 0);
}

TEST_CASE("comparison against an identical reference is zero") {
  const Mesh2 coarse = generate_rect({0, 0, 2, 2}, 4, 4);
  CellSet all(coarse.num_cells());
  for (int c = 0; c < coarse.num_cells(); ++c)
    all[c] = c;
  const Mesh2 fine = refine(coarse, all, 1);
  // a field linear on the coarse mesh is reproduced on the nested fine mesh
  auto field = [](const Mesh2 &m) {
    Eigen::VectorXd u(2 * m.num_nodes());
    for (int i = 0; i < m.num_nodes(); ++i)
      u.segment<2>(2 * i) = Vec2(0.1 * m.nodes()[i].y(), -0.2 * m.nodes()[i].x());
    return u;
  };
  const NodalField phi1 = project_p1(LevelSet::circle(Vec2(1, 1), 0.5), coarse);
  const NodalField phi2 = project_p1(LevelSet::constant(-1.0), coarse);
  const ErrorNorms e = compare_to_reference(coarse, field(coarse), phi1, phi2,
                                            oracle::plane_strain(1, 0.3), {}, fine,
                                            field(fine));
  CHECK(e.l2 <= 1e-14);
  CHECK(e.energy <= 1e-14);
  CHECK(e.l2_reference > 0.0);
  CHECK(e.l2_relative() <= 1e-13);
}

TEST_CASE("legacy VTK output") {
  const Mesh2 mesh = generate_rect({0, 0, 1, 1}, 2, 1);
  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(2 * mesh.num_nodes(), 0, 1);
  StressField s;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    s.macro.emplace_back(1, 2, 3);
    s.micro.emplace_back(0, 0, 0);
    s.mixed.emplace_back(0.1, 0.2, 0.3);
    s.alpha.push_back(0.5);
    s.domain.push_back(DomainTag::Transition);
  }
  const auto dir = temp_dir("vtk");
  export_vtk(dir / "out.vtk", mesh, u, s);
  const std::string text = slurp(dir / "out.vtk");
  CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(text.find("POINTS 6 double") != std::string::npos);
  CHECK(text.find("CELLS 4 16") != std::string::npos);
  CHECK(text.find("VECTORS displacement double") != std::string::npos);
  CHECK(text.find("SCALARS domain_tag int 1") != std::string::npos);
  CHECK(text.find("SCALARS sigma_yy_macro double 1") != std::string::npos);
  CHECK_THROWS_AS(export_vtk(dir / "missing" / "x.vtk", mesh, u, s), Error);
}

TEST_CASE("metrics rows are ordered coarse to fine") {
  const auto dir = temp_dir("csv");
  std::vector<MetricsRow> rows(3);
  rows[0].name = "b";
  rows[0].h_min = 0.1;
  rows[1].name = "a";
  rows[1].h_min = 0.4;
  rows[2].name = "c,d";
  rows[2].h_min = 0.2;
  rows[2].kappa = std::numeric_limits<double>::quiet_NaN();
  export_metrics(dir / "m.csv", rows);
  std::istringstream in(slurp(dir / "m.csv"));
  const std::string header = metrics_header();
  std::string line;
  std::getline(in, line);
  CHECK(line == header);
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    names.push_back(line.substr(0, line.find(',')));
    CHECK(std::count(line.begin(), line.end(), ',') ==
          std::count(header.begin(), header.end(), ','));
  }
  CHECK(names == std::vector<std::string>{"a", "c;d", "b"});
}

TEST_CASE("shortest round-trip number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5e-12) == "-2.5e-12");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
