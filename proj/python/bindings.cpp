#include "mscut/mixing.hpp"
#include "mscut/scenario.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace mscut;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;
using Cells = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

Points node_array(const Mesh2 &mesh) {
  Points out(mesh.num_nodes(), 2);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    out.row(i) = mesh.nodes()[i].transpose();
  return out;
}

Cells cell_array(const Mesh2 &mesh) {
  Cells out(mesh.num_cells(), 3);
  for (int c = 0; c < mesh.num_cells(); ++c)
    for (int k = 0; k < 3; ++k)
      out(c, k) = mesh.cells()[c][k];
  return out;
}

Eigen::VectorXd field_array(const NodalField &f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values.data(), static_cast<Eigen::Index>(f.size()));
}

std::vector<Pore> pores_from(const std::vector<std::array<double, 3>> &rows) {
  std::vector<Pore> out;
  for (const auto &r : rows)
    out.push_back({Vec2(r[0], r[1]), r[2]});
  return out;
}

py::dict metrics_dict(const MetricsRow &m) {
  py::dict d;
  d["name"] = m.name;
  d["h_min"] = m.h_min;
  d["h_max"] = m.h_max;
  d["two_eps"] = m.two_eps;
  d["beta"] = m.beta;
  d["mode"] = m.mode;
  d["dofs"] = m.dofs;
  d["active_dofs"] = m.active_dofs;
  d["free_dofs"] = m.free_dofs;
  d["ghost_facets"] = m.ghost_facets;
  d["kappa"] = m.kappa;
  d["solver"] = m.solver;
  d["iterations"] = m.iterations;
  d["residual"] = m.residual;
  d["energy_macro"] = m.energy_macro;
  d["energy_micro"] = m.energy_micro;
  d["energy_ghost"] = m.energy_ghost;
  d["l2_error"] = m.l2_error;
  d["energy_error"] = m.energy_error;
  d["status"] = m.status;
  return d;
}

Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>
stress_array(const std::vector<Eigen::Vector3d> &s) {
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> out(s.size(), 3);
  for (std::size_t i = 0; i < s.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = s[i].transpose();
  return out;
}

} // namespace

PYBIND11_MODULE(_mscut, m) {
  m.doc() = "Unfitted multiscale elasticity: level sets, cut meshes, mixing and solvers";

  static py::exception<Error> error(m, "MscutError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const Error &e) {
      py::object exc = error;
      py::object instance = exc(std::string(to_string(e.category())) + ": " + e.what());
      instance.attr("category") = std::string(to_string(e.category()));
      PyErr_SetObject(exc.ptr(), instance.ptr());
    }
  });

  py::class_<LevelSet>(m, "LevelSet")
      .def_static("circle", [](double x, double y, double r) { return LevelSet::circle(Vec2(x, y), r); },
                  py::arg("x"), py::arg("y"), py::arg("radius"))
      .def_static("half_plane",
                  [](double px, double py_, double nx, double ny) {
                    return LevelSet::half_plane(Vec2(px, py_), Vec2(nx, ny));
                  },
                  py::arg("px"), py::arg("py"), py::arg("nx"), py::arg("ny"))
      .def_static("box",
                  [](double x0, double y0, double x1, double y1) {
                    return LevelSet::box(Vec2(x0, y0), Vec2(x1, y1));
                  })
      .def_static("constant", &LevelSet::constant)
      .def_static("unite", &LevelSet::unite)
      .def_static("intersect", &LevelSet::intersect)
      .def("complement", &LevelSet::complement)
      .def("positive_outside",
           [](const LevelSet &ls) { return ls.with_convention(SignConvention::PositiveOutside); })
      .def("eval", [](const LevelSet &ls, double x, double y) { return ls.eval(Vec2(x, y)); })
      .def("eval_points",
           [](const LevelSet &ls, const Points &p) {
             Eigen::VectorXd out(p.rows());
             for (Eigen::Index i = 0; i < p.rows(); ++i)
               out[i] = ls.eval(p.row(i).transpose());
             return out;
           })
      .def("unit_normal", [](const LevelSet &ls, double x, double y) {
        const Vec2 n = ls.unit_normal(Vec2(x, y));
        return std::make_pair(n.x(), n.y());
      });

  py::class_<Mesh2>(m, "Mesh")
      .def_property_readonly("nodes", &node_array)
      .def_property_readonly("cells", &cell_array)
      .def_property_readonly("num_nodes", &Mesh2::num_nodes)
      .def_property_readonly("num_cells", &Mesh2::num_cells)
      .def_property_readonly("h_min", &Mesh2::h_min)
      .def_property_readonly("h_max", &Mesh2::h_max)
      .def_property_readonly("area", &Mesh2::area);

  m.def("generate_rect",
        [](double x0, double y0, double x1, double y1, int nx, int ny) {
          return generate_rect({x0, y0, x1, y1}, nx, ny);
        },
        py::arg("xmin"), py::arg("ymin"), py::arg("xmax"), py::arg("ymax"), py::arg("nx"),
        py::arg("ny"));
  m.def("refine_near",
        [](const Mesh2 &mesh, const LevelSet &ls, double band, int levels) {
          return refine(mesh, mark_near(mesh, ls, band), levels);
        },
        py::arg("mesh"), py::arg("level_set"), py::arg("band"), py::arg("levels") = 1,
        "Refine cells with a node where the level set is <= band.");
  m.def("project_p1", [](const LevelSet &ls, const Mesh2 &mesh) {
    return field_array(project_p1(ls, mesh));
  });
  m.def("cut_measures",
        [](const Mesh2 &mesh, const LevelSet &ls) {
          const CutDecomposition d(mesh, project_p1(ls, mesh));
          const Measures ms = measures(d, mesh);
          py::dict out;
          out["negative_area"] = ms.negative_area;
          out["positive_area"] = ms.positive_area;
          out["interface_length"] = ms.interface_length;
          out["cut_cells"] = d.num_cut();
          return out;
        },
        "Areas on each side of the P1 zero isoline and its length.");

  m.def("mixing_alpha",
        [](py::array_t<double> phi, double width) {
          const MixingWeight w = MixingWeight::from_full_width(width);
          return py::vectorize([&w](double v) { return w.alpha(v); })(phi);
        },
        py::arg("phi"), py::arg("width"), "Macro weight for a full mixing width 2 eps.");

  m.def("mmt_step", &mmt_step, py::arg("previous"), py::arg("porosity"), py::arg("eshelby") = 3.0);
  m.def("mmt_effective",
        [](double e0, const std::vector<std::array<double, 3>> &pores, double reference_area,
           double eshelby, bool cumulative) {
          PorePopulation pop;
          pop.pores = pores_from(pores);
          pop.reference_area = reference_area;
          return mmt_effective(
              e0, pop,
              {eshelby, cumulative ? PorosityMode::Cumulative : PorosityMode::Incremental});
        },
        py::arg("e0"), py::arg("pores"), py::arg("reference_area"), py::arg("eshelby") = 3.0,
        py::arg("cumulative") = false, "pores: rows of (x, y, radius)");

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("width", &Scenario::width)
      .def_readwrite("beta", &Scenario::beta)
      .def_property(
          "mesh_size", [](const Scenario &s) { return std::make_pair(s.mesh.nx, s.mesh.ny); },
          [](Scenario &s, std::pair<int, int> n) {
            s.mesh.nx = n.first;
            s.mesh.ny = n.second;
          })
      .def_property(
          "mode", [](const Scenario &s) { return std::string(to_string(s.mode)); },
          [](Scenario &s, const std::string &v) { s.mode = parse_regularization_mode(v); })
      .def_property_readonly("model", [](const Scenario &s) { return std::string(to_string(s.model)); })
      .def_property_readonly("num_pores", [](const Scenario &s) { return s.pores.size(); })
      .def_property_readonly("num_zooms", [](const Scenario &s) { return s.zooms.size(); })
      .def("validate", &Scenario::validate)
      .def("dump", &dump_scenario);

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("base_dir") = std::filesystem::path{});

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("nodes", [](const RunResult &r) { return node_array(r.model.mesh); })
      .def_property_readonly("cells", [](const RunResult &r) { return cell_array(r.model.mesh); })
      .def_property_readonly("displacement",
                             [](const RunResult &r) {
                               return Points(Eigen::Map<const Points>(
                                   r.displacement.data(), r.displacement.size() / 2, 2));
                             })
      .def_property_readonly("phi1", [](const RunResult &r) { return field_array(r.model.phi1); })
      .def_property_readonly("phi2", [](const RunResult &r) { return field_array(r.model.phi2); })
      .def_property_readonly("stress_macro", [](const RunResult &r) { return stress_array(r.stress.macro); })
      .def_property_readonly("stress_micro", [](const RunResult &r) { return stress_array(r.stress.micro); })
      .def_property_readonly("stress_mixed", [](const RunResult &r) { return stress_array(r.stress.mixed); })
      .def_property_readonly("alpha", [](const RunResult &r) { return r.stress.alpha; })
      .def_property_readonly("domain_tag",
                             [](const RunResult &r) {
                               std::vector<int> out;
                               for (DomainTag t : r.stress.domain)
                                 out.push_back(static_cast<int>(t));
                               return out;
                             })
      .def_property_readonly("macro_youngs", [](const RunResult &r) { return r.model.config.macro.youngs; })
      .def_property_readonly("metrics", [](const RunResult &r) { return metrics_dict(r.metrics); });

  m.def("run",
        [](const Scenario &s, int threads, bool reference) {
          py::gil_scoped_release release;
          RunResult r = run_scenario(s, {threads});
          if (reference)
            attach_reference_errors(r, s, {threads});
          return r;
        },
        py::arg("scenario"), py::arg("threads") = 1, py::arg("reference") = false);
  m.def("write_outputs", &write_run_outputs, py::arg("result"), py::arg("scenario"),
        py::arg("out_dir"));

  m.def("condstudy",
        [](const std::filesystem::path &path, int threads) {
          SweepResult res;
          {
            const Sweep sw = load_sweep(path);
            py::gil_scoped_release release;
            res = run_sweep(sw, {threads});
          }
          py::list rows;
          for (const SweepRow &r : res.rows) {
            py::dict d = metrics_dict(r.metrics);
            d["series"] = r.series;
            d["nx"] = r.nx;
            d["ny"] = r.ny;
            d["offset"] = std::make_pair(r.offset.x(), r.offset.y());
            d["lambda_min"] = r.lambda_min;
            d["lambda_max"] = r.lambda_max;
            rows.append(d);
          }
          py::dict slopes;
          for (const SeriesSlope &s : res.slopes)
            slopes[py::str(s.series)] = s.slope;
          return py::make_tuple(rows, slopes);
        },
        py::arg("path"), py::arg("threads") = 1,
        "Condition-number sweep; returns (rows, slope per series).");

  m.def("validate_geometry",
        [](const Scenario &s) { return format_geometry_report(validate_geometry(s)); });

  m.def("cond_estimate",
        [](const Eigen::SparseMatrix<double> &a, int dense_limit) {
          ConditionOptions opt;
          opt.dense_limit = dense_limit;
          return cond_estimate(a, opt);
        },
        py::arg("matrix"), py::arg("dense_limit") = 2000,
        "Spectral condition number of a symmetric positive definite matrix.");
}
