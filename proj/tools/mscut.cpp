// mscut: command line driver for scenario runs, conditioning sweeps,
// homogenization reports and geometry checks.
#include "mscut/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace mscut;

struct Options {
  std::string config;
  std::string out = "out";
  int threads = 1;
  unsigned long long seed = 0; // reserved for oracle sampling; unused by runs
};

std::filesystem::path prepare_out(const Options &o) {
  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec)
    throw io_error("cannot create output directory '" + o.out + "': " +
                   ec.message());
  return o.out;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !(os << text))
    throw io_error("cannot write '" + path.string() + "'");
}

int cmd_run(const Options &o) {
  const Scenario s = load_scenario(o.config);
  RunResult r = run_scenario(s, {o.threads});
  attach_reference_errors(r, s, {o.threads});
  write_run_outputs(r, s, o.out);

  double uy_top = std::numeric_limits<double>::infinity();
  for (const Facet &f : r.model.mesh.facets())
    if (f.tag == BoundaryTag::Top)
      for (int v : f.nodes)
        uy_top = std::min(uy_top, r.displacement[2 * v + 1]);
  const MetricsRow &m = r.metrics;
  std::cout << "scenario " << s.name << " (" << to_string(s.model) << ")\n"
            << "  cells " << r.model.mesh.num_cells() << ", dofs " << m.dofs
            << " (" << m.free_dofs << " free), ghost facets "
            << m.ghost_facets << '\n'
            << "  solver " << m.solver << ", residual "
            << format_double(m.residual) << ", kappa " << format_double(m.kappa)
            << '\n'
            << "  energy macro " << format_double(m.energy_macro) << ", micro "
            << format_double(m.energy_micro) << ", ghost "
            << format_double(m.energy_ghost) << '\n'
            << "  min u_y on top edge " << format_double(uy_top) << '\n';
  if (r.model.homogenization)
    std::cout << "  homogenized E_M " << format_double(r.model.config.macro.youngs)
              << '\n';
  if (s.reference)
    std::cout << "  relative L2 error vs reference "
              << format_double(m.l2_error) << ", energy "
              << format_double(m.energy_error) << '\n';
  std::cout << "  outputs in " << o.out << '\n';
  return 0;
}

int cmd_condstudy(const Options &o) {
  const Sweep sw = load_sweep(o.config);
  const SweepResult res = run_sweep(sw, {o.threads});
  write_sweep_outputs(res, o.out);
  std::printf("%-58s %6s %12s %14s  %s\n", "series", "nx", "h_max", "kappa",
              "status");
  for (const SweepRow &r : res.rows)
    std::printf("%-58s %6d %12.5g %14.6e  %s\n", r.series.c_str(), r.nx,
                r.metrics.h_max, r.metrics.kappa, r.metrics.status.c_str());
  std::printf("\nlog-log slope of kappa against h per series:\n");
  for (const SeriesSlope &s : res.slopes)
    std::printf("%-58s %2d points  slope %8.4f\n", s.series.c_str(), s.points,
                s.slope);
  return 0;
}

int cmd_homogenize(const Options &o) {
  const Scenario s = load_scenario(o.config);
  const auto out = prepare_out(o);
  const double e0 = s.materials.micro.youngs;
  std::ostringstream csv;
  csv << "rve,step,porosity,modulus\n";
  auto report = [&](RveChoice choice, const char *name) {
    const PorePopulation pop = rve_population(s.pores, s.zooms, s.domain, choice);
    const MMTTrajectory t = mmt_trajectory(e0, pop, s.materials.mmt);
    std::cout << name << ": " << pop.pores.size() << " pores, V_t "
              << format_double(pop.reference_area) << ", porosity "
              << format_double(pop.porosity()) << ", E_M "
              << format_double(t.effective) << '\n';
    csv << name << ",0,0," << format_double(e0) << '\n';
    for (std::size_t i = 0; i < t.modulus.size(); ++i)
      csv << name << ',' << i + 1 << ',' << format_double(t.porosity[i]) << ','
          << format_double(t.modulus[i]) << '\n';
  };
  std::cout << "E0 " << format_double(e0) << ", L "
            << format_double(s.materials.mmt.eshelby) << ", porosity mode "
            << (s.materials.mmt.mode == PorosityMode::Incremental ? "incremental"
                                                                  : "cumulative")
            << '\n';
  report(RveChoice::WholeDomain, "whole_domain");
  if (!s.zooms.empty())
    report(RveChoice::InsideZooms, "inside_zooms");
  write_text(out / "homogenize.csv", csv.str());
  return 0;
}

int cmd_validate(const Options &o) {
  const Scenario s = load_scenario(o.config);
  const auto out = prepare_out(o);
  const std::string text = format_geometry_report(validate_geometry(s));
  std::cout << text;
  write_text(out / "validate.txt", text);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Unfitted concurrent multiscale elasticity solver"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "Scenario (or sweep) file")->required();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads for assembly")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Seed reserved for oracle sampling");
  auto *run = app.add_subcommand("run", "Assemble, solve and write fields");
  auto *cond = app.add_subcommand("condstudy", "Condition-number sweep");
  auto *homog = app.add_subcommand("homogenize", "Effective modulus report");
  auto *valid = app.add_subcommand("validate", "Geometry report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 1;
  }

  try {
    if (run->parsed())
      return cmd_run(o);
    if (cond->parsed())
      return cmd_condstudy(o);
    if (homog->parsed())
      return cmd_homogenize(o);
    if (valid->parsed())
      return cmd_validate(o);
  } catch (const Error &e) {
    std::string msg = e.what();
    for (char &ch : msg)
      if (ch == '\n')
        ch = ' ';
    std::fprintf(stderr, "error: %s: %s\n",
                 std::string(to_string(e.category())).c_str(), msg.c_str());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: assembly: %s\n", e.what());
    return 1;
  }
  return 1;
}
