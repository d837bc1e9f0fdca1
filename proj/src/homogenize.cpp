#include "mscut/homogenize.hpp"

#include <cmath>
#include <numbers>

namespace mscut {

double Pore::area() const { return std::numbers::pi * radius * radius; }

double PorePopulation::void_area() const {
  double total = 0.0;
  for (const Pore &p : pores)
    total += p.area();
  return total;
}

void PorePopulation::validate() const {
  if (!(reference_area > 0.0))
    throw config_error("RVE reference area must be positive");
  for (const Pore &p : pores)
    if (!(p.radius > 0.0))
      throw config_error("pore radius must be positive");
  if (!(void_area() < reference_area))
    throw config_error("total pore area must be smaller than the RVE area");
}

double mmt_step(double previous, double porosity, double eshelby) {
  if (!(porosity >= 0.0 && porosity < 1.0))
    throw config_error("porosity fraction out of range [0, 1): " +
                       std::to_string(porosity));
  if (!(eshelby > 0.0))
    throw config_error("Eshelby parameter must be positive");
  return (1.0 - porosity) * previous / (porosity * eshelby + (1.0 - porosity));
}

MMTTrajectory mmt_trajectory(double e0, const PorePopulation &population,
                             const MMTParams &params) {
  population.validate();
  MMTTrajectory out;
  double modulus = e0;
  double accumulated = 0.0;
  for (const Pore &pore : population.pores) {
    accumulated += pore.area();
    const double phi = params.mode == PorosityMode::Incremental
                           ? pore.area() / population.reference_area
                           : accumulated / population.reference_area;
    modulus = mmt_step(modulus, phi, params.eshelby);
    out.porosity.push_back(phi);
    out.modulus.push_back(modulus);
  }
  out.effective = modulus;
  return out;
}

double mmt_effective(double e0, const PorePopulation &population,
                     const MMTParams &params) {
  return mmt_trajectory(e0, population, params).effective;
}

PorePopulation rve_population(const std::vector<Pore> &pores,
                              const std::vector<Pore> &zooms,
                              const Rect &domain, RveChoice choice) {
  PorePopulation out;
  if (choice == RveChoice::WholeDomain) {
    out.reference_area = domain.area();
    for (const Pore &p : pores)
      if (p.center.x() >= domain.xmin && p.center.x() <= domain.xmax &&
          p.center.y() >= domain.ymin && p.center.y() <= domain.ymax)
        out.pores.push_back(p);
    return out;
  }
  if (zooms.empty())
    throw config_error("inside_zooms RVE requires at least one zoom");
  for (const Pore &z : zooms)
    out.reference_area += z.area();
  for (const Pore &p : pores)
    for (const Pore &z : zooms)
      if ((p.center - z.center).norm() < z.radius) {
        out.pores.push_back(p);
        break;
      }
  return out;
}

} // namespace mscut
