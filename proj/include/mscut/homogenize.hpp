#pragma once

#include "mscut/common.hpp"
#include "mscut/mesh.hpp"

#include <vector>

namespace mscut {

struct Pore {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;

  double area() const;
};

/// Circular pores inside a reference area V_t.
struct PorePopulation {
  std::vector<Pore> pores;
  double reference_area = 0.0;

  double void_area() const;
  double porosity() const { return void_area() / reference_area; }
  /// Throws a config error unless all radii are positive and the void area
  /// is smaller than the reference area.
  void validate() const;
};

enum class PorosityMode {
  /// phi_i = a_i / V_t
  Incremental,
  /// phi_i = (a_1 + ... + a_i) / V_t
  Cumulative,
};

struct MMTParams {
  double eshelby = 3.0;
  PorosityMode mode = PorosityMode::Incremental;
};

/// One Modified Mori-Tanaka update with identity I = 1:
/// E_i = (1 - phi) E_{i-1} / (phi L + (1 - phi)).
double mmt_step(double previous, double porosity, double eshelby);

struct MMTTrajectory {
  std::vector<double> porosity;
  std::vector<double> modulus; ///< modulus after each inclusion
  double effective = 0.0;
};

MMTTrajectory mmt_trajectory(double e0, const PorePopulation &population,
                             const MMTParams &params);

double mmt_effective(double e0, const PorePopulation &population,
                     const MMTParams &params);

enum class RveChoice { WholeDomain, InsideZooms };

/// Pores and reference area of the chosen representative volume. For
/// InsideZooms only pores centred inside a zoom circle count and V_t is the
/// total zoom area.
PorePopulation rve_population(const std::vector<Pore> &pores,
                              const std::vector<Pore> &zooms,
                              const Rect &domain, RveChoice choice);

} // namespace mscut
