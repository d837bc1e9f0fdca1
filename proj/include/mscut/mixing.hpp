#pragma once

#include "mscut/levelset.hpp"
#include "mscut/mesh.hpp"

namespace mscut {

/// Sine transition profile of half-width epsilon across the zoom boundary.
///
/// alpha(phi) is 0 for phi <= -eps (micro side), 1 for phi >= eps (macro
/// side) and (1 + sin(pi phi / (2 eps))) / 2 in between. The macro model is
/// weighted by alpha and the micro model by 1 - alpha.
class MixingWeight {
public:
  explicit MixingWeight(double half_width);
  static MixingWeight from_full_width(double width) {
    return MixingWeight(0.5 * width);
  }

  double half_width() const noexcept { return half_width_; }
  double full_width() const noexcept { return 2.0 * half_width_; }

  double alpha(double phi) const;
  double macro(double phi) const { return alpha(phi); }
  double micro(double phi) const { return 1.0 - alpha(phi); }

private:
  double half_width_;
};

/// Cells whose nodal phi2 range meets [-eps, eps].
CellSet transition_cells(const Mesh2 &mesh, const NodalField &phi2, double eps);

bool in_transition(const Mesh2 &mesh, const NodalField &phi2, int cell,
                   double eps);

} // namespace mscut
