#include "mscut/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mscut {

MixingWeight::MixingWeight(double half_width) : half_width_(half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw config_error("mixing half-width must be positive and finite");
}

double MixingWeight::alpha(double phi) const {
  if (phi <= -half_width_)
    return 0.0;
  if (phi >= half_width_)
    return 1.0;
  return 0.5 * (1.0 + std::sin(std::numbers::pi / (2.0 * half_width_) * phi));
}

bool in_transition(const Mesh2 &mesh, const NodalField &phi2, int cell,
                   double eps) {
  const Cell &c = mesh.cells()[cell];
  const auto [lo, hi] =
      std::minmax({phi2[c[0]], phi2[c[1]], phi2[c[2]]});
  return lo <= eps && hi >= -eps;
}

CellSet transition_cells(const Mesh2 &mesh, const NodalField &phi2,
                         double eps) {
  if (!(eps > 0.0))
    throw config_error("transition half-width must be positive");
  if (phi2.size() != mesh.nodes().size())
    throw geometry_error("nodal field size does not match mesh node count");
  CellSet out;
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (in_transition(mesh, phi2, c, eps))
      out.push_back(c);
  return out;
}

} // namespace mscut
