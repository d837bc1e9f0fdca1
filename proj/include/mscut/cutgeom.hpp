#pragma once

#include "mscut/common.hpp"
#include "mscut/levelset.hpp"

#include <array>
#include <vector>

namespace mscut {

class Mesh2;

enum class CellClass { NegativeSide, PositiveSide, Cut };
enum class Side { Negative, Positive };

/// Nodal values with |phi| < tol are treated as +tol.
CellClass classify(const std::array<double, 3> &phi, double tol);

struct SubTriangle {
  std::array<Vec2, 3> vertices;
  Side side = Side::Negative;

  double area() const;
};

struct CutCell {
  std::vector<SubTriangle> parts;
  /// Interface segment; both endpoints lie on edges of the parent cell.
  std::array<Vec2, 2> interface;
};

/// Splits a triangle along the zero isoline of its linear interpolant. The
/// lone-sign corner yields one sub-triangle, the opposite quadrilateral two.
/// Values are snapped as in classify() before locating the crossings.
CutCell subtessellate(const std::array<Vec2, 3> &coords,
                      std::array<double, 3> phi, double tol = 0.0);

/// Classification and subtessellation of every cell against one nodal field.
class CutDecomposition {
public:
  /// Snap tolerance per cell is rel_tol * (cell diameter).
  CutDecomposition(const Mesh2 &mesh, const NodalField &field,
                   double rel_tol = 1e-12);

  CellClass cell_class(int c) const { return classes_[c]; }
  bool is_cut(int c) const { return classes_[c] == CellClass::Cut; }
  /// Sub-triangles of a cut cell; empty for uncut cells.
  const CutCell *cut(int c) const {
    return cut_index_[c] < 0 ? nullptr : &cuts_[cut_index_[c]];
  }
  int num_cells() const noexcept { return static_cast<int>(classes_.size()); }
  int num_cut() const noexcept { return static_cast<int>(cuts_.size()); }

private:
  std::vector<CellClass> classes_;
  std::vector<int> cut_index_;
  std::vector<CutCell> cuts_;
};

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;

  double total_weight() const;
  void append(const QuadratureRule &other);
};

/// Symmetric rule on the reference triangle: barycentric points and weights
/// summing to one. Degrees 1..6 (degree 3 uses the degree-4 rule).
struct ReferenceRule {
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;
};
const ReferenceRule &reference_rule(int degree);

QuadratureRule triangle_quadrature(const std::array<Vec2, 3> &x, int degree);

/// Rule for the part of cell c on `side`, empty when the cell lies entirely
/// on the other side.
QuadratureRule cell_quadrature(const CutDecomposition &decomp,
                               const Mesh2 &mesh, int c, Side side,
                               int degree);

QuadratureRule region_quadrature(const CutDecomposition &decomp,
                                 const Mesh2 &mesh, Side side, int degree);

struct Measures {
  double negative_area = 0.0;
  double positive_area = 0.0;
  double interface_length = 0.0;
};

Measures measures(const CutDecomposition &decomp, const Mesh2 &mesh);

/// Cells whose exact level set crosses the cell boundary more than twice, or
/// changes sign inside a cell whose nodal values do not: geometry a P1
/// projection on this mesh cannot represent.
std::vector<int> multi_cut_cells(const Mesh2 &mesh, const LevelSet &ls,
                                 int samples_per_edge = 16);

} // namespace mscut
