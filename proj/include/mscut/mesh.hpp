#pragma once

#include "mscut/common.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mscut {

class LevelSet;

struct Rect {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
  double area() const noexcept { return width() * height(); }
};

enum class BoundaryTag : std::uint8_t { None, Bottom, Right, Top, Left };

std::string_view to_string(BoundaryTag tag);
BoundaryTag parse_boundary_tag(std::string_view name);

using Cell = std::array<int, 3>;

struct Facet {
  std::array<int, 2> nodes{};
  /// Incident cells; cells[1] == -1 on the boundary.
  std::array<int, 2> cells{-1, -1};
  BoundaryTag tag = BoundaryTag::None;

  bool interior() const noexcept { return cells[1] >= 0; }
};

/// Parent triangle of a green-closure pair. `mid` is the hanging node on the
/// parent edge opposite vertex `nodes[opposite]`.
struct GreenParent {
  Cell nodes{};
  int mid = -1;
  int opposite = -1;
};

/// Conforming triangulation with counter-clockwise cells, facet adjacency and
/// boundary tags. Immutable once built.
class Mesh2 {
public:
  Mesh2() = default;
  Mesh2(Rect domain, std::vector<Vec2> nodes, std::vector<Cell> cells,
        std::vector<int> green_of_cell = {},
        std::vector<GreenParent> green_parents = {});

  const Rect &domain() const noexcept { return domain_; }
  const std::vector<Vec2> &nodes() const noexcept { return nodes_; }
  const std::vector<Cell> &cells() const noexcept { return cells_; }
  const std::vector<Facet> &facets() const noexcept { return facets_; }
  /// Facet ids of cell c; entry k is the facet opposite local vertex k.
  const std::array<int, 3> &cell_facets(int c) const { return cell_facets_[c]; }

  int num_nodes() const noexcept { return static_cast<int>(nodes_.size()); }
  int num_cells() const noexcept { return static_cast<int>(cells_.size()); }
  int num_facets() const noexcept { return static_cast<int>(facets_.size()); }

  std::array<Vec2, 3> cell_coords(int c) const;
  double cell_area(int c) const;
  /// Shortest edge of the cell; equals h_x = h_y on a structured grid.
  double cell_size(int c) const;
  double facet_length(int f) const;
  Vec2 facet_normal(int f) const;
  double area() const;
  double h_min() const;
  double h_max() const;

  /// -1 for ordinary cells, otherwise index into green_parents().
  const std::vector<int> &green_of_cell() const noexcept { return green_of_cell_; }
  const std::vector<GreenParent> &green_parents() const noexcept {
    return green_parents_;
  }

private:
  Rect domain_;
  std::vector<Vec2> nodes_;
  std::vector<Cell> cells_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 3>> cell_facets_;
  std::vector<int> green_of_cell_;
  std::vector<GreenParent> green_parents_;
};

/// Sorted, duplicate-free cell indices.
using CellSet = std::vector<int>;

Mesh2 generate_rect(const Rect &domain, int nx, int ny);

/// Red-green refinement. Marked cells are split 1 -> 4; the marked region is
/// refined again on each of `levels` passes. Neighbours with two or more
/// split edges are red-refined, those with one are green-closed. Green pairs
/// in the input are merged back into their parent before refining.
Mesh2 refine(const Mesh2 &mesh, const CellSet &marked, int levels);

/// Cells with at least one node where eval(ls) <= band.
CellSet mark_near(const Mesh2 &mesh, const LevelSet &ls, double band);

} // namespace mscut
