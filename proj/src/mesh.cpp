#include "mscut/mesh.hpp"
#include "mscut/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace mscut {

namespace {

std::int64_t edge_key(int a, int b) {
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

} // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
  case BoundaryTag::Bottom:
    return "bottom";
  case BoundaryTag::Right:
    return "right";
  case BoundaryTag::Top:
    return "top";
  case BoundaryTag::Left:
    return "left";
  case BoundaryTag::None:
    break;
  }
  return "none";
}

BoundaryTag parse_boundary_tag(std::string_view name) {
  if (name == "bottom")
    return BoundaryTag::Bottom;
  if (name == "right")
    return BoundaryTag::Right;
  if (name == "top")
    return BoundaryTag::Top;
  if (name == "left")
    return BoundaryTag::Left;
  throw config_error("unknown boundary tag '" + std::string(name) + "'");
}

Mesh2::Mesh2(Rect domain, std::vector<Vec2> nodes, std::vector<Cell> cells,
             std::vector<int> green_of_cell,
             std::vector<GreenParent> green_parents)
    : domain_(domain), nodes_(std::move(nodes)), cells_(std::move(cells)),
      green_of_cell_(std::move(green_of_cell)),
      green_parents_(std::move(green_parents)) {
  if (green_of_cell_.empty())
    green_of_cell_.assign(cells_.size(), -1);
  if (green_of_cell_.size() != cells_.size())
    throw geometry_error("green-cell map does not match cell count");

  const int n_nodes = num_nodes();
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (int v : cells_[c])
      if (v < 0 || v >= n_nodes)
        throw geometry_error("cell " + std::to_string(c) +
                             " references a missing node");
    const auto x = cell_coords(static_cast<int>(c));
    if (!(signed_area(x[0], x[1], x[2]) > 0.0))
      throw geometry_error("cell " + std::to_string(c) +
                           " is not counter-clockwise with positive area");
  }

  std::unordered_map<std::int64_t, int> facet_of_edge;
  facet_of_edge.reserve(cells_.size() * 2);
  cell_facets_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (int k = 0; k < 3; ++k) {
      const int a = cells_[c][(k + 1) % 3];
      const int b = cells_[c][(k + 2) % 3];
      const auto key = edge_key(a, b);
      auto it = facet_of_edge.find(key);
      if (it == facet_of_edge.end()) {
        Facet f;
        f.nodes = {std::min(a, b), std::max(a, b)};
        f.cells = {static_cast<int>(c), -1};
        facet_of_edge.emplace(key, num_facets());
        cell_facets_[c][k] = num_facets();
        facets_.push_back(f);
      } else {
        Facet &f = facets_[it->second];
        if (f.cells[1] >= 0)
          throw geometry_error("edge shared by more than two cells");
        f.cells[1] = static_cast<int>(c);
        cell_facets_[c][k] = it->second;
      }
    }
  }

  const double tol = 1e-12 * std::max(domain_.width(), domain_.height());
  for (Facet &f : facets_) {
    if (f.interior())
      continue;
    const Vec2 &a = nodes_[f.nodes[0]];
    const Vec2 &b = nodes_[f.nodes[1]];
    auto on = [tol](double u, double v, double line) {
      return std::abs(u - line) <= tol && std::abs(v - line) <= tol;
    };
    if (on(a.y(), b.y(), domain_.ymin))
      f.tag = BoundaryTag::Bottom;
    else if (on(a.x(), b.x(), domain_.xmax))
      f.tag = BoundaryTag::Right;
    else if (on(a.y(), b.y(), domain_.ymax))
      f.tag = BoundaryTag::Top;
    else if (on(a.x(), b.x(), domain_.xmin))
      f.tag = BoundaryTag::Left;
    else
      throw geometry_error("non-conforming mesh: hanging edge away from the "
                           "domain boundary");
  }
}

std::array<Vec2, 3> Mesh2::cell_coords(int c) const {
  const Cell &cell = cells_[c];
  return {nodes_[cell[0]], nodes_[cell[1]], nodes_[cell[2]]};
}

double Mesh2::cell_area(int c) const {
  const auto x = cell_coords(c);
  return signed_area(x[0], x[1], x[2]);
}

double Mesh2::cell_size(int c) const {
  const auto x = cell_coords(c);
  return std::min({(x[1] - x[0]).norm(), (x[2] - x[1]).norm(),
                   (x[0] - x[2]).norm()});
}

double Mesh2::facet_length(int f) const {
  const Facet &facet = facets_[f];
  return (nodes_[facet.nodes[1]] - nodes_[facet.nodes[0]]).norm();
}

Vec2 Mesh2::facet_normal(int f) const {
  const Facet &facet = facets_[f];
  const Vec2 &a = nodes_[facet.nodes[0]];
  const Vec2 &b = nodes_[facet.nodes[1]];
  const Vec2 t = b - a;
  Vec2 n(t.y(), -t.x());
  n /= n.norm();
  const auto x = cell_coords(facet.cells[0]);
  const Vec2 centroid = (x[0] + x[1] + x[2]) / 3.0;
  if (n.dot(0.5 * (a + b) - centroid) < 0.0)
    n = -n;
  return n;
}

double Mesh2::area() const {
  double total = 0.0;
  for (int c = 0; c < num_cells(); ++c)
    total += cell_area(c);
  return total;
}

double Mesh2::h_min() const {
  double h = std::numeric_limits<double>::infinity();
  for (int c = 0; c < num_cells(); ++c)
    h = std::min(h, cell_size(c));
  return h;
}

double Mesh2::h_max() const {
  double h = 0.0;
  for (int c = 0; c < num_cells(); ++c)
    h = std::max(h, cell_size(c));
  return h;
}

Mesh2 generate_rect(const Rect &domain, int nx, int ny) {
  if (nx < 1 || ny < 1)
    throw config_error("mesh needs nx >= 1 and ny >= 1");
  if (!(domain.width() > 0.0 && domain.height() > 0.0))
    throw config_error("domain rectangle must have positive extent");

  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  const double hx = domain.width() / nx;
  const double hy = domain.height() / ny;
  for (int j = 0; j <= ny; ++j) {
    const double y = j == ny ? domain.ymax : domain.ymin + j * hy;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? domain.xmax : domain.xmin + i * hx;
      nodes.emplace_back(x, y);
    }
  }
  std::vector<Cell> cells;
  cells.reserve(2 * static_cast<std::size_t>(nx) * ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n0 = id(i, j), n1 = id(i + 1, j), n2 = id(i + 1, j + 1),
                n3 = id(i, j + 1);
      cells.push_back({n0, n1, n2});
      cells.push_back({n0, n2, n3});
    }
  }
  return Mesh2(domain, std::move(nodes), std::move(cells));
}

namespace {

struct Leaf {
  Cell v;
  bool in_marked_region = false;
};

class RedForest {
public:
  explicit RedForest(const Mesh2 &mesh, const CellSet &marked)
      : nodes_(mesh.nodes()) {
    std::vector<char> is_marked(mesh.num_cells(), 0);
    for (int c : marked) {
      if (c < 0 || c >= mesh.num_cells())
        throw geometry_error("marked cell index out of range");
      is_marked[c] = 1;
    }
    const auto &green = mesh.green_of_cell();
    std::vector<int> leaf_of_green(mesh.green_parents().size(), -1);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const int g = green[c];
      if (g < 0) {
        leaves_.push_back({mesh.cells()[c], is_marked[c] != 0});
        continue;
      }
      if (leaf_of_green[g] < 0) {
        const GreenParent &parent = mesh.green_parents()[g];
        leaf_of_green[g] = static_cast<int>(leaves_.size());
        leaves_.push_back({parent.nodes, false});
        const int a = parent.nodes[(parent.opposite + 1) % 3];
        const int b = parent.nodes[(parent.opposite + 2) % 3];
        mids_.emplace(edge_key(a, b), parent.mid);
      }
      if (is_marked[c])
        leaves_[leaf_of_green[g]].in_marked_region = true;
    }
  }

  void refine_marked_region() {
    std::vector<char> flag(leaves_.size(), 0);
    for (std::size_t i = 0; i < leaves_.size(); ++i)
      flag[i] = leaves_[i].in_marked_region ? 1 : 0;
    split(flag);
    close();
  }

  Mesh2 to_mesh(const Rect &domain) {
    std::vector<Cell> cells;
    std::vector<int> green_of_cell;
    std::vector<GreenParent> parents;
    for (const Leaf &leaf : leaves_) {
      int split_edge = -1;
      int mid = -1;
      for (int k = 0; k < 3; ++k) {
        const int m = find_mid(leaf.v[(k + 1) % 3], leaf.v[(k + 2) % 3]);
        if (m >= 0) {
          split_edge = k;
          mid = m;
        }
      }
      if (split_edge < 0) {
        cells.push_back(leaf.v);
        green_of_cell.push_back(-1);
        continue;
      }
      const int c = leaf.v[split_edge];
      const int a = leaf.v[(split_edge + 1) % 3];
      const int b = leaf.v[(split_edge + 2) % 3];
      const int g = static_cast<int>(parents.size());
      parents.push_back({leaf.v, mid, split_edge});
      cells.push_back({c, a, mid});
      cells.push_back({c, mid, b});
      green_of_cell.push_back(g);
      green_of_cell.push_back(g);
    }
    return Mesh2(domain, nodes_, std::move(cells), std::move(green_of_cell),
                 std::move(parents));
  }

private:
  int find_mid(int a, int b) const {
    auto it = mids_.find(edge_key(a, b));
    return it == mids_.end() ? -1 : it->second;
  }

  int get_mid(int a, int b) {
    const auto key = edge_key(a, b);
    auto it = mids_.find(key);
    if (it != mids_.end())
      return it->second;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(0.5 * (nodes_[a] + nodes_[b]));
    mids_.emplace(key, id);
    return id;
  }

  void split(const std::vector<char> &flag) {
    std::vector<Leaf> next;
    next.reserve(leaves_.size() + 3 * std::count(flag.begin(), flag.end(), 1));
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
      const Leaf &leaf = leaves_[i];
      if (!flag[i]) {
        next.push_back(leaf);
        continue;
      }
      const int a = leaf.v[0], b = leaf.v[1], c = leaf.v[2];
      const int ab = get_mid(a, b), bc = get_mid(b, c), ca = get_mid(c, a);
      const bool m = leaf.in_marked_region;
      next.push_back({{a, ab, ca}, m});
      next.push_back({{ab, b, bc}, m});
      next.push_back({{ca, bc, c}, m});
      next.push_back({{ab, bc, ca}, m});
    }
    leaves_ = std::move(next);
  }

  // Red-refine leaves until each has at most one hanging edge and no edge
  // hangs by more than one level.
  void close() {
    for (;;) {
      std::vector<char> flag(leaves_.size(), 0);
      bool any = false;
      for (std::size_t i = 0; i < leaves_.size(); ++i) {
        const Cell &v = leaves_[i].v;
        int hanging = 0;
        bool deep = false;
        for (int k = 0; k < 3; ++k) {
          const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
          const int m = find_mid(a, b);
          if (m < 0)
            continue;
          ++hanging;
          if (find_mid(a, m) >= 0 || find_mid(m, b) >= 0)
            deep = true;
        }
        if (hanging >= 2 || deep) {
          flag[i] = 1;
          any = true;
        }
      }
      if (!any)
        return;
      split(flag);
    }
  }

  std::vector<Vec2> nodes_;
  std::vector<Leaf> leaves_;
  std::unordered_map<std::int64_t, int> mids_;
};

} // namespace

Mesh2 refine(const Mesh2 &mesh, const CellSet &marked, int levels) {
  if (levels <= 0 || marked.empty())
    return mesh;
  RedForest forest(mesh, marked);
  for (int pass = 0; pass < levels; ++pass)
    forest.refine_marked_region();
  return forest.to_mesh(mesh.domain());
}

CellSet mark_near(const Mesh2 &mesh, const LevelSet &ls, double band) {
  if (band < 0.0)
    throw config_error("marking band must be non-negative");
  std::vector<double> value(mesh.nodes().size());
  for (std::size_t i = 0; i < value.size(); ++i)
    value[i] = ls.eval(mesh.nodes()[i]);
  CellSet out;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell &cell = mesh.cells()[c];
    if (std::any_of(cell.begin(), cell.end(),
                    [&](int v) { return value[v] <= band; }))
      out.push_back(c);
  }
  return out;
}

} // namespace mscut
