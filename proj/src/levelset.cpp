#include "mscut/levelset.hpp"
#include "mscut/mesh.hpp"

#include <cmath>
#include <variant>

namespace mscut {

namespace {

struct Circle {
  Vec2 center;
  double radius;
};
struct HalfPlane {
  Vec2 point;
  Vec2 normal; // unit
};
struct Box {
  Vec2 lower, upper;
};
struct Constant {
  double value;
};
struct Union {
  std::vector<LevelSet> children;
};
struct Intersection {
  std::vector<LevelSet> children;
};
struct Complement {
  std::vector<LevelSet> children; // exactly one
};

using Value = std::pair<double, Vec2>;

Value eval_circle(const Circle &c, const Vec2 &p) {
  const Vec2 d = p - c.center;
  const double dist = d.norm();
  if (dist == 0.0)
    return {c.radius, Vec2::Zero()};
  return {c.radius - dist, -d / dist};
}

Value eval_box(const Box &b, const Vec2 &p) {
  const Vec2 center = 0.5 * (b.lower + b.upper);
  const Vec2 half = 0.5 * (b.upper - b.lower);
  const Vec2 rel = p - center;
  const Vec2 q = rel.cwiseAbs() - half;
  const Vec2 sgn(rel.x() < 0 ? -1.0 : 1.0, rel.y() < 0 ? -1.0 : 1.0);
  const Vec2 outside = q.cwiseMax(0.0);
  const double out_norm = outside.norm();
  if (out_norm > 0.0) {
    const Vec2 g = sgn.cwiseProduct(outside) / out_norm;
    return {-out_norm, -g};
  }
  // inside: distance to the nearest face
  if (q.x() >= q.y())
    return {-q.x(), Vec2(-sgn.x(), 0.0)};
  return {-q.y(), Vec2(0.0, -sgn.y())};
}

} // namespace

struct LevelSet::Node {
  std::variant<Circle, HalfPlane, Box, Constant, Union, Intersection,
               Complement>
      shape;
};

namespace {

Value eval_node(const LevelSet::Node &node, const Vec2 &p) {
  return std::visit(
      [&](const auto &s) -> Value {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return eval_circle(s, p);
        } else if constexpr (std::is_same_v<T, HalfPlane>) {
          return {(p - s.point).dot(s.normal), s.normal};
        } else if constexpr (std::is_same_v<T, Box>) {
          return eval_box(s, p);
        } else if constexpr (std::is_same_v<T, Constant>) {
          return {s.value, Vec2::Zero()};
        } else if constexpr (std::is_same_v<T, Union>) {
          Value best = eval_with_gradient(s.children.front(), p);
          for (std::size_t i = 1; i < s.children.size(); ++i) {
            Value v = eval_with_gradient(s.children[i], p);
            if (v.first > best.first)
              best = v;
          }
          return best;
        } else if constexpr (std::is_same_v<T, Intersection>) {
          Value best = eval_with_gradient(s.children.front(), p);
          for (std::size_t i = 1; i < s.children.size(); ++i) {
            Value v = eval_with_gradient(s.children[i], p);
            if (v.first < best.first)
              best = v;
          }
          return best;
        } else {
          Value v = eval_with_gradient(s.children.front(), p);
          return {-v.first, -v.second};
        }
      },
      node.shape);
}

} // namespace

std::pair<double, Vec2> eval_with_gradient(const LevelSet &ls, const Vec2 &p) {
  auto [value, grad] = eval_node(*ls.root_, p);
  if (ls.convention_ == SignConvention::PositiveOutside)
    return {-value, -grad};
  return {value, grad};
}

LevelSet LevelSet::circle(const Vec2 &center, double radius) {
  if (!(radius > 0.0))
    throw geometry_error("circle radius must be positive");
  return LevelSet(std::make_shared<Node>(Node{Circle{center, radius}}),
                  SignConvention::PositiveInside);
}

LevelSet LevelSet::half_plane(const Vec2 &point, const Vec2 &normal) {
  const double n = normal.norm();
  if (!(n > 0.0))
    throw geometry_error("half-plane normal must be nonzero");
  return LevelSet(std::make_shared<Node>(Node{HalfPlane{point, normal / n}}),
                  SignConvention::PositiveInside);
}

LevelSet LevelSet::box(const Vec2 &lower, const Vec2 &upper) {
  if (!(upper.x() > lower.x() && upper.y() > lower.y()))
    throw geometry_error("box corners must satisfy lower < upper");
  return LevelSet(std::make_shared<Node>(Node{Box{lower, upper}}),
                  SignConvention::PositiveInside);
}

LevelSet LevelSet::constant(double value) {
  return LevelSet(std::make_shared<Node>(Node{Constant{value}}),
                  SignConvention::PositiveInside);
}

LevelSet LevelSet::unite(std::vector<LevelSet> children) {
  if (children.empty())
    throw geometry_error("union needs at least one child");
  return LevelSet(std::make_shared<Node>(Node{Union{std::move(children)}}),
                  SignConvention::PositiveInside);
}

LevelSet LevelSet::intersect(std::vector<LevelSet> children) {
  if (children.empty())
    throw geometry_error("intersection needs at least one child");
  return LevelSet(
      std::make_shared<Node>(Node{Intersection{std::move(children)}}),
      SignConvention::PositiveInside);
}

LevelSet LevelSet::complement() const {
  return LevelSet(std::make_shared<Node>(Node{Complement{{*this}}}),
                  SignConvention::PositiveInside);
}

LevelSet LevelSet::with_convention(SignConvention convention) const {
  return LevelSet(root_, convention);
}

double LevelSet::eval(const Vec2 &p) const {
  return eval_with_gradient(*this, p).first;
}

Vec2 LevelSet::gradient(const Vec2 &p) const {
  return eval_with_gradient(*this, p).second;
}

Vec2 LevelSet::unit_normal(const Vec2 &p) const {
  const Vec2 g = gradient(p);
  const double n = g.norm();
  if (n < 1e-12)
    throw geometry_error("degenerate level-set gradient at (" +
                         std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                         ")");
  return g / n;
}

NodalField project_p1(const LevelSet &ls, const Mesh2 &mesh) {
  NodalField field;
  field.values.reserve(mesh.nodes().size());
  for (const Vec2 &x : mesh.nodes())
    field.values.push_back(ls.eval(x));
  return field;
}

double interpolate(const NodalField &field, const Mesh2 &mesh, int cell,
                   const Vec2 &p) {
  const auto x = mesh.cell_coords(cell);
  const Cell &c = mesh.cells()[cell];
  const double det = (x[1] - x[0]).x() * (x[2] - x[0]).y() -
                     (x[1] - x[0]).y() * (x[2] - x[0]).x();
  const Vec2 d = p - x[0];
  const double l1 = (d.x() * (x[2] - x[0]).y() - d.y() * (x[2] - x[0]).x()) / det;
  const double l2 = ((x[1] - x[0]).x() * d.y() - (x[1] - x[0]).y() * d.x()) / det;
  const double l0 = 1.0 - l1 - l2;
  return l0 * field[c[0]] + l1 * field[c[1]] + l2 * field[c[2]];
}

} // namespace mscut
