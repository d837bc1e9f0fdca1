#pragma once

#include "mscut/common.hpp"

#include <memory>
#include <vector>

namespace mscut {

class Mesh2;

/// Which side of the zero isoline carries positive values.
enum class SignConvention { PositiveInside, PositiveOutside };

/// Immutable constructive-solid-geometry tree of signed-distance primitives.
///
/// Primitives report positive values inside their shape. Combinators use the
/// values of their children as evaluated (children keep their own
/// conventions): union is the pointwise max, intersection the pointwise min,
/// complement a negation. The convention flag of the root flips the final
/// sign, so a zoom set "positive outside the zoom" is
/// `LevelSet::unite(circles).with_convention(SignConvention::PositiveOutside)`.
///
/// Gradients are analytic per primitive and follow the active child through
/// min/max nodes; ties select the first child.
class LevelSet {
public:
  /// r - |x - c|.
  static LevelSet circle(const Vec2 &center, double radius);
  /// (x - p) . n / |n|: positive on the side the normal points into.
  static LevelSet half_plane(const Vec2 &point, const Vec2 &normal);
  /// Exact signed distance to an axis-aligned box, positive inside.
  static LevelSet box(const Vec2 &lower, const Vec2 &upper);
  static LevelSet constant(double value);
  static LevelSet unite(std::vector<LevelSet> children);
  static LevelSet intersect(std::vector<LevelSet> children);

  LevelSet complement() const;
  LevelSet with_convention(SignConvention convention) const;
  SignConvention convention() const noexcept { return convention_; }

  double eval(const Vec2 &p) const;
  Vec2 gradient(const Vec2 &p) const;
  /// grad(phi) / |grad(phi)|; throws a geometry error where the gradient
  /// vanishes (circle centers, constants).
  Vec2 unit_normal(const Vec2 &p) const;

  struct Node;

private:
  LevelSet(std::shared_ptr<const Node> root, SignConvention convention)
      : root_(std::move(root)), convention_(convention) {}

  std::shared_ptr<const Node> root_;
  SignConvention convention_ = SignConvention::PositiveInside;

  friend struct Node;
  friend std::pair<double, Vec2> eval_with_gradient(const LevelSet &ls,
                                                    const Vec2 &p);
};

std::pair<double, Vec2> eval_with_gradient(const LevelSet &ls, const Vec2 &p);

/// Piecewise-linear nodal projection of a level set on a mesh.
struct NodalField {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

NodalField project_p1(const LevelSet &ls, const Mesh2 &mesh);

/// P1 interpolation of a nodal field inside cell `cell` at point p.
double interpolate(const NodalField &field, const Mesh2 &mesh, int cell,
                   const Vec2 &p);

} // namespace mscut
