#include "mscut/cutgeom.hpp"
#include "mscut/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace mscut {

namespace {

double signed_area(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

std::array<double, 3> snap(std::array<double, 3> phi, double tol) {
  for (double &v : phi)
    if (std::abs(v) < tol)
      v = tol;
  return phi;
}

ReferenceRule make_rule(int degree) {
  ReferenceRule r;
  auto add3 = [&r](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.barycentric.push_back({a, a, b});
    r.barycentric.push_back({a, b, a});
    r.barycentric.push_back({b, a, a});
    r.weights.insert(r.weights.end(), 3, w);
  };
  auto add6 = [&r](double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.barycentric.push_back({a, b, c});
    r.barycentric.push_back({a, c, b});
    r.barycentric.push_back({b, a, c});
    r.barycentric.push_back({b, c, a});
    r.barycentric.push_back({c, a, b});
    r.barycentric.push_back({c, b, a});
    r.weights.insert(r.weights.end(), 6, w);
  };
  switch (degree) {
  case 1:
    r.barycentric.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(1.0);
    break;
  case 2:
    add3(1.0 / 6.0, 1.0 / 3.0);
    break;
  case 3:
  case 4:
    add3(0.44594849091596488632, 0.22338158967801146570);
    add3(0.091576213509770743460, 0.10995174365532186764);
    break;
  case 5: {
    const double s = std::sqrt(15.0);
    r.barycentric.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(9.0 / 40.0);
    add3((6.0 - s) / 21.0, (155.0 - s) / 1200.0);
    add3((6.0 + s) / 21.0, (155.0 + s) / 1200.0);
    break;
  }
  case 6:
    add3(0.24928674517091042129, 0.11678627572637936603);
    add3(0.063089014491502228340, 0.050844906370206816921);
    add6(0.053145049844816947353, 0.31035245103378440542,
         0.082851075618373575194);
    break;
  default:
    throw config_error("quadrature degree must be in 1..6, got " +
                       std::to_string(degree));
  }
  return r;
}

} // namespace

CellClass classify(const std::array<double, 3> &phi, double tol) {
  const auto v = snap(phi, tol);
  const int negatives = static_cast<int>(
      std::count_if(v.begin(), v.end(), [](double x) { return x < 0.0; }));
  if (negatives == 3)
    return CellClass::NegativeSide;
  if (negatives == 0)
    return CellClass::PositiveSide;
  return CellClass::Cut;
}

double SubTriangle::area() const {
  return signed_area(vertices[0], vertices[1], vertices[2]);
}

CutCell subtessellate(const std::array<Vec2, 3> &x, std::array<double, 3> phi,
                      double tol) {
  phi = snap(phi, tol);
  const bool neg[3] = {phi[0] < 0.0, phi[1] < 0.0, phi[2] < 0.0};
  const int negatives = neg[0] + neg[1] + neg[2];
  if (negatives == 0 || negatives == 3)
    throw geometry_error("subtessellate called on an uncut cell");

  // lone vertex: the one whose sign differs from the other two
  const bool lone_negative = negatives == 1;
  int k = 0;
  for (int i = 0; i < 3; ++i)
    if (neg[i] == lone_negative)
      k = i;
  const int i1 = (k + 1) % 3, i2 = (k + 2) % 3;

  auto crossing = [&](int a, int b) {
    const double t = phi[a] / (phi[a] - phi[b]);
    return Vec2(x[a] + t * (x[b] - x[a]));
  };
  const Vec2 p1 = crossing(k, i1);
  const Vec2 p2 = crossing(k, i2);
  if ((p1 - x[k]).norm() == 0.0 || (p2 - x[k]).norm() == 0.0 ||
      (p1 - x[i1]).norm() == 0.0 || (p2 - x[i2]).norm() == 0.0)
    throw geometry_error("degenerate cut: interface passes through a vertex");

  const Side lone = lone_negative ? Side::Negative : Side::Positive;
  const Side rest = lone_negative ? Side::Positive : Side::Negative;

  CutCell out;
  out.interface = {p1, p2};
  // orientation follows the parent (x[k], x[i1], x[i2]) ordering
  out.parts.push_back({{x[k], p1, p2}, lone});
  out.parts.push_back({{p1, x[i1], x[i2]}, rest});
  out.parts.push_back({{p1, x[i2], p2}, rest});
  return out;
}

CutDecomposition::CutDecomposition(const Mesh2 &mesh, const NodalField &field,
                                   double rel_tol) {
  if (field.size() != mesh.nodes().size())
    throw geometry_error("nodal field size does not match mesh node count");
  classes_.resize(mesh.num_cells());
  cut_index_.assign(mesh.num_cells(), -1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Cell &cell = mesh.cells()[c];
    const auto x = mesh.cell_coords(c);
    const double diameter = std::max(
        {(x[1] - x[0]).norm(), (x[2] - x[1]).norm(), (x[0] - x[2]).norm()});
    const double tol = rel_tol * diameter;
    const std::array<double, 3> phi = {field[cell[0]], field[cell[1]],
                                       field[cell[2]]};
    classes_[c] = classify(phi, tol);
    if (classes_[c] == CellClass::Cut) {
      cut_index_[c] = static_cast<int>(cuts_.size());
      cuts_.push_back(subtessellate(x, phi, tol));
    }
  }
}

double QuadratureRule::total_weight() const {
  double total = 0.0;
  for (double w : weights)
    total += w;
  return total;
}

void QuadratureRule::append(const QuadratureRule &other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

const ReferenceRule &reference_rule(int degree) {
  static const std::array<ReferenceRule, 6> rules = {
      make_rule(1), make_rule(2), make_rule(3),
      make_rule(4), make_rule(5), make_rule(6)};
  if (degree < 1 || degree > 6)
    throw config_error("quadrature degree must be in 1..6, got " +
                       std::to_string(degree));
  return rules[degree - 1];
}

QuadratureRule triangle_quadrature(const std::array<Vec2, 3> &x, int degree) {
  const ReferenceRule &ref = reference_rule(degree);
  const double area = signed_area(x[0], x[1], x[2]);
  QuadratureRule rule;
  rule.points.reserve(ref.weights.size());
  rule.weights.reserve(ref.weights.size());
  for (std::size_t q = 0; q < ref.weights.size(); ++q) {
    const auto &l = ref.barycentric[q];
    rule.points.push_back(l[0] * x[0] + l[1] * x[1] + l[2] * x[2]);
    rule.weights.push_back(ref.weights[q] * area);
  }
  return rule;
}

QuadratureRule cell_quadrature(const CutDecomposition &decomp,
                               const Mesh2 &mesh, int c, Side side,
                               int degree) {
  switch (decomp.cell_class(c)) {
  case CellClass::NegativeSide:
    return side == Side::Negative ? triangle_quadrature(mesh.cell_coords(c), degree)
                                  : QuadratureRule{};
  case CellClass::PositiveSide:
    return side == Side::Positive ? triangle_quadrature(mesh.cell_coords(c), degree)
                                  : QuadratureRule{};
  case CellClass::Cut:
    break;
  }
  QuadratureRule rule;
  for (const SubTriangle &part : decomp.cut(c)->parts)
    if (part.side == side)
      rule.append(triangle_quadrature(part.vertices, degree));
  return rule;
}

QuadratureRule region_quadrature(const CutDecomposition &decomp,
                                 const Mesh2 &mesh, Side side, int degree) {
  QuadratureRule rule;
  for (int c = 0; c < mesh.num_cells(); ++c)
    rule.append(cell_quadrature(decomp, mesh, c, side, degree));
  return rule;
}

Measures measures(const CutDecomposition &decomp, const Mesh2 &mesh) {
  Measures m;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    switch (decomp.cell_class(c)) {
    case CellClass::NegativeSide:
      m.negative_area += mesh.cell_area(c);
      break;
    case CellClass::PositiveSide:
      m.positive_area += mesh.cell_area(c);
      break;
    case CellClass::Cut: {
      const CutCell &cut = *decomp.cut(c);
      for (const SubTriangle &part : cut.parts)
        (part.side == Side::Negative ? m.negative_area : m.positive_area) +=
            part.area();
      m.interface_length += (cut.interface[1] - cut.interface[0]).norm();
      break;
    }
    }
  }
  return m;
}

std::vector<int> multi_cut_cells(const Mesh2 &mesh, const LevelSet &ls,
                                 int samples_per_edge) {
  samples_per_edge = std::max(samples_per_edge, 2);
  std::vector<int> flagged;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto x = mesh.cell_coords(c);
    std::vector<bool> boundary_sign;
    boundary_sign.reserve(3 * samples_per_edge);
    for (int e = 0; e < 3; ++e)
      for (int s = 0; s < samples_per_edge; ++s) {
        const double t = static_cast<double>(s) / samples_per_edge;
        boundary_sign.push_back(ls.eval((1 - t) * x[e] + t * x[(e + 1) % 3]) <
                                0.0);
      }
    int changes = 0;
    for (std::size_t i = 0; i < boundary_sign.size(); ++i)
      changes += boundary_sign[i] != boundary_sign[(i + 1) % boundary_sign.size()];

    const bool nodal_cut =
        classify({ls.eval(x[0]), ls.eval(x[1]), ls.eval(x[2])}, 0.0) ==
        CellClass::Cut;
    bool hidden = false;
    if (changes == 0) {
      const int n = samples_per_edge / 2;
      for (int i = 1; i < n && !hidden; ++i)
        for (int j = 1; i + j < n && !hidden; ++j) {
          const double a = static_cast<double>(i) / n;
          const double b = static_cast<double>(j) / n;
          const Vec2 p = (1 - a - b) * x[0] + a * x[1] + b * x[2];
          hidden = (ls.eval(p) < 0.0) != boundary_sign[0];
        }
    }
    if (changes > 2 || hidden || (changes > 0 && !nodal_cut))
      flagged.push_back(c);
  }
  return flagged;
}

} // namespace mscut
