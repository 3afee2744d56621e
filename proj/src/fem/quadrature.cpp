#include <cmath>

#include "acrom/fem.hpp"

namespace acrom::fem {

namespace {

struct Rule {
  std::array<QuadraturePoint, 7> pts;
  Rule() {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
    const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
    const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
    pts = {{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
        {{a1, a1, b1}, w1},
        {{a1, b1, a1}, w1},
        {{b1, a1, a1}, w1},
        {{a2, a2, b2}, w2},
        {{a2, b2, a2}, w2},
        {{b2, a2, a2}, w2},
    }};
  }
};

}  // namespace

std::span<const QuadraturePoint> triangle_rule() {
  static const Rule rule;
  return rule.pts;
}

std::span<const std::pair<double, double>> edge_rule() {
  static const std::array<std::pair<double, double>, 2> pts{{
      {0.5 - 0.5 / std::sqrt(3.0), 0.5},
      {0.5 + 0.5 / std::sqrt(3.0), 0.5},
  }};
  return pts;
}

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],        4.0 * l[1] * l[2],        4.0 * l[2] * l[0]};
}

std::array<Point2, 6> p2_gradients(const std::array<double, 3>& l, const std::array<Point2, 3>& g) {
  std::array<Point2, 6> out;
  for (int i = 0; i < 3; ++i) {
    const double s = 4.0 * l[i] - 1.0;
    out[i] = {s * g[i].x, s * g[i].y};
  }
  const int ei[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int e = 0; e < 3; ++e) {
    const int i = ei[e][0], j = ei[e][1];
    out[3 + e] = {4.0 * (l[i] * g[j].x + l[j] * g[i].x), 4.0 * (l[i] * g[j].y + l[j] * g[i].y)};
  }
  return out;
}

ElementGeometry element_geometry(const Mesh& mesh, int tri) {
  const auto& t = mesh.triangles[tri];
  const Point2& p0 = mesh.vertices[t[0]];
  const Point2& p1 = mesh.vertices[t[1]];
  const Point2& p2 = mesh.vertices[t[2]];
  const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad_lambda[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
  g.grad_lambda[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
  g.grad_lambda[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
  return g;
}

}  // namespace acrom::fem
