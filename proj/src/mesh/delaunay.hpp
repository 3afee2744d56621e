#pragma once
// Incremental Bowyer-Watson triangulation used by the mesh generator.

#include <array>
#include <cstdint>
#include <vector>

#include "acrom/mesh.hpp"

namespace acrom::detail {

double orient2d(const Point2& a, const Point2& b, const Point2& c);
/// > 0 when d lies strictly inside the circumcircle of the CCW triangle abc.
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d);
Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c);

class Delaunay {
 public:
  struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // nb[i] is across the edge opposite v[i]
    bool alive = true;
  };

  /// The first three vertices form a super triangle enclosing `lo`..`hi`.
  Delaunay(Point2 lo, Point2 hi);

  static constexpr int kSuperVertices = 3;

  /// Inserts p and returns its vertex index.
  int insert(const Point2& p);

  const std::vector<Point2>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }

  static std::uint64_t edge_key(int a, int b);

 private:
  int locate(const Point2& p) const;

  std::vector<Point2> pts_;
  std::vector<Tri> tris_;
  int last_ = 0;
  // scratch
  std::vector<int> cavity_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
};

}  // namespace acrom::detail
