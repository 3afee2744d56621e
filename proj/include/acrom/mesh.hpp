#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace acrom {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

enum class BoundaryTag : std::uint8_t { OuterCylinder = 0, InnerCylinder = 1 };

struct BoundaryEdge {
  std::array<int, 2> v{};
  BoundaryTag tag = BoundaryTag::OuterCylinder;
  friend bool operator==(const BoundaryEdge&, const BoundaryEdge&) = default;
};

/// Outer disk of radius r1 at the origin minus the inner disk of radius r2
/// centred at (c1, c2).
struct OffsetCylinderGeometry {
  double r1 = 1.0;
  double r2 = 0.1;
  double c1 = 0.5;
  double c2 = 0.0;
  friend bool operator==(const OffsetCylinderGeometry&, const OffsetCylinderGeometry&) = default;

  /// Signed circle residual used by the boundary snapping invariant.
  double circle_residual(const Point2& p, BoundaryTag tag) const;
  Point2 snap(const Point2& p, BoundaryTag tag) const;
  double domain_area() const;
};

/// Conforming triangulation. Triangles are counter-clockwise.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  /// Present for generated meshes; hand-built test meshes may omit it, in
  /// which case the circle invariant is not checked.
  std::optional<OffsetCylinderGeometry> geometry;

  friend bool operator==(const Mesh&, const Mesh&) = default;

  double signed_area(int tri) const;
  double total_area() const;
  double max_diameter() const;

  /// Throws InvariantError naming the first violated mesh invariant.
  void validate() const;
};

/// Generates a conforming mesh of the offset-cylinder domain.
///
/// The generator places rings of points around both circles (graded from
/// target_h/2 at the inner cylinder up to target_h), fills the interior with a
/// jittered hexagonal lattice, triangulates with Bowyer-Watson, and then
/// refines by circumcentre insertion until every triangle meets the size and
/// quality bounds. Boundary segments are kept unencroached, so the boundary
/// polygon is always present in the triangulation. The jitter comes from a
/// fixed-seed generator, making the output a pure function of the arguments.
///
/// Throws GeometryError if the inner disk is not strictly inside the outer
/// one, ResolutionError if target_h exceeds r2.
Mesh generate_offset_cylinder_mesh(double r1, double r2, double c1, double c2, double target_h);
Mesh generate_offset_cylinder_mesh(const OffsetCylinderGeometry& g, double target_h);

/// The text form written by save_mesh.
std::string mesh_to_string(const Mesh& mesh);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh load_mesh(const std::filesystem::path& path);

/// Inner-cylinder edges ordered head-to-tail into one loop, counter-clockwise
/// about the inner disk centre. Throws TopologyError otherwise.
std::vector<BoundaryEdge> inner_boundary_edges(const Mesh& mesh);

}  // namespace acrom
