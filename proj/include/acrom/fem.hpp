#pragma once
//
// Taylor-Hood P2/P1 spaces on a triangle mesh and assembly of the operators
// of the artificial-compression scheme.
//
// Velocity coefficient vectors are blocked by component: entries
// [0, n_scalar) hold the x component at every P2 node, [n_scalar, 2 n_scalar)
// the y component. P2 nodes are numbered vertices first, then edges.
// Pressure coefficients are P1 vertex values.
//

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "acrom/mesh.hpp"

namespace acrom::fem {

using SparseOperator = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Quadrature point in barycentric coordinates; weights sum to 1 so that
/// sum_q w_q g(x_q) * area approximates the integral over the triangle.
struct QuadraturePoint {
  std::array<double, 3> bary;
  double weight;
};

/// Seven-point symmetric rule, exact for polynomials of degree <= 5.
std::span<const QuadraturePoint> triangle_rule();

/// Gauss-Legendre points on [0, 1] for edge integrals (exact to degree 3).
std::span<const std::pair<double, double>> edge_rule();

/// P2 shape functions: nodes 0-2 at the vertices, 3 on edge (0,1),
/// 4 on edge (1,2), 5 on edge (2,0).
std::array<double, 6> p2_values(const std::array<double, 3>& bary);
/// Gradients given the (constant) barycentric gradients of the triangle.
std::array<Point2, 6> p2_gradients(const std::array<double, 3>& bary,
                                   const std::array<Point2, 3>& grad_lambda);

struct ElementGeometry {
  double area = 0.0;
  std::array<Point2, 3> grad_lambda{};
};
ElementGeometry element_geometry(const Mesh& mesh, int tri);

struct DofMap {
  int n_vertices = 0;
  int n_edges = 0;
  int n_scalar = 0;  // P2 nodes per component
  int n_u = 0;
  int n_p = 0;
  std::vector<std::array<int, 2>> edges;
  /// Scalar P2 node per (triangle, local node).
  std::vector<std::array<int, 6>> p2_nodes;
  /// P1 pressure dof per (triangle, local vertex).
  std::vector<std::array<int, 3>> p1_nodes;
  /// Per velocity dof; true on both cylinder boundaries.
  std::vector<char> dirichlet_mask;
  /// Node positions; boundary edge midpoints are snapped onto their circle.
  std::vector<Point2> node_coords;

  int velocity_dof(int tri, int local, int comp) const { return comp * n_scalar + p2_nodes[tri][local]; }
  int pressure_dof(int tri, int local) const { return p1_nodes[tri][local]; }
  int dirichlet_count() const;
};

DofMap build_dofmap(const Mesh& mesh);

struct AssemblyOptions {
  /// Worker threads; 0 reads ACROM_THREADS (default 1).
  int threads = 0;
};

int resolve_threads(int requested);

SparseOperator assemble_velocity_mass(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt = {});
SparseOperator assemble_velocity_stiffness(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt = {});
/// Rows are pressure dofs, columns velocity dofs: entry (q, v) = (div phi_v, psi_q).
SparseOperator assemble_divergence(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt = {});
SparseOperator assemble_pressure_mass(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt = {});
/// N(w) with v^T N(w) u = b*(w, u, v) = 1/2 (w.grad u, v) - 1/2 (w.grad v, u).
SparseOperator assemble_convection_skew(const Mesh& mesh, const DofMap& dofs, const Vector& w,
                                        AssemblyOptions opt = {});

using BodyForce = std::function<Point2(double x, double y, double t)>;

/// f(x, y) = (-4y(1 - x^2 - y^2), 4x(1 - x^2 - y^2)), steady.
Point2 rotating_body_force(double x, double y, double t);

Vector assemble_forcing(const Mesh& mesh, const DofMap& dofs, const BodyForce& f, double t);

/// Symmetric elimination of the (homogeneous) Dirichlet dofs.
/// Square velocity operators get identity rows/columns and zero rhs entries;
/// operators with velocity columns only (e.g. divergence) get zeroed columns.
std::pair<SparseOperator, Vector> apply_dirichlet(const SparseOperator& op, const Vector& rhs, const DofMap& dofs);

/// Zeroes the Dirichlet entries of a velocity vector in place.
void zero_dirichlet(Vector& u, const DofMap& dofs);

/// A mesh, its dof map, and the time-independent operators.
struct Discretization {
  Mesh mesh;
  DofMap dofs;
  SparseOperator mass;           // M, n_u x n_u
  SparseOperator stiffness;      // K, n_u x n_u
  SparseOperator divergence;     // B, n_p x n_u
  SparseOperator pressure_mass;  // Mp, n_p x n_p

  static Discretization build(Mesh mesh, AssemblyOptions opt = {});
};

}  // namespace acrom::fem
