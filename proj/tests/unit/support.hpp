#pragma once
//
// Shared fixtures and independent reference computations for the tests.
//
// The oracle builds P2/P1 shape functions by inverting the nodal Vandermonde
// matrix in monomial form and integrates with a collapsed Gauss-Legendre rule,
// so it shares no code with the library's assembly.
//

#include <Eigen/Core>
#include <array>
#include <vector>
#include <filesystem>
#include <functional>
#include <random>

#include "acrom/fem.hpp"
#include "acrom/mesh.hpp"
#include "acrom/offline.hpp"

namespace acrom::testing {

// ---- meshes

/// One triangle (0,0), (1,0), (0,1); no boundary edges.
Mesh reference_triangle_mesh();
/// Unit square split into 2 n^2 triangles; every boundary edge tagged outer
/// (so all boundary velocity dofs are Dirichlet) when `tag_boundary`.
Mesh square_mesh(int n, bool tag_boundary = true);
/// Offset-cylinder discretization, built once per h.
const fem::Discretization& cylinder_disc(double h);

// ---- oracle

/// Gauss-Legendre nodes and weights on [0, 1].
std::vector<std::pair<double, double>> gauss_legendre01(int n);

struct OraclePoint {
  Point2 x;
  double w;  // includes the Jacobian
};
/// Collapsed tensor Gauss rule on a triangle, exact to degree 2n - 2.
std::vector<OraclePoint> triangle_points(const Point2& a, const Point2& b, const Point2& c, int n = 8);

/// Shape functions of one straight-sided triangle in monomial form.
class LocalBasis {
 public:
  LocalBasis(const Point2& a, const Point2& b, const Point2& c);
  double p2(int i, const Point2& x) const;
  Point2 p2_grad(int i, const Point2& x) const;
  double p1(int i, const Point2& x) const;

 private:
  Eigen::Matrix<double, 6, 6> c2_;  // rows: basis, cols: 1 x y x^2 xy y^2
  Eigen::Matrix3d c1_;              // rows: basis, cols: 1 x y
};

/// Pointwise evaluation of discrete fields inside triangle `tri`.
struct FieldEval {
  const fem::Discretization& disc;
  int tri;
  LocalBasis basis;
  FieldEval(const fem::Discretization& d, int t);
  Point2 u(const fem::Vector& coeffs, const Point2& x) const;
  /// Row c holds grad of component c.
  std::array<Point2, 2> grad_u(const fem::Vector& coeffs, const Point2& x) const;
  double p(const fem::Vector& coeffs, const Point2& x) const;
};

double oracle_mass(const fem::Discretization& d, const fem::Vector& u, const fem::Vector& v);
double oracle_stiffness(const fem::Discretization& d, const fem::Vector& u, const fem::Vector& v);
/// (div v, q).
double oracle_divergence(const fem::Discretization& d, const fem::Vector& q, const fem::Vector& v);
double oracle_pressure_mass(const fem::Discretization& d, const fem::Vector& p, const fem::Vector& q);
/// 1/2 (w.grad u, v) - 1/2 (w.grad v, u).
double oracle_convection(const fem::Discretization& d, const fem::Vector& w, const fem::Vector& u,
                         const fem::Vector& v);
double oracle_load(const fem::Discretization& d, const fem::BodyForce& f, double t, const fem::Vector& v);

// ---- random data and fixtures

fem::Vector random_velocity(const fem::DofMap& dofs, std::mt19937_64& rng, bool zero_boundary = true);
fem::Vector random_vector(int n, std::mt19937_64& rng);
/// Interpolates an analytic velocity field at the P2 nodes.
fem::Vector interpolate_velocity(const fem::Discretization& d, const std::function<Point2(double, double)>& f);
fem::Vector interpolate_pressure(const fem::Discretization& d, const std::function<double(double, double)>& f);

/// Snapshots of a short run from rest on the h = 0.1 cylinder mesh
/// (dt = 5e-3, 60 steps, every second step kept).
const SnapshotSet& small_snapshots();

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);

/// |(v, q)_W| / (|v|_W |q|_W).
double cosine(const Eigen::VectorXd& v, const Eigen::VectorXd& q, const Eigen::MatrixXd& W);
/// Unit vector in R^k from k - 1 hyperspherical angles.
Eigen::VectorXd sphere_point(const double* ang, int k);
/// Grid scan plus compass search over `dims` angles in [0, pi].
double maximize_angles(int dims, const std::function<double(const std::vector<double>&)>& f);
/// Largest W-cosine between span(X) and span(Q) by direct search.
double brute_force_alpha(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& W);
/// Standard normal entries.
Eigen::MatrixXd random_matrix(int r, int c, std::mt19937_64& rng);
/// W-orthonormal columns spanning the same space as A.
Eigen::MatrixXd w_orthonormal(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W);


}  // namespace acrom::testing
