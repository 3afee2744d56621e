#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

#include "acrom/error.hpp"
#include "acrom/fem.hpp"
#include "support.hpp"

using namespace acrom;
using fem::SparseOperator;
using fem::Vector;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b over the reference triangle.
double monomial_integral(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double max_abs(const SparseOperator& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double max_asymmetry(const SparseOperator& A) {
  const SparseOperator At = A.transpose();
  return max_abs(SparseOperator(A - At));
}

fem::Discretization build(Mesh m) { return fem::Discretization::build(std::move(m)); }

}  // namespace

TEST_CASE("triangle rule integrates monomials up to degree 5 exactly") {
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b) {
      double q = 0.0;
      for (const auto& p : fem::triangle_rule()) {
        // Reference triangle: x = lambda_1, y = lambda_2, area 1/2.
        q += 0.5 * p.weight * std::pow(p.bary[1], a) * std::pow(p.bary[2], b);
      }
      CHECK(q == doctest::Approx(monomial_integral(a, b)).epsilon(1e-14));
    }
}

TEST_CASE("edge rule is exact to degree 3") {
  for (int k = 0; k <= 3; ++k) {
    double q = 0.0;
    for (const auto& [s, w] : fem::edge_rule()) q += w * std::pow(s, k);
    CHECK(q == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
}

TEST_CASE("P2 shape functions are nodal and match the oracle basis") {
  const std::array<std::array<double, 3>, 6> nodes{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}, {0, 0.5, 0.5},
                                                    {0.5, 0, 0.5}}};
  for (int i = 0; i < 6; ++i) {
    const auto v = fem::p2_values(nodes[i]);
    for (int j = 0; j < 6; ++j) CHECK(v[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }
  // Gradients on a skewed triangle against the Vandermonde oracle.
  const Mesh m{{{0.1, 0.2}, {1.3, 0.4}, {0.5, 1.1}}, {{0, 1, 2}}, {}, std::nullopt};
  const auto geo = fem::element_geometry(m, 0);
  const testing::LocalBasis oracle(m.vertices[0], m.vertices[1], m.vertices[2]);
  const std::array<double, 3> bary{0.2, 0.3, 0.5};
  const Point2 x{0.2 * 0.1 + 0.3 * 1.3 + 0.5 * 0.5, 0.2 * 0.2 + 0.3 * 0.4 + 0.5 * 1.1};
  const auto g = fem::p2_gradients(bary, geo.grad_lambda);
  const auto v = fem::p2_values(bary);
  for (int i = 0; i < 6; ++i) {
    CHECK(v[i] == doctest::Approx(oracle.p2(i, x)).epsilon(1e-13));
    CHECK(g[i].x == doctest::Approx(oracle.p2_grad(i, x).x).epsilon(1e-12));
    CHECK(g[i].y == doctest::Approx(oracle.p2_grad(i, x).y).epsilon(1e-12));
  }
}

TEST_CASE("reference triangle element matrices match closed forms") {
  const auto d = build(testing::reference_triangle_mesh());
  REQUIRE(d.dofs.n_u == 12);
  REQUIRE(d.dofs.n_p == 3);
  const Eigen::MatrixXd M(d.mass);
  // Exact P2 mass on a triangle of area A is A/180 times this matrix.
  Eigen::Matrix<double, 6, 6> ref;
  ref << 6, -1, -1, 0, -4, 0,   //
      -1, 6, -1, 0, 0, -4,      //
      -1, -1, 6, -4, 0, 0,      //
      0, 0, -4, 32, 16, 16,     //
      -4, 0, 0, 16, 32, 16,     //
      0, -4, 0, 16, 16, 32;
  ref *= 0.5 / 180.0;
  Eigen::Matrix<double, 6, 6> got;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) got(a, b) = M(d.dofs.velocity_dof(0, a, 0), d.dofs.velocity_dof(0, b, 0));
  CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-15);
  // The y block is the same, and the components do not couple.
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      CHECK(M(d.dofs.velocity_dof(0, a, 1), d.dofs.velocity_dof(0, b, 1)) == doctest::Approx(ref(a, b)));
      CHECK(M(d.dofs.velocity_dof(0, a, 0), d.dofs.velocity_dof(0, b, 1)) == 0.0);
    }
  const Eigen::MatrixXd Mp(d.pressure_mass);
  Eigen::Matrix3d p1;
  p1 << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  p1 *= 0.5 / 12.0;
  CHECK((Mp - p1).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("global mass, stiffness and pressure mass properties") {
  const auto& d = testing::cylinder_disc(0.05);
  const double area = d.mesh.total_area();
  const Vector ones_u = Vector::Ones(d.dofs.n_u), ones_p = Vector::Ones(d.dofs.n_p);
  CHECK(ones_u.dot(d.mass * ones_u) == doctest::Approx(2.0 * area).epsilon(1e-12));
  CHECK(ones_u.dot(d.mass * ones_u) == doctest::Approx(2.0 * 0.99 * M_PI).epsilon(0.02));
  CHECK(ones_p.dot(d.pressure_mass * ones_p) == doctest::Approx(area).epsilon(1e-12));
  CHECK(max_asymmetry(d.mass) <= 1e-12 * max_abs(d.mass));
  CHECK(max_asymmetry(d.stiffness) <= 1e-12 * max_abs(d.stiffness));
  CHECK(max_asymmetry(d.pressure_mass) <= 1e-12 * max_abs(d.pressure_mass));
  CHECK((d.stiffness * ones_u).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(d.stiffness));

  Eigen::SimplicialLLT<SparseOperator> mass_chol(d.mass);
  CHECK(mass_chol.info() == Eigen::Success);
  Eigen::SimplicialLLT<SparseOperator> mp_chol(d.pressure_mass);
  CHECK(mp_chol.info() == Eigen::Success);
  auto [K0, unused] = fem::apply_dirichlet(d.stiffness, Vector::Zero(d.dofs.n_u), d.dofs);
  Eigen::SimplicialLLT<SparseOperator> k_chol(K0);
  CHECK(k_chol.info() == Eigen::Success);
}

TEST_CASE("stiffness kernel is exactly the constant fields") {
  const auto d = build(testing::square_mesh(3, false));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(d.stiffness)};
  const auto& ev = es.eigenvalues();
  CHECK(std::abs(ev[0]) <= 1e-12);
  CHECK(std::abs(ev[1]) <= 1e-12);
  CHECK(ev[2] > 1e-3);
}

TEST_CASE("bilinear forms agree with the oracle on random fields") {
  const auto& d = testing::cylinder_disc(0.1);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector u = testing::random_velocity(d.dofs, rng, false);
    const Vector v = testing::random_velocity(d.dofs, rng, false);
    const Vector w = testing::random_velocity(d.dofs, rng, false);
    const Vector q = testing::random_vector(d.dofs.n_p, rng);
    const Vector r = testing::random_vector(d.dofs.n_p, rng);
    CHECK(u.dot(d.mass * v) == doctest::Approx(testing::oracle_mass(d, u, v)).epsilon(1e-10));
    CHECK(u.dot(d.stiffness * v) == doctest::Approx(testing::oracle_stiffness(d, u, v)).epsilon(1e-10));
    CHECK(q.dot(d.divergence * v) == doctest::Approx(testing::oracle_divergence(d, q, v)).epsilon(1e-10));
    CHECK(q.dot(d.pressure_mass * r) == doctest::Approx(testing::oracle_pressure_mass(d, q, r)).epsilon(1e-10));
    const SparseOperator N = fem::assemble_convection_skew(d.mesh, d.dofs, w);
    CHECK(v.dot(N * u) == doctest::Approx(testing::oracle_convection(d, w, u, v)).epsilon(1e-10));
  }
}

TEST_CASE("divergence of simple fields") {
  const auto& d = testing::cylinder_disc(0.1);
  const Vector translation = testing::interpolate_velocity(d, [](double, double) { return Point2{1.0, -2.0}; });
  CHECK((d.divergence * translation).cwiseAbs().maxCoeff() <= 1e-12);
  const Vector ux = testing::interpolate_velocity(d, [](double x, double) { return Point2{x, 0.0}; });
  const Vector expected = d.pressure_mass * Vector::Ones(d.dofs.n_p);
  CHECK((d.divergence * ux - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("convection operator is skew-symmetric and linear in w") {
  const auto& d = testing::cylinder_disc(0.1);
  CHECK(fem::assemble_convection_skew(d.mesh, d.dofs, Vector::Zero(d.dofs.n_u)).norm() == 0.0);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector w = testing::random_velocity(d.dofs, rng, false);
    const Vector v = testing::random_velocity(d.dofs, rng, false);
    const SparseOperator N = fem::assemble_convection_skew(d.mesh, d.dofs, w);
    CHECK(std::abs(v.dot(N * v)) <= 1e-12 * N.norm() * v.squaredNorm());
  }
  const Vector w1 = testing::random_velocity(d.dofs, rng), w2 = testing::random_velocity(d.dofs, rng);
  const SparseOperator lhs = fem::assemble_convection_skew(d.mesh, d.dofs, 2.0 * w1 - w2);
  const SparseOperator rhs = 2.0 * fem::assemble_convection_skew(d.mesh, d.dofs, w1) -
                             fem::assemble_convection_skew(d.mesh, d.dofs, w2);
  CHECK(SparseOperator(lhs - rhs).norm() <= 1e-12 * lhs.norm());
  CHECK_THROWS_AS(fem::assemble_convection_skew(d.mesh, d.dofs, Vector::Zero(3)), DimensionError);
}

TEST_CASE("forcing vector") {
  const Point2 origin = fem::rotating_body_force(0.0, 0.0, 0.0);
  const Point2 rim = fem::rotating_body_force(1.0, 0.0, 0.0);
  CHECK(origin.x == 0.0);
  CHECK(origin.y == 0.0);
  CHECK(rim.x == 0.0);
  CHECK(rim.y == 0.0);

  const auto& d = testing::cylinder_disc(0.1);
  const Vector Fc = fem::assemble_forcing(d.mesh, d.dofs, [](double, double, double) { return Point2{0.3, -0.7}; }, 0.0);
  const Vector c = testing::interpolate_velocity(d, [](double, double) { return Point2{0.3, -0.7}; });
  CHECK((Fc - d.mass * c).cwiseAbs().maxCoeff() <= 1e-14);

  const Vector F = fem::assemble_forcing(d.mesh, d.dofs, fem::rotating_body_force, 0.0);
  std::mt19937_64 rng(9);
  const Vector v = testing::random_velocity(d.dofs, rng, false);
  // The force is a cubic, so the degree-5 rule is exact against P2 test functions.
  CHECK(F.dot(v) == doctest::Approx(testing::oracle_load(d, fem::rotating_body_force, 0.0, v)).epsilon(1e-10));
}

TEST_CASE("Dirichlet elimination") {
  const auto& d = testing::cylinder_disc(0.1);
  std::mt19937_64 rng(3);
  const Vector b = testing::random_vector(d.dofs.n_u, rng);
  auto [Mc, bc] = fem::apply_dirichlet(d.mass, b, d.dofs);
  Eigen::SimplicialLDLT<SparseOperator> solver(Mc);
  const Vector x = solver.solve(bc);
  for (int i = 0; i < d.dofs.n_u; ++i)
    if (d.dofs.dirichlet_mask[i]) REQUIRE(x[i] == 0.0);

  auto [Mcc, bcc] = fem::apply_dirichlet(Mc, bc, d.dofs);
  CHECK(SparseOperator(Mcc - Mc).norm() == 0.0);
  CHECK(bcc == bc);

  // Same energy as the solve on the explicit interior block.
  std::vector<int> interior;
  for (int i = 0; i < d.dofs.n_u; ++i)
    if (!d.dofs.dirichlet_mask[i]) interior.push_back(i);
  const Eigen::MatrixXd Md(d.mass);
  Eigen::MatrixXd Mi(interior.size(), interior.size());
  Vector bi(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) {
    bi[i] = b[interior[i]];
    for (std::size_t j = 0; j < interior.size(); ++j) Mi(i, j) = Md(interior[i], interior[j]);
  }
  const Vector xi = Mi.llt().solve(bi);
  CHECK(x.dot(d.mass * x) == doctest::Approx(xi.dot(Mi * xi)).epsilon(1e-10));

  // Closed loops: one vertex and one midpoint per boundary edge, two components.
  CHECK(d.dofs.dirichlet_count() == 4 * static_cast<int>(d.mesh.boundary_edges.size()));
}

TEST_CASE("dof counts") {
  const auto& d = testing::cylinder_disc(0.1);
  CHECK(d.dofs.n_u == 2 * (d.dofs.n_vertices + d.dofs.n_edges));
  CHECK(d.dofs.n_p == static_cast<int>(d.mesh.vertices.size()));
}

TEST_CASE("parallel assembly matches serial assembly") {
  const auto& d = testing::cylinder_disc(0.1);
  std::mt19937_64 rng(4);
  const Vector w = testing::random_velocity(d.dofs, rng);
  for (int threads : {2, 3}) {
    const fem::AssemblyOptions par{threads}, ser{1};
    const auto diff = [](const SparseOperator& a, const SparseOperator& b) {
      return SparseOperator(a - b).norm() / a.norm();
    };
    CHECK(diff(fem::assemble_velocity_mass(d.mesh, d.dofs, ser), fem::assemble_velocity_mass(d.mesh, d.dofs, par)) <= 1e-13);
    CHECK(diff(fem::assemble_velocity_stiffness(d.mesh, d.dofs, ser),
               fem::assemble_velocity_stiffness(d.mesh, d.dofs, par)) <= 1e-13);
    CHECK(diff(fem::assemble_divergence(d.mesh, d.dofs, ser), fem::assemble_divergence(d.mesh, d.dofs, par)) <= 1e-13);
    CHECK(diff(fem::assemble_convection_skew(d.mesh, d.dofs, w, ser),
               fem::assemble_convection_skew(d.mesh, d.dofs, w, par)) <= 1e-13);
  }
}

TEST_CASE("Poisson solve converges at third order in L2") {
  // -lap u = f on the unit square with u = x(1-x)y(1-y) in the x component.
  const auto exact = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  const fem::BodyForce f = [](double x, double y, double) {
    return Point2{2.0 * y * (1 - y) + 2.0 * x * (1 - x), 0.0};
  };
  std::vector<double> errors;
  for (int n : {4, 8, 16}) {
    const auto d = build(testing::square_mesh(n));
    const Vector F = fem::assemble_forcing(d.mesh, d.dofs, f, 0.0);
    auto [K, rhs] = fem::apply_dirichlet(d.stiffness, F, d.dofs);
    Eigen::SimplicialLDLT<SparseOperator> solver(K);
    const Vector u = solver.solve(rhs);
    double err2 = 0.0;
    for (int t = 0; t < static_cast<int>(d.mesh.triangles.size()); ++t) {
      const auto& tr = d.mesh.triangles[t];
      const testing::FieldEval ev(d, t);
      for (const auto& q : testing::triangle_points(d.mesh.vertices[tr[0]], d.mesh.vertices[tr[1]],
                                                    d.mesh.vertices[tr[2]], 6)) {
        const double e = ev.u(u, q.x).x - exact(q.x.x, q.x.y);
        err2 += q.w * e * e;
      }
    }
    errors.push_back(std::sqrt(err2));
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double rate = std::log2(errors[i - 1] / errors[i]);
    CHECK(rate > 2.8);
  }
}
