#include "support.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

namespace acrom::testing {

Mesh reference_triangle_mesh() {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 1, 2}};
  return m;
}

Mesh square_mesh(int n, bool tag_boundary) {
  Mesh m;
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.vertices.push_back({double(i) / n, double(j) / n});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  if (tag_boundary) {
    for (int i = 0; i < n; ++i) {
      m.boundary_edges.push_back({{id(i, 0), id(i + 1, 0)}, BoundaryTag::OuterCylinder});
      m.boundary_edges.push_back({{id(n, i), id(n, i + 1)}, BoundaryTag::OuterCylinder});
      m.boundary_edges.push_back({{id(i + 1, n), id(i, n)}, BoundaryTag::OuterCylinder});
      m.boundary_edges.push_back({{id(0, i + 1), id(0, i)}, BoundaryTag::OuterCylinder});
    }
  }
  return m;
}

const fem::Discretization& cylinder_disc(double h) {
  static std::map<double, std::unique_ptr<fem::Discretization>> cache;
  auto& slot = cache[h];
  if (!slot)
    slot = std::make_unique<fem::Discretization>(
        fem::Discretization::build(generate_offset_cylinder_mesh(OffsetCylinderGeometry{}, h)));
  return *slot;
}

std::vector<std::pair<double, double>> gauss_legendre01(int n) {
  std::vector<std::pair<double, double>> out;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    out.push_back({0.5 * (x + 1.0), 1.0 / ((1.0 - x * x) * dp * dp)});
  }
  return out;
}

std::vector<OraclePoint> triangle_points(const Point2& a, const Point2& b, const Point2& c, int n) {
  const auto g = gauss_legendre01(n);
  const double jac = std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  std::vector<OraclePoint> pts;
  for (const auto& [u, wu] : g)
    for (const auto& [v, wv] : g) {
      // (u, v) in the unit square -> a + u (b - a) + u v (c - b).
      const Point2 x{a.x + u * (b.x - a.x) + u * v * (c.x - b.x), a.y + u * (b.y - a.y) + u * v * (c.y - b.y)};
      pts.push_back({x, wu * wv * u * jac});
    }
  return pts;
}

LocalBasis::LocalBasis(const Point2& a, const Point2& b, const Point2& c) {
  const Point2 nodes[6] = {a, b, c, {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}, {0.5 * (b.x + c.x), 0.5 * (b.y + c.y)},
                           {0.5 * (c.x + a.x), 0.5 * (c.y + a.y)}};
  Eigen::Matrix<double, 6, 6> V;
  for (int i = 0; i < 6; ++i) {
    const double x = nodes[i].x, y = nodes[i].y;
    V.row(i) << 1.0, x, y, x * x, x * y, y * y;
  }
  // Basis j has coefficients C(j, :) with V C^T = I.
  c2_ = V.inverse().transpose();
  Eigen::Matrix3d V1;
  for (int i = 0; i < 3; ++i) V1.row(i) << 1.0, nodes[i].x, nodes[i].y;
  c1_ = V1.inverse().transpose();
}

double LocalBasis::p2(int i, const Point2& p) const {
  const auto& c = c2_.row(i);
  return c(0) + c(1) * p.x + c(2) * p.y + c(3) * p.x * p.x + c(4) * p.x * p.y + c(5) * p.y * p.y;
}

Point2 LocalBasis::p2_grad(int i, const Point2& p) const {
  const auto& c = c2_.row(i);
  return {c(1) + 2.0 * c(3) * p.x + c(4) * p.y, c(2) + c(4) * p.x + 2.0 * c(5) * p.y};
}

double LocalBasis::p1(int i, const Point2& p) const {
  const auto& c = c1_.row(i);
  return c(0) + c(1) * p.x + c(2) * p.y;
}

namespace {
LocalBasis basis_of(const fem::Discretization& d, int t) {
  const auto& tr = d.mesh.triangles[t];
  return LocalBasis(d.mesh.vertices[tr[0]], d.mesh.vertices[tr[1]], d.mesh.vertices[tr[2]]);
}

template <class Fn>
double integrate(const fem::Discretization& d, Fn&& fn) {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(d.mesh.triangles.size()); ++t) {
    const auto& tr = d.mesh.triangles[t];
    const FieldEval ev(d, t);
    for (const auto& q : triangle_points(d.mesh.vertices[tr[0]], d.mesh.vertices[tr[1]], d.mesh.vertices[tr[2]], 5))
      sum += q.w * fn(ev, q.x);
  }
  return sum;
}

double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
}  // namespace

FieldEval::FieldEval(const fem::Discretization& d, int t) : disc(d), tri(t), basis(basis_of(d, t)) {}

Point2 FieldEval::u(const fem::Vector& c, const Point2& x) const {
  Point2 r{0.0, 0.0};
  for (int a = 0; a < 6; ++a) {
    const double phi = basis.p2(a, x);
    r.x += c[disc.dofs.velocity_dof(tri, a, 0)] * phi;
    r.y += c[disc.dofs.velocity_dof(tri, a, 1)] * phi;
  }
  return r;
}

std::array<Point2, 2> FieldEval::grad_u(const fem::Vector& c, const Point2& x) const {
  std::array<Point2, 2> g{};
  for (int a = 0; a < 6; ++a) {
    const Point2 gp = basis.p2_grad(a, x);
    for (int k = 0; k < 2; ++k) {
      const double v = c[disc.dofs.velocity_dof(tri, a, k)];
      g[k].x += v * gp.x;
      g[k].y += v * gp.y;
    }
  }
  return g;
}

double FieldEval::p(const fem::Vector& c, const Point2& x) const {
  double r = 0.0;
  for (int a = 0; a < 3; ++a) r += c[disc.dofs.pressure_dof(tri, a)] * basis.p1(a, x);
  return r;
}

double oracle_mass(const fem::Discretization& d, const fem::Vector& u, const fem::Vector& v) {
  return integrate(d, [&](const FieldEval& e, const Point2& x) { return dot(e.u(u, x), e.u(v, x)); });
}

double oracle_stiffness(const fem::Discretization& d, const fem::Vector& u, const fem::Vector& v) {
  return integrate(d, [&](const FieldEval& e, const Point2& x) {
    const auto gu = e.grad_u(u, x), gv = e.grad_u(v, x);
    return dot(gu[0], gv[0]) + dot(gu[1], gv[1]);
  });
}

double oracle_divergence(const fem::Discretization& d, const fem::Vector& q, const fem::Vector& v) {
  return integrate(d, [&](const FieldEval& e, const Point2& x) {
    const auto g = e.grad_u(v, x);
    return (g[0].x + g[1].y) * e.p(q, x);
  });
}

double oracle_pressure_mass(const fem::Discretization& d, const fem::Vector& p, const fem::Vector& q) {
  return integrate(d, [&](const FieldEval& e, const Point2& x) { return e.p(p, x) * e.p(q, x); });
}

double oracle_convection(const fem::Discretization& d, const fem::Vector& w, const fem::Vector& u,
                         const fem::Vector& v) {
  return integrate(d, [&](const FieldEval& e, const Point2& x) {
    const Point2 wx = e.u(w, x), ux = e.u(u, x), vx = e.u(v, x);
    const auto gu = e.grad_u(u, x), gv = e.grad_u(v, x);
    const Point2 w_grad_u{dot(wx, gu[0]), dot(wx, gu[1])};
    const Point2 w_grad_v{dot(wx, gv[0]), dot(wx, gv[1])};
    return 0.5 * dot(w_grad_u, vx) - 0.5 * dot(w_grad_v, ux);
  });
}

double oracle_load(const fem::Discretization& d, const fem::BodyForce& f, double t, const fem::Vector& v) {
  return integrate(d, [&](const FieldEval& e, const Point2& x) { return dot(f(x.x, x.y, t), e.u(v, x)); });
}

fem::Vector random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  fem::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

fem::Vector random_velocity(const fem::DofMap& dofs, std::mt19937_64& rng, bool zero_boundary) {
  fem::Vector v = random_vector(dofs.n_u, rng);
  if (zero_boundary) fem::zero_dirichlet(v, dofs);
  return v;
}

fem::Vector interpolate_velocity(const fem::Discretization& d, const std::function<Point2(double, double)>& f) {
  const auto& dofs = d.dofs;
  fem::Vector u(dofs.n_u);
  // Straight-edge midpoints, so that quadratics are reproduced exactly.
  for (int v = 0; v < dofs.n_vertices; ++v) {
    const Point2 r = f(d.mesh.vertices[v].x, d.mesh.vertices[v].y);
    u[v] = r.x;
    u[dofs.n_scalar + v] = r.y;
  }
  for (int e = 0; e < dofs.n_edges; ++e) {
    const Point2& a = d.mesh.vertices[dofs.edges[e][0]];
    const Point2& b = d.mesh.vertices[dofs.edges[e][1]];
    const Point2 r = f(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    u[dofs.n_vertices + e] = r.x;
    u[dofs.n_scalar + dofs.n_vertices + e] = r.y;
  }
  return u;
}

fem::Vector interpolate_pressure(const fem::Discretization& d, const std::function<double(double, double)>& f) {
  fem::Vector p(d.dofs.n_p);
  for (int v = 0; v < d.dofs.n_p; ++v) p[v] = f(d.mesh.vertices[v].x, d.mesh.vertices[v].y);
  return p;
}

const SnapshotSet& small_snapshots() {
  static const SnapshotSet s = [] {
    OfflineConfig c;
    c.dt = 5e-3;
    c.t_end = 0.3;
    c.snapshot_every = 2;
    return run_offline(c, cylinder_disc(0.1), {});
  }();
  return s;
}

TempDir::TempDir() {
  static std::mt19937_64 rng(std::random_device{}());
  for (;;) {
    std::ostringstream name;
    name << "acrom-test-" << std::hex << rng();
    path_ = std::filesystem::temp_directory_path() / name.str();
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

double cosine(const Eigen::VectorXd& v, const Eigen::VectorXd& q, const Eigen::MatrixXd& W) {
  return std::abs(v.dot(W * q)) / std::sqrt(v.dot(W * v) * q.dot(W * q));
}

// Unit vector in R^k from k - 1 hyperspherical angles.
Eigen::VectorXd sphere_point(const double* ang, int k) {
  Eigen::VectorXd c(k);
  double s = 1.0;
  for (int i = 0; i < k - 1; ++i) {
    c[i] = s * std::cos(ang[i]);
    s *= std::sin(ang[i]);
  }
  c[k - 1] = s;
  return c;
}

// Maximizes f over a box of angles by a grid scan followed by compass search
// from the best few grid points.
double maximize_angles(int dims, const std::function<double(const std::vector<double>&)>& f) {
  if (dims == 0) return f({});
  const int grid = dims <= 2 ? 40 : (dims == 3 ? 16 : 10);
  std::vector<std::pair<double, std::vector<double>>> cands;
  std::vector<int> idx(dims, 0);
  for (;;) {
    std::vector<double> x(dims);
    for (int i = 0; i < dims; ++i) x[i] = M_PI * (idx[i] + 0.5) / grid;
    cands.push_back({f(x), x});
    int i = 0;
    while (i < dims && ++idx[i] == grid) idx[i++] = 0;
    if (i == dims) break;
  }
  std::partial_sort(cands.begin(), cands.begin() + std::min<std::size_t>(6, cands.size()), cands.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = -INFINITY;
  for (std::size_t c = 0; c < std::min<std::size_t>(6, cands.size()); ++c) {
    auto [fx, x] = cands[c];
    for (double step = M_PI / grid; step > 1e-13;) {
      bool moved = false;
      for (int i = 0; i < dims; ++i)
        for (double sgn : {1.0, -1.0}) {
          auto y = x;
          y[i] += sgn * step;
          const double fy = f(y);
          if (fy > fx) {
            fx = fy;
            x = y;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    best = std::max(best, fx);
  }
  return best;
}

double brute_force_alpha(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& W) {
  const int kx = static_cast<int>(X.cols()), kq = static_cast<int>(Q.cols());
  return maximize_angles(kx - 1 + kq - 1, [&](const std::vector<double>& a) {
    const Eigen::VectorXd v = X * sphere_point(a.data(), kx);
    const Eigen::VectorXd q = Q * sphere_point(a.data() + kx - 1, kq);
    return cosine(v, q, W);
  });
}

Eigen::MatrixXd random_matrix(int r, int c, std::mt19937_64& rng) {
  Eigen::MatrixXd m(r, c);
  std::normal_distribution<double> g;
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

// W-orthonormal columns spanning the same space as A.
Eigen::MatrixXd w_orthonormal(const Eigen::MatrixXd& A, const Eigen::MatrixXd& W) {
  const Eigen::MatrixXd G = A.transpose() * W * A;
  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  const Eigen::MatrixXd Lt = llt.matrixU();
  return A * Lt.inverse();
}

}  // namespace acrom::testing
