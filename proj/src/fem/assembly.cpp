#include <thread>

#include "acrom/error.hpp"
#include "acrom/fem.hpp"

namespace acrom::fem {

namespace {

using Triplet = Eigen::Triplet<double>;

// Runs `fn(tri, out)` over all triangles, split into contiguous chunks, and
// concatenates the chunk outputs in triangle order.
template <class Fn>
SparseOperator assemble(int rows, int cols, int n_tri, int threads, Fn&& fn) {
  threads = std::max(1, std::min(resolve_threads(threads), n_tri));
  std::vector<std::vector<Triplet>> parts(threads);
  const auto run = [&](int k) {
    const int lo = static_cast<int>(static_cast<long>(n_tri) * k / threads);
    const int hi = static_cast<int>(static_cast<long>(n_tri) * (k + 1) / threads);
    for (int t = lo; t < hi; ++t) fn(t, parts[k]);
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(run, k);
    for (auto& th : pool) th.join();
  }
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<Triplet> all;
  all.reserve(total);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  SparseOperator op(rows, cols);
  op.setFromTriplets(all.begin(), all.end());
  op.makeCompressed();
  return op;
}

Point2 map_point(const Mesh& mesh, int tri, const std::array<double, 3>& l) {
  const auto& t = mesh.triangles[tri];
  Point2 p{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    p.x += l[i] * mesh.vertices[t[i]].x;
    p.y += l[i] * mesh.vertices[t[i]].y;
  }
  return p;
}

}  // namespace

SparseOperator assemble_velocity_mass(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt) {
  const auto rule = triangle_rule();
  return assemble(dofs.n_u, dofs.n_u, static_cast<int>(mesh.triangles.size()), opt.threads,
                  [&](int t, std::vector<Triplet>& out) {
                    const auto geo = element_geometry(mesh, t);
                    double m[6][6] = {};
                    for (const auto& q : rule) {
                      const auto N = p2_values(q.bary);
                      const double w = q.weight * geo.area;
                      for (int a = 0; a < 6; ++a)
                        for (int b = 0; b < 6; ++b) m[a][b] += w * N[a] * N[b];
                    }
                    for (int c = 0; c < 2; ++c)
                      for (int a = 0; a < 6; ++a)
                        for (int b = 0; b < 6; ++b)
                          out.emplace_back(dofs.velocity_dof(t, a, c), dofs.velocity_dof(t, b, c), m[a][b]);
                  });
}

SparseOperator assemble_velocity_stiffness(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt) {
  const auto rule = triangle_rule();
  return assemble(dofs.n_u, dofs.n_u, static_cast<int>(mesh.triangles.size()), opt.threads,
                  [&](int t, std::vector<Triplet>& out) {
                    const auto geo = element_geometry(mesh, t);
                    double k[6][6] = {};
                    for (const auto& q : rule) {
                      const auto G = p2_gradients(q.bary, geo.grad_lambda);
                      const double w = q.weight * geo.area;
                      for (int a = 0; a < 6; ++a)
                        for (int b = 0; b < 6; ++b) k[a][b] += w * (G[a].x * G[b].x + G[a].y * G[b].y);
                    }
                    for (int c = 0; c < 2; ++c)
                      for (int a = 0; a < 6; ++a)
                        for (int b = 0; b < 6; ++b)
                          out.emplace_back(dofs.velocity_dof(t, a, c), dofs.velocity_dof(t, b, c), k[a][b]);
                  });
}

SparseOperator assemble_divergence(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt) {
  const auto rule = triangle_rule();
  return assemble(dofs.n_p, dofs.n_u, static_cast<int>(mesh.triangles.size()), opt.threads,
                  [&](int t, std::vector<Triplet>& out) {
                    const auto geo = element_geometry(mesh, t);
                    double bx[3][6] = {}, by[3][6] = {};
                    for (const auto& q : rule) {
                      const auto G = p2_gradients(q.bary, geo.grad_lambda);
                      const double w = q.weight * geo.area;
                      for (int i = 0; i < 3; ++i)
                        for (int a = 0; a < 6; ++a) {
                          bx[i][a] += w * q.bary[i] * G[a].x;
                          by[i][a] += w * q.bary[i] * G[a].y;
                        }
                    }
                    for (int i = 0; i < 3; ++i)
                      for (int a = 0; a < 6; ++a) {
                        out.emplace_back(dofs.pressure_dof(t, i), dofs.velocity_dof(t, a, 0), bx[i][a]);
                        out.emplace_back(dofs.pressure_dof(t, i), dofs.velocity_dof(t, a, 1), by[i][a]);
                      }
                  });
}

SparseOperator assemble_pressure_mass(const Mesh& mesh, const DofMap& dofs, AssemblyOptions opt) {
  const auto rule = triangle_rule();
  return assemble(dofs.n_p, dofs.n_p, static_cast<int>(mesh.triangles.size()), opt.threads,
                  [&](int t, std::vector<Triplet>& out) {
                    const auto geo = element_geometry(mesh, t);
                    double m[3][3] = {};
                    for (const auto& q : rule)
                      for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) m[i][j] += q.weight * geo.area * q.bary[i] * q.bary[j];
                    for (int i = 0; i < 3; ++i)
                      for (int j = 0; j < 3; ++j)
                        out.emplace_back(dofs.pressure_dof(t, i), dofs.pressure_dof(t, j), m[i][j]);
                  });
}

SparseOperator assemble_convection_skew(const Mesh& mesh, const DofMap& dofs, const Vector& w, AssemblyOptions opt) {
  if (w.size() != dofs.n_u)
    throw DimensionError("convection: advecting field has length " + std::to_string(w.size()) + ", expected " +
                         std::to_string(dofs.n_u));
  const auto rule = triangle_rule();
  return assemble(dofs.n_u, dofs.n_u, static_cast<int>(mesh.triangles.size()), opt.threads,
                  [&](int t, std::vector<Triplet>& out) {
                    const auto geo = element_geometry(mesh, t);
                    double e[6][6] = {};
                    for (const auto& q : rule) {
                      const auto N = p2_values(q.bary);
                      const auto G = p2_gradients(q.bary, geo.grad_lambda);
                      double wx = 0.0, wy = 0.0;
                      for (int a = 0; a < 6; ++a) {
                        wx += w[dofs.velocity_dof(t, a, 0)] * N[a];
                        wy += w[dofs.velocity_dof(t, a, 1)] * N[a];
                      }
                      const double s = 0.5 * q.weight * geo.area;
                      for (int b = 0; b < 6; ++b) {
                        const double adv = s * (wx * G[b].x + wy * G[b].y);
                        for (int a = 0; a < 6; ++a) e[a][b] += adv * N[a];
                      }
                    }
                    for (int c = 0; c < 2; ++c)
                      for (int a = 0; a < 6; ++a)
                        for (int b = 0; b < 6; ++b) {
                          if (a == b) continue;
                          out.emplace_back(dofs.velocity_dof(t, a, c), dofs.velocity_dof(t, b, c), e[a][b] - e[b][a]);
                        }
                  });
}

Point2 rotating_body_force(double x, double y, double /*t*/) {
  const double s = 1.0 - x * x - y * y;
  return {-4.0 * y * s, 4.0 * x * s};
}

Vector assemble_forcing(const Mesh& mesh, const DofMap& dofs, const BodyForce& f, double t) {
  Vector F = Vector::Zero(dofs.n_u);
  const auto rule = triangle_rule();
  for (int tri = 0; tri < static_cast<int>(mesh.triangles.size()); ++tri) {
    const auto geo = element_geometry(mesh, tri);
    for (const auto& q : rule) {
      const Point2 x = map_point(mesh, tri, q.bary);
      const Point2 fv = f(x.x, x.y, t);
      const auto N = p2_values(q.bary);
      const double w = q.weight * geo.area;
      for (int a = 0; a < 6; ++a) {
        F[dofs.velocity_dof(tri, a, 0)] += w * fv.x * N[a];
        F[dofs.velocity_dof(tri, a, 1)] += w * fv.y * N[a];
      }
    }
  }
  return F;
}

std::pair<SparseOperator, Vector> apply_dirichlet(const SparseOperator& op, const Vector& rhs, const DofMap& dofs) {
  const auto& mask = dofs.dirichlet_mask;
  const bool square = op.rows() == dofs.n_u && op.cols() == dofs.n_u;
  if (op.cols() != dofs.n_u) throw DimensionError("apply_dirichlet: operator columns must be velocity dofs");
  if (rhs.size() != op.rows()) throw DimensionError("apply_dirichlet: rhs length does not match operator rows");
  std::vector<Triplet> trips;
  trips.reserve(op.nonZeros() + (square ? dofs.n_u : 0));
  for (int c = 0; c < op.outerSize(); ++c)
    for (SparseOperator::InnerIterator it(op, c); it; ++it) {
      if (mask[it.col()]) continue;
      if (square && mask[it.row()]) continue;
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  Vector b = rhs;
  if (square) {
    for (int i = 0; i < dofs.n_u; ++i)
      if (mask[i]) {
        trips.emplace_back(i, i, 1.0);
        b[i] = 0.0;
      }
  }
  SparseOperator out(op.rows(), op.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return {std::move(out), std::move(b)};
}

void zero_dirichlet(Vector& u, const DofMap& dofs) {
  for (int i = 0; i < dofs.n_u; ++i)
    if (dofs.dirichlet_mask[i]) u[i] = 0.0;
}

Discretization Discretization::build(Mesh mesh, AssemblyOptions opt) {
  Discretization d;
  d.dofs = build_dofmap(mesh);
  d.mass = assemble_velocity_mass(mesh, d.dofs, opt);
  d.stiffness = assemble_velocity_stiffness(mesh, d.dofs, opt);
  d.divergence = assemble_divergence(mesh, d.dofs, opt);
  d.pressure_mass = assemble_pressure_mass(mesh, d.dofs, opt);
  d.mesh = std::move(mesh);
  return d;
}

}  // namespace acrom::fem
