#include "acrom/diag.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "acrom/error.hpp"

namespace acrom::diag {

using fem::SparseOperator;
using fem::Vector;

double kinetic_energy(const fem::Discretization& disc, const Vector& u) {
  if (u.size() != disc.dofs.n_u) throw DimensionError("kinetic_energy: velocity length mismatch");
  return 0.5 * u.dot(disc.mass * u);
}

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Triangle owning an inner boundary edge, with the local indices of its ends.
struct EdgeOwner {
  int tri;
  int la, lb, lc;  // local vertex of each end, and the opposite vertex
};

std::vector<std::pair<BoundaryEdge, EdgeOwner>> inner_edges_with_owners(const Mesh& mesh) {
  const auto loop = inner_boundary_edges(mesh);
  std::unordered_map<std::uint64_t, int> owner;
  owner.reserve(3 * mesh.triangles.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) owner[edge_key(tr[e], tr[(e + 1) % 3])] = t;
  }
  std::vector<std::pair<BoundaryEdge, EdgeOwner>> out;
  out.reserve(loop.size());
  for (const auto& be : loop) {
    auto it = owner.find(edge_key(be.v[0], be.v[1]));
    if (it == owner.end()) throw TopologyError("inner boundary edge is not a mesh edge");
    const auto& tr = mesh.triangles[it->second];
    EdgeOwner o{it->second, -1, -1, -1};
    for (int i = 0; i < 3; ++i) {
      if (tr[i] == be.v[0]) o.la = i;
      else if (tr[i] == be.v[1]) o.lb = i;
      else o.lc = i;
    }
    out.push_back({be, o});
  }
  return out;
}

// Unit normal of the segment a-b pointing away from c.
Point2 outward_normal(const Point2& a, const Point2& b, const Point2& c) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double L = std::hypot(dx, dy);
  Point2 n{dy / L, -dx / L};
  if ((c.x - a.x) * n.x + (c.y - a.y) * n.y > 0.0) n = {-n.x, -n.y};
  return n;
}

}  // namespace

ForceFunctionals force_functionals(const fem::Discretization& disc, bool include_nu, double nu) {
  const auto& mesh = disc.mesh;
  const auto& d = disc.dofs;
  const double visc = include_nu ? nu : 1.0;
  ForceFunctionals f;
  f.drag.u_weights = Vector::Zero(d.n_u);
  f.lift.u_weights = Vector::Zero(d.n_u);
  f.drag.p_weights = Vector::Zero(d.n_p);
  f.lift.p_weights = Vector::Zero(d.n_p);
  for (const auto& [be, o] : inner_edges_with_owners(mesh)) {
    const auto& tr = mesh.triangles[o.tri];
    const Point2& a = mesh.vertices[tr[o.la]];
    const Point2& b = mesh.vertices[tr[o.lb]];
    const Point2 n = outward_normal(a, b, mesh.vertices[tr[o.lc]]);
    const double L = std::hypot(b.x - a.x, b.y - a.y);
    const auto geo = fem::element_geometry(mesh, o.tri);
    for (const auto& [s, w] : fem::edge_rule()) {
      std::array<double, 3> bary{0.0, 0.0, 0.0};
      bary[o.la] = 1.0 - s;
      bary[o.lb] = s;
      const auto G = fem::p2_gradients(bary, geo.grad_lambda);
      const double ws = w * L;
      for (int k = 0; k < 6; ++k) {
        const double gn = G[k].x * n.x + G[k].y * n.y;
        for (int c = 0; c < 2; ++c) {
          const double nc = c == 0 ? n.x : n.y;
          // (grad u + grad u^T) n for u = N_k e_c.
          const double tx = (c == 0 ? gn : 0.0) + G[k].x * nc;
          const double ty = (c == 1 ? gn : 0.0) + G[k].y * nc;
          const int v = d.velocity_dof(o.tri, k, c);
          f.drag.u_weights[v] -= ws * visc * ty;
          f.lift.u_weights[v] += ws * visc * tx;
        }
      }
      for (int i = 0; i < 3; ++i) {
        const int q = d.pressure_dof(o.tri, i);
        f.drag.p_weights[q] += ws * bary[i] * n.y;
        f.lift.p_weights[q] -= ws * bary[i] * n.x;
      }
    }
  }
  return f;
}

DragLift drag_lift(const fem::Discretization& disc, const Vector& u, const Vector& p, bool include_nu, double nu) {
  if (u.size() != disc.dofs.n_u || p.size() != disc.dofs.n_p) throw DimensionError("drag_lift: field size mismatch");
  const auto f = force_functionals(disc, include_nu, nu);
  return {f.drag(u, p), f.lift(u, p)};
}

Point2 inner_normal_sum(const Mesh& mesh) {
  Point2 sum{0.0, 0.0};
  for (const auto& [be, o] : inner_edges_with_owners(mesh)) {
    const auto& tr = mesh.triangles[o.tri];
    const Point2& a = mesh.vertices[tr[o.la]];
    const Point2& b = mesh.vertices[tr[o.lb]];
    const Point2 n = outward_normal(a, b, mesh.vertices[tr[o.lc]]);
    const double L = std::hypot(b.x - a.x, b.y - a.y);
    sum.x += n.x * L;
    sum.y += n.y * L;
  }
  return sum;
}

Eigen::MatrixXd divergence_fields(const fem::Discretization& disc, const Eigen::MatrixXd& U) {
  if (U.rows() != disc.dofs.n_u) throw DimensionError("divergence_field: velocity length mismatch");
  Eigen::SimplicialLLT<SparseOperator> llt(disc.pressure_mass);
  if (llt.info() != Eigen::Success) throw SolverError("divergence_field: pressure mass factorization failed");
  const Eigen::MatrixXd BU = disc.divergence * U;
  return llt.solve(BU);
}

Vector divergence_field(const fem::Discretization& disc, const Vector& u) {
  return divergence_fields(disc, Eigen::MatrixXd(u)).col(0);
}

namespace {

void finish_report(EnergyReport& r, double e0, const std::vector<double>& dual_terms, double nu, double dt) {
  double inc = 0.0, diss = 0.0, rhs_sum = 0.0;
  for (std::size_t n = 0; n < r.terms.size(); ++n) {
    const auto& t = r.terms[n];
    r.residual.push_back(t.relative_residual());
    r.max_residual = std::max(r.max_residual, r.residual.back());
    inc += t.increment;
    diss += 0.5 * t.dissipation;  // nu dt |grad u|^2
    rhs_sum += (dt / nu) * dual_terms[n];
    const double slack = e0 + rhs_sum - (t.energy_new + inc + diss);
    r.inequality_slack.push_back(slack);
    // Allow for roundoff in the accumulated sums.
    if (slack < -1e-12 * (e0 + rhs_sum + t.energy_new + inc + diss)) r.inequality_holds = false;
  }
}

}  // namespace

EnergyReport energy_balance(const ReducedModel& m, const RomTrajectory& traj) {
  EnergyReport r;
  if (traj.count() == 0) return r;
  if (traj.a_u.rows() != m.R || traj.a_p.rows() != m.M) throw DimensionError("energy_balance: trajectory/model mismatch");
  double dual = 0.0;
  if (m.R > 0 && m.f_r.squaredNorm() > 0.0) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(m.K_r);
    dual = m.f_r.dot(ldlt.solve(m.f_r));
  }
  std::vector<double> duals;
  for (int n = 1; n < traj.count(); ++n) {
    const RomState s0{traj.a_u.col(n - 1), traj.a_p.col(n - 1)};
    const RomState s1{traj.a_u.col(n), traj.a_p.col(n)};
    r.terms.push_back(rom_energy_terms(m, s0, s1, traj.dt));
    duals.push_back(dual);
  }
  const double e0 = traj.a_u.col(0).squaredNorm() + m.eps * traj.a_p.col(0).squaredNorm();
  finish_report(r, e0, duals, m.nu, traj.dt);
  return r;
}

double discrete_dual_norm_sq(const fem::Discretization& disc, const Vector& F) {
  if (F.squaredNorm() == 0.0) return 0.0;
  auto [K, rhs] = fem::apply_dirichlet(disc.stiffness, F, disc.dofs);
  Eigen::SimplicialLDLT<SparseOperator> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw SolverError("dual norm: stiffness factorization failed");
  return rhs.dot(ldlt.solve(rhs));
}

EnergyReport energy_balance(const fem::Discretization& disc, const std::vector<FlowState>& states, const Vector& F,
                            double nu, double eps, double dt) {
  EnergyReport r;
  if (states.size() < 2) return r;
  const double dual = discrete_dual_norm_sq(disc, F);
  std::vector<double> duals;
  for (std::size_t n = 1; n < states.size(); ++n) {
    r.terms.push_back(full_order_energy_terms(disc, states[n - 1], states[n], F, nu, eps, dt));
    duals.push_back(dual);
  }
  const auto& s0 = states.front();
  const double e0 = s0.u.dot(disc.mass * s0.u) + eps * s0.p.dot(disc.pressure_mass * s0.p);
  finish_report(r, e0, duals, nu, dt);
  return r;
}

RelativeError l2L2_relative_error(const std::vector<double>& ta, const Eigen::MatrixXd& a,
                                  const std::vector<double>& tb, const Eigen::MatrixXd& b, const SparseOperator* W) {
  if (static_cast<Eigen::Index>(ta.size()) != a.cols() || static_cast<Eigen::Index>(tb.size()) != b.cols())
    throw DimensionError("l2L2 error: time list length does not match columns");
  if (a.rows() != b.rows()) throw DimensionError("l2L2 error: fields have different lengths");
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < ta.size(); ++n) {
    const double t = ta[n];
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(tb.begin(), tb.end(), t - tol);
    if (it == tb.end() || std::abs(*it - t) > tol)
      throw InvariantError("l2L2 error: time " + std::to_string(t) + " is not on the reference grid");
    const Eigen::Index k = it - tb.begin();
    const Vector e = a.col(static_cast<Eigen::Index>(n)) - b.col(k);
    const Vector r = b.col(k);
    if (W) {
      num += e.dot(*W * e);
      den += r.dot(*W * r);
    } else {
      num += e.squaredNorm();
      den += r.squaredNorm();
    }
  }
  if (den == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {std::sqrt(num / den), false};
}

std::optional<double> fit_order(const std::vector<double>& dts, const std::vector<double>& errors) {
  if (dts.size() != errors.size() || dts.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(errors[i])) return std::nullopt;
    const double x = std::log(dts[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

}  // namespace acrom::diag
