#include "acrom/offline.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>

#include "acrom/error.hpp"
#include "acrom/formats.hpp"

namespace acrom {

using fem::SparseOperator;
using fem::Vector;

void OfflineConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("offline: dt must be positive (got " + std::to_string(dt) + ")");
  if (!(eps > 0.0)) throw ConfigError("offline: eps must be positive (got " + std::to_string(eps) + ")");
  if (!(nu > 0.0)) throw ConfigError("offline: nu must be positive (got " + std::to_string(nu) + ")");
  if (!(t_end > t_start)) throw ConfigError("offline: t_end must exceed t_start");
  if (snapshot_every < 1) throw ConfigError("offline: snapshot_every must be at least 1");
  if (checkpoint_every < 0) throw ConfigError("offline: checkpoint_every must be non-negative");
  if (initial_state == InitialState::FromFile && initial_path.empty())
    throw ConfigError("offline: initial_state = file needs initial_path");
  step_count();
}

std::int64_t OfflineConfig::step_count() const {
  const double span = (t_end - t_start) / dt;
  const auto n = static_cast<std::int64_t>(std::llround(span));
  if (n < 1 || std::abs(span - static_cast<double>(n)) > 1e-6)
    throw ConfigError("offline: window [" + std::to_string(t_start) + ", " + std::to_string(t_end) +
                      "] is not a whole number of steps of dt=" + std::to_string(dt));
  return n;
}

double pressure_mean(const fem::Discretization& disc, const Vector& p) {
  const Vector ones = Vector::Ones(disc.dofs.n_p);
  const double area = ones.dot(disc.pressure_mass * ones);
  return ones.dot(disc.pressure_mass * p) / area;
}

void subtract_pressure_mean(const fem::Discretization& disc, Vector& p) {
  p.array() -= pressure_mean(disc, p);
}

Vector forcing_vector(const fem::Discretization& disc, ForcingKind kind, double t) {
  if (kind == ForcingKind::None) return Vector::Zero(disc.dofs.n_u);
  Vector F = fem::assemble_forcing(disc.mesh, disc.dofs, fem::rotating_body_force, t);
  fem::zero_dirichlet(F, disc.dofs);
  return F;
}

EnergyTerms full_order_energy_terms(const fem::Discretization& disc, const FlowState& s0, const FlowState& s1,
                                    const Vector& F, double nu, double eps, double dt) {
  const auto& M = disc.mass;
  const auto& Mp = disc.pressure_mass;
  const Vector du = s1.u - s0.u;
  const Vector dp = s1.p - s0.p;
  EnergyTerms e;
  e.energy_new = s1.u.dot(M * s1.u) + eps * s1.p.dot(Mp * s1.p);
  e.energy_old = s0.u.dot(M * s0.u) + eps * s0.p.dot(Mp * s0.p);
  e.increment = du.dot(M * du) + eps * dp.dot(Mp * dp);
  e.dissipation = 2.0 * dt * nu * s1.u.dot(disc.stiffness * s1.u);
  e.work = 2.0 * dt * F.dot(s1.u);
  return e;
}

namespace {

using Triplet = Eigen::Triplet<double>;

SparseOperator block_system(const SparseOperator& A, const SparseOperator& B, const SparseOperator& Mp, double c) {
  const int nu = static_cast<int>(A.rows());
  const int np = static_cast<int>(Mp.rows());
  std::vector<Triplet> t;
  t.reserve(A.nonZeros() + 2 * B.nonZeros() + Mp.nonZeros());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(A, k); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(B, k); it; ++it) {
      t.emplace_back(nu + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      t.emplace_back(static_cast<int>(it.col()), nu + static_cast<int>(it.row()), -it.value());
    }
  for (int k = 0; k < Mp.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(Mp, k); it; ++it)
      t.emplace_back(nu + static_cast<int>(it.row()), nu + static_cast<int>(it.col()), c * it.value());
  SparseOperator S(nu + np, nu + np);
  S.setFromTriplets(t.begin(), t.end());
  S.makeCompressed();
  return S;
}

}  // namespace

CoupledSolution solve_coupled_system(const CoupledBlocks& b, const Vector& ru, const Vector& rp, SolvePath path) {
  const int nu = static_cast<int>(b.A.rows());
  const int np = static_cast<int>(b.Mp.rows());
  if (b.A.cols() != nu || b.B.rows() != np || b.B.cols() != nu || ru.size() != nu || rp.size() != np)
    throw DimensionError("solve_coupled_system: block dimensions disagree");
  const double c = b.eps / b.dt;
  CoupledSolution out;
  if (path == SolvePath::Monolithic) {
    const SparseOperator S = block_system(b.A, b.B, b.Mp, c);
    Vector rhs(nu + np);
    rhs << ru, rp;
    fem::SparseLu lu;
    lu.factorize(S);
    const Vector x = lu.solve_refined(S, rhs, 1);
    out.u = x.head(nu);
    out.p = x.tail(np);
    return out;
  }
  const Eigen::MatrixXd Mp = Eigen::MatrixXd(b.Mp);
  const Eigen::LLT<Eigen::MatrixXd> mp(Mp);
  if (mp.info() != Eigen::Success) throw SolverError("solve_coupled_system: pressure mass is not SPD");
  const Eigen::MatrixXd Bd = Eigen::MatrixXd(b.B);
  const Eigen::MatrixXd schur = Eigen::MatrixXd(b.A) + (1.0 / c) * Bd.transpose() * mp.solve(Bd);
  const Vector rhs = ru + (1.0 / c) * Bd.transpose() * mp.solve(rp);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(schur);
  out.u = lu.solve(rhs);
  out.u += lu.solve(rhs - schur * out.u);
  out.p = (1.0 / c) * mp.solve(rp - Bd * out.u);
  if (!out.u.allFinite() || !out.p.allFinite()) throw SolverError("solve_coupled_system: eliminated solve failed");
  return out;
}

FlowState ac_fem_step(const fem::Discretization& disc, const FlowState& s, const OfflineConfig& cfg, SolvePath path) {
  const auto& d = disc.dofs;
  if (s.u.size() != d.n_u || s.p.size() != d.n_p) throw DimensionError("ac_fem_step: state size mismatch");
  const SparseOperator N = fem::assemble_convection_skew(disc.mesh, d, s.u);
  const SparseOperator A0 = (1.0 / cfg.dt) * disc.mass + cfg.nu * disc.stiffness + N;
  const Vector F = forcing_vector(disc, cfg.forcing, s.t + cfg.dt);
  const Vector ru0 = F + (1.0 / cfg.dt) * (disc.mass * s.u);
  auto [A, ru] = fem::apply_dirichlet(A0, ru0, d);
  auto [B, unused] = fem::apply_dirichlet(disc.divergence, Vector::Zero(d.n_p), d);
  (void)unused;
  const Vector rp = (cfg.eps / cfg.dt) * (disc.pressure_mass * s.p);
  auto sol = solve_coupled_system({A, B, disc.pressure_mass, cfg.eps, cfg.dt}, ru, rp, path);
  subtract_pressure_mean(disc, sol.p);
  return {s.t + cfg.dt, std::move(sol.u), std::move(sol.p)};
}

// The stepper keeps the block matrix with a fixed pattern containing every
// same-component element coupling; each step refills the values from the
// static part and adds the convection entries through precomputed slots.
struct AcFemStepper::Impl {
  SparseOperator S;
  std::vector<double> base;
  /// Per triangle, 2 x 6 x 6 positions into S's value array (-1 if unused).
  std::vector<int> slots;
  std::vector<fem::ElementGeometry> geo;
  /// Shape values and barycentric derivatives at the quadrature points.
  std::vector<std::array<double, 6>> N;
  std::vector<std::array<std::array<double, 3>, 6>> dN;
  std::vector<double> qw;
  fem::SparseLu lu;
  int n_u = 0, n_p = 0;
};

namespace {

int find_slot(const SparseOperator& S, int row, int col) {
  const int* inner = S.innerIndexPtr();
  const int lo = S.outerIndexPtr()[col], hi = S.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(inner + lo, inner + hi, row);
  if (it == inner + hi || *it != row) throw InvariantError("stepper: convection entry missing from pattern");
  return static_cast<int>(it - inner);
}

}  // namespace

AcFemStepper::AcFemStepper(const fem::Discretization& disc, const OfflineConfig& cfg)
    : impl_(std::make_unique<Impl>()), disc_(disc), cfg_(cfg) {
  cfg_.validate();
  const auto& d = disc.dofs;
  auto& im = *impl_;
  im.n_u = d.n_u;
  im.n_p = d.n_p;
  const int nt = static_cast<int>(disc.mesh.triangles.size());

  SparseOperator vv = (1.0 / cfg.dt) * disc.mass + cfg.nu * disc.stiffness;
  std::vector<Triplet> t;
  t.reserve(vv.nonZeros() + 72 * static_cast<std::size_t>(nt) + 2 * disc.divergence.nonZeros() +
            disc.pressure_mass.nonZeros());
  for (int k = 0; k < vv.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(vv, k); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int tri = 0; tri < nt; ++tri)
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) t.emplace_back(d.velocity_dof(tri, a, c), d.velocity_dof(tri, b, c), 0.0);
  for (int k = 0; k < disc.divergence.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(disc.divergence, k); it; ++it) {
      t.emplace_back(d.n_u + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      t.emplace_back(static_cast<int>(it.col()), d.n_u + static_cast<int>(it.row()), -it.value());
    }
  const double c = cfg.eps / cfg.dt;
  for (int k = 0; k < disc.pressure_mass.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(disc.pressure_mass, k); it; ++it)
      t.emplace_back(d.n_u + static_cast<int>(it.row()), d.n_u + static_cast<int>(it.col()), c * it.value());
  im.S.resize(d.n_u + d.n_p, d.n_u + d.n_p);
  im.S.setFromTriplets(t.begin(), t.end());
  im.S.makeCompressed();

  // Symmetric elimination of the Dirichlet velocity dofs, keeping the pattern.
  const auto dirichlet = [&](int i) { return i < d.n_u && d.dirichlet_mask[i]; };
  for (int k = 0; k < im.S.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(im.S, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (dirichlet(r) || dirichlet(k)) it.valueRef() = (r == k) ? 1.0 : 0.0;
    }
  im.base.assign(im.S.valuePtr(), im.S.valuePtr() + im.S.nonZeros());

  im.slots.assign(72 * static_cast<std::size_t>(nt), -1);
  im.geo.resize(nt);
  for (int tri = 0; tri < nt; ++tri) {
    im.geo[tri] = fem::element_geometry(disc.mesh, tri);
    for (int cc = 0; cc < 2; ++cc)
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          const int r = d.velocity_dof(tri, a, cc), col = d.velocity_dof(tri, b, cc);
          if (a == b || dirichlet(r) || dirichlet(col)) continue;
          im.slots[72 * static_cast<std::size_t>(tri) + 36 * cc + 6 * a + b] = find_slot(im.S, r, col);
        }
  }

  for (const auto& q : fem::triangle_rule()) {
    const auto& l = q.bary;
    im.N.push_back(fem::p2_values(l));
    std::array<std::array<double, 3>, 6> g{};
    for (int i = 0; i < 3; ++i) g[i][i] = 4.0 * l[i] - 1.0;
    const int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (int k = 0; k < 3; ++k) {
      g[3 + k][e[k][0]] = 4.0 * l[e[k][1]];
      g[3 + k][e[k][1]] = 4.0 * l[e[k][0]];
    }
    im.dN.push_back(g);
    im.qw.push_back(q.weight);
  }

  im.lu.analyze(im.S);
  F_ = forcing_vector(disc, cfg.forcing, cfg.t_start);
}

AcFemStepper::~AcFemStepper() = default;
AcFemStepper::AcFemStepper(AcFemStepper&&) noexcept = default;

FlowState AcFemStepper::step(const FlowState& s) {
  auto& im = *impl_;
  const auto& d = disc_.dofs;
  if (s.u.size() != im.n_u || s.p.size() != im.n_p) throw DimensionError("stepper: state size mismatch");
  double* val = im.S.valuePtr();
  std::copy(im.base.begin(), im.base.end(), val);

  const int nt = static_cast<int>(im.geo.size());
  const int nq = static_cast<int>(im.qw.size());
  for (int tri = 0; tri < nt; ++tri) {
    const auto& geo = im.geo[tri];
    double wx[6], wy[6];
    for (int a = 0; a < 6; ++a) {
      wx[a] = s.u[d.velocity_dof(tri, a, 0)];
      wy[a] = s.u[d.velocity_dof(tri, a, 1)];
    }
    double e[6][6] = {};
    for (int q = 0; q < nq; ++q) {
      const auto& N = im.N[q];
      double qx = 0.0, qy = 0.0;
      for (int a = 0; a < 6; ++a) {
        qx += wx[a] * N[a];
        qy += wy[a] * N[a];
      }
      const double sc = 0.5 * im.qw[q] * geo.area;
      for (int b = 0; b < 6; ++b) {
        const auto& g = im.dN[q][b];
        const double gx = g[0] * geo.grad_lambda[0].x + g[1] * geo.grad_lambda[1].x + g[2] * geo.grad_lambda[2].x;
        const double gy = g[0] * geo.grad_lambda[0].y + g[1] * geo.grad_lambda[1].y + g[2] * geo.grad_lambda[2].y;
        const double adv = sc * (qx * gx + qy * gy);
        for (int a = 0; a < 6; ++a) e[a][b] += adv * N[a];
      }
    }
    const int* slot = im.slots.data() + 72 * static_cast<std::size_t>(tri);
    for (int c = 0; c < 2; ++c)
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          const int k = slot[36 * c + 6 * a + b];
          if (k >= 0) val[k] += e[a][b] - e[b][a];
        }
  }

  try {
    im.lu.factorize(im.S);
  } catch (const SolverError& err) {
    throw SolverError(std::string(err.what()) + " at t=" + std::to_string(s.t + cfg_.dt), s.t);
  }
  Vector rhs(im.n_u + im.n_p);
  rhs.head(im.n_u) = F_ + (1.0 / cfg_.dt) * (disc_.mass * s.u);
  for (int i = 0; i < im.n_u; ++i)
    if (d.dirichlet_mask[i]) rhs[i] = 0.0;
  rhs.tail(im.n_p) = (cfg_.eps / cfg_.dt) * (disc_.pressure_mass * s.p);
  Vector x = im.lu.solve_refined(im.S, rhs, 1);
  if (!x.allFinite()) throw SolverError("stepper: non-finite solution at t=" + std::to_string(s.t + cfg_.dt), s.t);

  const Vector Sx = im.S * x;
  const Vector r = rhs - Sx;
  last_.momentum_residual = r.head(im.n_u).norm() / std::max(rhs.head(im.n_u).norm() + Sx.head(im.n_u).norm(), 1e-300);
  last_.continuity_residual =
      r.tail(im.n_p).norm() / std::max(rhs.tail(im.n_p).norm() + Sx.tail(im.n_p).norm(), 1e-300);

  FlowState out{s.t + cfg_.dt, x.head(im.n_u), x.tail(im.n_p)};
  subtract_pressure_mean(disc_, out.p);
  last_.energy = full_order_energy_terms(disc_, s, out, F_, cfg_.nu, cfg_.eps, cfg_.dt);
  return out;
}

FlowState initial_flow_state(const OfflineConfig& cfg, const fem::Discretization& disc) {
  const auto& d = disc.dofs;
  if (cfg.initial_state == InitialState::Rest) return {cfg.t_start, Vector::Zero(d.n_u), Vector::Zero(d.n_p)};
  const auto header = io::read_artifact_header(cfg.initial_path);
  FlowState s;
  double t_file = 0.0;
  if (header.kind == io::ArtifactKind::Checkpoint) {
    auto c = io::load_checkpoint(cfg.initial_path);
    s = std::move(c.state);
    t_file = s.t;
  } else if (header.kind == io::ArtifactKind::Snapshots) {
    const auto snaps = io::load_snapshots(cfg.initial_path);
    if (snaps.count() == 0) throw ConfigError("initial state file " + cfg.initial_path.string() + " is empty");
    s.u = snaps.U.col(snaps.count() - 1);
    s.p = snaps.P.col(snaps.count() - 1);
    t_file = snaps.times.back();
  } else {
    throw ConfigError("initial state file " + cfg.initial_path.string() + " holds a " + io::kind_name(header.kind) +
                      " artifact, expected snapshots or checkpoint");
  }
  if (s.u.size() != d.n_u || s.p.size() != d.n_p)
    throw DimensionError("initial state file " + cfg.initial_path.string() + " does not match the mesh");
  if (std::abs(t_file - cfg.t_start) > 1e-9 * std::max(1.0, std::abs(cfg.t_start)))
    throw ConfigError("initial state file ends at t=" + std::to_string(t_file) + " but t_start=" +
                      std::to_string(cfg.t_start));
  s.t = cfg.t_start;
  return s;
}

namespace {

struct SnapshotAccumulator {
  std::vector<double> times;
  std::vector<Vector> U, P;

  void add(double t, const FlowState& s) {
    times.push_back(t);
    U.push_back(s.u);
    P.push_back(s.p);
  }

  void load(const SnapshotSet& set) {
    times = set.times;
    for (int k = 0; k < set.count(); ++k) {
      U.emplace_back(set.U.col(k));
      P.emplace_back(set.P.col(k));
    }
  }

  void store(SnapshotSet& set, int n_u, int n_p) const {
    set.times = times;
    set.U.resize(n_u, static_cast<Eigen::Index>(U.size()));
    set.P.resize(n_p, static_cast<Eigen::Index>(P.size()));
    for (std::size_t k = 0; k < U.size(); ++k) {
      set.U.col(static_cast<Eigen::Index>(k)) = U[k];
      set.P.col(static_cast<Eigen::Index>(k)) = P[k];
    }
  }
};

}  // namespace

SnapshotSet run_offline(const OfflineConfig& cfg, const fem::Discretization& disc, const OfflineRunOptions& opt) {
  cfg.validate();
  const auto& d = disc.dofs;
  const std::int64_t total = cfg.step_count();
  const double snap_from = cfg.snapshot_from.value_or(cfg.t_start);
  const auto wants_snapshot = [&](std::int64_t n) {
    return n % cfg.snapshot_every == 0 && cfg.time_at(n) >= snap_from - 1e-9 * cfg.dt;
  };

  SnapshotSet out;
  out.config = cfg;
  out.mesh_hash = io::mesh_hash(disc.mesh);
  SnapshotAccumulator acc;
  FlowState s;
  std::int64_t n = 0;

  const bool checkpointing = cfg.checkpoint_every > 0 && !opt.checkpoint_path.empty();
  if (opt.resume && !opt.checkpoint_path.empty() && std::filesystem::exists(opt.checkpoint_path)) {
    Checkpoint c = io::load_checkpoint(opt.checkpoint_path);
    if (io::config_to_json(c.partial.config) != io::config_to_json(cfg))
      throw ConfigError("checkpoint " + opt.checkpoint_path.string() + " was written for a different configuration");
    if (c.partial.mesh_hash != out.mesh_hash)
      throw ConfigError("checkpoint " + opt.checkpoint_path.string() + " was written for a different mesh");
    n = c.step;
    s = std::move(c.state);
    acc.load(c.partial);
    out.step_times = std::move(c.partial.step_times);
    out.step_energy = std::move(c.partial.step_energy);
    out.step_residual = std::move(c.partial.step_residual);
  } else {
    s = initial_flow_state(cfg, disc);
    if (wants_snapshot(0)) acc.add(cfg.time_at(0), s);
  }

  const auto write_checkpoint = [&]() {
    Checkpoint c;
    c.step = n;
    c.state = s;
    c.partial = out;
    acc.store(c.partial, d.n_u, d.n_p);
    io::save_checkpoint(opt.checkpoint_path, c);
  };

  AcFemStepper stepper(disc, cfg);
  std::int64_t taken = 0;
  while (n < total) {
    FlowState next;
    try {
      next = stepper.step(s);
    } catch (const SolverError& err) {
      throw SolverError(err.what(), s.t);
    }
    ++n;
    ++taken;
    next.t = cfg.time_at(n);
    s = std::move(next);
    out.step_times.push_back(s.t);
    out.step_energy.push_back(stepper.last().energy.energy_new);
    out.step_residual.push_back(stepper.last().energy.relative_residual());
    if (wants_snapshot(n)) acc.add(s.t, s);
    if (opt.progress) opt.progress(n, total, s.t);
    if (checkpointing && n % cfg.checkpoint_every == 0) write_checkpoint();
    if (opt.max_steps > 0 && taken >= opt.max_steps && n < total) {
      if (!opt.checkpoint_path.empty()) write_checkpoint();
      break;
    }
  }
  acc.store(out, d.n_u, d.n_p);
  return out;
}

}  // namespace acrom
