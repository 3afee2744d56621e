#include "acrom/rom.hpp"

#include <cmath>

#include "acrom/diag.hpp"
#include "acrom/error.hpp"
#include "acrom/kernels.hpp"

namespace acrom {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_identity(const Eigen::MatrixXd& G, const char* what) {
  const Eigen::Index n = G.rows();
  const double err = n ? (G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() : 0.0;
  if (err > 1e-10)
    throw InvariantError(std::string("reduced model: ") + what + " deviates from identity by " + std::to_string(err));
}

}  // namespace

Eigen::MatrixXd ReducedModel::convection(const Eigen::VectorXd& a) const {
  RowMatrix out(R, R);
  kernels::weighted_slice_sum({a.data(), static_cast<std::size_t>(a.size())}, T,
                              {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

ReducedModel build_reduced_model(const PodBasis& ub, const PodBasis& pb, const fem::Discretization& disc, double nu,
                                 double eps, const RomBuildOptions& opt) {
  const auto& d = disc.dofs;
  if (ub.field != Field::Velocity || pb.field != Field::Pressure)
    throw DimensionError("reduced model: expected a velocity and a pressure basis");
  if (ub.dofs() != d.n_u || pb.dofs() != d.n_p)
    throw DimensionError("reduced model: bases have " + std::to_string(ub.dofs()) + "/" + std::to_string(pb.dofs()) +
                         " dofs, mesh has " + std::to_string(d.n_u) + "/" + std::to_string(d.n_p));
  const Eigen::MatrixXd& Phi = ub.modes;
  const Eigen::MatrixXd& Psi = pb.modes;
  ReducedModel m;
  m.R = ub.size();
  m.M = pb.size();
  m.nu = nu;
  m.eps = eps;
  m.u_hash = ub.source_hash;
  m.p_hash = pb.source_hash;
  m.K_r = reduced_stiffness(ub, disc.stiffness);
  m.D_r = Psi.transpose() * (disc.divergence * Phi);
  m.f_r = Phi.transpose() * forcing_vector(disc, opt.forcing, 0.0);

  const std::size_t RR = static_cast<std::size_t>(m.R) * m.R;
  m.T.assign(RR * m.R, 0.0);
  for (int k = 0; k < m.R; ++k) {
    const fem::SparseOperator N = fem::assemble_convection_skew(disc.mesh, d, Phi.col(k));
    const Eigen::MatrixXd S = Phi.transpose() * (N * Phi);
    const RowMatrix A = 0.5 * (S - S.transpose());
    std::copy(A.data(), A.data() + RR, m.T.begin() + static_cast<std::ptrdiff_t>(k * RR));
  }

  const auto forces = diag::force_functionals(disc, opt.stress_includes_nu, nu);
  m.drag_u = Phi.transpose() * forces.drag.u_weights;
  m.drag_p = Psi.transpose() * forces.drag.p_weights;
  m.lift_u = Phi.transpose() * forces.lift.u_weights;
  m.lift_p = Psi.transpose() * forces.lift.p_weights;

  if (opt.check) {
    check_identity(Phi.transpose() * (disc.mass * Phi), "velocity mass");
    check_identity(Psi.transpose() * (disc.pressure_mass * Psi), "pressure mass");
  }
  return m;
}

RomState project_state(const PodBasis& ub, const PodBasis& pb, const fem::Discretization& disc, const fem::Vector& u,
                       const fem::Vector& p) {
  return {l2_project(ub, disc.mass, u), l2_project(pb, disc.pressure_mass, p)};
}

RomStepper::RomStepper(const ReducedModel& model, double dt) : model_(model), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("rom: dt must be positive");
  const int R = model.R;
  base_ = Eigen::MatrixXd::Identity(R, R) / dt + model.nu * model.K_r +
          (dt / model.eps) * model.D_r.transpose() * model.D_r;
  sys_.resize(R, R);
}

RomState RomStepper::step(const RomState& s) {
  const auto& m = model_;
  if (s.a_u.size() != m.R || s.a_p.size() != m.M) throw DimensionError("rom step: coordinate sizes do not match");
  RomState out;
  if (m.R == 0) {
    out.a_u.resize(0);
    out.a_p = s.a_p;
    return out;
  }
  sys_ = base_ + m.convection(s.a_u);
  lu_.compute(sys_);
  const Eigen::VectorXd rhs = m.f_r + s.a_u / dt_ + m.D_r.transpose() * s.a_p;
  out.a_u = lu_.solve(rhs);
  out.a_u += lu_.solve(rhs - sys_ * out.a_u);
  if (!out.a_u.allFinite()) throw SolverError("rom step: singular reduced system");
  out.a_p = s.a_p - (dt_ / m.eps) * (m.D_r * out.a_u);
  return out;
}

RomState ac_rom_step(const RomState& s, const ReducedModel& m, double dt, RomSolvePath path) {
  if (path == RomSolvePath::Eliminated) return RomStepper(m, dt).step(s);
  if (s.a_u.size() != m.R || s.a_p.size() != m.M) throw DimensionError("rom step: coordinate sizes do not match");
  const int R = m.R, M = m.M;
  Eigen::MatrixXd S(R + M, R + M);
  S.topLeftCorner(R, R) = Eigen::MatrixXd::Identity(R, R) / dt + m.nu * m.K_r + m.convection(s.a_u);
  S.topRightCorner(R, M) = -m.D_r.transpose();
  S.bottomLeftCorner(M, R) = m.D_r;
  S.bottomRightCorner(M, M) = (m.eps / dt) * Eigen::MatrixXd::Identity(M, M);
  Eigen::VectorXd rhs(R + M);
  rhs << m.f_r + s.a_u / dt, (m.eps / dt) * s.a_p;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
  Eigen::VectorXd x = lu.solve(rhs);
  x += lu.solve(rhs - S * x);
  if (!x.allFinite()) throw SolverError("rom step: singular coupled system");
  return {x.head(R), x.tail(M)};
}

RomResidual rom_step_residual(const RomState& s0, const RomState& s1, const ReducedModel& m, double dt) {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m.R, m.R) / dt + m.nu * m.K_r + m.convection(s0.a_u);
  const Eigen::VectorXd lhs_u = A * s1.a_u - m.D_r.transpose() * s1.a_p;
  const Eigen::VectorXd rhs_u = m.f_r + s0.a_u / dt;
  const Eigen::VectorXd lhs_p = (m.eps / dt) * s1.a_p + m.D_r * s1.a_u;
  const Eigen::VectorXd rhs_p = (m.eps / dt) * s0.a_p;
  RomResidual r;
  const double su = (A * s1.a_u).norm() + (m.D_r.transpose() * s1.a_p).norm() + rhs_u.norm();
  const double sp = ((m.eps / dt) * s1.a_p).norm() + (m.D_r * s1.a_u).norm() + rhs_p.norm();
  r.momentum = su > 0.0 ? (lhs_u - rhs_u).norm() / su : 0.0;
  r.continuity = sp > 0.0 ? (lhs_p - rhs_p).norm() / sp : 0.0;
  return r;
}

EnergyTerms rom_energy_terms(const ReducedModel& m, const RomState& s0, const RomState& s1, double dt) {
  EnergyTerms e;
  e.energy_new = s1.a_u.squaredNorm() + m.eps * s1.a_p.squaredNorm();
  e.energy_old = s0.a_u.squaredNorm() + m.eps * s0.a_p.squaredNorm();
  e.increment = (s1.a_u - s0.a_u).squaredNorm() + m.eps * (s1.a_p - s0.a_p).squaredNorm();
  e.dissipation = 2.0 * dt * m.nu * s1.a_u.dot(m.K_r * s1.a_u);
  e.work = 2.0 * dt * m.f_r.dot(s1.a_u);
  return e;
}

RomTrajectory run_rom(const ReducedModel& m, const RomState& a0, double t0, double dt, std::int64_t steps) {
  if (steps < 0) throw ConfigError("rom: negative step count");
  RomTrajectory tr;
  tr.dt = dt;
  const auto n = static_cast<Eigen::Index>(steps + 1);
  tr.a_u.resize(m.R, n);
  tr.a_p.resize(m.M, n);
  RomStepper stepper(m, dt);
  RomState s = a0;
  const auto record = [&](Eigen::Index k, double residual) {
    tr.times.push_back(t0 + static_cast<double>(k) * dt);
    tr.a_u.col(k) = s.a_u;
    tr.a_p.col(k) = s.a_p;
    tr.kinetic_energy.push_back(0.5 * s.a_u.squaredNorm());
    tr.drag.push_back(m.drag_u.dot(s.a_u) + m.drag_p.dot(s.a_p));
    tr.lift.push_back(m.lift_u.dot(s.a_u) + m.lift_p.dot(s.a_p));
    tr.energy_residual.push_back(residual);
  };
  record(0, 0.0);
  for (Eigen::Index k = 1; k < n; ++k) {
    RomState next = stepper.step(s);
    const double res = rom_energy_terms(m, s, next, dt).relative_residual();
    s = std::move(next);
    record(k, res);
  }
  return tr;
}

fem::Vector reconstruct(const PodBasis& basis, const Eigen::VectorXd& coords) {
  if (coords.size() != basis.size()) throw DimensionError("reconstruct: coordinate count does not match basis");
  return basis.modes * coords;
}

}  // namespace acrom
