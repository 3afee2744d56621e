#pragma once
//
// Artificial-compression ROM. With velocity coordinates a and pressure
// coordinates b, one step reads
//
//   (I/dt + nu K_r + N_r(a0)) a1 - D_r^T b1 = f_r + a0/dt
//   (eps/dt)(b1 - b0) + D_r a1 = 0,     N_r(a)[i][j] = sum_k a_k T[k][i][j].
//

#include <Eigen/Core>
#include <Eigen/LU>
#include <vector>

#include "acrom/energy.hpp"
#include "acrom/fem.hpp"
#include "acrom/offline.hpp"
#include "acrom/pod.hpp"

namespace acrom {

struct ReducedModel {
  int R = 0;
  int M = 0;
  double nu = 0.01;
  double eps = 1e-6;
  Eigen::MatrixXd K_r;  // R x R
  Eigen::MatrixXd D_r;  // M x R, (psi_k, div phi_i)
  /// T[k][i][j] = b*(phi_k, phi_j, phi_i), slice k stored row-major at k*R*R.
  std::vector<double> T;
  Eigen::VectorXd f_r;
  /// Drag and lift as linear functionals of the coordinates.
  Eigen::VectorXd drag_u, drag_p, lift_u, lift_p;
  std::string u_hash, p_hash;

  const double* slice(int k) const { return T.data() + static_cast<std::size_t>(k) * R * R; }
  /// N_r(a) as a dense R x R matrix.
  Eigen::MatrixXd convection(const Eigen::VectorXd& a) const;
};

struct RomBuildOptions {
  ForcingKind forcing = ForcingKind::Rotating;
  /// Include nu on the viscous part of the stress in drag/lift.
  bool stress_includes_nu = false;
  /// Verify mass orthonormality and tensor skew-symmetry after building.
  bool check = true;
};

/// Galerkin projection of the full-order operators. Throws DimensionError
/// when the bases do not match the discretization.
ReducedModel build_reduced_model(const PodBasis& u_basis, const PodBasis& p_basis, const fem::Discretization& disc,
                                 double nu, double eps, const RomBuildOptions& opt = {});

struct RomState {
  Eigen::VectorXd a_u;
  Eigen::VectorXd a_p;
};

/// Initial coordinates by L2 projection of a full-order state.
RomState project_state(const PodBasis& u_basis, const PodBasis& p_basis, const fem::Discretization& disc,
                       const fem::Vector& u, const fem::Vector& p);

enum class RomSolvePath { Eliminated, Monolithic };

RomState ac_rom_step(const RomState& s, const ReducedModel& model, double dt,
                     RomSolvePath path = RomSolvePath::Eliminated);

/// Relative residuals of the coupled equations for a computed step.
struct RomResidual {
  double momentum = 0.0;
  double continuity = 0.0;
};
RomResidual rom_step_residual(const RomState& s0, const RomState& s1, const ReducedModel& model, double dt);

EnergyTerms rom_energy_terms(const ReducedModel& model, const RomState& s0, const RomState& s1, double dt);

/// Repeated stepping with preallocated workspaces.
class RomStepper {
 public:
  RomStepper(const ReducedModel& model, double dt);
  RomState step(const RomState& s);

 private:
  const ReducedModel& model_;
  double dt_;
  Eigen::MatrixXd base_;  // I/dt + nu K_r + (dt/eps) D_r^T D_r
  Eigen::MatrixXd sys_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct RomTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  Eigen::MatrixXd a_u;  // R x (steps + 1)
  Eigen::MatrixXd a_p;  // M x (steps + 1)
  /// Per recorded time.
  std::vector<double> kinetic_energy, drag, lift;
  /// Per step (entry 0 belongs to the initial state and is 0).
  std::vector<double> energy_residual;

  int count() const { return static_cast<int>(times.size()); }
};

/// Steps `steps` times from `a0` at t0. Every state is recorded.
RomTrajectory run_rom(const ReducedModel& model, const RomState& a0, double t0, double dt, std::int64_t steps);

/// Full-order fields of a trajectory column.
fem::Vector reconstruct(const PodBasis& basis, const Eigen::VectorXd& coords);

}  // namespace acrom
