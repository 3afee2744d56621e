#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "acrom/fem.hpp"
#include "acrom/pod.hpp"
#include "acrom/rom.hpp"

namespace acrom::diag {

/// 1/2 u^T M u.
double kinetic_energy(const fem::Discretization& disc, const fem::Vector& u);

/// Drag and lift as linear functionals: value = u_weights . u + p_weights . p.
struct ForceFunctional {
  fem::Vector u_weights;
  fem::Vector p_weights;
  double operator()(const fem::Vector& u, const fem::Vector& p) const { return u_weights.dot(u) + p_weights.dot(p); }
};

struct ForceFunctionals {
  ForceFunctional drag;
  ForceFunctional lift;
};

/// Line integrals over the inner cylinder of the traction tau n, with
/// tau = (grad u + grad u^T) - p I (or nu (grad u + grad u^T) - p I) and n
/// the outward normal of the fluid domain:
///   drag = -int tau n . e2 ds,  lift = int tau n . e1 ds.
/// Velocity gradients are traced from the triangle owning each edge.
ForceFunctionals force_functionals(const fem::Discretization& disc, bool include_nu = false, double nu = 1.0);

struct DragLift {
  double drag = 0.0;
  double lift = 0.0;
};
DragLift drag_lift(const fem::Discretization& disc, const fem::Vector& u, const fem::Vector& p,
                   bool include_nu = false, double nu = 1.0);

/// Sum of the outward normals times edge lengths over the inner loop.
Point2 inner_normal_sum(const Mesh& mesh);

/// Mp-projection of div u onto P1: Mp^{-1} B u.
fem::Vector divergence_field(const fem::Discretization& disc, const fem::Vector& u);
/// Same for many columns.
Eigen::MatrixXd divergence_fields(const fem::Discretization& disc, const Eigen::MatrixXd& U);

/// Per-step energy accounting of a ROM trajectory.
struct EnergyReport {
  std::vector<double> residual;   // per step, relative
  std::vector<EnergyTerms> terms; // per step
  double max_residual = 0.0;
  /// Cumulative inequality
  ///   |u^n|^2 + eps|p^n|^2 + sum (increments) + nu dt sum |grad u|^2
  ///     <= |u^0|^2 + eps|p^0|^2 + (dt/nu) sum |f|_{-1}^2
  /// checked after every step; `inequality_slack` holds rhs - lhs.
  std::vector<double> inequality_slack;
  bool inequality_holds = true;
};

EnergyReport energy_balance(const ReducedModel& model, const RomTrajectory& traj);

/// Full-order version over a list of consecutive states; `dual_norm_sq` is |f|_{-1}^2.
EnergyReport energy_balance(const fem::Discretization& disc, const std::vector<FlowState>& states,
                            const fem::Vector& F, double nu, double eps, double dt);
/// F^T K_0^{-1} F with K_0 the stiffness restricted to the free dofs.
double discrete_dual_norm_sq(const fem::Discretization& disc, const fem::Vector& F);

struct PrincipalAngleResult {
  /// Singular values of the cross-Gram matrix, descending.
  Eigen::VectorXd singular_values;
  double alpha = 0.0;
  double theta1 = 0.0;
  /// Numerical rank of the first subspace after orthonormalization.
  int rank_x = 0;
};

/// First principal angle between span(X) and span(Q) in the W inner product.
/// X is orthonormalized by modified Gram-Schmidt with rank detection; Q is
/// assumed W-orthonormal.
PrincipalAngleResult first_principal_angle(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q,
                                           const fem::SparseOperator& W);
/// Dense-weight variant for small test problems.
PrincipalAngleResult first_principal_angle(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q,
                                           const Eigen::MatrixXd& W);

struct AngleReport {
  int R = 0;
  int M = 0;
  double alpha = 0.0;
  double theta1 = 0.0;
  Eigen::VectorXd singular_values;
  double infsup_beta = 0.0;
  /// Dimension of span{div phi_i}; less than R when rank deficient.
  int divergence_rank = 0;
};

/// alpha = cos theta1 between span{div phi_i} (P1-projected) and the pressure
/// modes, plus the inf-sup constant of the same pair.
AngleReport principal_angle(const PodBasis& u_basis, const PodBasis& p_basis, const fem::Discretization& disc);

/// Smallest singular value of G L^{-T} with S = L L^T; 0 when M > R.
double infsup_from_reduced(const Eigen::MatrixXd& G, const Eigen::MatrixXd& S);
double infsup_constant(const PodBasis& u_basis, const PodBasis& p_basis, const fem::Discretization& disc);

struct RelativeError {
  double value = 0.0;
  /// Reference norm was zero; value is +inf by convention.
  bool degenerate = false;
};

/// sqrt(sum dt |a - b|_W^2) / sqrt(sum dt |b|_W^2) over the times of `a`.
/// Every time of `a` must appear in `b` (within 1e-9 of the step).
/// Columns hold the fields; W may be null for the Euclidean norm.
RelativeError l2L2_relative_error(const std::vector<double>& times_a, const Eigen::MatrixXd& a,
                                  const std::vector<double>& times_b, const Eigen::MatrixXd& b,
                                  const fem::SparseOperator* W);

/// Least-squares slope of log(error) against log(dt); nullopt for fewer than
/// two points or non-positive data.
std::optional<double> fit_order(const std::vector<double>& dts, const std::vector<double>& errors);

}  // namespace acrom::diag
