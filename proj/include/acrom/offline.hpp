#pragma once
//
// Full-order backward-Euler artificial-compression time stepping:
//
//   (u1 - u0)/dt + b*(u0, u1, v) + nu (grad u1, grad v) - (p1, div v) = (f, v)
//   eps (p1 - p0)/dt + (div u1, q) = 0
//
// In matrix form, with A = M/dt + nu K + N(u0) and B the divergence,
//
//   [ A   -B^T        ] [u1]   [ F + M u0/dt       ]
//   [ B   (eps/dt) Mp ] [p1] = [ (eps/dt) Mp p0    ]
//

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acrom/energy.hpp"
#include "acrom/fem.hpp"
#include "acrom/linear_solver.hpp"

namespace acrom {

enum class InitialState { Rest, FromFile };
enum class ForcingKind { Rotating, None };

struct OfflineConfig {
  double nu = 0.01;
  double dt = 2.5e-4;
  double eps = 1e-6;
  double t_start = 0.0;
  double t_end = 1.0;
  int snapshot_every = 1;
  /// First time at which snapshots are recorded (defaults to t_start).
  std::optional<double> snapshot_from;
  InitialState initial_state = InitialState::Rest;
  std::filesystem::path initial_path;
  ForcingKind forcing = ForcingKind::Rotating;
  /// Steps between checkpoints; 0 disables checkpointing.
  int checkpoint_every = 0;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
  /// Number of steps in [t_start, t_end]; the window must be a whole number of steps.
  std::int64_t step_count() const;
  double time_at(std::int64_t n) const { return t_start + static_cast<double>(n) * dt; }
};

struct FlowState {
  double t = 0.0;
  fem::Vector u;
  fem::Vector p;
};

/// Mp-weighted mean of a pressure field.
double pressure_mean(const fem::Discretization& disc, const fem::Vector& p);
void subtract_pressure_mean(const fem::Discretization& disc, fem::Vector& p);

fem::Vector forcing_vector(const fem::Discretization& disc, ForcingKind kind, double t);

/// Energy terms of one full-order step, in the M / Mp / K norms.
EnergyTerms full_order_energy_terms(const fem::Discretization& disc, const FlowState& s0, const FlowState& s1,
                                    const fem::Vector& F, double nu, double eps, double dt);

enum class SolvePath { Monolithic, Eliminated };

/// Blocks of one coupled step. `A` and `B` must already carry the Dirichlet
/// elimination (identity rows/columns in A, zero columns in B).
struct CoupledBlocks {
  const fem::SparseOperator& A;
  const fem::SparseOperator& B;
  const fem::SparseOperator& Mp;
  double eps;
  double dt;
};

struct CoupledSolution {
  fem::Vector u;
  fem::Vector p;
};

/// Solves  A u - B^T p = ru,  B u + (eps/dt) Mp p = rp.
/// The eliminated path substitutes p = (dt/eps) Mp^{-1} (rp - B u) and solves
/// A + (dt/eps) B^T Mp^{-1} B densely; it is meant for small cross-checks.
CoupledSolution solve_coupled_system(const CoupledBlocks& blocks, const fem::Vector& ru, const fem::Vector& rp,
                                     SolvePath path = SolvePath::Monolithic);

/// One step assembled from scratch through solve_coupled_system.
FlowState ac_fem_step(const fem::Discretization& disc, const FlowState& s, const OfflineConfig& cfg,
                      SolvePath path = SolvePath::Monolithic);

struct StepDiagnostics {
  double momentum_residual = 0.0;    // relative, in the Euclidean norm of the eliminated system
  double continuity_residual = 0.0;  // relative
  EnergyTerms energy;
};

/// Repeated-step solver reusing the sparsity pattern and symbolic
/// factorization; only the convection values change between steps.
class AcFemStepper {
 public:
  AcFemStepper(const fem::Discretization& disc, const OfflineConfig& cfg);
  ~AcFemStepper();
  AcFemStepper(AcFemStepper&&) noexcept;

  FlowState step(const FlowState& s);
  const StepDiagnostics& last() const { return last_; }
  const fem::Vector& load() const { return F_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  const fem::Discretization& disc_;
  OfflineConfig cfg_;
  fem::Vector F_;
  StepDiagnostics last_;
};

struct SnapshotSet {
  std::vector<double> times;
  Eigen::MatrixXd U;  // n_u x N
  Eigen::MatrixXd P;  // n_p x N
  OfflineConfig config;
  std::string mesh_hash;
  /// Per-step log: time at the end of the step, energy |u|^2 + eps|p|^2, identity residual.
  std::vector<double> step_times;
  std::vector<double> step_energy;
  std::vector<double> step_residual;

  int count() const { return static_cast<int>(times.size()); }
};

/// Mid-run state written every `checkpoint_every` steps.
struct Checkpoint {
  std::int64_t step = 0;
  FlowState state;
  SnapshotSet partial;
};

struct OfflineRunOptions {
  /// Checkpoint file; empty disables checkpoints even if the config asks.
  std::filesystem::path checkpoint_path;
  /// Continue from checkpoint_path when it exists.
  bool resume = false;
  /// Stop (after checkpointing) once this many steps have been taken in
  /// this call; 0 means run to the end.
  std::int64_t max_steps = 0;
  std::function<void(std::int64_t step, std::int64_t total, double t)> progress;
};

/// Runs the scheme over the configured window. On a solver failure the last
/// checkpoint stays on disk and SolverError carries the last good time.
SnapshotSet run_offline(const OfflineConfig& cfg, const fem::Discretization& disc, const OfflineRunOptions& opt = {});

/// Initial state for the configured window (rest, or last column of the
/// snapshot/checkpoint file named by the config).
FlowState initial_flow_state(const OfflineConfig& cfg, const fem::Discretization& disc);

}  // namespace acrom
