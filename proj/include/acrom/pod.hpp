#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "acrom/fem.hpp"
#include "acrom/offline.hpp"

namespace acrom {

enum class Field { Velocity, Pressure };

std::string field_name(Field f);
Field field_from_name(const std::string& name);

/// Eigenvalues below this fraction of the largest one count as numerically zero.
inline constexpr double kPodRankTolerance = 1e-14;

/// Weighted-orthonormal POD modes of one field.
struct PodBasis {
  Field field = Field::Velocity;
  /// n_dofs x R, orthonormal in the field's mass inner product.
  Eigen::MatrixXd modes;
  /// Full descending spectrum of the correlation matrix (one per snapshot).
  Eigen::VectorXd eigenvalues;
  /// "M" for velocity, "Mp" for pressure.
  std::string weight;
  /// Hash of the snapshot set the basis was built from.
  std::string source_hash;
  /// Number of eigenvalues above the rank tolerance.
  int numerical_rank = 0;
  /// Correlation eigenvectors (snapshot-count square). Kept in memory only,
  /// for the H1 tail sums; empty for loaded bases.
  Eigen::MatrixXd eigenvectors;

  int size() const { return static_cast<int>(modes.cols()); }
  int dofs() const { return static_cast<int>(modes.rows()); }
};

const fem::SparseOperator& field_weight(const fem::Discretization& disc, Field field);

/// Method of snapshots on the columns of `snapshots` with inner product `W`.
/// Throws RankError when R exceeds the numerical rank.
PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const fem::SparseOperator& W, Field field, int R);
PodBasis compute_pod(const SnapshotSet& snaps, const fem::Discretization& disc, Field field, int R);

/// The R-leading modes of a basis (R <= basis.size()).
PodBasis truncate(const PodBasis& basis, int R);

/// Coordinates c_i = phi_i^T W v.
Eigen::VectorXd l2_project(const PodBasis& basis, const fem::SparseOperator& W, const Eigen::VectorXd& v);
Eigen::MatrixXd l2_project(const PodBasis& basis, const fem::SparseOperator& W, const Eigen::MatrixXd& V);

struct ProjectionReport {
  int R = 0;
  /// Per snapshot |v - Pi_R v|_W^2 and (velocity only) |grad(v - Pi_R v)|^2.
  std::vector<double> l2_errors;
  std::vector<double> h1_errors;
  double l2_measured = 0.0;
  double l2_tail = 0.0;   // sum_{i>R} lambda_i
  double l2_total = 0.0;  // sum_i lambda_i
  double h1_measured = 0.0;
  double h1_tail = 0.0;   // sum_{i>R} |grad phi_i|^2 lambda_i
  double h1_total = 0.0;  // same sum from i = 1
  bool has_h1 = false;

  /// |measured - tail| relative to the tail, and relative to the R = 0 total.
  double l2_mismatch() const;
  double l2_mismatch_of_total() const;
  double h1_mismatch() const;
  double h1_mismatch_of_total() const;
};

/// Compares measured projection errors of the snapshots onto the first R
/// modes against the eigenvalue tails. `stiffness` (may be null) enables the
/// H1 variant; it needs the basis eigenvectors.
ProjectionReport projection_error_report(const PodBasis& basis, const Eigen::MatrixXd& snapshots,
                                         const fem::SparseOperator& W, const fem::SparseOperator* stiffness,
                                         int R);

/// Reduced stiffness S_R = Phi^T K Phi.
Eigen::MatrixXd reduced_stiffness(const PodBasis& basis, const fem::SparseOperator& K);
/// Spectral norm of S_R.
double pod_inverse_constant(const PodBasis& basis, const fem::SparseOperator& K);

/// Smallest R whose leading eigenvalues carry at least `fraction` of the total.
int energy_capture_count(const Eigen::VectorXd& eigenvalues, double fraction);

}  // namespace acrom
