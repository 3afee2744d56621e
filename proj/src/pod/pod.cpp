#include "acrom/pod.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "acrom/error.hpp"
#include "acrom/kernels.hpp"

namespace acrom {

namespace {

std::span<double> col_span(Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

// One modified Gram-Schmidt pass in the W inner product.
void reorthonormalize(Eigen::MatrixXd& Q, const fem::SparseOperator& W) {
  Eigen::MatrixXd WQ(Q.rows(), Q.cols());
  for (Eigen::Index i = 0; i < Q.cols(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = kernels::dot(col_span(WQ, j), col_span(Q, i));
      kernels::axpy(-r, col_span(Q, j), col_span(Q, i));
    }
    WQ.col(i) = W * Q.col(i);
    const double n2 = kernels::dot(col_span(WQ, i), col_span(Q, i));
    if (!(n2 > 0.0)) throw RankError("POD: mode " + std::to_string(i + 1) + " collapsed during re-orthonormalization");
    const double inv = 1.0 / std::sqrt(n2);
    Q.col(i) *= inv;
    WQ.col(i) *= inv;
  }
}

double mismatch(double measured, double reference) {
  const double d = std::abs(measured - reference);
  if (reference > 0.0) return d / reference;
  return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

std::string field_name(Field f) { return f == Field::Velocity ? "velocity" : "pressure"; }

Field field_from_name(const std::string& name) {
  if (name == "velocity") return Field::Velocity;
  if (name == "pressure") return Field::Pressure;
  throw FormatError("unknown field '" + name + "'");
}

const fem::SparseOperator& field_weight(const fem::Discretization& disc, Field field) {
  return field == Field::Velocity ? disc.mass : disc.pressure_mass;
}

PodBasis compute_pod(const Eigen::MatrixXd& A, const fem::SparseOperator& W, Field field, int R) {
  const Eigen::Index N = A.cols();
  if (N == 0) throw DimensionError("POD: empty snapshot set");
  if (A.rows() != W.rows() || W.rows() != W.cols())
    throw DimensionError("POD: snapshot length " + std::to_string(A.rows()) + " does not match the weight matrix");
  if (R < 0 || R > N)
    throw RankError("POD: R=" + std::to_string(R) + " outside [0, " + std::to_string(N) + "] (snapshot count)");

  const Eigen::MatrixXd WA = W * A;
  Eigen::MatrixXd C = A.transpose() * WA;
  C = 0.5 * (C + C.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw RankError("POD: correlation eigensolver did not converge");

  PodBasis b;
  b.field = field;
  b.weight = field == Field::Velocity ? "M" : "Mp";
  b.eigenvalues = es.eigenvalues().reverse();
  b.eigenvectors = es.eigenvectors().rowwise().reverse();
  const double l1 = b.eigenvalues[0];
  for (Eigen::Index i = 0; i < N; ++i) {
    double& l = b.eigenvalues[i];
    if (l < 0.0) {
      if (l < -1e-12 * std::abs(l1))
        throw InvariantError("POD: correlation eigenvalue " + std::to_string(i + 1) + " = " + std::to_string(l) +
                             " is negative beyond roundoff");
      l = 0.0;
    }
  }
  b.numerical_rank = 0;
  if (l1 > 0.0)
    for (Eigen::Index i = 0; i < N; ++i)
      if (b.eigenvalues[i] > kPodRankTolerance * l1) ++b.numerical_rank;
  if (R > b.numerical_rank)
    throw RankError("POD: R=" + std::to_string(R) + " exceeds the numerical rank of the snapshots; largest admissible R is " +
                    std::to_string(b.numerical_rank));

  b.modes.resize(A.rows(), R);
  for (int i = 0; i < R; ++i) b.modes.col(i) = (A * b.eigenvectors.col(i)) / std::sqrt(b.eigenvalues[i]);
  reorthonormalize(b.modes, W);
  return b;
}

PodBasis compute_pod(const SnapshotSet& snaps, const fem::Discretization& disc, Field field, int R) {
  return compute_pod(field == Field::Velocity ? snaps.U : snaps.P, field_weight(disc, field), field, R);
}

PodBasis truncate(const PodBasis& basis, int R) {
  if (R < 0 || R > basis.size())
    throw RankError("POD: cannot truncate a basis of " + std::to_string(basis.size()) + " modes to " +
                    std::to_string(R));
  PodBasis b = basis;
  b.modes = basis.modes.leftCols(R);
  return b;
}

Eigen::VectorXd l2_project(const PodBasis& basis, const fem::SparseOperator& W, const Eigen::VectorXd& v) {
  if (v.size() != basis.dofs())
    throw DimensionError("l2_project: vector length " + std::to_string(v.size()) + ", basis has " +
                         std::to_string(basis.dofs()) + " dofs");
  return basis.modes.transpose() * (W * v);
}

Eigen::MatrixXd l2_project(const PodBasis& basis, const fem::SparseOperator& W, const Eigen::MatrixXd& V) {
  if (V.rows() != basis.dofs()) throw DimensionError("l2_project: row count does not match basis dofs");
  return basis.modes.transpose() * (W * V);
}

double ProjectionReport::l2_mismatch() const { return mismatch(l2_measured, l2_tail); }
double ProjectionReport::l2_mismatch_of_total() const {
  return l2_total > 0.0 ? std::abs(l2_measured - l2_tail) / l2_total : 0.0;
}
double ProjectionReport::h1_mismatch() const { return mismatch(h1_measured, h1_tail); }
double ProjectionReport::h1_mismatch_of_total() const {
  return h1_total > 0.0 ? std::abs(h1_measured - h1_tail) / h1_total : 0.0;
}

ProjectionReport projection_error_report(const PodBasis& basis, const Eigen::MatrixXd& A,
                                         const fem::SparseOperator& W, const fem::SparseOperator* K, int R) {
  if (R < 0 || R > basis.size()) throw RankError("projection report: R out of range");
  if (A.rows() != basis.dofs()) throw DimensionError("projection report: snapshots do not match basis");
  if (A.cols() != basis.eigenvalues.size())
    throw DimensionError("projection report: snapshot count differs from the basis spectrum");
  ProjectionReport r;
  r.R = R;
  const Eigen::MatrixXd Phi = basis.modes.leftCols(R);
  const Eigen::MatrixXd E = A - Phi * (Phi.transpose() * (W * A));
  const Eigen::MatrixXd WE = W * E;
  for (Eigen::Index n = 0; n < A.cols(); ++n) {
    r.l2_errors.push_back(E.col(n).dot(WE.col(n)));
    r.l2_measured += r.l2_errors.back();
  }
  for (Eigen::Index i = 0; i < basis.eigenvalues.size(); ++i) {
    r.l2_total += basis.eigenvalues[i];
    if (i >= R) r.l2_tail += basis.eigenvalues[i];
  }
  if (K) {
    if (basis.eigenvectors.cols() != A.cols())
      throw InvariantError("projection report: H1 tails need the correlation eigenvectors of this basis");
    r.has_h1 = true;
    const Eigen::MatrixXd KE = (*K) * E;
    for (Eigen::Index n = 0; n < A.cols(); ++n) {
      r.h1_errors.push_back(E.col(n).dot(KE.col(n)));
      r.h1_measured += r.h1_errors.back();
    }
    // |grad phi_i|^2 lambda_i = |grad (A a_i)|^2, which stays finite as lambda_i -> 0.
    const Eigen::MatrixXd G = A * basis.eigenvectors;
    const Eigen::MatrixXd KG = (*K) * G;
    for (Eigen::Index i = 0; i < G.cols(); ++i) {
      const double g = G.col(i).dot(KG.col(i));
      r.h1_total += g;
      if (i >= R) r.h1_tail += g;
    }
  }
  return r;
}

Eigen::MatrixXd reduced_stiffness(const PodBasis& basis, const fem::SparseOperator& K) {
  Eigen::MatrixXd S = basis.modes.transpose() * (K * basis.modes);
  return 0.5 * (S + S.transpose());
}

double pod_inverse_constant(const PodBasis& basis, const fem::SparseOperator& K) {
  if (basis.size() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced_stiffness(basis, K), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

int energy_capture_count(const Eigen::VectorXd& eigenvalues, double fraction) {
  const double total = eigenvalues.sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    acc += eigenvalues[i];
    if (acc >= fraction * total) return static_cast<int>(i + 1);
  }
  return static_cast<int>(eigenvalues.size());
}

}  // namespace acrom
