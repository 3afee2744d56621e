#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "acrom/diag.hpp"
#include "acrom/error.hpp"

namespace acrom::diag {

namespace {

// Columns whose W-norm drops below this fraction of the original during
// orthogonalization are treated as linearly dependent.
constexpr double kRankTolerance = 1e-10;

template <class Weight>
PrincipalAngleResult angle_core(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q, const Weight& W) {
  if (X.rows() != Q.rows() || W.rows() != X.rows() || W.cols() != X.rows())
    throw DimensionError("principal angle: subspace dimensions disagree");
  Eigen::MatrixXd B(X.rows(), X.cols());
  Eigen::MatrixXd WB(X.rows(), X.cols());
  int k = 0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Eigen::VectorXd v = X.col(j);
    const double n0 = std::sqrt(std::max(0.0, v.dot(W * v)));
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < k; ++i) v -= WB.col(i).dot(v) * B.col(i);
    const Eigen::VectorXd Wv = W * v;
    const double n1 = std::sqrt(std::max(0.0, v.dot(Wv)));
    if (n1 <= kRankTolerance * n0) continue;
    B.col(k) = v / n1;
    WB.col(k) = Wv / n1;
    ++k;
  }
  PrincipalAngleResult r;
  r.rank_x = k;
  if (k == 0 || Q.cols() == 0) {
    r.singular_values = Eigen::VectorXd::Zero(0);
    r.alpha = 0.0;
    r.theta1 = std::acos(0.0);
    return r;
  }
  const Eigen::MatrixXd G = Q.transpose() * WB.leftCols(k);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  r.singular_values = svd.singularValues();
  r.alpha = r.singular_values[0];
  r.theta1 = std::acos(std::clamp(r.alpha, 0.0, 1.0));
  return r;
}

}  // namespace

PrincipalAngleResult first_principal_angle(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q,
                                           const fem::SparseOperator& W) {
  return angle_core(X, Q, W);
}

PrincipalAngleResult first_principal_angle(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q,
                                           const Eigen::MatrixXd& W) {
  return angle_core(X, Q, W);
}

double infsup_from_reduced(const Eigen::MatrixXd& G, const Eigen::MatrixXd& S) {
  const Eigen::Index M = G.rows(), R = G.cols();
  if (S.rows() != R || S.cols() != R) throw DimensionError("inf-sup: stiffness and divergence sizes disagree");
  if (M == 0 || R == 0) throw DimensionError("inf-sup: needs at least one velocity and one pressure mode");
  if (M > R) return 0.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw SolverError("inf-sup: reduced stiffness is not positive definite");
  // H = G L^{-T}, computed as (L^{-1} G^T)^T.
  const Eigen::MatrixXd H = llt.matrixL().solve(G.transpose()).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
  return svd.singularValues()[M - 1];
}

double infsup_constant(const PodBasis& ub, const PodBasis& pb, const fem::Discretization& disc) {
  const Eigen::MatrixXd G = pb.modes.transpose() * (disc.divergence * ub.modes);
  return infsup_from_reduced(G, reduced_stiffness(ub, disc.stiffness));
}

AngleReport principal_angle(const PodBasis& ub, const PodBasis& pb, const fem::Discretization& disc) {
  if (ub.dofs() != disc.dofs.n_u || pb.dofs() != disc.dofs.n_p)
    throw DimensionError("principal angle: bases do not match the discretization");
  const Eigen::MatrixXd X = divergence_fields(disc, ub.modes);
  const auto core = first_principal_angle(X, pb.modes, disc.pressure_mass);
  AngleReport r;
  r.R = ub.size();
  r.M = pb.size();
  r.alpha = core.alpha;
  r.theta1 = core.theta1;
  r.singular_values = core.singular_values;
  r.divergence_rank = core.rank_x;
  if (r.R > 0 && r.M > 0) r.infsup_beta = infsup_constant(ub, pb, disc);
  return r;
}

}  // namespace acrom::diag
