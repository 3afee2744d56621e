#pragma once

#include <memory>
#include <string>

#include "acrom/fem.hpp"

namespace acrom::fem {

/// Sparse direct LU with fill-reducing ordering (UMFPACK when available).
/// The symbolic analysis is reused across factorizations of matrices with the
/// same sparsity pattern.
///
/// UMFPACK is only as good as the BLAS underneath it; a known-answer solve
/// runs once per process and a failing result switches every instance to
/// Eigen's SparseLU.
class SparseLu {
 public:
  SparseLu();
  ~SparseLu();
  SparseLu(SparseLu&&) noexcept;
  SparseLu& operator=(SparseLu&&) noexcept;

  void analyze(const SparseOperator& a);
  /// Throws SolverError if the matrix is numerically singular.
  void factorize(const SparseOperator& a);
  Vector solve(const Vector& b) const;
  /// Solve followed by `steps` rounds of iterative refinement against `a`.
  Vector solve_refined(const SparseOperator& a, const Vector& b, int steps = 1) const;

  /// Active backend: "umfpack" or "eigen-sparselu".
  static std::string backend();
  /// Why the preferred backend is not in use, or empty.
  static std::string backend_note();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace acrom::fem
