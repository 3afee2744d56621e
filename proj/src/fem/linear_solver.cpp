#include "acrom/linear_solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "acrom/error.hpp"

#ifdef ACROM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace acrom::fem {

namespace {

struct BackendChoice {
  bool umfpack = false;
  std::string note;
};

#ifdef ACROM_HAVE_UMFPACK
// Diagonally dominant matrix with scattered couplings; the fronts are wide
// enough that UMFPACK goes through dense BLAS kernels.
double umfpack_known_answer_error() {
  const int n = 200, bw = 32;
  std::vector<Eigen::Triplet<double>> t;
  std::uint32_t s = 12345u;
  const auto next = [&] {
    s = s * 1664525u + 1013904223u;
    return static_cast<double>(s >> 8) / static_cast<double>(1u << 24) - 0.5;
  };
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 * bw);
    for (int k = 1; k <= bw; ++k) {
      const int j = (i + 7 * k) % n;
      if (j == i) continue;
      t.emplace_back(i, j, next());
      t.emplace_back(j, i, next());
    }
  }
  SparseOperator a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  const Vector x = Vector::LinSpaced(n, 1.0, 2.0);
  const Vector b = a * x;
  Eigen::UmfPackLU<SparseOperator> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) return INFINITY;
  const Vector y = lu.solve(b);
  return (y - x).norm() / x.norm();
}
#endif

const BackendChoice& backend_choice() {
  static const BackendChoice choice = [] {
    BackendChoice c;
#ifdef ACROM_HAVE_UMFPACK
    const double err = umfpack_known_answer_error();
    c.umfpack = err < 1e-10;
    if (!c.umfpack)
      c.note = "umfpack known-answer solve was off by " + std::to_string(err) +
               " (faulty BLAS kernel?); using eigen-sparselu";
#else
    c.note = "built without umfpack";
#endif
    return c;
  }();
  return choice;
}

}  // namespace

struct SparseLu::Impl {
#ifdef ACROM_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseOperator> umf;
#endif
  Eigen::SparseLU<SparseOperator, Eigen::COLAMDOrdering<int>> eigen;
  bool use_umfpack = backend_choice().umfpack;
  bool analyzed = false;
  bool factored = false;

  bool ok() const {
#ifdef ACROM_HAVE_UMFPACK
    if (use_umfpack) return umf.info() == Eigen::Success;
#endif
    return eigen.info() == Eigen::Success;
  }
  Vector solve(const Vector& b) const {
#ifdef ACROM_HAVE_UMFPACK
    if (use_umfpack) return umf.solve(b);
#endif
    return eigen.solve(b);
  }
};

SparseLu::SparseLu() : impl_(std::make_unique<Impl>()) {}
SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

std::string SparseLu::backend() { return backend_choice().umfpack ? "umfpack" : "eigen-sparselu"; }

std::string SparseLu::backend_note() { return backend_choice().note; }

void SparseLu::analyze(const SparseOperator& a) {
#ifdef ACROM_HAVE_UMFPACK
  if (impl_->use_umfpack)
    impl_->umf.analyzePattern(a);
  else
#endif
    impl_->eigen.analyzePattern(a);
  impl_->analyzed = true;
  impl_->factored = false;
}

void SparseLu::factorize(const SparseOperator& a) {
  if (!impl_->analyzed) analyze(a);
#ifdef ACROM_HAVE_UMFPACK
  if (impl_->use_umfpack)
    impl_->umf.factorize(a);
  else
#endif
    impl_->eigen.factorize(a);
  if (!impl_->ok())
    throw SolverError("sparse LU factorization failed (" + backend() + ", n=" + std::to_string(a.rows()) +
                      ", nnz=" + std::to_string(a.nonZeros()) + "): matrix is numerically singular");
  impl_->factored = true;
}

Vector SparseLu::solve(const Vector& b) const {
  if (!impl_->factored) throw SolverError("sparse LU: solve called before factorize");
  Vector x = impl_->solve(b);
  if (!impl_->ok() || !x.allFinite()) throw SolverError("sparse LU: triangular solve produced non-finite values");
  return x;
}

Vector SparseLu::solve_refined(const SparseOperator& a, const Vector& b, int steps) const {
  Vector x = solve(b);
  for (int k = 0; k < steps; ++k) {
    const Vector r = b - a * x;
    x += solve(r);
  }
  return x;
}

}  // namespace acrom::fem
