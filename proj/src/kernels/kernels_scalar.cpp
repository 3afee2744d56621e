#include "acrom/kernels.hpp"

#include <cassert>

namespace acrom::kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  // Four partial sums, matching the lane structure of the vector variant.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  const std::size_t n = x.size();
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  double s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void weighted_slice_sum(std::span<const double> weights,
                        std::span<const double> slices,
                        std::span<double> out) {
  const std::size_t len = out.size();
  assert(slices.size() == weights.size() * len);
  for (double& v : out) v = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double w = weights[k];
    const double* s = slices.data() + k * len;
    for (std::size_t i = 0; i < len; ++i) out[i] += w * s[i];
  }
}

}  // namespace acrom::kernels::scalar
