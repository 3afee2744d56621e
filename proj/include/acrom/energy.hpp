#pragma once

#include <algorithm>
#include <cmath>

namespace acrom {

/// Terms of the one-step energy equality of the backward-Euler AC scheme
/// (full order or reduced):
///
///   |u1|^2 + eps|p1|^2 - |u0|^2 - eps|p0|^2
///     + |u1 - u0|^2 + eps|p1 - p0|^2 + 2 dt nu |grad u1|^2 = 2 dt (f, u1)
struct EnergyTerms {
  double energy_new = 0.0;   // |u1|^2 + eps|p1|^2
  double energy_old = 0.0;   // |u0|^2 + eps|p0|^2
  double increment = 0.0;    // |u1-u0|^2 + eps|p1-p0|^2
  double dissipation = 0.0;  // 2 dt nu |grad u1|^2
  double work = 0.0;         // 2 dt (f, u1)

  double defect() const { return energy_new - energy_old + increment + dissipation - work; }

  /// |defect| over the summed magnitudes of the terms (0 for an all-zero step).
  double relative_residual() const {
    const double scale = std::abs(energy_new) + std::abs(energy_old) + std::abs(increment) +
                         std::abs(dissipation) + std::abs(work);
    return scale > 0.0 ? std::abs(defect()) / scale : 0.0;
  }
};

}  // namespace acrom
