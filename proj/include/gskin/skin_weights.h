#pragma once

#include "gskin/error.h"
#include "gskin/types.h"

namespace gskin {

// Per-vertex skinning weights, one row per vertex, one column per joint.
struct SkinWeights {
  MatX weights;  // V x 24

  Index vertex_count() const { return weights.rows(); }
};

inline void validate_weights(const SkinWeights& sw, double tol = 1e-6) {
  if (sw.weights.cols() != kJointCount) {
    throw ValidationError("weights must have 24 columns");
  }
  if ((sw.weights.array() < -tol).any()) {
    throw ValidationError("weights must be non-negative");
  }
  for (Index i = 0; i < sw.weights.rows(); ++i) {
    if (std::abs(sw.weights.row(i).sum() - 1.0) > tol) {
      throw ValidationError("weight rows must sum to 1");
    }
  }
}

}  // namespace gskin
