#pragma once

#include <Eigen/Sparse>

#include "gskin/error.h"
#include "gskin/mesh.h"

namespace gskin {

// Uniform graph Laplacian L = I - D^-1 A over the mesh edge graph. Rows of
// isolated vertices (no neighbors) are zero, so they are fixed points of the
// smoothing update below.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> laplacian_matrix(const MeshT<Scalar>& mesh) {
  const auto adjacency = vertex_adjacency(mesh);
  const Index n = mesh.vertex_count();
  std::vector<Eigen::Triplet<Scalar>> entries;
  entries.reserve(static_cast<size_t>(n) * 7);
  for (Index i = 0; i < n; ++i) {
    const auto& ring = adjacency[static_cast<size_t>(i)];
    if (ring.empty()) continue;
    entries.emplace_back(i, i, Scalar(1));
    const Scalar w = Scalar(-1) / Scalar(ring.size());
    for (int j : ring) entries.emplace_back(i, j, w);
  }
  Eigen::SparseMatrix<Scalar> lap(n, n);
  lap.setFromTriplets(entries.begin(), entries.end());
  return lap;
}

// Differential coordinates L*V: each row is vertex minus neighbor centroid.
template <typename Scalar>
PointsT<Scalar> laplacian_coordinates(const MeshT<Scalar>& mesh) {
  const auto adjacency = vertex_adjacency(mesh);
  for (size_t i = 0; i < adjacency.size(); ++i) {
    if (adjacency[i].empty()) {
      throw ValidationError("vertex " + std::to_string(i) +
                            " has no neighbors; laplacian coordinates undefined");
    }
  }
  return laplacian_matrix(mesh) * mesh.vertices;
}

// Iterated umbrella smoothing of a per-vertex field: x <- x - lambda * L * x.
// Isolated vertices keep their values; each iteration preserves row sums of
// fields whose rows L annihilates in aggregate (convex neighbor averaging).
template <typename Scalar, typename Derived>
MatXT<Scalar> laplacian_smooth_field(const MeshT<Scalar>& mesh,
                                     const Eigen::MatrixBase<Derived>& field,
                                     int iterations, Scalar lambda) {
  if (field.rows() != mesh.vertex_count()) {
    throw ValidationError("field rows must match mesh vertex count");
  }
  if (iterations < 0) throw ValidationError("iterations must be non-negative");
  if (!(lambda > Scalar(0)) || lambda > Scalar(1)) {
    throw ValidationError("lambda must be in (0, 1]");
  }
  MatXT<Scalar> x = field;
  if (iterations == 0) return x;
  const Eigen::SparseMatrix<Scalar> lap = laplacian_matrix(mesh);
  for (int it = 0; it < iterations; ++it) x -= lambda * (lap * x).eval();
  return x;
}

}  // namespace gskin
