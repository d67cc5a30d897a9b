#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "gskin/error.h"
#include "gskin/types.h"

namespace gskin {

// Triangle mesh: vertex positions, 0-based face indices, and optional
// per-vertex integer part labels (empty when absent).
template <typename Scalar>
struct MeshT {
  PointsT<Scalar> vertices;
  Faces faces;
  std::vector<int> labels;

  Index vertex_count() const { return vertices.rows(); }
  Index face_count() const { return faces.rows(); }
  bool has_labels() const { return !labels.empty(); }

  template <typename S2>
  MeshT<S2> cast() const {
    MeshT<S2> out;
    out.vertices = vertices.template cast<S2>();
    out.faces = faces;
    out.labels = labels;
    return out;
  }
};

using Mesh = MeshT<double>;

// Throws ValidationError when a face index is out of range, a face repeats a
// vertex, the vertex count is too small for a faced mesh, or the label array
// length disagrees with the vertex count.
template <typename Scalar>
void validate_mesh(const MeshT<Scalar>& mesh) {
  const Index n = mesh.vertex_count();
  if (mesh.face_count() > 0 && n < 3)
    throw ValidationError("mesh with faces must have at least 3 vertices");
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
    for (int idx : {a, b, c})
      if (idx < 0 || idx >= n)
        throw ValidationError("face " + std::to_string(f) + " index " +
                              std::to_string(idx) + " out of range (vertex count " +
                              std::to_string(n) + ")");
    if (a == b || b == c || a == c)
      throw ValidationError("face " + std::to_string(f) + " is degenerate");
  }
  if (!mesh.labels.empty() && static_cast<Index>(mesh.labels.size()) != n)
    throw ValidationError("label count " + std::to_string(mesh.labels.size()) +
                          " does not match vertex count " + std::to_string(n));
}

// One-ring neighborhoods from face edges; each list is sorted and unique.
template <typename Scalar>
std::vector<std::vector<int>> vertex_adjacency(const MeshT<Scalar>& mesh) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(mesh.vertex_count()));
  auto link = [&adj](int u, int v) {
    adj[static_cast<size_t>(u)].push_back(v);
    adj[static_cast<size_t>(v)].push_back(u);
  };
  for (Index f = 0; f < mesh.face_count(); ++f) {
    link(mesh.faces(f, 0), mesh.faces(f, 1));
    link(mesh.faces(f, 1), mesh.faces(f, 2));
    link(mesh.faces(f, 2), mesh.faces(f, 0));
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return adj;
}

// A sub-mesh extracted by label, with the mapping back to original indices.
struct LabeledPart {
  Mesh mesh;
  std::vector<int> original_vertex;  // part vertex i -> source vertex index
};

// Splits a labeled mesh into parts. A face belongs to a part only when all
// three corners carry that label; vertices unused by any face of their part
// are still kept so distances against the full part are possible.
std::unordered_map<int, LabeledPart> split_by_labels(const Mesh& mesh);

}  // namespace gskin
