#include "gskin/mesh.h"

namespace gskin {

std::unordered_map<int, LabeledPart> split_by_labels(const Mesh& mesh) {
  validate_mesh(mesh);
  if (!mesh.has_labels()) throw ValidationError("split_by_labels: mesh has no labels");

  std::unordered_map<int, LabeledPart> parts;
  std::unordered_map<int, std::vector<int>> remap;  // label -> source->part index

  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    const int tag = mesh.labels[static_cast<size_t>(v)];
    auto& part = parts[tag];
    auto& map = remap[tag];
    if (map.empty()) map.assign(static_cast<size_t>(mesh.vertex_count()), -1);
    map[static_cast<size_t>(v)] = static_cast<int>(part.original_vertex.size());
    part.original_vertex.push_back(static_cast<int>(v));
  }
  for (auto& [tag, part] : parts) {
    part.mesh.vertices.resize(static_cast<Index>(part.original_vertex.size()), 3);
    part.mesh.labels.assign(part.original_vertex.size(), tag);
    for (size_t i = 0; i < part.original_vertex.size(); ++i)
      part.mesh.vertices.row(static_cast<Index>(i)) = mesh.vertices.row(part.original_vertex[i]);
  }
  for (auto& [tag, part] : parts) {
    std::vector<int> tri;
    const auto& map = remap[tag];
    for (Index f = 0; f < mesh.face_count(); ++f) {
      const int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
      if (mesh.labels[static_cast<size_t>(a)] == tag && mesh.labels[static_cast<size_t>(b)] == tag &&
          mesh.labels[static_cast<size_t>(c)] == tag) {
        tri.push_back(map[static_cast<size_t>(a)]);
        tri.push_back(map[static_cast<size_t>(b)]);
        tri.push_back(map[static_cast<size_t>(c)]);
      }
    }
    part.mesh.faces.resize(static_cast<Index>(tri.size() / 3), 3);
    for (Index f = 0; f < part.mesh.faces.rows(); ++f)
      for (int k = 0; k < 3; ++k) part.mesh.faces(f, k) = tri[static_cast<size_t>(3 * f + k)];
  }
  return parts;
}

}  // namespace gskin
