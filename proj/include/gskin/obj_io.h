#pragma once

#include <string>
#include <vector>

#include "gskin/mesh.h"

namespace gskin {

// Wavefront OBJ, triangles only. Reads v/f records, ignores everything else;
// texture/normal slots in f records are dropped. Indices come back 0-based in
// file order. Throws ParseError with line number on malformed records and on
// out-of-range face indices.
Mesh load_obj(const std::string& path);

// Writes v records at 9 decimal digits and 1-based f records. No labels.
void save_obj(const Mesh& mesh, const std::string& path);

// Segmentation label sidecar: {"labels": [int per vertex]}.
std::vector<int> load_labels(const std::string& path);
void save_labels(const std::vector<int>& labels, const std::string& path);

// "mesh.obj" -> "mesh.labels.json" (appends when there is no extension).
std::string labels_sidecar_path(const std::string& mesh_path);

// load_obj plus the sidecar when it exists on disk.
Mesh load_obj_with_labels(const std::string& path);

}  // namespace gskin
