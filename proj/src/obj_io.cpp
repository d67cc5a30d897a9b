#include "gskin/obj_io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gskin {

namespace {

bool parse_double(const std::string& token, double& out) {
  std::size_t used = 0;
  try {
    out = std::stod(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size();
}

// Leading integer of an OBJ face token ("7", "7/2", "7//3", "7/2/3").
bool parse_face_index(const std::string& token, long& out) {
  const std::string head = token.substr(0, token.find('/'));
  if (head.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stol(head, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == head.size();
}

}  // namespace

Mesh load_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::vector<Vec3> verts;
  std::vector<std::array<long, 3>> faces;   // still 1-based here
  std::vector<long> face_lines;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key) || key[0] == '#') continue;
    if (key == "v") {
      std::string tok;
      Vec3 p;
      for (int k = 0; k < 3; ++k) {
        if (!(ss >> tok) || !parse_double(tok, p[k]))
          throw ParseError(path, line_no, "malformed vertex record");
      }
      verts.push_back(p);
    } else if (key == "f") {
      std::array<long, 3> f{};
      std::string tok;
      int count = 0;
      while (ss >> tok) {
        long idx = 0;
        if (!parse_face_index(tok, idx))
          throw ParseError(path, line_no, "malformed face record");
        if (count >= 3) throw ParseError(path, line_no, "only triangular faces are supported");
        f[static_cast<size_t>(count++)] = idx;
      }
      if (count != 3) throw ParseError(path, line_no, "face needs exactly 3 vertices");
      faces.push_back(f);
      face_lines.push_back(line_no);
    }
    // vt/vn/mtllib/usemtl/o/g/s and anything unknown are ignored
  }

  Mesh mesh;
  mesh.vertices.resize(static_cast<Index>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Index>(i)) = verts[i];
  mesh.faces.resize(static_cast<Index>(faces.size()), 3);
  for (size_t i = 0; i < faces.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const long idx = faces[i][static_cast<size_t>(k)];
      if (idx < 1 || idx > static_cast<long>(verts.size()))
        throw ParseError(path, face_lines[i],
                         "face index " + std::to_string(idx) + " out of range (1.." +
                             std::to_string(verts.size()) + ")");
      mesh.faces(static_cast<Index>(i), k) = static_cast<int>(idx - 1);
    }
  }
  validate_mesh(mesh);
  return mesh;
}

void save_obj(const Mesh& mesh, const std::string& path) {
  validate_mesh(mesh);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[128];
  for (Index i = 0; i < mesh.vertex_count(); ++i) {
    std::snprintf(buf, sizeof(buf), "v %.9f %.9f %.9f\n", mesh.vertices(i, 0),
                  mesh.vertices(i, 1), mesh.vertices(i, 2));
    out << buf;
  }
  for (Index f = 0; f < mesh.face_count(); ++f) {
    out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' '
        << mesh.faces(f, 2) + 1 << '\n';
  }
  if (!out) throw IoError("write failure on " + path);
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!doc.contains("labels") || !doc["labels"].is_array())
    throw ParseError(path + ": expected {\"labels\": [...]}");
  return doc["labels"].get<std::vector<int>>();
}

void save_labels(const std::vector<int>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  nlohmann::json doc;
  doc["labels"] = labels;
  out << doc.dump() << '\n';
}

std::string labels_sidecar_path(const std::string& mesh_path) {
  std::filesystem::path p(mesh_path);
  p.replace_extension(".labels.json");
  return p.string();
}

Mesh load_obj_with_labels(const std::string& path) {
  Mesh mesh = load_obj(path);
  const std::string sidecar = labels_sidecar_path(path);
  if (std::filesystem::exists(sidecar)) {
    mesh.labels = load_labels(sidecar);
    validate_mesh(mesh);
  }
  return mesh;
}

}  // namespace gskin
