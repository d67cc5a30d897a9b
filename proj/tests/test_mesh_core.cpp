#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gskin/error.h"
#include "gskin/laplacian.h"
#include "gskin/mesh.h"
#include "gskin/normals.h"
#include "gskin/obj_io.h"
#include "gskin/rng.h"
#include "test_utils.h"

using namespace gskin;
using testutil::TempDir;

TEST_SUITE_BEGIN("mesh_core");

TEST_CASE("load_obj parses vertices and faces") {
  TempDir dir;
  auto path = dir.file("tri.obj");
  testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  Mesh m = load_obj(path);
  CHECK(m.vertex_count() == 3);
  CHECK(m.face_count() == 1);
  CHECK(m.faces(0, 0) == 0);
  CHECK(m.faces(0, 1) == 1);
  CHECK(m.faces(0, 2) == 2);
  CHECK(m.vertices(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("load_obj ignores texture and normal slashes plus comments") {
  TempDir dir;
  auto path = dir.file("slash.obj");
  testutil::write_text(path,
                       "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\n"
                       "vn 0 0 1\nvt 0.5 0.5\nf 1/1/1 2/1/1 3/1/1\n");
  Mesh m = load_obj(path);
  CHECK(m.vertex_count() == 3);
  CHECK(m.face_count() == 1);
  CHECK(m.faces(0, 2) == 2);
}

TEST_CASE("load_obj rejects out-of-range face index") {
  TempDir dir;
  auto path = dir.file("bad.obj");
  testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n");
  CHECK_THROWS_AS(load_obj(path), ParseError);
}

TEST_CASE("load_obj reports line number on malformed record") {
  TempDir dir;
  auto path = dir.file("mal.obj");
  testutil::write_text(path, "v 0 0 0\nv 1 0\n");
  try {
    load_obj(path);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line_number == 2);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("load_obj rejects quad faces") {
  TempDir dir;
  auto path = dir.file("quad.obj");
  testutil::write_text(path, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  CHECK_THROWS_AS(load_obj(path), ParseError);
}

TEST_CASE("load_obj missing file") {
  CHECK_THROWS_AS(load_obj("/nonexistent/nowhere.obj"), IoError);
}

TEST_CASE("save_obj writes v lines then 1-based f lines") {
  TempDir dir;
  auto path = dir.file("out.obj");
  save_obj(testutil::triangle_mesh(), path);
  auto text = testutil::read_text(path);
  CHECK(text.find("f 1 2 3") != std::string::npos);
  int vlines = 0;
  for (size_t pos = 0; (pos = text.find("\nv ", pos)) != std::string::npos; ++pos) ++vlines;
  if (text.rfind("v ", 0) == 0) ++vlines;
  CHECK(vlines == 3);
}

TEST_CASE("save_obj with no faces emits only vertices") {
  TempDir dir;
  Mesh m;
  m.vertices.resize(3, 3);
  m.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  m.faces.resize(0, 3);
  auto path = dir.file("pts.obj");
  save_obj(m, path);
  auto text = testutil::read_text(path);
  CHECK(text.find("f ") == std::string::npos);
  Mesh back = load_obj(path);
  CHECK(back.vertex_count() == 3);
  CHECK(back.face_count() == 0);
}

TEST_CASE("obj round trip is lossless") {
  TempDir dir;
  Rng rng(7);
  Mesh m = testutil::icosphere(2, 0.37);
  m.vertices += 0.01 * rng.normal_matrix(m.vertex_count(), 3);
  auto path = dir.file("roundtrip.obj");
  save_obj(m, path);
  Mesh back = load_obj(path);
  REQUIRE(back.vertex_count() == m.vertex_count());
  REQUIRE(back.face_count() == m.face_count());
  CHECK((back.vertices - m.vertices).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((back.faces - m.faces).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("label sidecar round trip and auto-load") {
  TempDir dir;
  Mesh m = testutil::square_mesh();
  m.labels = {0, 1, 1, 2};
  auto path = dir.file("labeled.obj");
  save_obj(m, path);
  save_labels(m.labels, labels_sidecar_path(path));
  Mesh back = load_obj_with_labels(path);
  REQUIRE(back.has_labels());
  CHECK(back.labels == m.labels);

  auto bare = dir.file("bare.obj");
  save_obj(m, bare);
  Mesh nolabel = load_obj_with_labels(bare);
  CHECK_FALSE(nolabel.has_labels());
}

TEST_CASE("load_labels validates length against explicit count") {
  TempDir dir;
  auto path = dir.file("short.labels.json");
  testutil::write_text(path, "{\"labels\": [0, 1]}");
  auto labels = load_labels(path);
  CHECK(labels.size() == 2);
}

TEST_CASE("validate_mesh rejects bad meshes") {
  Mesh m = testutil::triangle_mesh();
  SUBCASE("face index out of range") {
    m.faces(0, 2) = 3;
    CHECK_THROWS_AS(validate_mesh(m), ValidationError);
  }
  SUBCASE("degenerate face") {
    m.faces(0, 1) = 0;
    CHECK_THROWS_AS(validate_mesh(m), ValidationError);
  }
  SUBCASE("negative index") {
    m.faces(0, 0) = -1;
    CHECK_THROWS_AS(validate_mesh(m), ValidationError);
  }
  SUBCASE("label count mismatch") {
    m.labels = {0, 1};
    CHECK_THROWS_AS(validate_mesh(m), ValidationError);
  }
  SUBCASE("valid mesh passes") { CHECK_NOTHROW(validate_mesh(m)); }
}

TEST_CASE("split_by_labels partitions vertices and keeps intra-label faces") {
  Mesh m = testutil::strip_mesh(3);
  m.labels = {0, 0, 0, 0, 1, 1, 1, 1};
  auto parts = split_by_labels(m);
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].mesh.vertex_count() == 4);
  CHECK(parts[1].mesh.vertex_count() == 4);
  CHECK(parts[0].mesh.face_count() == 2);
  CHECK(parts[1].mesh.face_count() == 2);
  for (size_t p = 0; p < parts.size(); ++p) {
    for (Index i = 0; i < parts[p].mesh.vertex_count(); ++i) {
      int orig = parts[p].original_vertex[size_t(i)];
      CHECK((parts[p].mesh.vertices.row(i) - m.vertices.row(orig)).norm() == 0.0);
    }
  }
}

TEST_CASE("vertex_adjacency gives sorted unique rings") {
  Mesh m = testutil::hexagon_fan_mesh();
  auto adj = vertex_adjacency(m);
  REQUIRE(adj.size() == 7);
  CHECK(adj[0] == std::vector<int>({1, 2, 3, 4, 5, 6}));
  CHECK(adj[1] == std::vector<int>({0, 2, 6}));
}

TEST_CASE("vertex_normals planar square all +z") {
  auto normals = vertex_normals(testutil::square_mesh());
  for (Index i = 0; i < 4; ++i) {
    CHECK(normals(i, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normals(i, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normals(i, 2) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("vertex_normals single triangle all +z") {
  auto normals = vertex_normals(testutil::triangle_mesh());
  for (Index i = 0; i < 3; ++i) CHECK(normals(i, 2) == doctest::Approx(1.0));
}

TEST_CASE("vertex_normals icosphere matches radial directions") {
  Mesh sphere = testutil::icosphere(4);
  auto normals = vertex_normals(sphere);
  double worst = 0;
  for (Index i = 0; i < sphere.vertex_count(); ++i) {
    Vec3 radial = sphere.vertices.row(i).normalized();
    double dot = std::clamp(normals.row(i).dot(radial.transpose()), -1.0, 1.0);
    worst = std::max(worst, std::acos(dot));
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("vertex_normals unit norm and degenerate flags") {
  Mesh m = testutil::icosphere(2);
  // append an unreferenced vertex so its accumulation is empty
  m.vertices.conservativeResize(m.vertex_count() + 1, 3);
  m.vertices.row(m.vertex_count() - 1) << 5, 5, 5;
  std::vector<bool> degenerate;
  auto normals = vertex_normals(m, &degenerate);
  for (Index i = 0; i + 1 < m.vertex_count(); ++i) {
    CHECK(std::abs(normals.row(i).norm() - 1.0) < 1e-9);
    CHECK_FALSE(degenerate[size_t(i)]);
  }
  CHECK(degenerate.back());
  CHECK(normals.row(m.vertex_count() - 1).norm() == 0.0);
}

TEST_CASE("vertex_normals weighting follows face area") {
  // vertex 0 shared by a big +z triangle and a small +x triangle; the
  // accumulated normal must tilt toward +z by the area ratio
  Mesh m;
  m.vertices.resize(5, 3);
  m.vertices << 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0.5, 0, 0, 0, 0.5;
  m.faces.resize(2, 3);
  m.faces << 0, 1, 2, 0, 3, 4;
  auto normals = vertex_normals(m);
  // cross products: big = (0,0,4), small = (0.25,0,0)
  Vec3 expect = Vec3(0.25, 0, 4).normalized();
  CHECK((normals.row(0).transpose() - expect).norm() < 1e-12);
}

TEST_CASE("laplacian_coordinates center of hexagon is zero") {
  auto lc = laplacian_coordinates(testutil::hexagon_fan_mesh());
  CHECK(lc.row(0).norm() < 1e-12);
}

TEST_CASE("laplacian_coordinates one-neighbor vertex is v minus neighbor") {
  // two triangles sharing an edge; vertex 3 has ring {1,2} though, so build a
  // single triangle and query a corner: ring has two members. For a true
  // one-neighbor case use an edge-only path encoded as a degenerate-free pair
  // of triangles is impossible, so check the strip corner against brute force.
  Mesh m = testutil::strip_mesh(2);
  auto lc = laplacian_coordinates(m);
  auto adj = vertex_adjacency(m);
  for (Index i = 0; i < m.vertex_count(); ++i) {
    Vec3 mean = Vec3::Zero();
    for (int j : adj[size_t(i)]) mean += m.vertices.row(j).transpose();
    mean /= double(adj[size_t(i)].size());
    CHECK((lc.row(i).transpose() - (m.vertices.row(i).transpose() - mean)).norm() < 1e-12);
  }
}

TEST_CASE("laplacian_coordinates matches brute force on random mesh") {
  Rng rng(11);
  Mesh m = testutil::icosphere(1);  // 42 vertices
  m.vertices += 0.05 * rng.normal_matrix(m.vertex_count(), 3);
  auto lc = laplacian_coordinates(m);
  auto adj = vertex_adjacency(m);
  for (Index i = 0; i < m.vertex_count(); ++i) {
    Vec3 mean = Vec3::Zero();
    for (int j : adj[size_t(i)]) mean += m.vertices.row(j).transpose();
    mean /= double(adj[size_t(i)].size());
    Vec3 expect = m.vertices.row(i).transpose() - mean;
    CHECK((lc.row(i).transpose() - expect).norm() < 1e-12);
  }
}

TEST_CASE("laplacian_coordinates isolated vertex errors") {
  Mesh m = testutil::triangle_mesh();
  m.vertices.conservativeResize(4, 3);
  m.vertices.row(3) << 9, 9, 9;
  CHECK_THROWS_AS(laplacian_coordinates(m), ValidationError);
}

TEST_CASE("laplacian_coordinates translation invariance") {
  Mesh m = testutil::icosphere(1);
  auto before = laplacian_coordinates(m);
  m.vertices.rowwise() += Eigen::RowVector3d(3.5, -2.25, 0.125);
  auto after = laplacian_coordinates(m);
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("laplacian_smooth_field constant field is a fixed point") {
  Mesh m = testutil::icosphere(1);
  MatX field = MatX::Constant(m.vertex_count(), 4, 0.25);
  MatX out = laplacian_smooth_field(m, field, 25, 0.8);
  CHECK((out - field).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("laplacian_smooth_field step field one iteration lambda 1") {
  Mesh m = testutil::strip_mesh(3);
  MatX field(8, 1);
  field << 0, 0, 0, 0, 1, 1, 1, 1;
  MatX out = laplacian_smooth_field(m, field, 1, 1.0);
  auto adj = vertex_adjacency(m);
  for (Index i = 0; i < 8; ++i) {
    double mean = 0;
    for (int j : adj[size_t(i)]) mean += field(j, 0);
    mean /= double(adj[size_t(i)].size());
    CHECK(out(i, 0) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("laplacian_smooth_field zero iterations is identity") {
  Rng rng(3);
  Mesh m = testutil::icosphere(1);
  MatX field = rng.normal_matrix(m.vertex_count(), 5);
  MatX out = laplacian_smooth_field(m, field, 0, 0.5);
  CHECK((out - field).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian_smooth_field validates lambda and shape") {
  Mesh m = testutil::triangle_mesh();
  MatX field = MatX::Zero(3, 2);
  CHECK_THROWS_AS(laplacian_smooth_field(m, field, 1, 0.0), ValidationError);
  CHECK_THROWS_AS(laplacian_smooth_field(m, field, 1, 1.5), ValidationError);
  CHECK_THROWS_AS(laplacian_smooth_field(m, field, 1, -0.5), ValidationError);
  MatX bad = MatX::Zero(2, 2);
  CHECK_THROWS_AS(laplacian_smooth_field(m, bad, 1, 0.5), ValidationError);
}

TEST_CASE("laplacian_smooth_field preserves row sums of stochastic fields") {
  Rng rng(19);
  Mesh m = testutil::icosphere(2);
  MatX field(m.vertex_count(), 6);
  for (Index i = 0; i < field.rows(); ++i) {
    VecX row = rng.normal_vector(6).array().abs() + 0.01;
    field.row(i) = (row / row.sum()).transpose();
  }
  MatX out = laplacian_smooth_field(m, field, 12, 0.5);
  for (Index i = 0; i < out.rows(); ++i) {
    CHECK(std::abs(out.row(i).sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("laplacian_smooth_field leaves isolated vertices unchanged") {
  Mesh m = testutil::triangle_mesh();
  m.vertices.conservativeResize(4, 3);
  m.vertices.row(3) << 2, 2, 2;
  MatX field(4, 1);
  field << 1, 2, 3, 7;
  MatX out = laplacian_smooth_field(m, field, 5, 1.0);
  CHECK(out(3, 0) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_SUITE_END();
