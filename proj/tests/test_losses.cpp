#include <doctest.h>

#include <cmath>
#include <vector>

#include "gskin/losses.h"
#include "gskin/mesh.h"
#include "gskin/normals.h"
#include "gskin/rng.h"
#include "test_utils.h"

using namespace gskin;
using testutil::finite_difference_gradient;
using testutil::icosphere;
using testutil::max_gradient_mismatch;

namespace {

Mesh translated(Mesh m, const Vec3& t) {
  m.vertices.rowwise() += t.transpose();
  return m;
}

Mesh flipped(Mesh m) {
  for (Index f = 0; f < m.face_count(); ++f) std::swap(m.faces(f, 1), m.faces(f, 2));
  return m;
}

Mesh rigid(const Mesh& m, const Mat3& r, const Vec3& t) {
  Mesh out = m;
  out.vertices = (m.vertices * r.transpose()).rowwise() + t.transpose();
  return out;
}

double interpenetration_oracle(const Mesh& p, const Mesh& q,
                               const std::vector<CorrespondencePair>& pairs) {
  if (pairs.empty()) return 0.0;
  const Points nq = vertex_normals(q);
  double sum = 0;
  for (const auto& pair : pairs) {
    const Vec3 d = (p.vertices.row(pair.source) - q.vertices.row(pair.target)).transpose();
    const double depth = -nq.row(pair.target).dot(d.transpose());
    if (depth > 0) sum += depth;
  }
  return sum / double(pairs.size());
}

}  // namespace

TEST_SUITE_BEGIN("losses");

TEST_CASE("camera and pair config validation") {
  CHECK_NOTHROW(validate_camera(Camera{}));
  Camera bad;
  bad.fx = 0;
  CHECK_THROWS_AS(validate_camera(bad), ValidationError);
  bad = Camera{};
  bad.fy = -1;
  CHECK_THROWS_AS(validate_camera(bad), ValidationError);

  CHECK_NOTHROW(validate_pair_config(PairConfig{}));
  PairConfig cfg;
  cfg.max_distance = 0;
  CHECK_THROWS_AS(validate_pair_config(cfg), ValidationError);
  cfg = PairConfig{};
  cfg.max_normal_angle = 4.0;
  CHECK_THROWS_AS(validate_pair_config(cfg), ValidationError);
}

TEST_CASE("project maps on-axis and offset points") {
  const Camera cam{1000, 1000, 500, 500};
  Points p(2, 3);
  p << 0, 0, 1, 0.1, 0, 1;
  const MatX px = project(cam, p);
  CHECK(px(0, 0) == 500.0);
  CHECK(px(0, 1) == 500.0);
  CHECK(px(1, 0) == doctest::Approx(600.0).epsilon(1e-12));
  CHECK(px(1, 1) == 500.0);

  // doubling the depth halves the offset from the principal point
  Points far = p;
  far.col(2).array() *= 2.0;
  const MatX far_px = project(cam, far);
  CHECK(far_px(1, 0) - cam.cx == doctest::Approx(0.5 * (px(1, 0) - cam.cx)).epsilon(1e-12));

  Points behind(1, 3);
  behind << 0, 0, 0;
  CHECK_THROWS_AS(project(cam, behind), ValidationError);
  behind(0, 2) = -1;
  CHECK_THROWS_AS(project(cam, behind), ValidationError);
  behind(0, 2) = 1e-7;
  CHECK_THROWS_AS(project(cam, behind), ValidationError);
}

TEST_CASE("project and unproject round trip") {
  const Camera cam;
  Rng rng(3);
  Points p(20, 3);
  for (Index i = 0; i < p.rows(); ++i) {
    p.row(i) << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 3.0);
  }
  const MatX px = project(cam, p);
  for (Index i = 0; i < p.rows(); ++i) {
    const Vec3 back = unproject(cam, px.row(i).transpose(), p(i, 2));
    CHECK((back - p.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(unproject(cam, Vec2(0, 0), 0.0), ValidationError);
}

TEST_CASE("param losses hand values") {
  const VecX beta = VecX::Zero(kShapeDim);
  const VecX alpha = VecX::Zero(8);
  const Pose rest;

  const ParamLosses zero = param_losses(beta, rest, alpha, beta, rest, alpha);
  CHECK(zero.body == 0.0);
  CHECK(zero.garment == 0.0);

  VecX beta_off = beta;
  beta_off[0] += 1.0;
  CHECK(param_losses(beta_off, rest, alpha, beta, rest, alpha).body == 1.0);

  // root turned by pi about z against identity: ||diag(-1,-1,1) - I||^2 = 8
  Pose turned;
  turned.joint(0) = Vec3(0, 0, EIGEN_PI);
  CHECK(param_losses(beta, turned, alpha, beta, rest, alpha).body ==
        doctest::Approx(8.0).epsilon(1e-12));

  VecX alpha_off = alpha;
  alpha_off[2] = 0.5;
  CHECK(param_losses(beta, rest, alpha_off, beta, rest, alpha).garment ==
        doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(param_losses(VecX::Zero(3), rest, alpha, beta, rest, alpha),
                  ValidationError);
  CHECK_THROWS_AS(param_losses(beta, rest, VecX::Zero(2), beta, rest, alpha),
                  ValidationError);
}

TEST_CASE("param loss gradients match finite differences") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const VecX gt_beta = rng.normal_vector(kShapeDim);
    const VecX gt_alpha = rng.normal_vector(8);
    Pose gt_pose;
    gt_pose.theta = 0.4 * rng.normal_vector(kThetaDim);
    gt_pose.translation = rng.normal_vector(3);

    VecX x(kShapeDim + kThetaDim + 3 + 8);
    x << rng.normal_vector(kShapeDim), 0.4 * rng.normal_vector(kThetaDim),
        rng.normal_vector(3), rng.normal_vector(8);

    auto unpack = [&](const VecX& v) {
      VecX beta = v.segment(0, kShapeDim);
      Pose pose;
      pose.theta = v.segment(kShapeDim, kThetaDim);
      pose.translation = v.segment(kShapeDim + kThetaDim, 3);
      VecX alpha = v.segment(kShapeDim + kThetaDim + 3, 8);
      return std::tuple{beta, pose, alpha};
    };
    auto f = [&](const VecX& v) {
      const auto [beta, pose, alpha] = unpack(v);
      const ParamLosses l = param_losses(beta, pose, alpha, gt_beta, gt_pose, gt_alpha);
      return l.body + l.garment;
    };

    const auto [beta, pose, alpha] = unpack(x);
    const ParamGradients g =
        param_loss_gradients(beta, pose, alpha, gt_beta, gt_pose, gt_alpha);
    VecX analytic(x.size());
    analytic << g.beta, g.theta, g.translation, VecX(g.alpha);
    CHECK(max_gradient_mismatch(analytic, finite_difference_gradient(f, x)) < 1e-4);
  }
}

TEST_CASE("geometry losses hand values and loop oracle") {
  Rng rng(7);
  Points v(12, 3), j(5, 3);
  for (Index i = 0; i < v.rows(); ++i) v.row(i) = rng.normal_vector(3).transpose();
  for (Index i = 0; i < j.rows(); ++i) j.row(i) = rng.normal_vector(3).transpose();

  const GeometryLosses zero = geometry_losses(v, v, j, j);
  CHECK(zero.garment == 0.0);
  CHECK(zero.joints == 0.0);

  Points off = v;
  off(4, 2) += 0.1;
  CHECK(geometry_losses(off, v, j, j).garment == doctest::Approx(0.01).epsilon(1e-12));

  Points v2 = v, j2 = j;
  for (Index i = 0; i < v2.rows(); ++i) v2.row(i) += 0.1 * rng.normal_vector(3).transpose();
  for (Index i = 0; i < j2.rows(); ++i) j2.row(i) += 0.1 * rng.normal_vector(3).transpose();
  double vertex_sum = 0, joint_sum = 0;
  for (Index i = 0; i < v.rows(); ++i)
    for (int c = 0; c < 3; ++c) vertex_sum += (v2(i, c) - v(i, c)) * (v2(i, c) - v(i, c));
  for (Index i = 0; i < j.rows(); ++i)
    for (int c = 0; c < 3; ++c) joint_sum += (j2(i, c) - j(i, c)) * (j2(i, c) - j(i, c));
  const GeometryLosses l = geometry_losses(v2, v, j2, j);
  CHECK(l.garment == doctest::Approx(vertex_sum).epsilon(1e-12));
  CHECK(l.joints == doctest::Approx(joint_sum).epsilon(1e-12));

  const GeometryGradients g = geometry_loss_gradients(v2, v, j2, j);
  CHECK((g.vertices - 2.0 * (v2 - v)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.joints - 2.0 * (j2 - j)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(geometry_losses(v.topRows(3), v, j, j), ValidationError);
  CHECK_THROWS_AS(geometry_losses(v, v, j.topRows(2), j), ValidationError);
}

TEST_CASE("displacement losses constant offsets and kernel") {
  const Mesh tri = testutil::triangle_mesh();
  const Points zero = Points::Zero(3, 3);
  Points offset = zero;
  offset.array() += 0.25;

  const DisplacementLosses same = displacement_losses(offset, offset, tri);
  CHECK(same.l1 == 0.0);
  CHECK(same.laplacian == 0.0);

  // constant difference: l1 counts every entry, the laplacian term dies
  const DisplacementLosses l = displacement_losses(offset, zero, tri);
  CHECK(l.l1 == 9 * 0.25);
  CHECK(l.laplacian == 0.0);

  const Mesh fan = testutil::hexagon_fan_mesh();
  Points fan_offset = Points::Zero(7, 3);
  fan_offset.col(1).array() = 0.3;
  CHECK(displacement_losses(fan_offset, Points::Zero(7, 3), fan).laplacian < 1e-30);

  CHECK_THROWS_AS(displacement_losses(zero, Points::Zero(5, 3), tri), ValidationError);
  CHECK_THROWS_AS(displacement_losses(Points::Zero(5, 3), Points::Zero(5, 3), tri),
                  ValidationError);
}

TEST_CASE("displacement losses match a loop oracle") {
  const Mesh fan = testutil::hexagon_fan_mesh();
  const auto adjacency = vertex_adjacency(fan);
  Rng rng(11);
  Points pred(7, 3), gt(7, 3);
  for (Index i = 0; i < 7; ++i) {
    pred.row(i) = rng.normal_vector(3).transpose();
    gt.row(i) = rng.normal_vector(3).transpose();
  }

  double l1 = 0;
  for (Index i = 0; i < 7; ++i)
    for (int c = 0; c < 3; ++c) l1 += std::abs(pred(i, c) - gt(i, c));
  double lap = 0;
  const Points diff = pred - gt;
  for (Index i = 0; i < 7; ++i) {
    Vec3 r = diff.row(i).transpose();
    for (int n : adjacency[size_t(i)])
      r -= diff.row(n).transpose() / double(adjacency[size_t(i)].size());
    lap += r.squaredNorm();
  }

  const DisplacementLosses l = displacement_losses(pred, gt, fan);
  CHECK(l.l1 == doctest::Approx(l1).epsilon(1e-10));
  CHECK(l.laplacian == doctest::Approx(lap).epsilon(1e-10));
}

TEST_CASE("displacement gradients match finite differences") {
  const Mesh fan = testutil::hexagon_fan_mesh();
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Rng rng(100 + seed);
    Points pred(7, 3), gt(7, 3);
    for (Index i = 0; i < 7; ++i) {
      pred.row(i) = rng.normal_vector(3).transpose();
      for (int c = 0; c < 3; ++c) {
        // keep pred - gt away from the l1 kink
        const double gap = rng.uniform(0.1, 0.3) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        gt(i, c) = pred(i, c) + gap;
      }
    }
    const DisplacementGradients g = displacement_loss_gradients(pred, gt, fan);
    auto f1 = [&](const VecX& v) {
      return displacement_losses(unflatten_rows(v), gt, fan).l1;
    };
    auto f2 = [&](const VecX& v) {
      return displacement_losses(unflatten_rows(v), gt, fan).laplacian;
    };
    const VecX x = flatten_rows(pred);
    CHECK(max_gradient_mismatch(flatten_rows(g.l1), finite_difference_gradient(f1, x)) <
          1e-4);
    CHECK(max_gradient_mismatch(flatten_rows(g.laplacian),
                                finite_difference_gradient(f2, x)) < 1e-4);
  }
}

TEST_CASE("projection losses shift and loop oracle") {
  const Camera cam;
  Rng rng(13);
  Points p(10, 3);
  for (Index i = 0; i < p.rows(); ++i) {
    p.row(i) << rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.8, 2.0);
  }
  CHECK(projection_loss(cam, p, p) == 0.0);

  // shifting each x by z/fx moves every projection exactly one pixel
  Points shifted = p;
  shifted.col(0) += p.col(2) / cam.fx;
  CHECK(projection_loss(cam, shifted, p) == doctest::Approx(double(p.rows())).epsilon(1e-9));

  Points q = p;
  for (Index i = 0; i < q.rows(); ++i) q.row(i) += 0.05 * rng.normal_vector(3).transpose();
  double oracle = 0;
  for (Index i = 0; i < p.rows(); ++i) {
    const double du = (cam.fx * q(i, 0) / q(i, 2) + cam.cx) -
                      (cam.fx * p(i, 0) / p(i, 2) + cam.cx);
    const double dv = (cam.fy * q(i, 1) / q(i, 2) + cam.cy) -
                      (cam.fy * p(i, 1) / p(i, 2) + cam.cy);
    oracle += du * du + dv * dv;
  }
  CHECK(projection_loss(cam, q, p) == doctest::Approx(oracle).epsilon(1e-12));

  const ProjectionLosses both = projection_losses(cam, q, p, p, p);
  CHECK(both.body == projection_loss(cam, q, p));
  CHECK(both.garment == 0.0);
}

TEST_CASE("projection gradients match finite differences") {
  const Camera cam;
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Rng rng(200 + seed);
    Points pred(8, 3), gt(8, 3);
    for (Index i = 0; i < 8; ++i) {
      pred.row(i) << rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.8, 2.0);
      gt.row(i) << rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.8, 2.0);
    }
    const Points g = projection_loss_gradients(cam, pred, gt);
    auto f = [&](const VecX& v) { return projection_loss(cam, unflatten_rows(v), gt); };
    CHECK(max_gradient_mismatch(flatten_rows(g),
                                finite_difference_gradient(f, flatten_rows(pred))) < 1e-4);
  }
}

TEST_CASE("find_pairs filters by distance and normals") {
  const Mesh q = testutil::square_mesh();
  const PairConfig cfg;

  const auto close = find_pairs(translated(q, Vec3(0, 0, 0.01)), q, cfg);
  REQUIRE(close.size() == 4);
  for (const auto& pair : close) {
    CHECK(pair.source == pair.target);
    CHECK(pair.distance == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(pair.normal_angle == 0.0);
  }

  CHECK(find_pairs(translated(q, Vec3(5, 0, 0)), q, cfg).empty());
  CHECK(find_pairs(translated(q, Vec3(0, 0, 0.019)), q, cfg).size() == 4);
  CHECK(find_pairs(translated(q, Vec3(0, 0, 0.021)), q, cfg).empty());

  // anti-aligned normals are rejected even at zero distance
  CHECK(find_pairs(translated(flipped(q), Vec3(0, 0, 0.01)), q, cfg).empty());
  PairConfig wide;
  wide.max_normal_angle = EIGEN_PI;
  CHECK(find_pairs(translated(flipped(q), Vec3(0, 0, 0.01)), q, wide).size() == 4);
}

TEST_CASE("find_pairs matches a brute-force oracle") {
  const Mesh q = testutil::strip_mesh(4);
  const Points qn = vertex_normals(q);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Rng rng(300 + seed);
    Mesh p = testutil::strip_mesh(4);
    for (Index i = 0; i < p.vertex_count(); ++i) {
      p.vertices.row(i) += 0.012 * rng.normal_vector(3).transpose();
    }
    const Points pn = vertex_normals(p);
    const PairConfig cfg;
    const auto pairs = find_pairs(p, q, cfg);

    std::vector<CorrespondencePair> oracle;
    for (Index i = 0; i < p.vertex_count(); ++i) {
      Index best = 0;
      double best_d = (p.vertices.row(i) - q.vertices.row(0)).norm();
      for (Index j = 1; j < q.vertex_count(); ++j) {
        const double d = (p.vertices.row(i) - q.vertices.row(j)).norm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best_d > cfg.max_distance) continue;
      const double cos_angle =
          std::clamp<double>(pn.row(i).dot(qn.row(best)), -1.0, 1.0);
      const double angle = std::acos(cos_angle);
      if (angle > cfg.max_normal_angle) continue;
      oracle.push_back({i, best, best_d, angle});
    }

    REQUIRE(pairs.size() == oracle.size());
    for (size_t k = 0; k < pairs.size(); ++k) {
      CHECK(pairs[k].source == oracle[k].source);
      CHECK(pairs[k].target == oracle[k].target);
      CHECK(pairs[k].distance == doctest::Approx(oracle[k].distance).epsilon(1e-14));
      CHECK(pairs[k].normal_angle ==
            doctest::Approx(oracle[k].normal_angle).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpenetration hand value and empty behavior") {
  const Mesh q = testutil::square_mesh();
  const Mesh p_in = translated(testutil::triangle_mesh(), Vec3(0, 0, -0.02));
  const Mesh p_out = translated(testutil::triangle_mesh(), Vec3(0, 0, 0.02));

  CHECK(interpenetration_loss(p_in, q, {}) == 0.0);

  const std::vector<CorrespondencePair> one = {{0, 0, 0.02, 0.0}};
  CHECK(interpenetration_loss(p_in, q, one) == 0.02);
  CHECK(interpenetration_loss(p_out, q, one) == 0.0);

  const std::vector<CorrespondencePair> bad = {{0, 9, 0.0, 0.0}};
  CHECK_THROWS_AS(interpenetration_loss(p_in, q, bad), ValidationError);
}

TEST_CASE("interpenetration of nested and separated spheres") {
  const Mesh outer = icosphere(3, 0.1);

  for (double depth : {0.005, 0.02}) {
    const Mesh inner = icosphere(2, 0.1 - depth);
    PairConfig cfg;
    cfg.max_distance = depth + 0.01;
    const auto pairs = find_pairs(inner, outer, cfg);
    REQUIRE(pairs.size() == size_t(inner.vertex_count()));
    const double loss = interpenetration_loss(inner, outer, pairs);
    CHECK(loss == doctest::Approx(depth).epsilon(0.05));
    CHECK(std::abs(loss - interpenetration_oracle(inner, outer, pairs)) < 1e-15);
  }

  const Mesh far = translated(icosphere(2, 0.095), Vec3(1, 0, 0));
  const auto empty = find_pairs(far, outer, PairConfig{});
  CHECK(empty.empty());
  CHECK(interpenetration_loss(far, outer, empty) == 0.0);
}

TEST_CASE("interpenetration is invariant under a common rigid motion") {
  const Mesh outer = icosphere(3, 0.1);
  const Mesh inner = icosphere(2, 0.094);
  PairConfig cfg;
  cfg.max_distance = 0.02;
  const double base = interpenetration_loss(inner, outer, find_pairs(inner, outer, cfg));
  CHECK(base > 0.004);

  const Mat3 r = rodrigues(Vec3(0.3, -0.5, 0.8));
  const Vec3 t(0.2, -0.1, 0.4);
  const Mesh inner_r = rigid(inner, r, t);
  const Mesh outer_r = rigid(outer, r, t);
  const double moved =
      interpenetration_loss(inner_r, outer_r, find_pairs(inner_r, outer_r, cfg));
  CHECK(std::abs(moved - base) < 1e-9);
}

TEST_CASE("interpenetration gradients match finite differences") {
  const Mesh outer = icosphere(3, 0.1);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    Rng rng(400 + seed);
    Mesh probe = icosphere(1, 1.0);
    for (Index i = 0; i < probe.vertex_count(); ++i) {
      // radial offset away from the kink on both sides
      const double off = rng.uniform(0.0015, 0.004) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      probe.vertices.row(i) *= 0.1 + off;
    }
    PairConfig cfg;
    cfg.max_distance = 0.02;
    cfg.max_normal_angle = EIGEN_PI;
    const auto pairs = find_pairs(probe, outer, cfg);
    REQUIRE(pairs.size() == size_t(probe.vertex_count()));

    const Points g = interpenetration_gradients(probe, outer, pairs);
    auto f = [&](const VecX& v) {
      Mesh moved = probe;
      moved.vertices = unflatten_rows(v);
      return interpenetration_loss(moved, outer, pairs);
    };
    CHECK(max_gradient_mismatch(
              flatten_rows(g), finite_difference_gradient(f, flatten_rows(probe.vertices))) <
          1e-4);
  }
}

TEST_CASE("layered interpenetration adds rest and posed terms") {
  const Mesh body = icosphere(3, 0.1);
  const Mesh outside = icosphere(2, 0.112);
  const Mesh inside = icosphere(2, 0.094);
  PairConfig cfg;
  cfg.max_distance = 0.02;

  CHECK(layered_interpenetration(outside, body, outside, body, cfg) == 0.0);

  const double posed_only = interpenetration_loss(inside, body, find_pairs(inside, body, cfg));
  CHECK(posed_only > 0);
  CHECK(layered_interpenetration(outside, body, inside, body, cfg) == posed_only);

  const Mesh deeper = icosphere(2, 0.088);
  const double rest_term = interpenetration_loss(deeper, body, find_pairs(deeper, body, cfg));
  CHECK(layered_interpenetration(deeper, body, inside, body, cfg) ==
        doctest::Approx(rest_term + posed_only).epsilon(1e-12));
}

TEST_SUITE_END();
