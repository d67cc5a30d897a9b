#include "gskin/body_model.h"

#include <cmath>

#include "gskin/json_util.h"
#include "gskin/parts.h"
#include "gskin/primitives.h"
#include "gskin/rng.h"

namespace gskin {

namespace {

constexpr std::array<int, kJointCount> kSmplParents = {
    -1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};

Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return m;
}

}  // namespace

void validate_body_model(const BodyModel& model) {
  validate_mesh(model.mesh);
  const Index v = model.vertex_count();
  if (v < 3) throw ValidationError("body model needs at least 3 vertices");
  if (model.shape_basis.rows() != 3 * v || model.shape_basis.cols() != kShapeDim) {
    throw ValidationError("shape_basis must be 3V x 10");
  }
  if (model.pose_basis.rows() != 3 * v || model.pose_basis.cols() != kPoseBlendDim) {
    throw ValidationError("pose_basis must be 3V x 207");
  }
  if (model.joint_regressor.rows() != kJointCount || model.joint_regressor.cols() != v) {
    throw ValidationError("joint_regressor must be 24 x V");
  }
  if ((model.joint_regressor.array() < -1e-6).any()) {
    throw ValidationError("joint_regressor entries must be non-negative");
  }
  for (Index j = 0; j < kJointCount; ++j) {
    if (std::abs(model.joint_regressor.row(j).sum() - 1.0) > 1e-6) {
      throw ValidationError("joint_regressor rows must sum to 1");
    }
  }
  if (model.weights.weights.rows() != v) {
    throw ValidationError("weights must have one row per vertex");
  }
  validate_weights(model.weights);
  if (model.parents.size() != kJointCount || model.parents[0] != -1) {
    throw ValidationError("parents must list 24 joints with parents[0] = -1");
  }
  for (int j = 1; j < kJointCount; ++j) {
    if (model.parents[size_t(j)] < 0 || model.parents[size_t(j)] >= j) {
      throw ValidationError("parents must reference earlier joints (tree order)");
    }
  }
}

Mat3 rodrigues(const Vec3& axis_angle) {
  if (!axis_angle.allFinite()) throw ValidationError("axis-angle must be finite");
  const double theta2 = axis_angle.squaredNorm();
  double sin_over, one_minus_cos_over;
  if (theta2 < 1e-12) {
    sin_over = 1.0 - theta2 / 6.0;
    one_minus_cos_over = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    sin_over = std::sin(theta) / theta;
    one_minus_cos_over = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 k = skew(axis_angle);
  return Mat3::Identity() + sin_over * k + one_minus_cos_over * (k * k);
}

std::array<Mat3, 3> rodrigues_jacobian(const Vec3& axis_angle) {
  const Mat3 rot = rodrigues(axis_angle);
  const double theta2 = axis_angle.squaredNorm();
  std::array<Mat3, 3> jac;
  if (theta2 < 1e-12) {
    for (int k = 0; k < 3; ++k) jac[size_t(k)] = skew(Vec3::Unit(k)) * rot;
    return jac;
  }
  const Mat3 eye_minus = Mat3::Identity() - rot;
  for (int k = 0; k < 3; ++k) {
    const Vec3 cross = axis_angle.cross(eye_minus.col(k));
    jac[size_t(k)] = ((axis_angle[k] * skew(axis_angle) + skew(cross)) / theta2) * rot;
  }
  return jac;
}

VecX pose_feature(const VecX& theta) {
  if (theta.size() != kThetaDim) throw ValidationError("theta must have 72 entries");
  VecX feat(kPoseBlendDim);
  for (int j = 1; j < kJointCount; ++j) {
    const Mat3 dev = rodrigues(theta.segment<3>(3 * j)) - Mat3::Identity();
    Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(
        feat.data() + 9 * (j - 1)) = dev;
  }
  return feat;
}

Mesh rest_body(const BodyModel& model, const VecX& beta, const VecX& theta) {
  if (beta.size() != kShapeDim) throw ValidationError("beta must have 10 entries");
  Mesh out = model.mesh;
  VecX offset = model.shape_basis * beta + model.pose_basis * pose_feature(theta);
  out.vertices += unflatten_rows(offset);
  return out;
}

Points joints(const BodyModel& model, const VecX& beta) {
  if (beta.size() != kShapeDim) throw ValidationError("beta must have 10 entries");
  Points shaped = model.mesh.vertices + unflatten_rows(model.shape_basis * beta);
  return model.joint_regressor * shaped;
}

std::vector<Mat4> forward_kinematics(const Points& rest_joints, const Pose& pose,
                                     const std::vector<int>& parents) {
  if (rest_joints.rows() != kJointCount) throw ValidationError("need 24 rest joints");
  if (parents.size() != kJointCount) throw ValidationError("need 24 parent entries");
  if (pose.theta.size() != kThetaDim) throw ValidationError("theta must have 72 entries");
  std::vector<Mat4> global(kJointCount, Mat4::Identity());
  for (int j = 0; j < kJointCount; ++j) {
    Mat4 local = Mat4::Identity();
    local.topLeftCorner<3, 3>() = rodrigues(pose.joint(j));
    const Vec3 rest = rest_joints.row(j).transpose();
    if (parents[size_t(j)] < 0) {
      local.topRightCorner<3, 1>() = rest;
      global[size_t(j)] = local;
    } else {
      const Vec3 parent_rest = rest_joints.row(parents[size_t(j)]).transpose();
      local.topRightCorner<3, 1>() = rest - parent_rest;
      global[size_t(j)] = global[size_t(parents[size_t(j)])] * local;
    }
  }
  // convert to rest-to-posed transforms: subtract each joint's rest position
  for (int j = 0; j < kJointCount; ++j) {
    const Vec3 rest = rest_joints.row(j).transpose();
    global[size_t(j)].topRightCorner<3, 1>() -=
        global[size_t(j)].topLeftCorner<3, 3>() * rest;
  }
  return global;
}

Points lbs(const Points& rest_vertices, const std::vector<Mat4>& transforms,
           const SkinWeights& weights) {
  if (weights.weights.rows() != rest_vertices.rows()) {
    throw ValidationError("weights row count must match vertex count");
  }
  if (weights.weights.cols() != Index(transforms.size())) {
    throw ValidationError("one transform per weight column required");
  }
  for (Index i = 0; i < weights.weights.rows(); ++i) {
    if (std::abs(weights.weights.row(i).sum() - 1.0) > 1e-4) {
      throw ValidationError("weight row " + std::to_string(i) + " does not sum to 1");
    }
  }
  Points out = Points::Zero(rest_vertices.rows(), 3);
  for (size_t j = 0; j < transforms.size(); ++j) {
    const auto col = weights.weights.col(Index(j));
    if ((col.array() == 0).all()) continue;
    const Mat3 rot = transforms[j].topLeftCorner<3, 3>();
    const Vec3 t = transforms[j].topRightCorner<3, 1>();
    Points moved = rest_vertices * rot.transpose();
    moved.rowwise() += t.transpose();
    out += col.asDiagonal() * moved;
  }
  return out;
}

Mesh body_mesh(const BodyModel& model, const VecX& beta, const Pose& pose) {
  Mesh rest = rest_body(model, beta, pose.theta);
  const Points rest_joints = joints(model, beta);
  const auto transforms = forward_kinematics(rest_joints, pose, model.parents);
  rest.vertices = lbs(rest.vertices, transforms, model.weights);
  rest.vertices.rowwise() += pose.translation.transpose();
  return rest;
}

Points posed_joints(const BodyModel& model, const VecX& beta, const Pose& pose) {
  const Points rest_joints = joints(model, beta);
  const auto transforms = forward_kinematics(rest_joints, pose, model.parents);
  Points out(kJointCount, 3);
  for (int j = 0; j < kJointCount; ++j) {
    const Vec3 rest = rest_joints.row(j).transpose();
    out.row(j) = (transforms[size_t(j)].topLeftCorner<3, 3>() * rest +
                  transforms[size_t(j)].topRightCorner<3, 1>() +
                  pose.translation)
                     .transpose();
  }
  return out;
}

Points synth_skeleton() {
  Points j(kJointCount, 3);
  j.row(0) << 0, 0, 0;          // pelvis
  j.row(1) << 0.09, -0.05, 0;   // left hip
  j.row(2) << -0.09, -0.05, 0;  // right hip
  j.row(3) << 0, 0.12, 0;       // lower spine
  j.row(4) << 0.10, -0.50, 0;   // left knee
  j.row(5) << -0.10, -0.50, 0;  // right knee
  j.row(6) << 0, 0.25, 0;       // mid spine
  j.row(7) << 0.10, -0.95, 0;   // left ankle
  j.row(8) << -0.10, -0.95, 0;  // right ankle
  j.row(9) << 0, 0.38, 0;       // upper spine
  j.row(10) << 0.10, -1.00, 0.08;   // left foot
  j.row(11) << -0.10, -1.00, 0.08;  // right foot
  j.row(12) << 0, 0.55, 0;      // neck
  j.row(13) << 0.07, 0.45, 0;   // left collar
  j.row(14) << -0.07, 0.45, 0;  // right collar
  j.row(15) << 0, 0.70, 0;      // head
  j.row(16) << 0.18, 0.45, 0;   // left shoulder
  j.row(17) << -0.18, 0.45, 0;  // right shoulder
  j.row(18) << 0.45, 0.45, 0;   // left elbow
  j.row(19) << -0.45, 0.45, 0;  // right elbow
  j.row(20) << 0.70, 0.45, 0;   // left wrist
  j.row(21) << -0.70, 0.45, 0;  // right wrist
  j.row(22) << 0.78, 0.45, 0;   // left hand
  j.row(23) << -0.78, 0.45, 0;  // right hand
  return j;
}

namespace {

struct TubeSpec {
  Vec3 a, b;
  double radius;
  int label;
};

// joints covered by each tube when building the ring-average regressor
int owning_tube(int joint) {
  switch (joint) {
    case 1: case 4: case 7: case 10: return 1;  // left leg
    case 2: case 5: case 8: case 11: return 2;  // right leg
    case 16: case 18: case 20: case 22: return 3;  // left arm
    case 17: case 19: case 21: case 23: return 4;  // right arm
    default: return 0;  // torso chain
  }
}

}  // namespace

BodyModel synth_body_model(uint64_t seed, int n_ring, int n_segments) {
  if (n_ring < 3) throw ValidationError("n_ring must be at least 3");
  if (n_segments < 24) throw ValidationError("n_segments must be at least 24");
  const Points skeleton = synth_skeleton();

  const std::vector<TubeSpec> specs = {
      {Vec3(0, -0.05, 0), Vec3(0, 0.72, 0), 0.14, kTorso},
      {skeleton.row(1).transpose(), Vec3(0.10, -1.0, 0), 0.05, kLeftLeg},
      {skeleton.row(2).transpose(), Vec3(-0.10, -1.0, 0), 0.05, kRightLeg},
      {skeleton.row(16).transpose(), skeleton.row(22).transpose(), 0.05, kLeftArm},
      {skeleton.row(17).transpose(), skeleton.row(23).transpose(), 0.05, kRightArm},
  };
  double max_len = 0;
  for (const auto& s : specs) max_len = std::max(max_len, (s.b - s.a).norm());

  BodyModel model;
  model.mesh.labels = {};
  std::vector<Tube> tubes;
  std::vector<int> tube_offsets;
  for (const auto& s : specs) {
    const double len = (s.b - s.a).norm();
    const int rings = std::max(3, int(std::lround(n_segments * len / max_len)));
    Tube tube = make_tube(s.a, s.b, s.radius, n_ring, rings, true, true);
    tube.mesh.labels.assign(size_t(tube.mesh.vertex_count()), s.label);
    tube_offsets.push_back(append_mesh(model.mesh, tube.mesh, s.label));
    tubes.push_back(std::move(tube));
  }
  // torso bottom band doubles as the pelvis part
  for (Index i = 0; i < model.vertex_count(); ++i) {
    if (model.mesh.labels[size_t(i)] == kTorso && model.mesh.vertices(i, 1) < 0.08) {
      model.mesh.labels[size_t(i)] = kPelvis;
    }
  }
  const Index v = model.vertex_count();

  model.parents.assign(kSmplParents.begin(), kSmplParents.end());

  // regressor: uniform over the owning tube's ring nearest each joint
  model.joint_regressor = MatX::Zero(kJointCount, v);
  for (int j = 0; j < kJointCount; ++j) {
    const Tube& tube = tubes[size_t(owning_tube(j))];
    const int offset = tube_offsets[size_t(owning_tube(j))];
    Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < tube.ring_centers.rows(); ++r) {
      const double d = (tube.ring_centers.row(r) - skeleton.row(j)).norm();
      if (d < best_dist) {
        best_dist = d;
        best = r;
      }
    }
    const auto& ring = tube.rings[size_t(best)];
    for (int idx : ring) model.joint_regressor(j, offset + idx) = 1.0 / double(ring.size());
  }

  // weights: gaussian falloff from each bone segment (joint to mean child)
  std::vector<std::vector<int>> children(kJointCount);
  for (int j = 1; j < kJointCount; ++j) children[size_t(model.parents[size_t(j)])].push_back(j);
  MatX w(v, kJointCount);
  const double sigma2 = 0.1 * 0.1;
  for (Index i = 0; i < v; ++i) {
    const Vec3 p = model.mesh.vertices.row(i).transpose();
    for (int j = 0; j < kJointCount; ++j) {
      const Vec3 a = skeleton.row(j).transpose();
      Vec3 b = a;
      if (!children[size_t(j)].empty()) {
        b = Vec3::Zero();
        for (int c : children[size_t(j)]) b += skeleton.row(c).transpose();
        b /= double(children[size_t(j)].size());
      }
      const Vec3 ab = b - a;
      double t = ab.squaredNorm() > 1e-12 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double d2 = (p - (a + t * ab)).squaredNorm();
      w(i, j) = std::exp(-d2 / sigma2);
    }
    w.row(i) /= w.row(i).sum();
  }
  model.weights.weights = std::move(w);

  Rng rng(seed);
  MatX raw = rng.normal_matrix(3 * v, kShapeDim);
  Eigen::HouseholderQR<MatX> qr(raw);
  MatX q = qr.householderQ() * MatX::Identity(3 * v, kShapeDim);
  model.shape_basis = 0.05 * q;
  model.pose_basis = MatX::Zero(3 * v, kPoseBlendDim);

  validate_body_model(model);
  return model;
}

void save_body_model(const BodyModel& model, const std::string& path) {
  validate_body_model(model);
  nlohmann::json doc;
  doc["vertices"] = matrix_to_json(model.mesh.vertices);
  nlohmann::json faces = nlohmann::json::array();
  for (Index f = 0; f < model.mesh.face_count(); ++f) {
    faces.push_back({model.mesh.faces(f, 0), model.mesh.faces(f, 1), model.mesh.faces(f, 2)});
  }
  doc["faces"] = std::move(faces);
  doc["shape_basis"] = matrix_to_json(model.shape_basis);
  doc["pose_basis"] = matrix_to_json(model.pose_basis);
  doc["joint_regressor"] = matrix_to_json(model.joint_regressor);
  doc["weights"] = matrix_to_json(model.weights.weights);
  doc["parents"] = model.parents;
  if (model.mesh.has_labels()) doc["labels"] = model.mesh.labels;
  save_json(doc, path);
}

BodyModel load_body_model(const std::string& path) {
  const nlohmann::json doc = load_json(path);
  for (const char* key :
       {"vertices", "faces", "shape_basis", "pose_basis", "joint_regressor",
        "weights", "parents"}) {
    if (!doc.contains(key)) throw ParseError(path + ": missing field " + key);
  }
  BodyModel model;
  const MatX verts = matrix_from_json(doc["vertices"], 3, "vertices");
  model.mesh.vertices = verts;
  const MatX faces = matrix_from_json(doc["faces"], 3, "faces");
  model.mesh.faces.resize(faces.rows(), 3);
  for (Index i = 0; i < faces.rows(); ++i) {
    for (int k = 0; k < 3; ++k) model.mesh.faces(i, k) = int(std::lround(faces(i, k)));
  }
  model.shape_basis = matrix_from_json(doc["shape_basis"], kShapeDim, "shape_basis");
  model.pose_basis = matrix_from_json(doc["pose_basis"], kPoseBlendDim, "pose_basis");
  model.joint_regressor = matrix_from_json(doc["joint_regressor"], -1, "joint_regressor");
  model.weights.weights = matrix_from_json(doc["weights"], kJointCount, "weights");
  if (!doc["parents"].is_array() || doc["parents"].size() != kJointCount) {
    throw ParseError(path + ": parents must have 24 entries");
  }
  model.parents.clear();
  for (const auto& p : doc["parents"]) model.parents.push_back(p.get<int>());
  if (doc.contains("labels")) {
    for (const auto& t : doc["labels"]) model.mesh.labels.push_back(t.get<int>());
  }
  validate_body_model(model);
  return model;
}

}  // namespace gskin
