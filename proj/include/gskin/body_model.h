#pragma once

#include <array>
#include <string>
#include <vector>

#include "gskin/mesh.h"
#include "gskin/skin_weights.h"
#include "gskin/types.h"

namespace gskin {

// Axis-angle pose for the 24-joint skeleton plus a global translation.
struct Pose {
  VecX theta = VecX::Zero(kThetaDim);
  Vec3 translation = Vec3::Zero();

  Eigen::Map<const Vec3> joint(int j) const {
    return Eigen::Map<const Vec3>(theta.data() + 3 * j);
  }
  Eigen::Map<Vec3> joint(int j) { return Eigen::Map<Vec3>(theta.data() + 3 * j); }
};

// Parametric body: template mesh, linear shape/pose correctives, joint
// regressor, skinning weights, kinematic tree. Vertices deform as
//   posed = lbs(template + shape_basis*beta + pose_basis*pose_feature(theta))
// with joints regressed from the shape-blended vertices.
struct BodyModel {
  Mesh mesh;
  MatX shape_basis;      // 3V x 10, row-major vertex blocks (x,y,z per vertex)
  MatX pose_basis;       // 3V x 207
  MatX joint_regressor;  // 24 x V
  SkinWeights weights;   // V x 24
  std::vector<int> parents;  // parents[0] == -1

  Index vertex_count() const { return mesh.vertex_count(); }
};

void validate_body_model(const BodyModel& model);

// Axis-angle to rotation matrix; series expansion below 1e-6 magnitude.
Mat3 rodrigues(const Vec3& axis_angle);

// Partial derivatives dR/d(omega_k) of rodrigues at omega, k = 0,1,2.
std::array<Mat3, 3> rodrigues_jacobian(const Vec3& axis_angle);

// 207-vector of row-major (R(theta_j) - I) entries for the 23 non-root joints.
VecX pose_feature(const VecX& theta);

// Shape- and pose-corrected rest vertices, template connectivity.
Mesh rest_body(const BodyModel& model, const VecX& beta, const VecX& theta);

// 24x3 rest joint locations regressed from shape-blended vertices.
Points joints(const BodyModel& model, const VecX& beta);

// Per-joint rest-to-posed transforms (identity at theta = 0). The global
// translation is not folded in; callers add pose.translation afterwards.
std::vector<Mat4> forward_kinematics(const Points& rest_joints, const Pose& pose,
                                     const std::vector<int>& parents);

// Linear-blend skinning. Throws when a weight row strays from sum 1 by >1e-4.
Points lbs(const Points& rest_vertices, const std::vector<Mat4>& transforms,
           const SkinWeights& weights);

// Full pipeline rest_body -> joints -> forward_kinematics -> lbs -> +t.
Mesh body_mesh(const BodyModel& model, const VecX& beta, const Pose& pose);

// Skeleton joints under the same transforms, plus translation.
Points posed_joints(const BodyModel& model, const VecX& beta, const Pose& pose);

// Deterministic procedural body: capsule torso plus four limb tubes, with
// part labels on the mesh, smooth distance-based weights, ring-averaging
// joint regressor, random orthonormal shape basis, zero pose basis.
BodyModel synth_body_model(uint64_t seed, int n_ring = 8, int n_segments = 24);

void save_body_model(const BodyModel& model, const std::string& path);
BodyModel load_body_model(const std::string& path);

// Rest joint positions the synthetic body is built around, for fixtures that
// need to place garments relative to the skeleton.
Points synth_skeleton();

}  // namespace gskin
