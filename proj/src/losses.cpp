#include "gskin/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gskin/laplacian.h"
#include "gskin/normals.h"

namespace gskin {

namespace {

void check_rows(const Points& a, const Points& b, const char* what) {
  if (a.rows() != b.rows()) {
    throw ValidationError(std::string(what) + " counts differ: " +
                          std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
  }
}

void check_pairs(const std::vector<CorrespondencePair>& pairs, Index p_count,
                 Index q_count) {
  for (const CorrespondencePair& pair : pairs) {
    if (pair.source < 0 || pair.source >= p_count || pair.target < 0 ||
        pair.target >= q_count) {
      throw ValidationError("correspondence pair index out of range");
    }
  }
}

}  // namespace

void validate_camera(const Camera& camera) {
  if (!(camera.fx > 0) || !(camera.fy > 0)) {
    throw ValidationError("focal lengths must be positive");
  }
}

MatX project(const Camera& camera, const Points& points) {
  validate_camera(camera);
  MatX out(points.rows(), 2);
  for (Index i = 0; i < points.rows(); ++i) {
    const double z = points(i, 2);
    if (!(z > 1e-6)) {
      throw ValidationError("point " + std::to_string(i) + " is behind the camera");
    }
    out(i, 0) = camera.fx * points(i, 0) / z + camera.cx;
    out(i, 1) = camera.fy * points(i, 1) / z + camera.cy;
  }
  return out;
}

Vec3 unproject(const Camera& camera, const Vec2& pixel, double depth) {
  validate_camera(camera);
  if (!(depth > 1e-6)) throw ValidationError("depth must be positive");
  return {(pixel.x() - camera.cx) * depth / camera.fx,
          (pixel.y() - camera.cy) * depth / camera.fy, depth};
}

void validate_pair_config(const PairConfig& config) {
  if (!(config.max_distance > 0)) {
    throw ValidationError("max_distance must be positive");
  }
  if (!(config.max_normal_angle > 0) || config.max_normal_angle > EIGEN_PI) {
    throw ValidationError("max_normal_angle must be in (0, pi]");
  }
}

std::vector<CorrespondencePair> find_pairs(const Mesh& p, const Mesh& q,
                                           const PairConfig& config) {
  validate_pair_config(config);
  if (p.vertex_count() == 0 || q.vertex_count() == 0) return {};
  std::vector<bool> p_degenerate, q_degenerate;
  const Points p_normals = vertex_normals(p, &p_degenerate);
  const Points q_normals = vertex_normals(q, &q_degenerate);

  std::vector<CorrespondencePair> pairs;
  for (Index i = 0; i < p.vertex_count(); ++i) {
    Index j = 0;
    const double d =
        (q.vertices.rowwise() - p.vertices.row(i)).rowwise().norm().minCoeff(&j);
    if (d > config.max_distance) continue;
    double angle = 0;
    if (!p_degenerate[size_t(i)] && !q_degenerate[size_t(j)]) {
      const double cos_angle =
          std::clamp<double>(p_normals.row(i).dot(q_normals.row(j)), -1.0, 1.0);
      angle = std::acos(cos_angle);
      if (angle > config.max_normal_angle) continue;
    }
    pairs.push_back({i, j, d, angle});
  }
  return pairs;
}

ParamLosses param_losses(const VecX& pred_beta, const Pose& pred_pose,
                         const VecX& pred_alpha, const VecX& gt_beta,
                         const Pose& gt_pose, const VecX& gt_alpha) {
  if (pred_beta.size() != gt_beta.size()) throw ValidationError("beta sizes differ");
  if (pred_alpha.size() != gt_alpha.size()) throw ValidationError("alpha sizes differ");
  ParamLosses out;
  out.body = (pred_beta - gt_beta).squaredNorm() +
             (pred_pose.translation - gt_pose.translation).squaredNorm();
  for (int j = 0; j < kJointCount; ++j) {
    out.body +=
        (rodrigues(pred_pose.joint(j)) - rodrigues(gt_pose.joint(j))).squaredNorm();
  }
  out.garment = (pred_alpha - gt_alpha).squaredNorm();
  return out;
}

ParamGradients param_loss_gradients(const VecX& pred_beta, const Pose& pred_pose,
                                    const VecX& pred_alpha, const VecX& gt_beta,
                                    const Pose& gt_pose, const VecX& gt_alpha) {
  if (pred_beta.size() != gt_beta.size()) throw ValidationError("beta sizes differ");
  if (pred_alpha.size() != gt_alpha.size()) throw ValidationError("alpha sizes differ");
  ParamGradients g;
  g.beta = 2.0 * (pred_beta - gt_beta);
  g.translation = 2.0 * (pred_pose.translation - gt_pose.translation);
  g.theta = VecX::Zero(kThetaDim);
  for (int j = 0; j < kJointCount; ++j) {
    const Mat3 diff = rodrigues(pred_pose.joint(j)) - rodrigues(gt_pose.joint(j));
    const std::array<Mat3, 3> jac = rodrigues_jacobian(pred_pose.joint(j));
    for (int k = 0; k < 3; ++k) {
      g.theta[3 * j + k] = 2.0 * diff.cwiseProduct(jac[size_t(k)]).sum();
    }
  }
  g.alpha = 2.0 * (pred_alpha - gt_alpha);
  return g;
}

GeometryLosses geometry_losses(const Points& pred_vertices, const Points& gt_vertices,
                               const Points& pred_joints, const Points& gt_joints) {
  check_rows(pred_vertices, gt_vertices, "vertex");
  check_rows(pred_joints, gt_joints, "joint");
  GeometryLosses out;
  out.garment = (pred_vertices - gt_vertices).squaredNorm();
  out.joints = (pred_joints - gt_joints).squaredNorm();
  return out;
}

GeometryGradients geometry_loss_gradients(const Points& pred_vertices,
                                          const Points& gt_vertices,
                                          const Points& pred_joints,
                                          const Points& gt_joints) {
  check_rows(pred_vertices, gt_vertices, "vertex");
  check_rows(pred_joints, gt_joints, "joint");
  GeometryGradients g;
  g.vertices = 2.0 * (pred_vertices - gt_vertices);
  g.joints = 2.0 * (pred_joints - gt_joints);
  return g;
}

DisplacementLosses displacement_losses(const Points& pred, const Points& gt,
                                       const Mesh& garment) {
  check_rows(pred, gt, "displacement");
  if (pred.rows() != garment.vertex_count()) {
    throw ValidationError("displacement rows must match garment vertex count");
  }
  DisplacementLosses out;
  const Points diff = pred - gt;
  out.l1 = diff.cwiseAbs().sum();
  out.laplacian = (laplacian_matrix(garment) * diff).squaredNorm();
  return out;
}

DisplacementGradients displacement_loss_gradients(const Points& pred, const Points& gt,
                                                  const Mesh& garment) {
  check_rows(pred, gt, "displacement");
  if (pred.rows() != garment.vertex_count()) {
    throw ValidationError("displacement rows must match garment vertex count");
  }
  DisplacementGradients g;
  const Points diff = pred - gt;
  g.l1 = diff.array().sign().matrix();
  const Eigen::SparseMatrix<double> lap = laplacian_matrix(garment);
  g.laplacian = 2.0 * (lap.transpose() * (lap * diff).eval());
  return g;
}

double projection_loss(const Camera& camera, const Points& pred, const Points& gt) {
  check_rows(pred, gt, "point");
  return (project(camera, pred) - project(camera, gt)).squaredNorm();
}

Points projection_loss_gradients(const Camera& camera, const Points& pred,
                                 const Points& gt) {
  check_rows(pred, gt, "point");
  const MatX pixels = project(camera, pred);
  const MatX target = project(camera, gt);
  Points g(pred.rows(), 3);
  for (Index i = 0; i < pred.rows(); ++i) {
    const double z = pred(i, 2);
    const double du = 2.0 * (pixels(i, 0) - target(i, 0));
    const double dv = 2.0 * (pixels(i, 1) - target(i, 1));
    g(i, 0) = du * camera.fx / z;
    g(i, 1) = dv * camera.fy / z;
    g(i, 2) = -(du * camera.fx * pred(i, 0) + dv * camera.fy * pred(i, 1)) / (z * z);
  }
  return g;
}

ProjectionLosses projection_losses(const Camera& camera, const Points& pred_body,
                                   const Points& gt_body, const Points& pred_garment,
                                   const Points& gt_garment) {
  ProjectionLosses out;
  out.body = projection_loss(camera, pred_body, gt_body);
  out.garment = projection_loss(camera, pred_garment, gt_garment);
  return out;
}

double interpenetration_loss(const Mesh& p, const Mesh& q,
                             const std::vector<CorrespondencePair>& pairs) {
  if (pairs.empty()) return 0.0;
  check_pairs(pairs, p.vertex_count(), q.vertex_count());
  const Points q_normals = vertex_normals(q);
  double sum = 0;
  for (const CorrespondencePair& pair : pairs) {
    const double depth = -q_normals.row(pair.target)
                              .dot(p.vertices.row(pair.source) -
                                   q.vertices.row(pair.target));
    sum += std::max(0.0, depth);
  }
  return sum / double(pairs.size());
}

Points interpenetration_gradients(const Mesh& p, const Mesh& q,
                                  const std::vector<CorrespondencePair>& pairs) {
  Points g = Points::Zero(p.vertex_count(), 3);
  if (pairs.empty()) return g;
  check_pairs(pairs, p.vertex_count(), q.vertex_count());
  const Points q_normals = vertex_normals(q);
  const double inv_n = 1.0 / double(pairs.size());
  for (const CorrespondencePair& pair : pairs) {
    const double depth = -q_normals.row(pair.target)
                              .dot(p.vertices.row(pair.source) -
                                   q.vertices.row(pair.target));
    if (depth > 0) g.row(pair.source) -= inv_n * q_normals.row(pair.target);
  }
  return g;
}

double layered_interpenetration(const Mesh& garment_rest, const Mesh& body_rest,
                                const Mesh& garment_posed, const Mesh& body_posed,
                                const PairConfig& config) {
  const double rest = interpenetration_loss(
      garment_rest, body_rest, find_pairs(garment_rest, body_rest, config));
  const double posed = interpenetration_loss(
      garment_posed, body_posed, find_pairs(garment_posed, body_posed, config));
  return rest + posed;
}

}  // namespace gskin
