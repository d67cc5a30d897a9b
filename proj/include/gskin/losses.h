#pragma once

#include <vector>

#include "gskin/body_model.h"
#include "gskin/mesh.h"
#include "gskin/types.h"

namespace gskin {

// z-forward pinhole, pixel units.
struct Camera {
  double fx = 1000;
  double fy = 1000;
  double cx = 512;
  double cy = 512;
};

void validate_camera(const Camera& camera);

// Pixel coordinates (fx x/z + cx, fy y/z + cy), one row per point. Throws
// when any z <= 1e-6.
MatX project(const Camera& camera, const Points& points);

// Inverse of project at a known depth.
Vec3 unproject(const Camera& camera, const Vec2& pixel, double depth);

// Matched vertex pair between a source mesh P and a target mesh Q.
struct CorrespondencePair {
  Index source = 0;
  Index target = 0;
  double distance = 0;      // meters
  double normal_angle = 0;  // radians; 0 when either normal is degenerate
};

struct PairConfig {
  double max_distance = 0.02;              // meters
  double max_normal_angle = EIGEN_PI / 3;  // radians
};

void validate_pair_config(const PairConfig& config);

// For each vertex of P: its nearest Q vertex, kept when within max_distance
// and the vertex normals agree within max_normal_angle (degenerate normals
// pass the angle filter). At most one pair per P vertex.
std::vector<CorrespondencePair> find_pairs(const Mesh& p, const Mesh& q,
                                           const PairConfig& config);

// Squared-error losses on parameters: the body term compares beta, per-joint
// rotation matrices, and translation; the garment term compares alpha.
struct ParamLosses {
  double body = 0;
  double garment = 0;
};
ParamLosses param_losses(const VecX& pred_beta, const Pose& pred_pose,
                         const VecX& pred_alpha, const VecX& gt_beta,
                         const Pose& gt_pose, const VecX& gt_alpha);

struct ParamGradients {
  VecX beta;
  VecX theta;  // through the per-joint rotation matrices
  Vec3 translation;
  VecX alpha;
};
ParamGradients param_loss_gradients(const VecX& pred_beta, const Pose& pred_pose,
                                    const VecX& pred_alpha, const VecX& gt_beta,
                                    const Pose& gt_pose, const VecX& gt_alpha);

// Summed squared distances between corresponding vertices and joints.
struct GeometryLosses {
  double garment = 0;
  double joints = 0;
};
GeometryLosses geometry_losses(const Points& pred_vertices, const Points& gt_vertices,
                               const Points& pred_joints, const Points& gt_joints);
struct GeometryGradients {
  Points vertices;
  Points joints;
};
GeometryGradients geometry_loss_gradients(const Points& pred_vertices,
                                          const Points& gt_vertices,
                                          const Points& pred_joints,
                                          const Points& gt_joints);

// Entrywise l1 between displacement fields plus squared l2 between their
// Laplacian coordinates over the garment connectivity.
struct DisplacementLosses {
  double l1 = 0;
  double laplacian = 0;
};
DisplacementLosses displacement_losses(const Points& pred, const Points& gt,
                                       const Mesh& garment);
struct DisplacementGradients {
  Points l1;         // sign(pred - gt); 0 where they agree
  Points laplacian;  // 2 L^T L (pred - gt)
};
DisplacementGradients displacement_loss_gradients(const Points& pred, const Points& gt,
                                                  const Mesh& garment);

// Summed squared pixel distances between projections of corresponding points.
double projection_loss(const Camera& camera, const Points& pred, const Points& gt);
Points projection_loss_gradients(const Camera& camera, const Points& pred,
                                 const Points& gt);
struct ProjectionLosses {
  double body = 0;
  double garment = 0;
};
ProjectionLosses projection_losses(const Camera& camera, const Points& pred_body,
                                   const Points& gt_body, const Points& pred_garment,
                                   const Points& gt_garment);

// Mean over pairs of ReLU(-n_q . (p - q)): how deep P sinks behind Q's local
// planes. Zero without pairs.
double interpenetration_loss(const Mesh& p, const Mesh& q,
                             const std::vector<CorrespondencePair>& pairs);

// d/dP of interpenetration_loss with Q and the pairs held fixed; the ReLU
// kink takes subgradient 0.
Points interpenetration_gradients(const Mesh& p, const Mesh& q,
                                  const std::vector<CorrespondencePair>& pairs);

// Garment-against-body interpenetration summed over the rest and posed
// configurations, pairs found per configuration.
double layered_interpenetration(const Mesh& garment_rest, const Mesh& body_rest,
                                const Mesh& garment_posed, const Mesh& body_posed,
                                const PairConfig& config);

}  // namespace gskin
