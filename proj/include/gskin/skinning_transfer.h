#pragma once

#include <vector>

#include "gskin/body_model.h"
#include "gskin/mesh.h"
#include "gskin/skin_weights.h"

namespace gskin {

struct TransferConfig {
  int k = 4;
  double max_distance = 0.05;              // meters
  double max_normal_angle = EIGEN_PI / 3;  // radians
  double idw_power = 2.0;
  int smooth_iterations = 10;
  double smooth_lambda = 0.5;
};

void validate_transfer_config(const TransferConfig& config);

// Body-vertex candidates for one garment vertex: part-compatible vertices
// within max_distance whose normals agree within max_normal_angle, nearest K.
// When that filter comes up empty, nearest K overall with compatible vertices
// ranked first. Both meshes must carry part labels.
std::vector<int> candidate_neighbors(Index garment_vertex, const Mesh& garment,
                                     const Points& garment_normals, const Mesh& body,
                                     const Points& body_normals,
                                     const TransferConfig& config);

// Convenience overload computing the normals on the fly.
std::vector<int> candidate_neighbors(Index garment_vertex, const Mesh& garment,
                                     const Mesh& body, const TransferConfig& config);

// Inverse-distance-weighted transfer of body skinning weights onto a garment,
// followed by Laplacian smoothing over the garment mesh, clamping, and row
// renormalization. A garment vertex within 1e-9 of a body vertex copies that
// body row before smoothing.
SkinWeights idw_transfer(const Mesh& garment, const Mesh& body,
                         const SkinWeights& body_weights, const TransferConfig& config);

// Skins an already-neutral garment with the body's kinematics.
Mesh deform_with_weights(const Mesh& neutral_garment, const SkinWeights& garment_weights,
                         const BodyModel& body, const VecX& beta, const Pose& pose);

struct WeightMetrics {
  double l1_mean = 0;
  double l1_std = 0;
  double med_mean_mm = 0;
  double med_std_mm = 0;
};

// Entrywise l1 statistics between weight matrices plus per-vertex Euclidean
// distances (millimeters) between garments deformed with each, pooled over
// the pose set.
WeightMetrics weight_metrics(const SkinWeights& pred, const SkinWeights& gt,
                             const Mesh& neutral_garment, const BodyModel& body,
                             const std::vector<Pose>& poses);

void save_weights(const SkinWeights& weights, const std::string& path);
SkinWeights load_weights(const std::string& path);

}  // namespace gskin
