#include "gskin/skinning_transfer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gskin/json_util.h"
#include "gskin/laplacian.h"
#include "gskin/normals.h"
#include "gskin/parts.h"

namespace gskin {

void validate_transfer_config(const TransferConfig& config) {
  if (config.k < 1) throw ValidationError("transfer K must be at least 1");
  if (!(config.max_distance > 0)) throw ValidationError("max_distance must be positive");
  if (!(config.idw_power > 0)) throw ValidationError("idw power must be positive");
  if (config.smooth_iterations < 0) {
    throw ValidationError("smooth_iterations must be non-negative");
  }
  if (config.smooth_iterations > 0 &&
      (!(config.smooth_lambda > 0) || config.smooth_lambda > 1)) {
    throw ValidationError("smooth_lambda must be in (0, 1]");
  }
}

namespace {

std::vector<int> pick_neighbors(Index gi, const Mesh& garment, const Points& garment_normals,
                                const Mesh& body, const Points& body_normals,
                                const TransferConfig& config, const VecX& distances) {
  const int gtag = garment.labels[size_t(gi)];
  const Vec3 gn = garment_normals.row(gi).transpose();
  const double cos_limit = std::cos(config.max_normal_angle);
  const bool gn_valid = gn.norm() > 0.5;

  std::vector<int> filtered;
  for (Index b = 0; b < body.vertex_count(); ++b) {
    if (!parts_compatible(gtag, body.labels[size_t(b)])) continue;
    if (distances[b] > config.max_distance) continue;
    if (gn_valid) {
      const Vec3 bn = body_normals.row(b).transpose();
      if (bn.norm() > 0.5 && gn.dot(bn) < cos_limit) continue;
    }
    filtered.push_back(int(b));
  }
  const size_t want = size_t(std::min<Index>(config.k, body.vertex_count()));
  if (!filtered.empty()) {
    std::sort(filtered.begin(), filtered.end(),
              [&](int a, int b) { return distances[a] < distances[b]; });
    if (filtered.size() > want) filtered.resize(want);
    return filtered;
  }
  // nothing survives the filters: nearest K overall, compatible tags first
  std::vector<int> all(size_t(body.vertex_count()));
  std::iota(all.begin(), all.end(), 0);
  std::sort(all.begin(), all.end(), [&](int a, int b) {
    const int ca = parts_compatible(gtag, body.labels[size_t(a)]) ? 0 : 1;
    const int cb = parts_compatible(gtag, body.labels[size_t(b)]) ? 0 : 1;
    if (ca != cb) return ca < cb;
    return distances[a] < distances[b];
  });
  all.resize(want);
  return all;
}

VecX distances_to_body(Index gi, const Mesh& garment, const Mesh& body) {
  return (body.vertices.rowwise() - garment.vertices.row(gi)).rowwise().norm();
}

void check_transfer_inputs(const Mesh& garment, const Mesh& body) {
  if (garment.vertex_count() == 0) throw ValidationError("empty garment mesh");
  if (!garment.has_labels()) throw ValidationError("garment mesh needs part labels");
  if (!body.has_labels()) throw ValidationError("body mesh needs part labels");
}

}  // namespace

std::vector<int> candidate_neighbors(Index garment_vertex, const Mesh& garment,
                                     const Points& garment_normals, const Mesh& body,
                                     const Points& body_normals,
                                     const TransferConfig& config) {
  validate_transfer_config(config);
  check_transfer_inputs(garment, body);
  if (garment_vertex < 0 || garment_vertex >= garment.vertex_count()) {
    throw ValidationError("garment vertex index out of range");
  }
  const VecX distances = distances_to_body(garment_vertex, garment, body);
  return pick_neighbors(garment_vertex, garment, garment_normals, body, body_normals,
                        config, distances);
}

std::vector<int> candidate_neighbors(Index garment_vertex, const Mesh& garment,
                                     const Mesh& body, const TransferConfig& config) {
  return candidate_neighbors(garment_vertex, garment, vertex_normals(garment), body,
                             vertex_normals(body), config);
}

SkinWeights idw_transfer(const Mesh& garment, const Mesh& body,
                         const SkinWeights& body_weights, const TransferConfig& config) {
  validate_transfer_config(config);
  check_transfer_inputs(garment, body);
  if (body_weights.weights.rows() != body.vertex_count()) {
    throw ValidationError("body weights row count must match body vertex count");
  }
  validate_weights(body_weights);

  const Points garment_normals = vertex_normals(garment);
  const Points body_normals = vertex_normals(body);

  SkinWeights out;
  out.weights.resize(garment.vertex_count(), kJointCount);
  for (Index gi = 0; gi < garment.vertex_count(); ++gi) {
    const VecX distances = distances_to_body(gi, garment, body);
    Index nearest = 0;
    distances.minCoeff(&nearest);
    if (distances[nearest] < 1e-9) {
      out.weights.row(gi) = body_weights.weights.row(nearest);
      continue;
    }
    const std::vector<int> neighbors = pick_neighbors(
        gi, garment, garment_normals, body, body_normals, config, distances);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(kJointCount);
    double denom = 0;
    for (int b : neighbors) {
      const double w = std::pow(distances[b], -config.idw_power);
      acc += w * body_weights.weights.row(b);
      denom += w;
    }
    out.weights.row(gi) = acc / denom;
  }

  if (config.smooth_iterations > 0) {
    out.weights = laplacian_smooth_field(garment, out.weights, config.smooth_iterations,
                                         config.smooth_lambda);
  }
  out.weights = out.weights.cwiseMax(0.0).cwiseMin(1.0);
  for (Index gi = 0; gi < out.weights.rows(); ++gi) {
    // keep already-normalized rows (coincidence copies) bit-exact
    const double sum = out.weights.row(gi).sum();
    if (std::abs(sum - 1.0) > 1e-12) out.weights.row(gi) /= sum;
  }
  return out;
}

Mesh deform_with_weights(const Mesh& neutral_garment, const SkinWeights& garment_weights,
                         const BodyModel& body, const VecX& beta, const Pose& pose) {
  Mesh out = neutral_garment;
  const Points rest_joints = joints(body, beta);
  const auto transforms = forward_kinematics(rest_joints, pose, body.parents);
  out.vertices = lbs(out.vertices, transforms, garment_weights);
  out.vertices.rowwise() += pose.translation.transpose();
  return out;
}

WeightMetrics weight_metrics(const SkinWeights& pred, const SkinWeights& gt,
                             const Mesh& neutral_garment, const BodyModel& body,
                             const std::vector<Pose>& poses) {
  if (pred.weights.rows() != gt.weights.rows() ||
      pred.weights.cols() != gt.weights.cols()) {
    throw ValidationError("weight matrices must have matching shapes");
  }
  if (pred.weights.rows() != neutral_garment.vertex_count()) {
    throw ValidationError("weights must cover every garment vertex");
  }
  WeightMetrics metrics;
  const MatX diff = (pred.weights - gt.weights).cwiseAbs();
  metrics.l1_mean = diff.mean();
  metrics.l1_std = std::sqrt((diff.array() - metrics.l1_mean).square().mean());

  if (!poses.empty()) {
    std::vector<double> dists;
    dists.reserve(size_t(neutral_garment.vertex_count()) * poses.size());
    for (const Pose& pose : poses) {
      const Mesh a = deform_with_weights(neutral_garment, pred, body,
                                         VecX::Zero(kShapeDim), pose);
      const Mesh b = deform_with_weights(neutral_garment, gt, body,
                                         VecX::Zero(kShapeDim), pose);
      const VecX per_vertex = (a.vertices - b.vertices).rowwise().norm();
      for (Index i = 0; i < per_vertex.size(); ++i) dists.push_back(per_vertex[i]);
    }
    double mean = 0;
    for (double d : dists) mean += d;
    mean /= double(dists.size());
    double var = 0;
    for (double d : dists) var += (d - mean) * (d - mean);
    var /= double(dists.size());
    metrics.med_mean_mm = 1000.0 * mean;
    metrics.med_std_mm = 1000.0 * std::sqrt(var);
  }
  return metrics;
}

void save_weights(const SkinWeights& weights, const std::string& path) {
  validate_weights(weights);
  nlohmann::json doc;
  doc["weights"] = matrix_to_json(weights.weights);
  save_json(doc, path);
}

SkinWeights load_weights(const std::string& path) {
  const nlohmann::json doc = load_json(path);
  if (!doc.contains("weights")) throw ParseError(path + ": missing weights field");
  SkinWeights out;
  out.weights = matrix_from_json(doc["weights"], kJointCount, "weights");
  validate_weights(out);
  return out;
}

}  // namespace gskin
