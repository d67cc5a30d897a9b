#pragma once

#include <string>
#include <vector>

#include "gskin/body_model.h"
#include "gskin/mesh.h"
#include "gskin/skin_weights.h"
#include "gskin/skinning_transfer.h"
#include "gskin/types.h"

namespace gskin {

inline constexpr int kFeatureDim = 3 + 3 + kJointCount;  // position, normal, joint distances

// Per-vertex input features for the weight regressor: coordinate, unit normal,
// and Euclidean distance to each of the 24 rest joints. Vertices with
// degenerate normals get a zero normal and are reported through `degenerate`.
MatX compute_features(const Mesh& garment, const Points& rest_joints,
                      std::vector<bool>* degenerate = nullptr);

struct DenseParams {
  MatX weight;
  VecX bias;
};

struct GatParams {
  MatX weight;    // feature transform, in x out
  VecX bias;      // out
  VecX att_src;   // attention score contribution of the receiving vertex
  VecX att_dst;   // attention score contribution of the neighbor
};

struct SkinNetBlock {
  GatParams gat;
  DenseParams mlt;
};

// Graph-attention regressor over a garment mesh: per-vertex feature lift,
// residual attention blocks, a max-pooled global feature appended to every
// vertex, and a softmax head over the 24 joints. Connectivity enters only
// through attention neighborhoods, so one parameter set serves any mesh.
struct SkinNetParams {
  int feature_dim = 64;
  int heads = 1;  // single-head attention only
  double leaky_slope = 0.2;
  DenseParams input;              // kFeatureDim -> F
  std::vector<SkinNetBlock> blocks;
  DenseParams global_mlt;         // F -> F
  DenseParams output;             // 2F -> kJointCount
};

void validate_skinnet(const SkinNetParams& params);
SkinNetParams init_skinnet(int feature_dim, int n_blocks, unsigned seed);

// Structural helpers shared by the optimizer and the tests.
SkinNetParams zeros_like(const SkinNetParams& params);
void add_scaled(SkinNetParams& dst, const SkinNetParams& src, double scale);
double max_abs(const SkinNetParams& params);

// One attention layer: scores leaky_relu(att_src.wh_i + att_dst.wh_j) over
// j in N(i) and i itself, softmax per vertex, elu(sum att_ij wh_j + bias).
MatX gat_layer(const MatX& features, const std::vector<std::vector<int>>& adjacency,
               const GatParams& layer, double leaky_slope);

SkinWeights skinnet_forward(const SkinNetParams& params, const Mesh& garment,
                            const MatX& features);

// Sum over vertices and joints of pred * log(pred / gt), with gt entries
// clamped to 1e-8 and rows renormalized first.
double kl_loss(const SkinWeights& pred, const SkinWeights& gt);

struct WeightSample {
  Mesh mesh;
  MatX features;
  SkinWeights label;
};

// Gradients of kl_loss(skinnet_forward(...), gt) with respect to every
// parameter; the batch overload sums gradients over its samples.
SkinNetParams skinnet_gradients(const SkinNetParams& params, const Mesh& garment,
                                const MatX& features, const SkinWeights& gt);
SkinNetParams skinnet_gradients(const SkinNetParams& params,
                                const std::vector<WeightSample>& batch);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-2;
  double momentum = 0.9;
  bool cosine_decay = true;
  double grad_clip = 1.0;       // global gradient-norm ceiling, 0 disables
  bool prior_bias_init = true;  // start the output bias at the label log-prior
  int feature_dim = 64;
  int n_blocks = 3;
  unsigned seed = 0;
};

struct TrainResult {
  SkinNetParams params;
  std::vector<double> history;  // per-epoch mean per-vertex KL, pre-update
};

// Full-batch gradient descent with momentum; deterministic for a given seed.
// Throws on NaN loss.
TrainResult train_skinnet(const std::vector<WeightSample>& dataset,
                          const TrainConfig& config);

// Pooled weight metrics of the network's predictions against the sample
// labels across the pose set (matches weight_metrics on a single sample).
WeightMetrics evaluate_skinnet(const SkinNetParams& params,
                               const std::vector<WeightSample>& test_set,
                               const BodyModel& body, const std::vector<Pose>& poses);

void save_skinnet(const SkinNetParams& params, const std::string& path);
SkinNetParams load_skinnet(const std::string& path);

// CSV with an "epoch,mean_kl" header line.
void save_loss_history(const std::vector<double>& history, const std::string& path);

}  // namespace gskin
