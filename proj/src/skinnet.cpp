#include "gskin/skinnet.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "gskin/json_util.h"
#include "gskin/normals.h"
#include "gskin/rng.h"

namespace gskin {

MatX compute_features(const Mesh& garment, const Points& rest_joints,
                      std::vector<bool>* degenerate) {
  validate_mesh(garment);
  if (garment.vertex_count() == 0) throw ValidationError("empty garment mesh");
  if (rest_joints.rows() != kJointCount) {
    throw ValidationError("expected one rest position per joint");
  }
  const Points normals = vertex_normals(garment, degenerate);
  MatX features(garment.vertex_count(), kFeatureDim);
  features.leftCols<3>() = garment.vertices;
  features.middleCols<3>(3) = normals;
  for (Index j = 0; j < kJointCount; ++j) {
    features.col(6 + j) =
        (garment.vertices.rowwise() - rest_joints.row(j)).rowwise().norm();
  }
  return features;
}

namespace {

template <typename Params, typename Fn>
void visit_arrays(Params& p, Fn&& fn) {
  fn(p.input.weight);
  fn(p.input.bias);
  for (auto& block : p.blocks) {
    fn(block.gat.weight);
    fn(block.gat.bias);
    fn(block.gat.att_src);
    fn(block.gat.att_dst);
    fn(block.mlt.weight);
    fn(block.mlt.bias);
  }
  fn(p.global_mlt.weight);
  fn(p.global_mlt.bias);
  fn(p.output.weight);
  fn(p.output.bias);
}

template <typename A, typename B, typename Fn>
void visit_pairs(A& a, B& b, Fn&& fn) {
  fn(a.input.weight, b.input.weight);
  fn(a.input.bias, b.input.bias);
  for (size_t i = 0; i < a.blocks.size(); ++i) {
    fn(a.blocks[i].gat.weight, b.blocks[i].gat.weight);
    fn(a.blocks[i].gat.bias, b.blocks[i].gat.bias);
    fn(a.blocks[i].gat.att_src, b.blocks[i].gat.att_src);
    fn(a.blocks[i].gat.att_dst, b.blocks[i].gat.att_dst);
    fn(a.blocks[i].mlt.weight, b.blocks[i].mlt.weight);
    fn(a.blocks[i].mlt.bias, b.blocks[i].mlt.bias);
  }
  fn(a.global_mlt.weight, b.global_mlt.weight);
  fn(a.global_mlt.bias, b.global_mlt.bias);
  fn(a.output.weight, b.output.weight);
  fn(a.output.bias, b.output.bias);
}

double elu(double x) { return x > 0 ? x : std::exp(x) - 1.0; }
double elu_grad(double x) { return x > 0 ? 1.0 : std::exp(x); }

MatX elu_all(const MatX& m) {
  return m.unaryExpr([](double x) { return elu(x); });
}

MatX elu_grad_all(const MatX& m) {
  return m.unaryExpr([](double x) { return elu_grad(x); });
}

// neighborhoods with self-loops, ascending for deterministic accumulation
std::vector<std::vector<int>> attention_rings(const std::vector<std::vector<int>>& adjacency) {
  std::vector<std::vector<int>> rings(adjacency.size());
  for (size_t i = 0; i < adjacency.size(); ++i) {
    rings[i] = adjacency[i];
    rings[i].push_back(int(i));
    std::sort(rings[i].begin(), rings[i].end());
  }
  return rings;
}

struct GatCache {
  MatX wh;
  VecX s_src;
  VecX s_dst;
  std::vector<VecX> att;
  MatX pre;
};

void gat_forward(const MatX& h, const std::vector<std::vector<int>>& rings,
                 const GatParams& layer, double leaky_slope, GatCache& cache) {
  const Index n = h.rows();
  cache.wh = h * layer.weight;
  cache.s_src = cache.wh * layer.att_src;
  cache.s_dst = cache.wh * layer.att_dst;
  cache.att.resize(size_t(n));
  cache.pre.resize(n, layer.weight.cols());
  for (Index i = 0; i < n; ++i) {
    const auto& ring = rings[size_t(i)];
    VecX scores(Index(ring.size()));
    for (size_t k = 0; k < ring.size(); ++k) {
      const double z = cache.s_src[i] + cache.s_dst[ring[k]];
      scores[Index(k)] = z > 0 ? z : leaky_slope * z;
    }
    VecX att = (scores.array() - scores.maxCoeff()).exp();
    att /= att.sum();
    Eigen::RowVectorXd message = Eigen::RowVectorXd::Zero(cache.wh.cols());
    for (size_t k = 0; k < ring.size(); ++k) {
      message += att[Index(k)] * cache.wh.row(ring[k]);
    }
    cache.pre.row(i) = message + layer.bias.transpose();
    cache.att[size_t(i)] = std::move(att);
  }
}

struct BlockCache {
  MatX block_in;
  GatCache gat;
  MatX gat_out;
  MatX mlt_pre;
  MatX out;
};

struct ForwardCache {
  MatX input_pre;
  MatX h0;
  std::vector<BlockCache> blocks;
  Eigen::RowVectorXd pooled;
  std::vector<int> pool_argmax;
  Eigen::RowVectorXd global_pre;
  Eigen::RowVectorXd global_feat;
  MatX logits;
  MatX probs;
};

void run_forward(const SkinNetParams& params, const std::vector<std::vector<int>>& rings,
                 const MatX& features, ForwardCache& cache) {
  const Index n = features.rows();
  const Index f = params.feature_dim;
  cache.input_pre = features * params.input.weight;
  cache.input_pre.rowwise() += params.input.bias.transpose();
  cache.h0 = elu_all(cache.input_pre);

  cache.blocks.resize(params.blocks.size());
  MatX h = cache.h0;
  for (size_t b = 0; b < params.blocks.size(); ++b) {
    BlockCache& bc = cache.blocks[b];
    bc.block_in = h;
    gat_forward(h, rings, params.blocks[b].gat, params.leaky_slope, bc.gat);
    bc.gat_out = elu_all(bc.gat.pre);
    bc.mlt_pre = bc.gat_out * params.blocks[b].mlt.weight;
    bc.mlt_pre.rowwise() += params.blocks[b].mlt.bias.transpose();
    bc.out = h + elu_all(bc.mlt_pre);
    h = bc.out;
  }

  cache.pooled.resize(f);
  cache.pool_argmax.assign(size_t(f), 0);
  for (Index c = 0; c < f; ++c) {
    double best = h(0, c);
    int best_row = 0;
    for (Index r = 1; r < n; ++r) {
      if (h(r, c) > best) {
        best = h(r, c);
        best_row = int(r);
      }
    }
    cache.pooled[c] = best;
    cache.pool_argmax[size_t(c)] = best_row;
  }
  cache.global_pre = cache.pooled * params.global_mlt.weight;
  cache.global_pre += params.global_mlt.bias.transpose();
  cache.global_feat = cache.global_pre.unaryExpr([](double x) { return elu(x); });

  cache.logits = h * params.output.weight.topRows(f);
  const Eigen::RowVectorXd shared = cache.global_feat * params.output.weight.bottomRows(f) +
                                    params.output.bias.transpose();
  cache.logits.rowwise() += shared;

  cache.probs.resize(n, kJointCount);
  for (Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd row =
        (cache.logits.row(i).array() - cache.logits.row(i).maxCoeff()).exp();
    cache.probs.row(i) = row / row.sum();
  }
}

MatX clamped_labels(const MatX& gt) {
  MatX g = gt.cwiseMax(1e-8);
  for (Index i = 0; i < g.rows(); ++i) g.row(i) /= g.row(i).sum();
  return g;
}

double kl_sum(const MatX& pred, const MatX& clamped_gt) {
  double total = 0;
  for (Index i = 0; i < pred.rows(); ++i) {
    for (Index j = 0; j < pred.cols(); ++j) {
      const double p = pred(i, j);
      if (p > 0) total += p * std::log(p / clamped_gt(i, j));
    }
  }
  return total;
}

void check_features(const SkinNetParams& params, const Mesh& garment, const MatX& features) {
  if (garment.vertex_count() == 0) throw ValidationError("empty garment mesh");
  if (features.rows() != garment.vertex_count()) {
    throw ValidationError("feature rows must match garment vertex count");
  }
  if (features.cols() != params.input.weight.rows()) {
    throw ValidationError("feature width does not match network input layer");
  }
  if (!features.allFinite()) throw ValidationError("features contain non-finite values");
}

// accumulates d(kl_loss)/d(params) scaled by `scale` into grads, returns the loss
double accumulate_gradients(const SkinNetParams& params,
                            const std::vector<std::vector<int>>& rings,
                            const MatX& features, const MatX& gt, SkinNetParams& grads,
                            double scale) {
  ForwardCache cache;
  run_forward(params, rings, features, cache);
  if (!cache.probs.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  const Index n = features.rows();
  const Index f = params.feature_dim;

  const MatX g = clamped_labels(gt);
  const double loss = kl_sum(cache.probs, g);

  const MatX rho = (cache.probs.array() / g.array()).log().matrix();
  const VecX inner = (cache.probs.array() * rho.array()).rowwise().sum();
  const MatX dlogits =
      scale * (cache.probs.array() * (rho.array().colwise() - inner.array())).matrix();

  const MatX& h_final =
      params.blocks.empty() ? cache.h0 : cache.blocks.back().out;
  grads.output.weight.topRows(f) += h_final.transpose() * dlogits;
  const Eigen::RowVectorXd dlogit_sum = dlogits.colwise().sum();
  grads.output.weight.bottomRows(f) += cache.global_feat.transpose() * dlogit_sum;
  grads.output.bias += dlogit_sum.transpose();

  MatX dh = dlogits * params.output.weight.topRows(f).transpose();
  Eigen::RowVectorXd dglobal = dlogit_sum * params.output.weight.bottomRows(f).transpose();

  const Eigen::RowVectorXd dglobal_pre =
      dglobal.cwiseProduct(cache.global_pre.unaryExpr([](double x) { return elu_grad(x); }));
  grads.global_mlt.weight += cache.pooled.transpose() * dglobal_pre;
  grads.global_mlt.bias += dglobal_pre.transpose();
  const Eigen::RowVectorXd dpooled = dglobal_pre * params.global_mlt.weight.transpose();
  for (Index c = 0; c < f; ++c) {
    dh(cache.pool_argmax[size_t(c)], c) += dpooled[c];
  }

  for (int b = int(params.blocks.size()) - 1; b >= 0; --b) {
    const BlockCache& bc = cache.blocks[size_t(b)];
    const GatParams& gat = params.blocks[size_t(b)].gat;
    const DenseParams& mlt = params.blocks[size_t(b)].mlt;
    SkinNetBlock& gblock = grads.blocks[size_t(b)];

    const MatX dout = dh;
    const MatX dpre_m = dout.cwiseProduct(elu_grad_all(bc.mlt_pre));
    gblock.mlt.weight += bc.gat_out.transpose() * dpre_m;
    gblock.mlt.bias += dpre_m.colwise().sum().transpose();
    const MatX dgat_out = dpre_m * mlt.weight.transpose();

    const MatX dpre_g = dgat_out.cwiseProduct(elu_grad_all(bc.gat.pre));
    gblock.gat.bias += dpre_g.colwise().sum().transpose();

    MatX dwh = MatX::Zero(n, f);
    VecX ds_src = VecX::Zero(n);
    VecX ds_dst = VecX::Zero(n);
    for (Index i = 0; i < n; ++i) {
      const auto& ring = rings[size_t(i)];
      const VecX& att = bc.gat.att[size_t(i)];
      VecX datt(Index(ring.size()));
      for (size_t k = 0; k < ring.size(); ++k) {
        datt[Index(k)] = dpre_g.row(i).dot(bc.gat.wh.row(ring[k]));
        dwh.row(ring[k]) += att[Index(k)] * dpre_g.row(i);
      }
      const double att_dot = att.dot(datt);
      for (size_t k = 0; k < ring.size(); ++k) {
        const double de = att[Index(k)] * (datt[Index(k)] - att_dot);
        const double z = bc.gat.s_src[i] + bc.gat.s_dst[ring[k]];
        const double dz = de * (z > 0 ? 1.0 : params.leaky_slope);
        ds_src[i] += dz;
        ds_dst[ring[k]] += dz;
      }
    }
    gblock.gat.att_src += bc.gat.wh.transpose() * ds_src;
    gblock.gat.att_dst += bc.gat.wh.transpose() * ds_dst;
    dwh += ds_src * gat.att_src.transpose() + ds_dst * gat.att_dst.transpose();
    gblock.gat.weight += bc.block_in.transpose() * dwh;
    dh = dout + dwh * gat.weight.transpose();
  }

  const MatX dpre0 = dh.cwiseProduct(elu_grad_all(cache.input_pre));
  grads.input.weight += features.transpose() * dpre0;
  grads.input.bias += dpre0.colwise().sum().transpose();
  return loss;
}

}  // namespace

void validate_skinnet(const SkinNetParams& params) {
  if (params.feature_dim < 1) throw ValidationError("feature_dim must be positive");
  if (params.heads != 1) throw ValidationError("only single-head attention is supported");
  if (!(params.leaky_slope > 0) || params.leaky_slope >= 1) {
    throw ValidationError("leaky_slope must be in (0, 1)");
  }
  const Index f = params.feature_dim;
  if (params.input.weight.cols() != f || params.input.bias.size() != f) {
    throw ValidationError("input layer shape mismatch");
  }
  for (const auto& block : params.blocks) {
    if (block.gat.weight.rows() != f || block.gat.weight.cols() != f ||
        block.gat.bias.size() != f || block.gat.att_src.size() != f ||
        block.gat.att_dst.size() != f) {
      throw ValidationError("attention layer shape mismatch");
    }
    if (block.mlt.weight.rows() != f || block.mlt.weight.cols() != f ||
        block.mlt.bias.size() != f) {
      throw ValidationError("block mlt shape mismatch");
    }
  }
  if (params.global_mlt.weight.rows() != f || params.global_mlt.weight.cols() != f ||
      params.global_mlt.bias.size() != f) {
    throw ValidationError("global mlt shape mismatch");
  }
  if (params.output.weight.rows() != 2 * f || params.output.weight.cols() != kJointCount ||
      params.output.bias.size() != kJointCount) {
    throw ValidationError("output layer shape mismatch");
  }
  bool finite = true;
  visit_arrays(const_cast<SkinNetParams&>(params),
               [&](const auto& array) { finite = finite && array.allFinite(); });
  if (!finite) throw ValidationError("network parameters contain non-finite values");
}

SkinNetParams init_skinnet(int feature_dim, int n_blocks, unsigned seed) {
  if (feature_dim < 1) throw ValidationError("feature_dim must be positive");
  if (n_blocks < 0) throw ValidationError("block count must be non-negative");
  Rng rng(seed);
  auto glorot = [&](Index rows, Index cols) {
    const double limit = std::sqrt(6.0 / double(rows + cols));
    MatX m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-limit, limit);
    }
    return m;
  };
  SkinNetParams params;
  params.feature_dim = feature_dim;
  const Index f = feature_dim;
  params.input.weight = glorot(kFeatureDim, f);
  params.input.bias = VecX::Zero(f);
  params.blocks.resize(size_t(n_blocks));
  for (auto& block : params.blocks) {
    block.gat.weight = glorot(f, f);
    block.gat.bias = VecX::Zero(f);
    block.gat.att_src = glorot(f, 1);
    block.gat.att_dst = glorot(f, 1);
    block.mlt.weight = glorot(f, f);
    block.mlt.bias = VecX::Zero(f);
  }
  params.global_mlt.weight = glorot(f, f);
  params.global_mlt.bias = VecX::Zero(f);
  params.output.weight = glorot(2 * f, kJointCount);
  params.output.bias = VecX::Zero(kJointCount);
  return params;
}

SkinNetParams zeros_like(const SkinNetParams& params) {
  SkinNetParams out = params;
  visit_arrays(out, [](auto& array) { array.setZero(); });
  return out;
}

void add_scaled(SkinNetParams& dst, const SkinNetParams& src, double scale) {
  if (dst.blocks.size() != src.blocks.size()) {
    throw ValidationError("mismatched block counts");
  }
  visit_pairs(dst, const_cast<SkinNetParams&>(src),
              [scale](auto& a, const auto& b) { a += scale * b; });
}

double max_abs(const SkinNetParams& params) {
  double m = 0;
  visit_arrays(const_cast<SkinNetParams&>(params), [&](const auto& array) {
    if (array.size() > 0) m = std::max(m, array.cwiseAbs().maxCoeff());
  });
  return m;
}

MatX gat_layer(const MatX& features, const std::vector<std::vector<int>>& adjacency,
               const GatParams& layer, double leaky_slope) {
  if (features.rows() != Index(adjacency.size())) {
    throw ValidationError("adjacency size must match feature rows");
  }
  if (layer.weight.rows() != features.cols() ||
      layer.att_src.size() != layer.weight.cols() ||
      layer.att_dst.size() != layer.weight.cols() ||
      layer.bias.size() != layer.weight.cols()) {
    throw ValidationError("attention layer shape mismatch");
  }
  const auto rings = attention_rings(adjacency);
  GatCache cache;
  gat_forward(features, rings, layer, leaky_slope, cache);
  return elu_all(cache.pre);
}

SkinWeights skinnet_forward(const SkinNetParams& params, const Mesh& garment,
                            const MatX& features) {
  validate_skinnet(params);
  check_features(params, garment, features);
  const auto rings = attention_rings(vertex_adjacency(garment));
  ForwardCache cache;
  run_forward(params, rings, features, cache);
  SkinWeights out;
  out.weights = cache.probs;
  return out;
}

double kl_loss(const SkinWeights& pred, const SkinWeights& gt) {
  if (pred.weights.rows() != gt.weights.rows() ||
      pred.weights.cols() != gt.weights.cols()) {
    throw ValidationError("weight matrices must have matching shapes");
  }
  if (!pred.weights.allFinite() || !gt.weights.allFinite()) {
    throw ValidationError("weights contain non-finite values");
  }
  return kl_sum(pred.weights, clamped_labels(gt.weights));
}

SkinNetParams skinnet_gradients(const SkinNetParams& params, const Mesh& garment,
                                const MatX& features, const SkinWeights& gt) {
  validate_skinnet(params);
  check_features(params, garment, features);
  if (gt.weights.rows() != features.rows()) {
    throw ValidationError("label rows must match garment vertex count");
  }
  SkinNetParams grads = zeros_like(params);
  const auto rings = attention_rings(vertex_adjacency(garment));
  accumulate_gradients(params, rings, features, gt.weights, grads, 1.0);
  return grads;
}

SkinNetParams skinnet_gradients(const SkinNetParams& params,
                                const std::vector<WeightSample>& batch) {
  validate_skinnet(params);
  SkinNetParams grads = zeros_like(params);
  for (const WeightSample& sample : batch) {
    check_features(params, sample.mesh, sample.features);
    const auto rings = attention_rings(vertex_adjacency(sample.mesh));
    accumulate_gradients(params, rings, sample.features, sample.label.weights, grads, 1.0);
  }
  return grads;
}

TrainResult train_skinnet(const std::vector<WeightSample>& dataset,
                          const TrainConfig& config) {
  if (dataset.empty()) throw ValidationError("training dataset is empty");
  if (config.epochs < 0) throw ValidationError("epochs must be non-negative");
  if (!(config.learning_rate > 0)) throw ValidationError("learning rate must be positive");
  if (config.momentum < 0 || config.momentum >= 1) {
    throw ValidationError("momentum must be in [0, 1)");
  }
  if (config.grad_clip < 0) throw ValidationError("grad_clip must be non-negative");

  TrainResult result;
  result.params = init_skinnet(config.feature_dim, config.n_blocks, config.seed);
  for (const WeightSample& sample : dataset) {
    check_features(result.params, sample.mesh, sample.features);
    if (sample.label.weights.rows() != sample.features.rows()) {
      throw ValidationError("label rows must match garment vertex count");
    }
  }

  if (config.prior_bias_init) {
    // start the output layer at the dataset's mean label distribution so the
    // first steps refine per-vertex detail instead of fighting the softmax
    VecX mean_log = VecX::Zero(kJointCount);
    Index rows = 0;
    for (const WeightSample& sample : dataset) {
      const MatX g = clamped_labels(sample.label.weights);
      mean_log += g.array().log().colwise().sum().matrix().transpose();
      rows += g.rows();
    }
    mean_log /= double(rows);
    VecX prior = (mean_log.array() - mean_log.maxCoeff()).exp();
    prior /= prior.sum();
    result.params.output.bias = prior.array().log();
  }

  std::vector<std::vector<std::vector<int>>> rings;
  rings.reserve(dataset.size());
  for (const WeightSample& sample : dataset) {
    rings.push_back(attention_rings(vertex_adjacency(sample.mesh)));
  }

  const double n = double(dataset.size());
  SkinNetParams velocity = zeros_like(result.params);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    SkinNetParams grads = zeros_like(result.params);
    double mean_kl = 0;
    for (size_t s = 0; s < dataset.size(); ++s) {
      const double vertices = double(dataset[s].features.rows());
      const double loss =
          accumulate_gradients(result.params, rings[s], dataset[s].features,
                               dataset[s].label.weights, grads, 1.0 / (vertices * n));
      mean_kl += loss / vertices;
    }
    mean_kl /= n;
    if (!std::isfinite(mean_kl)) {
      throw Error("training diverged: non-finite loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back(mean_kl);

    const double lr =
        config.cosine_decay
            ? config.learning_rate * 0.5 *
                  (1.0 + std::cos(EIGEN_PI * double(epoch) / double(config.epochs)))
            : config.learning_rate;
    double step = lr;
    if (config.grad_clip > 0) {
      double sq = 0;
      visit_arrays(grads, [&](const auto& array) { sq += array.squaredNorm(); });
      const double norm = std::sqrt(sq);
      if (norm > config.grad_clip) step *= config.grad_clip / norm;
    }
    visit_arrays(velocity, [&](auto& array) { array *= config.momentum; });
    add_scaled(velocity, grads, -step);
    add_scaled(result.params, velocity, 1.0);
  }
  return result;
}

WeightMetrics evaluate_skinnet(const SkinNetParams& params,
                               const std::vector<WeightSample>& test_set,
                               const BodyModel& body, const std::vector<Pose>& poses) {
  validate_skinnet(params);
  if (test_set.empty()) throw ValidationError("test set is empty");
  double l1_sum = 0, l1_sq = 0, l1_count = 0;
  double med_sum = 0, med_sq = 0, med_count = 0;
  for (const WeightSample& sample : test_set) {
    const SkinWeights pred = skinnet_forward(params, sample.mesh, sample.features);
    const MatX diff = (pred.weights - sample.label.weights).cwiseAbs();
    l1_sum += diff.sum();
    l1_sq += diff.array().square().sum();
    l1_count += double(diff.size());
    for (const Pose& pose : poses) {
      const Mesh a =
          deform_with_weights(sample.mesh, pred, body, VecX::Zero(kShapeDim), pose);
      const Mesh b = deform_with_weights(sample.mesh, sample.label, body,
                                         VecX::Zero(kShapeDim), pose);
      const VecX dist = (a.vertices - b.vertices).rowwise().norm();
      med_sum += dist.sum();
      med_sq += dist.squaredNorm();
      med_count += double(dist.size());
    }
  }
  WeightMetrics metrics;
  metrics.l1_mean = l1_sum / l1_count;
  metrics.l1_std = std::sqrt(std::max(0.0, l1_sq / l1_count - metrics.l1_mean * metrics.l1_mean));
  if (med_count > 0) {
    const double mean = med_sum / med_count;
    metrics.med_mean_mm = 1000.0 * mean;
    metrics.med_std_mm =
        1000.0 * std::sqrt(std::max(0.0, med_sq / med_count - mean * mean));
  }
  return metrics;
}

namespace {

nlohmann::json dense_to_json(const DenseParams& d) {
  return {{"weight", matrix_to_json(d.weight)}, {"bias", vector_to_json(d.bias)}};
}

DenseParams dense_from_json(const nlohmann::json& j, const std::string& what) {
  DenseParams d;
  d.weight = matrix_from_json(j.at("weight"), -1, what + ".weight");
  d.bias = vector_from_json(j.at("bias"), -1, what + ".bias");
  return d;
}

}  // namespace

void save_skinnet(const SkinNetParams& params, const std::string& path) {
  validate_skinnet(params);
  nlohmann::json doc;
  doc["feature_dim"] = params.feature_dim;
  doc["heads"] = params.heads;
  doc["leaky_slope"] = params.leaky_slope;
  doc["input"] = dense_to_json(params.input);
  doc["blocks"] = nlohmann::json::array();
  for (const auto& block : params.blocks) {
    doc["blocks"].push_back(
        {{"gat",
          {{"weight", matrix_to_json(block.gat.weight)},
           {"bias", vector_to_json(block.gat.bias)},
           {"att_src", vector_to_json(block.gat.att_src)},
           {"att_dst", vector_to_json(block.gat.att_dst)}}},
         {"mlt", dense_to_json(block.mlt)}});
  }
  doc["global_mlt"] = dense_to_json(params.global_mlt);
  doc["output"] = dense_to_json(params.output);
  save_json(doc, path);
}

SkinNetParams load_skinnet(const std::string& path) {
  const nlohmann::json doc = load_json(path);
  SkinNetParams params;
  try {
    params.feature_dim = doc.at("feature_dim").get<int>();
    params.heads = doc.at("heads").get<int>();
    params.leaky_slope = doc.at("leaky_slope").get<double>();
    params.input = dense_from_json(doc.at("input"), "input");
    for (const auto& j : doc.at("blocks")) {
      SkinNetBlock block;
      block.gat.weight = matrix_from_json(j.at("gat").at("weight"), -1, "gat.weight");
      block.gat.bias = vector_from_json(j.at("gat").at("bias"), -1, "gat.bias");
      block.gat.att_src = vector_from_json(j.at("gat").at("att_src"), -1, "gat.att_src");
      block.gat.att_dst = vector_from_json(j.at("gat").at("att_dst"), -1, "gat.att_dst");
      block.mlt = dense_from_json(j.at("mlt"), "mlt");
      params.blocks.push_back(std::move(block));
    }
    params.global_mlt = dense_from_json(doc.at("global_mlt"), "global_mlt");
    params.output = dense_from_json(doc.at("output"), "output");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  validate_skinnet(params);
  return params;
}

void save_loss_history(const std::vector<double>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,mean_kl\n" << std::setprecision(17);
  for (size_t i = 0; i < history.size(); ++i) {
    out << i << "," << history[i] << "\n";
  }
  if (!out.good()) throw IoError("failed writing " + path);
}

}  // namespace gskin
