#include "gskin/dataset.h"

#include <filesystem>

#include "gskin/json_util.h"
#include "gskin/obj_io.h"
#include "gskin/rng.h"

namespace gskin {

namespace {

namespace fs = std::filesystem;

std::string sample_stem(int index) { return "sample_" + std::to_string(index); }

void save_split(const std::vector<DatasetSample>& samples, const fs::path& dir,
                const std::string& split_name) {
  fs::create_directories(dir / split_name);
  nlohmann::json manifest;
  manifest["body_model"] = "body_model.json";
  manifest["samples"] = nlohmann::json::array();
  for (size_t i = 0; i < samples.size(); ++i) {
    const std::string stem = split_name + "/" + sample_stem(int(i));
    const std::string mesh_rel = stem + ".obj";
    const std::string weights_rel = stem + ".weights.json";
    save_obj(samples[i].sample.mesh, (dir / mesh_rel).string());
    if (samples[i].sample.mesh.has_labels()) {
      save_labels(samples[i].sample.mesh.labels,
                  labels_sidecar_path((dir / mesh_rel).string()));
    }
    save_weights(samples[i].sample.label, (dir / weights_rel).string());
    manifest["samples"].push_back({{"mesh", mesh_rel},
                                   {"weights", weights_rel},
                                   {"category", category_name(samples[i].category)}});
  }
  save_json(manifest, (dir / (split_name + ".json")).string(), 2);
}

}  // namespace

void validate_dataset_config(const DatasetConfig& config) {
  if (config.n_train < 0 || config.n_test < 0) {
    throw ValidationError("sample counts must be non-negative");
  }
  if (config.n_train + config.n_test < 1) {
    throw ValidationError("dataset needs at least one sample");
  }
  if (config.alpha_scale < 0) throw ValidationError("alpha_scale must be non-negative");
  validate_transfer_config(config.transfer);
}

DatasetSample make_dataset_sample(const GarmentTemplate& tmpl, Category category,
                                  const VecX& alpha, const BodyModel& body,
                                  const TransferConfig& transfer) {
  DatasetSample out;
  out.category = category;
  out.sample.mesh = garment_rest(tmpl, {alpha, Points(0, 3)});
  out.sample.label = idw_transfer(out.sample.mesh, body.mesh, body.weights, transfer);
  out.sample.features =
      compute_features(out.sample.mesh, joints(body, VecX::Zero(kShapeDim)));
  return out;
}

Dataset make_dataset(const DatasetConfig& config) {
  validate_dataset_config(config);
  Dataset out;
  out.body = synth_body_model(config.seed);
  out.templates.reserve(kAllCategories.size());
  for (size_t i = 0; i < kAllCategories.size(); ++i) {
    out.templates.push_back(
        synth_garment_template(kAllCategories[i], config.seed + i, out.body).tmpl);
  }

  Rng rng(config.seed + 0x9e3779b9u);
  auto draw = [&](int count, std::vector<DatasetSample>& into) {
    into.reserve(size_t(count));
    for (int i = 0; i < count; ++i) {
      const size_t c = size_t(i) % kAllCategories.size();
      const VecX alpha = config.alpha_scale * rng.normal_vector(kPcaDim);
      into.push_back(make_dataset_sample(out.templates[c], kAllCategories[c], alpha,
                                         out.body, config.transfer));
    }
  };
  draw(config.n_train, out.train);
  draw(config.n_test, out.test);
  return out;
}

std::vector<Pose> sample_poses(int count, std::uint64_t seed, double magnitude) {
  if (count < 1) throw ValidationError("pose count must be positive");
  if (magnitude < 0) throw ValidationError("pose magnitude must be non-negative");
  Rng rng(seed);
  std::vector<Pose> poses(static_cast<size_t>(count));
  for (Pose& pose : poses) pose.theta = magnitude * rng.normal_vector(kThetaDim);
  return poses;
}

void save_dataset(const Dataset& dataset, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  save_body_model(dataset.body, (root / "body_model.json").string());
  for (size_t i = 0; i < dataset.templates.size(); ++i) {
    const std::string name =
        std::string("garment_") + category_name(dataset.templates[i].category) + ".json";
    save_garment_template(dataset.templates[i], (root / name).string());
  }
  save_split(dataset.train, root, "train");
  save_split(dataset.test, root, "test");
}

DatasetSplit load_dataset_split(const std::string& manifest_path) {
  const nlohmann::json doc = load_json(manifest_path);
  if (!doc.contains("body_model") || !doc.contains("samples")) {
    throw ParseError("split manifest needs body_model and samples");
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  DatasetSplit out;
  out.body = load_body_model((base / doc["body_model"].get<std::string>()).string());
  const Points rest_joints = joints(out.body, VecX::Zero(kShapeDim));
  for (const auto& entry : doc["samples"]) {
    DatasetSample s;
    s.category = category_from_name(entry.at("category").get<std::string>());
    s.sample.mesh =
        load_obj_with_labels((base / entry.at("mesh").get<std::string>()).string());
    s.sample.label =
        load_weights((base / entry.at("weights").get<std::string>()).string());
    if (s.sample.label.vertex_count() != s.sample.mesh.vertex_count()) {
      throw ValidationError("sample weights disagree with mesh vertex count");
    }
    s.sample.features = compute_features(s.sample.mesh, rest_joints);
    out.samples.push_back(std::move(s));
  }
  return out;
}

std::vector<WeightSample> weight_samples(const std::vector<DatasetSample>& samples) {
  std::vector<WeightSample> out;
  out.reserve(samples.size());
  for (const DatasetSample& s : samples) out.push_back(s.sample);
  return out;
}

}  // namespace gskin
