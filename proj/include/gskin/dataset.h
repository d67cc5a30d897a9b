#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gskin/body_model.h"
#include "gskin/garment.h"
#include "gskin/skinnet.h"
#include "gskin/skinning_transfer.h"

namespace gskin {

struct DatasetConfig {
  int n_train = 200;
  int n_test = 50;
  std::uint64_t seed = 0;
  double alpha_scale = 0.8;  // stddev of the sampled pca coordinates
  TransferConfig transfer;   // label-generation settings
};

void validate_dataset_config(const DatasetConfig& config);

struct DatasetSample {
  WeightSample sample;
  Category category = Category::LShirt;
};

struct Dataset {
  BodyModel body;
  std::vector<GarmentTemplate> templates;  // kAllCategories order
  std::vector<DatasetSample> train;
  std::vector<DatasetSample> test;
};

// Neutral garments with transferred ground-truth weights around one synthetic
// body: categories round-robin, pca coordinates drawn fresh per sample.
Dataset make_dataset(const DatasetConfig& config);

// One sample: the garment instance at `alpha`, features against the body's
// neutral joints, and its transferred weight label.
DatasetSample make_dataset_sample(const GarmentTemplate& tmpl, Category category,
                                  const VecX& alpha, const BodyModel& body,
                                  const TransferConfig& transfer);

// Random poses for deformation metrics: axis-angle components drawn from
// N(0, magnitude^2), zero translation.
std::vector<Pose> sample_poses(int count, std::uint64_t seed, double magnitude = 0.3);

// Writes body_model.json, garment_<category>.json templates, per-sample
// mesh/label/weight files under train/ and test/, and the two split
// manifests train.json / test.json into dir.
void save_dataset(const Dataset& dataset, const std::string& dir);

struct DatasetSplit {
  BodyModel body;
  std::vector<DatasetSample> samples;
};

// Reads a split manifest written by save_dataset, resolving its relative
// paths against the manifest's directory; features are recomputed.
DatasetSplit load_dataset_split(const std::string& manifest_path);

// Strips the per-sample categories for the trainer.
std::vector<WeightSample> weight_samples(const std::vector<DatasetSample>& samples);

}  // namespace gskin
