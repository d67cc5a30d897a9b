#pragma once

#include <string>
#include <vector>

#include "gskin/body_model.h"
#include "gskin/mesh.h"
#include "gskin/skin_weights.h"
#include "gskin/types.h"

namespace gskin {

enum class Category { LShirt, SShirt, LPant, SPant, LSkirt, SSkirt };

const char* category_name(Category c);
Category category_from_name(const std::string& name);
inline constexpr std::array<Category, 6> kAllCategories = {
    Category::LShirt, Category::SShirt, Category::LPant,
    Category::SPant,  Category::LSkirt, Category::SSkirt};

// Garment shape space: rest mesh (the corpus mean), orthonormal PCA columns
// with their singular-value scales, and a per-vertex body-part prior carried
// in rest_mesh.labels.
struct GarmentTemplate {
  Category category = Category::LShirt;
  Mesh rest_mesh;
  MatX pca_basis;   // 3V x 64, unit columns; zero columns where scale is 0
  VecX pca_scales;  // 64, non-negative

  Index vertex_count() const { return rest_mesh.vertex_count(); }
  const std::vector<int>& segmentation_prior() const { return rest_mesh.labels; }
};

// PCA coordinates plus a free per-vertex displacement field. An empty (0-row)
// displacement acts as zero.
struct GarmentParams {
  VecX alpha = VecX::Zero(kPcaDim);
  Points displacement = Points(0, 3);
};

void validate_garment_template(const GarmentTemplate& tmpl);

// Rest-mesh evaluation: G + pca_basis * (pca_scales .* alpha) + displacement.
Mesh garment_rest(const GarmentTemplate& tmpl, const GarmentParams& params);

// Rest garment skinned with the host body's kinematics (shared theta and
// shape-dependent joints), plus global translation.
Mesh garment_mesh(const GarmentTemplate& tmpl, const GarmentParams& params,
                  const SkinWeights& weights, const BodyModel& body,
                  const VecX& beta, const Pose& pose);

// Mean mesh and orthonormal basis from a registered corpus.
struct PcaModel {
  Mesh mean_mesh;
  MatX basis;   // 3V x n_components
  VecX scales;  // n_components
};

PcaModel build_pca(const std::vector<Mesh>& corpus, int n_components = kPcaDim);

// Least-squares PCA coordinates of a mesh against the template basis; zero
// where the scale is zero.
VecX project_to_pca(const GarmentTemplate& tmpl, const Mesh& mesh);

// Re-dress: source garment parameters evaluated on a different body/pose,
// with weights already computed for that target body.
Mesh transfer_garment(const GarmentTemplate& tmpl, const GarmentParams& params,
                      const SkinWeights& target_weights, const BodyModel& target_body,
                      const VecX& target_beta, const Pose& target_pose);

struct SynthGarment {
  GarmentTemplate tmpl;
  std::vector<Mesh> corpus;
};

// Procedural garment around the synthetic body: open tubes (shirt, pant) or a
// cone (skirt) offset ~2 cm outside the host surface, plus a 50-mesh corpus
// with randomized girth/length multipliers feeding build_pca.
SynthGarment synth_garment_template(Category category, uint64_t seed,
                                    const BodyModel& host_body);

void save_garment_template(const GarmentTemplate& tmpl, const std::string& path);
GarmentTemplate load_garment_template(const std::string& path);
void save_garment_params(const GarmentParams& params, const std::string& path);
GarmentParams load_garment_params(const std::string& path);

}  // namespace gskin
