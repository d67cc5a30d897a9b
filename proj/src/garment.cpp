#include "gskin/garment.h"

#include <Eigen/SVD>
#include <cmath>

#include "gskin/json_util.h"
#include "gskin/parts.h"
#include "gskin/primitives.h"
#include "gskin/rng.h"

namespace gskin {

const char* category_name(Category c) {
  switch (c) {
    case Category::LShirt: return "l-shirt";
    case Category::SShirt: return "s-shirt";
    case Category::LPant: return "l-pant";
    case Category::SPant: return "s-pant";
    case Category::LSkirt: return "l-skirt";
    case Category::SSkirt: return "s-skirt";
  }
  throw ValidationError("unknown category");
}

Category category_from_name(const std::string& name) {
  for (Category c : kAllCategories) {
    if (name == category_name(c)) return c;
  }
  throw ValidationError("unknown garment category: " + name);
}

void validate_garment_template(const GarmentTemplate& tmpl) {
  validate_mesh(tmpl.rest_mesh);
  const Index v = tmpl.vertex_count();
  if (tmpl.pca_basis.rows() != 3 * v || tmpl.pca_basis.cols() != kPcaDim) {
    throw ValidationError("pca_basis must be 3V x 64");
  }
  if (tmpl.pca_scales.size() != kPcaDim) {
    throw ValidationError("pca_scales must have 64 entries");
  }
  if ((tmpl.pca_scales.array() < 0).any()) {
    throw ValidationError("pca_scales must be non-negative");
  }
  if (!tmpl.rest_mesh.has_labels()) {
    throw ValidationError("garment template needs a segmentation prior");
  }
  for (Index a = 0; a < kPcaDim; ++a) {
    if (tmpl.pca_scales[a] == 0.0) {
      if (tmpl.pca_basis.col(a).norm() > 1e-8) {
        throw ValidationError("zero-scale pca columns must be zero");
      }
      continue;
    }
    for (Index b = 0; b <= a; ++b) {
      if (tmpl.pca_scales[b] == 0.0) continue;
      const double dot = tmpl.pca_basis.col(a).dot(tmpl.pca_basis.col(b));
      const double expect = a == b ? 1.0 : 0.0;
      if (std::abs(dot - expect) > 1e-8) {
        throw ValidationError("pca_basis columns must be orthonormal");
      }
    }
  }
}

Mesh garment_rest(const GarmentTemplate& tmpl, const GarmentParams& params) {
  if (params.alpha.size() != kPcaDim) throw ValidationError("alpha must have 64 entries");
  if (params.displacement.rows() != 0 &&
      params.displacement.rows() != tmpl.vertex_count()) {
    throw ValidationError("displacement rows must match garment vertex count");
  }
  Mesh out = tmpl.rest_mesh;
  const VecX scaled = tmpl.pca_scales.cwiseProduct(params.alpha);
  out.vertices += unflatten_rows(tmpl.pca_basis * scaled);
  if (params.displacement.rows() != 0) out.vertices += params.displacement;
  return out;
}

Mesh garment_mesh(const GarmentTemplate& tmpl, const GarmentParams& params,
                  const SkinWeights& weights, const BodyModel& body,
                  const VecX& beta, const Pose& pose) {
  Mesh rest = garment_rest(tmpl, params);
  const Points rest_joints = joints(body, beta);
  const auto transforms = forward_kinematics(rest_joints, pose, body.parents);
  rest.vertices = lbs(rest.vertices, transforms, weights);
  rest.vertices.rowwise() += pose.translation.transpose();
  return rest;
}

PcaModel build_pca(const std::vector<Mesh>& corpus, int n_components) {
  if (corpus.size() < 2) throw ValidationError("pca corpus needs at least 2 meshes");
  if (n_components < 1) throw ValidationError("n_components must be positive");
  const Index v = corpus.front().vertex_count();
  for (const Mesh& m : corpus) {
    if (m.vertex_count() != v || m.faces.rows() != corpus.front().faces.rows() ||
        (m.faces.rows() > 0 && (m.faces - corpus.front().faces).cwiseAbs().maxCoeff() != 0)) {
      throw ValidationError("corpus meshes must share connectivity");
    }
  }
  const Index m = Index(corpus.size());
  Points mean = Points::Zero(v, 3);
  for (const Mesh& mesh : corpus) mean += mesh.vertices;
  mean /= double(m);

  MatX centered(3 * v, m);
  for (Index j = 0; j < m; ++j) {
    centered.col(j) = flatten_rows(PointsT<double>(corpus[size_t(j)].vertices - mean));
  }
  Eigen::JacobiSVD<MatX> svd(centered, Eigen::ComputeThinU);
  const VecX sigma = svd.singularValues();
  const Index rank_max = sigma.size();

  PcaModel out;
  out.mean_mesh = corpus.front();
  out.mean_mesh.vertices = mean;
  out.basis = MatX::Zero(3 * v, n_components);
  out.scales = VecX::Zero(n_components);
  // noise floor anchored to both the leading component and the raw mesh
  // scale, so an identical corpus (all true scales 0) drops its fp residue
  double mesh_scale = 0;
  for (const Mesh& mesh : corpus) mesh_scale = std::max(mesh_scale, mesh.vertices.norm());
  const double cutoff =
      1e-12 * std::max(sigma.size() > 0 ? sigma[0] : 0.0, mesh_scale);
  const Index keep = std::min<Index>(n_components, rank_max);
  for (Index k = 0; k < keep; ++k) {
    if (sigma[k] <= cutoff) break;
    VecX col = svd.matrixU().col(k);
    for (Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > 1e-12) {
        if (col[i] < 0) col = -col;
        break;
      }
    }
    out.basis.col(k) = col;
    out.scales[k] = sigma[k];
  }
  return out;
}

VecX project_to_pca(const GarmentTemplate& tmpl, const Mesh& mesh) {
  if (mesh.vertex_count() != tmpl.vertex_count() ||
      mesh.faces.rows() != tmpl.rest_mesh.faces.rows() ||
      (mesh.faces.rows() > 0 &&
       (mesh.faces - tmpl.rest_mesh.faces).cwiseAbs().maxCoeff() != 0)) {
    throw ValidationError("mesh does not match template connectivity");
  }
  const VecX delta = flatten_rows(PointsT<double>(mesh.vertices - tmpl.rest_mesh.vertices));
  VecX alpha = VecX::Zero(kPcaDim);
  for (Index k = 0; k < kPcaDim; ++k) {
    if (tmpl.pca_scales[k] > 0) {
      alpha[k] = tmpl.pca_basis.col(k).dot(delta) / tmpl.pca_scales[k];
    }
  }
  return alpha;
}

Mesh transfer_garment(const GarmentTemplate& tmpl, const GarmentParams& params,
                      const SkinWeights& target_weights, const BodyModel& target_body,
                      const VecX& target_beta, const Pose& target_pose) {
  return garment_mesh(tmpl, params, target_weights, target_body, target_beta, target_pose);
}

namespace {

struct PartSpec {
  Vec3 top, bottom;      // axis endpoints at unit length multiplier
  double radius_top, radius_bottom;
  int n_ring, n_rings;
  int label;
  bool limb;  // limb parts take the limb girth multiplier
};

std::vector<PartSpec> garment_parts(Category c) {
  switch (c) {
    case Category::SShirt:
    case Category::LShirt: {
      const double sleeve_len = c == Category::SShirt ? 0.17 : 0.47;
      const int sleeve_rings = c == Category::SShirt ? 4 : 8;
      return {
          {{0, 0.50, 0}, {0, -0.03, 0}, 0.16, 0.16, 12, 10, kTorso, false},
          {{0.18, 0.45, 0}, {0.18 + sleeve_len, 0.45, 0}, 0.07, 0.07, 8,
           sleeve_rings, kLeftArm, true},
          {{-0.18, 0.45, 0}, {-0.18 - sleeve_len, 0.45, 0}, 0.07, 0.07, 8,
           sleeve_rings, kRightArm, true},
      };
    }
    case Category::SPant:
    case Category::LPant: {
      const double leg_y = c == Category::SPant ? -0.55 : -0.90;
      const int leg_rings = c == Category::SPant ? 6 : 10;
      return {
          {{0, -0.02, 0}, {0, -0.12, 0}, 0.16, 0.16, 12, 3, kPelvis, false},
          {{0.0905, -0.12, 0}, {0.10, leg_y, 0}, 0.07, 0.07, 8, leg_rings,
           kLeftLeg, true},
          {{-0.0905, -0.12, 0}, {-0.10, leg_y, 0}, 0.07, 0.07, 8, leg_rings,
           kRightLeg, true},
      };
    }
    case Category::SSkirt:
      return {{{0, -0.02, 0}, {0, -0.40, 0}, 0.16, 0.22, 16, 6, kLowerBody, false}};
    case Category::LSkirt:
      return {{{0, -0.02, 0}, {0, -0.80, 0}, 0.16, 0.30, 16, 8, kLowerBody, false}};
  }
  throw ValidationError("unknown category");
}

Mesh build_garment_mesh(Category c, double girth_body, double girth_limb, double length) {
  Mesh out;
  for (const PartSpec& part : garment_parts(c)) {
    const double g = part.limb ? girth_limb : girth_body;
    const Vec3 bottom = part.top + length * (part.bottom - part.top);
    Tube tube = make_tube(part.top, bottom, part.radius_top * g, part.radius_bottom * g,
                          part.n_ring, part.n_rings, false, false);
    tube.mesh.labels.assign(size_t(tube.mesh.vertex_count()), part.label);
    append_mesh(out, tube.mesh, part.label);
  }
  return out;
}

}  // namespace

SynthGarment synth_garment_template(Category category, uint64_t seed,
                                    const BodyModel& host_body) {
  Rng rng(seed);
  SynthGarment out;
  out.corpus.reserve(50);
  for (int s = 0; s < 50; ++s) {
    const double g1 = rng.uniform(0.95, 1.05);
    const double g2 = rng.uniform(0.95, 1.05);
    const double len = rng.uniform(0.95, 1.05);
    out.corpus.push_back(build_garment_mesh(category, g1, g2, len));
  }
  const PcaModel pca = build_pca(out.corpus, kPcaDim);
  out.tmpl.category = category;
  out.tmpl.rest_mesh = pca.mean_mesh;
  out.tmpl.rest_mesh.labels = out.corpus.front().labels;
  out.tmpl.pca_basis = pca.basis;
  out.tmpl.pca_scales = pca.scales;
  validate_garment_template(out.tmpl);

  // construction guard: the template must sit clear of the host body skin
  for (Index i = 0; i < out.tmpl.vertex_count(); ++i) {
    const double gap = (host_body.mesh.vertices.rowwise() -
                        out.tmpl.rest_mesh.vertices.row(i))
                           .rowwise()
                           .norm()
                           .minCoeff();
    if (gap < 0.005) {
      throw ValidationError("synthetic garment vertex too close to host body");
    }
  }
  return out;
}

void save_garment_template(const GarmentTemplate& tmpl, const std::string& path) {
  validate_garment_template(tmpl);
  nlohmann::json doc;
  doc["category"] = category_name(tmpl.category);
  doc["vertices"] = matrix_to_json(tmpl.rest_mesh.vertices);
  nlohmann::json faces = nlohmann::json::array();
  for (Index f = 0; f < tmpl.rest_mesh.face_count(); ++f) {
    faces.push_back({tmpl.rest_mesh.faces(f, 0), tmpl.rest_mesh.faces(f, 1),
                     tmpl.rest_mesh.faces(f, 2)});
  }
  doc["faces"] = std::move(faces);
  doc["pca_basis"] = matrix_to_json(tmpl.pca_basis);
  doc["pca_scales"] = vector_to_json(tmpl.pca_scales);
  doc["segmentation_prior"] = tmpl.rest_mesh.labels;
  save_json(doc, path);
}

GarmentTemplate load_garment_template(const std::string& path) {
  const nlohmann::json doc = load_json(path);
  for (const char* key :
       {"category", "vertices", "faces", "pca_basis", "pca_scales", "segmentation_prior"}) {
    if (!doc.contains(key)) throw ParseError(path + ": missing field " + key);
  }
  GarmentTemplate tmpl;
  tmpl.category = category_from_name(doc["category"].get<std::string>());
  tmpl.rest_mesh.vertices = matrix_from_json(doc["vertices"], 3, "vertices");
  const MatX faces = matrix_from_json(doc["faces"], 3, "faces");
  tmpl.rest_mesh.faces.resize(faces.rows(), 3);
  for (Index i = 0; i < faces.rows(); ++i) {
    for (int k = 0; k < 3; ++k) tmpl.rest_mesh.faces(i, k) = int(std::lround(faces(i, k)));
  }
  tmpl.pca_basis = matrix_from_json(doc["pca_basis"], kPcaDim, "pca_basis");
  tmpl.pca_scales = vector_from_json(doc["pca_scales"], kPcaDim, "pca_scales");
  tmpl.rest_mesh.labels.clear();
  for (const auto& t : doc["segmentation_prior"]) tmpl.rest_mesh.labels.push_back(t.get<int>());
  validate_garment_template(tmpl);
  return tmpl;
}

void save_garment_params(const GarmentParams& params, const std::string& path) {
  nlohmann::json doc;
  doc["alpha"] = vector_to_json(params.alpha);
  doc["displacement"] = matrix_to_json(params.displacement);
  save_json(doc, path);
}

GarmentParams load_garment_params(const std::string& path) {
  const nlohmann::json doc = load_json(path);
  if (!doc.contains("alpha") || !doc.contains("displacement")) {
    throw ParseError(path + ": need alpha and displacement fields");
  }
  GarmentParams params;
  params.alpha = vector_from_json(doc["alpha"], kPcaDim, "alpha");
  params.displacement = matrix_from_json(doc["displacement"], 3, "displacement");
  if (!params.alpha.allFinite() || !params.displacement.allFinite()) {
    throw ValidationError(path + ": garment params must be finite");
  }
  return params;
}

}  // namespace gskin
