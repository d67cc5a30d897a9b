#include "gskin/registration.h"

#include <cmath>
#include <limits>
#include <string>

#include "gskin/json_util.h"
#include "gskin/normals.h"

namespace gskin {

namespace {

// mean (n_q . (p - q))^2 over pairs against fixed plane points/normals;
// accumulates w * d/dsource into source_bar when given
double plane_sq_term(const Points& source, const Points& q_points,
                     const Points& q_normals,
                     const std::vector<CorrespondencePair>& pairs, double weight,
                     Points* source_bar) {
  if (pairs.empty()) return 0.0;
  double sum = 0;
  const double inv_n = 1.0 / double(pairs.size());
  for (const CorrespondencePair& pair : pairs) {
    const Vec3 n = q_normals.row(pair.target).transpose();
    const Vec3 diff =
        (source.row(pair.source) - q_points.row(pair.target)).transpose();
    const double d = n.dot(diff);
    sum += d * d;
    if (source_bar) {
      source_bar->row(pair.source) += (weight * 2.0 * inv_n * d) * n.transpose();
    }
  }
  return weight * sum * inv_n;
}

// mean ReLU(-n_q . (p - q)) over pairs against frozen planes
double relu_plane_term(const Points& source, const Points& q_points,
                       const Points& q_normals,
                       const std::vector<CorrespondencePair>& pairs, double weight,
                       Points* source_bar) {
  if (pairs.empty()) return 0.0;
  double sum = 0;
  const double inv_n = 1.0 / double(pairs.size());
  for (const CorrespondencePair& pair : pairs) {
    const Vec3 n = q_normals.row(pair.target).transpose();
    const Vec3 diff =
        (source.row(pair.source) - q_points.row(pair.target)).transpose();
    const double depth = -n.dot(diff);
    if (depth > 0) {
      sum += depth;
      if (source_bar) source_bar->row(pair.source) -= (weight * inv_n) * n.transpose();
    }
  }
  return weight * sum * inv_n;
}

struct PosedBody {
  Points rest_vertices;  // shaped plus pose-corrective offsets
  Points rest_joints;
  std::vector<Mat4> transforms;
  Points posed;
};

PosedBody pose_body(const BodyModel& model, const VecX& beta, const Pose& pose) {
  PosedBody f;
  f.rest_vertices = rest_body(model, beta, pose.theta).vertices;
  f.rest_joints = joints(model, beta);
  f.transforms = forward_kinematics(f.rest_joints, pose, model.parents);
  f.posed = lbs(f.rest_vertices, f.transforms, model.weights);
  f.posed.rowwise() += pose.translation.transpose();
  return f;
}

// adjoint of lbs: scatters the posed-vertex adjoint into per-joint transform
// adjoints and the rest-vertex adjoint
void lbs_backward(const Points& rest, const std::vector<Mat4>& transforms,
                  const SkinWeights& weights, const Points& posed_bar,
                  std::vector<Mat3>& rot_bar, std::vector<Vec3>& t_bar,
                  Points& rest_bar) {
  for (size_t j = 0; j < transforms.size(); ++j) {
    const auto col = weights.weights.col(Index(j));
    if ((col.array() == 0).all()) continue;
    const Mat3 rot = transforms[j].topLeftCorner<3, 3>();
    const Points weighted = col.asDiagonal() * posed_bar;
    rot_bar[j] += weighted.transpose() * rest;
    t_bar[j] += weighted.colwise().sum().transpose();
    rest_bar += weighted * rot;
  }
}

// adjoint of forward_kinematics through the parent chain and the
// rest-to-posed conversion; world transforms are rebuilt from the returned
// ones (A_t = G_t + G_R * rest_joint)
void fk_backward(const Points& rest_joints, const Pose& pose,
                 const std::vector<int>& parents, const std::vector<Mat4>& transforms,
                 const std::vector<Mat3>& g_rot_bar, const std::vector<Vec3>& g_t_bar,
                 VecX& theta_bar, Points& joints_bar) {
  std::vector<Mat4> world(static_cast<size_t>(kJointCount));
  for (int j = 0; j < kJointCount; ++j) {
    world[size_t(j)] = transforms[size_t(j)];
    const Vec3 rest = rest_joints.row(j).transpose();
    world[size_t(j)].topRightCorner<3, 1>() +=
        world[size_t(j)].topLeftCorner<3, 3>() * rest;
  }

  std::vector<Mat4> a_bar(size_t(kJointCount), Mat4::Zero());
  for (int j = 0; j < kJointCount; ++j) {
    const Vec3 rest = rest_joints.row(j).transpose();
    a_bar[size_t(j)].topLeftCorner<3, 3>() +=
        g_rot_bar[size_t(j)] - g_t_bar[size_t(j)] * rest.transpose();
    a_bar[size_t(j)].topRightCorner<3, 1>() += g_t_bar[size_t(j)];
    joints_bar.row(j) -=
        (world[size_t(j)].topLeftCorner<3, 3>().transpose() * g_t_bar[size_t(j)])
            .transpose();
  }

  for (int j = kJointCount - 1; j >= 0; --j) {
    const int p = parents[size_t(j)];
    Mat4 local = Mat4::Identity();
    local.topLeftCorner<3, 3>() = rodrigues(pose.joint(j));
    const Vec3 rest = rest_joints.row(j).transpose();
    local.topRightCorner<3, 1>() =
        p >= 0 ? Vec3(rest - rest_joints.row(p).transpose()) : rest;

    Mat4 l_bar;
    if (p >= 0) {
      l_bar = world[size_t(p)].transpose() * a_bar[size_t(j)];
      a_bar[size_t(p)] += a_bar[size_t(j)] * local.transpose();
    } else {
      l_bar = a_bar[size_t(j)];
    }

    const Mat3 r_bar = l_bar.topLeftCorner<3, 3>();
    const Vec3 d_bar = l_bar.topRightCorner<3, 1>();
    const std::array<Mat3, 3> jac = rodrigues_jacobian(pose.joint(j));
    for (int k = 0; k < 3; ++k) {
      theta_bar[3 * j + k] += r_bar.cwiseProduct(jac[size_t(k)]).sum();
    }
    joints_bar.row(j) += d_bar.transpose();
    if (p >= 0) joints_bar.row(p) -= d_bar.transpose();
  }
}

Points full_displacement(const GarmentParams& gp, Index vertex_count) {
  if (gp.displacement.rows() == 0) return Points::Zero(vertex_count, 3);
  return gp.displacement;
}

void check_fit_params(const FitProblem& problem, const FitParams& params) {
  if (params.garment.alpha.size() != problem.tmpl.pca_scales.size()) {
    throw ValidationError("alpha size must match the template pca dimension");
  }
  if (params.beta.size() != kShapeDim) throw ValidationError("beta must have 10 entries");
  if (params.pose.theta.size() != kThetaDim) {
    throw ValidationError("theta must have 72 entries");
  }
  const Index rows = params.garment.displacement.rows();
  if (rows != 0 && rows != problem.tmpl.vertex_count()) {
    throw ValidationError("displacement rows must match garment vertex count");
  }
}

double energy_impl(const FitProblem& problem, const FitParams& params,
                   const FitCorrespondences& pairs, EnergyTerms& terms,
                   FitParams* gradients) {
  const BodyModel& model = problem.body;
  const GarmentTemplate& tmpl = problem.tmpl;
  const FitWeights& w = problem.weights;
  const Index vg = tmpl.vertex_count();

  const PosedBody body = pose_body(model, params.beta, params.pose);
  const Mesh rest_g = garment_rest(tmpl, params.garment);
  const Mesh rest_g0 = garment_rest(tmpl, {params.garment.alpha, Points(0, 3)});
  Points posed_g = lbs(rest_g.vertices, body.transforms, problem.garment_weights);
  posed_g.rowwise() += params.pose.translation.transpose();

  const Points skin_normals = vertex_normals(problem.target_skin);
  const Points garment_normals = vertex_normals(problem.target_garment);

  Points body_bar = Points::Zero(body.posed.rows(), 3);
  Points garment_bar = Points::Zero(vg, 3);
  Points rest_g0_bar = Points::Zero(vg, 3);
  Points* bb = gradients ? &body_bar : nullptr;
  Points* gb = gradients ? &garment_bar : nullptr;
  Points* rb = gradients ? &rest_g0_bar : nullptr;

  terms = EnergyTerms{};
  terms.body_fit = plane_sq_term(body.posed, problem.target_skin.vertices,
                                 skin_normals, pairs.body_skin, w.point_to_plane, bb);
  terms.garment_fit =
      plane_sq_term(posed_g, problem.target_garment.vertices, garment_normals,
                    pairs.garment_target, w.point_to_plane, gb);
  terms.interpenetration =
      relu_plane_term(posed_g, pairs.body_points, pairs.body_normals,
                      pairs.garment_body, w.interpenetration, gb) +
      relu_plane_term(rest_g0.vertices, pairs.rest_body_points,
                      pairs.rest_body_normals, pairs.garment_body_rest,
                      w.interpenetration, rb);

  const Points disp = full_displacement(params.garment, vg);
  terms.reg_alpha = w.reg_alpha * params.garment.alpha.squaredNorm();
  terms.reg_beta = w.reg_beta * params.beta.squaredNorm();
  terms.reg_disp = w.reg_disp * disp.squaredNorm();

  if (!gradients) return terms.total();

  std::vector<Mat3> rot_bar(size_t(kJointCount), Mat3::Zero());
  std::vector<Vec3> trans_bar(size_t(kJointCount), Vec3::Zero());
  Points rest_g_bar = Points::Zero(vg, 3);
  Points rest_b_bar = Points::Zero(body.rest_vertices.rows(), 3);
  lbs_backward(rest_g.vertices, body.transforms, problem.garment_weights, garment_bar,
               rot_bar, trans_bar, rest_g_bar);
  lbs_backward(body.rest_vertices, body.transforms, model.weights, body_bar, rot_bar,
               trans_bar, rest_b_bar);

  gradients->pose.translation =
      (body_bar.colwise().sum() + garment_bar.colwise().sum()).transpose();

  VecX theta_bar = VecX::Zero(kThetaDim);
  Points joints_bar = Points::Zero(kJointCount, 3);
  fk_backward(body.rest_joints, params.pose, model.parents, body.transforms, rot_bar,
              trans_bar, theta_bar, joints_bar);

  // pose-corrective path into theta
  const VecX blend_bar = model.pose_basis.transpose() * flatten_rows(rest_b_bar);
  for (int j = 1; j < kJointCount; ++j) {
    const std::array<Mat3, 3> jac = rodrigues_jacobian(params.pose.joint(j));
    for (int k = 0; k < 3; ++k) {
      double acc = 0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          acc += blend_bar[(j - 1) * 9 + 3 * r + c] * jac[size_t(k)](r, c);
      theta_bar[3 * j + k] += acc;
    }
  }
  gradients->pose.theta = theta_bar;

  const Points shaped_bar = model.joint_regressor.transpose() * joints_bar;
  gradients->beta = model.shape_basis.transpose() *
                        (flatten_rows(shaped_bar) + flatten_rows(rest_b_bar)) +
                    2.0 * w.reg_beta * params.beta;

  const VecX garment_flat = flatten_rows(rest_g_bar) + flatten_rows(rest_g0_bar);
  gradients->garment.alpha =
      (tmpl.pca_basis.transpose() * garment_flat).cwiseProduct(tmpl.pca_scales) +
      2.0 * w.reg_alpha * params.garment.alpha;
  gradients->garment.displacement = rest_g_bar + 2.0 * w.reg_disp * disp;

  return terms.total();
}

struct FreeMask {
  bool alpha = true;
  bool displacement = true;
  bool beta = true;
  bool theta = true;
  bool translation = true;
};

void mask_gradient(FitParams& g, const FreeMask& mask) {
  if (!mask.alpha) g.garment.alpha.setZero();
  if (!mask.displacement) g.garment.displacement.setZero();
  if (!mask.beta) g.beta.setZero();
  if (!mask.theta) g.pose.theta.setZero();
  if (!mask.translation) g.pose.translation.setZero();
}

FitParams zero_params(const FitProblem& problem) {
  FitParams p;
  p.garment.alpha = VecX::Zero(problem.tmpl.pca_scales.size());
  p.garment.displacement = Points::Zero(problem.tmpl.vertex_count(), 3);
  p.beta = VecX::Zero(kShapeDim);
  return p;
}

template <typename F>
void visit_params(FitParams& a, const FitParams& b, F f) {
  f(a.garment.alpha, b.garment.alpha);
  f(a.garment.displacement, b.garment.displacement);
  f(a.beta, b.beta);
  f(a.pose.theta, b.pose.theta);
  f(a.pose.translation, b.pose.translation);
}

void add_scaled(FitParams& dst, const FitParams& src, double scale) {
  visit_params(dst, src, [scale](auto& d, const auto& x) { d += scale * x; });
}

double squared_norm(const FitParams& p) {
  return p.garment.alpha.squaredNorm() + p.garment.displacement.squaredNorm() +
         p.beta.squaredNorm() + p.pose.theta.squaredNorm() +
         p.pose.translation.squaredNorm();
}

// one optimization phase over the unmasked parameters; returns true when the
// convergence window (or a line-search stall) ended it early
bool run_stage(const FitProblem& problem, FitParams& params, const FreeMask& mask,
               int iters, FitResult& result) {
  const OptimizerConfig& opt = problem.optimizer;
  FitParams velocity = zero_params(problem);
  FitParams adam_m = zero_params(problem);
  FitParams adam_v = zero_params(problem);
  int adam_steps = 0;
  int small_changes = 0;
  double prev = std::numeric_limits<double>::quiet_NaN();

  FitCorrespondences pairs = find_correspondences(problem, params);
  for (int it = 0; it < iters; ++it) {
    if (opt.refind_pairs && it > 0) pairs = find_correspondences(problem, params);
    FitParams grads = zero_params(problem);
    const double e0 = fit_energy(problem, params, pairs, &grads);
    if (!std::isfinite(e0)) {
      throw Error("registration diverged: non-finite energy at iteration " +
                  std::to_string(result.iterations));
    }
    mask_gradient(grads, mask);

    double accepted = e0;
    if (opt.adam) {
      ++adam_steps;
      visit_params(adam_m, grads,
                   [](auto& m, const auto& x) { m = 0.9 * m + 0.1 * x; });
      visit_params(adam_v, grads, [](auto& v, const auto& x) {
        v = (0.999 * v.array() + 0.001 * x.array().square()).matrix();
      });
      const double c1 = 1.0 - std::pow(0.9, adam_steps);
      const double c2 = 1.0 - std::pow(0.999, adam_steps);
      FitParams step = adam_m;
      visit_params(step, adam_v, [&](auto& m, const auto& v) {
        m = ((m / c1).array() / ((v / c2).array().sqrt() + 1e-8)).matrix();
      });
      add_scaled(params, step, -opt.learning_rate);
      accepted = fit_energy(problem, params, pairs);
      if (!std::isfinite(accepted)) {
        throw Error("registration diverged: non-finite energy at iteration " +
                    std::to_string(result.iterations));
      }
    } else {
      bool took_step = false;
      if (squared_norm(velocity) > 0) {
        FitParams candidate = params;
        add_scaled(candidate, velocity, opt.momentum);
        add_scaled(candidate, grads, -opt.learning_rate);
        const double e1 = fit_energy(problem, candidate, pairs);
        if (std::isfinite(e1) && e1 < e0) {
          FitParams step = velocity;
          visit_params(step, grads, [&](auto& v, const auto& g) {
            v = opt.momentum * v - opt.learning_rate * g;
          });
          velocity = step;
          params = candidate;
          accepted = e1;
          took_step = true;
        }
      }
      if (!took_step) {
        double scale = 1.0;
        for (int b = 0; b <= opt.max_backtracks; ++b) {
          FitParams candidate = params;
          add_scaled(candidate, grads, -scale * opt.learning_rate);
          const double e1 = fit_energy(problem, candidate, pairs);
          if (std::isfinite(e1) && e1 < e0) {
            velocity = zero_params(problem);
            add_scaled(velocity, grads, -scale * opt.learning_rate);
            params = candidate;
            accepted = e1;
            took_step = true;
            break;
          }
          scale *= 0.5;
        }
      }
      if (!took_step) {
        // no descent at the smallest step: numerically converged
        result.energy.push_back(e0);
        ++result.iterations;
        return true;
      }
    }

    result.energy.push_back(accepted);
    ++result.iterations;
    if (std::isfinite(prev)) {
      const bool small =
          std::abs(prev - accepted) <=
          opt.convergence_tol * std::max(1.0, std::abs(accepted));
      small_changes = small ? small_changes + 1 : 0;
      if (small_changes >= opt.convergence_window) return true;
    }
    prev = accepted;
  }
  return false;
}

double residual_med_mm(const FitProblem& problem, const FitParams& params,
                       const FitCorrespondences& pairs) {
  const PosedBody body = pose_body(problem.body, params.beta, params.pose);
  const Mesh rest_g = garment_rest(problem.tmpl, params.garment);
  Points posed_g = lbs(rest_g.vertices, body.transforms, problem.garment_weights);
  posed_g.rowwise() += params.pose.translation.transpose();

  double sum = 0;
  Index count = 0;
  if (body.posed.rows() == problem.target_skin.vertex_count() &&
      posed_g.rows() == problem.target_garment.vertex_count()) {
    sum += (body.posed - problem.target_skin.vertices).rowwise().norm().sum();
    sum += (posed_g - problem.target_garment.vertices).rowwise().norm().sum();
    count = body.posed.rows() + posed_g.rows();
  } else {
    for (const auto& pair : pairs.body_skin) {
      sum += (body.posed.row(pair.source) -
              problem.target_skin.vertices.row(pair.target))
                 .norm();
    }
    for (const auto& pair : pairs.garment_target) {
      sum += (posed_g.row(pair.source) -
              problem.target_garment.vertices.row(pair.target))
                 .norm();
    }
    count = Index(pairs.body_skin.size() + pairs.garment_target.size());
  }
  return count > 0 ? 1000.0 * sum / double(count) : 0.0;
}

void finalize(const FitProblem& problem, const FitParams& params, FitResult& result) {
  result.params = params;
  const FitCorrespondences pairs = find_correspondences(problem, params);
  result.breakdown = fit_energy_terms(problem, params, pairs);
  result.med_mm = residual_med_mm(problem, params, pairs);
}

}  // namespace

void validate_fit_problem(const FitProblem& problem) {
  validate_mesh(problem.target_garment);
  validate_mesh(problem.target_skin);
  if (problem.target_garment.face_count() == 0 || problem.target_skin.face_count() == 0) {
    throw ValidationError("fit targets need faces for normals");
  }
  validate_body_model(problem.body);
  validate_garment_template(problem.tmpl);
  if (problem.garment_weights.vertex_count() != problem.tmpl.vertex_count()) {
    throw ValidationError("garment weight rows must match template vertex count");
  }
  validate_weights(problem.garment_weights);
  const FitWeights& w = problem.weights;
  for (double value : {w.point_to_plane, w.interpenetration, w.reg_alpha, w.reg_beta,
                       w.reg_disp}) {
    if (value < 0) throw ValidationError("term weights must be non-negative");
  }
  const OptimizerConfig& opt = problem.optimizer;
  if (opt.max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(opt.learning_rate > 0)) throw ValidationError("learning rate must be positive");
  if (opt.momentum < 0 || opt.momentum >= 1) {
    throw ValidationError("momentum must be in [0, 1)");
  }
  if (opt.max_backtracks < 0) throw ValidationError("max_backtracks must be non-negative");
  if (!(opt.convergence_tol > 0)) throw ValidationError("convergence_tol must be positive");
  if (opt.convergence_window < 1) {
    throw ValidationError("convergence_window must be at least 1");
  }
  validate_pair_config(problem.pairs);
}

double point_to_plane(const Mesh& source, const Mesh& target,
                      const std::vector<CorrespondencePair>& pairs) {
  if (pairs.empty()) return 0.0;
  for (const auto& pair : pairs) {
    if (pair.source < 0 || pair.source >= source.vertex_count() || pair.target < 0 ||
        pair.target >= target.vertex_count()) {
      throw ValidationError("correspondence pair index out of range");
    }
  }
  return plane_sq_term(source.vertices, target.vertices, vertex_normals(target), pairs,
                       1.0, nullptr);
}

Points point_to_plane_gradients(const Mesh& source, const Mesh& target,
                                const std::vector<CorrespondencePair>& pairs) {
  Points g = Points::Zero(source.vertex_count(), 3);
  if (pairs.empty()) return g;
  for (const auto& pair : pairs) {
    if (pair.source < 0 || pair.source >= source.vertex_count() || pair.target < 0 ||
        pair.target >= target.vertex_count()) {
      throw ValidationError("correspondence pair index out of range");
    }
  }
  plane_sq_term(source.vertices, target.vertices, vertex_normals(target), pairs, 1.0,
                &g);
  return g;
}

FitCorrespondences find_correspondences(const FitProblem& problem,
                                        const FitParams& params) {
  check_fit_params(problem, params);
  const PosedBody body = pose_body(problem.body, params.beta, params.pose);
  const Mesh rest_g = garment_rest(problem.tmpl, params.garment);
  const Mesh rest_g0 = garment_rest(problem.tmpl, {params.garment.alpha, Points(0, 3)});
  Points posed_g = lbs(rest_g.vertices, body.transforms, problem.garment_weights);
  posed_g.rowwise() += params.pose.translation.transpose();

  const Mesh posed_body_mesh{body.posed, problem.body.mesh.faces, {}};
  const Mesh posed_garment_mesh{posed_g, problem.tmpl.rest_mesh.faces, {}};
  const Mesh rest_body_mesh = rest_body(problem.body, params.beta, VecX::Zero(kThetaDim));

  FitCorrespondences out;
  out.body_skin = find_pairs(posed_body_mesh, problem.target_skin, problem.pairs);
  out.garment_target =
      find_pairs(posed_garment_mesh, problem.target_garment, problem.pairs);
  out.garment_body = find_pairs(posed_garment_mesh, posed_body_mesh, problem.pairs);
  out.garment_body_rest = find_pairs(rest_g0, rest_body_mesh, problem.pairs);
  out.body_points = body.posed;
  out.body_normals = vertex_normals(posed_body_mesh);
  out.rest_body_points = rest_body_mesh.vertices;
  out.rest_body_normals = vertex_normals(rest_body_mesh);
  return out;
}

EnergyTerms fit_energy_terms(const FitProblem& problem, const FitParams& params,
                             const FitCorrespondences& pairs) {
  check_fit_params(problem, params);
  EnergyTerms terms;
  energy_impl(problem, params, pairs, terms, nullptr);
  return terms;
}

double fit_energy(const FitProblem& problem, const FitParams& params,
                  const FitCorrespondences& pairs, FitParams* gradients) {
  check_fit_params(problem, params);
  EnergyTerms terms;
  return energy_impl(problem, params, pairs, terms, gradients);
}

FitResult fit_rigged(const FitProblem& problem, const FitParams& init, unsigned) {
  validate_fit_problem(problem);
  check_fit_params(problem, init);
  FitParams params = init;
  params.garment.displacement = full_displacement(init.garment, problem.tmpl.vertex_count());

  FitResult result;
  const int first = std::max(1, problem.optimizer.max_iters / 2);
  const int second = problem.optimizer.max_iters - first;

  // displacements stay frozen until the shape parameters have settled
  FreeMask shape_only;
  shape_only.displacement = false;
  bool converged = run_stage(problem, params, shape_only, first, result);
  if (second > 0) converged = run_stage(problem, params, FreeMask{}, second, result);
  result.converged = converged;
  finalize(problem, params, result);
  return result;
}

FitResult fit_posed(const FitProblem& problem, const FitResult& rigged) {
  validate_fit_problem(problem);
  check_fit_params(problem, rigged.params);
  FitParams params = rigged.params;
  params.garment.displacement =
      full_displacement(rigged.params.garment, problem.tmpl.vertex_count());

  FitResult result;
  FreeMask pose_only;
  pose_only.alpha = false;
  pose_only.displacement = false;
  pose_only.beta = false;
  run_stage(problem, params, pose_only, problem.optimizer.max_iters, result);
  const bool converged =
      run_stage(problem, params, FreeMask{}, problem.optimizer.max_iters, result);
  result.converged = converged;
  finalize(problem, params, result);
  return result;
}

void save_fit_report(const FitResult& result, const std::string& path) {
  nlohmann::json doc;
  doc["alpha"] = vector_to_json(result.params.garment.alpha);
  doc["beta"] = vector_to_json(result.params.beta);
  doc["theta"] = vector_to_json(result.params.pose.theta);
  doc["translation"] = vector_to_json(result.params.pose.translation);
  doc["displacement"] = matrix_to_json(result.params.garment.displacement);
  doc["energy"] = result.energy;
  doc["terms"] = {{"body_fit", result.breakdown.body_fit},
                  {"garment_fit", result.breakdown.garment_fit},
                  {"interpenetration", result.breakdown.interpenetration},
                  {"reg_alpha", result.breakdown.reg_alpha},
                  {"reg_beta", result.breakdown.reg_beta},
                  {"reg_disp", result.breakdown.reg_disp},
                  {"total", result.breakdown.total()}};
  doc["med_mm"] = result.med_mm;
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  save_json(doc, path, 2);
}

}  // namespace gskin
