#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gskin/body_model.h"
#include "gskin/dataset.h"
#include "gskin/error.h"
#include "gskin/garment.h"
#include "gskin/json_util.h"
#include "gskin/losses.h"
#include "gskin/mesh.h"
#include "gskin/obj_io.h"
#include "gskin/registration.h"
#include "gskin/skinnet.h"
#include "gskin/skinning_transfer.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace gskin;

Pose load_pose(const std::string& path) {
  const json doc = load_json(path);
  Pose pose;
  if (doc.contains("theta")) pose.theta = vector_from_json(doc["theta"], kThetaDim, "theta");
  if (doc.contains("translation")) {
    pose.translation = vector_from_json(doc["translation"], 3, "translation");
  }
  return pose;
}

VecX load_beta(const std::string& path) {
  const json doc = load_json(path);
  if (!doc.contains("beta")) throw ParseError(path + ": missing \"beta\"");
  return vector_from_json(doc["beta"], kShapeDim, "beta");
}

Camera load_camera(const std::string& path) {
  const json doc = load_json(path);
  Camera camera;
  if (doc.contains("fx")) camera.fx = doc["fx"].get<double>();
  if (doc.contains("fy")) camera.fy = doc["fy"].get<double>();
  if (doc.contains("cx")) camera.cx = doc["cx"].get<double>();
  if (doc.contains("cy")) camera.cy = doc["cy"].get<double>();
  validate_camera(camera);
  return camera;
}

TransferConfig load_transfer_config(const std::string& path, bool no_smooth) {
  TransferConfig config;
  if (!path.empty()) {
    const json doc = load_json(path);
    if (doc.contains("k")) config.k = doc["k"].get<int>();
    if (doc.contains("max_distance")) config.max_distance = doc["max_distance"].get<double>();
    if (doc.contains("max_normal_angle")) {
      config.max_normal_angle = doc["max_normal_angle"].get<double>();
    }
    if (doc.contains("idw_power")) config.idw_power = doc["idw_power"].get<double>();
    if (doc.contains("smooth_iterations")) {
      config.smooth_iterations = doc["smooth_iterations"].get<int>();
    }
    if (doc.contains("smooth_lambda")) config.smooth_lambda = doc["smooth_lambda"].get<double>();
  }
  if (no_smooth) config.smooth_iterations = 0;
  validate_transfer_config(config);
  return config;
}

FitParams load_fit_params(const std::string& path) {
  const json doc = load_json(path);
  for (const char* key : {"alpha", "beta", "theta", "translation", "displacement"}) {
    if (!doc.contains(key)) throw ParseError(path + ": missing \"" + key + "\"");
  }
  FitParams params;
  params.garment.alpha = vector_from_json(doc["alpha"], -1, "alpha");
  params.garment.displacement = matrix_from_json(doc["displacement"], 3, "displacement");
  params.beta = vector_from_json(doc["beta"], kShapeDim, "beta");
  params.pose.theta = vector_from_json(doc["theta"], kThetaDim, "theta");
  params.pose.translation = vector_from_json(doc["translation"], 3, "translation");
  return params;
}

json metrics_row(const WeightMetrics& metrics, size_t count) {
  return json{{"count", count},
              {"l1_mean", metrics.l1_mean},
              {"l1_std", metrics.l1_std},
              {"med_mean_mm", metrics.med_mean_mm},
              {"med_std_mm", metrics.med_std_mm}};
}

struct GenFixturesOpts {
  std::string out_dir;
  DatasetConfig config;
};

int run_gen_fixtures(const GenFixturesOpts& o) {
  fs::create_directories(o.out_dir);
  const Dataset dataset = make_dataset(o.config);
  save_dataset(dataset, o.out_dir);
  std::cerr << "wrote body model, " << dataset.templates.size() << " templates, "
            << dataset.train.size() << " train / " << dataset.test.size()
            << " test samples to " << o.out_dir << "\n";
  return 0;
}

struct WeightsOpts {
  std::string garment, body, body_weights, config, out;
  bool no_smooth = false;
};

int run_weights(const WeightsOpts& o) {
  const Mesh garment = load_obj_with_labels(o.garment);
  const BodyModel body = load_body_model(o.body);
  const SkinWeights body_weights =
      o.body_weights.empty() ? body.weights : load_weights(o.body_weights);
  const TransferConfig config = load_transfer_config(o.config, o.no_smooth);
  const SkinWeights weights = idw_transfer(garment, body.mesh, body_weights, config);
  save_weights(weights, o.out);
  std::cerr << "transferred weights for " << weights.weights.rows() << " vertices to "
            << o.out << "\n";
  return 0;
}

struct TrainOpts {
  std::string dataset, ckpt, history;
  TrainConfig config;
};

int run_train(const TrainOpts& o) {
  const DatasetSplit split = load_dataset_split(o.dataset);
  std::cerr << "training on " << split.samples.size() << " samples, "
            << o.config.epochs << " epochs\n";
  const TrainResult result = train_skinnet(weight_samples(split.samples), o.config);
  save_skinnet(result.params, o.ckpt);
  if (!o.history.empty()) save_loss_history(result.history, o.history);
  if (!result.history.empty()) {
    std::cerr << "mean KL " << result.history.front() << " -> " << result.history.back()
              << "\n";
  }
  std::cerr << "checkpoint written to " << o.ckpt << "\n";
  return 0;
}

struct EvalOpts {
  std::string dataset, ckpt, out;
  int pose_count = 20;
  unsigned pose_seed = 99;
  double pose_magnitude = 0.3;
};

int run_eval(const EvalOpts& o) {
  const DatasetSplit split = load_dataset_split(o.dataset);
  const SkinNetParams params = load_skinnet(o.ckpt);
  const std::vector<Pose> poses = sample_poses(o.pose_count, o.pose_seed, o.pose_magnitude);

  json categories = json::object();
  for (Category category : kAllCategories) {
    std::vector<WeightSample> group;
    for (const DatasetSample& sample : split.samples) {
      if (sample.category == category) group.push_back(sample.sample);
    }
    WeightMetrics metrics;
    if (!group.empty()) metrics = evaluate_skinnet(params, group, split.body, poses);
    categories[category_name(category)] = metrics_row(metrics, group.size());
  }
  const WeightMetrics overall =
      evaluate_skinnet(params, weight_samples(split.samples), split.body, poses);

  const json doc{{"overall", metrics_row(overall, split.samples.size())},
                 {"categories", categories},
                 {"pose_count", o.pose_count},
                 {"pose_seed", o.pose_seed},
                 {"pose_magnitude", o.pose_magnitude}};
  save_json(doc, o.out, 2);
  std::cerr << "overall l1 " << overall.l1_mean << ", med " << overall.med_mean_mm
            << " mm over " << o.pose_count << " poses\n";
  return 0;
}

struct ReposeOpts {
  std::string garment_template, params, weights, body, beta, pose, out_dir;
};

int run_repose(const ReposeOpts& o) {
  const GarmentTemplate tmpl = load_garment_template(o.garment_template);
  const GarmentParams params =
      o.params.empty() ? GarmentParams{} : load_garment_params(o.params);
  const SkinWeights weights = load_weights(o.weights);
  const BodyModel body = load_body_model(o.body);
  const VecX beta = o.beta.empty() ? VecX::Zero(kShapeDim).eval() : load_beta(o.beta);
  const Pose pose = o.pose.empty() ? Pose{} : load_pose(o.pose);

  const Mesh garment = garment_mesh(tmpl, params, weights, body, beta, pose);
  const Mesh posed_body = body_mesh(body, beta, pose);
  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  save_obj(garment, (dir / "garment.obj").string());
  save_obj(posed_body, (dir / "body.obj").string());
  std::cerr << "wrote garment.obj and body.obj to " << o.out_dir << "\n";
  return 0;
}

struct TransferOpts {
  std::string garment_template, source_params, target_body, target_weights;
  std::string target_beta, target_pose, config, out;
  bool no_smooth = false;
};

int run_transfer(const TransferOpts& o) {
  const GarmentTemplate tmpl = load_garment_template(o.garment_template);
  const GarmentParams params = load_garment_params(o.source_params);
  const BodyModel body = load_body_model(o.target_body);
  SkinWeights weights;
  if (!o.target_weights.empty()) {
    weights = load_weights(o.target_weights);
  } else {
    std::cerr << "no target weights supplied; transferring from the target body\n";
    const TransferConfig config = load_transfer_config(o.config, o.no_smooth);
    weights = idw_transfer(garment_rest(tmpl, params), body.mesh, body.weights, config);
  }
  const VecX beta = o.target_beta.empty() ? VecX::Zero(kShapeDim).eval() : load_beta(o.target_beta);
  const Pose pose = o.target_pose.empty() ? Pose{} : load_pose(o.target_pose);
  const Mesh garment = transfer_garment(tmpl, params, weights, body, beta, pose);
  save_obj(garment, o.out);
  std::cerr << "wrote transferred garment to " << o.out << "\n";
  return 0;
}

struct FitOpts {
  std::string target_garment, target_skin, body, garment_template, garment_weights;
  std::string mode, init, out_dir;
  unsigned seed = 0;
  OptimizerConfig optimizer;
  PairConfig pairs;
};

int run_fit(const FitOpts& o) {
  if (o.mode == "posed" && o.init.empty()) {
    std::cerr << "error: --mode posed requires --init (a rigged fit report)\n";
    return 2;
  }
  FitProblem problem;
  problem.target_garment = load_obj(o.target_garment);
  problem.target_skin = load_obj(o.target_skin);
  problem.body = load_body_model(o.body);
  problem.tmpl = load_garment_template(o.garment_template);
  if (!o.garment_weights.empty()) {
    problem.garment_weights = load_weights(o.garment_weights);
  } else {
    std::cerr << "no garment weights supplied; transferring from the body\n";
    problem.garment_weights = idw_transfer(problem.tmpl.rest_mesh, problem.body.mesh,
                                           problem.body.weights, TransferConfig{});
  }
  problem.optimizer = o.optimizer;
  problem.pairs = o.pairs;

  const FitParams init = o.init.empty() ? FitParams{} : load_fit_params(o.init);
  FitResult result;
  if (o.mode == "rigged") {
    result = fit_rigged(problem, init, o.seed);
  } else {
    FitResult rigged;
    rigged.params = init;
    result = fit_posed(problem, rigged);
  }

  fs::create_directories(o.out_dir);
  const fs::path dir(o.out_dir);
  save_fit_report(result, (dir / "report.json").string());
  const Mesh garment = garment_mesh(problem.tmpl, result.params.garment,
                                    problem.garment_weights, problem.body,
                                    result.params.beta, result.params.pose);
  const Mesh body = body_mesh(problem.body, result.params.beta, result.params.pose);
  save_obj(garment, (dir / "garment.obj").string());
  save_obj(body, (dir / "body.obj").string());
  std::cerr << o.mode << " fit: " << result.iterations << " iterations, energy "
            << result.breakdown.total() << ", residual " << result.med_mm << " mm, "
            << (result.converged ? "converged" : "NOT converged") << "\n";
  return result.converged ? 0 : 4;
}

struct LossesOpts {
  std::string pred_garment, gt_garment, pred_body, gt_body, camera;
  std::string pred_weights, gt_weights, pred_params, gt_params;
  std::string pred_beta, gt_beta, pred_pose, gt_pose, out;
};

int run_losses(const LossesOpts& o) {
  json terms = json::object();
  double total = 0;
  const auto add = [&](const char* name, double value) {
    terms[name] = value;
    total += value;
  };

  std::optional<Mesh> pred_garment, gt_garment, pred_body, gt_body;
  if (!o.pred_garment.empty()) {
    pred_garment = load_obj(o.pred_garment);
    gt_garment = load_obj(o.gt_garment);
    const GeometryLosses geometry = geometry_losses(pred_garment->vertices, gt_garment->vertices,
                                                    Points(0, 3), Points(0, 3));
    add("geometry_garment", geometry.garment);
  }
  if (!o.pred_body.empty()) {
    pred_body = load_obj(o.pred_body);
    gt_body = load_obj(o.gt_body);
    const GeometryLosses geometry =
        geometry_losses(pred_body->vertices, gt_body->vertices, Points(0, 3), Points(0, 3));
    add("geometry_body", geometry.garment);
  }
  if (!o.camera.empty()) {
    const Camera camera = load_camera(o.camera);
    if (pred_garment) {
      add("projection_garment",
          projection_loss(camera, pred_garment->vertices, gt_garment->vertices));
    }
    if (pred_body) {
      add("projection_body", projection_loss(camera, pred_body->vertices, gt_body->vertices));
    }
  }
  if (pred_garment && pred_body) {
    const std::vector<CorrespondencePair> pairs =
        find_pairs(*pred_garment, *pred_body, PairConfig{});
    add("interpenetration", interpenetration_loss(*pred_garment, *pred_body, pairs));
  }
  if (!o.pred_weights.empty()) {
    add("kl", kl_loss(load_weights(o.pred_weights), load_weights(o.gt_weights)));
  }
  if (!o.pred_params.empty()) {
    const GarmentParams pred = load_garment_params(o.pred_params);
    const GarmentParams gt = load_garment_params(o.gt_params);
    const VecX pred_beta =
        o.pred_beta.empty() ? VecX::Zero(kShapeDim).eval() : load_beta(o.pred_beta);
    const VecX gt_beta = o.gt_beta.empty() ? VecX::Zero(kShapeDim).eval() : load_beta(o.gt_beta);
    const Pose pred_pose = o.pred_pose.empty() ? Pose{} : load_pose(o.pred_pose);
    const Pose gt_pose = o.gt_pose.empty() ? Pose{} : load_pose(o.gt_pose);
    const ParamLosses params =
        param_losses(pred_beta, pred_pose, pred.alpha, gt_beta, gt_pose, gt.alpha);
    add("param_body", params.body);
    add("param_garment", params.garment);
    if (gt_garment) {
      const Index n = gt_garment->vertex_count();
      const auto full = [n](const Points& d) {
        return d.rows() == 0 ? Points::Zero(n, 3).eval() : d;
      };
      const DisplacementLosses displacement =
          displacement_losses(full(pred.displacement), full(gt.displacement), *gt_garment);
      add("displacement_l1", displacement.l1);
      add("displacement_laplacian", displacement.laplacian);
    }
  }

  const json doc{{"terms", terms}, {"total", total}};
  save_json(doc, o.out, 2);
  std::cerr << "wrote " << terms.size() << " loss terms, total " << total << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("GS_THREADS")) {
    const int threads = std::atoi(env);
    if (threads > 0) Eigen::setNbThreads(threads);
  }

  CLI::App app{"layered body and garment geometry toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  GenFixturesOpts gen;
  CLI::App* cmd = app.add_subcommand("gen-fixtures", "generate a synthetic weight dataset");
  cmd->add_option("--out-dir", gen.out_dir, "output directory")->required();
  cmd->add_option("--seed", gen.config.seed, "rng seed");
  cmd->add_option("--n-train", gen.config.n_train, "training samples");
  cmd->add_option("--n-test", gen.config.n_test, "test samples");
  cmd->add_option("--alpha-scale", gen.config.alpha_scale, "pca coordinate stddev");
  cmd->callback([&] { rc = run_gen_fixtures(gen); });

  WeightsOpts weights;
  cmd = app.add_subcommand("weights", "transfer body skinning weights onto a garment");
  cmd->add_option("--garment", weights.garment, "garment OBJ")->required();
  cmd->add_option("--body", weights.body, "body model JSON")->required();
  cmd->add_option("--body-weights", weights.body_weights,
                  "weights JSON overriding the model's");
  cmd->add_option("--config", weights.config, "transfer config JSON");
  cmd->add_flag("--no-smooth", weights.no_smooth, "skip weight smoothing");
  cmd->add_option("--out", weights.out, "output weights JSON")->required();
  cmd->callback([&] { rc = run_weights(weights); });

  TrainOpts train;
  cmd = app.add_subcommand("train-skinnet", "train the weight prediction network");
  cmd->add_option("--dataset", train.dataset, "train split manifest JSON")->required();
  cmd->add_option("--ckpt", train.ckpt, "output checkpoint JSON")->required();
  cmd->add_option("--epochs", train.config.epochs, "training epochs");
  cmd->add_option("--lr", train.config.learning_rate, "learning rate");
  cmd->add_option("--momentum", train.config.momentum, "momentum");
  cmd->add_option("--grad-clip", train.config.grad_clip, "gradient norm ceiling, 0 disables");
  cmd->add_flag("!--no-cosine", train.config.cosine_decay, "disable cosine decay");
  cmd->add_option("--feature-dim", train.config.feature_dim, "hidden width");
  cmd->add_option("--blocks", train.config.n_blocks, "attention blocks");
  cmd->add_option("--seed", train.config.seed, "init seed");
  cmd->add_option("--history", train.history, "optional loss history CSV");
  cmd->callback([&] { rc = run_train(train); });

  EvalOpts eval;
  cmd = app.add_subcommand("eval-skinnet", "evaluate a checkpoint against labels");
  cmd->add_option("--dataset", eval.dataset, "split manifest JSON")->required();
  cmd->add_option("--ckpt", eval.ckpt, "checkpoint JSON")->required();
  cmd->add_option("--out", eval.out, "output metrics JSON")->required();
  cmd->add_option("--poses", eval.pose_count, "deformation poses");
  cmd->add_option("--pose-seed", eval.pose_seed, "pose seed");
  cmd->add_option("--pose-magnitude", eval.pose_magnitude, "pose stddev, radians");
  cmd->callback([&] { rc = run_eval(eval); });

  ReposeOpts repose;
  cmd = app.add_subcommand("repose", "pose a garment and its body");
  cmd->add_option("--garment-template", repose.garment_template, "template JSON")->required();
  cmd->add_option("--params", repose.params, "garment params JSON");
  cmd->add_option("--weights", repose.weights, "garment weights JSON")->required();
  cmd->add_option("--body", repose.body, "body model JSON")->required();
  cmd->add_option("--beta", repose.beta, "body shape JSON");
  cmd->add_option("--pose", repose.pose, "pose JSON");
  cmd->add_option("--out-dir", repose.out_dir, "output directory")->required();
  cmd->callback([&] { rc = run_repose(repose); });

  TransferOpts transfer;
  cmd = app.add_subcommand("transfer", "re-dress a garment onto another body");
  cmd->add_option("--garment-template", transfer.garment_template, "template JSON")->required();
  cmd->add_option("--source-params", transfer.source_params, "source garment params JSON")
      ->required();
  cmd->add_option("--target-body", transfer.target_body, "target body model JSON")->required();
  cmd->add_option("--target-weights", transfer.target_weights,
                  "garment weights on the target body; computed when absent");
  cmd->add_option("--target-beta", transfer.target_beta, "target shape JSON");
  cmd->add_option("--target-pose", transfer.target_pose, "target pose JSON");
  cmd->add_option("--config", transfer.config, "transfer config JSON");
  cmd->add_flag("--no-smooth", transfer.no_smooth, "skip weight smoothing");
  cmd->add_option("--out", transfer.out, "output OBJ")->required();
  cmd->callback([&] { rc = run_transfer(transfer); });

  FitOpts fit;
  cmd = app.add_subcommand("fit", "register the layered model to target meshes");
  cmd->add_option("--target-garment", fit.target_garment, "garment scan OBJ")->required();
  cmd->add_option("--target-skin", fit.target_skin, "skin scan OBJ")->required();
  cmd->add_option("--body", fit.body, "body model JSON")->required();
  cmd->add_option("--garment-template", fit.garment_template, "template JSON")->required();
  cmd->add_option("--garment-weights", fit.garment_weights,
                  "garment weights JSON; computed when absent");
  cmd->add_option("--mode", fit.mode, "rigged or posed")
      ->required()
      ->check(CLI::IsMember({"rigged", "posed"}));
  cmd->add_option("--init", fit.init, "initial params from a fit report JSON");
  cmd->add_option("--out-dir", fit.out_dir, "output directory")->required();
  cmd->add_option("--seed", fit.seed, "seed");
  cmd->add_option("--max-iters", fit.optimizer.max_iters, "iterations per stage");
  cmd->add_option("--lr", fit.optimizer.learning_rate, "step size");
  cmd->add_option("--momentum", fit.optimizer.momentum, "momentum");
  cmd->add_option("--tol", fit.optimizer.convergence_tol, "relative energy tolerance");
  cmd->add_option("--window", fit.optimizer.convergence_window, "plateau window");
  cmd->add_flag("--adam", fit.optimizer.adam, "adam updates instead of line search");
  cmd->add_flag("!--no-refind", fit.optimizer.refind_pairs,
                "freeze correspondences between iterations");
  cmd->add_option("--pair-distance", fit.pairs.max_distance, "correspondence radius");
  cmd->add_option("--pair-angle", fit.pairs.max_normal_angle, "normal agreement, radians");
  cmd->callback([&] { rc = run_fit(fit); });

  LossesOpts losses;
  cmd = app.add_subcommand("losses", "evaluate loss terms on artifact pairs");
  cmd->add_option("--pred-garment", losses.pred_garment, "predicted garment OBJ")
      ->needs(cmd->add_option("--gt-garment", losses.gt_garment, "reference garment OBJ"));
  cmd->add_option("--pred-body", losses.pred_body, "predicted body OBJ")
      ->needs(cmd->add_option("--gt-body", losses.gt_body, "reference body OBJ"));
  cmd->add_option("--camera", losses.camera, "camera JSON for projection terms");
  cmd->add_option("--pred-weights", losses.pred_weights, "predicted weights JSON")
      ->needs(cmd->add_option("--gt-weights", losses.gt_weights, "reference weights JSON"));
  cmd->add_option("--pred-params", losses.pred_params, "predicted garment params JSON")
      ->needs(cmd->add_option("--gt-params", losses.gt_params, "reference garment params JSON"));
  cmd->add_option("--pred-beta", losses.pred_beta, "predicted shape JSON");
  cmd->add_option("--gt-beta", losses.gt_beta, "reference shape JSON");
  cmd->add_option("--pred-pose", losses.pred_pose, "predicted pose JSON");
  cmd->add_option("--gt-pose", losses.gt_pose, "reference pose JSON");
  cmd->add_option("--out", losses.out, "output report JSON")->required();
  cmd->callback([&] { rc = run_losses(losses); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return dynamic_cast<const CLI::Success*>(&e) != nullptr ? code : 2;
  } catch (const gskin::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gskin::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
  return rc;
}
