#pragma once

#include <string>
#include <vector>

#include "gskin/body_model.h"
#include "gskin/garment.h"
#include "gskin/losses.h"
#include "gskin/mesh.h"
#include "gskin/skin_weights.h"
#include "gskin/types.h"

namespace gskin {

struct FitWeights {
  double point_to_plane = 1.0;
  double interpenetration = 10.0;
  double reg_alpha = 1e-6;
  double reg_beta = 1e-6;
  double reg_disp = 1e-2;
};

struct OptimizerConfig {
  int max_iters = 150;
  double learning_rate = 0.5;
  double momentum = 0.8;
  int max_backtracks = 30;
  double convergence_tol = 1e-6;  // relative energy change
  int convergence_window = 5;     // consecutive small changes before stopping
  bool adam = false;              // plain Adam steps instead of line search
  bool refind_pairs = true;       // re-match correspondences every iteration
};

// One garment plus the body it dresses, fitted against a pre-segmented scan.
struct FitProblem {
  Mesh target_garment;
  Mesh target_skin;
  BodyModel body;
  GarmentTemplate tmpl;
  SkinWeights garment_weights;
  FitWeights weights;
  PairConfig pairs;
  OptimizerConfig optimizer;
};

void validate_fit_problem(const FitProblem& problem);

struct FitParams {
  GarmentParams garment;
  VecX beta = VecX::Zero(kShapeDim);
  Pose pose;
};

// Weighted contributions; total is their sum.
struct EnergyTerms {
  double body_fit = 0;
  double garment_fit = 0;
  double interpenetration = 0;
  double reg_alpha = 0;
  double reg_beta = 0;
  double reg_disp = 0;
  double total() const {
    return body_fit + garment_fit + interpenetration + reg_alpha + reg_beta + reg_disp;
  }
};

struct FitResult {
  FitParams params;
  std::vector<double> energy;  // accepted energy per iteration
  EnergyTerms breakdown;       // at the final parameters and correspondences
  double med_mm = 0;
  bool converged = false;
  int iterations = 0;
};

// Mean over pairs of squared point-to-plane distance (n_q . (p - q))^2 using
// the target's vertex normals. Zero without pairs.
double point_to_plane(const Mesh& source, const Mesh& target,
                      const std::vector<CorrespondencePair>& pairs);

// d/dsource with the target and pairs held fixed.
Points point_to_plane_gradients(const Mesh& source, const Mesh& target,
                                const std::vector<CorrespondencePair>& pairs);

// Correspondences and back-planes one descent iteration optimizes against.
// The interpenetration planes are snapshots: their gradient pushes only the
// garment, which keeps the per-iteration energy consistent with its gradient.
struct FitCorrespondences {
  std::vector<CorrespondencePair> body_skin;        // posed body -> target skin
  std::vector<CorrespondencePair> garment_target;   // posed garment -> target
  std::vector<CorrespondencePair> garment_body;     // posed garment -> posed body
  std::vector<CorrespondencePair> garment_body_rest;
  Points body_points, body_normals;            // frozen posed body planes
  Points rest_body_points, rest_body_normals;  // frozen rest body planes
};

FitCorrespondences find_correspondences(const FitProblem& problem,
                                        const FitParams& params);

// Per-term weighted energies at fixed correspondences.
EnergyTerms fit_energy_terms(const FitProblem& problem, const FitParams& params,
                             const FitCorrespondences& pairs);

// Total energy; when `gradients` is given it receives d(total)/d(params)
// (same shapes as params) with the correspondences held fixed.
double fit_energy(const FitProblem& problem, const FitParams& params,
                  const FitCorrespondences& pairs, FitParams* gradients = nullptr);

// Registration against a rest-posed scan: alpha, beta, theta, t first, the
// displacement field released for the second half of the iterations.
FitResult fit_rigged(const FitProblem& problem, const FitParams& init,
                     unsigned seed = 0);

// Registration against a posed scan from a rigged solution: pose and
// translation first, then everything.
FitResult fit_posed(const FitProblem& problem, const FitResult& rigged);

void save_fit_report(const FitResult& result, const std::string& path);

}  // namespace gskin
