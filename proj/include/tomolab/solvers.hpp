#pragma once

#include <optional>
#include <string_view>

#include "tomolab/array.hpp"
#include "tomolab/projectors.hpp"

namespace tomolab {

enum class Algorithm { ADMM, PWLS, MLEM, SIRT };

const char* to_token(Algorithm a);
Algorithm algorithm_from_token(std::string_view token);

struct SolverConfig {
  Algorithm algorithm = Algorithm::ADMM;
  int iterations = 100;
  double tv_weight = 0.0;       // lambda (ADMM)
  double admm_penalty = 1.0;    // rho
  double huber_weight = 0.0;    // beta (PWLS)
  double huber_delta = 1e-3;    // delta (PWLS)
  int inner_cg_iters = 4;       // ADMM f-subproblem
  bool constraints_enabled = true;
  double epsilon = 1e-12;       // division floor
};

struct ConvergenceTrace {
  std::vector<double> cost;  // one entry per iteration
  std::vector<double> psnr;  // vs reference if given, else NaN
  bool diverged = false;
};

struct SolveResult {
  ImageGrid image;
  ConvergenceTrace trace;
};

// Nonnegativity + reconstruction circle support.
ImageGrid apply_constraints(const ImageGrid& img);

// Anisotropic forward differences with zero boundary (the edge difference
// is -f): two channels dx, dy, each image-shaped. div_adjoint is the exact
// transpose of grad.
void grad(const ImageGrid& f, ImageGrid& dx, ImageGrid& dy);
ImageGrid grad_adjoint(const ImageGrid& dx, const ImageGrid& dy);

// All solvers share: arbitrary forward/adjoint pairing, per-iteration cost
// (always evaluated with the forward kind) and optional PSNR tracing,
// divergence flagged when the cost is non-finite or exceeds 1e6 x the
// starting cost (the run stops there; the last finite iterate is returned).
SolveResult admm_tv(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                    const SolverConfig& cfg, const ImageGrid* ref = nullptr);
SolveResult pwls_huber(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                       const SolverConfig& cfg, const Sinogram* weights = nullptr,
                       const ImageGrid* ref = nullptr);
SolveResult mlem(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                 const SolverConfig& cfg, const ImageGrid* ref = nullptr,
                 const ImageGrid* init = nullptr);
SolveResult sirt(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                 const SolverConfig& cfg, const ImageGrid* ref = nullptr);

SolveResult run_solver(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                       const SolverConfig& cfg, const Sinogram* weights = nullptr,
                       const ImageGrid* ref = nullptr);

// Plug-in Poisson variance weights for PWLS on noisy data: 1/var with
// var = sigma_fraction^2 * mean(s) * max(s, 0.01 * mean(s)). The 1% floor
// keeps zero-count cells from dominating the objective.
Sinogram poisson_weights(const Sinogram& s, double sigma_fraction);

enum class AblationMode {
  CoupledFull,      // matched operators + constraints + tuned iterations
  CoupledOnly,      // matched operators, constraints off, fixed iterations
  UncoupledFull,    // mismatched adjoint + constraints + tuned iterations
};

// Three-way ADMM study on the underconstrained noisy dataset; returns the
// PSNR vs `ref` for the requested mode. `uncoupled_adj` selects the
// mismatched backprojector for UncoupledFull.
double ablation_admm(const Sinogram& s, AblationMode mode, const ImageGrid& ref,
                     ProjectorKind uncoupled_adj = ProjectorKind::RD);

}  // namespace tomolab
