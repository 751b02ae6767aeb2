#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tomolab/array.hpp"
#include "tomolab/fbp.hpp"
#include "tomolab/phantom.hpp"
#include "tomolab/projectors.hpp"
#include "tomolab/solvers.hpp"

namespace tomolab {

// A dataset is either an analytic phantom sinogram (generator unset) or an
// operator-generated one, optionally Poisson-corrupted.
struct DatasetPreset {
  std::string name;
  int views = 0;
  int cells = 0;
  std::optional<double> sigma_fraction;
  uint64_t seed = 7;
  std::optional<ProjectorKind> generator;
};

// sl-full | sl-under | sl-noise | sl-uconstr | fig4a | fig4b | fig4c.
// `size` rescales the geometry (views scale with cells) for fast CI runs.
DatasetPreset preset_by_name(std::string_view name, int size = 256);
Sinogram generate_dataset(const DatasetPreset& p);

// Frozen per-preset hyperparameters (configs/solvers.cfg logs the grid
// search behind the numbers).
SolverConfig default_config(Algorithm algo, const DatasetPreset& p);

// FORWARD scores the standalone forward projector against the analytic
// sinogram; FBP and SOLVER reconstruct and score against the phantom
// rasterization inside the circle.
enum class CellMode { FORWARD, FBP, SOLVER };

struct ExperimentSpec {
  DatasetPreset dataset;
  CellMode mode = CellMode::SOLVER;
  ProjectorKind forward_kind = ProjectorKind::PD;
  ProjectorKind adjoint_kind = ProjectorKind::PD;
  FilterKind filter = FilterKind::RAMP;
  SolverConfig config;
  std::string label;
};

struct CellResult {
  ExperimentSpec spec;
  double psnr = 0.0;
  double final_cost = 0.0;
  bool diverged = false;
  bool errored = false;
  std::string error;
  int iters = 0;
  ImageGrid image;
  ConvergenceTrace trace;  // empty unless mode == SOLVER
};

struct MatrixResult {
  std::vector<CellResult> cells;
  bool any_error() const;
};

// Runs every spec (worker pool of `threads`); cells are independent and
// deterministic, and results keep spec order. Divergence and per-cell
// exceptions are recorded in the owning cell, never abort the sweep.
MatrixResult run_matrix(const std::vector<ExperimentSpec>& specs, int threads = 1);

// dataset,fwd,adj,algo,filter,psnr,final_cost,diverged,iters; byte-stable
// across reruns with identical specs. Doubles are printed with 17
// significant digits so stored PSNR values round-trip exactly.
std::string results_csv(const MatrixResult& r);

// Gnuplot-ready per-iteration table: iter,cost,psnr,diverged (the diverged
// flag is raised on the final row of a diverged run). Rows = iterations.
std::string trace_csv(const ConvergenceTrace& t);

// results.csv + per-cell raw/PGM images, per-cell convergence CSVs and a
// matched-vs-mismatched rank summary with the closing
// "coupling dominance: k/n" line. `artifacts = false` limits output to
// results.csv + summary.txt (used when re-deriving reports from a stored
// results table that carries no images).
void emit_report(const MatrixResult& r, const std::filesystem::path& out_dir,
                 bool artifacts = true);

// Named experiment sets: forward-accuracy, fbp-gen-dd, fbp-gen-kb, fbp-gen-pd,
// fig4a, fig4b, fig4c, admm-full-dd, admm-full-rd, admm-under-pd,
// pwls-noise-ss, mlem-under-pd, ci.
std::vector<ExperimentSpec> named_specs(std::string_view set, int size = 256);

uint64_t spec_hash(const ExperimentSpec& s);

}  // namespace tomolab
