#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tomolab/array.hpp"
#include "tomolab/coupling.hpp"
#include "tomolab/experiments.hpp"
#include "tomolab/fbp.hpp"
#include "tomolab/io.hpp"
#include "tomolab/metrics.hpp"
#include "tomolab/phantom.hpp"
#include "tomolab/projectors.hpp"
#include "tomolab/rng.hpp"
#include "tomolab/solvers.hpp"

namespace fs = std::filesystem;
using namespace tomolab;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void save_image_any(const ImageGrid& img, const std::string& path) {
  if (ends_with(path, ".pgm"))
    save_pgm16(img, path);
  else
    save_image_raw(img, path);
}

void save_sinogram_any(const Sinogram& s, const std::string& path) {
  if (ends_with(path, ".pgm"))
    save_pgm16(s, path);
  else
    save_sinogram_raw(s, path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Rebuilds the spec skeleton emit_report needs for ranking; geometry and
// solver settings are not stored in the CSV and stay defaulted.
MatrixResult parse_results_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file " + file.string());
  MatrixResult r;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("malformed results row: " + line);
    CellResult c;
    c.spec.dataset.name = f[0];
    if (f[3] == "forward") {
      c.spec.mode = CellMode::FORWARD;
      c.spec.forward_kind = kind_from_token(f[1]);
    } else if (f[3] == "fbp") {
      c.spec.mode = CellMode::FBP;
      if (f[1] != "analytic") c.spec.dataset.generator = kind_from_token(f[1]);
      c.spec.adjoint_kind = kind_from_token(f[2]);
      c.spec.filter = filter_from_token(f[4]);
    } else {
      c.spec.mode = CellMode::SOLVER;
      c.spec.config.algorithm = algorithm_from_token(f[3]);
      c.spec.forward_kind = kind_from_token(f[1]);
      c.spec.adjoint_kind = kind_from_token(f[2]);
    }
    c.psnr = std::stod(f[5]);
    if (!f[6].empty()) c.final_cost = std::stod(f[6]);
    c.diverged = f[7] == "1";
    c.iters = std::stoi(f[8]);
    r.cells.push_back(std::move(c));
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel-beam tomography laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  uint64_t seed = 7;
  int threads = 1;
  std::string out_dir = "out";
  auto* seed_opt = app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--threads", threads, "worker pool size");
  app.add_option("--out-dir", out_dir, "matrix/report output directory");

  int rc = 0;

  // phantom dump | phantom sinogram
  auto* ph = app.add_subcommand("phantom", "Shepp-Logan rasterization and analytic sinogram");
  ph->require_subcommand(1);
  {
    auto* dump = ph->add_subcommand("dump", "rasterize the phantom");
    auto size = std::make_shared<int>(256);
    auto out = std::make_shared<std::string>();
    dump->add_option("--size", *size, "image side length");
    dump->add_option("--out", *out, "output path (.raw or .pgm)")->required();
    dump->callback([=] { save_image_any(rasterize(shepp_logan(), *size), *out); });

    auto* sino = ph->add_subcommand("sinogram", "analytic line integrals");
    auto views = std::make_shared<int>(402);
    auto cells = std::make_shared<int>(256);
    auto scale = std::make_shared<double>(0.0);
    auto sout = std::make_shared<std::string>();
    sino->add_option("--views", *views, "projection angles");
    sino->add_option("--cells", *cells, "detector cells");
    auto* scale_opt = sino->add_option("--scale", *scale, "phantom radius in detector units");
    sino->add_option("--out", *sout, "output path (.raw or .pgm)")->required();
    sino->callback([=] {
      const Geometry g{*views, *cells};
      const Sinogram s = scale_opt->count() ? analytic_sinogram(shepp_logan(), g, *scale)
                                            : analytic_sinogram(shepp_logan(), g);
      save_sinogram_any(s, *sout);
    });
  }

  // sinogram: operator-generated data
  {
    auto* gen = app.add_subcommand("sinogram", "forward-project the rasterized phantom");
    auto kind = std::make_shared<std::string>("pd");
    auto views = std::make_shared<int>(402);
    auto cells = std::make_shared<int>(256);
    auto sigma = std::make_shared<double>(0.0);
    auto out = std::make_shared<std::string>();
    gen->add_option("--kind", *kind, "projector token pd|rd|dd|ss|wf|kb");
    gen->add_option("--views", *views, "projection angles");
    gen->add_option("--cells", *cells, "detector cells");
    auto* sig_opt = gen->add_option("--sigma", *sigma, "Poisson noise fraction of the mean");
    gen->add_option("--out", *out, "output path (.raw or .pgm)")->required();
    gen->callback([=, &seed] {
      const Geometry g{*views, *cells};
      ProjectorPair pair(kind_from_token(*kind), g);
      Sinogram s = pair.forward(rasterize(shepp_logan(), *cells));
      if (sig_opt->count()) {
        SeededRng rng(seed);
        s = add_poisson_noise(s, *sigma, rng);
      }
      save_sinogram_any(s, *out);
    });
  }

  // noise
  {
    auto* nz = app.add_subcommand("noise", "apply scaled Poisson noise to a sinogram");
    auto input = std::make_shared<std::string>();
    auto sigma = std::make_shared<double>(0.03);
    auto out = std::make_shared<std::string>();
    nz->add_option("--input", *input, "sinogram .raw")->required();
    nz->add_option("--sigma", *sigma, "noise std as fraction of the mean")->required();
    nz->add_option("--out", *out, "output path")->required();
    nz->callback([=, &seed] {
      SeededRng rng(seed);
      save_sinogram_any(add_poisson_noise(load_sinogram_raw(*input), *sigma, rng), *out);
    });
  }

  // audit
  {
    auto* au = app.add_subcommand("audit", "inner-product coupling audit over all 36 pairings");
    auto size = std::make_shared<int>(256);
    auto views = std::make_shared<int>(402);
    auto nseeds = std::make_shared<int>(3);
    auto out = std::make_shared<std::string>();
    au->add_option("--size", *size, "image side = detector cells");
    au->add_option("--views", *views, "projection angles");
    au->add_option("--seeds", *nseeds, "probe count per pairing");
    au->add_option("--out", *out, "CSV path (default: stdout)");
    au->callback([=, &seed] {
      std::vector<uint64_t> seeds;
      for (int i = 0; i < *nseeds; ++i) seeds.push_back(seed + static_cast<uint64_t>(i));
      const std::string csv = coupling_csv(coupling_matrix(Geometry{*views, *size}, seeds));
      if (out->empty())
        std::cout << csv;
      else
        write_text_file(*out, csv);
    });
  }

  // fbp
  {
    auto* fb = app.add_subcommand("fbp", "filtered backprojection of a stored sinogram");
    auto input = std::make_shared<std::string>();
    auto adj = std::make_shared<std::string>("pd");
    auto filter = std::make_shared<std::string>("ramp");
    auto out = std::make_shared<std::string>();
    fb->add_option("--input", *input, "sinogram .raw")->required();
    fb->add_option("--adjoint", *adj, "backprojector token");
    fb->add_option("--filter", *filter, "ramp|shlo|hann|parz");
    fb->add_option("--out", *out, "output image (.raw or .pgm)")->required();
    fb->callback([=] {
      const Sinogram s = load_sinogram_raw(*input);
      save_image_any(fbp_reconstruct(s, kind_from_token(*adj), filter_from_token(*filter)), *out);
    });
  }

  // recon
  {
    auto* rc_cmd = app.add_subcommand("recon", "iterative reconstruction of a preset or stored sinogram");
    auto algo = std::make_shared<std::string>("admm");
    auto fwd = std::make_shared<std::string>("pd");
    auto adj = std::make_shared<std::string>();
    auto data = std::make_shared<std::string>("sl-full");
    auto input = std::make_shared<std::string>();
    auto size = std::make_shared<int>(256);
    auto iters = std::make_shared<int>(0);
    auto lambda = std::make_shared<double>(0.0);
    auto rho = std::make_shared<double>(0.0);
    auto beta = std::make_shared<double>(0.0);
    auto delta = std::make_shared<double>(0.0);
    auto cg = std::make_shared<int>(0);
    auto no_constraints = std::make_shared<bool>(false);
    auto trace_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto ablation = std::make_shared<std::string>();
    auto unc_adj = std::make_shared<std::string>("rd");
    rc_cmd->add_option("--algo", *algo, "admm|pwls|mlem|sirt");
    rc_cmd->add_option("--fwd", *fwd, "forward projector token");
    rc_cmd->add_option("--adj", *adj, "backprojector token (default: matched)");
    rc_cmd->add_option("--data", *data, "dataset preset name");
    rc_cmd->add_option("--input", *input, "stored sinogram .raw instead of a preset");
    rc_cmd->add_option("--size", *size, "preset scale");
    auto* o_iters = rc_cmd->add_option("--iters", *iters, "iteration count");
    auto* o_lambda = rc_cmd->add_option("--lambda", *lambda, "TV weight (ADMM)");
    auto* o_rho = rc_cmd->add_option("--rho", *rho, "ADMM penalty");
    auto* o_beta = rc_cmd->add_option("--beta", *beta, "Huber weight (PWLS)");
    auto* o_delta = rc_cmd->add_option("--delta", *delta, "Huber delta (PWLS)");
    auto* o_cg = rc_cmd->add_option("--cg", *cg, "inner CG iterations (ADMM)");
    rc_cmd->add_flag("--no-constraints", *no_constraints, "disable the feasibility projection");
    rc_cmd->add_option("--trace", *trace_path, "per-iteration CSV path");
    rc_cmd->add_option("--out", *out, "output image (.raw or .pgm)");
    rc_cmd->add_option("--ablation", *ablation, "case1|case2|case3 ADMM study");
    rc_cmd->add_option("--uncoupled-adj", *unc_adj, "mismatched backprojector for case3");
    rc_cmd->callback([=, &seed] {
      DatasetPreset p;
      Sinogram s;
      if (!input->empty()) {
        s = load_sinogram_raw(*input);
        p.name = fs::path(*input).stem().string();
        p.views = s.geom().views;
        p.cells = s.geom().cells;
      } else {
        p = preset_by_name(*data, *size);
        if (seed_opt->count()) p.seed = seed;
        s = generate_dataset(p);
      }
      const ImageGrid ref = rasterize(shepp_logan(), s.geom().cells);
      std::cout.precision(10);
      if (!ablation->empty()) {
        AblationMode mode;
        if (*ablation == "case1")
          mode = AblationMode::CoupledFull;
        else if (*ablation == "case2")
          mode = AblationMode::CoupledOnly;
        else if (*ablation == "case3")
          mode = AblationMode::UncoupledFull;
        else
          throw std::invalid_argument("unknown ablation case: " + *ablation);
        std::cout << *ablation << " psnr=" << ablation_admm(s, mode, ref, kind_from_token(*unc_adj))
                  << '\n';
        return;
      }
      SolverConfig cfg = default_config(algorithm_from_token(*algo), p);
      if (o_iters->count()) cfg.iterations = *iters;
      if (o_lambda->count()) cfg.tv_weight = *lambda;
      if (o_rho->count()) cfg.admm_penalty = *rho;
      if (o_beta->count()) cfg.huber_weight = *beta;
      if (o_delta->count()) cfg.huber_delta = *delta;
      if (o_cg->count()) cfg.inner_cg_iters = *cg;
      if (*no_constraints) cfg.constraints_enabled = false;
      Sinogram w;
      const Sinogram* wp = nullptr;
      if (cfg.algorithm == Algorithm::PWLS && p.sigma_fraction) {
        w = poisson_weights(s, *p.sigma_fraction);
        wp = &w;
      }
      const ProjectorKind fk = kind_from_token(*fwd);
      const ProjectorKind ak = adj->empty() ? fk : kind_from_token(*adj);
      const SolveResult res = run_solver(s, fk, ak, cfg, wp, &ref);
      const ImageGrid mask = reconstruction_circle_mask(s.geom().cells);
      if (!trace_path->empty()) write_text_file(*trace_path, trace_csv(res.trace));
      if (!out->empty()) save_image_any(res.image, *out);
      std::cout << "psnr=" << psnr(res.image, ref, &mask)
                << " final_cost=" << (res.trace.cost.empty() ? 0.0 : res.trace.cost.back())
                << " diverged=" << (res.trace.diverged ? 1 : 0)
                << " iters=" << res.trace.cost.size() << '\n';
    });
  }

  // matrix
  {
    auto* mx = app.add_subcommand("matrix", "run named experiment sets and emit a report");
    auto sets = std::make_shared<std::vector<std::string>>();
    auto size = std::make_shared<int>(256);
    mx->add_option("--set", *sets,
                   "forward-accuracy|fbp-gen-{dd,kb,pd}|fig4{a,b,c}|admm-full-{dd,rd}|"
                   "admm-under-pd|pwls-noise-ss|mlem-under-pd|ci")
        ->required();
    mx->add_option("--size", *size, "experiment scale (128 for fast CI)");
    mx->callback([=, &rc, &seed, &threads, &out_dir] {
      std::vector<ExperimentSpec> specs;
      for (const std::string& s : *sets) {
        auto part = named_specs(s, *size);
        specs.insert(specs.end(), part.begin(), part.end());
      }
      if (seed_opt->count())
        for (ExperimentSpec& sp : specs) sp.dataset.seed = seed;
      const MatrixResult res = run_matrix(specs, threads);
      emit_report(res, out_dir);
      int diverged = 0, errored = 0;
      for (const CellResult& c : res.cells) {
        diverged += c.diverged ? 1 : 0;
        errored += c.errored ? 1 : 0;
        if (c.errored) std::cerr << "cell error: " << c.error << '\n';
      }
      std::cout << res.cells.size() << " cells, " << diverged << " diverged, " << errored
                << " errored -> " << out_dir << '\n';
      if (res.any_error()) rc = 1;
    });
  }

  // report
  {
    auto* rp = app.add_subcommand("report", "rebuild summary from a stored results.csv");
    auto dir = std::make_shared<std::string>();
    rp->add_option("--dir", *dir, "directory holding results.csv (default: --out-dir)");
    rp->callback([=, &out_dir] {
      const fs::path d = dir->empty() ? fs::path(out_dir) : fs::path(*dir);
      emit_report(parse_results_csv(d / "results.csv"), d, false);
      for (const auto& e : fs::directory_iterator(d)) {
        const std::string name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("cell_", 0) == 0 && ends_with(name, ".raw"))
          save_pgm16(load_image_raw(e.path()), fs::path(e.path()).replace_extension(".pgm"));
      }
      std::cout << "report refreshed in " << d.string() << '\n';
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
