#include "tomolab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tomolab/io.hpp"
#include "tomolab/metrics.hpp"
#include "tomolab/rng.hpp"

namespace tomolab {

namespace {

int scaled_views(int views_at_256, int size) {
  int v = static_cast<int>(std::lround(views_at_256 * static_cast<double>(size) / 256.0));
  return std::max(v, 2);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string dataset_key(const DatasetPreset& p) {
  std::ostringstream k;
  k << p.name << '|' << p.views << 'x' << p.cells << '|' << p.seed << '|'
    << (p.sigma_fraction ? *p.sigma_fraction : -1.0) << '|'
    << (p.generator ? to_token(*p.generator) : "analytic");
  return k.str();
}

std::string fwd_column(const ExperimentSpec& s) {
  if (s.mode == CellMode::FBP)
    return s.dataset.generator ? to_token(*s.dataset.generator) : "analytic";
  return to_token(s.forward_kind);
}

void format_double(std::ostringstream& os, double v) {
  os.precision(17);
  os << v;
}

}  // namespace

DatasetPreset preset_by_name(std::string_view name, int size) {
  const std::string n = lower(name);
  DatasetPreset p;
  p.name = n;
  p.cells = size;
  if (n == "sl-full") {
    p.views = scaled_views(402, size);
  } else if (n == "sl-under") {
    p.views = scaled_views(50, size);
  } else if (n == "sl-noise") {
    p.views = scaled_views(402, size);
    p.sigma_fraction = 0.03;
  } else if (n == "sl-uconstr") {
    p.views = scaled_views(75, size);
    p.sigma_fraction = 0.03;
  } else if (n == "fig4a") {
    p.views = scaled_views(100, size);
    p.generator = ProjectorKind::DD;
  } else if (n == "fig4b") {
    p.views = scaled_views(402, size);
    p.sigma_fraction = 0.02;
    p.generator = ProjectorKind::KB;
  } else if (n == "fig4c") {
    p.views = scaled_views(100, size);
    p.sigma_fraction = 0.02;
    p.generator = ProjectorKind::PD;
  } else {
    throw std::invalid_argument("unknown dataset preset: " + std::string(name));
  }
  return p;
}

Sinogram generate_dataset(const DatasetPreset& p) {
  if (p.views < 2 || p.cells < 8) throw std::invalid_argument("degenerate preset geometry");
  const Geometry g{p.views, p.cells};
  Sinogram s;
  if (p.generator) {
    ProjectorPair pair(*p.generator, g);
    s = pair.forward(rasterize(shepp_logan(), p.cells));
  } else {
    s = analytic_sinogram(shepp_logan(), g);
  }
  if (p.sigma_fraction) {
    SeededRng rng(p.seed);
    s = add_poisson_noise(s, *p.sigma_fraction, rng);
  }
  return s;
}

SolverConfig default_config(Algorithm algo, const DatasetPreset& p) {
  SolverConfig c;
  c.algorithm = algo;
  c.iterations = 100;
  const std::string& n = p.name;
  switch (algo) {
    case Algorithm::ADMM:
      c.inner_cg_iters = 4;
      if (n == "sl-under") {
        c.tv_weight = 60.0;
        c.admm_penalty = 600.0;
      } else if (n == "sl-noise") {
        c.tv_weight = 250.0;
        c.admm_penalty = 2500.0;
      } else if (n == "sl-uconstr") {
        c.tv_weight = 3.8;
        c.admm_penalty = 38.0;
      } else {
        c.tv_weight = 20.0;
        c.admm_penalty = 400.0;
      }
      break;
    case Algorithm::PWLS:
      c.huber_delta = 0.01;
      if (n == "sl-under") {
        c.huber_weight = 3000.0;
      } else if (n == "sl-noise") {
        c.huber_weight = 30.0;
      } else if (n == "sl-uconstr") {
        c.huber_weight = 30.0;
      } else {
        c.huber_weight = 500.0;
      }
      break;
    case Algorithm::MLEM:
    case Algorithm::SIRT:
      break;
  }
  return c;
}

bool MatrixResult::any_error() const {
  for (const CellResult& c : cells)
    if (c.errored) return true;
  return false;
}

MatrixResult run_matrix(const std::vector<ExperimentSpec>& specs, int threads) {
  MatrixResult out;
  out.cells.resize(specs.size());
  if (specs.empty()) return out;

  // Datasets and references are shared read-only across the pool; build
  // them up front so workers never mutate shared state.
  std::map<std::string, Sinogram> data;
  std::map<int, ImageGrid> refs;
  std::map<int, ImageGrid> masks;
  for (const ExperimentSpec& sp : specs) {
    const std::string key = dataset_key(sp.dataset);
    if (!data.count(key)) data.emplace(key, generate_dataset(sp.dataset));
    if (!refs.count(sp.dataset.cells)) {
      refs.emplace(sp.dataset.cells, rasterize(shepp_logan(), sp.dataset.cells));
      masks.emplace(sp.dataset.cells, reconstruction_circle_mask(sp.dataset.cells));
    }
  }

  auto run_cell = [&](size_t i) {
    const ExperimentSpec& sp = specs[i];
    CellResult& c = out.cells[i];
    c.spec = sp;
    try {
      const Sinogram& s = data.at(dataset_key(sp.dataset));
      const ImageGrid& ref = refs.at(sp.dataset.cells);
      const ImageGrid& mask = masks.at(sp.dataset.cells);
      switch (sp.mode) {
        case CellMode::FORWARD: {
          ProjectorPair pair(sp.forward_kind, s.geom());
          c.psnr = psnr(pair.forward(ref), s);
          break;
        }
        case CellMode::FBP: {
          c.image = fbp_reconstruct(s, sp.adjoint_kind, sp.filter);
          c.psnr = psnr(c.image, ref, &mask);
          break;
        }
        case CellMode::SOLVER: {
          Sinogram w;
          const Sinogram* wp = nullptr;
          if (sp.config.algorithm == Algorithm::PWLS && sp.dataset.sigma_fraction) {
            w = poisson_weights(s, *sp.dataset.sigma_fraction);
            wp = &w;
          }
          SolveResult r = run_solver(s, sp.forward_kind, sp.adjoint_kind, sp.config, wp, &ref);
          c.image = std::move(r.image);
          c.trace = std::move(r.trace);
          c.diverged = c.trace.diverged;
          c.iters = static_cast<int>(c.trace.cost.size());
          c.final_cost = c.trace.cost.empty() ? std::nan("") : c.trace.cost.back();
          c.psnr = psnr(c.image, ref, &mask);
          break;
        }
      }
    } catch (const std::exception& e) {
      c.errored = true;
      c.error = e.what();
    }
  };

  const int nw = std::clamp<int>(threads, 1, static_cast<int>(specs.size()));
  if (nw == 1) {
    for (size_t i = 0; i < specs.size(); ++i) run_cell(i);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= specs.size()) return;
        run_cell(i);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nw - 1; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
  }
  return out;
}

std::string results_csv(const MatrixResult& r) {
  std::ostringstream os;
  os << "dataset,fwd,adj,algo,filter,psnr,final_cost,diverged,iters\n";
  for (const CellResult& c : r.cells) {
    const ExperimentSpec& sp = c.spec;
    os << sp.dataset.name << ',' << fwd_column(sp) << ',';
    if (sp.mode != CellMode::FORWARD) os << to_token(sp.adjoint_kind);
    os << ',';
    switch (sp.mode) {
      case CellMode::FORWARD:
        os << "forward";
        break;
      case CellMode::FBP:
        os << "fbp";
        break;
      case CellMode::SOLVER:
        os << to_token(sp.config.algorithm);
        break;
    }
    os << ',';
    if (sp.mode == CellMode::FBP) os << to_token(sp.filter);
    os << ',';
    format_double(os, c.psnr);
    os << ',';
    if (sp.mode == CellMode::SOLVER) format_double(os, c.final_cost);
    os << ',' << (c.diverged ? 1 : 0) << ',' << c.iters << '\n';
  }
  return os.str();
}

uint64_t spec_hash(const ExperimentSpec& s) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  auto fold = [&h](uint64_t v) { h = SeededRng::mix(h ^ v); };
  auto fold_str = [&](std::string_view sv) {
    fold(sv.size());
    for (char ch : sv) fold(static_cast<uint64_t>(static_cast<unsigned char>(ch)));
  };
  auto fold_double = [&](double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    fold(bits);
  };
  fold_str(s.dataset.name);
  fold(static_cast<uint64_t>(s.dataset.views));
  fold(static_cast<uint64_t>(s.dataset.cells));
  fold(s.dataset.seed);
  fold_double(s.dataset.sigma_fraction ? *s.dataset.sigma_fraction : -1.0);
  fold_str(s.dataset.generator ? to_token(*s.dataset.generator) : "analytic");
  fold(static_cast<uint64_t>(s.mode));
  fold_str(to_token(s.forward_kind));
  fold_str(to_token(s.adjoint_kind));
  fold_str(to_token(s.filter));
  fold_str(to_token(s.config.algorithm));
  fold(static_cast<uint64_t>(s.config.iterations));
  fold_double(s.config.tv_weight);
  fold_double(s.config.admm_penalty);
  fold_double(s.config.huber_weight);
  fold_double(s.config.huber_delta);
  fold(static_cast<uint64_t>(s.config.inner_cg_iters));
  fold(s.config.constraints_enabled ? 1 : 0);
  return h;
}

namespace {

std::string cell_basename(const ExperimentSpec& s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cell_%016llx",
                static_cast<unsigned long long>(spec_hash(s)));
  return buf;
}

std::string group_key(const ExperimentSpec& s) {
  std::ostringstream k;
  k << s.dataset.name << ' ';
  if (s.mode == CellMode::FBP)
    k << "fbp-" << to_token(s.filter) << " gen=" << fwd_column(s);
  else
    k << to_token(s.config.algorithm) << " fwd=" << fwd_column(s);
  return k.str();
}

bool is_matched(const ExperimentSpec& s) {
  if (s.mode == CellMode::FBP)
    return s.dataset.generator && s.adjoint_kind == *s.dataset.generator;
  return s.adjoint_kind == s.forward_kind;
}

}  // namespace

std::string trace_csv(const ConvergenceTrace& t) {
  std::ostringstream os;
  os << "iter,cost,psnr,diverged\n";
  for (size_t i = 0; i < t.cost.size(); ++i) {
    os << i << ',';
    format_double(os, t.cost[i]);
    os << ',';
    format_double(os, t.psnr[i]);
    const bool last = i + 1 == t.cost.size();
    os << ',' << (t.diverged && last ? 1 : 0) << '\n';
  }
  return os.str();
}

void emit_report(const MatrixResult& r, const std::filesystem::path& out_dir, bool artifacts) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  write_text_file(out_dir / "results.csv", results_csv(r));

  for (const CellResult& c : r.cells) {
    if (!artifacts) break;
    if (c.errored || c.spec.mode == CellMode::FORWARD) continue;
    const std::string base = cell_basename(c.spec);
    save_image_raw(c.image, out_dir / (base + ".raw"));
    save_pgm16(c.image, out_dir / (base + ".pgm"));
    if (c.spec.mode == CellMode::SOLVER)
      write_text_file(out_dir / (base + "_trace.csv"), trace_csv(c.trace));
  }

  // Matched-vs-mismatched ranking per (dataset, algorithm-or-filter,
  // generating/forward kind) group, preserving first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const CellResult*>> groups;
  std::ostringstream sum;
  for (const CellResult& c : r.cells) {
    if (c.spec.mode == CellMode::FORWARD) {
      sum << "forward accuracy: " << c.spec.dataset.name << ' '
          << to_token(c.spec.forward_kind) << " psnr=";
      format_double(sum, c.psnr);
      sum << (c.errored ? "  ERROR: " + c.error : "") << '\n';
      continue;
    }
    const std::string key = group_key(c.spec);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&c);
  }
  if (!order.empty() && sum.tellp() > 0) sum << '\n';

  int matched_groups = 0, matched_rank1 = 0;
  for (const std::string& key : order) {
    std::vector<const CellResult*> ranked, out_of_rank;
    for (const CellResult* c : groups[key])
      (c->diverged || c->errored ? out_of_rank : ranked).push_back(c);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const CellResult* a, const CellResult* b) { return a->psnr > b->psnr; });
    sum << '[' << key << "]\n";
    int matched_rank = 0;
    for (size_t i = 0; i < ranked.size(); ++i) {
      const CellResult* c = ranked[i];
      sum << "  " << (i + 1) << ". " << to_token(c->spec.adjoint_kind) << "  psnr=";
      format_double(sum, c->psnr);
      if (is_matched(c->spec)) {
        sum << "  (matched)";
        matched_rank = static_cast<int>(i + 1);
      }
      sum << '\n';
    }
    for (const CellResult* c : out_of_rank) {
      sum << "  -  " << to_token(c->spec.adjoint_kind)
          << (c->errored ? "  ERROR: " + c->error : "  diverged")
          << (is_matched(c->spec) ? "  (matched)" : "") << '\n';
    }
    bool has_matched = false;
    for (const CellResult* c : groups[key]) has_matched = has_matched || is_matched(c->spec);
    if (has_matched) {
      ++matched_groups;
      if (matched_rank == 1) ++matched_rank1;
      if (matched_rank > 0)
        sum << "  matched rank: " << matched_rank << '/' << groups[key].size() << '\n';
      else
        sum << "  matched rank: none (diverged or errored)\n";
    }
    sum << '\n';
  }
  if (matched_groups > 0)
    sum << "coupling dominance: " << matched_rank1 << '/' << matched_groups << '\n';
  write_text_file(out_dir / "summary.txt", sum.str());
}

std::vector<ExperimentSpec> named_specs(std::string_view set, int size) {
  const std::string name = lower(set);
  std::vector<ExperimentSpec> specs;

  auto fbp_sweep = [&](const DatasetPreset& p, const std::string& tag) {
    for (FilterKind f : kAllFilters)
      for (ProjectorKind adj : kAllKinds) {
        ExperimentSpec s;
        s.dataset = p;
        s.mode = CellMode::FBP;
        s.adjoint_kind = adj;
        s.filter = f;
        s.label = tag;
        specs.push_back(std::move(s));
      }
  };
  auto solver_sweep = [&](const DatasetPreset& p, Algorithm algo, ProjectorKind fwd,
                          std::initializer_list<ProjectorKind> adjs, const std::string& tag) {
    for (ProjectorKind adj : adjs) {
      ExperimentSpec s;
      s.dataset = p;
      s.mode = CellMode::SOLVER;
      s.forward_kind = fwd;
      s.adjoint_kind = adj;
      s.config = default_config(algo, p);
      s.label = tag;
      specs.push_back(std::move(s));
    }
  };
  const auto all = {ProjectorKind::PD, ProjectorKind::RD, ProjectorKind::DD,
                    ProjectorKind::SS, ProjectorKind::WF, ProjectorKind::KB};

  if (name == "forward-accuracy") {
    const DatasetPreset p = preset_by_name("sl-full", size);
    for (ProjectorKind k : kAllKinds) {
      ExperimentSpec s;
      s.dataset = p;
      s.mode = CellMode::FORWARD;
      s.forward_kind = k;
      s.label = name;
      specs.push_back(std::move(s));
    }
  } else if (name == "fbp-gen-dd" || name == "fbp-gen-kb" || name == "fbp-gen-pd") {
    DatasetPreset p = preset_by_name("sl-full", size);
    p.name = name;
    p.generator = kind_from_token(name.substr(8));
    fbp_sweep(p, name);
  } else if (name == "fig4a" || name == "fig4b" || name == "fig4c") {
    fbp_sweep(preset_by_name(name, size), name);
  } else if (name == "admm-full-dd") {
    solver_sweep(preset_by_name("sl-full", size), Algorithm::ADMM, ProjectorKind::DD, all, name);
  } else if (name == "admm-full-rd") {
    solver_sweep(preset_by_name("sl-full", size), Algorithm::ADMM, ProjectorKind::RD, all, name);
  } else if (name == "admm-under-pd") {
    solver_sweep(preset_by_name("sl-under", size), Algorithm::ADMM, ProjectorKind::PD,
                 {ProjectorKind::PD, ProjectorKind::KB, ProjectorKind::RD, ProjectorKind::WF},
                 name);
  } else if (name == "pwls-noise-ss") {
    solver_sweep(preset_by_name("sl-noise", size), Algorithm::PWLS, ProjectorKind::SS,
                 {ProjectorKind::SS, ProjectorKind::DD, ProjectorKind::WF, ProjectorKind::PD},
                 name);
  } else if (name == "mlem-under-pd") {
    solver_sweep(preset_by_name("sl-under", size), Algorithm::MLEM, ProjectorKind::PD,
                 {ProjectorKind::PD, ProjectorKind::KB, ProjectorKind::RD}, name);
  } else if (name == "ci") {
    const DatasetPreset full = preset_by_name("sl-full", size);
    for (ProjectorKind k : {ProjectorKind::PD, ProjectorKind::SS}) {
      ExperimentSpec s;
      s.dataset = full;
      s.mode = CellMode::FORWARD;
      s.forward_kind = k;
      s.label = "ci";
      specs.push_back(std::move(s));
    }
    DatasetPreset gen = preset_by_name("sl-under", size);
    gen.name = "ci-gen-dd";
    gen.generator = ProjectorKind::DD;
    for (ProjectorKind adj : {ProjectorKind::DD, ProjectorKind::PD}) {
      ExperimentSpec s;
      s.dataset = gen;
      s.mode = CellMode::FBP;
      s.adjoint_kind = adj;
      s.filter = FilterKind::HANN;
      s.label = "ci";
      specs.push_back(std::move(s));
    }
    DatasetPreset under = preset_by_name("sl-under", size);
    solver_sweep(under, Algorithm::ADMM, ProjectorKind::PD,
                 {ProjectorKind::PD, ProjectorKind::RD}, "ci");
    solver_sweep(under, Algorithm::MLEM, ProjectorKind::PD, {ProjectorKind::KB}, "ci");
    for (ExperimentSpec& s : specs)
      if (s.mode == CellMode::SOLVER) s.config.iterations = 10;
  } else {
    throw std::invalid_argument("unknown experiment set: " + std::string(set));
  }
  return specs;
}

}  // namespace tomolab
