#include "tomolab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "tomolab/metrics.hpp"

namespace tomolab {

const char* to_token(Algorithm a) {
  switch (a) {
    case Algorithm::ADMM: return "admm";
    case Algorithm::PWLS: return "pwls";
    case Algorithm::MLEM: return "mlem";
    case Algorithm::SIRT: return "sirt";
  }
  throw std::logic_error("bad algorithm");
}

Algorithm algorithm_from_token(std::string_view token) {
  for (Algorithm a : {Algorithm::ADMM, Algorithm::PWLS, Algorithm::MLEM, Algorithm::SIRT})
    if (token == to_token(a)) return a;
  throw std::invalid_argument("unknown algorithm '" + std::string(token) +
                              "' (expected admm|pwls|mlem|sirt)");
}

ImageGrid apply_constraints(const ImageGrid& img) {
  if (img.height() != img.width())
    throw std::invalid_argument("apply_constraints: square image required");
  const ImageGrid mask = reconstruction_circle_mask(img.width());
  ImageGrid out(img.height(), img.width());
  for (size_t k = 0; k < img.size(); ++k)
    out[k] = std::max(img[k], 0.0) * mask[k];
  return out;
}

void grad(const ImageGrid& f, ImageGrid& dx, ImageGrid& dy) {
  const int H = f.height(), W = f.width();
  if (!dx.same_shape(f)) dx = ImageGrid(H, W);
  if (!dy.same_shape(f)) dy = ImageGrid(H, W);
  for (int i = 0; i < H; ++i)
    for (int j = 0; j < W; ++j) {
      dx(i, j) = (j + 1 < W ? f(i, j + 1) : 0.0) - f(i, j);
      dy(i, j) = (i + 1 < H ? f(i + 1, j) : 0.0) - f(i, j);
    }
}

ImageGrid grad_adjoint(const ImageGrid& dx, const ImageGrid& dy) {
  const int H = dx.height(), W = dx.width();
  ImageGrid out(H, W);
  for (int i = 0; i < H; ++i)
    for (int j = 0; j < W; ++j) {
      double v = -dx(i, j) - dy(i, j);
      if (j > 0) v += dx(i, j - 1);
      if (i > 0) v += dy(i - 1, j);
      out(i, j) = v;
    }
  return out;
}

namespace {

constexpr double kDivergenceFactor = 1e6;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceKeeper {
  ConvergenceTrace trace;
  double baseline = 0.0;
  const ImageGrid* ref = nullptr;
  ImageGrid mask;

  explicit TraceKeeper(double initial_cost, const ImageGrid* r, int P)
      : baseline(std::max(std::abs(initial_cost), 1e-30)), ref(r) {
    if (ref) mask = reconstruction_circle_mask(P);
  }

  // returns false when the run must stop (divergence)
  bool log(double cost, const ImageGrid& f) {
    trace.cost.push_back(cost);
    trace.psnr.push_back(ref ? psnr(f, *ref, &mask) : kNaN);
    if (!std::isfinite(cost) || cost > kDivergenceFactor * baseline) {
      trace.diverged = true;
      return false;
    }
    return true;
  }
};

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double huber(double t, double d) {
  const double a = std::abs(t);
  return a <= d ? 0.5 * t * t : d * a - 0.5 * d * d;
}

double huber_prime(double t, double d) { return std::clamp(t, -d, d); }

ImageGrid ones_image(int P) { return ImageGrid(P, P, 1.0); }

}  // namespace

SolveResult admm_tv(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                    const SolverConfig& cfg, const ImageGrid* ref) {
  const int P = s.cells();
  const ProjectorPair fp(fwd, s.geom()), ap(adj, s.geom());
  const double lam = cfg.tv_weight, rho = cfg.admm_penalty;

  ImageGrid f(P, P), zx(P, P), zy(P, P), ux(P, P), uy(P, P);
  ImageGrid gx(P, P), gy(P, P);
  const ImageGrid ats = ap.adjoint(s);

  auto cost_of = [&](const Sinogram& rf, const ImageGrid& fi) {
    double c = 0.0;
    for (size_t k = 0; k < rf.size(); ++k) {
      const double d = rf[k] - s[k];
      c += 0.5 * d * d;
    }
    if (lam > 0.0) {
      ImageGrid tx(P, P), ty(P, P);
      grad(fi, tx, ty);
      double tv = 0.0;
      for (size_t k = 0; k < tx.size(); ++k) tv += std::abs(tx[k]) + std::abs(ty[k]);
      c += lam * tv;
    }
    return c;
  };

  TraceKeeper keeper(0.5 * sum_sq(s.vec()), ref, P);
  ImageGrid f_prev = f;
  for (int it = 0; it < cfg.iterations; ++it) {
    // b = R*s + rho * D*(z - u)
    ImageGrid zmux(P, P), zmuy(P, P);
    for (size_t k = 0; k < zx.size(); ++k) {
      zmux[k] = zx[k] - ux[k];
      zmuy[k] = zy[k] - uy[k];
    }
    ImageGrid b = grad_adjoint(zmux, zmuy);
    for (size_t k = 0; k < b.size(); ++k) b[k] = ats[k] + rho * b[k];

    // warm-started CG on (R*R + rho D*D) f = b
    auto apply_normal = [&](const ImageGrid& v) {
      ImageGrid out = ap.adjoint(fp.forward(v));
      grad(v, gx, gy);
      ImageGrid reg = grad_adjoint(gx, gy);
      for (size_t k = 0; k < out.size(); ++k) out[k] += rho * reg[k];
      return out;
    };
    ImageGrid r = apply_normal(f);
    for (size_t k = 0; k < r.size(); ++k) r[k] = b[k] - r[k];
    ImageGrid p = r;
    double rr = norm2(r.vec());
    for (int cg = 0; cg < cfg.inner_cg_iters && rr > 0.0; ++cg) {
      const ImageGrid apv = apply_normal(p);
      const double pap = dot(p.vec(), apv.vec());
      if (pap == 0.0 || !std::isfinite(pap)) break;
      const double alpha = rr / pap;
      for (size_t k = 0; k < f.size(); ++k) {
        f[k] += alpha * p[k];
        r[k] -= alpha * apv[k];
      }
      const double rr2 = norm2(r.vec());
      const double beta = rr2 / rr;
      rr = rr2;
      for (size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
    }

    // z = soft(Df + u, lam/rho); u += Df - z
    grad(f, gx, gy);
    const double thr = rho > 0.0 ? lam / rho : 0.0;
    for (size_t k = 0; k < zx.size(); ++k) {
      const double vx = gx[k] + ux[k], vy = gy[k] + uy[k];
      zx[k] = std::copysign(std::max(std::abs(vx) - thr, 0.0), vx);
      zy[k] = std::copysign(std::max(std::abs(vy) - thr, 0.0), vy);
      ux[k] += gx[k] - zx[k];
      uy[k] += gy[k] - zy[k];
    }
    if (cfg.constraints_enabled) f = apply_constraints(f);

    const Sinogram rf = fp.forward(f);
    const double c = cost_of(rf, f);
    if (!std::isfinite(c)) {
      keeper.log(c, f_prev);
      return {std::move(f_prev), std::move(keeper.trace)};
    }
    if (!keeper.log(c, f)) return {std::move(f), std::move(keeper.trace)};
    f_prev = f;
  }
  return {std::move(f), std::move(keeper.trace)};
}

SolveResult pwls_huber(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                       const SolverConfig& cfg, const Sinogram* weights,
                       const ImageGrid* ref) {
  const int P = s.cells();
  const ProjectorPair fp(fwd, s.geom()), ap(adj, s.geom());
  const double beta = cfg.huber_weight, delta = cfg.huber_delta;

  Sinogram w = weights ? *weights : Sinogram(s.geom(), 1.0);
  if (!w.same_shape(s)) throw std::invalid_argument("pwls: weight shape mismatch");

  // diagonal preconditioner d = R*(W R 1) + 8 beta / delta
  Sinogram w_r1 = fp.forward(ones_image(P));
  for (size_t k = 0; k < w_r1.size(); ++k) w_r1[k] *= w[k];
  ImageGrid den = ap.adjoint(w_r1);
  const double reg_curv = delta > 0.0 ? 8.0 * beta / delta : 0.0;
  for (size_t k = 0; k < den.size(); ++k)
    den[k] = std::max(den[k] + reg_curv, cfg.epsilon);

  ImageGrid f(P, P), gx(P, P), gy(P, P);

  auto cost_of = [&](const Sinogram& rf, const ImageGrid& fi) {
    double c = 0.0;
    for (size_t k = 0; k < rf.size(); ++k) {
      const double d = rf[k] - s[k];
      c += 0.5 * w[k] * d * d;
    }
    if (beta > 0.0) {
      ImageGrid tx(P, P), ty(P, P);
      grad(fi, tx, ty);
      for (size_t k = 0; k < tx.size(); ++k)
        c += beta * (huber(tx[k], delta) + huber(ty[k], delta));
    }
    return c;
  };

  double c0 = 0.0;
  for (size_t k = 0; k < s.size(); ++k) c0 += 0.5 * w[k] * s[k] * s[k];
  TraceKeeper keeper(c0, ref, P);
  ImageGrid f_prev = f;
  for (int it = 0; it < cfg.iterations; ++it) {
    Sinogram rf = fp.forward(f);
    for (size_t k = 0; k < rf.size(); ++k) rf[k] = w[k] * (rf[k] - s[k]);
    ImageGrid g = ap.adjoint(rf);
    if (beta > 0.0) {
      grad(f, gx, gy);
      for (size_t k = 0; k < gx.size(); ++k) {
        gx[k] = huber_prime(gx[k], delta);
        gy[k] = huber_prime(gy[k], delta);
      }
      const ImageGrid reg = grad_adjoint(gx, gy);
      for (size_t k = 0; k < g.size(); ++k) g[k] += beta * reg[k];
    }
    for (size_t k = 0; k < f.size(); ++k) f[k] -= g[k] / den[k];
    if (cfg.constraints_enabled) f = apply_constraints(f);

    const Sinogram rf2 = fp.forward(f);
    const double c = cost_of(rf2, f);
    if (!std::isfinite(c)) {
      keeper.log(c, f_prev);
      return {std::move(f_prev), std::move(keeper.trace)};
    }
    if (!keeper.log(c, f)) return {std::move(f), std::move(keeper.trace)};
    f_prev = f;
  }
  return {std::move(f), std::move(keeper.trace)};
}

SolveResult mlem(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                 const SolverConfig& cfg, const ImageGrid* ref, const ImageGrid* init) {
  const int P = s.cells();
  const ProjectorPair fp(fwd, s.geom()), ap(adj, s.geom());

  Sinogram sc = s;  // counts must be nonnegative
  bool clamped = false;
  for (size_t k = 0; k < sc.size(); ++k) {
    clamped = clamped || sc[k] < 0.0;
    sc[k] = std::max(sc[k], 0.0);
  }
  if (clamped) std::fprintf(stderr, "mlem: negative sinogram samples clamped to 0\n");

  const ImageGrid mask = reconstruction_circle_mask(P);
  ImageGrid f = init ? *init : mask;  // default start: 1 inside the circle
  if (init && !init->same_shape(mask)) throw std::invalid_argument("mlem: bad init shape");

  const ImageGrid cden = ap.adjoint(Sinogram(s.geom(), 1.0));
  ImageGrid cinv(P, P);
  for (size_t k = 0; k < cden.size(); ++k)
    cinv[k] = 1.0 / std::max(cden[k], cfg.epsilon);

  auto cost_of = [&](const Sinogram& rf) {
    double c = 0.0;
    for (size_t k = 0; k < rf.size(); ++k)
      c += rf[k] - sc[k] * std::log(std::max(rf[k], 0.0) + cfg.epsilon);
    return c;
  };

  Sinogram rf = fp.forward(f);
  TraceKeeper keeper(cost_of(rf), ref, P);
  ImageGrid f_prev = f;
  for (int it = 0; it < cfg.iterations; ++it) {
    Sinogram ratio(s.geom());
    for (size_t k = 0; k < ratio.size(); ++k)
      ratio[k] = sc[k] / std::max(rf[k], cfg.epsilon);
    const ImageGrid back = ap.adjoint(ratio);
    for (size_t k = 0; k < f.size(); ++k)
      f[k] *= std::max(cinv[k] * back[k], 0.0);  // clamp guards gridding lobes

    rf = fp.forward(f);
    const double c = cost_of(rf);
    if (!std::isfinite(c)) {
      keeper.log(c, f_prev);
      return {std::move(f_prev), std::move(keeper.trace)};
    }
    if (!keeper.log(c, f)) return {std::move(f), std::move(keeper.trace)};
    f_prev = f;
  }
  return {std::move(f), std::move(keeper.trace)};
}

SolveResult sirt(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                 const SolverConfig& cfg, const ImageGrid* ref) {
  const int P = s.cells();
  const ProjectorPair fp(fwd, s.geom()), ap(adj, s.geom());

  Sinogram row = fp.forward(ones_image(P));
  Sinogram w(s.geom());
  for (size_t k = 0; k < row.size(); ++k)
    w[k] = 1.0 / std::max(row[k], cfg.epsilon);
  const ImageGrid mask = reconstruction_circle_mask(P);
  const ImageGrid col = ap.adjoint(Sinogram(s.geom(), 1.0));
  ImageGrid cnorm(P, P);
  for (size_t k = 0; k < col.size(); ++k)
    cnorm[k] = mask[k] / std::max(col[k], cfg.epsilon);

  auto cost_of = [&](const Sinogram& rf) {
    double c = 0.0;
    for (size_t k = 0; k < rf.size(); ++k) {
      const double d = rf[k] - s[k];
      c += 0.5 * w[k] * d * d;
    }
    return c;
  };

  ImageGrid f(P, P);
  double c0 = 0.0;
  for (size_t k = 0; k < s.size(); ++k) c0 += 0.5 * w[k] * s[k] * s[k];
  TraceKeeper keeper(c0, ref, P);
  ImageGrid f_prev = f;
  for (int it = 0; it < cfg.iterations; ++it) {
    Sinogram resid = fp.forward(f);
    for (size_t k = 0; k < resid.size(); ++k) resid[k] = w[k] * (s[k] - resid[k]);
    const ImageGrid upd = ap.adjoint(resid);
    for (size_t k = 0; k < f.size(); ++k) f[k] += cnorm[k] * upd[k];
    if (cfg.constraints_enabled) f = apply_constraints(f);

    const Sinogram rf = fp.forward(f);
    const double c = cost_of(rf);
    if (!std::isfinite(c)) {
      keeper.log(c, f_prev);
      return {std::move(f_prev), std::move(keeper.trace)};
    }
    if (!keeper.log(c, f)) return {std::move(f), std::move(keeper.trace)};
    f_prev = f;
  }
  return {std::move(f), std::move(keeper.trace)};
}

SolveResult run_solver(const Sinogram& s, ProjectorKind fwd, ProjectorKind adj,
                       const SolverConfig& cfg, const Sinogram* weights,
                       const ImageGrid* ref) {
  switch (cfg.algorithm) {
    case Algorithm::ADMM: return admm_tv(s, fwd, adj, cfg, ref);
    case Algorithm::PWLS: return pwls_huber(s, fwd, adj, cfg, weights, ref);
    case Algorithm::MLEM: return mlem(s, fwd, adj, cfg, ref);
    case Algorithm::SIRT: return sirt(s, fwd, adj, cfg, ref);
  }
  throw std::logic_error("bad algorithm");
}

Sinogram poisson_weights(const Sinogram& s, double sigma_fraction) {
  double m = 0.0;
  for (size_t k = 0; k < s.size(); ++k) m += s[k];
  m /= static_cast<double>(s.size());
  if (m <= 0.0) throw std::invalid_argument("poisson_weights: nonpositive mean");
  const double v = sigma_fraction * sigma_fraction * m;
  Sinogram w(s.geom());
  for (size_t k = 0; k < s.size(); ++k)
    w[k] = 1.0 / (v * std::max(s[k], 0.01 * m));
  return w;
}

double ablation_admm(const Sinogram& s, AblationMode mode, const ImageGrid& ref,
                     ProjectorKind uncoupled_adj) {
  // Frozen configuration for the underconstrained noisy preset (75 views,
  // sigma = 3%): see configs/solvers.cfg for the grid this came from.
  SolverConfig cfg;
  cfg.algorithm = Algorithm::ADMM;
  cfg.tv_weight = 3.8;
  cfg.admm_penalty = 38.0;
  cfg.inner_cg_iters = 4;
  const ProjectorKind kind = ProjectorKind::PD;

  switch (mode) {
    case AblationMode::CoupledFull:
      cfg.iterations = 60;
      cfg.constraints_enabled = true;
      return run_solver(s, kind, kind, cfg, nullptr, &ref).trace.psnr.back();
    case AblationMode::CoupledOnly:
      cfg.iterations = 100;
      cfg.constraints_enabled = false;
      return run_solver(s, kind, kind, cfg, nullptr, &ref).trace.psnr.back();
    case AblationMode::UncoupledFull:
      cfg.iterations = 60;
      cfg.constraints_enabled = true;
      return run_solver(s, kind, uncoupled_adj, cfg, nullptr, &ref).trace.psnr.back();
  }
  throw std::logic_error("bad ablation mode");
}

}  // namespace tomolab
