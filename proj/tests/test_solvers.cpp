#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "tomolab/fbp.hpp"
#include "tomolab/metrics.hpp"
#include "tomolab/phantom.hpp"
#include "tomolab/projectors.hpp"
#include "tomolab/solvers.hpp"

using namespace tomolab;
using namespace tomolab::testing;

namespace {

// Small consistent dataset: forward of a rasterized off-center disk, so the
// sinogram is exactly in the range of the forward operator.
struct Fixture {
  Geometry g;
  ImageGrid truth;
  Sinogram s;

  explicit Fixture(int views = 48, int cells = 32,
                   ProjectorKind kind = ProjectorKind::PD)
      : g{views, cells},
        truth(rasterize(Phantom{{Ellipse{0.15, -0.1, 0.55, 0.4, 0.3, 1.0}}}, cells)),
        s(ProjectorPair(kind, g).forward(truth)) {}
};

double tv_of(const ImageGrid& f) {
  ImageGrid dx(f.height(), f.width()), dy(f.height(), f.width());
  grad(f, dx, dy);
  double tv = 0.0;
  for (size_t k = 0; k < dx.size(); ++k) tv += std::abs(dx[k]) + std::abs(dy[k]);
  return tv;
}

double half_sq_residual(const Sinogram& rf, const Sinogram& s, const Sinogram* w) {
  double c = 0.0;
  for (size_t k = 0; k < rf.size(); ++k) {
    const double d = rf[k] - s[k];
    c += 0.5 * (w ? (*w)[k] : 1.0) * d * d;
  }
  return c;
}

bool nonincreasing(const std::vector<double>& c, double rel = 1e-10) {
  for (size_t k = 1; k < c.size(); ++k)
    if (c[k] > c[k - 1] + rel * std::max(1.0, std::abs(c[k - 1]))) return false;
  return true;
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("algorithm tokens round-trip") {
  for (Algorithm a : {Algorithm::ADMM, Algorithm::PWLS, Algorithm::MLEM, Algorithm::SIRT})
    CHECK(algorithm_from_token(to_token(a)) == a);
  CHECK(std::string(to_token(Algorithm::ADMM)) == "admm");
  CHECK(std::string(to_token(Algorithm::PWLS)) == "pwls");
  CHECK(std::string(to_token(Algorithm::MLEM)) == "mlem");
  CHECK(std::string(to_token(Algorithm::SIRT)) == "sirt");
  CHECK_THROWS_AS(algorithm_from_token("em"), std::invalid_argument);
  CHECK_THROWS_AS(algorithm_from_token(""), std::invalid_argument);
}

TEST_CASE("apply_constraints clamps negatives and zeroes outside the circle") {
  const int P = 9;
  ImageGrid f(P, P, 1.0);
  f(4, 4) = -3.0;
  f(0, 0) = 5.0;  // corner, outside the circle
  const ImageGrid out = apply_constraints(f);
  const ImageGrid mask = reconstruction_circle_mask(P);
  CHECK(out(4, 4) == 0.0);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(4, 0) == 1.0);  // edge midpoint, inside
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) {
      CHECK(out(i, j) >= 0.0);
      if (mask(i, j) == 0.0) CHECK(out(i, j) == 0.0);
    }
  CHECK_THROWS_AS(apply_constraints(ImageGrid(3, 4)), std::invalid_argument);
}

TEST_CASE("grad uses forward differences with a zero boundary") {
  ImageGrid f(2, 3);
  f(0, 0) = 1.0; f(0, 1) = 4.0; f(0, 2) = 9.0;
  f(1, 0) = 2.0; f(1, 1) = 0.0; f(1, 2) = -1.0;
  ImageGrid dx, dy;
  grad(f, dx, dy);
  CHECK(dx(0, 0) == 3.0);
  CHECK(dx(0, 1) == 5.0);
  CHECK(dx(0, 2) == -9.0);  // edge sees an implicit zero neighbor
  CHECK(dy(0, 0) == 1.0);
  CHECK(dy(1, 2) == 1.0);
  CHECK(dy(1, 0) == -2.0);
}

TEST_CASE("grad_adjoint is the exact transpose of grad") {
  SeededRng rng(401);
  for (int trial = 0; trial < 4; ++trial) {
    const int H = 5 + trial, W = 7 - trial;
    const ImageGrid f = random_image(H, W, rng);
    const ImageGrid gx = random_image(H, W, rng);
    const ImageGrid gy = random_image(H, W, rng);
    ImageGrid dx, dy;
    grad(f, dx, dy);
    const double lhs = dot(dx.vec(), gx.vec()) + dot(dy.vec(), gy.vec());
    const double rhs = dot(f.vec(), grad_adjoint(gx, gy).vec());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("every solver logs one cost per iteration and is deterministic") {
  const Fixture fx;
  SolverConfig cfg;
  cfg.iterations = 6;
  cfg.tv_weight = 0.5;
  cfg.admm_penalty = 5.0;
  cfg.huber_weight = 0.1;
  for (Algorithm a : {Algorithm::ADMM, Algorithm::PWLS, Algorithm::MLEM, Algorithm::SIRT}) {
    CAPTURE(to_token(a));
    cfg.algorithm = a;
    const SolveResult r1 = run_solver(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    const SolveResult r2 = run_solver(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    CHECK(r1.trace.cost.size() == 6);
    CHECK(r1.trace.psnr.size() == 6);
    CHECK(!r1.trace.diverged);
    CHECK(std::isnan(r1.trace.psnr[0]));  // no reference given
    CHECK(max_abs_diff(r1.image.vec(), r2.image.vec()) == 0.0);
    CHECK(r1.trace.cost == r2.trace.cost);
  }
}

TEST_CASE("a shorter run is a bitwise prefix of a longer one") {
  const Fixture fx;
  SolverConfig cfg;
  cfg.tv_weight = 0.5;
  cfg.admm_penalty = 5.0;
  cfg.huber_weight = 0.1;
  for (Algorithm a : {Algorithm::ADMM, Algorithm::PWLS, Algorithm::MLEM, Algorithm::SIRT}) {
    CAPTURE(to_token(a));
    cfg.algorithm = a;
    cfg.iterations = 4;
    const SolveResult a4 = run_solver(fx.s, ProjectorKind::PD, ProjectorKind::RD, cfg);
    cfg.iterations = 9;
    const SolveResult a9 = run_solver(fx.s, ProjectorKind::PD, ProjectorKind::RD, cfg);
    REQUIRE(a9.trace.cost.size() == 9);
    for (int k = 0; k < 4; ++k) CHECK(a4.trace.cost[k] == a9.trace.cost[k]);
  }
}

TEST_CASE("logged cost matches a recomputation from the returned image") {
  // Pins the objective of each algorithm: rerun a short solve, then rebuild
  // the final logged cost from public pieces alone.
  const Fixture fx;
  const ProjectorPair fp(ProjectorKind::PD, fx.g);
  SolverConfig cfg;
  cfg.iterations = 5;

  SUBCASE("admm: 0.5||Rf-s||^2 + lambda TV(f)") {
    cfg.algorithm = Algorithm::ADMM;
    cfg.tv_weight = 0.7;
    cfg.admm_penalty = 3.0;
    const SolveResult r = admm_tv(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    const double want =
        half_sq_residual(fp.forward(r.image), fx.s, nullptr) + cfg.tv_weight * tv_of(r.image);
    CHECK(r.trace.cost.back() == doctest::Approx(want).epsilon(1e-10));
  }
  SUBCASE("pwls: 0.5 sum w (Rf-s)^2 + beta sum huber(grad f)") {
    cfg.algorithm = Algorithm::PWLS;
    cfg.huber_weight = 0.2;
    cfg.huber_delta = 0.05;
    Sinogram w(fx.g, 1.0);
    SeededRng rng(77);
    for (size_t k = 0; k < w.size(); ++k) w[k] = rng.uniform(0.5, 2.0);
    const SolveResult r = pwls_huber(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg, &w);
    ImageGrid dx, dy;
    grad(r.image, dx, dy);
    auto huber = [&](double t) {
      const double a = std::abs(t), d = cfg.huber_delta;
      return a <= d ? 0.5 * t * t : d * a - 0.5 * d * d;
    };
    double want = half_sq_residual(fp.forward(r.image), fx.s, &w);
    for (size_t k = 0; k < dx.size(); ++k)
      want += cfg.huber_weight * (huber(dx[k]) + huber(dy[k]));
    CHECK(r.trace.cost.back() == doctest::Approx(want).epsilon(1e-10));
  }
  SUBCASE("mlem: sum rf - s log(rf + eps)") {
    cfg.algorithm = Algorithm::MLEM;
    const SolveResult r = mlem(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    const Sinogram rf = fp.forward(r.image);
    double want = 0.0;
    for (size_t k = 0; k < rf.size(); ++k)
      want += rf[k] - fx.s[k] * std::log(std::max(rf[k], 0.0) + cfg.epsilon);
    CHECK(r.trace.cost.back() == doctest::Approx(want).epsilon(1e-10));
  }
  SUBCASE("sirt: 0.5 sum (Rf-s)^2 / rowsum") {
    cfg.algorithm = Algorithm::SIRT;
    const SolveResult r = sirt(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    const Sinogram rows = fp.forward(ImageGrid(fx.g.cells, fx.g.cells, 1.0));
    Sinogram w(fx.g);
    for (size_t k = 0; k < w.size(); ++k) w[k] = 1.0 / std::max(rows[k], cfg.epsilon);
    const double want = half_sq_residual(fp.forward(r.image), fx.s, &w);
    CHECK(r.trace.cost.back() == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("constrained solvers return feasible images") {
  const Fixture fx;
  const ImageGrid mask = reconstruction_circle_mask(fx.g.cells);
  SolverConfig cfg;
  cfg.iterations = 8;
  cfg.tv_weight = 0.5;
  cfg.admm_penalty = 5.0;
  cfg.huber_weight = 0.1;
  for (Algorithm a : {Algorithm::ADMM, Algorithm::PWLS, Algorithm::MLEM, Algorithm::SIRT}) {
    CAPTURE(to_token(a));
    cfg.algorithm = a;
    const SolveResult r = run_solver(fx.s, ProjectorKind::PD, ProjectorKind::KB, cfg);
    for (int i = 0; i < fx.g.cells; ++i)
      for (int j = 0; j < fx.g.cells; ++j) {
        CHECK(r.image(i, j) >= 0.0);
        if (mask(i, j) == 0.0) CHECK(r.image(i, j) == 0.0);
      }
  }
}

TEST_CASE("exactly consistent data is an mlem fixed point") {
  const Fixture fx;
  SolverConfig cfg;
  cfg.algorithm = Algorithm::MLEM;
  cfg.iterations = 1;
  const SolveResult r =
      mlem(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg, nullptr, &fx.truth);
  // ratio = s / (R truth) = 1 wherever s > 0, so the multiplicative update
  // leaves the truth untouched up to the division floors.
  CHECK(max_abs_diff(r.image.vec(), fx.truth.vec()) <= 1e-9);
}

TEST_CASE("mlem clamps negative samples instead of throwing") {
  Fixture fx;
  fx.s[0] = -0.5;
  SolverConfig cfg;
  cfg.algorithm = Algorithm::MLEM;
  cfg.iterations = 3;
  const SolveResult r = mlem(fx.s, ProjectorKind::PD, ProjectorKind::KB, cfg);
  for (size_t k = 0; k < r.image.size(); ++k) CHECK(r.image[k] >= 0.0);
  CHECK(!r.trace.diverged);
}

TEST_CASE("mlem rejects an init of the wrong shape") {
  const Fixture fx;
  SolverConfig cfg;
  cfg.algorithm = Algorithm::MLEM;
  cfg.iterations = 1;
  const ImageGrid bad(fx.g.cells, fx.g.cells + 1);
  CHECK_THROWS_AS(mlem(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg, nullptr, &bad),
                  std::invalid_argument);
}

TEST_CASE("pwls rejects weights of the wrong shape") {
  const Fixture fx;
  SolverConfig cfg;
  cfg.algorithm = Algorithm::PWLS;
  cfg.iterations = 1;
  const Sinogram bad(Geometry{fx.g.views + 1, fx.g.cells}, 1.0);
  CHECK_THROWS_AS(pwls_huber(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg, &bad),
                  std::invalid_argument);
}

TEST_CASE("the divergence guard stops the run and flags the trace") {
  // An enormous TV weight makes the first logged cost exceed 1e6 x the
  // data-only baseline, which must end the run immediately.
  const Fixture fx;
  SolverConfig cfg;
  cfg.algorithm = Algorithm::ADMM;
  cfg.iterations = 10;
  cfg.tv_weight = 1e20;
  cfg.admm_penalty = 1.0;
  const SolveResult r = admm_tv(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
  CHECK(r.trace.diverged);
  CHECK(r.trace.cost.size() == 1);
  CHECK(std::isfinite(r.trace.cost[0]));
}

TEST_CASE("short consistent solves reduce the data residual") {
  const Fixture fx;
  const ProjectorPair fp(ProjectorKind::PD, fx.g);
  SolverConfig cfg;
  cfg.iterations = 12;
  const double c0 = half_sq_residual(Sinogram(fx.g), fx.s, nullptr);
  for (Algorithm a : {Algorithm::ADMM, Algorithm::PWLS, Algorithm::MLEM, Algorithm::SIRT}) {
    CAPTURE(to_token(a));
    cfg.algorithm = a;
    const SolveResult r = run_solver(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    const double c = half_sq_residual(fp.forward(r.image), fx.s, nullptr);
    CHECK(c < 0.25 * c0);
  }
}

TEST_CASE("sirt and pwls traces are nonincreasing on matched small problems") {
  const Fixture fx;
  SolverConfig cfg;
  cfg.iterations = 40;
  SUBCASE("sirt") {
    cfg.algorithm = Algorithm::SIRT;
    cfg.constraints_enabled = false;
    const SolveResult r = sirt(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    CHECK(nonincreasing(r.trace.cost));
  }
  SUBCASE("pwls without penalty") {
    cfg.algorithm = Algorithm::PWLS;
    cfg.huber_weight = 0.0;
    const SolveResult r = pwls_huber(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    CHECK(nonincreasing(r.trace.cost));
  }
  SUBCASE("mlem") {
    cfg.algorithm = Algorithm::MLEM;
    const SolveResult r = mlem(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    CHECK(nonincreasing(r.trace.cost));
  }
}

TEST_CASE("psnr trace is populated when a reference is given") {
  const Fixture fx;
  SolverConfig cfg;
  cfg.algorithm = Algorithm::SIRT;
  cfg.iterations = 5;
  const SolveResult r =
      sirt(fx.s, ProjectorKind::PD, ProjectorKind::PD, cfg, &fx.truth);
  REQUIRE(r.trace.psnr.size() == 5);
  for (double p : r.trace.psnr) CHECK(std::isfinite(p));
  CHECK(r.trace.psnr.back() > r.trace.psnr.front());
}

TEST_CASE("ablation study returns finite deterministic scores") {
  // Reduced-size copy of the underconstrained noisy preset.
  const int P = 48;
  const Geometry g{14, P};
  const ImageGrid truth = rasterize(shepp_logan(), P);
  Sinogram s = ProjectorPair(ProjectorKind::PD, g).forward(truth);
  SeededRng rng(7);
  s = add_poisson_noise(s, 0.03, rng);
  const double c1 = ablation_admm(s, AblationMode::CoupledFull, truth);
  const double c2 = ablation_admm(s, AblationMode::CoupledOnly, truth);
  const double c3 = ablation_admm(s, AblationMode::UncoupledFull, truth);
  CHECK(std::isfinite(c1));
  CHECK(std::isfinite(c2));
  CHECK(std::isfinite(c3));
  CHECK(ablation_admm(s, AblationMode::CoupledFull, truth) == c1);
  CHECK(ablation_admm(s, AblationMode::UncoupledFull, truth, ProjectorKind::KB) != c3);
}

}  // TEST_SUITE("solvers")

TEST_SUITE("solvers_slow") {

TEST_CASE("least-squares admm on complete clean data beats fbp" *
          doctest::timeout(1200)) {
  const int P = 256;
  const Geometry g{402, P};
  const Phantom ph = shepp_logan();
  const ImageGrid truth = rasterize(ph, P);
  const Sinogram s = analytic_sinogram(ph, g);
  const ImageGrid mask = reconstruction_circle_mask(P);

  SolverConfig cfg;
  cfg.algorithm = Algorithm::ADMM;
  cfg.iterations = 50;
  cfg.tv_weight = 0.0;
  cfg.admm_penalty = 1.0;
  const SolveResult r = admm_tv(s, ProjectorKind::PD, ProjectorKind::PD, cfg, &truth);
  CHECK(!r.trace.diverged);
  CHECK(r.trace.cost.back() < 0.5 * r.trace.cost.front());

  const ImageGrid fb = fbp_reconstruct(s, ProjectorKind::PD, FilterKind::RAMP);
  CHECK(r.trace.psnr.back() > psnr(fb, truth, &mask) - 1.0);
  CHECK(r.trace.psnr.back() > 25.0);
}

TEST_CASE("matched monotonicity at half scale: mlem, sirt, pwls" *
          doctest::timeout(1800)) {
  const int P = 128;
  const Geometry g{202, P};
  const Phantom ph = shepp_logan();
  const Sinogram s = analytic_sinogram(ph, g);
  SolverConfig cfg;
  cfg.iterations = 100;

  SUBCASE("mlem nll") {
    cfg.algorithm = Algorithm::MLEM;
    const SolveResult r = mlem(s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    CHECK(nonincreasing(r.trace.cost));
  }
  SUBCASE("sirt weighted residual, constraints off") {
    cfg.algorithm = Algorithm::SIRT;
    cfg.constraints_enabled = false;
    const SolveResult r = sirt(s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    CHECK(nonincreasing(r.trace.cost));
  }
  SUBCASE("pwls with unit weights and no penalty") {
    cfg.algorithm = Algorithm::PWLS;
    cfg.huber_weight = 0.0;
    const SolveResult r = pwls_huber(s, ProjectorKind::PD, ProjectorKind::PD, cfg);
    CHECK(nonincreasing(r.trace.cost));
  }
}

TEST_CASE("pwls matched adjoint reaches the lowest final cost" *
          doctest::timeout(1800)) {
  // Half-scale copy of the noisy complete preset with the scatter/stripe
  // projector as generator.
  const int P = 128;
  const Geometry g{201, P};
  const Phantom ph = shepp_logan();
  const ImageGrid truth = rasterize(ph, P);
  Sinogram s = analytic_sinogram(ph, g);
  SeededRng rng(7);
  s = add_poisson_noise(s, 0.03, rng);
  const Sinogram w = poisson_weights(s, 0.03);

  SolverConfig cfg;
  cfg.algorithm = Algorithm::PWLS;
  cfg.iterations = 100;
  cfg.huber_weight = 2.0;
  cfg.huber_delta = 0.01;

  double matched = 0.0;
  double best_other = std::numeric_limits<double>::infinity();
  for (ProjectorKind adj : {ProjectorKind::SS, ProjectorKind::DD, ProjectorKind::WF,
                            ProjectorKind::PD}) {
    const SolveResult r = pwls_huber(s, ProjectorKind::SS, adj, cfg, &w, &truth);
    REQUIRE(!r.trace.diverged);
    if (adj == ProjectorKind::SS)
      matched = r.trace.cost.back();
    else
      best_other = std::min(best_other, r.trace.cost.back());
  }
  CHECK(matched < best_other);
}

}  // TEST_SUITE("solvers_slow")
