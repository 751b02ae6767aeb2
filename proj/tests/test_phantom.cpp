#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tomolab/metrics.hpp"
#include "tomolab/phantom.hpp"
#include "tomolab/projectors.hpp"
#include "tomolab/rng.hpp"

using namespace tomolab;
using namespace tomolab::testing;

namespace {

Phantom unit_disk() {
  Phantom ph;
  ph.ellipses.push_back({0.0, 0.0, 1.0, 1.0, 0.0, 1.0});
  return ph;
}

double contains_sum(const Phantom& ph, double x, double y) {
  double v = 0.0;
  for (const Ellipse& e : ph.ellipses)
    if (e.contains(x, y)) v += e.rho;
  return v;
}

// midpoint-rule line integral in detector units; the phantom support is the
// scaled unit circle, so |s| <= scale covers every ray
double quadrature_integral(const Phantom& ph, double theta, double t, double scale,
                           double step) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const long n = static_cast<long>(std::ceil(2.0 * scale / step));
  const double h = 2.0 * scale / static_cast<double>(n);
  double acc = 0.0;
  for (long k = 0; k < n; ++k) {
    const double s = -scale + (k + 0.5) * h;
    const double x = (t * ct - s * st) / scale;
    const double y = (t * st + s * ct) / scale;
    acc += contains_sum(ph, x, y);
  }
  return acc * h;
}

}  // namespace

TEST_SUITE("phantom") {

TEST_CASE("ellipse containment handles rotation") {
  Ellipse e{0.0, 0.0, 0.5, 0.1, 0.0, 1.0};
  CHECK(e.contains(0.45, 0.0));
  CHECK_FALSE(e.contains(0.0, 0.45));
  e.phi = kPi / 2;  // quarter turn swaps the axes
  CHECK_FALSE(e.contains(0.45, 0.0));
  CHECK(e.contains(0.0, 0.45));
  Ellipse off{0.3, -0.2, 0.1, 0.1, 0.0, 1.0};
  CHECK(off.contains(0.35, -0.2));
  CHECK_FALSE(off.contains(0.3, 0.0));
}

TEST_CASE("unit disk line integrals: chord, center, tangent") {
  const Phantom ph = unit_disk();
  for (double scale : {128.0, 1.0}) {
    for (double theta : {0.0, 0.3, kPi / 2, 2.9}) {
      CHECK(analytic_line_integral(ph, theta, 0.0, scale) ==
            doctest::Approx(2.0 * scale).epsilon(1e-12));
      CHECK(analytic_line_integral(ph, theta, 0.5 * scale, scale) ==
            doctest::Approx(std::sqrt(3.0) * scale).epsilon(1e-12));
      CHECK(analytic_line_integral(ph, theta, scale, scale) ==
            doctest::Approx(0.0).epsilon(1e-12));
      CHECK(analytic_line_integral(ph, theta, 1.7 * scale, scale) == 0.0);
    }
  }
}

TEST_CASE("rasterize samples pixel centers of the additive stack") {
  const Phantom sl = shepp_logan();
  SUBCASE("odd grid puts a pixel exactly at the origin") {
    const int P = 255;
    ImageGrid img = rasterize(sl, P);
    CHECK(img(127, 127) == contains_sum(sl, 0.0, 0.0));
  }
  SUBCASE("random pixels match the containment oracle") {
    const int P = 256;
    ImageGrid img = rasterize(sl, P);
    SeededRng rng(31);
    for (int k = 0; k < 200; ++k) {
      const int i = static_cast<int>(rng.uniform(0, P));
      const int j = static_cast<int>(rng.uniform(0, P));
      const double x = img.pixel_x(j) / (P / 2.0);
      const double y = img.pixel_y(i) / (P / 2.0);
      REQUIRE(img(i, j) == contains_sum(sl, x, y));
    }
    CHECK(img(0, 0) == 0.0);  // corners sit outside the unit circle
    CHECK(img(0, P - 1) == 0.0);
    CHECK(img(P - 1, 0) == 0.0);
  }
}

TEST_CASE("unit disk rasterization brackets the reconstruction circle mask") {
  const int P = 33;
  ImageGrid disk = rasterize(unit_disk(), P);
  ImageGrid mask = reconstruction_circle_mask(P);
  // mask radius (P-1)/2 sits inside the disk radius P/2; they may disagree
  // only on the half-pixel annulus between the two radii
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) {
      CHECK(disk(i, j) >= mask(i, j));
      if (disk(i, j) != mask(i, j)) {
        const double x = disk.pixel_x(j), y = disk.pixel_y(i);
        const double r = std::sqrt(x * x + y * y);
        CHECK(r > 0.5 * (P - 1));
        CHECK(r <= 0.5 * P);
      }
    }
}

TEST_CASE("shepp-logan uses the classic high-contrast shell") {
  const Phantom sl = shepp_logan();
  REQUIRE(sl.ellipses.size() == 10);
  CHECK(sl.ellipses[0].rho == doctest::Approx(2.0));
  CHECK(sl.ellipses[1].rho == doctest::Approx(-0.98));
  // head interior: shell minus brain = 1.02
  CHECK(contains_sum(sl, 0.0, 0.35) == doctest::Approx(1.02 + 0.01).epsilon(1e-12));
}

TEST_CASE("analytic sinogram matches midpoint quadrature on random rays") {
  const Phantom sl = shepp_logan();
  const double scale = 128.0;
  SeededRng rng(4);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double theta = rng.uniform(0.0, kPi);
    const double t = rng.uniform(-0.95, 0.95) * scale;
    const double got = analytic_line_integral(sl, theta, t, scale);
    const double want = quadrature_integral(sl, theta, t, scale, 1e-3);
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("analytic sinogram default scale is N/2 and rows live on the lattice") {
  const Phantom sl = shepp_logan();
  const Geometry g{40, 64};
  Sinogram a = analytic_sinogram(sl, g);
  Sinogram b = analytic_sinogram(sl, g, 32.0);
  CHECK(max_abs_diff(a.vec(), b.vec()) == 0.0);
  for (int k = 0; k < g.views; ++k)
    for (int n = 0; n < g.cells; ++n)
      REQUIRE(a(k, n) == analytic_line_integral(sl, g.angle(k), g.cell_center(n), 32.0));
}

TEST_CASE("centered disk mass is exactly view-invariant") {
  const Geometry g{402, 256};
  Sinogram s = analytic_sinogram(unit_disk(), g);
  double first = 0.0;
  for (int n = 0; n < g.cells; ++n) first += s(0, n);
  for (int k = 1; k < g.views; ++k) {
    double m = 0.0;
    for (int n = 0; n < g.cells; ++n) m += s(k, n);
    REQUIRE(std::abs(m - first) <= 1e-9 * std::abs(first));
  }
  // row sums approximate the disk area in detector units
  CHECK(std::abs(first - kPi * 128.0 * 128.0) < 5e-4 * kPi * 128.0 * 128.0);
}

TEST_CASE("off-center phantom mass varies only at the aliasing level") {
  // detector sampling of the exact transform leaves ~1e-3 view-to-view
  // mass ripple for off-center ellipses; the integral itself is invariant
  const Geometry g{402, 256};
  Sinogram s = analytic_sinogram(shepp_logan(), g);
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < g.views; ++k) {
    double m = 0.0;
    for (int n = 0; n < g.cells; ++n) m += s(k, n);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  CHECK((hi - lo) / hi < 2e-3);
  CHECK((hi - lo) / hi > 1e-6);  // genuinely off-center: ripple is present
}

TEST_CASE("mirror-symmetric phantoms produce mirror-symmetric sinograms") {
  Phantom ph;
  ph.ellipses.push_back({0.0, 0.0, 0.8, 0.5, 0.0, 1.0});
  ph.ellipses.push_back({0.0, 0.0, 0.3, 0.2, 0.0, -0.5});
  const Geometry g{24, 32};
  Sinogram s = analytic_sinogram(ph, g);
  for (int k = 1; k < g.views; ++k)
    for (int n = 0; n < g.cells; ++n) {
      CHECK(s(k, n) == doctest::Approx(s(g.views - k, n)).epsilon(1e-9));  // x mirror
      CHECK(s(k, n) == doctest::Approx(s(k, g.cells - 1 - n)).epsilon(1e-9));  // y mirror
    }
}

TEST_CASE("forward of the rasterization converges to the analytic sinogram") {
  const Phantom sl = shepp_logan();
  double prev = 1e300;
  for (int P : {64, 128, 256}) {
    const Geometry g{180, P};
    Sinogram ref = analytic_sinogram(sl, g);
    ProjectorPair pair(ProjectorKind::SS, g);
    Sinogram got = pair.forward(rasterize(sl, P));
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < ref.size(); ++k) {
      const double d = got[k] - ref[k];
      num += d * d;
      den += ref[k] * ref[k];
    }
    const double rel = num / den;
    CHECK(rel < prev);
    prev = rel;
  }
  CHECK(prev < 1e-3);
}

}  // TEST_SUITE
