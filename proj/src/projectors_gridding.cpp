#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "projectors_detail.hpp"
#include "tomolab/fft.hpp"

// Fourier gridding projectors. Forward: deapodize, zero-pad to G x G,
// FFT2, re-center phases, gather polar slices through a compact kernel,
// per-angle inverse FFT, read the detector samples (the padded lattice is
// chosen so detector cells land on integer positions). Adjoint runs the
// conjugate-transpose of every stage in reverse order with the same kernel
// weights, so the pair is an exact transpose up to roundoff.

namespace tomolab::detail {
namespace {

constexpr int kLutPerUnit = 4096;

// modified Bessel I0 by power series; pure arithmetic, converges for the
// argument range used here (|x| <= beta ~ 31)
double bessel_i0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// prolate spheroidal wavefunction psi_0 at bandwidth c = 6*pi, unit-
// normalized, as a Chebyshev fit in t = x^2 (max error ~3e-12 on [0,1])
double pswf_6pi(double x) {
  static const double c[17] = {
      0.1890988354512915,     -0.3374211285085319,    0.2400643037034663,
      -0.1369103638503027,    0.06307750530592011,    -0.02369985178402519,
      0.007337071835646845,   -0.0018913672633254993, 0.00041019230615966926,
      -7.558598820999245e-05, 1.194435172942063e-05,  -1.6326533006502086e-06,
      1.9457783532344469e-07, -2.036742192822277e-08, 1.8854699227307624e-09,
      -1.5495542066572578e-10, 1.1825639682832118e-11};
  const double u = 2.0 * x * x - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (int k = 16; k >= 1; --k) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

double kernel_value(const GriddingParams& p, ProjectorKind kind, double d) {
  const double x = std::abs(d) / p.half_width;
  if (x > 1.0) return 0.0;
  if (kind == ProjectorKind::WF) return pswf_6pi(x);
  const double arg = p.shape * std::sqrt(std::max(0.0, 1.0 - x * x));
  return bessel_i0(arg) / bessel_i0(p.shape);
}

int signed_freq(int b, int G) { return b <= G / 2 ? b : b - G; }

}  // namespace

double gridding_kernel(const GriddingParams& p, ProjectorKind kind, double d) {
  return kernel_value(p, kind, d);
}

class GriddingPlan {
 public:
  ProjectorKind kind;
  Geometry geom;
  GriddingParams params;
  int P = 0, G = 0, off = 0;
  std::vector<double> lut;       // kernel on [0, W], linear interpolation
  double lut_scale = 0.0;
  std::vector<double> deapod;    // per-axis image-domain compensation
  std::vector<cplx> phase;       // e^{+2*pi*i * m(b) * c / G}, c = (G-1)/2

  double kernel(double d) const {
    const double a = std::abs(d) * lut_scale;
    const auto i = static_cast<size_t>(a);
    if (i + 1 >= lut.size()) return 0.0;
    const double f = a - static_cast<double>(i);
    return lut[i] + f * (lut[i + 1] - lut[i]);
  }
};

std::shared_ptr<const GriddingPlan> make_gridding_plan(ProjectorKind kind, const Geometry& g) {
  auto plan = std::make_shared<GriddingPlan>();
  plan->kind = kind;
  plan->geom = g;
  plan->params = default_gridding(kind);
  const GriddingParams& prm = plan->params;
  const int N = g.cells;
  plan->P = N;
  plan->G = static_cast<int>(next_pow2(
      static_cast<size_t>(std::ceil(prm.oversampling * N))));
  plan->off = (plan->G - N) / 2;

  const int W = prm.half_width;
  const int L = W * kLutPerUnit;
  plan->lut.resize(L + 2);
  plan->lut_scale = kLutPerUnit;
  for (int i = 0; i <= L; ++i)
    plan->lut[i] = kernel_value(prm, kind, static_cast<double>(i) / kLutPerUnit);
  plan->lut[L + 1] = 0.0;

  // image-domain kernel transform via Simpson; deapodizer is its floored
  // reciprocal (invariant: strictly positive over the image support)
  const int S = 8192;
  const double h = static_cast<double>(W) / S;
  std::vector<double> ksamp(S + 1);
  for (int i = 0; i <= S; ++i) ksamp[i] = kernel_value(prm, kind, i * h);
  auto khat = [&](double xi) {
    const double wfreq = 2.0 * kPi * xi / plan->G;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < S; i += 2) odd += ksamp[i] * std::cos(wfreq * (i * h));
    for (int i = 2; i < S; i += 2) even += ksamp[i] * std::cos(wfreq * (i * h));
    const double integral =
        (h / 3.0) * (ksamp[0] + 4.0 * odd + 2.0 * even + ksamp[S] * std::cos(wfreq * W));
    return 2.0 * integral;  // kernel is even in d
  };
  plan->deapod.resize(N);
  const double k0 = khat(0.0);
  for (int q = 0; q < N; ++q) {
    const double xi = q - 0.5 * (N - 1);
    plan->deapod[q] = 1.0 / std::max(khat(xi), 1e-8 * k0);
  }

  plan->phase.resize(plan->G);
  const double cg = 0.5 * (plan->G - 1);
  for (int b = 0; b < plan->G; ++b) {
    const double a = 2.0 * kPi * signed_freq(b, plan->G) * cg / plan->G;
    plan->phase[b] = cplx(std::cos(a), std::sin(a));
  }
  return plan;
}

namespace {

struct Taps {
  int count = 0;
  int idx[16];     // wrapped bin indices
  double w[16];    // kernel weights
};

void make_taps(const GriddingPlan& pl, double p, Taps& t) {
  const int W = pl.params.half_width;
  const int lo = static_cast<int>(std::ceil(p - W));
  const int hi = static_cast<int>(std::floor(p + W));
  const int G = pl.G;
  t.count = 0;
  for (int m = lo; m <= hi; ++m) {
    int b = m % G;
    if (b < 0) b += G;
    t.idx[t.count] = b;
    t.w[t.count] = pl.kernel(m - p);
    ++t.count;
  }
}

}  // namespace

void apply_gridding(const GriddingPlan& pl, bool adjoint, ImageGrid& img, Sinogram& sino) {
  const int P = pl.P, G = pl.G, off = pl.off, N = pl.geom.cells, M = pl.geom.views;
  const size_t GG = static_cast<size_t>(G) * G;
  std::vector<cplx> grid2(GG, cplx(0.0, 0.0));
  std::vector<cplx> row(static_cast<size_t>(G));
  Taps tx, ty;
  const double invG = 1.0 / G;

  if (!adjoint) {
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j)
        grid2[static_cast<size_t>(i + off) * G + (j + off)] =
            img(i, j) * pl.deapod[i] * pl.deapod[j];
    fft2(grid2, static_cast<size_t>(G), false);
    for (int b1 = 0; b1 < G; ++b1) {
      const cplx ph1 = pl.phase[b1];
      cplx* r = grid2.data() + static_cast<size_t>(b1) * G;
      for (int b2 = 0; b2 < G; ++b2) r[b2] *= ph1 * pl.phase[b2];
    }
    for (int k = 0; k < M; ++k) {
      const double th = pl.geom.angle(k);
      const double ct = std::cos(th), st = std::sin(th);
      for (int r = 0; r < G; ++r) {
        const int mr = signed_freq(r, G);
        make_taps(pl, -mr * st, tx);  // first grid axis runs along -y
        make_taps(pl, mr * ct, ty);
        cplx s(0.0, 0.0);
        for (int a = 0; a < tx.count; ++a) {
          const cplx* line = grid2.data() + static_cast<size_t>(tx.idx[a]) * G;
          cplx acc(0.0, 0.0);
          for (int b = 0; b < ty.count; ++b) acc += ty.w[b] * line[ty.idx[b]];
          s += tx.w[a] * acc;
        }
        row[r] = s * std::conj(pl.phase[r]);
      }
      ifft(row);
      for (int n = 0; n < N; ++n) sino(k, n) += row[n + off].real();
    }
  } else {
    for (int k = 0; k < M; ++k) {
      std::fill(row.begin(), row.end(), cplx(0.0, 0.0));
      for (int n = 0; n < N; ++n) row[n + off] = sino(k, n);
      fft(row);
      const double th = pl.geom.angle(k);
      const double ct = std::cos(th), st = std::sin(th);
      for (int r = 0; r < G; ++r) {
        const cplx s = row[r] * invG * pl.phase[r];
        if (s == cplx(0.0, 0.0)) continue;
        const int mr = signed_freq(r, G);
        make_taps(pl, -mr * st, tx);
        make_taps(pl, mr * ct, ty);
        for (int a = 0; a < tx.count; ++a) {
          cplx* line = grid2.data() + static_cast<size_t>(tx.idx[a]) * G;
          const cplx sa = tx.w[a] * s;
          for (int b = 0; b < ty.count; ++b) line[ty.idx[b]] += ty.w[b] * sa;
        }
      }
    }
    for (int b1 = 0; b1 < G; ++b1) {
      const cplx ph1 = std::conj(pl.phase[b1]);
      cplx* r = grid2.data() + static_cast<size_t>(b1) * G;
      for (int b2 = 0; b2 < G; ++b2) r[b2] *= ph1 * std::conj(pl.phase[b2]);
    }
    fft2(grid2, static_cast<size_t>(G), true);
    const double gg = static_cast<double>(G) * G;
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j)
        img(i, j) += gg * grid2[static_cast<size_t>(i + off) * G + (j + off)].real() *
                     pl.deapod[i] * pl.deapod[j];
  }
}

}  // namespace tomolab::detail
