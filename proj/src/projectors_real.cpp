#include <algorithm>
#include <cmath>

#include "projectors_detail.hpp"

// Real-space projector kernels. Conventions from array.hpp:
//   pixel (i,j) center x = j-(P-1)/2, y = (P-1)/2-i; grid spans [-P/2, P/2]
//   ray for (theta, t): point t*(cos,sin) + s*(-sin,cos), s arc length
// The ray/pixel weight arithmetic is written once per kind and instantiated
// for both directions, which is what makes adjoint == transpose(forward).

namespace tomolab::detail {
namespace {

constexpr double kTiny = 1e-12;

// nearly-vertical branch for theta_k = k*pi/M: theta <= pi/4 or >= 3*pi/4,
// decided in integer arithmetic so the tie at pi/4 is deterministic
bool vertical_branch(int k, int M) { return 4 * k <= M || 4 * k >= 3 * M; }

template <bool Adj>
void pd_impl(const Geometry& g, ImageGrid& img, Sinogram& sino) {
  const int P = g.cells, N = g.cells, M = g.views;
  const double off = 0.5 * (N - 1);
  for (int k = 0; k < M; ++k) {
    const double th = g.angle(k);
    const double ct = std::cos(th), st = std::sin(th);
    for (int i = 0; i < P; ++i) {
      const double y = 0.5 * (P - 1) - i;
      const double base = y * st + off;
      for (int j = 0; j < P; ++j) {
        const double x = j - 0.5 * (P - 1);
        const double u = x * ct + base;  // t + (N-1)/2
        const double fl = std::floor(u);
        const int n0 = static_cast<int>(fl);
        const double w = u - fl;
        if (n0 >= 0 && n0 < N) {
          if constexpr (Adj) img(i, j) += (1.0 - w) * sino(k, n0);
          else sino(k, n0) += (1.0 - w) * img(i, j);
        }
        if (n0 + 1 >= 0 && n0 + 1 < N) {
          if constexpr (Adj) img(i, j) += w * sino(k, n0 + 1);
          else sino(k, n0 + 1) += w * img(i, j);
        }
      }
    }
  }
}

template <bool Adj>
void rd_impl(const Geometry& g, ImageGrid& img, Sinogram& sino) {
  const int P = g.cells, N = g.cells, M = g.views;
  const double hp = 0.5 * P;
  for (int k = 0; k < M; ++k) {
    const double th = g.angle(k);
    const double ct = std::cos(th), st = std::sin(th);
    if (std::abs(st) < kTiny) {
      // vertical rays: x = t*ct, unit length per row
      for (int n = 0; n < N; ++n) {
        const double u = g.cell_center(n) * ct + hp;
        if (u <= 0.0 || u >= static_cast<double>(P)) continue;
        int j = static_cast<int>(std::floor(u));
        if (static_cast<double>(j) == u) --j;  // on a gridline: lower-index cell
        for (int i = 0; i < P; ++i) {
          if constexpr (Adj) img(i, j) += sino(k, n);
          else sino(k, n) += img(i, j);
        }
      }
      continue;
    }
    if (std::abs(ct) < kTiny) {
      // horizontal rays: y = t*st, unit length per column
      for (int n = 0; n < N; ++n) {
        const double w = hp - g.cell_center(n) * st;
        if (w <= 0.0 || w >= static_cast<double>(P)) continue;
        int i = static_cast<int>(std::floor(w));
        if (static_cast<double>(i) == w) --i;
        for (int j = 0; j < P; ++j) {
          if constexpr (Adj) img(i, j) += sino(k, n);
          else sino(k, n) += img(i, j);
        }
      }
      continue;
    }
    const double dsu = 1.0 / std::abs(st);  // arc length per column crossing
    const double dsw = 1.0 / std::abs(ct);  // per row crossing
    const int dju = (st < 0.0) ? 1 : -1;    // du/ds = -st
    const int djw = (ct < 0.0) ? 1 : -1;    // dw/ds = -ct (w = hp - y)
    for (int n = 0; n < N; ++n) {
      const double t = g.cell_center(n);
      const double tc = t * ct, ts = t * st;
      // clip to the grid square via slab intervals in s
      const double sxa = (tc + hp) / st, sxb = (tc - hp) / st;
      const double sya = (hp - ts) / ct, syb = (-hp - ts) / ct;
      const double smin = std::max(std::min(sxa, sxb), std::min(sya, syb));
      const double smax = std::min(std::max(sxa, sxb), std::max(sya, syb));
      if (smin >= smax) continue;
      double u = tc - smin * st + hp;
      double w = hp - (ts + smin * ct);
      int ju = static_cast<int>(std::floor(u));
      if (dju < 0 && static_cast<double>(ju) == u) --ju;
      int jw = static_cast<int>(std::floor(w));
      if (djw < 0 && static_cast<double>(jw) == w) --jw;
      ju = std::clamp(ju, -1, P);
      jw = std::clamp(jw, -1, P);
      // s of the next boundary crossing along each axis
      double su = (tc - ((dju > 0 ? ju + 1 : ju) - hp)) / st;
      double sw = ((hp - (djw > 0 ? jw + 1 : jw)) - ts) / ct;
      double s = smin;
      double acc = 0.0;
      while (s < smax) {
        const double sn = std::min(su, sw);
        const double seg = std::min(sn, smax);
        const double len = seg - s;
        if (len > 0.0 && ju >= 0 && ju < P && jw >= 0 && jw < P) {
          if constexpr (Adj) img(jw, ju) += len * sino(k, n);
          else acc += len * img(jw, ju);
        }
        if (sn >= smax) break;
        if (su == sn) { ju += dju; su += dsu; }
        if (sw == sn) { jw += djw; sw += dsw; }
        s = seg;
      }
      if constexpr (!Adj) sino(k, n) += acc;
    }
  }
}

// distance-driven: pixel and detector-cell boundaries projected onto a
// common axis, contribution = boundary-overlap length on that axis
template <bool Adj>
void dd_impl(const Geometry& g, ImageGrid& img, Sinogram& sino) {
  const int P = g.cells, N = g.cells, M = g.views;
  const double hp = 0.5 * P, hn = 0.5 * N;
  for (int k = 0; k < M; ++k) {
    const double th = g.angle(k);
    const double ct = std::cos(th), st = std::sin(th);
    if (vertical_branch(k, M)) {
      // common axis x: map detector edges t_e = e - N/2 to x at each row
      const double inv = 1.0 / ct;
      const bool rev = ct < 0.0;
      for (int i = 0; i < P; ++i) {
        const double y = 0.5 * (P - 1) - i;
        const double base = -y * st;
        auto edge = [&](int m) {  // ascending-x boundary of cell slot m
          const int e = rev ? N - m : m;
          return (base + (e - hn)) * inv;
        };
        int a = 0, m = 0;
        double hi_a = 1.0 - hp;          // pixel a spans [a-hp, a+1-hp]
        double hi_m = edge(1);
        double cur = std::max(-hp, edge(0));
        while (a < P && m < N) {
          const double hi = std::min(hi_a, hi_m);
          if (hi > cur) {
            const int n = rev ? N - 1 - m : m;
            const double len = hi - cur;
            if constexpr (Adj) img(i, a) += len * sino(k, n);
            else sino(k, n) += len * img(i, a);
            cur = hi;
          }
          const double ha = hi_a, hm = hi_m;
          if (ha <= hm) { ++a; hi_a += 1.0; }
          if (hm <= ha) { ++m; hi_m = edge(m + 1); }
        }
      }
    } else {
      // common axis y (st >= sin(pi/4) > 0 here, mapping always ascending)
      const double inv = 1.0 / st;
      for (int j = 0; j < P; ++j) {
        const double x = j - 0.5 * (P - 1);
        const double base = -x * ct;
        auto edge = [&](int m) { return (base + (m - hn)) * inv; };
        int a = 0, m = 0;  // slot a is row i = P-1-a, spans y in [a-hp, a+1-hp]
        double hi_a = 1.0 - hp;
        double hi_m = edge(1);
        double cur = std::max(-hp, edge(0));
        while (a < P && m < N) {
          const double hi = std::min(hi_a, hi_m);
          if (hi > cur) {
            const double len = hi - cur;
            if constexpr (Adj) img(P - 1 - a, j) += len * sino(k, m);
            else sino(k, m) += len * img(P - 1 - a, j);
            cur = hi;
          }
          const double ha = hi_a, hm = hi_m;
          if (ha <= hm) { ++a; hi_a += 1.0; }
          if (hm <= ha) { ++m; hi_m = edge(m + 1); }
        }
      }
    }
  }
}

// slant stacking: per ray, walk rows (nearly-vertical) or columns
// (nearly-horizontal), linear interpolation at the ray abscissa, weighted by
// the per-row/column path length 1/|cos| resp. 1/|sin|
template <bool Adj>
void ss_impl(const Geometry& g, ImageGrid& img, Sinogram& sino) {
  const int P = g.cells, N = g.cells, M = g.views;
  const double cp = 0.5 * (P - 1);
  for (int k = 0; k < M; ++k) {
    const double th = g.angle(k);
    const double ct = std::cos(th), st = std::sin(th);
    if (vertical_branch(k, M)) {
      const double inv = 1.0 / ct;
      const double wgt = std::abs(inv);
      for (int n = 0; n < N; ++n) {
        const double t = g.cell_center(n);
        double acc = 0.0;
        for (int i = 0; i < P; ++i) {
          const double y = cp - i;
          const double u = (t - y * st) * inv + cp;  // column coordinate
          const double fl = std::floor(u);
          const int j0 = static_cast<int>(fl);
          const double w = u - fl;
          if (j0 >= 0 && j0 < P) {
            if constexpr (Adj) img(i, j0) += (1.0 - w) * wgt * sino(k, n);
            else acc += (1.0 - w) * img(i, j0);
          }
          if (j0 + 1 >= 0 && j0 + 1 < P) {
            if constexpr (Adj) img(i, j0 + 1) += w * wgt * sino(k, n);
            else acc += w * img(i, j0 + 1);
          }
        }
        if constexpr (!Adj) sino(k, n) += wgt * acc;
      }
    } else {
      const double inv = 1.0 / st;
      const double wgt = std::abs(inv);
      for (int n = 0; n < N; ++n) {
        const double t = g.cell_center(n);
        double acc = 0.0;
        for (int j = 0; j < P; ++j) {
          const double x = j - cp;
          const double r = cp - (t - x * ct) * inv;  // row coordinate
          const double fl = std::floor(r);
          const int i0 = static_cast<int>(fl);
          const double w = r - fl;
          if (i0 >= 0 && i0 < P) {
            if constexpr (Adj) img(i0, j) += (1.0 - w) * wgt * sino(k, n);
            else acc += (1.0 - w) * img(i0, j);
          }
          if (i0 + 1 >= 0 && i0 + 1 < P) {
            if constexpr (Adj) img(i0 + 1, j) += w * wgt * sino(k, n);
            else acc += w * img(i0 + 1, j);
          }
        }
        if constexpr (!Adj) sino(k, n) += wgt * acc;
      }
    }
  }
}

}  // namespace

void apply_pd(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino) {
  adjoint ? pd_impl<true>(g, img, sino) : pd_impl<false>(g, img, sino);
}
void apply_rd(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino) {
  adjoint ? rd_impl<true>(g, img, sino) : rd_impl<false>(g, img, sino);
}
void apply_dd(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino) {
  adjoint ? dd_impl<true>(g, img, sino) : dd_impl<false>(g, img, sino);
}
void apply_ss(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino) {
  adjoint ? ss_impl<true>(g, img, sino) : ss_impl<false>(g, img, sino);
}

}  // namespace tomolab::detail
