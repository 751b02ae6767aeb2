#include "tomolab/fbp.hpp"

#include <cmath>
#include <stdexcept>

#include "tomolab/fft.hpp"

namespace tomolab {

const char* to_token(FilterKind f) {
  switch (f) {
    case FilterKind::RAMP: return "ramp";
    case FilterKind::SHLO: return "shlo";
    case FilterKind::HANN: return "hann";
    case FilterKind::PARZ: return "parz";
  }
  throw std::logic_error("bad filter");
}

FilterKind filter_from_token(std::string_view token) {
  for (FilterKind f : kAllFilters)
    if (token == to_token(f)) return f;
  throw std::invalid_argument("unknown filter '" + std::string(token) +
                              "' (expected ramp|shlo|hann|parz)");
}

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double p = kPi * x;
  return std::sin(p) / p;
}

// window on u = |nu| / nu_Nyquist in [0,1]
double window_value(FilterKind f, double u) {
  switch (f) {
    case FilterKind::RAMP: return 1.0;
    case FilterKind::SHLO: return sinc(0.5 * u);
    case FilterKind::HANN: return 0.5 * (1.0 + std::cos(kPi * u));
    case FilterKind::PARZ: {
      // cubic B-spline transform, first zero at the band edge
      const double w = sinc(u);
      return w * w * w * w;
    }
  }
  return 1.0;
}

}  // namespace

Sinogram filter_sinogram(const Sinogram& s, FilterKind f) {
  const int N = s.cells(), M = s.views();
  const size_t L = next_pow2(static_cast<size_t>(2) * N);
  std::vector<double> gain(L / 2 + 1);
  for (size_t q = 0; q <= L / 2; ++q) {
    const double nu = static_cast<double>(q) / L;  // cycles/sample, <= 1/2
    gain[q] = nu * window_value(f, 2.0 * nu);
  }
  Sinogram out(s.geom());
  std::vector<cplx> row(L);
  for (int k = 0; k < M; ++k) {
    std::fill(row.begin(), row.end(), cplx(0.0, 0.0));
    for (int n = 0; n < N; ++n) row[n] = s(k, n);
    fft(row);
    for (size_t q = 0; q < L; ++q) {
      const size_t m = q <= L / 2 ? q : L - q;
      row[q] *= gain[m];
    }
    ifft(row);
    for (int n = 0; n < N; ++n) out(k, n) = row[n].real();
  }
  return out;
}

ImageGrid fbp_reconstruct(const Sinogram& s, ProjectorKind adj_kind, FilterKind f) {
  const ProjectorPair pair(adj_kind, s.geom());
  ImageGrid img = pair.adjoint(filter_sinogram(s, f));
  const ImageGrid mask = reconstruction_circle_mask(img.width());
  const double scale = kPi / s.views();
  for (size_t k = 0; k < img.size(); ++k) img[k] *= scale * mask[k];
  return img;
}

}  // namespace tomolab
