#include "tomolab/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tomolab {

double mse(const std::vector<double>& f, const std::vector<double>& r,
           const std::vector<double>* mask) {
  if (f.size() != r.size() || (mask && mask->size() != f.size()))
    throw std::invalid_argument("mse: shape mismatch");
  double s = 0.0, cnt = 0.0;
  for (size_t k = 0; k < f.size(); ++k) {
    if (mask) {
      const double w = (*mask)[k];
      if (w == 0.0) continue;
      cnt += 1.0;
      const double d = f[k] - r[k];
      s += d * d;
    } else {
      const double d = f[k] - r[k];
      s += d * d;
    }
  }
  if (!mask) cnt = static_cast<double>(f.size());
  if (cnt == 0.0) throw std::invalid_argument("mse: empty mask");
  return s / cnt;
}

double mse(const ImageGrid& f, const ImageGrid& r, const ImageGrid* mask) {
  return mse(f.vec(), r.vec(), mask ? &mask->vec() : nullptr);
}
double mse(const Sinogram& f, const Sinogram& r) { return mse(f.vec(), r.vec()); }

double psnr(const std::vector<double>& f, const std::vector<double>& r,
            const std::vector<double>* mask) {
  const double e = mse(f, r, mask);
  double peak = 0.0;
  bool any = false;
  for (size_t k = 0; k < r.size(); ++k) {
    if (mask && (*mask)[k] == 0.0) continue;
    peak = any ? std::max(peak, r[k]) : r[k];
    any = true;
  }
  if (!any || peak == 0.0) throw std::invalid_argument("psnr: zero reference");
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / e);
}

double psnr(const ImageGrid& f, const ImageGrid& r, const ImageGrid* mask) {
  return psnr(f.vec(), r.vec(), mask ? &mask->vec() : nullptr);
}
double psnr(const Sinogram& f, const Sinogram& r) { return psnr(f.vec(), r.vec()); }

long long sample_poisson(SeededRng& rng, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("sample_poisson: negative rate");
  if (lambda == 0.0) return 0;
  if (lambda < 30.0) {
    // Knuth product method
    const double limit = std::exp(-lambda);
    long long n = 0;
    double prod = rng.uniform_double();
    while (prod > limit) {
      ++n;
      prod *= rng.uniform_double();
    }
    return n;
  }
  // Hormann's PTRS transformed rejection; valid for lambda >= ~10
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform_double() - 0.5;
    const double v = rng.uniform_double();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -lambda + kf * std::log(lambda) - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<long long>(kf);
  }
}

Sinogram add_poisson_noise(const Sinogram& s, double sigma_fraction, SeededRng& rng) {
  if (sigma_fraction <= 0.0)
    throw std::invalid_argument("add_poisson_noise: sigma_fraction must be positive");
  double m = 0.0;
  for (size_t k = 0; k < s.size(); ++k) m += s[k];
  m /= static_cast<double>(s.size());
  if (m <= 0.0) throw std::invalid_argument("add_poisson_noise: nonpositive mean");
  const double c = 1.0 / (sigma_fraction * sigma_fraction * m);
  Sinogram out(s.geom());
  for (size_t k = 0; k < s.size(); ++k)
    out[k] = static_cast<double>(sample_poisson(rng, c * std::max(s[k], 0.0))) / c;
  return out;
}

}  // namespace tomolab
