#pragma once

#include <cmath>
#include <vector>

#include "tomolab/array.hpp"
#include "tomolab/rng.hpp"

namespace tomolab::testing {

inline ImageGrid random_image(int height, int width, SeededRng& rng,
                              double lo = -1.0, double hi = 1.0) {
  ImageGrid img(height, width);
  for (size_t k = 0; k < img.size(); ++k) img[k] = rng.uniform(lo, hi);
  return img;
}

inline Sinogram random_sinogram(const Geometry& g, SeededRng& rng,
                                double lo = -1.0, double hi = 1.0) {
  Sinogram s(g);
  for (size_t k = 0; k < s.size(); ++k) s[k] = rng.uniform(lo, hi);
  return s;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace tomolab::testing
