#include "tomolab/array.hpp"

#include <cmath>

namespace tomolab {

ImageGrid reconstruction_circle_mask(int size) {
  ImageGrid m(size, size);
  const double r = 0.5 * (size - 1);
  const double r2 = r * r;
  for (int i = 0; i < size; ++i) {
    const double y = m.pixel_y(i);
    for (int j = 0; j < size; ++j) {
      const double x = m.pixel_x(j);
      m(i, j) = (x * x + y * y <= r2) ? 1.0 : 0.0;
    }
  }
  return m;
}

bool is_undersampled(const Geometry& g) {
  // The threshold is quoted as M >= N*pi/2 but applied after rounding to a
  // whole view count, so 402 views at N = 256 still count as well sampled.
  return g.views < std::lround(g.cells * kPi / 2.0);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(const std::vector<double>& a) { return dot(a, a); }

}  // namespace tomolab
