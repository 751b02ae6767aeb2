#include "tomolab/phantom.hpp"

#include <cmath>

namespace tomolab {

bool Ellipse::contains(double x, double y) const {
  const double dx = x - x0, dy = y - y0;
  const double c = std::cos(phi), s = std::sin(phi);
  const double xr = dx * c + dy * s;
  const double yr = -dx * s + dy * c;
  const double u = xr / a, v = yr / b;
  return u * u + v * v <= 1.0;
}

Phantom shepp_logan() {
  const double d = kPi / 180.0;
  Phantom ph;
  ph.ellipses = {
      {0.0, 0.0, 0.69, 0.92, 0.0, 2.0},
      {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98},
      {0.22, 0.0, 0.11, 0.31, -18.0 * d, -0.02},
      {-0.22, 0.0, 0.16, 0.41, 18.0 * d, -0.02},
      {0.0, 0.35, 0.21, 0.25, 0.0, 0.01},
      {0.0, 0.1, 0.046, 0.046, 0.0, 0.01},
      {0.0, -0.1, 0.046, 0.046, 0.0, 0.01},
      {-0.08, -0.605, 0.046, 0.023, 0.0, 0.01},
      {0.0, -0.605, 0.023, 0.023, 0.0, 0.01},
      {0.06, -0.605, 0.023, 0.046, 0.0, 0.01},
  };
  return ph;
}

ImageGrid rasterize(const Phantom& ph, int P) {
  if (P < 8) throw std::invalid_argument("rasterize: P >= 8 required");
  ImageGrid img(P, P);
  const double inv = 2.0 / P;  // pixel units -> normalized units
  for (int i = 0; i < P; ++i) {
    const double y = img.pixel_y(i) * inv;
    for (int j = 0; j < P; ++j) {
      const double x = img.pixel_x(j) * inv;
      double v = 0.0;
      for (const Ellipse& e : ph.ellipses)
        if (e.contains(x, y)) v += e.rho;
      img(i, j) = v;
    }
  }
  return img;
}

double analytic_line_integral(const Phantom& ph, double theta, double t, double scale) {
  const double tn = t / scale;
  double v = 0.0;
  for (const Ellipse& e : ph.ellipses) {
    const double tp = tn - e.x0 * std::cos(theta) - e.y0 * std::sin(theta);
    const double th = theta - e.phi;
    const double ct = std::cos(th), st = std::sin(th);
    const double a2 = e.a * e.a * ct * ct + e.b * e.b * st * st;
    const double d2 = a2 - tp * tp;
    if (d2 > 0.0) v += 2.0 * e.rho * e.a * e.b * std::sqrt(d2) / a2;
  }
  return scale * v;
}

Sinogram analytic_sinogram(const Phantom& ph, const Geometry& g, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("analytic_sinogram: scale must be positive");
  Sinogram s(g);
  for (int k = 0; k < g.views; ++k) {
    const double theta = g.angle(k);
    for (int n = 0; n < g.cells; ++n)
      s(k, n) = analytic_line_integral(ph, theta, g.cell_center(n), scale);
  }
  return s;
}

Sinogram analytic_sinogram(const Phantom& ph, const Geometry& g) {
  return analytic_sinogram(ph, g, 0.5 * g.cells);
}

}  // namespace tomolab
