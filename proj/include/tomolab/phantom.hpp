#pragma once

#include <vector>

#include "tomolab/array.hpp"

namespace tomolab {

// Ellipse in normalized [-1,1]^2 coordinates. Overlapping ellipses add:
// intensities are differential contrasts.
struct Ellipse {
  double x0 = 0.0, y0 = 0.0;   // center
  double a = 1.0, b = 1.0;     // semi-axes along the (rotated) x/y directions
  double phi = 0.0;            // rotation, radians, counterclockwise
  double rho = 1.0;            // additive intensity

  bool contains(double x, double y) const;
};

struct Phantom {
  std::vector<Ellipse> ellipses;
};

// The classic ten-ellipse head phantom with the original contrast values
// (outer shell 2.0, not the low-contrast display variant).
Phantom shepp_logan();

// Pixel-center sampling of the additive ellipse stack; the unit square
// [-1,1]^2 maps onto the P x P grid, so the phantom's unit circle has
// radius P/2 in pixel units.
ImageGrid rasterize(const Phantom& ph, int P);

// Exact line integrals on the (theta_k, t_n) lattice. `scale` converts
// normalized phantom units to detector units; the default N/2 inscribes the
// phantom's unit circle in the detector row, so nothing is truncated.
Sinogram analytic_sinogram(const Phantom& ph, const Geometry& g, double scale);
Sinogram analytic_sinogram(const Phantom& ph, const Geometry& g);

// Single line integral (used by the quadrature cross-checks in the tests).
double analytic_line_integral(const Phantom& ph, double theta, double t, double scale);

}  // namespace tomolab
