#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace tomolab {

// Shared geometry conventions, used verbatim by every projector:
//   pixel (i,j) of a P x Q image has center x = j - (P-1)/2, y = (Q-1)/2 - i
//   detector cell n of an N-cell row has center t = n - (N-1)/2
//   view k of M views has angle theta_k = k*pi/M, theta in [0, pi)
//   spacing is 1 in both domains; images are square in all experiments
// Ray direction for angle theta is (-sin theta, cos theta); the detector
// axis is (cos theta, sin theta), so t = x*cos(theta) + y*sin(theta).

inline constexpr double kPi = std::numbers::pi_v<double>;

struct Geometry {
  int views = 0;  // M
  int cells = 0;  // N

  double angle(int k) const { return kPi * k / views; }
  double cell_center(int n) const { return n - 0.5 * (cells - 1); }
};

namespace detail {
// Validated before any allocation, so a negative extent cannot wrap into a
// huge unsigned vector size.
inline size_t checked_extent(int rows, int cols, const char* who) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument(std::string(who) + ": non-positive shape");
  return static_cast<size_t>(rows) * cols;
}
}  // namespace detail

// Row-major 2-D double buffer. Used for both images (height x width) and,
// via Sinogram below, stacks of detector rows (views x cells).
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int height, int width, double fill = 0.0)
      : height_(height), width_(width),
        data_(detail::checked_extent(height, width, "ImageGrid"), fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  size_t size() const { return data_.size(); }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * width_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * width_ + j]; }
  double& operator[](size_t k) { return data_[k]; }
  double operator[](size_t k) const { return data_[k]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  // center of pixel (i,j) in the common coordinate frame
  double pixel_x(int j) const { return j - 0.5 * (width_ - 1); }
  double pixel_y(int i) const { return 0.5 * (height_ - 1) - i; }

  bool same_shape(const ImageGrid& o) const {
    return height_ == o.height_ && width_ == o.width_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

class Sinogram {
 public:
  Sinogram() = default;
  Sinogram(int views, int cells, double fill = 0.0)
      : geom_{views, cells},
        data_(detail::checked_extent(views, cells, "Sinogram"), fill) {}
  explicit Sinogram(Geometry g, double fill = 0.0) : Sinogram(g.views, g.cells, fill) {}

  int views() const { return geom_.views; }
  int cells() const { return geom_.cells; }
  const Geometry& geom() const { return geom_; }
  size_t size() const { return data_.size(); }

  double& operator()(int k, int n) { return data_[static_cast<size_t>(k) * geom_.cells + n]; }
  double operator()(int k, int n) const { return data_[static_cast<size_t>(k) * geom_.cells + n]; }
  double& operator[](size_t k) { return data_[k]; }
  double operator[](size_t k) const { return data_[k]; }

  double* row(int k) { return data_.data() + static_cast<size_t>(k) * geom_.cells; }
  const double* row(int k) const { return data_.data() + static_cast<size_t>(k) * geom_.cells; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  bool same_shape(const Sinogram& o) const {
    return geom_.views == o.geom_.views && geom_.cells == o.geom_.cells;
  }

 private:
  Geometry geom_;
  std::vector<double> data_;
};

// 1 inside the inscribed reconstruction circle (radius (P-1)/2 about the
// image center), 0 outside. Comparisons between reconstructions and the
// phantom are restricted to this support.
ImageGrid reconstruction_circle_mask(int size);

// A scan is undersampled when the view count is below the parallel-beam
// sampling requirement M >= N*pi/2, rounded to a whole view count.
bool is_undersampled(const Geometry& g);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

}  // namespace tomolab
