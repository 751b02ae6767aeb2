#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tomolab/array.hpp"

namespace tomolab {

enum class ProjectorKind { PD, RD, DD, SS, WF, KB };

inline constexpr std::array<ProjectorKind, 6> kAllKinds = {
    ProjectorKind::PD, ProjectorKind::RD, ProjectorKind::DD,
    ProjectorKind::SS, ProjectorKind::WF, ProjectorKind::KB};

const char* to_token(ProjectorKind k);
ProjectorKind kind_from_token(std::string_view token);
bool is_gridding(ProjectorKind k);

// Fourier gridding configuration. `shape` is the Kaiser-Bessel beta for KB
// and the prolate bandwidth product c for WF.
struct GriddingParams {
  double oversampling = 2.0;
  int half_width = 7;
  double shape = 0.0;
};

GriddingParams default_gridding(ProjectorKind k);

namespace detail {
class GriddingPlan;
}

// One forward/adjoint pair over a fixed geometry with square images,
// P = geometry.cells. adjoint() is the exact matrix transpose of forward():
// the two share every weight computation, so matched pairs satisfy the
// inner-product identity to roundoff.
class ProjectorPair {
 public:
  ProjectorPair(ProjectorKind kind, Geometry g);
  ~ProjectorPair();
  ProjectorPair(const ProjectorPair&);
  ProjectorPair(ProjectorPair&&) noexcept;
  ProjectorPair& operator=(const ProjectorPair&);
  ProjectorPair& operator=(ProjectorPair&&) noexcept;

  ProjectorKind kind() const { return kind_; }
  const Geometry& geom() const { return geom_; }
  int image_size() const { return geom_.cells; }

  Sinogram forward(const ImageGrid& img) const;
  ImageGrid adjoint(const Sinogram& sino) const;

  // Dense (M*N) x (P*P) matrix by unit-basis probing of forward; row-major.
  // Guarded to small instances.
  std::vector<double> assemble_dense() const;
  // Same shape, probed through adjoint (transposed while assembling), so it
  // is directly comparable with assemble_dense().
  std::vector<double> assemble_dense_via_adjoint() const;

 private:
  ProjectorKind kind_;
  Geometry geom_;
  std::shared_ptr<const detail::GriddingPlan> plan_;  // WF/KB only
};

}  // namespace tomolab
