#include "tomolab/projectors.hpp"

#include <cmath>
#include <stdexcept>

#include "projectors_detail.hpp"

namespace tomolab {

const char* to_token(ProjectorKind k) {
  switch (k) {
    case ProjectorKind::PD: return "pd";
    case ProjectorKind::RD: return "rd";
    case ProjectorKind::DD: return "dd";
    case ProjectorKind::SS: return "ss";
    case ProjectorKind::WF: return "wf";
    case ProjectorKind::KB: return "kb";
  }
  throw std::logic_error("bad kind");
}

ProjectorKind kind_from_token(std::string_view token) {
  for (ProjectorKind k : kAllKinds)
    if (token == to_token(k)) return k;
  throw std::invalid_argument("unknown projector kind '" + std::string(token) +
                              "' (expected pd|rd|dd|ss|wf|kb)");
}

bool is_gridding(ProjectorKind k) {
  return k == ProjectorKind::WF || k == ProjectorKind::KB;
}

GriddingParams default_gridding(ProjectorKind k) {
  GriddingParams p;
  p.half_width = 7;
  if (k == ProjectorKind::WF) {
    p.oversampling = 2.0;
    p.shape = 6.0 * kPi;  // prolate bandwidth product
  } else {
    p.oversampling = 1.5;
    // standard oversampling-dependent Kaiser-Bessel beta for a
    // (2W+1)-tap kernel
    const double taps = 2.0 * p.half_width + 1.0;
    const double q = taps / p.oversampling * (p.oversampling - 0.5);
    p.shape = kPi * std::sqrt(q * q - 0.8);
  }
  return p;
}

ProjectorPair::ProjectorPair(ProjectorKind kind, Geometry g) : kind_(kind), geom_(g) {
  if (g.views < 1 || g.cells < 1)
    throw std::invalid_argument("ProjectorPair: empty geometry");
  if (is_gridding(kind)) plan_ = detail::make_gridding_plan(kind, g);
}

ProjectorPair::~ProjectorPair() = default;
ProjectorPair::ProjectorPair(const ProjectorPair&) = default;
ProjectorPair::ProjectorPair(ProjectorPair&&) noexcept = default;
ProjectorPair& ProjectorPair::operator=(const ProjectorPair&) = default;
ProjectorPair& ProjectorPair::operator=(ProjectorPair&&) noexcept = default;

namespace {

void apply(ProjectorKind kind, const detail::GriddingPlan* plan, const Geometry& g,
           bool adjoint, ImageGrid& img, Sinogram& sino) {
  switch (kind) {
    case ProjectorKind::PD: detail::apply_pd(g, adjoint, img, sino); return;
    case ProjectorKind::RD: detail::apply_rd(g, adjoint, img, sino); return;
    case ProjectorKind::DD: detail::apply_dd(g, adjoint, img, sino); return;
    case ProjectorKind::SS: detail::apply_ss(g, adjoint, img, sino); return;
    case ProjectorKind::WF:
    case ProjectorKind::KB: detail::apply_gridding(*plan, adjoint, img, sino); return;
  }
}

}  // namespace

Sinogram ProjectorPair::forward(const ImageGrid& img) const {
  if (img.height() != geom_.cells || img.width() != geom_.cells)
    throw std::invalid_argument("forward: image must be P x P with P = cells");
  Sinogram out(geom_);
  apply(kind_, plan_.get(), geom_, false, const_cast<ImageGrid&>(img), out);
  return out;
}

ImageGrid ProjectorPair::adjoint(const Sinogram& sino) const {
  if (!(sino.views() == geom_.views && sino.cells() == geom_.cells))
    throw std::invalid_argument("adjoint: sinogram does not match geometry");
  ImageGrid out(geom_.cells, geom_.cells);
  apply(kind_, plan_.get(), geom_, true, out, const_cast<Sinogram&>(sino));
  return out;
}

std::vector<double> ProjectorPair::assemble_dense() const {
  const size_t P = geom_.cells, rows = static_cast<size_t>(geom_.views) * geom_.cells;
  const size_t cols = P * P;
  if (rows * cols > (1ull << 26))
    throw std::invalid_argument("assemble_dense: instance too large");
  std::vector<double> mat(rows * cols, 0.0);
  ImageGrid basis(geom_.cells, geom_.cells);
  for (size_t j = 0; j < cols; ++j) {
    basis[j] = 1.0;
    Sinogram col = forward(basis);
    basis[j] = 0.0;
    for (size_t r = 0; r < rows; ++r) mat[r * cols + j] = col[r];
  }
  return mat;
}

std::vector<double> ProjectorPair::assemble_dense_via_adjoint() const {
  const size_t P = geom_.cells, rows = static_cast<size_t>(geom_.views) * geom_.cells;
  const size_t cols = P * P;
  if (rows * cols > (1ull << 26))
    throw std::invalid_argument("assemble_dense: instance too large");
  std::vector<double> mat(rows * cols, 0.0);
  Sinogram basis(geom_);
  for (size_t r = 0; r < rows; ++r) {
    basis[r] = 1.0;
    ImageGrid row = adjoint(basis);
    basis[r] = 0.0;
    for (size_t j = 0; j < cols; ++j) mat[r * cols + j] = row[j];
  }
  return mat;
}

}  // namespace tomolab
