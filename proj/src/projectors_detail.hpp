#pragma once

#include <memory>

#include "tomolab/array.hpp"
#include "tomolab/projectors.hpp"

namespace tomolab::detail {

// Shared apply entry points. Forward accumulates into `sino`, adjoint into
// `img`; the untouched argument is read-only. Both directions of one kind
// run the same traversal code, so every weight is computed identically and
// the adjoint is the exact transpose of the forward matrix.
void apply_pd(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino);
void apply_rd(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino);
void apply_dd(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino);
void apply_ss(const Geometry& g, bool adjoint, ImageGrid& img, Sinogram& sino);

class GriddingPlan;
std::shared_ptr<const GriddingPlan> make_gridding_plan(ProjectorKind kind, const Geometry& g);
void apply_gridding(const GriddingPlan& plan, bool adjoint, ImageGrid& img, Sinogram& sino);

// Kernel profile value at |offset| <= half_width on the oversampled grid;
// exposed for the gridding unit tests.
double gridding_kernel(const GriddingParams& p, ProjectorKind kind, double d);

}  // namespace tomolab::detail
