#pragma once

#include <vector>

#include "tomolab/array.hpp"
#include "tomolab/projectors.hpp"
#include "tomolab/rng.hpp"

namespace tomolab {

// Inner-product audit of a forward/adjoint pairing:
//   r = <adjoint(y), x> / <y, forward(x)>
// r = 1 to roundoff iff the adjoint is the transpose of the forward.
struct CouplingReport {
  ProjectorKind forward_kind;
  ProjectorKind adjoint_kind;
  std::vector<double> ratios;  // one per seed

  double max_abs_r_minus_1() const;
  double digits_of_agreement() const;  // -log10(max |r-1|)
};

// Single randomized probe; x, y i.i.d. uniform on [-1,1]. A zero denominator
// is resampled once, then rejected.
double adjoint_ratio(ProjectorKind fwd, ProjectorKind adj, const Geometry& g,
                     SeededRng& rng);

// Full 6x6 sweep. Each pairing derives its own stream from
// (seed, fwd, adj), so evaluation order cannot change any ratio.
std::vector<CouplingReport> coupling_matrix(const Geometry& g,
                                            const std::vector<uint64_t>& seeds);

std::string coupling_csv(const std::vector<CouplingReport>& reports);

}  // namespace tomolab
