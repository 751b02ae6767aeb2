#pragma once

#include <string_view>

#include "tomolab/array.hpp"
#include "tomolab/projectors.hpp"

namespace tomolab {

enum class FilterKind { RAMP, SHLO, HANN, PARZ };

const char* to_token(FilterKind f);
FilterKind filter_from_token(std::string_view token);

inline constexpr std::array<FilterKind, 4> kAllFilters = {
    FilterKind::RAMP, FilterKind::SHLO, FilterKind::HANN, FilterKind::PARZ};

// Row-wise Fourier ramp filtering: zero-pad to L = next power of two >= 2N,
// multiply by |nu|*window(nu) over nu in cycles/sample (Nyquist 1/2),
// truncate back to N. The RAMP impulse response is the band-limited ramp
// kernel h[0] = 1/4, h[odd n] = -1/(pi n)^2, h[even] = 0.
Sinogram filter_sinogram(const Sinogram& s, FilterKind f);

// adjoint(filter_sinogram(s)) * pi/M, circle-masked. The pi/M factor makes
// the composite equal to the [0,pi) view-average form of the inversion
// formula, so absolute densities are recovered.
ImageGrid fbp_reconstruct(const Sinogram& s, ProjectorKind adj_kind, FilterKind f);

}  // namespace tomolab
