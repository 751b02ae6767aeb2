#include "tomolab/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tomolab {
namespace {

void transform(cplx* a, size_t n, size_t stride, bool inverse) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft: length must be a power of two");
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i * stride], a[j * stride]);
  }
  const double sgn = inverse ? 1.0 : -1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sgn * 2.0 * std::numbers::pi_v<double> / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        cplx u = a[(i + k) * stride];
        cplx v = a[(i + k + len / 2) * stride] * w;
        a[(i + k) * stride] = u + v;
        a[(i + k + len / 2) * stride] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) a[i * stride] *= inv;
  }
}

}  // namespace

void fft(std::vector<cplx>& a) { transform(a.data(), a.size(), 1, false); }
void ifft(std::vector<cplx>& a) { transform(a.data(), a.size(), 1, true); }

void fft_stride(cplx* a, size_t n, size_t stride, bool inverse) {
  transform(a, n, stride, inverse);
}

void fft2(std::vector<cplx>& a, size_t n, bool inverse) {
  if (a.size() != n * n) throw std::invalid_argument("fft2: size mismatch");
  for (size_t i = 0; i < n; ++i) transform(a.data() + i * n, n, 1, inverse);
  for (size_t j = 0; j < n; ++j) transform(a.data() + j, n, n, inverse);
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace tomolab
