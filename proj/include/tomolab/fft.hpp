#pragma once

#include <complex>
#include <vector>

namespace tomolab {

using cplx = std::complex<double>;

// In-place radix-2 transforms; length must be a power of two. forward uses
// the e^{-2*pi*i*k*n/L} convention; inverse applies the 1/L scale.
void fft(std::vector<cplx>& a);
void ifft(std::vector<cplx>& a);

// strided in-place transform over a[offset + k*stride], k = 0..n-1
void fft_stride(cplx* a, size_t n, size_t stride, bool inverse);

// square row-major n x n grid, rows then columns
void fft2(std::vector<cplx>& a, size_t n, bool inverse);

size_t next_pow2(size_t n);

}  // namespace tomolab
