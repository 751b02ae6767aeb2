#pragma once

#include "tomolab/array.hpp"
#include "tomolab/rng.hpp"

namespace tomolab {

// Plain or masked mean squared error; mask entries are 0/1 weights.
double mse(const std::vector<double>& f, const std::vector<double>& r,
           const std::vector<double>* mask = nullptr);
double mse(const ImageGrid& f, const ImageGrid& r, const ImageGrid* mask = nullptr);
double mse(const Sinogram& f, const Sinogram& r);

// 10*log10(max(r)^2 / mse); +inf when mse == 0. Reconstruction-vs-phantom
// comparisons pass the reconstruction circle mask.
double psnr(const std::vector<double>& f, const std::vector<double>& r,
            const std::vector<double>* mask = nullptr);
double psnr(const ImageGrid& f, const ImageGrid& r, const ImageGrid* mask = nullptr);
double psnr(const Sinogram& f, const Sinogram& r);

// Draw one Poisson(lambda) variate. Deterministic per rng stream.
long long sample_poisson(SeededRng& rng, double lambda);

// Rescaled Poisson corruption: with m = mean(s) and c = 1/(sigma_fraction^2*m),
// returns Poisson(c*max(s,0))/c, so a sample at the mean value has standard
// deviation sigma_fraction*m.
Sinogram add_poisson_noise(const Sinogram& s, double sigma_fraction, SeededRng& rng);

}  // namespace tomolab
