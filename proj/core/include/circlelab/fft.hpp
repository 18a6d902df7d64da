#pragma once
#include <complex>
#include <cstddef>
#include <vector>

namespace circlelab::fft {

// In-place iterative radix-2 transform; size must be a power of two.
// inverse=true applies the 1/n normalisation.
void transform(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

// Linear convolution of two real sequences (packs both into one complex
// transform). Result length is a.size() + b.size() - 1.
std::vector<double> convolve_real(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace circlelab::fft
