#pragma once

#include <complex>

namespace hfrac::detail {

// In-place complex FFT, FFTW backend with a cached plan per length.
// sign = -1 forward (unnormalized), +1 inverse (scaled by 1/n).
void fft_inplace(std::complex<double>* data, int n, int sign);

// Physical frequency of bin k on a periodic axis of n cells spanning length L:
// tau_k = k/L for k <= n/2, (k-n)/L above; for even n, bin n/2 maps to +n/(2L).
double bin_frequency(int k, int n, double L);

}  // namespace hfrac::detail
