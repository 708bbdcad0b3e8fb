#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fpmode {

/// Smallest power of two >= n.
size_t next_pow2(size_t n);

/// In-place forward radix-2 FFT, kernel exp(-i 2 pi j k / N). Size must be a
/// power of two. Thread safe (twiddle tables are cached behind a mutex).
void fft_inplace(std::vector<std::complex<double>>& data);

} // namespace fpmode
