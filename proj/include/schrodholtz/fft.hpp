#ifndef SCHRODHOLTZ_FFT_HPP
#define SCHRODHOLTZ_FFT_HPP

#include <span>

#include "schrodholtz/types.hpp"

namespace shz
{
    // In-place radix-2 transform for power-of-two lengths.
    //   sign = -1:  X_l = sum_j x_j e^{-2*pi*i*j*l/N}   (forward, unnormalized)
    //   sign = +1:  x_j = sum_l X_l e^{+2*pi*i*j*l/N}   (backward, unnormalized)
    // The caller applies any 1/N scaling.
    void fft_pow2(std::span<cx> data, int sign);

    bool is_pow2(std::size_t n);
} // namespace shz

#endif
