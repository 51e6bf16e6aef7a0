#include "schrodholtz/fft.hpp"

#include <cmath>
#include <numbers>

namespace shz
{
    bool is_pow2(std::size_t n)
    {
        return n > 0 && (n & (n - 1)) == 0;
    }

    void fft_pow2(std::span<cx> data, int sign)
    {
        const std::size_t n = data.size();
        if (!is_pow2(n))
            throw std::domain_error("fft: length must be a power of two");
        if (n == 1)
            return;

        // bit-reversal permutation
        for (std::size_t i = 1, j = 0; i < n; ++i)
        {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1)
                j ^= bit;
            j ^= bit;
            if (i < j)
                std::swap(data[i], data[j]);
        }

        for (std::size_t len = 2; len <= n; len <<= 1)
        {
            const double ang = sign * 2.0 * std::numbers::pi / double(len);
            const cx wlen = std::polar(1.0, ang);
            for (std::size_t i = 0; i < n; i += len)
            {
                cx w{1.0, 0.0};
                for (std::size_t j = 0; j < len / 2; ++j)
                {
                    cx u = data[i + j];
                    cx v = data[i + j + len / 2] * w;
                    data[i + j] = u + v;
                    data[i + j + len / 2] = u - v;
                    w *= wlen;
                }
            }
        }
    }
} // namespace shz
