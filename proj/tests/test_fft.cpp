#include <doctest.h>

#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "schrodholtz/fft.hpp"

using namespace shz;

namespace
{
    std::vector<cx> naive_dft(const std::vector<cx>& x, int sign)
    {
        const std::size_t n = x.size();
        std::vector<cx> out(n);
        for (std::size_t l = 0; l < n; ++l)
        {
            cx acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j)
                acc += x[j] * std::polar(1.0, sign * 2.0 * std::numbers::pi
                                                  * double(j * l) / double(n));
            out[l] = acc;
        }
        return out;
    }
} // namespace

TEST_CASE("fft matches the naive DFT")
{
    for (std::size_t n : {2u, 8u, 16u, 64u})
    {
        CVec seed = oracle::random_vector(int(n), 11u + unsigned(n));
        std::vector<cx> x(seed.data(), seed.data() + n);
        for (int sign : {-1, +1})
        {
            std::vector<cx> got = x;
            fft_pow2(got, sign);
            std::vector<cx> want = naive_dft(x, sign);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(got[i] - want[i]) < 1e-12 * double(n));
        }
    }
}

TEST_CASE("fft round trip is the identity up to N")
{
    CVec seed = oracle::random_vector(32, 5);
    std::vector<cx> x(seed.data(), seed.data() + 32);
    std::vector<cx> y = x;
    fft_pow2(y, -1);
    fft_pow2(y, +1);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y[i] / 32.0 - x[i]) < 1e-13);
}

TEST_CASE("fft rejects non-power-of-two lengths")
{
    std::vector<cx> x(12, cx(1.0, 0.0));
    CHECK_THROWS_AS(fft_pow2(x, -1), std::domain_error);
    CHECK(is_pow2(8));
    CHECK(!is_pow2(12));
    CHECK(!is_pow2(0));
}
