// Test-only oracles, independent of the library's computational paths:
// dense matrix exponentials come from Eigen's Pade implementation, random
// instances from fixed-seed generators, derivatives from finite differences.
#ifndef SCHRODHOLTZ_TEST_ORACLES_HPP
#define SCHRODHOLTZ_TEST_ORACLES_HPP

#include <random>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "schrodholtz/types.hpp"

namespace oracle
{
    using shz::CMat;
    using shz::CVec;
    using shz::cx;

    inline CMat expm(const CMat& M)
    {
        return M.exp();
    }

    // e^{Mt} with source: y(t) = e^{Mt} y0 + t*phi1(Mt) F via the augmented block
    // [[M, F], [0, 0]].
    inline CVec expm_with_source(const CMat& M, const CVec& F, const CVec& y0, double t)
    {
        const Eigen::Index n = M.rows();
        CMat aug = CMat::Zero(n + 1, n + 1);
        aug.topLeftCorner(n, n) = M;
        aug.topRightCorner(n, 1) = F;
        CVec z(n + 1);
        z.head(n) = y0;
        z(n) = cx(1.0, 0.0);
        CVec out = (t * aug).exp() * z;
        return out.head(n);
    }

    inline std::mt19937& rng(unsigned seed)
    {
        static std::mt19937 gen;
        gen.seed(seed);
        return gen;
    }

    inline CMat random_matrix(int n, unsigned seed)
    {
        auto& gen = rng(seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        CMat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                A(i, j) = cx(dist(gen), dist(gen)) / std::sqrt(2.0 * n);
        return A;
    }

    inline CMat random_hermitian(int n, unsigned seed)
    {
        CMat A = random_matrix(n, seed);
        return 0.5 * (A + A.adjoint());
    }

    inline CVec random_vector(int n, unsigned seed)
    {
        auto& gen = rng(seed);
        std::normal_distribution<double> dist(0.0, 1.0);
        CVec v(n);
        for (int i = 0; i < n; ++i)
            v(i) = cx(dist(gen), dist(gen));
        return v;
    }

    // central differences for boundary/PDE residual checks
    template <typename F>
    cx diff1(const F& f, double x, double h)
    {
        return (f(x + h) - f(x - h)) / (2.0 * h);
    }

    template <typename F>
    cx diff2(const F& f, double x, double h)
    {
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    }
} // namespace oracle

#endif
