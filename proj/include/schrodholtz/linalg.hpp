#ifndef SCHRODHOLTZ_LINALG_HPP
#define SCHRODHOLTZ_LINALG_HPP

#include <functional>
#include <span>
#include <utility>

#include "schrodholtz/types.hpp"

namespace shz
{
    // Extreme singular values (sigma_min, sigma_max) of a square matrix.
    // Dense SVD up to `dense_limit`, shift-invert / power iteration on A^H A above.
    std::pair<double, double> singular_extremes(const CMat& A, int dense_limit = 1024);

    // Extreme eigenvalues (lambda_min, lambda_max) of a Hermitian matrix.
    std::pair<double, double> hermitian_eig_extremes(const CMat& H, int dense_limit = 4096);

    // Spectral norm of a Hermitian matrix.
    double hermitian_norm(const CMat& H, int dense_limit = 4096);

    // Eigendecomposition H = U diag(lam) U^H of a Hermitian matrix, kept around so
    // that e^{-iHt} v can be applied for many values of t at the cost of two gemv.
    class HermitianPropagator
    {
    public:
        explicit HermitianPropagator(const CMat& H);

        CVec apply(const CVec& v, double t) const; // e^{-iHt} v

    private:
        RVec lam_;
        CMat U_;
    };

    // y <- e^{-iHt} v for Hermitian H given as a matvec, via Lanczos with adaptive
    // substepping. Relative accuracy ~tol. Throws numerical_error when the step
    // size underflows.
    CVec krylov_expv_hermitian(const std::function<void(const CVec&, CVec&)>& apply_H,
                               const CVec& v, double t, double tol, int krylov_dim = 64);

    // Least-squares slope of y against x.
    double fit_slope(std::span<const double> x, std::span<const double> y);
} // namespace shz

#endif
