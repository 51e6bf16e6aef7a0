#include "schrodholtz/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace shz
{
    namespace
    {
        // deterministic start vector for the iterative paths
        CVec iteration_seed(Eigen::Index n)
        {
            CVec v(n);
            for (Eigen::Index i = 0; i < n; ++i)
                v(i) = cx(1.0 + 0.5 * std::cos(double(i)), 0.25 * std::sin(double(3 * i + 1)));
            v /= v.norm();
            return v;
        }
    } // namespace

    std::pair<double, double> singular_extremes(const CMat& A, int dense_limit)
    {
        if (A.rows() != A.cols() || A.rows() == 0)
            throw std::domain_error("singular_extremes: matrix must be square and nonzero");

        const Eigen::Index n = A.rows();
        if (n <= dense_limit)
        {
            Eigen::BDCSVD<CMat> svd(A);
            return {svd.singularValues()(n - 1), svd.singularValues()(0)};
        }

        // power iteration on A^H A for sigma_max, inverse iteration for sigma_min
        const int max_it = 20000;
        const double tol = 1e-8; // relative, squared quantities converge twice as fast

        CVec v = iteration_seed(n);
        double s2 = 0.0, s2_prev = -1.0;
        int it = 0;
        for (; it < max_it; ++it)
        {
            CVec w = A.adjoint() * (A * v);
            s2 = w.norm();
            if (s2 == 0.0)
                throw numerical_error("singular_extremes: matrix is numerically zero");
            v = w / s2;
            if (std::abs(s2 - s2_prev) <= tol * s2)
                break;
            s2_prev = s2;
        }
        if (it == max_it)
            throw numerical_error("singular_extremes: power iteration did not converge within "
                                  + std::to_string(max_it) + " iterations");
        const double smax = std::sqrt(s2);

        Eigen::PartialPivLU<CMat> lu(A);
        v = iteration_seed(n);
        double r = 0.0, r_prev = -1.0;
        it = 0;
        for (; it < max_it; ++it)
        {
            // w = (A^H A)^{-1} v = A^{-1} A^{-H} v
            CVec w = lu.solve(lu.adjoint().solve(v));
            r = w.norm();
            if (!std::isfinite(r) || r == 0.0)
                throw numerical_error("singular_extremes: inverse iteration breakdown (singular matrix?)");
            v = w / r;
            if (std::abs(r - r_prev) <= tol * r)
                break;
            r_prev = r;
        }
        if (it == max_it)
            throw numerical_error("singular_extremes: inverse iteration did not converge within "
                                  + std::to_string(max_it) + " iterations");
        return {1.0 / std::sqrt(r), smax};
    }

    std::pair<double, double> hermitian_eig_extremes(const CMat& H, int dense_limit)
    {
        if (H.rows() != H.cols() || H.rows() == 0)
            throw std::domain_error("hermitian_eig_extremes: matrix must be square and nonzero");
        const Eigen::Index n = H.rows();
        if (n <= dense_limit)
        {
            Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success)
                throw numerical_error("hermitian_eig_extremes: eigensolver failed");
            return {es.eigenvalues()(0), es.eigenvalues()(n - 1)};
        }

        // shifted power iterations; c bounds the spectral radius via row sums
        const double c = H.cwiseAbs().rowwise().sum().maxCoeff();
        auto shifted_extreme = [&](double sign) {
            CVec v = iteration_seed(n);
            double mu = 0.0, mu_prev = -1.0;
            const int max_it = 50000;
            for (int it = 0; it < max_it; ++it)
            {
                CVec w = sign * (H * v) + c * v;
                mu = w.norm();
                v = w / mu;
                if (std::abs(mu - mu_prev) <= 1e-12 * std::max(1.0, mu))
                    return sign * (mu - c);
                mu_prev = mu;
            }
            throw numerical_error("hermitian_eig_extremes: power iteration did not converge");
        };
        const double lmax = shifted_extreme(+1.0);
        const double lmin = shifted_extreme(-1.0);
        return {lmin, lmax};
    }

    double hermitian_norm(const CMat& H, int dense_limit)
    {
        auto [lmin, lmax] = hermitian_eig_extremes(H, dense_limit);
        return std::max(std::abs(lmin), std::abs(lmax));
    }

    HermitianPropagator::HermitianPropagator(const CMat& H)
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(H);
        if (es.info() != Eigen::Success)
            throw numerical_error("HermitianPropagator: eigendecomposition failed");
        lam_ = es.eigenvalues();
        U_ = es.eigenvectors();
    }

    CVec HermitianPropagator::apply(const CVec& v, double t) const
    {
        CVec y = U_.adjoint() * v;
        for (Eigen::Index i = 0; i < lam_.size(); ++i)
            y(i) *= std::polar(1.0, -lam_(i) * t);
        return U_ * y;
    }

    CVec krylov_expv_hermitian(const std::function<void(const CVec&, CVec&)>& apply_H,
                               const CVec& v, double t, double tol, int krylov_dim)
    {
        const Eigen::Index n = v.size();
        const int m = std::min<Eigen::Index>(krylov_dim, n);
        if (t == 0.0 || v.norm() == 0.0)
            return v;

        CVec w = v;
        double remaining = t;
        const double tmin = std::abs(t) * 1e-12;

        while (remaining > 0.0)
        {
            const double beta0 = w.norm();

            // Lanczos basis of K_m(H, w)
            CMat V(n, m);
            RVec alpha(m), beta(m);
            V.col(0) = w / beta0;
            CVec q(n), prev = CVec::Zero(n);
            int k = 0;
            bool breakdown = false;
            for (; k < m; ++k)
            {
                apply_H(V.col(k), q);
                alpha(k) = std::real(V.col(k).dot(q));
                q -= alpha(k) * V.col(k);
                if (k > 0)
                    q -= beta(k - 1) * prev;
                // one step of reorthogonalization keeps the basis clean
                q -= V.leftCols(k + 1) * (V.leftCols(k + 1).adjoint() * q);
                beta(k) = q.norm();
                prev = V.col(k);
                if (beta(k) < 1e-14 * beta0)
                {
                    breakdown = true;
                    ++k;
                    break;
                }
                if (k + 1 < m)
                    V.col(k + 1) = q / beta(k);
            }
            const int mk = k;

            RMat T = RMat::Zero(mk, mk);
            for (int i = 0; i < mk; ++i)
            {
                T(i, i) = alpha(i);
                if (i + 1 < mk)
                    T(i, i + 1) = T(i + 1, i) = beta(i);
            }
            Eigen::SelfAdjointEigenSolver<RMat> es(T);

            double tau = remaining;
            CVec small;
            for (;;)
            {
                CVec phase(mk);
                for (int i = 0; i < mk; ++i)
                    phase(i) = std::polar(1.0, -es.eigenvalues()(i) * tau);
                RVec e1 = RVec::Zero(mk);
                e1(0) = 1.0;
                CVec coeff = es.eigenvectors().transpose() * e1;
                small = es.eigenvectors().cast<cx>() * (phase.array() * coeff.array().cast<cx>()).matrix();

                if (breakdown || mk < m)
                    break; // invariant subspace, result exact to rounding
                const double err = beta(mk - 1) * std::abs(small(mk - 1));
                if (err <= tol * (tau / std::abs(t)))
                    break;
                tau *= 0.5;
                if (tau < tmin)
                    throw numerical_error("krylov_expv: step size underflow");
            }

            w = V.leftCols(mk) * (beta0 * small);
            remaining -= tau;
        }
        return w;
    }

    double fit_slope(std::span<const double> x, std::span<const double> y)
    {
        if (x.size() != y.size() || x.size() < 2)
            throw std::domain_error("fit_slope: need at least two samples");
        const double n = double(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        const double denom = n * sxx - sx * sx;
        if (denom == 0.0)
            throw std::domain_error("fit_slope: degenerate abscissae");
        return (n * sxy - sx * sy) / denom;
    }
} // namespace shz
