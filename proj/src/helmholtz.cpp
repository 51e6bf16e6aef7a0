#include "schrodholtz/helmholtz.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/SparseLU>

#include "schrodholtz/linalg.hpp"

namespace shz
{
    namespace
    {
        constexpr double pi = std::numbers::pi;

        void check_invertible(DiscreteHelmholtz& sys)
        {
            auto [smin, smax] = singular_extremes(sys.dense());
            if (smin <= 1e-14 * smax)
                throw numerical_error("helmholtz: system is numerically singular "
                                      "(k^2 at a discrete eigenvalue), sigma_min = "
                                      + std::to_string(smin));
            sys.sigma_min = smin;
            sys.sigma_max = smax;
        }
    } // namespace

    HelmholtzProblem HelmholtzProblem::robin_line(double k, int mesh_exponent)
    {
        HelmholtzProblem prob;
        prob.k = k;
        prob.cells = 1 << mesh_exponent;
        prob.source = [k](double x) { return cx(-std::sin(k * x), 0.0); };
        return prob;
    }

    void HelmholtzProblem::validate() const
    {
        if (k <= 0.0)
            throw std::domain_error("helmholtz: wavenumber must be positive");
        if (cells < 2)
            throw std::domain_error("helmholtz: need at least two grid cells");
        const double kh = k * h();
        if (kh >= 1.0)
            throw std::domain_error("helmholtz: kh = " + std::to_string(kh)
                                    + " violates the resolution requirement kh < 1");
    }

    double shifted_wavenumber(double k, double h)
    {
        const double kh = k * h;
        if (!(kh > 0.0) || !(kh < pi))
            throw std::domain_error("shifted_wavenumber: kh must lie strictly in (0, pi)");
        // sqrt( (2/h^2)(1 - cos(kh)) ) in the cancellation-free half-angle form
        return 2.0 * std::sin(0.5 * kh) / h;
    }

    DiscreteHelmholtz build_system(const HelmholtzProblem& prob)
    {
        prob.validate();

        const double h = prob.h();
        const double k = prob.k;
        const double khat = prob.dispersion_correction ? shifted_wavenumber(k, h) : k;
        const double kh2 = khat * khat * h * h;

        // Unknowns: u_1 .. u_C with the Robin endpoint included, or u_1 .. u_{C-1}
        // when both ends are Dirichlet. u_0 is eliminated into b.
        const int N = prob.robin_right ? prob.cells : prob.cells - 1;

        DiscreteHelmholtz sys;
        sys.h = h;
        sys.k = k;
        sys.k_hat = khat;
        sys.robin_right = prob.robin_right;
        sys.b = CVec::Zero(N);
        sys.grid.resize(N);

        auto f = [&](double x) { return prob.source ? prob.source(x) : cx(0.0, 0.0); };

        std::vector<Eigen::Triplet<cx>> trip;
        trip.reserve(3 * N);
        const int n_interior = prob.robin_right ? N - 1 : N;
        for (int i = 0; i < n_interior; ++i)
        {
            const double x = (i + 1) * h;
            sys.grid[i] = x;
            trip.emplace_back(i, i, cx(2.0 - kh2, 0.0));
            if (i > 0)
                trip.emplace_back(i, i - 1, cx(-1.0, 0.0));
            if (i + 1 < N)
                trip.emplace_back(i, i + 1, cx(-1.0, 0.0));
            sys.b(i) = h * h * f(x);
        }
        sys.b(0) += prob.bc_left;

        if (prob.robin_right)
        {
            // Ghost point at x = 1 + h eliminated through u'(1) = i k u(1); the
            // resulting row is halved so the off-diagonal pair stays (-1, -1).
            const int i = N - 1;
            sys.grid[i] = 1.0;
            trip.emplace_back(i, i - 1, cx(-1.0, 0.0));
            trip.emplace_back(i, i, cx(1.0 - 0.5 * kh2, 0.0) - im * (k * h));
            sys.b(i) = 0.5 * h * h * f(1.0);
        }

        sys.A = SpMat(N, N);
        sys.A.setFromTriplets(trip.begin(), trip.end());
        sys.A.makeCompressed();

        check_invertible(sys);
        return sys;
    }

    cx exact_solution(double k, double x)
    {
        const cx c = (1.0 + std::exp(2.0 * im * k) - 2.0 * im * k) / (4.0 * k * k);
        return -x * std::cos(k * x) / (2.0 * k) + std::sin(k * x) * c;
    }

    PreconditionedSystem build_preconditioned(const DiscreteHelmholtz& sys, ShiftMode mode)
    {
        const int N = sys.size();
        const double h = sys.h;
        const double k2h2 = sys.k * sys.k * h * h;

        // -Lap_h with A's boundary treatment and h^2 row scaling, plus the
        // (possibly imaginary) k^2 shift. The Robin row carries weight 1/2.
        std::vector<Eigen::Triplet<cx>> trip;
        trip.reserve(3 * N);
        const cx shift = (mode == ShiftMode::real_shift) ? cx(k2h2, 0.0) : im * k2h2;
        for (int i = 0; i < N; ++i)
        {
            const bool robin_row = sys.robin_right && i == N - 1;
            const double diag = robin_row ? 1.0 : 2.0;
            const double weight = robin_row ? 0.5 : 1.0;
            trip.emplace_back(i, i, cx(diag, 0.0) + weight * shift);
            if (i > 0)
                trip.emplace_back(i, i - 1, cx(-1.0, 0.0));
            if (i + 1 < N)
                trip.emplace_back(i, i + 1, cx(-1.0, 0.0));
        }
        SpMat Pinv(N, N);
        Pinv.setFromTriplets(trip.begin(), trip.end());
        Pinv.makeCompressed();

        Eigen::SparseLU<SpMat> lu;
        lu.compute(Pinv);
        if (lu.info() != Eigen::Success)
            throw numerical_error("helmholtz: shifted-Laplacian preconditioner is singular");

        PreconditionedSystem pre;
        pre.mode = mode;
        pre.PA = lu.solve(CMat(sys.dense()));
        pre.Pb = lu.solve(sys.b);
        if (!pre.PA.allFinite())
            throw numerical_error("helmholtz: preconditioner solve failed");

        auto [smin, smax] = singular_extremes(pre.PA);
        pre.sigma_min = smin;
        pre.sigma_max = smax;
        pre.kappa_estimate = smax / smin;
        return pre;
    }

    DiscreteHelmholtz build_dirichlet_validation(double k, int cells)
    {
        HelmholtzProblem prob;
        prob.k = k;
        prob.cells = cells;
        prob.robin_right = false;
        prob.dispersion_correction = false;
        return build_system(prob);
    }

    std::vector<double> dirichlet_laplacian_eigenvalues(int cells)
    {
        const double h = 1.0 / double(cells);
        std::vector<double> mu2(cells - 1);
        for (int j = 1; j < cells; ++j)
            mu2[j - 1] = (2.0 - 2.0 * std::cos(j * pi * h)) / (h * h);
        return mu2;
    }
} // namespace shz
