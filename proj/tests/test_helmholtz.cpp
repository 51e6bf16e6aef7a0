#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "oracles.hpp"
#include "schrodholtz/helmholtz.hpp"
#include "schrodholtz/linalg.hpp"

using namespace shz;

TEST_CASE("shifted wavenumber limits and frozen value")
{
    // small-angle expansion: k_hat -> k as h -> 0
    CHECK(shifted_wavenumber(7.3, 1e-6) == doctest::Approx(7.3).epsilon(1e-9));

    // sqrt(2 (1 - cos(0.625))) * 16, evaluated with a 30-digit evaluator
    CHECK(shifted_wavenumber(10.0, 1.0 / 16.0)
          == doctest::Approx(9.83803246657218722).epsilon(1e-14));

    CHECK_THROWS_AS(shifted_wavenumber(10.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(shifted_wavenumber(-1.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(shifted_wavenumber(std::numbers::pi, 1.0), std::domain_error);
    CHECK_THROWS_AS(shifted_wavenumber(4.0, 1.0), std::domain_error); // kh > pi
}

TEST_CASE("corrected stencil annihilates the plane wave")
{
    // brute-force stencil application on a 100-point grid
    const double h = 0.01;
    for (double k : {10.0, 23.7, 87.1})
    {
        const double khat = shifted_wavenumber(k, h);
        const double c = 2.0 - khat * khat * h * h;
        double worst = 0.0;
        for (int j = 1; j < 99; ++j)
        {
            const double x = j * h;
            const cx r = -std::exp(im * k * (x - h)) + c * std::exp(im * k * x)
                         - std::exp(im * k * (x + h));
            worst = std::max(worst, std::abs(r) / 4.0);
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("closed-form solution satisfies the boundary value problem")
{
    for (double k : {10.0, 30.0})
    {
        auto u = [k](double x) { return exact_solution(k, x); };

        CHECK(std::abs(u(0.0)) == 0.0); // Dirichlet end

        // Robin residual u'(1) - i k u(1) via central differences
        const cx robin = oracle::diff1(u, 1.0, 1e-6) - im * k * u(1.0);
        CHECK(std::abs(robin) < 1e-8);

        // PDE residual -u'' - k^2 u - f with f = -sin(kx)
        for (double x : {0.25, 0.5, 0.75})
        {
            const cx res = -oracle::diff2(u, x, 2e-5) - k * k * u(x) + std::sin(k * x);
            CHECK(std::abs(res) < 1e-6);
        }
    }

    // frozen sample from a 30-digit evaluation at k = 10
    const cx u_half = exact_solution(10.0, 0.5);
    CHECK(u_half.real() == doctest::Approx(-0.010467164811057115).epsilon(1e-13));
    CHECK(u_half.imag() == doctest::Approx(0.045757600327254055).epsilon(1e-13));
}

TEST_CASE("system assembly for the radiating line")
{
    const HelmholtzProblem prob = HelmholtzProblem::robin_line(10.0, 4);
    const DiscreteHelmholtz sys = build_system(prob);

    CHECK(sys.size() == 16);
    CHECK(sys.h == doctest::Approx(1.0 / 16.0));
    CHECK(sys.k * sys.h == doctest::Approx(0.625));

    const CMat A = sys.dense();
    const double kh2 = sys.k_hat * sys.k_hat * sys.h * sys.h;
    for (int i = 0; i < 15; ++i)
    {
        CHECK(std::abs(A(i, i) - cx(2.0 - kh2, 0.0)) < 1e-15);
        if (i > 0)
            CHECK(std::abs(A(i, i - 1) + 1.0) < 1e-15);
        CHECK(std::abs(A(i, i + 1) + 1.0) < 1e-15);
        // interior rows are symmetric
        if (i > 0)
            CHECK(std::abs(A(i, i - 1) - A(i - 1, i)) < 1e-15);
    }
    // Robin row: halved ghost-point elimination, non-Hermitian diagonal
    CHECK(std::abs(A(15, 14) + 1.0) < 1e-15);
    CHECK(A(15, 15).imag() == doctest::Approx(-10.0 / 16.0));
    CHECK(A(15, 15).real() == doctest::Approx(1.0 - 0.5 * kh2));

    for (int i = 0; i < 15; ++i)
    {
        const double x = (i + 1) * sys.h;
        CHECK(std::abs(sys.b(i) - sys.h * sys.h * cx(-std::sin(10.0 * x), 0.0)) < 1e-16);
    }
    CHECK(std::abs(sys.b(15) - 0.5 * sys.h * sys.h * cx(-std::sin(10.0), 0.0)) < 1e-16);
    CHECK(sys.grid.front() == doctest::Approx(sys.h));
    CHECK(sys.grid.back() == doctest::Approx(1.0));
}

TEST_CASE("zero source gives the zero solution")
{
    HelmholtzProblem prob;
    prob.k = 10.0;
    prob.cells = 16;
    const DiscreteHelmholtz sys = build_system(prob);
    CHECK(sys.b.norm() == 0.0);
    const CVec x = sys.dense().partialPivLu().solve(sys.b);
    CHECK(x.norm() == 0.0);
}

TEST_CASE("invalid problems are rejected")
{
    HelmholtzProblem prob = HelmholtzProblem::robin_line(10.0, 2); // kh = 2.5
    CHECK_THROWS_AS(build_system(prob), std::domain_error);

    prob.k = -1.0;
    CHECK_THROWS_AS(build_system(prob), std::domain_error);

    // k^2 exactly at a discrete eigenvalue of the Dirichlet Laplacian
    const auto mu2 = dirichlet_laplacian_eigenvalues(16);
    CHECK_THROWS_AS(build_dirichlet_validation(std::sqrt(mu2[0]), 16), numerical_error);
}

TEST_CASE("direct solve converges to the closed form as the mesh refines")
{
    double prev = 1e9;
    for (int n = 4; n <= 7; ++n)
    {
        const DiscreteHelmholtz sys = build_system(HelmholtzProblem::robin_line(10.0, n));
        const CVec x = sys.dense().fullPivLu().solve(sys.b);
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < sys.size(); ++i)
        {
            err = std::max(err, std::abs(x(i) - exact_solution(10.0, sys.grid[std::size_t(i)])));
            scale = std::max(scale, std::abs(exact_solution(10.0, sys.grid[std::size_t(i)])));
        }
        const double rel = err / scale;
        CHECK(rel < 0.75 * prev); // strictly decreasing with n
        prev = rel;
        if (n == 7)
            CHECK(rel < 2e-3);
    }
}

TEST_CASE("preconditioned spectrum on the Dirichlet validation case")
{
    const DiscreteHelmholtz sys = build_dirichlet_validation(10.0, 16);
    CHECK(sys.size() == 15);
    CHECK(sys.k_hat == doctest::Approx(10.0)); // unshifted stencil here

    const PreconditionedSystem pre = build_preconditioned(sys, ShiftMode::real_shift);

    Eigen::ComplexEigenSolver<CMat> es(pre.PA);
    std::vector<double> got;
    for (int i = 0; i < 15; ++i)
    {
        CHECK(std::abs(es.eigenvalues()(i)) <= 1.0 + 1e-12);
        got.push_back(es.eigenvalues()(i).real());
        CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-12);
    }
    std::sort(got.begin(), got.end());

    std::vector<double> want;
    for (double mu2 : dirichlet_laplacian_eigenvalues(16))
        want.push_back((mu2 - 100.0) / (mu2 + 100.0));
    std::sort(want.begin(), want.end());

    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) < 1e-10);

    // the shift collapses the condition number
    auto [smin, smax] = singular_extremes(sys.dense());
    CHECK(pre.kappa_estimate < smax / smin);
}

TEST_CASE("imaginary shift also keeps the spectrum in the unit disk")
{
    const DiscreteHelmholtz sys = build_dirichlet_validation(10.0, 16);
    const PreconditionedSystem pre = build_preconditioned(sys, ShiftMode::imaginary_shift);
    Eigen::ComplexEigenSolver<CMat> es(pre.PA);
    std::vector<double> want;
    for (double mu2 : dirichlet_laplacian_eigenvalues(16))
        want.push_back(std::abs((mu2 - 100.0) / cx(mu2, 100.0)));
    std::sort(want.begin(), want.end());
    std::vector<double> got;
    for (int i = 0; i < 15; ++i)
    {
        CHECK(std::abs(es.eigenvalues()(i)) <= 1.0 + 1e-12);
        got.push_back(std::abs(es.eigenvalues()(i)));
    }
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) < 1e-10);
}

TEST_CASE("solution is insensitive to the wavenumber used in the Robin relation")
{
    // The stencil uses k_hat but the radiation relation keeps the physical k.
    // Swapping k -> k_hat inside the Robin term perturbs the solution at the
    // discretization-error scale and the gap closes as the mesh refines.
    double prev = 1e9;
    for (int n : {4, 5, 6})
    {
        const DiscreteHelmholtz sys = build_system(HelmholtzProblem::robin_line(10.0, n));
        CMat A2 = sys.dense();
        A2(sys.size() - 1, sys.size() - 1) += -im * (sys.k_hat - sys.k) * sys.h;
        const CVec x = sys.dense().fullPivLu().solve(sys.b);
        const CVec x2 = A2.fullPivLu().solve(sys.b);
        const double rel = (x - x2).norm() / x.norm();
        CHECK(rel < 0.05);
        CHECK(rel < prev);
        prev = rel;
    }
}

TEST_CASE("preconditioning the radiating system tames kappa across k")
{
    // fixed kh = 0.625
    double prev_ratio = 0.0;
    for (double k : {10.0, 20.0, 40.0})
    {
        HelmholtzProblem prob;
        prob.k = k;
        prob.cells = int(std::lround(k / 0.625));
        prob.source = [k](double x) { return cx(-std::sin(k * x), 0.0); };
        const DiscreteHelmholtz sys = build_system(prob);
        const PreconditionedSystem pre = build_preconditioned(sys, ShiftMode::real_shift);

        const double kappa_A = sys.sigma_max / sys.sigma_min;
        CHECK(pre.kappa_estimate < kappa_A);

        // kappa(PA)/k stays within a constant factor over the sweep
        const double ratio = pre.kappa_estimate / k;
        if (prev_ratio > 0.0)
        {
            CHECK(ratio < 4.0 * prev_ratio);
            CHECK(ratio > 0.25 * prev_ratio);
        }
        prev_ratio = ratio;
    }
}
