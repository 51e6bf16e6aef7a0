#ifndef SCHRODHOLTZ_HELMHOLTZ_HPP
#define SCHRODHOLTZ_HELMHOLTZ_HPP

#include <functional>
#include <vector>

#include "schrodholtz/types.hpp"

namespace shz
{
    // 1D Helmholtz boundary value problem on [0,1]:
    //   -u'' - k^2 u = f,   u(0) = bc_left,   u'(1) - i k u(1) = 0  (Robin)
    // or u(1) = 0 in place of the Robin row (validation configuration).
    struct HelmholtzProblem
    {
        double k = 0.0;  // wavenumber
        int cells = 0;   // grid cells, h = 1/cells
        cx bc_left{0.0, 0.0};
        std::function<cx(double)> source; // f(x); empty means f = 0
        bool robin_right = true;
        bool dispersion_correction = true; // use the shifted wavenumber in the stencil

        // f = -sin(kx), homogeneous Dirichlet at 0, radiating at 1, h = 2^-n
        static HelmholtzProblem robin_line(double k, int mesh_exponent);

        double h() const { return 1.0 / double(cells); }
        void validate() const; // requires 0 < kh < 1
    };

    // Assembled h^2-scaled Helmholtz system A u = b.
    struct DiscreteHelmholtz
    {
        SpMat A;
        CVec b;
        double h = 0.0;
        double k = 0.0;
        double k_hat = 0.0;        // wavenumber used in the stencil
        bool robin_right = true;
        std::vector<double> grid;  // node coordinate of each unknown
        double sigma_min = 0.0;    // cached from the build-time invertibility check
        double sigma_max = 0.0;

        int size() const { return int(b.size()); }
        CMat dense() const { return CMat(A); }
    };

    // k_hat = sqrt( (2/h^2) (1 - cos(kh)) ); requires kh in (0, pi).
    // With this shift the interior 3-point stencil propagates e^{ikx} exactly.
    double shifted_wavenumber(double k, double h);

    DiscreteHelmholtz build_system(const HelmholtzProblem& prob);

    // Closed-form solution of the radiating problem with f = -sin(kx):
    //   u(x) = -x cos(kx)/(2k) + sin(kx) (1 + e^{2ik} - 2ik)/(4k^2)
    cx exact_solution(double k, double x);

    enum class ShiftMode
    {
        real_shift,     // P^{-1} = -Lap_h + k^2 I
        imaginary_shift // P^{-1} = -Lap_h + i k^2 I
    };

    struct PreconditionedSystem
    {
        ShiftMode mode = ShiftMode::real_shift;
        CMat PA;
        CVec Pb;
        double kappa_estimate = 0.0;
        double sigma_min = 0.0;
        double sigma_max = 0.0;
    };

    // Applies P = (-Lap_h + (i) k^2 I)^{-1} as a cached factorized solve; the
    // discrete Laplacian reuses A's boundary treatment and row scaling.
    PreconditionedSystem build_preconditioned(const DiscreteHelmholtz& sys, ShiftMode mode);

    // Dirichlet-Dirichlet case with the unshifted stencil, for which the
    // preconditioned spectrum is known in closed form:
    //   lambda_j(PA) = (mu_j^2 - k^2) / (mu_j^2 + k^2),
    // mu_j^2 the eigenvalues of -Lap_h.
    DiscreteHelmholtz build_dirichlet_validation(double k, int cells);

    // mu_j^2 = (2 - 2 cos(j pi h)) / h^2, j = 1..cells-1
    std::vector<double> dirichlet_laplacian_eigenvalues(int cells);
} // namespace shz

#endif
