#ifndef SCHRODHOLTZ_DDS_HPP
#define SCHRODHOLTZ_DDS_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "schrodholtz/types.hpp"

namespace shz
{
    // First-order doubling of the damped system v'' + gamma v' = -A^H A v + A^H b:
    //   dV/dt = M V + F,   V = [v; w],   M = [[0, -A^H], [A, -gamma I]],   F = [0; -b]
    // Its steady state is V = [A^{-1} b; 0] and, under critical damping
    // gamma = 2 sigma_min(A), the slowest mode decays at rate sigma_min(A).
    struct DampedSystem
    {
        SpMat M;
        CVec F;
        double gamma = 0.0;
        double sigma_min = 0.0;
        double sigma_max = 0.0;
        double T = 0.0; // stopping time
        int n = 0;      // N = dim(A)

        int dim() const { return 2 * n; }
        CMat dense_M() const { return CMat(M); }
    };

    // (sigma_min, sigma_max) to ~1e-6 relative; dense SVD for dim <= 1024,
    // iterative extremal solves on A^H A above.
    std::pair<double, double> extreme_singular_values(const CMat& A);

    // gamma = 2 sigma_min(A); T = ceil( log(1/epsilon) / sigma_min ), never below
    // the stopping bound. Pass known_sv to reuse a previously computed pair.
    DampedSystem build_damped(const CMat& A, const CVec& b, double epsilon,
                              std::optional<std::pair<double, double>> known_sv = {});
    DampedSystem build_damped(const SpMat& A, const CVec& b, double epsilon,
                              std::optional<std::pair<double, double>> known_sv = {});

    // Replace the stopping time (gamma and the blocks are unchanged).
    void set_final_time(DampedSystem& sys, double T);

    struct StepControl
    {
        double rel_tol = 1e-8;
        double abs_tol = 1e-10;
        long max_steps = 200'000'000;
    };

    // Adaptive Dormand-Prince integration of dV/dt = M V + F from V(0) = 0.
    // Validation oracle only; the Schrodingerized path never calls it.
    CVec integrate_reference(const DampedSystem& sys, double t_end, const StepControl& ctl = {});

    // V at each requested time (times must be nondecreasing, starting >= 0).
    std::vector<CVec> integrate_reference_path(const DampedSystem& sys,
                                               std::span<const double> times,
                                               const StepControl& ctl = {});

    // Gradient-flow comparison: dx/dt = -A^H A x + A^H b from zero; converges at
    // the slower rate sigma_min(A)^2.
    CVec gradient_flow_reference(const CMat& A, const CVec& b, double t_end,
                                 const StepControl& ctl = {});
    std::vector<CVec> gradient_flow_path(const CMat& A, const CVec& b,
                                         std::span<const double> times,
                                         const StepControl& ctl = {});
} // namespace shz

#endif
