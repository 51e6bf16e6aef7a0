#include "schrodholtz/dds.hpp"

#include <cmath>
#include <functional>

#include "schrodholtz/linalg.hpp"

namespace shz
{
    namespace
    {
        // Dormand-Prince 5(4) step for y' = f(y); returns (y5, y4).
        template <typename F>
        std::pair<CVec, CVec> dp45_step(const F& f, const CVec& y, double dt)
        {
            static const double a21 = 1.0 / 5;
            static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
            static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
            static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
            static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
            static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
            static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                                e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

            CVec k1 = f(y);
            CVec k2 = f(y + dt * (a21 * k1));
            CVec k3 = f(y + dt * (a31 * k1 + a32 * k2));
            CVec k4 = f(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
            CVec k5 = f(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            CVec k6 = f(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            CVec y5 = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            CVec k7 = f(y5);
            CVec y4 = y + dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            return {y5, y4};
        }

        // Integrates y' = f(y) from y0 over [0, max(times)], recording y(times[i]).
        template <typename F>
        std::vector<CVec> rk45_path(const F& f, CVec y, std::span<const double> times,
                                    const StepControl& ctl)
        {
            std::vector<CVec> out;
            out.reserve(times.size());

            double t = 0.0;
            double dt = 1e-2;
            long steps = 0;
            std::size_t next = 0;

            while (next < times.size() && times[next] <= 0.0)
                out.push_back(y), ++next;

            while (next < times.size())
            {
                const double target = times[next];
                bool clipped = false;
                if (t + dt >= target)
                {
                    dt = target - t;
                    clipped = true;
                }

                auto [y5, y4] = dp45_step(f, y, dt);
                const double err = (y5 - y4).norm();
                const double scale = ctl.abs_tol + ctl.rel_tol * std::max(y.norm(), y5.norm());

                if (err <= scale || dt <= 1e-14 * std::max(1.0, target))
                {
                    if (dt <= 1e-14 * std::max(1.0, target) && err > scale)
                        throw numerical_error("dds: reference integrator step underflow (stiffness)");
                    t += dt;
                    y = std::move(y5);
                    if (clipped)
                    {
                        while (next < times.size() && times[next] <= t)
                            out.push_back(y), ++next;
                    }
                }
                const double grow = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
                dt *= std::clamp(grow, 0.2, 5.0);
                if (clipped && next < times.size())
                    dt = std::min(dt, std::max(times[next] - t, 1e-12));
                if (++steps > ctl.max_steps)
                    throw numerical_error("dds: reference integrator exceeded step limit");
            }
            return out;
        }
    } // namespace

    std::pair<double, double> extreme_singular_values(const CMat& A)
    {
        return singular_extremes(A, 1024);
    }

    static DampedSystem assemble_damped(const SpMat& A, const CVec& b, double epsilon,
                                        std::pair<double, double> sv)
    {
        if (epsilon <= 0.0 || epsilon >= 1.0)
            throw std::domain_error("dds: stopping tolerance must lie in (0,1)");
        auto [smin, smax] = sv;
        if (smin <= 1e-14 * smax)
            throw numerical_error("dds: matrix is numerically singular, sigma_min = "
                                  + std::to_string(smin));

        const int N = int(A.rows());
        DampedSystem sys;
        sys.n = N;
        sys.sigma_min = smin;
        sys.sigma_max = smax;
        sys.gamma = 2.0 * smin;
        sys.T = std::ceil(std::log(1.0 / epsilon) / smin);

        std::vector<Eigen::Triplet<cx>> trip;
        trip.reserve(2 * A.nonZeros() + N);
        for (int c = 0; c < A.outerSize(); ++c)
            for (SpMat::InnerIterator it(A, c); it; ++it)
            {
                trip.emplace_back(int(it.row()) + N, int(it.col()), it.value());            // A
                trip.emplace_back(int(it.col()), int(it.row()) + N, -std::conj(it.value())); // -A^H
            }
        for (int i = 0; i < N; ++i)
            trip.emplace_back(N + i, N + i, cx(-sys.gamma, 0.0));

        sys.M = SpMat(2 * N, 2 * N);
        sys.M.setFromTriplets(trip.begin(), trip.end());
        sys.M.makeCompressed();

        sys.F = CVec::Zero(2 * N);
        sys.F.tail(N) = -b;
        return sys;
    }

    DampedSystem build_damped(const SpMat& A, const CVec& b, double epsilon,
                              std::optional<std::pair<double, double>> known_sv)
    {
        auto sv = known_sv ? *known_sv : extreme_singular_values(CMat(A));
        return assemble_damped(A, b, epsilon, sv);
    }

    DampedSystem build_damped(const CMat& A, const CVec& b, double epsilon,
                              std::optional<std::pair<double, double>> known_sv)
    {
        auto sv = known_sv ? *known_sv : extreme_singular_values(A);
        return assemble_damped(A.sparseView(), b, epsilon, sv);
    }

    void set_final_time(DampedSystem& sys, double T)
    {
        if (T <= 0.0)
            throw std::domain_error("dds: final time must be positive");
        sys.T = T;
    }

    CVec integrate_reference(const DampedSystem& sys, double t_end, const StepControl& ctl)
    {
        const double times[1] = {t_end};
        return integrate_reference_path(sys, times, ctl).front();
    }

    std::vector<CVec> integrate_reference_path(const DampedSystem& sys,
                                               std::span<const double> times,
                                               const StepControl& ctl)
    {
        auto f = [&sys](const CVec& y) -> CVec { return sys.M * y + sys.F; };
        return rk45_path(f, CVec::Zero(sys.dim()), times, ctl);
    }

    CVec gradient_flow_reference(const CMat& A, const CVec& b, double t_end,
                                 const StepControl& ctl)
    {
        const double times[1] = {t_end};
        return gradient_flow_path(A, b, times, ctl).front();
    }

    std::vector<CVec> gradient_flow_path(const CMat& A, const CVec& b,
                                         std::span<const double> times,
                                         const StepControl& ctl)
    {
        const CMat B = A.adjoint() * A;
        const CVec f0 = A.adjoint() * b;
        auto f = [&](const CVec& y) -> CVec { return f0 - B * y; };
        return rk45_path(f, CVec::Zero(A.rows()), times, ctl);
    }
} // namespace shz
