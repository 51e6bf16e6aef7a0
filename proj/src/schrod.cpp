#include "schrodholtz/schrod.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "schrodholtz/fft.hpp"
#include "schrodholtz/linalg.hpp"

namespace shz
{
    namespace
    {
        constexpr double pi = std::numbers::pi;

        // forward: rows of W (p-profiles per component) -> spectral coefficients
        // against phi_l(p) = e^{i nu_l (p + L)}. With p_j = -L + j dp this is a
        // standard DFT up to the (-1)^j Nyquist shift.
        CMat to_modes(const CMat& W)
        {
            const Eigen::Index np = W.rows();
            CMat modes(np, W.cols());
            std::vector<cx> buf(static_cast<std::size_t>(np));
            for (Eigen::Index c = 0; c < W.cols(); ++c)
            {
                for (Eigen::Index j = 0; j < np; ++j)
                    buf[std::size_t(j)] = (j % 2 == 0) ? W(j, c) : -W(j, c);
                fft_pow2(buf, -1);
                for (Eigen::Index l = 0; l < np; ++l)
                    modes(l, c) = buf[std::size_t(l)] / double(np);
            }
            return modes;
        }

        CMat from_modes(const CMat& modes)
        {
            const Eigen::Index np = modes.rows();
            CMat W(np, modes.cols());
            std::vector<cx> buf(static_cast<std::size_t>(np));
            for (Eigen::Index c = 0; c < modes.cols(); ++c)
            {
                for (Eigen::Index l = 0; l < np; ++l)
                    buf[std::size_t(l)] = modes(l, c);
                fft_pow2(buf, +1);
                for (Eigen::Index j = 0; j < np; ++j)
                    W(j, c) = (j % 2 == 0) ? buf[std::size_t(j)] : -buf[std::size_t(j)];
            }
            return W;
        }
    } // namespace

    std::pair<SpMat, CVec> homogenize(const DampedSystem& sys)
    {
        if (sys.T <= 0.0)
            throw std::domain_error("schrod: homogenization requires a positive final time");

        const int d = sys.dim();
        std::vector<Eigen::Triplet<cx>> trip;
        trip.reserve(sys.M.nonZeros() + d);
        for (int c = 0; c < sys.M.outerSize(); ++c)
            for (SpMat::InnerIterator it(sys.M, c); it; ++it)
                trip.emplace_back(int(it.row()), int(it.col()), it.value());
        for (int i = 0; i < d; ++i)
            trip.emplace_back(i, d + i, cx(1.0 / sys.T, 0.0));

        SpMat Mf(2 * d, 2 * d);
        Mf.setFromTriplets(trip.begin(), trip.end());
        Mf.makeCompressed();

        CVec Vf0 = CVec::Zero(2 * d);
        Vf0.tail(d) = sys.T * sys.F;
        return {Mf, Vf0};
    }

    std::pair<SpMat, SpMat> hermitian_split(const SpMat& Mf)
    {
        SpMat MfH = SpMat(Mf.adjoint());
        SpMat H1 = 0.5 * (Mf + MfH);
        SpMat H2 = (-0.5 * im) * (Mf - MfH); // 1/(2i) = -i/2
        H1.makeCompressed();
        H2.makeCompressed();
        return {H1, H2};
    }

    std::vector<double> PGrid::wavenumbers() const
    {
        std::vector<double> nu(static_cast<std::size_t>(n_p));
        for (int l = 0; l < n_p; ++l)
            nu[std::size_t(l)] = 2.0 * pi * (l - n_p / 2) / (R + L);
        return nu;
    }

    double PGrid::nu_max() const
    {
        return pi * double(n_p) / (R + L);
    }

    int PGrid::first_node_at_or_above(double p) const
    {
        for (int j = 0; j < n_p; ++j)
            if (nodes[std::size_t(j)] >= p)
                return j;
        return -1;
    }

    double psi_value(PsiProfile profile, double p)
    {
        if (profile == PsiProfile::cubic_smooth && p > -1.0 && p < 0.0)
        {
            const double e1 = std::exp(-1.0);
            return ((-3.0 + 3.0 * e1) * p + (-5.0 + 4.0 * e1)) * p * p - p + 1.0;
        }
        return std::exp(-std::abs(p));
    }

    PsiProfile psi_from_name(const std::string& name)
    {
        if (name == "exp")
            return PsiProfile::exp_abs;
        if (name == "cubic")
            return PsiProfile::cubic_smooth;
        throw config_error("schrod: unknown psi profile '" + name + "' (use exp or cubic)");
    }

    std::string psi_name(PsiProfile profile)
    {
        return profile == PsiProfile::exp_abs ? "exp" : "cubic";
    }

    PGrid choose_p_domain(const CMat& H1, double T, double epsilon, int p_exponent,
                          std::optional<DomainBounds> fixed,
                          std::vector<std::string>* warnings, bool strict)
    {
        auto [lmin, lmax] = hermitian_eig_extremes(H1);
        return choose_p_domain(std::max(0.0, -lmin), std::max(0.0, lmax), T, epsilon,
                               p_exponent, fixed, warnings, strict);
    }

    PGrid choose_p_domain(double lam_neg, double lam_pos, double T, double epsilon,
                          int p_exponent, std::optional<DomainBounds> fixed,
                          std::vector<std::string>* warnings, bool strict)
    {
        if (epsilon <= 0.0 || epsilon >= 1.0)
            throw std::domain_error("schrod: truncation tolerance must lie in (0,1)");
        if (p_exponent < 1 || p_exponent > 24)
            throw std::domain_error("schrod: p-grid exponent out of range");

        const double logeps = std::log(1.0 / epsilon);
        const double margin = 1.0;

        PGrid grid;
        if (fixed)
        {
            grid.L = fixed->L;
            grid.R = fixed->R;
            const double need_L = lam_neg * T + logeps;
            const double need_R = lam_pos * T + logeps;
            if ((grid.L < need_L || grid.R < need_R) && warnings)
                warnings->push_back("p-domain [-" + std::to_string(grid.L) + ", "
                                    + std::to_string(grid.R)
                                    + "] is below the truncation criterion (needs L >= "
                                    + std::to_string(need_L) + ", R >= "
                                    + std::to_string(need_R) + "); expect wrap-around error");
        }
        else
        {
            grid.L = lam_neg * T + logeps + margin;
            grid.R = lam_pos * T + logeps + margin;
        }
        if (grid.L + grid.R <= 0.0)
            throw std::domain_error("schrod: empty p-domain");

        grid.n_p = 1 << p_exponent;
        grid.dp = (grid.R + grid.L) / double(grid.n_p);
        grid.nodes.resize(std::size_t(grid.n_p) + 1);
        for (int j = 0; j <= grid.n_p; ++j)
            grid.nodes[std::size_t(j)] = -grid.L + j * grid.dp;
        grid.nodes.back() = grid.R;

        if (grid.dp > 1.0)
        {
            const std::string msg = "p-grid spacing dp = " + std::to_string(grid.dp)
                                    + " > 1 cannot resolve the psi profile";
            if (strict)
                throw config_error("schrod: " + msg);
            if (warnings)
                warnings->push_back(msg);
        }
        return grid;
    }

    SchrodSystem build_schrod(const DampedSystem& sys, int p_exponent, double epsilon,
                              PsiProfile profile, std::optional<DomainBounds> fixed,
                              std::vector<std::string>* warnings, bool strict)
    {
        auto [Mf, Vf0] = homogenize(sys);
        auto [H1, H2] = hermitian_split(Mf);

        SchrodSystem s;
        s.H1 = std::move(H1);
        s.H2 = std::move(H2);
        s.T = sys.T;
        s.profile = profile;
        s.dim = int(Mf.rows());
        s.Vf0 = std::move(Vf0);

        auto [lmin, lmax] = hermitian_eig_extremes(CMat(s.H1));
        s.lambda_neg_max = std::max(0.0, -lmin);
        s.lambda_pos_max = std::max(0.0, lmax);
        s.p_diamond = std::max(0.0, lmax * sys.T);
        if (std::abs(s.p_diamond - recovery_threshold) > 1e-8)
            throw numerical_error("schrod: lambda_max(H1) T = " + std::to_string(s.p_diamond)
                                  + " deviates from the expected recovery threshold 1/2");

        s.grid = choose_p_domain(s.lambda_neg_max, s.lambda_pos_max, sys.T, epsilon,
                                 p_exponent, fixed, warnings, strict);
        return s;
    }

    CMat init_profile(PsiProfile profile, const PGrid& grid, const CVec& Vf0)
    {
        CMat W0(grid.n_p, Vf0.size());
        for (int j = 0; j < grid.n_p; ++j)
            W0.row(j) = psi_value(profile, grid.node(j)) * Vf0.transpose();
        return W0;
    }

    namespace
    {
        // per-mode propagation of the spectral coefficients to every requested time
        void propagate_modes(const SchrodSystem& sys, const CMat& modes0,
                             std::span<const double> times, std::vector<CMat>& modes_t,
                             const EvolveOptions& opt)
        {
            const auto nu = sys.grid.wavenumbers();
            const int np = sys.grid.n_p;
            const bool dense_path = sys.dim <= opt.dense_dim_limit;

            CMat D1, D2;
            if (dense_path)
            {
                D1 = CMat(sys.H1);
                D2 = CMat(sys.H2);
            }

            auto run_range = [&](int lo, int hi) {
                for (int l = lo; l < hi; ++l)
                {
                    const CVec y0 = modes0.row(l).transpose();
                    try
                    {
                        if (dense_path)
                        {
                            HermitianPropagator prop(nu[std::size_t(l)] * D1 - D2);
                            for (std::size_t s = 0; s < times.size(); ++s)
                                modes_t[s].row(l) = prop.apply(y0, times[s]).transpose();
                        }
                        else
                        {
                            const SpMat Hnu = nu[std::size_t(l)] * sys.H1 - sys.H2;
                            auto apply = [&Hnu](const CVec& x, CVec& y) { y = Hnu * x; };
                            CVec y = y0;
                            double t_prev = 0.0;
                            for (std::size_t s = 0; s < times.size(); ++s)
                            {
                                y = krylov_expv_hermitian(apply, y, times[s] - t_prev,
                                                          opt.krylov_tol);
                                t_prev = times[s];
                                modes_t[s].row(l) = y.transpose();
                            }
                        }
                    }
                    catch (const std::exception& e)
                    {
                        throw numerical_error("schrod: evolution failed at mode l = "
                                              + std::to_string(l) + ": " + e.what());
                    }
                }
            };

            const int nthreads = std::clamp(opt.threads, 1, np);
            if (nthreads == 1)
            {
                run_range(0, np);
                return;
            }

            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
            const int chunk = (np + nthreads - 1) / nthreads;
            for (int tix = 0; tix < nthreads; ++tix)
            {
                const int lo = tix * chunk;
                const int hi = std::min(np, lo + chunk);
                pool.emplace_back([&, lo, hi, tix] {
                    try
                    {
                        run_range(lo, hi);
                    }
                    catch (...)
                    {
                        errors[std::size_t(tix)] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool)
                th.join();
            for (auto& err : errors)
                if (err)
                    std::rethrow_exception(err);
        }
    } // namespace

    std::vector<EvolvedState> evolve_at_times(const SchrodSystem& sys, const CMat& W0,
                                              std::span<const double> times,
                                              const EvolveOptions& opt)
    {
        if (W0.rows() != sys.grid.n_p || W0.cols() != sys.dim)
            throw std::domain_error("schrod: initial data has the wrong shape");
        for (std::size_t s = 0; s < times.size(); ++s)
            if (times[s] < 0.0 || (s > 0 && times[s] < times[s - 1]))
                throw std::domain_error("schrod: checkpoint times must be nondecreasing and >= 0");

        const double norm0 = W0.norm();
        const CMat modes0 = to_modes(W0);

        std::vector<CMat> modes_t(times.size(), CMat(sys.grid.n_p, sys.dim));
        propagate_modes(sys, modes0, times, modes_t, opt);

        std::vector<EvolvedState> out;
        out.reserve(times.size());
        for (std::size_t s = 0; s < times.size(); ++s)
        {
            EvolvedState st;
            st.t = times[s];
            st.W = (times[s] == 0.0) ? W0 : from_modes(modes_t[s]);
            st.norm0 = norm0;
            st.normT = st.W.norm();
            out.push_back(std::move(st));
        }
        return out;
    }

    EvolvedState evolve(const SchrodSystem& sys, const CMat& W0, const EvolveOptions& opt)
    {
        const double times[1] = {sys.T};
        return std::move(evolve_at_times(sys, W0, times, opt).front());
    }

    RecoveryResult recover(EvolvedState& state, const PGrid& grid, RecoveryStrategy strategy)
    {
        const int j = grid.first_node_at_or_above(recovery_threshold);
        if (j < 0)
            throw numerical_error("schrod: no p-node at or above the recovery threshold "
                                  "(grid misconfigured)");

        const int dim = int(state.W.cols());
        const int N = dim / 4;
        const double p = grid.node(j);

        RecoveryResult res;
        res.node_index = j;
        res.p_node = p;

        if (strategy == RecoveryStrategy::one_point)
        {
            res.Vf = std::exp(p) * state.W.row(j).transpose();
        }
        else
        {
            // trapezoid of W over [p_j, R); the tail beyond R is below the
            // truncation tolerance by construction
            CVec acc = 0.5 * state.W.row(j).transpose();
            for (int q = j + 1; q < grid.n_p; ++q)
                acc += state.W.row(q).transpose();
            res.Vf = std::exp(p) * grid.dp * acc;
        }

        res.v = res.Vf.head(N);
        res.w = res.Vf.segment(N, N);
        res.r_v = res.Vf.segment(2 * N, N);
        res.r_w = res.Vf.tail(N);

        state.recovered_Vf = res.Vf;
        state.recovered_v = res.v;
        return res;
    }
} // namespace shz
