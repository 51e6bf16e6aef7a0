#ifndef SCHRODHOLTZ_SCHROD_HPP
#define SCHRODHOLTZ_SCHROD_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schrodholtz/dds.hpp"
#include "schrodholtz/types.hpp"

namespace shz
{
    // Solution recovery threshold p_diamond: e^p W(T,p) returns the unwarped
    // state for any p >= lambda_max(H1) T, which the homogenized blocks pin to 1/2.
    inline constexpr double recovery_threshold = 0.5;

    // Homogenization of dV/dt = M V + F:
    //   M_f = [[M, I/T], [0, 0]],   V_f(0) = [0; T F]
    // The auxiliary block r(t) = T F is constant, so dV/dt = M V + r/T = M V + F.
    std::pair<SpMat, CVec> homogenize(const DampedSystem& sys);

    // M_f = H1 + i H2 with H1 = (M_f + M_f^H)/2, H2 = (M_f - M_f^H)/(2i).
    std::pair<SpMat, SpMat> hermitian_split(const SpMat& Mf);

    struct PGrid
    {
        double L = 0.0, R = 0.0;
        int n_p = 0;   // number of periodic unknowns, a power of two
        double dp = 0.0;
        std::vector<double> nodes; // p_0 .. p_{n_p}, p_0 = -L, p_{n_p} = R

        double node(int j) const { return nodes[std::size_t(j)]; }
        // nu_l = 2 pi (l - n_p/2) / (R + L)
        std::vector<double> wavenumbers() const;
        double nu_max() const;
        // smallest j < n_p with p_j >= p, or -1
        int first_node_at_or_above(double p) const;
    };

    enum class PsiProfile
    {
        exp_abs,     // e^{-|p|}: continuous, kinked at 0 -> first order in dp
        cubic_smooth // C^1 cubic blend on (-1,0) -> second order in dp
    };

    double psi_value(PsiProfile profile, double p);
    PsiProfile psi_from_name(const std::string& name);
    std::string psi_name(PsiProfile profile);

    struct DomainBounds
    {
        double L = 0.0, R = 0.0;
    };

    // Truncation of the p-domain: L, R large enough that
    //   e^{-L + lam_neg_max T} <= eps   and   e^{-R + lam_pos_max T} <= eps,
    // auto-selected as lam*T + log(1/eps) + 1. A fixed choice that falls short
    // only warns; dp > 1 is a resolution error in strict mode.
    PGrid choose_p_domain(const CMat& H1, double T, double epsilon, int p_exponent,
                          std::optional<DomainBounds> fixed = {},
                          std::vector<std::string>* warnings = nullptr, bool strict = false);
    PGrid choose_p_domain(double lambda_neg_max, double lambda_pos_max, double T,
                          double epsilon, int p_exponent,
                          std::optional<DomainBounds> fixed = {},
                          std::vector<std::string>* warnings = nullptr, bool strict = false);

    struct SchrodSystem
    {
        SpMat H1, H2;
        double T = 0.0;
        PGrid grid;
        PsiProfile profile = PsiProfile::exp_abs;
        double p_diamond = recovery_threshold; // = lambda_max(H1) T, checked at build
        double lambda_pos_max = 0.0;           // sup of positive eigenvalues of H1
        double lambda_neg_max = 0.0;           // sup of |negative eigenvalues| of H1
        int dim = 0;                           // 4N
        CVec Vf0;
    };

    SchrodSystem build_schrod(const DampedSystem& sys, int p_exponent, double epsilon,
                              PsiProfile profile, std::optional<DomainBounds> fixed = {},
                              std::vector<std::string>* warnings = nullptr,
                              bool strict = false);

    // W(0, p_j) = psi(p_j) V_f(0); rows index p-nodes, columns state components.
    CMat init_profile(PsiProfile profile, const PGrid& grid, const CVec& Vf0);

    struct EvolveOptions
    {
        int threads = 1;
        int dense_dim_limit = 512; // eigendecomposition path for dim <= limit, Lanczos above
        double krylov_tol = 1e-10;
    };

    struct EvolvedState
    {
        CMat W; // (n_p x 4N) grid function at time t
        double t = 0.0;
        double norm0 = 0.0;
        double normT = 0.0;
        CVec recovered_Vf; // filled by recover()
        CVec recovered_v;
    };

    // Fourier transform along p, then per mode W~_l(t) = e^{-i (nu_l H1 - H2) t} W~_l(0).
    EvolvedState evolve(const SchrodSystem& sys, const CMat& W0, const EvolveOptions& opt = {});
    std::vector<EvolvedState> evolve_at_times(const SchrodSystem& sys, const CMat& W0,
                                              std::span<const double> times,
                                              const EvolveOptions& opt = {});

    enum class RecoveryStrategy
    {
        one_point, // V_f = e^{p_k} W(T, p_k) at the smallest admissible node
        integral   // V_f = e^{p_k} * trapezoid of W(T, q) over q >= p_k
    };

    struct RecoveryResult
    {
        CVec v, w, r_v, r_w; // N-blocks of the recovered V_f
        CVec Vf;
        int node_index = -1;
        double p_node = 0.0;
    };

    // Restores V_f(t) from the warped state and stores v into the state.
    RecoveryResult recover(EvolvedState& state, const PGrid& grid,
                           RecoveryStrategy strategy = RecoveryStrategy::one_point);
} // namespace shz

#endif
