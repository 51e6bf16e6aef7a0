#ifndef SCHRODHOLTZ_DIAGNOSTICS_HPP
#define SCHRODHOLTZ_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "schrodholtz/schrod.hpp"
#include "schrodholtz/types.hpp"

namespace shz
{
    // Default cap making "e^{p_j} = O(1)" concrete for the recovery index set.
    inline const double default_exp_p_cap = std::exp(2.0);

    struct MeasurementReport
    {
        double Ce = 0.0;      // (sum_k psi(p_k)^2)^{1/2} over the whole grid
        double Ce0 = 0.0;     // same over the recovery index set
        double Pr0 = 0.0;     // ||W(T)||^2 / ||W(0)||^2
        double Pr_star = 0.0; // mass of the recovery nodes within W(T)
        double Pv = 0.0;      // overall probability of extracting |v(T)>
        double g_repeats = 0.0;
    };

    // All probabilities are exact functionals of the classical state; the chain
    // Pv = Pr0 * Pr_star * ||v||^2/||V_f||^2 holds by construction.
    MeasurementReport measurement_report(const EvolvedState& state, const PGrid& grid,
                                         PsiProfile profile, const CVec& b, double T,
                                         double exp_p_cap = default_exp_p_cap);

    struct QueryCostModel
    {
        double alpha_H = 0.0; // block-encoding factor, >= max(||H1||, ||H2||)
        double nu_max = 0.0;
        double delta = 1e-10; // propagator precision target
        double kappa = 0.0;   // condition number of A (or PA)
        double epsilon = 0.0; // target accuracy
        double eta0 = 0.0;    // ||W(0)||

        void validate() const;

        // alpha_H = computed spectral norms plus 5% headroom
        static QueryCostModel from_run(const SchrodSystem& sys, const EvolvedState& state,
                                       double kappa, double epsilon, double delta = 1e-10);
    };

    struct QueryCost
    {
        double be_queries = 0.0; // g (alpha_H nu_max T + log(1/delta))
        double sp_queries = 0.0; // g
    };

    QueryCost query_cost(const QueryCostModel& model, const MeasurementReport& report,
                         double T);

    // delta = epsilon ||v_h|| matching the propagator-precision split of the
    // complexity estimate; eta0/delta then scales like (kappa/eps) log^2(1/eps).
    double proof_delta(double epsilon, double v_norm);

    struct ErrorMetrics
    {
        double l2_rel = 0.0;
        double linf_rel = 0.0;
    };

    ErrorMetrics error_metrics(const CVec& v, const CVec& reference);

    // key = value lines, one per entry, 17 significant digits
    std::string to_kv_text(const std::vector<std::pair<std::string, double>>& entries);
    // one key,value CSV row per entry
    std::string to_kv_csv(const std::vector<std::pair<std::string, double>>& entries);
    // a single CSV row (same formatting), with header helper
    std::string to_csv_header(const std::vector<std::pair<std::string, double>>& entries);
    std::string to_csv_row(const std::vector<std::pair<std::string, double>>& entries);

    std::string format_full(double v); // %.16e
} // namespace shz

#endif
