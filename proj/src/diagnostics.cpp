#include "schrodholtz/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "schrodholtz/linalg.hpp"

namespace shz
{
    MeasurementReport measurement_report(const EvolvedState& state, const PGrid& grid,
                                         PsiProfile profile, const CVec& b, double T,
                                         double exp_p_cap)
    {
        const int dim = int(state.W.cols());
        const int N = dim / 4;

        double ce2 = 0.0, ce02 = 0.0;
        double mass_all = 0.0, mass_rec = 0.0;
        int k_star = -1;
        for (int j = 0; j < grid.n_p; ++j)
        {
            const double p = grid.node(j);
            const double psi2 = psi_value(profile, p) * psi_value(profile, p);
            const double row_mass = state.W.row(j).squaredNorm();
            ce2 += psi2;
            mass_all += row_mass;
            if (p >= recovery_threshold && std::exp(p) <= exp_p_cap)
            {
                ce02 += psi2;
                mass_rec += row_mass;
                if (k_star < 0)
                    k_star = j;
            }
        }
        if (k_star < 0)
            throw numerical_error("diagnostics: recovery index set is empty "
                                  "(no node with p >= 1/2 and e^p within the cap)");

        MeasurementReport rep;
        rep.Ce = std::sqrt(ce2);
        rep.Ce0 = std::sqrt(ce02);
        // exact unitarity can overshoot 1 by rounding; probabilities stay in [0,1]
        rep.Pr0 = std::min(1.0, (state.normT * state.normT) / (state.norm0 * state.norm0));
        rep.Pr_star = std::min(1.0, mass_rec / mass_all);

        // projection of the collapsed state onto the v-block at the first
        // admissible node
        const CVec Vf = std::exp(grid.node(k_star)) * state.W.row(k_star).transpose();
        const double vf2 = Vf.squaredNorm();
        const double v2 = Vf.head(N).squaredNorm();
        rep.Pv = rep.Pr0 * rep.Pr_star * (v2 / vf2);

        const double v_norm = std::sqrt(v2);
        if (v_norm == 0.0)
            throw numerical_error("diagnostics: recovered v(T) vanishes, repeat count undefined");
        rep.g_repeats = (rep.Ce / rep.Ce0) * (T * b.norm()) / v_norm;
        return rep;
    }

    void QueryCostModel::validate() const
    {
        if (alpha_H <= 0 || nu_max <= 0 || delta <= 0 || kappa <= 0 || epsilon <= 0 || eta0 <= 0)
            throw std::domain_error("diagnostics: query-cost model fields must be positive");
    }

    QueryCostModel QueryCostModel::from_run(const SchrodSystem& sys, const EvolvedState& state,
                                            double kappa, double epsilon, double delta)
    {
        QueryCostModel m;
        const double n1 = hermitian_norm(CMat(sys.H1));
        const double n2 = hermitian_norm(CMat(sys.H2));
        m.alpha_H = 1.05 * std::max(n1, n2);
        m.nu_max = sys.grid.nu_max();
        m.delta = delta;
        m.kappa = kappa;
        m.epsilon = epsilon;
        m.eta0 = state.norm0;
        return m;
    }

    QueryCost query_cost(const QueryCostModel& model, const MeasurementReport& report,
                         double T)
    {
        model.validate();
        QueryCost c;
        c.be_queries = report.g_repeats
                       * (model.alpha_H * model.nu_max * T + std::log(1.0 / model.delta));
        c.sp_queries = report.g_repeats;
        return c;
    }

    double proof_delta(double epsilon, double v_norm)
    {
        if (epsilon <= 0.0 || v_norm <= 0.0)
            throw std::domain_error("diagnostics: proof_delta needs positive inputs");
        return epsilon * v_norm;
    }

    ErrorMetrics error_metrics(const CVec& v, const CVec& reference)
    {
        if (v.size() != reference.size())
            throw std::domain_error("diagnostics: error_metrics length mismatch");
        const double ref2 = reference.norm();
        const double refinf = reference.cwiseAbs().maxCoeff();
        if (ref2 == 0.0 || refinf == 0.0)
            throw std::domain_error("diagnostics: zero reference norm");
        ErrorMetrics m;
        m.l2_rel = (v - reference).norm() / ref2;
        m.linf_rel = (v - reference).cwiseAbs().maxCoeff() / refinf;
        return m;
    }

    std::string format_full(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.16e", v);
        return buf;
    }

    std::string to_kv_text(const std::vector<std::pair<std::string, double>>& entries)
    {
        std::string out;
        for (const auto& [key, value] : entries)
            out += key + " = " + format_full(value) + "\n";
        return out;
    }

    std::string to_kv_csv(const std::vector<std::pair<std::string, double>>& entries)
    {
        std::string out = "key,value\n";
        for (const auto& [key, value] : entries)
            out += key + "," + format_full(value) + "\n";
        return out;
    }

    std::string to_csv_header(const std::vector<std::pair<std::string, double>>& entries)
    {
        std::string out;
        for (std::size_t i = 0; i < entries.size(); ++i)
            out += (i ? "," : "") + entries[i].first;
        return out + "\n";
    }

    std::string to_csv_row(const std::vector<std::pair<std::string, double>>& entries)
    {
        std::string out;
        for (std::size_t i = 0; i < entries.size(); ++i)
            out += (i ? "," : "") + format_full(entries[i].second);
        return out + "\n";
    }
} // namespace shz
