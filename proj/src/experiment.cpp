#include "schrodholtz/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/LU>

#include "schrodholtz/dds.hpp"
#include "schrodholtz/linalg.hpp"

namespace shz
{
    namespace
    {
        constexpr int n_checkpoints = 32;

        std::vector<double> checkpoint_times(double T)
        {
            // 32 logarithmically spaced times over [T/1000, T]
            std::vector<double> t(n_checkpoints);
            const double lo = std::log(T / 1000.0);
            const double hi = std::log(T);
            for (int i = 0; i < n_checkpoints; ++i)
                t[std::size_t(i)] = std::exp(lo + (hi - lo) * double(i) / double(n_checkpoints - 1));
            t.back() = T;
            return t;
        }

        void write_file(const std::string& path, const std::string& content)
        {
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw config_error("cli: cannot open output file '" + path + "'");
            out << content;
        }

        double linf(const CVec& a, const CVec& b)
        {
            return (a - b).cwiseAbs().maxCoeff();
        }
    } // namespace

    PrecondMode precond_from_name(const std::string& name)
    {
        if (name == "none")
            return PrecondMode::none;
        if (name == "real")
            return PrecondMode::real_shift;
        if (name == "imag")
            return PrecondMode::imaginary_shift;
        throw config_error("cli: unknown precondition mode '" + name
                           + "' (use none, real or imag)");
    }

    std::string precond_name(PrecondMode mode)
    {
        switch (mode)
        {
        case PrecondMode::none: return "none";
        case PrecondMode::real_shift: return "real";
        default: return "imag";
        }
    }

    SweepKind sweep_from_name(const std::string& name)
    {
        if (name == "n")
            return SweepKind::mesh;
        if (name == "m")
            return SweepKind::pgrid;
        if (name == "k")
            return SweepKind::wavenumber;
        throw config_error("cli: unknown sweep parameter '" + name + "' (use n, m or k)");
    }

    void ExperimentConfig::validate() const
    {
        if (k <= 0.0)
            throw config_error("cli: k must be positive");
        if (n < 1 || n > 20)
            throw config_error("cli: mesh exponent n must lie in [1, 20]");
        if (m < 1 || m > 20)
            throw config_error("cli: p-grid exponent m must lie in [1, 20]");
        if (epsilon <= 0.0 || epsilon >= 1.0)
            throw config_error("cli: epsilon must lie in (0, 1)");
        if (T && *T <= 0.0)
            throw config_error("cli: explicit final time must be positive");
        if (LR && (LR->L <= 0.0 || LR->R <= 0.0))
            throw config_error("cli: explicit L and R must be positive");
        if (threads < 1 || threads > 512)
            throw config_error("cli: threads must lie in [1, 512]");
        if (out.empty())
            throw config_error("cli: output prefix must not be empty");
    }

    double ExperimentReport::metric(const std::string& key) const
    {
        for (const auto& [name, value] : metrics)
            if (name == key)
                return value;
        throw std::domain_error("experiment: no metric named '" + key + "'");
    }

    ExperimentReport run_core(const ExperimentConfig& cfg)
    {
        cfg.validate();
        ExperimentReport rep;

        // discretize
        const HelmholtzProblem prob = HelmholtzProblem::robin_line(cfg.k, cfg.n);
        const DiscreteHelmholtz dh = build_system(prob);
        const int N = dh.size();

        // effective system (A, b) or (PA, Pb)
        CMat Aeff;
        CVec beff;
        double smin, smax;
        if (cfg.precondition == PrecondMode::none)
        {
            Aeff = dh.dense();
            beff = dh.b;
            smin = dh.sigma_min;
            smax = dh.sigma_max;
        }
        else
        {
            const auto pre = build_preconditioned(
                dh, cfg.precondition == PrecondMode::real_shift ? ShiftMode::real_shift
                                                                : ShiftMode::imaginary_shift);
            Aeff = pre.PA;
            beff = pre.Pb;
            smin = pre.sigma_min;
            smax = pre.sigma_max;
        }
        rep.sigma_min = smin;
        rep.sigma_max = smax;
        rep.kappa = smax / smin;

        // damped system; the stopping rule consumes a third of the error budget
        DampedSystem dds = build_damped(Aeff, beff, cfg.epsilon / 3.0,
                                        std::make_pair(smin, smax));
        const double t_bound = std::log(1.0 / cfg.epsilon) / smin;
        if (cfg.T)
        {
            set_final_time(dds, *cfg.T);
            if (*cfg.T < t_bound)
                rep.warnings.push_back("final time T = " + std::to_string(*cfg.T)
                                       + " is below the stopping bound "
                                       + std::to_string(t_bound)
                                       + " for the target accuracy");
        }
        rep.T = dds.T;

        // lift to the warped p-domain and evolve
        const SchrodSystem sys = build_schrod(dds, cfg.m, cfg.epsilon, cfg.psi, cfg.LR,
                                              &rep.warnings, cfg.strict);
        rep.dp = sys.grid.dp;
        const CMat W0 = init_profile(cfg.psi, sys.grid, sys.Vf0);

        EvolveOptions opt;
        opt.threads = cfg.threads;

        std::vector<double> times;
        if (cfg.timeseries)
            times = checkpoint_times(dds.T);
        else
            times = {dds.T};

        std::vector<EvolvedState> states = evolve_at_times(sys, W0, times, opt);
        EvolvedState& final_state = states.back();
        const RecoveryResult rec = recover(final_state, sys.grid, cfg.recovery);
        rep.recovered_v = rec.v;
        rep.unitarity = final_state.normT / final_state.norm0;

        // references
        rep.x_discrete = Aeff.partialPivLu().solve(beff);
        rep.u_exact = CVec(N);
        rep.grid_x = dh.grid;
        for (int i = 0; i < N; ++i)
            rep.u_exact(i) = exact_solution(cfg.k, dh.grid[std::size_t(i)]);

        const ErrorMetrics err_x = error_metrics(rec.v, rep.x_discrete);
        const ErrorMetrics err_u = error_metrics(rec.v, rep.u_exact);

        // measurement and cost estimators
        rep.measurement = measurement_report(final_state, sys.grid, cfg.psi, beff, dds.T);
        const QueryCostModel model =
            QueryCostModel::from_run(sys, final_state, rep.kappa, cfg.epsilon);
        rep.cost = query_cost(model, rep.measurement, dds.T);

        // exponential rate fit over the tail of the checkpoint series
        rep.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        std::string ts_csv;
        if (cfg.timeseries)
        {
            ts_csv = "t,linf_vs_x,l2_vs_x,linf_vs_u,l2_vs_u\n";
            std::vector<double> fit_t, fit_y;
            for (auto& st : states)
            {
                RecoveryResult r = recover(st, sys.grid, cfg.recovery);
                const double ex = linf(r.v, rep.x_discrete);
                const double eu = linf(r.v, rep.u_exact);
                ts_csv += format_full(st.t) + "," + format_full(ex) + ","
                          + format_full((r.v - rep.x_discrete).norm()) + ","
                          + format_full(eu) + "," + format_full((r.v - rep.u_exact).norm())
                          + "\n";
                if (st.t >= 0.5 * dds.T && ex > 1e-15)
                {
                    fit_t.push_back(st.t);
                    fit_y.push_back(std::log(ex));
                }
            }
            if (fit_t.size() >= 2)
                rep.fitted_rate = -fit_slope(fit_t, fit_y);
        }

        rep.metrics = {
            {"k", cfg.k},
            {"n", double(cfg.n)},
            {"m", double(cfg.m)},
            {"N", double(N)},
            {"h", dh.h},
            {"kh", cfg.k * dh.h},
            {"k_hat", dh.k_hat},
            {"precondition", double(int(cfg.precondition))},
            {"T", dds.T},
            {"gamma", dds.gamma},
            {"sigma_min", smin},
            {"sigma_max", smax},
            {"kappa", rep.kappa},
            {"epsilon", cfg.epsilon},
            {"L", sys.grid.L},
            {"R", sys.grid.R},
            {"n_p", double(sys.grid.n_p)},
            {"dp", sys.grid.dp},
            {"nu_max", sys.grid.nu_max()},
            {"p_recovery_node", rec.p_node},
            {"norm0", final_state.norm0},
            {"normT", final_state.normT},
            {"unitarity", rep.unitarity},
            {"l2_rel_vs_x", err_x.l2_rel},
            {"linf_rel_vs_x", err_x.linf_rel},
            {"l2_rel_vs_u", err_u.l2_rel},
            {"linf_rel_vs_u", err_u.linf_rel},
            {"Ce", rep.measurement.Ce},
            {"Ce0", rep.measurement.Ce0},
            {"Pr0", rep.measurement.Pr0},
            {"Pr_star", rep.measurement.Pr_star},
            {"Pv", rep.measurement.Pv},
            {"g_repeats", rep.measurement.g_repeats},
            {"alpha_H", model.alpha_H},
            {"delta", model.delta},
            {"be_queries", rep.cost.be_queries},
            {"sp_queries", rep.cost.sp_queries},
            {"fitted_rate", rep.fitted_rate},
            {"warning_count", double(rep.warnings.size())},
        };

        rep.timeseries_csv = std::move(ts_csv);
        return rep;
    }

    ExperimentReport run_experiment(const ExperimentConfig& cfg)
    {
        ExperimentReport rep = run_core(cfg);

        std::string sol = "x,re_u_exact,im_u_exact,re_v,im_v\n";
        for (std::size_t i = 0; i < rep.grid_x.size(); ++i)
        {
            sol += format_full(rep.grid_x[i]) + ","
                   + format_full(rep.u_exact(Eigen::Index(i)).real()) + ","
                   + format_full(rep.u_exact(Eigen::Index(i)).imag()) + ","
                   + format_full(rep.recovered_v(Eigen::Index(i)).real()) + ","
                   + format_full(rep.recovered_v(Eigen::Index(i)).imag()) + "\n";
        }
        const std::string sol_path = cfg.out + "_solution.csv";
        write_file(sol_path, sol);

        const std::string met_path = cfg.out + "_metrics.csv";
        write_file(met_path, to_kv_csv(rep.metrics));

        if (cfg.timeseries)
        {
            const std::string ts_path = cfg.out + "_timeseries.csv";
            write_file(ts_path, rep.timeseries_csv);
            rep.timeseries_path = ts_path;
        }

        rep.solution_path = sol_path;
        rep.metrics_path = met_path;
        return rep;
    }

    SweepResult run_convergence_study(const ExperimentConfig& base, SweepKind kind,
                                      const std::vector<double>& values)
    {
        if (values.empty())
            throw config_error("cli: sweep values must not be empty");

        SweepResult result;
        result.rows.reserve(values.size());
        const double kh_base = base.k * std::pow(2.0, -base.n);
        for (double value : values)
        {
            ExperimentConfig cfg = base;
            cfg.timeseries = true; // rates per row
            switch (kind)
            {
            case SweepKind::mesh: cfg.n = int(std::lround(value)); break;
            case SweepKind::pgrid: cfg.m = int(std::lround(value)); break;
            case SweepKind::wavenumber:
                // track the base kh as closely as the dyadic mesh allows
                cfg.k = value;
                cfg.n = std::max(1, int(std::lround(std::log2(value / kh_base))));
                break;
            }
            result.rows.push_back(run_core(cfg));
        }

        // Richardson rate from consecutive p-grid refinements (same mesh)
        std::vector<double> richardson(values.size(),
                                       std::numeric_limits<double>::quiet_NaN());
        if (kind == SweepKind::pgrid)
        {
            for (std::size_t i = 2; i < result.rows.size(); ++i)
            {
                const double d1 =
                    (result.rows[i - 2].recovered_v - result.rows[i - 1].recovered_v).norm();
                const double d2 =
                    (result.rows[i - 1].recovered_v - result.rows[i].recovered_v).norm();
                if (d1 > 0 && d2 > 0)
                    richardson[i] = std::log2(d1 / d2);
            }
        }

        std::string table = "sweep,value,k,n,m,N,T,sigma_min,sigma_max,kappa,dp,"
                            "l2_rel_vs_x,linf_rel_vs_x,l2_rel_vs_u,linf_rel_vs_u,"
                            "fitted_rate,richardson_rate,Ce,Ce0,Pv,g_repeats,"
                            "be_queries,sp_queries,unitarity\n";
        const std::string kind_name = kind == SweepKind::mesh      ? "n"
                                      : kind == SweepKind::pgrid   ? "m"
                                                                   : "k";
        for (std::size_t i = 0; i < result.rows.size(); ++i)
        {
            const ExperimentReport& r = result.rows[i];
            table += kind_name + "," + format_full(values[i]);
            for (const char* key : {"k", "n", "m", "N", "T", "sigma_min", "sigma_max",
                                    "kappa", "dp", "l2_rel_vs_x", "linf_rel_vs_x",
                                    "l2_rel_vs_u", "linf_rel_vs_u", "fitted_rate"})
                table += "," + format_full(r.metric(key));
            table += "," + format_full(richardson[i]);
            for (const char* key : {"Ce", "Ce0", "Pv", "g_repeats", "be_queries",
                                    "sp_queries", "unitarity"})
                table += "," + format_full(r.metric(key));
            table += "\n";
        }

        result.table_path = base.out + "_sweep.csv";
        write_file(result.table_path, table);
        return result;
    }
} // namespace shz
