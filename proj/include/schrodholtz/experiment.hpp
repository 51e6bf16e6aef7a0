#ifndef SCHRODHOLTZ_EXPERIMENT_HPP
#define SCHRODHOLTZ_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "schrodholtz/diagnostics.hpp"
#include "schrodholtz/helmholtz.hpp"
#include "schrodholtz/schrod.hpp"
#include "schrodholtz/types.hpp"

namespace shz
{
    enum class PrecondMode
    {
        none,
        real_shift,
        imaginary_shift
    };

    PrecondMode precond_from_name(const std::string& name);
    std::string precond_name(PrecondMode mode);

    struct ExperimentConfig
    {
        double k = 10.0;
        int n = 4; // mesh exponent, h = 2^-n
        int m = 8; // p-grid exponent, N_p = 2^m
        std::optional<double> T; // empty = auto from the stopping rule
        PsiProfile psi = PsiProfile::exp_abs;
        PrecondMode precondition = PrecondMode::none;
        std::optional<DomainBounds> LR; // empty = auto from the truncation criterion
        double epsilon = 1e-3;
        RecoveryStrategy recovery = RecoveryStrategy::one_point;
        int threads = 1;
        std::string out = "run";
        bool strict = false;
        bool timeseries = false;
        long seed = 0; // reserved for randomized studies

        void validate() const;
    };

    struct ExperimentReport
    {
        // ordered key/value pairs; order is part of the output contract
        std::vector<std::pair<std::string, double>> metrics;
        std::vector<std::string> warnings;

        CVec recovered_v;
        CVec x_discrete; // dense solve of the (preconditioned) system
        CVec u_exact;    // closed form sampled on the grid
        std::vector<double> grid_x;

        double T = 0.0;
        double sigma_min = 0.0, sigma_max = 0.0, kappa = 0.0;
        double dp = 0.0;
        double unitarity = 0.0;
        double fitted_rate = 0.0; // exponential rate of ||v(t)-x||, timeseries runs only
        MeasurementReport measurement;
        QueryCost cost;

        std::string solution_path, metrics_path, timeseries_path;
        std::string timeseries_csv; // in-memory table, written by run_experiment

        double metric(const std::string& key) const;
    };

    // Full pipeline without file output: build -> DDS -> Schrodingerize ->
    // evolve -> recover -> diagnostics.
    ExperimentReport run_core(const ExperimentConfig& cfg);

    // run_core plus solution/metrics(/timeseries) CSV files under cfg.out.
    ExperimentReport run_experiment(const ExperimentConfig& cfg);

    enum class SweepKind
    {
        mesh,      // vary n
        pgrid,     // vary m
        wavenumber // vary k
    };

    SweepKind sweep_from_name(const std::string& name);

    struct SweepResult
    {
        std::string table_path;
        std::vector<ExperimentReport> rows;
    };

    // One experiment per value; emits a single plot-ready table CSV. For p-grid
    // sweeps a Richardson rate column is derived from consecutive refinements.
    SweepResult run_convergence_study(const ExperimentConfig& base, SweepKind kind,
                                      const std::vector<double>& values);
} // namespace shz

#endif
