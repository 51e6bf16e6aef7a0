#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "oracles.hpp"
#include "schrodholtz/diagnostics.hpp"
#include "schrodholtz/dds.hpp"
#include "schrodholtz/helmholtz.hpp"
#include "schrodholtz/linalg.hpp"

using namespace shz;

namespace
{
    struct Run
    {
        DiscreteHelmholtz dh;
        DampedSystem dds;
        SchrodSystem sys;
        EvolvedState state;
        RecoveryResult rec;

        Run(double eps, int m, PsiProfile psi, int n = 4)
            : dh(build_system(HelmholtzProblem::robin_line(10.0, n)))
        {
            dds = build_damped(dh.dense(), dh.b, eps,
                               std::make_pair(dh.sigma_min, dh.sigma_max));
            sys = build_schrod(dds, m, eps, psi);
            state = evolve(sys, init_profile(psi, sys.grid, sys.Vf0));
            rec = recover(state, sys.grid);
        }
    };
} // namespace

TEST_CASE("measurement probabilities and the identity chain")
{
    Run run(1e-3, 8, PsiProfile::exp_abs);
    const MeasurementReport rep =
        measurement_report(run.state, run.sys.grid, PsiProfile::exp_abs, run.dh.b, run.dds.T);

    CHECK(rep.Ce0 <= rep.Ce);
    CHECK(rep.Pr0 >= 0.0);
    CHECK(rep.Pr0 <= 1.0);
    CHECK(rep.Pr_star >= 0.0);
    CHECK(rep.Pr_star <= 1.0);
    CHECK(rep.Pv >= 0.0);
    CHECK(rep.Pv <= 1.0);

    // Pr0 is the measured norm ratio
    CHECK(rep.Pr0
          == doctest::Approx(std::min(1.0, std::pow(run.state.normT / run.state.norm0, 2)))
                 .epsilon(1e-12));

    // Ce sums over the full grid
    double ce2 = 0.0;
    for (int j = 0; j < run.sys.grid.n_p; ++j)
        ce2 += std::pow(psi_value(PsiProfile::exp_abs, run.sys.grid.node(j)), 2);
    CHECK(rep.Ce == doctest::Approx(std::sqrt(ce2)).epsilon(1e-13));

    // Ce0^2/Ce^2 <= 1/(2e) up to grid slack
    CHECK(rep.Ce0 * rep.Ce0 / (rep.Ce * rep.Ce)
          <= (1.0 / (2.0 * std::exp(1.0))) * (1.0 + 5.0 * run.sys.grid.dp));

    // identity chain against independently recomputed factors
    const int k_star = run.sys.grid.first_node_at_or_above(0.5);
    const CVec Vf = std::exp(run.sys.grid.node(k_star)) * run.state.W.row(k_star).transpose();
    const double ratio = Vf.head(run.dds.n).squaredNorm() / Vf.squaredNorm();
    CHECK(std::abs(rep.Pv - rep.Pr0 * rep.Pr_star * ratio) < 1e-10);

    // g = Ce/Ce0 * T ||b|| / ||v(T)||
    const double g_want = (rep.Ce / rep.Ce0) * run.dds.T * run.dh.b.norm()
                          / Vf.head(run.dds.n).norm();
    CHECK(rep.g_repeats == doctest::Approx(g_want).epsilon(1e-12));
}

TEST_CASE("repeat count is controlled by kappa log(1/eps)")
{
    const double eps = 1e-3;
    Run run(eps, 8, PsiProfile::exp_abs);
    const MeasurementReport rep =
        measurement_report(run.state, run.sys.grid, PsiProfile::exp_abs, run.dh.b, run.dds.T);
    const double kappa = run.dh.sigma_max / run.dh.sigma_min;
    CHECK(rep.g_repeats <= 10.0 * kappa * std::log(1.0 / eps));
}

TEST_CASE("query-cost estimator")
{
    Run run(1e-3, 7, PsiProfile::exp_abs);
    const MeasurementReport rep =
        measurement_report(run.state, run.sys.grid, PsiProfile::exp_abs, run.dh.b, run.dds.T);
    QueryCostModel model = QueryCostModel::from_run(run.sys, run.state,
                                                    run.dh.sigma_max / run.dh.sigma_min, 1e-3);

    CHECK(model.alpha_H >= hermitian_norm(CMat(run.sys.H1)));
    CHECK(model.alpha_H >= hermitian_norm(CMat(run.sys.H2)));
    CHECK(model.nu_max == doctest::Approx(run.sys.grid.nu_max()));
    CHECK(model.eta0 == doctest::Approx(run.state.norm0));

    const QueryCost c1 = query_cost(model, rep, run.dds.T);
    const QueryCost c2 = query_cost(model, rep, 2.0 * run.dds.T);
    CHECK(c1.sp_queries == doctest::Approx(rep.g_repeats));
    // doubling T doubles the leading term exactly
    const double log_term = rep.g_repeats * std::log(1.0 / model.delta);
    CHECK(c2.be_queries - log_term
          == doctest::Approx(2.0 * (c1.be_queries - log_term)).epsilon(1e-12));

    QueryCostModel bad = model;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(query_cost(bad, rep, run.dds.T), std::domain_error);
}

TEST_CASE("proof-scale propagator precision")
{
    const double eps = 1e-3;
    Run run(eps, 8, PsiProfile::exp_abs);
    const double kappa = run.dh.sigma_max / run.dh.sigma_min;
    const double vnorm = run.rec.v.norm();

    const double delta = proof_delta(eps, vnorm);
    CHECK(delta == doctest::Approx(eps * vnorm));
    const double logeps = std::log(1.0 / eps);
    // eta0/delta stays within the (kappa/eps) log^2(1/eps) scale
    CHECK(run.state.norm0 / delta <= (kappa / eps) * logeps * logeps);
}

TEST_CASE("preconditioned versus plain cost estimate tracks the kappa ratio")
{
    const double eps = 1e-3;

    Run plain(eps, 7, PsiProfile::exp_abs);
    const MeasurementReport rep_plain = measurement_report(
        plain.state, plain.sys.grid, PsiProfile::exp_abs, plain.dh.b, plain.dds.T);
    const double kappa_plain = plain.dh.sigma_max / plain.dh.sigma_min;
    const QueryCost cost_plain = query_cost(
        QueryCostModel::from_run(plain.sys, plain.state, kappa_plain, eps), rep_plain,
        plain.dds.T);

    // same mesh, shifted-Laplacian left preconditioning
    const DiscreteHelmholtz dh = build_system(HelmholtzProblem::robin_line(10.0, 4));
    const PreconditionedSystem pre = build_preconditioned(dh, ShiftMode::real_shift);
    DampedSystem dds = build_damped(pre.PA, pre.Pb, eps,
                                    std::make_pair(pre.sigma_min, pre.sigma_max));
    SchrodSystem sys = build_schrod(dds, 7, eps, PsiProfile::exp_abs);
    EvolvedState state = evolve(sys, init_profile(PsiProfile::exp_abs, sys.grid, sys.Vf0));
    const MeasurementReport rep_pre =
        measurement_report(state, sys.grid, PsiProfile::exp_abs, pre.Pb, dds.T);
    const QueryCost cost_pre = query_cost(
        QueryCostModel::from_run(sys, state, pre.kappa_estimate, eps), rep_pre, dds.T);

    const double cost_ratio = cost_pre.be_queries / cost_plain.be_queries;
    const double kappa_ratio = std::pow(pre.kappa_estimate / kappa_plain, 2);
    CHECK(cost_ratio < 4.0 * kappa_ratio);
    CHECK(cost_ratio > 0.25 * kappa_ratio);
}

TEST_CASE("quadrature sums approach the continuum normalizations")
{
    // dp Ce^2 -> integral of e^{-2|p|} = 1 and, with the index-set cap lifted,
    // dp Ce0^2 -> integral from 1/2 of e^{-2p} = e^{-1}/2, both first order in dp
    PGrid grid;
    grid.L = grid.R = 18.0;
    grid.n_p = 2048;
    grid.dp = 36.0 / 2048.0;
    grid.nodes.resize(2049);
    for (int j = 0; j <= 2048; ++j)
        grid.nodes[std::size_t(j)] = -18.0 + j * grid.dp;

    EvolvedState state;
    state.W = CMat::Ones(2048, 4);
    state.norm0 = state.normT = state.W.norm();
    CVec b = CVec::Ones(1);

    const MeasurementReport rep =
        measurement_report(state, grid, PsiProfile::exp_abs, b, 1.0, /*cap=*/1e9);
    CHECK(grid.dp * rep.Ce * rep.Ce == doctest::Approx(1.0).epsilon(0.05));
    CHECK(grid.dp * rep.Ce0 * rep.Ce0
          == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("error metrics")
{
    const CVec ref = oracle::random_vector(9, 91);
    const ErrorMetrics zero = error_metrics(ref, ref);
    CHECK(zero.l2_rel == 0.0);
    CHECK(zero.linf_rel == 0.0);

    const ErrorMetrics twice = error_metrics(2.0 * ref, ref);
    CHECK(twice.l2_rel == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(twice.linf_rel == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(error_metrics(ref, CVec::Zero(9)), std::domain_error);
    CHECK_THROWS_AS(error_metrics(ref, CVec::Ones(3)), std::domain_error);
}

TEST_CASE("report serialization")
{
    std::vector<std::pair<std::string, double>> entries{{"a", 1.0}, {"b", 0.5}};
    const std::string kv = to_kv_text(entries);
    CHECK(kv == "a = 1.0000000000000000e+00\nb = 5.0000000000000000e-01\n");
    CHECK(to_kv_csv(entries)
          == "key,value\na,1.0000000000000000e+00\nb,5.0000000000000000e-01\n");
    CHECK(to_csv_header(entries) == "a,b\n");
    CHECK(to_csv_row(entries) == "1.0000000000000000e+00,5.0000000000000000e-01\n");
    CHECK(format_full(0.1) == "1.0000000000000001e-01"); // lossless round-trip digits
}
