// schrodholtz: classical emulator of a Schrodingerized quantum solver for the
// dispersion-corrected 1D Helmholtz equation. Runs single experiments or
// convergence sweeps and writes plot-ready CSV data.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schrodholtz/experiment.hpp"

namespace
{
    shz::DomainBounds parse_lr(const std::string& text)
    {
        const auto comma = text.find(',');
        if (comma == std::string::npos)
            throw shz::config_error("cli: --lr expects 'auto' or 'L,R'");
        try
        {
            shz::DomainBounds lr;
            lr.L = std::stod(text.substr(0, comma));
            lr.R = std::stod(text.substr(comma + 1));
            return lr;
        }
        catch (const std::exception&)
        {
            throw shz::config_error("cli: cannot parse --lr value '" + text + "'");
        }
    }

    std::vector<double> parse_values(const std::string& text)
    {
        std::vector<double> out;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            if (item.empty())
                continue;
            try
            {
                out.push_back(std::stod(item));
            }
            catch (const std::exception&)
            {
                throw shz::config_error("cli: cannot parse sweep value '" + item + "'");
            }
        }
        return out;
    }

    struct Flags
    {
        double k = 10.0;
        int n = 4;
        int m = 8;
        std::string t = "auto";
        std::string psi = "exp";
        std::string precondition = "none";
        std::string lr = "auto";
        double epsilon = 1e-3;
        std::string recovery = "point";
        int threads = 1;
        std::string out = "run";
        bool strict = false;
        bool timeseries = false;
        long seed = 0;
    };

    // Expands `--config FILE` into option tokens. The file holds flat key=value
    // lines mirroring the flags; explicit command-line flags take precedence.
    std::vector<std::string> expand_config(int argc, char** argv)
    {
        std::vector<std::string> args(argv + 1, argv + argc);
        auto cfg_it = std::find(args.begin(), args.end(), "--config");
        if (cfg_it == args.end())
            return args;
        if (std::next(cfg_it) == args.end())
            throw shz::config_error("cli: --config expects a file path");
        const std::string path = *std::next(cfg_it);
        args.erase(cfg_it, std::next(cfg_it, 2));

        std::ifstream in(path);
        if (!in)
            throw shz::config_error("cli: cannot read config file '" + path + "'");
        std::vector<std::string> extra;
        std::string line;
        while (std::getline(in, line))
        {
            const auto start = line.find_first_not_of(" \t");
            if (start == std::string::npos || line[start] == '#')
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw shz::config_error("cli: config line is not key=value: '" + line + "'");
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw shz::config_error("cli: empty key in config line '" + line + "'");
            // flags given on the command line win (either --key v or --key=v form)
            const std::string flag = "--" + key;
            const bool overridden =
                std::any_of(args.begin(), args.end(), [&flag](const std::string& a) {
                    return a == flag || a.rfind(flag + "=", 0) == 0;
                });
            if (overridden)
                continue;
            if (value == "true")
                extra.push_back("--" + key);
            else
            {
                extra.push_back("--" + key);
                extra.push_back(value);
            }
        }
        // insert after the subcommand name so the options bind to it
        args.insert(args.size() > 1 ? args.begin() + 1 : args.end(), extra.begin(),
                    extra.end());
        return args;
    }

    void add_common_flags(CLI::App* cmd, Flags& f)
    {
        cmd->add_option("--k", f.k, "wavenumber");
        cmd->add_option("--n", f.n, "mesh exponent, h = 2^-n");
        cmd->add_option("--m", f.m, "p-grid exponent, N_p = 2^m");
        cmd->add_option("--t", f.t, "final time, or 'auto' for the stopping rule");
        cmd->add_option("--psi", f.psi, "profile: exp | cubic");
        cmd->add_option("--precondition", f.precondition, "none | real | imag");
        cmd->add_option("--lr", f.lr, "'auto' or explicit 'L,R' p-domain bounds");
        cmd->add_option("--epsilon", f.epsilon, "target accuracy in (0,1)");
        cmd->add_option("--recovery", f.recovery, "point | integral");
        cmd->add_option("--threads", f.threads, "mode-parallel worker threads");
        cmd->add_option("--out", f.out, "output path prefix");
        cmd->add_flag("--strict", f.strict, "escalate resolution warnings to errors");
        cmd->add_flag("--timeseries", f.timeseries, "emit checkpointed error time-series");
        cmd->add_option("--seed", f.seed, "reserved for randomized studies");
    }

    shz::ExperimentConfig to_config(const Flags& f)
    {
        shz::ExperimentConfig cfg;
        cfg.k = f.k;
        cfg.n = f.n;
        cfg.m = f.m;
        if (f.t != "auto")
        {
            try
            {
                cfg.T = std::stod(f.t);
            }
            catch (const std::exception&)
            {
                throw shz::config_error("cli: --t expects a number or 'auto'");
            }
        }
        cfg.psi = shz::psi_from_name(f.psi);
        cfg.precondition = shz::precond_from_name(f.precondition);
        if (f.lr != "auto")
            cfg.LR = parse_lr(f.lr);
        cfg.epsilon = f.epsilon;
        if (f.recovery == "point")
            cfg.recovery = shz::RecoveryStrategy::one_point;
        else if (f.recovery == "integral")
            cfg.recovery = shz::RecoveryStrategy::integral;
        else
            throw shz::config_error("cli: unknown recovery strategy '" + f.recovery + "'");
        cfg.threads = f.threads;
        cfg.out = f.out;
        cfg.strict = f.strict;
        cfg.timeseries = f.timeseries;
        cfg.seed = f.seed;
        return cfg;
    }

    void print_summary(const shz::ExperimentReport& rep)
    {
        for (const auto& w : rep.warnings)
            std::cout << "warning: " << w << "\n";
        std::printf("T = %.6g   sigma_min = %.6g   kappa = %.6g\n", rep.T, rep.sigma_min,
                    rep.kappa);
        std::printf("rel error vs discrete solve: l2 = %.3e, linf = %.3e\n",
                    rep.metric("l2_rel_vs_x"), rep.metric("linf_rel_vs_x"));
        std::printf("rel error vs closed form:    l2 = %.3e, linf = %.3e\n",
                    rep.metric("l2_rel_vs_u"), rep.metric("linf_rel_vs_u"));
        std::printf("unitarity ratio = %.12f   Pv = %.3e   g = %.6g\n", rep.unitarity,
                    rep.measurement.Pv, rep.measurement.g_repeats);
        if (!rep.solution_path.empty())
            std::printf("wrote %s, %s\n", rep.solution_path.c_str(), rep.metrics_path.c_str());
        if (!rep.timeseries_path.empty())
            std::printf("wrote %s\n", rep.timeseries_path.c_str());
    }
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Schrodingerized Helmholtz solver emulator"};
    app.require_subcommand(1);

    Flags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common_flags(run_cmd, run_flags);

    Flags sweep_flags;
    std::string vary = "n";
    std::string values_text;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a convergence study");
    add_common_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--vary", vary, "swept parameter: n | m | k");
    sweep_cmd->add_option("--values", values_text, "comma-separated sweep values")
        ->required();

    try
    {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
        app.parse(args);
    }
    catch (const shz::config_error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help and friends
        app.exit(e);
        return 2;
    }

    try
    {
        if (sweep_cmd->parsed())
        {
            const shz::ExperimentConfig cfg = to_config(sweep_flags);
            const auto kind = shz::sweep_from_name(vary);
            const auto values = parse_values(values_text);
            const shz::SweepResult res = shz::run_convergence_study(cfg, kind, values);
            for (const auto& row : res.rows)
                for (const auto& w : row.warnings)
                    std::cout << "warning: " << w << "\n";
            std::printf("wrote %s (%zu rows)\n", res.table_path.c_str(), res.rows.size());
        }
        else
        {
            const shz::ExperimentConfig cfg = to_config(run_flags);
            const shz::ExperimentReport rep = shz::run_experiment(cfg);
            print_summary(rep);
        }
    }
    catch (const shz::config_error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::domain_error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
