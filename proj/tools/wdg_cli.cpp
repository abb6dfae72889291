#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>

#include "wdg/checks.hpp"
#include "wdg/error.hpp"
#include "wdg/experiments.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<int> degree;
    std::vector<int> levels;
    std::optional<double> dt_constant;
};

void add_common(CLI::App* sub, Overrides& o, bool study) {
    sub->add_option("--config", o.config, "flat key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (default from config)");
    sub->add_option("--degree", o.degree, "polynomial degree q")->check(CLI::Range(1, 3));
    if (study) {
        sub->add_option("--levels", o.levels, "cells in x per level, coarse to fine")->delimiter(',');
        sub->add_option("--dt-constant", o.dt_constant, "dt = c h^(q+1)");
    }
}

wdg::SimulationConfig make_config(wdg::ExperimentKind kind, const Overrides& o) {
    wdg::SimulationConfig cfg = o.config.empty()
                                    ? (kind == wdg::ExperimentKind::Simulate
                                           ? wdg::SimulationConfig::simulate_defaults()
                                           : wdg::SimulationConfig::convergence_defaults(kind))
                                    : wdg::load_config(o.config, kind);
    if (cfg.experiment != kind) {
        throw wdg::ConfigError(std::string("config file sets experiment = ") + wdg::experiment_name(cfg.experiment));
    }
    if (o.degree) cfg.degree = *o.degree;
    if (!o.levels.empty()) cfg.levels = o.levels;
    if (o.dt_constant) cfg.dt_constant = *o.dt_constant;
    if (!o.out.empty()) cfg.output_dir = o.out;
    cfg.validate();
    return cfg;
}

void print_study(const wdg::StudyReport& r) {
    std::cout << "# degree " << r.degree << '\n';
    for (const auto& t : r.tables) {
        std::cout << t.name << '\n';
        for (const auto& row : t.rows) {
            std::cout << "  h = " << row.h << "  error = " << row.error;
            if (!std::isnan(row.rate)) std::cout << "  rate = " << row.rate;
            std::cout << '\n';
        }
    }
    if (r.failure) std::cout << "FAILED: " << *r.failure << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DG solver for the Westervelt equation coupled to convection-diffusion"};
    app.require_subcommand(1);
    Overrides pressure_o, coupled_o, sim_o;
    auto* pressure = app.add_subcommand("convergence-pressure", "acoustics-only convergence study");
    auto* coupled = app.add_subcommand("convergence-coupled", "coupled convergence study");
    auto* simulate = app.add_subcommand("simulate", "ultrasound-enhanced transport simulation");
    add_common(pressure, pressure_o, true);
    add_common(coupled, coupled_o, true);
    add_common(simulate, sim_o, false);
    auto* selftest = app.add_subcommand("selftest", "fast discretisation invariants and the MMS oracle");
    std::string oracle = WDG_ORACLE_CSV;
    selftest->add_option("--oracle", oracle, "oracle table (x,y,t,nx,ny,f_p,g_abs,f_u,g_in,f_u_abs,g_in_abs)");
    CLI11_PARSE(app, argc, argv);

    if (*selftest) {
        bool ok = true;
        for (const auto& r : {wdg::check_upwind_identity(), wdg::check_sip_coercivity(), wdg::check_linear_energy(),
                              wdg::check_decoupled_limit(), wdg::check_oracle(oracle)}) {
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
            ok = ok && r.passed;
        }
        return ok ? 0 : 1;
    }

    try {
        if (*pressure || *coupled) {
            const bool is_p = static_cast<bool>(*pressure);
            const auto kind = is_p ? wdg::ExperimentKind::ConvergencePressure : wdg::ExperimentKind::ConvergenceCoupled;
            const auto cfg = make_config(kind, is_p ? pressure_o : coupled_o);
            const auto report =
                is_p ? wdg::run_convergence_pressure(cfg, cfg.output_dir) : wdg::run_convergence_coupled(cfg, cfg.output_dir);
            print_study(report);
            std::cout << "results in " << cfg.output_dir.string() << '\n';
            return report.failure ? 3 : 0;
        }
        const auto cfg = make_config(wdg::ExperimentKind::Simulate, sim_o);
        const auto report = wdg::run_simulation(cfg, cfg.output_dir);
        double peak = 0.0;
        for (double d : report.delta) peak = std::max(peak, d);
        std::cout << "peak delta_top = " << peak << "\nfinal delta_top = " << report.delta.back()
                  << "\nresults in " << cfg.output_dir.string() << '\n';
        return 0;
    } catch (const wdg::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
