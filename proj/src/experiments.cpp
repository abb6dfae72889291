#include "wdg/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "wdg/error.hpp"
#include "wdg/io.hpp"

namespace wdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int aspect_ny(const SimulationConfig& cfg, int nx) {
    const double r = (cfg.domain.y1 - cfg.domain.y0) / (cfg.domain.x1 - cfg.domain.x0);
    return std::max(1, static_cast<int>(std::lround(nx * r)));
}

SolverSpec acoustic_spec(const SimulationConfig& cfg) {
    SolverSpec s = cfg.solver;
    s.symmetric = true;
    return s;
}

SolverSpec transport_spec(const SimulationConfig& cfg) {
    SolverSpec s = cfg.solver;
    s.symmetric = false;
    return s;
}

std::unique_ptr<std::ofstream> open_csv(const std::optional<std::filesystem::path>& dir, const std::string& name) {
    if (!dir) return nullptr;
    auto f = std::make_unique<std::ofstream>(*dir / name);
    if (!*f) throw ConfigError("cannot write " + (*dir / name).string());
    f->precision(15);
    return f;
}

int step_count(double final_time, double dt) {
    return static_cast<int>(std::lround(final_time / dt));
}

// Stride giving about 100 total-error samples per run.
int total_stride(int steps) { return std::max(1, steps / 100); }

struct Series {
    std::vector<double> values;
    void push(double v) { values.push_back(v); }
};

struct LevelErrors {
    // name -> value per level
    std::vector<std::pair<std::string, double>> values;
    void set(const std::string& name, double v) { values.emplace_back(name, v); }
};

LevelErrors run_pressure_level(const SimulationConfig& cfg, int nx, LevelReport& rep, std::ostream* log) {
    const auto t_setup = Clock::now();
    const int ny = aspect_ny(cfg, nx);
    Mesh mesh = build_rect_mesh(cfg.domain, nx, ny);
    DgSpace space(mesh, cfg.degree);
    const ExactSolution exact = academic_solution();
    AcousticSolver solver(space, cfg.acoustic, cfg.newmark, cfg.pressure_penalty, acoustic_spec(cfg));
    AcousticSources src;
    src.load = academic_pressure_load(space, cfg.acoustic);
    // Initial data and the discrete error both use the L2 projection.
    const DiscreteNorms projector(space);
    AcousticState st = solver.init_state(projector.project(exact.p, 0.0), projector.project(exact.p_t, 0.0), src);
    rep.nx = nx;
    rep.ny = ny;
    rep.h = mesh.mesh_size();
    rep.dt = cfg.dt_constant ? rule_time_step(cfg.final_time, *cfg.dt_constant, rep.h, cfg.degree) : cfg.dt;
    rep.steps = step_count(cfg.final_time, rep.dt);
    rep.max_kappa_p = max_abs_kappa_p(st.p, cfg.acoustic.kappa);
    TripleNormTracker discrete(space, exact, cfg.acoustic.beta, TripleNormTracker::Mode::Discrete);
    rep.times.setup = seconds_since(t_setup);

    double dg = 0.0, l2 = 0.0, dg_total = 0.0, l2_total = 0.0;
    const int stride = total_stride(rep.steps);
    auto sample = [&](int n, const NewmarkStepInfo& info) {
        const auto t0 = Clock::now();
        const TripleNormComponents c = discrete.update(st);
        dg = std::max(dg, c.dg_p);
        l2 = std::max(l2, c.l2_pdot);
        if (n % stride == 0 || n == rep.steps) {
            dg_total = std::max(dg_total, error_norms(st.p, exact.p, exact.grad_p, st.t).dg);
            l2_total = std::max(l2_total, error_norms(st.pdot, exact.p_t, exact.grad_p_t, st.t).l2);
        }
        if (log) write_acoustic_log_row(*log, st.t, info, solver.energy(st), &c);
        rep.times.norms += seconds_since(t0);
    };
    if (log) write_acoustic_log_header(*log, true);
    NewmarkStepInfo info0;
    info0.max_kappa_p = rep.max_kappa_p;
    sample(0, info0);
    for (int n = 1; n <= rep.steps; ++n) {
        const auto t0 = Clock::now();
        // Set the clock from the step index so that T is hit exactly.
        const NewmarkStepInfo info = solver.newmark_step(st, rep.dt, src);
        st.t = n * rep.dt;
        rep.times.stepping += seconds_since(t0);
        rep.max_kappa_p = std::max(rep.max_kappa_p, info.max_kappa_p);
        rep.max_fixed_point_iters = std::max(rep.max_fixed_point_iters, info.iterations);
        sample(n, info);
    }
    LevelErrors e;
    e.set("dg_p", dg);
    e.set("l2_pdot", l2);
    e.set("dg_p_total", dg_total);
    e.set("l2_pdot_total", l2_total);
    return e;
}

LevelErrors run_coupled_level(const SimulationConfig& cfg, int nx, LevelReport& rep, std::ostream* log) {
    const auto t_setup = Clock::now();
    const int ny = aspect_ny(cfg, nx);
    Mesh mesh = build_rect_mesh(cfg.domain, nx, ny);
    mesh.classify_boundary(cfg.transport.v);
    DgSpace space(mesh, cfg.degree);
    const ExactSolution exact = academic_solution();
    AcousticSolver acoustics(space, cfg.acoustic, cfg.newmark, cfg.pressure_penalty, acoustic_spec(cfg));
    TransportSolver transport(space, cfg.transport, transport_spec(cfg), cfg.transport_penalty_factor);
    AcousticSources asrc;
    asrc.load = academic_pressure_load(space, cfg.acoustic);
    TransportSources tsrc;
    if (cfg.transport.abs_pressure) {
        tsrc.f = forcing_concentration(exact, cfg.transport);
        tsrc.g_in = inflow_data(exact, cfg.transport);
    } else {
        tsrc.load = academic_transport_load(space, cfg.transport);
    }
    DiscreteNorms norms(space);
    AcousticState ps = acoustics.init_state(norms.project(exact.p, 0.0), norms.project(exact.p_t, 0.0), asrc);
    TransportState us = transport.init_state(norms.project(exact.u, 0.0));
    rep.nx = nx;
    rep.ny = ny;
    rep.h = mesh.mesh_size();
    rep.dt = cfg.dt_constant ? rule_time_step(cfg.final_time, *cfg.dt_constant, rep.h, cfg.degree) : cfg.dt;
    rep.steps = step_count(cfg.final_time, rep.dt);
    rep.max_kappa_p = max_abs_kappa_p(ps.p, cfg.acoustic.kappa);
    TripleNormTracker pressure_err(space, exact, cfg.acoustic.beta, TripleNormTracker::Mode::Discrete);
    rep.times.setup = seconds_since(t_setup);

    TimeAccumulator dg_u, dg_u_total;
    double l2_u = 0.0, l2_u_total = 0.0, dg_p = 0.0, l2_pdot = 0.0;
    const int stride = total_stride(rep.steps);
    double last_total_t = -1.0;
    auto sample = [&](int n) {
        const auto t0 = Clock::now();
        const ErrorNorms eu = norms.discrete_error(us.u, exact.u, us.t);
        dg_u.add(us.t, eu.dg);
        l2_u = std::max(l2_u, eu.l2);
        const TripleNormComponents cp = pressure_err.update(ps);
        dg_p = std::max(dg_p, cp.dg_p);
        l2_pdot = std::max(l2_pdot, cp.l2_pdot);
        if (n % stride == 0 || n == rep.steps) {
            const ErrorNorms tu = error_norms(us.u, exact.u, exact.grad_u, us.t);
            // Left rectangles on the coarser sampling grid.
            if (last_total_t < us.t) dg_u_total.add(us.t, tu.dg);
            last_total_t = us.t;
            l2_u_total = std::max(l2_u_total, tu.l2);
        }
        if (log) {
            const Bounds b = bounds_monitor(us.u);
            write_transport_log_row(*log, us.t, b, total_mass(us.u), &eu);
        }
        rep.times.norms += seconds_since(t0);
    };
    if (log) write_transport_log_header(*log, true);
    sample(0);
    for (int n = 1; n <= rep.steps; ++n) {
        const auto t0 = Clock::now();
        const CoupledStepInfo info = coupled_step(acoustics, ps, transport, us, rep.dt, asrc, tsrc);
        ps.t = us.t = n * rep.dt;
        rep.times.stepping += seconds_since(t0);
        rep.max_kappa_p = std::max(rep.max_kappa_p, info.acoustic.max_kappa_p);
        rep.max_fixed_point_iters = std::max(rep.max_fixed_point_iters, info.acoustic.iterations);
        sample(n);
    }
    LevelErrors e;
    e.set("dg_u", dg_u.l2_left());
    e.set("l2_u", l2_u);
    e.set("dg_u_total", dg_u_total.l2_left());
    e.set("l2_u_total", l2_u_total);
    e.set("dg_p", dg_p);
    e.set("l2_pdot", l2_pdot);
    return e;
}

using LevelFn = std::function<LevelErrors(const SimulationConfig&, int, LevelReport&, std::ostream*)>;

StudyReport run_study(const SimulationConfig& cfg, ExperimentKind kind, const LevelFn& level,
                      const std::optional<std::filesystem::path>& out) {
    if (cfg.experiment != kind) throw ConfigError("config is not for " + std::string(experiment_name(kind)));
    cfg.validate();
    if (!cfg.dt_constant) throw ConfigError("convergence studies need time.dt_constant");
    if (out) std::filesystem::create_directories(*out);
    StudyReport report;
    report.kind = kind;
    report.degree = cfg.degree;
    std::vector<LevelErrors> errors;
    for (int nx : cfg.levels) {
        LevelReport rep;
        auto log = open_csv(out, std::string(kind == ExperimentKind::ConvergencePressure ? "pressure" : "coupled") +
                                     "_q" + std::to_string(cfg.degree) + "_nx" + std::to_string(nx) + ".csv");
        try {
            errors.push_back(level(cfg, nx, rep, log.get()));
        } catch (const std::exception& ex) {
            std::ostringstream os;
            os << "level nx=" << nx << " failed: " << ex.what();
            report.failure = os.str();
            break;
        }
        report.levels.push_back(rep);
    }
    if (errors.size() >= 2) {
        std::vector<double> hs;
        for (const auto& l : report.levels) hs.push_back(l.h);
        for (std::size_t j = 0; j < errors.front().values.size(); ++j) {
            std::vector<double> es;
            for (const auto& e : errors) es.push_back(e.values[j].second);
            try {
                report.tables.push_back(eoc(es, hs, errors.front().values[j].first));
            } catch (const ConfigError& ex) {
                if (!report.failure) report.failure = std::string("eoc: ") + ex.what();
            }
        }
    }
    if (out) {
        std::ofstream eoc_file(*out / "eoc.csv");
        write_eoc_csv(eoc_file, report.tables);
        if (report.failure) eoc_file << "FAILED,," << '"' << *report.failure << '"' << ",\n";
        std::ofstream rep_file(*out / "report.txt");
        rep_file << format_report(cfg, report);
    }
    return report;
}

}  // namespace

const EocTable& StudyReport::table(const std::string& name) const {
    for (const auto& t : tables) {
        if (t.name == name) return t;
    }
    throw ConfigError("no EOC table named " + name);
}

double rule_time_step(double final_time, double dt_constant, double h, int degree) {
    const double target = dt_constant * std::pow(h, degree + 1);
    const double n = std::ceil(final_time / target - 1e-9);
    return final_time / n;
}

StudyReport run_convergence_pressure(const SimulationConfig& cfg, const std::optional<std::filesystem::path>& out) {
    return run_study(cfg, ExperimentKind::ConvergencePressure, run_pressure_level, out);
}

StudyReport run_convergence_coupled(const SimulationConfig& cfg, const std::optional<std::filesystem::path>& out) {
    return run_study(cfg, ExperimentKind::ConvergenceCoupled, run_coupled_level, out);
}

namespace {

std::string step_context(int n, double dt) {
    std::ostringstream os;
    os << "coupled run aborted at step " << n << " (t = " << n * dt << "): ";
    return os.str();
}

}  // namespace

SimulationReport run_simulation(const SimulationConfig& cfg, const std::optional<std::filesystem::path>& out) {
    if (cfg.experiment != ExperimentKind::Simulate) throw ConfigError("config is not for simulate");
    cfg.validate();
    if (out) std::filesystem::create_directories(*out);
    SimulationReport rep;
    auto t_setup = Clock::now();
    Mesh mesh = build_rect_mesh(cfg.domain, cfg.nx, cfg.ny);
    mesh.classify_boundary(cfg.transport.v);
    DgSpace space(mesh, cfg.degree);
    const double dt = cfg.dt_constant
                          ? rule_time_step(cfg.final_time, *cfg.dt_constant, mesh.mesh_size(), cfg.degree)
                          : cfg.dt;
    const int steps = step_count(cfg.final_time, dt);
    if (std::abs(steps * dt - cfg.final_time) > 1e-9 * cfg.final_time) {
        throw ConfigError("time.dt must divide time.T");
    }

    AcousticSolver acoustics(space, cfg.acoustic, cfg.newmark, cfg.pressure_penalty, acoustic_spec(cfg));
    const PulseSource ps = cfg.source;
    AcousticSources asrc;
    asrc.load.add_term([ps](double t) { return ps.amplitude * std::sin(2.0 * std::numbers::pi * ps.frequency * t); },
                       assemble_load(space,
                                     [ps](Point x, double) {
                                         const Point d = x - ps.center;
                                         return std::exp(-dot(d, d) / (ps.sigma0 * ps.sigma0));
                                     },
                                     0.0));
    TransportSources tsrc;
    const double g = cfg.inflow_value;
    tsrc.load.add_term([g](double) { return -g; },
                       assemble_boundary_load(space, [](Point, Vec2, double) { return 1.0; }, boundary_inflow(),
                                              cfg.transport.v, 0.0));
    TransportSolver coupled_tr(space, cfg.transport, transport_spec(cfg), cfg.transport_penalty_factor);
    TransportSolver reference_tr(space, cfg.transport, transport_spec(cfg), cfg.transport_penalty_factor);

    AcousticState pst = acoustics.init_state([](Point) { return 0.0; }, [](Point) { return 0.0; }, asrc);
    const double u0 = cfg.initial_concentration;
    TransportState ust = coupled_tr.init_state([u0](Point) { return u0; });
    TransportState ref = reference_tr.init_state([u0](Point) { return u0; });
    rep.times_coupled.setup = seconds_since(t_setup);

    auto log = open_csv(out, "coupled_steps.csv");
    auto alog = open_csv(out, "acoustic_steps.csv");
    if (log) write_transport_log_header(*log, false);
    if (alog) write_acoustic_log_header(*alog, false);
    const FacePredicate top = boundary_side(Side::Top);
    const FacePredicate outflow = boundary_strict_outflow(cfg.transport.v);
    const FacePredicate outflow_all = boundary_outflow();
    rep.bounds = bounds_monitor(ust.u);
    auto record = [&](int n, const NewmarkStepInfo& info) {
        const auto t0 = Clock::now();
        rep.times.push_back(ust.t);
        rep.top.push_back(boundary_integral(ust.u, top));
        rep.top_ref.push_back(boundary_integral(ref.u, top));
        rep.outflow_ref.push_back(boundary_integral(ref.u, outflow));
        rep.outflow_ref_all.push_back(boundary_integral(ref.u, outflow_all));
        rep.mass.push_back(total_mass(ust.u));
        rep.max_kappa_p.push_back(info.max_kappa_p);
        const Bounds b = bounds_monitor(ust.u);
        rep.bounds.min = std::min(rep.bounds.min, b.min);
        rep.bounds.max = std::max(rep.bounds.max, b.max);
        if (log) write_transport_log_row(*log, ust.t, b, rep.mass.back(), nullptr);
        if (alog) write_acoustic_log_row(*alog, pst.t, info, acoustics.energy(pst), nullptr);
        if (out && cfg.vtk_every > 0 && n % cfg.vtk_every == 0) {
            std::ofstream vtk(*out / ("fields_" + std::to_string(n) + ".vtk"));
            write_vtk_fields(vtk, space, {{"pressure", &pst.p}, {"concentration", &ust.u}}, ust.t);
        }
        rep.times_coupled.norms += seconds_since(t0);
    };
    NewmarkStepInfo info0;
    info0.max_kappa_p = max_abs_kappa_p(pst.p, cfg.acoustic.kappa);
    record(0, info0);
    for (int n = 1; n <= steps; ++n) {
        auto t0 = Clock::now();
        NewmarkStepInfo info;
        try {
            info = coupled_step(acoustics, pst, coupled_tr, ust, dt, asrc, tsrc).acoustic;
        } catch (const ModelError& ex) {
            throw ModelError(step_context(n, dt) + ex.what());
        } catch (const SolverError& ex) {
            throw SolverError(step_context(n, dt) + ex.what(), ex.residual());
        }
        pst.t = ust.t = n * dt;
        rep.times_coupled.stepping += seconds_since(t0);
        t0 = Clock::now();
        reference_tr.backward_euler_step(ref, nullptr, dt, tsrc);
        ref.t = n * dt;
        rep.times_reference.stepping += seconds_since(t0);
        record(n, info);
    }
    rep.delta = relative_change_top(rep.top, rep.top_ref, rep.outflow_ref);
    rep.delta_all_outflow = relative_change_top(rep.top, rep.top_ref, rep.outflow_ref_all);
    if (out) {
        auto csv = open_csv(out, "delta_top.csv");
        *csv << "t,delta_top,top,top_ref,outflow_ref,delta_top_all_outflow,outflow_ref_all\n";
        for (std::size_t i = 0; i < rep.times.size(); ++i) {
            *csv << rep.times[i] << ',' << rep.delta[i] << ',' << rep.top[i] << ',' << rep.top_ref[i] << ','
                 << rep.outflow_ref[i] << ',' << rep.delta_all_outflow[i] << ',' << rep.outflow_ref_all[i] << '\n';
        }
        std::ofstream r(*out / "report.txt");
        r << "# configuration\n" << echo_config(cfg) << "\n# mesh: " << cfg.nx << " x " << cfg.ny
          << " cells per direction, " << mesh.num_elements() << " triangles, h = " << mesh.mesh_size() << '\n';
        double peak = 0.0, kp = 0.0;
        for (double d : rep.delta) peak = std::max(peak, d);
        for (double k : rep.max_kappa_p) kp = std::max(kp, k);
        double peak_all = 0.0;
        for (double d : rep.delta_all_outflow) peak_all = std::max(peak_all, d);
        r << "# mesh read as nx x ny cells per direction, each split into two triangles\n";
        r << "# peak delta_top = " << peak << "\n# final delta_top = " << rep.delta.back()
          << "\n# peak delta_top with tangential faces in the denominator = " << peak_all
          << "\n# max |kappa p| = " << kp << "\n# u range = [" << rep.bounds.min << ", " << rep.bounds.max
          << "]\n# seconds: setup " << rep.times_coupled.setup << ", coupled stepping "
          << rep.times_coupled.stepping << ", reference stepping " << rep.times_reference.stepping
          << ", diagnostics " << rep.times_coupled.norms << '\n';
    }
    return rep;
}

std::string format_report(const SimulationConfig& cfg, const StudyReport& report) {
    std::ostringstream os;
    os << "# configuration\n" << echo_config(cfg) << '\n';
    os << "# levels: nx ny h dt steps max|kappa p| max_fixed_point_iters setup_s stepping_s norms_s\n";
    for (const auto& l : report.levels) {
        os << l.nx << ' ' << l.ny << ' ' << l.h << ' ' << l.dt << ' ' << l.steps << ' ' << l.max_kappa_p << ' '
           << l.max_fixed_point_iters << ' ' << l.times.setup << ' ' << l.times.stepping << ' ' << l.times.norms
           << '\n';
    }
    os << "\n# EOC tables\n";
    write_eoc_csv(os, report.tables);
    if (report.failure) os << "\n# FAILED: " << *report.failure << '\n';
    return os.str();
}

}  // namespace wdg
