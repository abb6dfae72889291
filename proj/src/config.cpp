#include "wdg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "wdg/error.hpp"

namespace wdg {

const char* experiment_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::ConvergencePressure: return "convergence-pressure";
        case ExperimentKind::ConvergenceCoupled: return "convergence-coupled";
        case ExperimentKind::Simulate: return "simulate";
    }
    return "?";
}

namespace {

ExperimentKind parse_experiment(const std::string& s) {
    for (auto k : {ExperimentKind::ConvergencePressure, ExperimentKind::ConvergenceCoupled,
                   ExperimentKind::Simulate}) {
        if (s == experiment_name(k)) return k;
    }
    throw ConfigError("unknown experiment '" + s + "'");
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

int to_int(const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<int> to_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(trim(item)));
    return out;
}

using Setter = std::function<void(SimulationConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto dbl = [&t](const std::string& key, auto member) {
            t[key] = [member](SimulationConfig& c, const std::string& v) { member(c) = to_double(v); };
        };
        dbl("domain.x0", [](SimulationConfig& c) -> double& { return c.domain.x0; });
        dbl("domain.x1", [](SimulationConfig& c) -> double& { return c.domain.x1; });
        dbl("domain.y0", [](SimulationConfig& c) -> double& { return c.domain.y0; });
        dbl("domain.y1", [](SimulationConfig& c) -> double& { return c.domain.y1; });
        dbl("time.T", [](SimulationConfig& c) -> double& { return c.final_time; });
        dbl("time.dt", [](SimulationConfig& c) -> double& { return c.dt; });
        dbl("acoustic.c", [](SimulationConfig& c) -> double& { return c.acoustic.c; });
        dbl("acoustic.beta", [](SimulationConfig& c) -> double& { return c.acoustic.beta; });
        dbl("acoustic.kappa", [](SimulationConfig& c) -> double& { return c.acoustic.kappa; });
        dbl("acoustic.alpha", [](SimulationConfig& c) -> double& { return c.acoustic.alpha; });
        dbl("transport.d0", [](SimulationConfig& c) -> double& { return c.transport.d0; });
        dbl("transport.d1", [](SimulationConfig& c) -> double& { return c.transport.d1; });
        dbl("transport.vx", [](SimulationConfig& c) -> double& { return c.transport.v.x; });
        dbl("transport.vy", [](SimulationConfig& c) -> double& { return c.transport.v.y; });
        dbl("transport.penalty_factor", [](SimulationConfig& c) -> double& { return c.transport_penalty_factor; });
        dbl("solver.tolerance", [](SimulationConfig& c) -> double& { return c.solver.tolerance; });
        dbl("newmark.beta", [](SimulationConfig& c) -> double& { return c.newmark.beta; });
        dbl("newmark.gamma", [](SimulationConfig& c) -> double& { return c.newmark.gamma; });
        dbl("newmark.tolerance", [](SimulationConfig& c) -> double& { return c.newmark.tolerance; });
        dbl("source.amplitude", [](SimulationConfig& c) -> double& { return c.source.amplitude; });
        dbl("source.sigma0", [](SimulationConfig& c) -> double& { return c.source.sigma0; });
        dbl("source.frequency", [](SimulationConfig& c) -> double& { return c.source.frequency; });
        dbl("source.x", [](SimulationConfig& c) -> double& { return c.source.center.x; });
        dbl("source.y", [](SimulationConfig& c) -> double& { return c.source.center.y; });
        dbl("inflow.g_in", [](SimulationConfig& c) -> double& { return c.inflow_value; });
        dbl("initial.u0", [](SimulationConfig& c) -> double& { return c.initial_concentration; });

        t["mesh.nx"] = [](SimulationConfig& c, const std::string& v) { c.nx = to_int(v); };
        t["mesh.ny"] = [](SimulationConfig& c, const std::string& v) { c.ny = to_int(v); };
        t["study.levels"] = [](SimulationConfig& c, const std::string& v) { c.levels = to_int_list(v); };
        t["space.degree"] = [](SimulationConfig& c, const std::string& v) { c.degree = to_int(v); };
        t["time.dt_constant"] = [](SimulationConfig& c, const std::string& v) {
            if (v == "none") c.dt_constant.reset();
            else c.dt_constant = to_double(v);
        };
        t["transport.abs_pressure"] = [](SimulationConfig& c, const std::string& v) {
            c.transport.abs_pressure = to_bool(v);
        };
        t["penalty.sigma"] = [](SimulationConfig& c, const std::string& v) {
            if (!c.pressure_penalty) c.pressure_penalty = PenaltySpec::pressure_default(c.degree);
            c.pressure_penalty->sigma = to_double(v);
        };
        t["penalty.eta"] = [](SimulationConfig& c, const std::string& v) {
            if (!c.pressure_penalty) c.pressure_penalty = PenaltySpec::pressure_default(c.degree);
            c.pressure_penalty->eta = to_double(v);
        };
        t["solver.method"] = [](SimulationConfig& c, const std::string& v) {
            if (v == "direct") c.solver.method = SolverMethod::Direct;
            else if (v == "iterative") c.solver.method = SolverMethod::Iterative;
            else throw ConfigError("solver.method must be direct or iterative");
        };
        t["solver.max_iter"] = [](SimulationConfig& c, const std::string& v) { c.solver.max_iter = to_int(v); };
        t["newmark.max_iter"] = [](SimulationConfig& c, const std::string& v) { c.newmark.max_iter = to_int(v); };
        t["output.dir"] = [](SimulationConfig& c, const std::string& v) { c.output_dir = v; };
        t["output.vtk_every"] = [](SimulationConfig& c, const std::string& v) { c.vtk_every = to_int(v); };
        return t;
    }();
    return table;
}

}  // namespace

SimulationConfig SimulationConfig::convergence_defaults(ExperimentKind kind) {
    SimulationConfig c;
    c.experiment = kind;
    c.domain = {0.0, 1.0, 0.0, 2.0};
    c.nx = 8;
    c.ny = 16;
    c.levels = {8, 12, 16, 20};
    c.final_time = 0.5;
    c.dt_constant = 0.04;
    c.acoustic = {1.0, 0.1, 0.1, 1.0};
    c.transport = {1.0, 1.0, false, {0.0, 1.0}};
    c.source.amplitude = 0.0;
    return c;
}

SimulationConfig SimulationConfig::simulate_defaults() {
    SimulationConfig cfg;
    // The large transport penalty stalls BiCGSTAB at these parameters.
    cfg.solver = SolverSpec{SolverMethod::Direct};
    return cfg;
}

void SimulationConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    require(domain.x1 > domain.x0 && domain.y1 > domain.y0, "domain must have positive extent");
    require(nx >= 1 && ny >= 1, "mesh.nx and mesh.ny must be positive");
    require(degree >= 1 && degree <= 3, "space.degree must be 1, 2 or 3");
    require(final_time > 0.0, "time.T must be positive");
    if (dt_constant) {
        require(*dt_constant > 0.0, "time.dt_constant must be positive");
    } else {
        require(dt > 0.0 && dt <= final_time, "time.dt must lie in (0, T]");
    }
    // Experiments run in the damped, absorbing regime.
    acoustic.validate();
    require(acoustic.beta > 0.0, "acoustic.beta must be positive");
    require(acoustic.alpha > 0.0, "acoustic.alpha must be positive");
    transport.validate();
    require(transport_penalty_factor > 1.0, "transport.penalty_factor must exceed 1");
    if (pressure_penalty) {
        require(pressure_penalty->sigma > 0.0 && pressure_penalty->eta > 0.0, "penalty must be positive");
    }
    solver.validate();
    newmark.validate();
    if (experiment != ExperimentKind::Simulate) {
        require(levels.size() >= 2, "study.levels needs at least two entries");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            require(levels[i] >= 1, "study.levels entries must be positive");
            if (i > 0) require(levels[i] > levels[i - 1], "study.levels must increase");
        }
    }
    require(vtk_every >= 0, "output.vtk_every must be non-negative");
}

SimulationConfig parse_config(std::istream& in, ExperimentKind fallback) {
    struct Entry {
        int line;
        std::string key, value;
    };
    std::vector<Entry> entries;
    std::set<std::string> seen;
    std::string raw;
    int lineno = 0;
    std::optional<ExperimentKind> kind;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        Entry e{lineno, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
        if (!seen.insert(e.key).second) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + e.key + "'");
        }
        if (e.key == "experiment") {
            kind = parse_experiment(e.value);
            continue;
        }
        entries.push_back(std::move(e));
    }
    const ExperimentKind k = kind.value_or(fallback);
    SimulationConfig cfg = k == ExperimentKind::Simulate ? SimulationConfig::simulate_defaults()
                                                          : SimulationConfig::convergence_defaults(k);
    // Degree first so penalty defaults follow it.
    std::stable_partition(entries.begin(), entries.end(),
                          [](const Entry& e) { return e.key == "space.degree"; });
    const auto& table = setters();
    for (const Entry& e : entries) {
        const auto it = table.find(e.key);
        if (it == table.end()) {
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        }
        try {
            it->second(cfg, e.value);
        } catch (const ConfigError& err) {
            throw ConfigError("line " + std::to_string(e.line) + " (" + e.key + "): " + err.what());
        }
    }
    cfg.validate();
    return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path, ExperimentKind fallback) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, fallback);
}

std::string echo_config(const SimulationConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "experiment = " << experiment_name(c.experiment) << '\n';
    os << "domain.x0 = " << c.domain.x0 << "\ndomain.x1 = " << c.domain.x1 << "\ndomain.y0 = " << c.domain.y0
       << "\ndomain.y1 = " << c.domain.y1 << '\n';
    os << "mesh.nx = " << c.nx << "\nmesh.ny = " << c.ny << '\n';
    os << "study.levels = ";
    for (std::size_t i = 0; i < c.levels.size(); ++i) os << (i ? "," : "") << c.levels[i];
    os << "\nspace.degree = " << c.degree << '\n';
    os << "time.T = " << c.final_time << "\ntime.dt = " << c.dt << "\ntime.dt_constant = ";
    if (c.dt_constant) os << *c.dt_constant;
    else os << "none";
    os << "\nacoustic.c = " << c.acoustic.c << "\nacoustic.beta = " << c.acoustic.beta
       << "\nacoustic.kappa = " << c.acoustic.kappa << "\nacoustic.alpha = " << c.acoustic.alpha << '\n';
    os << "transport.d0 = " << c.transport.d0 << "\ntransport.d1 = " << c.transport.d1
       << "\ntransport.abs_pressure = " << (c.transport.abs_pressure ? "true" : "false")
       << "\ntransport.vx = " << c.transport.v.x << "\ntransport.vy = " << c.transport.v.y
       << "\ntransport.penalty_factor = " << c.transport_penalty_factor << '\n';
    const PenaltySpec pen = c.pressure_penalty.value_or(PenaltySpec::pressure_default(c.degree));
    os << "penalty.sigma = " << pen.sigma << "\npenalty.eta = " << pen.eta << '\n';
    os << "solver.method = " << (c.solver.method == SolverMethod::Direct ? "direct" : "iterative")
       << "\nsolver.tolerance = " << c.solver.tolerance << "\nsolver.max_iter = " << c.solver.max_iter << '\n';
    os << "newmark.beta = " << c.newmark.beta << "\nnewmark.gamma = " << c.newmark.gamma
       << "\nnewmark.tolerance = " << c.newmark.tolerance << "\nnewmark.max_iter = " << c.newmark.max_iter
       << '\n';
    os << "source.amplitude = " << c.source.amplitude << "\nsource.sigma0 = " << c.source.sigma0
       << "\nsource.frequency = " << c.source.frequency << "\nsource.x = " << c.source.center.x
       << "\nsource.y = " << c.source.center.y << '\n';
    os << "inflow.g_in = " << c.inflow_value << "\ninitial.u0 = " << c.initial_concentration << '\n';
    os << "output.dir = " << c.output_dir.string() << "\noutput.vtk_every = " << c.vtk_every << '\n';
    return os.str();
}

}  // namespace wdg
