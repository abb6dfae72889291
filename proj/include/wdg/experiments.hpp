#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wdg/config.hpp"
#include "wdg/mms.hpp"
#include "wdg/transport.hpp"

namespace wdg {

/// Wall-clock seconds spent per phase of a run.
struct PhaseTimes {
    double setup = 0.0;
    double stepping = 0.0;
    double norms = 0.0;
};

struct LevelReport {
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    double dt = 0.0;
    int steps = 0;
    /// Largest max |kappa p^h| over all accepted steps, t = 0 included.
    double max_kappa_p = 0.0;
    int max_fixed_point_iters = 0;
    PhaseTimes times;
};

struct StudyReport {
    ExperimentKind kind;
    int degree = 1;
    std::vector<LevelReport> levels;
    /// Headline tables use the discrete error e^h = (.)^h - P_h(.) with P_h the
    /// L2 projection, starting from projected initial data; the
    /// *_total tables measure against the exact fields.
    std::vector<EocTable> tables;
    /// Set when a level failed; levels and tables cover the completed ones.
    std::optional<std::string> failure;

    const EocTable& table(const std::string& name) const;
};

/// dt = T / ceil(T / (c h^(q+1))).
double rule_time_step(double final_time, double dt_constant, double h, int degree);

/// Acoustics-only study with the academic solution. Records the max-in-time
/// dG seminorm of the pressure error and the max-in-time L2 error of p_t.
/// When `out` is set, writes per-level step logs, eoc.csv and report.txt.
StudyReport run_convergence_pressure(const SimulationConfig& cfg,
                                     const std::optional<std::filesystem::path>& out = std::nullopt);

/// Coupled study: (int_0^T |e^u|_dG^2)^{1/2} and max-in-time L2 of e^u, plus
/// the pressure quantities of the acoustics study.
StudyReport run_convergence_coupled(const SimulationConfig& cfg,
                                    const std::optional<std::filesystem::path>& out = std::nullopt);

struct SimulationReport {
    std::vector<double> times;
    /// int_top u for the pressure-dependent and the D = D0 runs.
    std::vector<double> top;
    std::vector<double> top_ref;
    /// int over the faces with v.n > 0 of the D = D0 run; the denominator of delta.
    std::vector<double> outflow_ref;
    std::vector<double> delta;
    /// Same with the denominator over every Outflow-tagged face (v.n >= 0).
    std::vector<double> outflow_ref_all;
    std::vector<double> delta_all_outflow;
    std::vector<double> mass;
    std::vector<double> max_kappa_p;
    Bounds bounds{0.0, 0.0};
    PhaseTimes times_coupled;
    PhaseTimes times_reference;
};

/// Ultrasound-enhanced transport on the configured domain: the coupled run and
/// a transport-only D = D0 reference, compared at the top boundary. With `out`
/// set, writes delta_top.csv, step logs, VTK snapshots and report.txt.
SimulationReport run_simulation(const SimulationConfig& cfg,
                                const std::optional<std::filesystem::path>& out = std::nullopt);

/// Human-readable summary of a study, config echo first.
std::string format_report(const SimulationConfig& cfg, const StudyReport& report);

}  // namespace wdg
