#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wdg/forms.hpp"
#include "wdg/linalg.hpp"
#include "wdg/params.hpp"

namespace wdg {

enum class ExperimentKind { ConvergencePressure, ConvergenceCoupled, Simulate };

const char* experiment_name(ExperimentKind k);

/// Gaussian-in-space, sinusoidal-in-time acoustic source
/// A exp(-|x - x_c|^2 / sigma0^2) sin(2 pi f t).
struct PulseSource {
    double amplitude = 3e11;
    double sigma0 = 2e-4;
    double frequency = 4e5;
    Point center{0.005, 0.005};
};

struct SimulationConfig {
    ExperimentKind experiment = ExperimentKind::Simulate;
    Rect domain{0.0, 0.01, 0.0, 0.01};
    int nx = 40;
    int ny = 40;
    /// Cells in x for each study level; ny follows the domain aspect ratio.
    std::vector<int> levels{8, 12, 16, 20};
    int degree = 1;
    double final_time = 5e-6;
    /// Fixed step; used when dt_constant is unset.
    double dt = 5e-8;
    /// dt = dt_constant * h^(q+1), rounded down to divide T evenly.
    std::optional<double> dt_constant;
    AcousticParams acoustic{1500.0, 1e-6, 1.0, 1500.0};
    TransportParams transport{5.0, 500.0, true, {0.0, 1e-3}};
    double transport_penalty_factor = 2.0;
    std::optional<PenaltySpec> pressure_penalty;
    /// Iterative for the studies; simulate_defaults() selects Direct.
    SolverSpec solver{SolverMethod::Iterative};
    NewmarkSpec newmark;
    PulseSource source;
    double inflow_value = 1.0;
    double initial_concentration = 0.0;
    std::filesystem::path output_dir = "out";
    int vtk_every = 10;

    /// Re-checks positivity of the physical data, dt <= T and the level list.
    void validate() const;
    /// Defaults of the academic convergence studies on [0,1] x [0,2].
    static SimulationConfig convergence_defaults(ExperimentKind kind);
    static SimulationConfig simulate_defaults();
};

/// Parses flat `section.key = value` lines ('#' starts a comment) on top of
/// the defaults selected by the `experiment` key (or `fallback`). Unknown
/// keys, malformed values and repeated keys are ConfigErrors naming the line.
SimulationConfig parse_config(std::istream& in, ExperimentKind fallback);
SimulationConfig load_config(const std::filesystem::path& path, ExperimentKind fallback);

/// Every setting as `key = value` lines, in a form parse_config accepts.
std::string echo_config(const SimulationConfig& cfg);

}  // namespace wdg
