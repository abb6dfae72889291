#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "wdg/config.hpp"
#include "wdg/error.hpp"
#include "wdg/experiments.hpp"

using namespace wdg;

namespace {

SimulationConfig parse(const std::string& text, ExperimentKind k = ExperimentKind::Simulate) {
    std::istringstream in(text);
    return parse_config(in, k);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsPerExperiment) {
    const SimulationConfig sim = parse("");
    EXPECT_EQ(sim.experiment, ExperimentKind::Simulate);
    EXPECT_EQ(sim.nx, 40);
    EXPECT_EQ(sim.acoustic.c, 1500.0);
    EXPECT_TRUE(sim.transport.abs_pressure);
    EXPECT_EQ(sim.solver.method, SolverMethod::Direct);
    const SimulationConfig conv = parse("experiment = convergence-pressure\n");
    EXPECT_EQ(conv.experiment, ExperimentKind::ConvergencePressure);
    EXPECT_EQ(conv.acoustic.kappa, 0.1);
    ASSERT_TRUE(conv.dt_constant.has_value());
}

TEST(Config, ParsesValuesAndComments) {
    const SimulationConfig c = parse(
        "# comment\n"
        "experiment = convergence-coupled\n"
        "space.degree = 2   # trailing comment\n"
        "study.levels = 4, 8,16\n"
        "time.dt_constant = none\n"
        "time.dt = 0.001\n"
        "transport.abs_pressure = true\n"
        "penalty.eta = 55\n"
        "solver.method = direct\n");
    EXPECT_EQ(c.degree, 2);
    EXPECT_EQ(c.levels, (std::vector<int>{4, 8, 16}));
    EXPECT_FALSE(c.dt_constant.has_value());
    EXPECT_EQ(c.dt, 0.001);
    EXPECT_TRUE(c.transport.abs_pressure);
    ASSERT_TRUE(c.pressure_penalty.has_value());
    EXPECT_EQ(c.pressure_penalty->eta, 55.0);
    EXPECT_EQ(c.solver.method, SolverMethod::Direct);
}

TEST(Config, ErrorsNameTheLine) {
    EXPECT_NE(error_of("mesh.nx = 4\nmesh.bogus = 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("mesh.nx = 4\nmesh.nx = 5\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("mesh.nx = four\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("mesh.nx\n").find("line 1"), std::string::npos);
}

TEST(Config, ValidationRejectsBadPhysics) {
    EXPECT_THROW(parse("acoustic.beta = 0\n").validate(), ConfigError);
    EXPECT_THROW(parse("acoustic.alpha = -1\n").validate(), ConfigError);
    EXPECT_THROW(parse("time.T = 1e-6\ntime.dt = 1e-5\n").validate(), ConfigError);
    EXPECT_THROW(parse("experiment = convergence-pressure\nstudy.levels = 8, 4\n").validate(), ConfigError);
}

TEST(Config, EchoRoundTrip) {
    const SimulationConfig a = parse("experiment = convergence-coupled\nspace.degree = 2\nstudy.levels = 4,6\n");
    const std::string text = echo_config(a);
    const SimulationConfig b = parse(text);
    EXPECT_EQ(echo_config(b), text);
    EXPECT_EQ(b.experiment, ExperimentKind::ConvergenceCoupled);
    EXPECT_EQ(b.levels, a.levels);
}

TEST(Config, RuleTimeStepDividesFinalTime) {
    const double dt = rule_time_step(0.5, 0.04, std::sqrt(2.0) / 8.0, 1);
    const double n = 0.5 / dt;
    EXPECT_NEAR(n, std::round(n), 1e-9);
    EXPECT_LE(dt, 0.04 * 2.0 / 64.0 + 1e-15);
}

TEST(Config, StudyReportsPartialResultsOnFailure) {
    SimulationConfig c = SimulationConfig::convergence_defaults(ExperimentKind::ConvergencePressure);
    c.levels = {2, 4, 6};
    c.final_time = 0.05;
    c.acoustic.kappa = 2.0;  // |kappa p| reaches 1 at t = 0
    const StudyReport r = run_convergence_pressure(c);
    ASSERT_TRUE(r.failure.has_value());
    EXPECT_NE(r.failure->find("nx=2"), std::string::npos);
    EXPECT_TRUE(r.levels.empty());
}

TEST(Config, SmallPressureStudyRuns) {
    SimulationConfig c = SimulationConfig::convergence_defaults(ExperimentKind::ConvergencePressure);
    c.levels = {2, 4};
    c.final_time = 0.05;
    const StudyReport r = run_convergence_pressure(c);
    EXPECT_FALSE(r.failure.has_value());
    EXPECT_EQ(r.table("dg_p").rows.size(), 2u);
    EXPECT_THROW(r.table("nope"), ConfigError);
}

TEST(Config, ExampleFilesParse) {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(WDG_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        const SimulationConfig c = load_config(entry.path(), ExperimentKind::Simulate);
        EXPECT_NO_THROW(c.validate()) << entry.path();
        ++count;
    }
    EXPECT_EQ(count, 3);
}
