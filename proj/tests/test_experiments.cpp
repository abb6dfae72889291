#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wdg/error.hpp"
#include "wdg/experiments.hpp"

using namespace wdg;

namespace {

SimulationConfig small_simulation() {
    SimulationConfig c = SimulationConfig::simulate_defaults();
    c.nx = c.ny = 8;
    c.final_time = 5e-7;
    c.vtk_every = 5;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST(Experiments, PolynomialDataIsReproducedExactly) {
    // alpha = 0, kappa = 0, no sources: p = 2 + t/2 solves the problem and
    // lies in the discrete space, and Newmark is exact for it.
    const Mesh mesh = build_rect_mesh({0, 1, 0, 2}, 4, 8);
    for (int q : {1, 2}) {
        const DgSpace s(mesh, q);
        AcousticSolver solver(s, AcousticParams{1.0, 0.1, 0.0, 0.0});
        AcousticState st = solver.init_state([](Point) { return 2.0; }, [](Point) { return 0.5; }, {});
        for (int n = 0; n < 20; ++n) solver.newmark_step(st, 0.01, {});
        const double t = st.t;
        const ErrorNorms e = error_norms(st.p, [](Point, double tt) { return 2.0 + 0.5 * tt; },
                                         [](Point, double) { return Vec2{0.0, 0.0}; }, t);
        EXPECT_LT(e.l2 + e.dg, 1e-11);
    }
}

TEST(Experiments, ZeroSourceGivesZeroRelativeChange) {
    SimulationConfig c = small_simulation();
    c.source.amplitude = 0.0;
    const SimulationReport r = run_simulation(c);
    ASSERT_EQ(r.delta.size(), 11u);
    for (double d : r.delta) EXPECT_EQ(d, 0.0);
    for (double k : r.max_kappa_p) EXPECT_EQ(k, 0.0);
}

TEST(Experiments, SimulationOutputsAndDeterminism) {
    const auto base = std::filesystem::temp_directory_path() / "wdg_test_sim";
    std::filesystem::remove_all(base);
    const SimulationConfig c = small_simulation();
    const SimulationReport r1 = run_simulation(c, base / "a");
    run_simulation(c, base / "b");
    EXPECT_EQ(r1.delta.front(), 0.0);
    EXPECT_GT(r1.delta.back(), 0.0);
    EXPECT_TRUE(std::filesystem::exists(base / "a" / "fields_10.vtk"));
    EXPECT_TRUE(std::filesystem::exists(base / "a" / "report.txt"));
    for (const char* f : {"delta_top.csv", "coupled_steps.csv", "acoustic_steps.csv", "fields_5.vtk"}) {
        EXPECT_EQ(slurp(base / "a" / f), slurp(base / "b" / f)) << f;
    }
    const std::string header = slurp(base / "a" / "delta_top.csv").substr(0, 40);
    EXPECT_EQ(header.rfind("t,delta_top,", 0), 0u);
    std::filesystem::remove_all(base);
}

TEST(Experiments, NonDegeneracyAbortNamesTheStep) {
    SimulationConfig c = small_simulation();
    c.source.amplitude = 3e16;
    try {
        run_simulation(c);
        FAIL() << "expected a failure";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("step"), std::string::npos) << e.what();
    }
}
