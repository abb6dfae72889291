#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wdg/acoustics.hpp"
#include "wdg/checks.hpp"
#include "wdg/error.hpp"

using namespace wdg;
using std::numbers::pi;

namespace {

double max_abs(const FieldVector& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

PointFn bump() {
    return [](Point x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
}

PointFn zero() {
    return [](Point) { return 0.0; };
}

}  // namespace

TEST(Acoustics, ZeroDataStaysZero) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 4, 4);
    const DgSpace s(mesh, 1);
    AcousticSolver solver(s, AcousticParams{1.0, 0.1, 0.1, 1.0});
    AcousticState st = solver.init_state(zero(), zero(), {});
    EXPECT_EQ(max_abs(st.pddot), 0.0);
    for (int n = 0; n < 5; ++n) solver.newmark_step(st, 0.05, {});
    EXPECT_EQ(max_abs(st.p) + max_abs(st.pdot) + max_abs(st.pddot), 0.0);
    EXPECT_NEAR(st.t, 0.25, 1e-15);
}

TEST(Acoustics, LinearCaseUsesOneSolve) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 4, 4);
    const DgSpace s(mesh, 2);
    AcousticSolver solver(s, AcousticParams{1.0, 0.1, 0.0, 1.0});
    AcousticState st = solver.init_state(bump(), zero(), {});
    for (int n = 0; n < 3; ++n) EXPECT_EQ(solver.newmark_step(st, 0.02, {}).iterations, 1);
}

TEST(Acoustics, NonlinearFixedPointConverges) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 4, 4);
    const DgSpace s(mesh, 2);
    AcousticSolver solver(s, AcousticParams{1.0, 0.1, 0.5, 1.0});
    AcousticState st = solver.init_state(bump(), bump(), {});
    const NewmarkStepInfo info = solver.newmark_step(st, 0.02, {});
    EXPECT_GT(info.iterations, 1);
    EXPECT_LT(info.iterations, 20);
    EXPECT_GT(info.max_kappa_p, 0.3);
    EXPECT_LT(info.max_kappa_p, 0.6);
}

TEST(Acoustics, FixedPointBudgetExhaustedThrows) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 4, 4);
    const DgSpace s(mesh, 1);
    NewmarkSpec nm;
    nm.max_iter = 1;
    AcousticSolver solver(s, AcousticParams{1.0, 0.1, 0.5, 1.0}, nm);
    AcousticState st = solver.init_state(bump(), bump(), {});
    EXPECT_THROW(solver.newmark_step(st, 0.02, {}), SolverError);
}

TEST(Acoustics, NonDegeneracyMonitor) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 2, 2);
    const DgSpace s(mesh, 1);
    const FieldVector two = interpolate(s, [](Point) { return 2.0; });
    EXPECT_NEAR(max_abs_kappa_p(two, 0.3), 0.6, 1e-14);
    EXPECT_NEAR(check_nondegenerate(two, -0.3, 0.0), 0.6, 1e-14);
    EXPECT_THROW(check_nondegenerate(two, 0.5, 0.0), ModelError);
    AcousticSolver solver(s, AcousticParams{1.0, 0.1, 0.6, 1.0});
    EXPECT_THROW(solver.init_state([](Point) { return 2.0; }, zero(), {}), ModelError);
}

TEST(Acoustics, EnergyBehaviour) {
    const CheckResult r = check_linear_energy();
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Acoustics, ShortMmsRunIsAccurate) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 2}, 8, 16);
    const DgSpace s(mesh, 2);
    const AcousticParams ap{1.0, 0.1, 0.1, 1.0};
    const ExactSolution e = academic_solution();
    AcousticSolver solver(s, ap);
    AcousticSources src;
    src.load = academic_pressure_load(s, ap);
    AcousticState st = solver.init_state([&](Point x) { return e.p(x, 0.0); }, [&](Point x) { return e.p_t(x, 0.0); }, src);
    for (int n = 0; n < 20; ++n) solver.newmark_step(st, 0.005, src);
    const ErrorNorms ep = error_norms(st.p, e.p, e.grad_p, st.t);
    const ErrorNorms ev = error_norms(st.pdot, e.p_t, e.grad_p_t, st.t);
    EXPECT_LT(ep.l2, 2e-3);
    EXPECT_LT(ev.l2, 2e-3);
}
