#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wdg/checks.hpp"
#include "wdg/error.hpp"
#include "wdg/mms.hpp"

using namespace wdg;
using std::numbers::pi;

namespace {

const AcousticParams kAcoustic{1.0, 0.1, 0.1, 1.0};
const TransportParams kTransport{1.0, 1.0, false, {0.0, 1.0}};

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return diff / scale;
}

}  // namespace

TEST(Mms, PressureForcingExample) {
    const ExactSolution e = academic_solution();
    EXPECT_NEAR(forcing_pressure(e, kAcoustic)({0.5, 1.0}, 0.0), -1.1 + 5.0 * pi * pi / 4.0, 1e-12);
    const BoundaryFn g = boundary_forcing_pressure(e, kAcoustic);
    for (double y : {0.3, 1.0, 1.7}) {
        EXPECT_NEAR(g({1.0, y}, {1.0, 0.0}, 0.0), -pi * std::sin(pi * y / 2.0), 1e-12);
    }
}

TEST(Mms, ZeroSolutionGivesZeroData) {
    const ExactSolution z = zero_solution();
    EXPECT_EQ(forcing_pressure(z, kAcoustic)({0.2, 0.4}, 0.3), 0.0);
    EXPECT_EQ(boundary_forcing_pressure(z, kAcoustic)({0.0, 0.4}, {-1.0, 0.0}, 0.3), 0.0);
    EXPECT_EQ(forcing_concentration(z, kTransport)({0.2, 0.4}, 0.3), 0.0);
    EXPECT_EQ(inflow_data(z, kTransport)({0.2, 0.0}, {0.0, -1.0}, 0.3), 0.0);
}

TEST(Mms, InflowData) {
    const ExactSolution e = academic_solution();
    const BoundaryFn g = inflow_data(e, kTransport);
    // dy u vanishes on y = 0, so g_in = u there.
    EXPECT_NEAR(g({0.4, 0.0}, {0.0, -1.0}, 0.5), std::exp(-0.5), 1e-14);
    EXPECT_THROW(g({1.0, 0.5}, {1.0, 0.0}, 0.5), ConfigError);
}

TEST(Mms, OracleAgreement) {
    const CheckResult r = check_oracle(WDG_ORACLE_CSV);
    EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Mms, EocReferenceExamples) {
    EXPECT_NEAR(eoc({0.1418881628307, 0.0903614996228}, {0.176776695, 0.117851130}).rows[1].rate, 1.1128, 1e-4);
    EXPECT_NEAR(eoc({0.00156151, 0.000459907}, {0.176777, 0.117851}).rows[1].rate, 3.0148, 1e-4);
    EXPECT_NEAR(eoc({0.0513719, 0.0407491}, {0.0883883, 0.0707107}).rows[1].rate, 1.0381, 1e-4);
    const EocTable t = eoc({0.4, 0.2, 0.1}, {1.0, 0.5, 0.25}, "e");
    EXPECT_TRUE(std::isnan(t.rows[0].rate));
    EXPECT_NEAR(t.rows[2].rate, 1.0, 1e-14);
}

TEST(Mms, EocRejectsBadInput) {
    EXPECT_THROW(eoc({1.0}, {1.0}), ConfigError);
    EXPECT_THROW(eoc({1.0, 0.5}, {1.0}), ConfigError);
    EXPECT_THROW(eoc({1.0, 0.0}, {1.0, 0.5}), ConfigError);
    EXPECT_THROW(eoc({1.0, 0.5}, {0.5, 1.0}), ConfigError);
}

TEST(Mms, EocCsv) {
    std::ostringstream os;
    write_eoc_csv(os, {eoc({0.4, 0.2}, {1.0, 0.5}, "dg_p")});
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "h,error_name,value,rate");
    EXPECT_NE(os.str().find("dg_p"), std::string::npos);
}

TEST(Mms, ErrorNormsOfInterpolatedPolynomial) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 4, 4);
    const DgSpace s(mesh, 2);
    const FieldVector uh = interpolate(s, [](Point x) { return x.x * x.x - 2.0 * x.x * x.y + 3.0; });
    const ErrorNorms n = error_norms(
        uh, [](Point x, double) { return x.x * x.x - 2.0 * x.x * x.y + 3.0; },
        [](Point x, double) { return Vec2{2.0 * x.x - 2.0 * x.y, -2.0 * x.x}; }, 0.0);
    EXPECT_LT(n.l2, 1e-10);
    EXPECT_LT(n.dg, 1e-10);
    EXPECT_LT(n.boundary, 1e-10);
    const ErrorNorms d = DiscreteNorms(s).discrete_error(uh, [](Point x, double) { return x.x * x.x - 2.0 * x.x * x.y + 3.0; }, 0.0);
    EXPECT_LT(d.l2 + d.dg + d.boundary, 1e-12);
}

TEST(Mms, ErrorNormsOfZeroAgainstOne) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 3, 3);
    const DgSpace s(mesh, 1);
    const FieldVector zero(s);
    const ErrorNorms n = error_norms(zero, [](Point, double) { return 1.0; }, [](Point, double) { return Vec2{0, 0}; }, 0.0);
    EXPECT_NEAR(n.l2, 1.0, 1e-13);
    EXPECT_NEAR(n.dg, 0.0, 1e-13);
    EXPECT_NEAR(n.boundary, 2.0, 1e-13);
}

TEST(Mms, PrecomputedLoadsMatchPointwiseAssembly) {
    Mesh mesh = build_rect_mesh({0, 1, 0, 2}, 3, 6);
    mesh.classify_boundary(kTransport.v);
    const ExactSolution e = academic_solution();
    for (int q : {1, 2}) {
        const DgSpace s(mesh, q);
        const PrecomputedLoad pl = academic_pressure_load(s, kAcoustic);
        const PrecomputedLoad tl = academic_transport_load(s, kTransport);
        for (double t : {0.0, 0.37, 2.5}) {
            std::vector<double> ref = assemble_load(s, forcing_pressure(e, kAcoustic), t);
            const auto g = assemble_boundary_load(s, boundary_forcing_pressure(e, kAcoustic), boundary_all(), std::nullopt, t);
            for (std::size_t i = 0; i < ref.size(); ++i) ref[i] += g[i];
            std::vector<double> got(ref.size(), 0.0);
            pl.add_to(got, t);
            EXPECT_LT(max_rel_diff(got, ref), 1e-10) << "pressure q=" << q << " t=" << t;

            ref = assemble_load(s, forcing_concentration(e, kTransport), t);
            const auto gi = assemble_boundary_load(s, inflow_data(e, kTransport), boundary_inflow(), kTransport.v, t);
            for (std::size_t i = 0; i < ref.size(); ++i) ref[i] -= gi[i];
            std::fill(got.begin(), got.end(), 0.0);
            tl.add_to(got, t);
            EXPECT_LT(max_rel_diff(got, ref), 1e-10) << "transport q=" << q << " t=" << t;
        }
    }
    const DgSpace s(mesh, 1);
    EXPECT_THROW(academic_transport_load(s, TransportParams{1.0, 1.0, true, {0.0, 1.0}}), ConfigError);
}

TEST(Mms, TimeAccumulator) {
    TimeAccumulator acc;
    for (int n = 0; n <= 10; ++n) acc.add(0.1 * n, 2.0);
    EXPECT_NEAR(acc.l2_left(), 2.0, 1e-14);
    EXPECT_NEAR(acc.integral_sq_trapezoid(), 4.0, 1e-14);
    EXPECT_EQ(acc.max(), 2.0);
    EXPECT_EQ(acc.samples(), 11u);
    EXPECT_THROW(acc.add(1.0, 1.0), ConfigError);
}

TEST(Mms, BoundaryIntegralAndRelativeChange) {
    Mesh mesh = build_rect_mesh({0, 1, 0, 2}, 3, 6);
    const DgSpace s(mesh, 1);
    const FieldVector one = interpolate(s, [](Point) { return 1.0; });
    EXPECT_NEAR(boundary_integral(one, boundary_side(Side::Top)), 1.0, 1e-14);
    EXPECT_NEAR(boundary_integral(one, boundary_all()), 6.0, 1e-13);
    const std::vector<double> top{0.0, 1.0, 2.0};
    const std::vector<double> d = relative_change_top(top, top, {0.0, 2.0, 4.0});
    for (double x : d) EXPECT_EQ(x, 0.0);
    const std::vector<double> r = relative_change_top({0.0, 1.5, 3.0}, top, {0.0, 2.0, 4.0});
    EXPECT_NEAR(r[2], 0.25, 1e-15);
    EXPECT_THROW(relative_change_top(top, top, {0.0, 0.0, 0.0}), ModelError);
    EXPECT_THROW(relative_change_top(top, {1.0}, top), ConfigError);
}

TEST(Mms, StrictOutflowExcludesTangentialFaces) {
    Mesh mesh = build_rect_mesh({0, 1, 0, 2}, 3, 6);
    mesh.classify_boundary({0.0, 1.0});
    const DgSpace s(mesh, 1);
    const FieldVector one = interpolate(s, [](Point) { return 1.0; });
    EXPECT_NEAR(boundary_integral(one, boundary_strict_outflow({0.0, 1.0})), 1.0, 1e-14);
    EXPECT_NEAR(boundary_integral(one, boundary_outflow()), 5.0, 1e-13);
}

TEST(Mms, L2ProjectionReproducesPolynomialsAndIsOrthogonal) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 2}, 3, 6);
    for (int q : {1, 2, 3}) {
        const DgSpace s(mesh, q);
        const DiscreteNorms l2(s);
        // Total degree exactly q.
        const ScalarField poly = [q](Point x, double t) { return std::pow(x.x, q) - 2.0 * std::pow(x.y, q - 1) * x.x + t; };
        const FieldVector pp = l2.project(poly, 0.5);
        const FieldVector ip = interpolate(s, [&](Point x) { return poly(x, 0.5); });
        for (std::size_t i = 0; i < pp.values().size(); ++i) EXPECT_NEAR(pp.values()[i], ip.values()[i], 1e-12);

        // (u - P u, phi) = 0 for every basis function.
        const ScalarField smooth = [](Point x, double) { return std::sin(3.0 * x.x) * std::exp(x.y); };
        const FieldVector ps = l2.project(smooth, 0.0);
        const std::vector<double> b = assemble_load(s, smooth, 0.0);
        const std::vector<double> mp = spmv(assemble_mass(s, CoefficientField::constant(1.0)), ps.values());
        for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(mp[i], b[i], 1e-13);
        EXPECT_LT(l2.discrete_error(ps, smooth, 0.0).l2, 1e-14);
    }
}

TEST(Mms, L2ProjectionBeatsInterpolantInL2) {
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 4, 4);
    const DgSpace s(mesh, 1);
    const ScalarField f = [](Point x, double) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
    const auto grad = [](Point x, double) {
        return Vec2{pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
    };
    const FieldVector pp = DiscreteNorms(s).project(f, 0.0);
    const FieldVector ip = DiscreteNorms(s, DiscreteNorms::Projection::Interpolant).project(f, 0.0);
    EXPECT_LT(error_norms(pp, f, grad, 0.0).l2, error_norms(ip, f, grad, 0.0).l2);
}
