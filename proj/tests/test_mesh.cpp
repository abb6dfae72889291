#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "wdg/error.hpp"
#include "wdg/mesh.hpp"

using namespace wdg;

TEST(Mesh, PressureStudyMeshSize) {
    const Mesh m = build_rect_mesh({0, 1, 0, 2}, 8, 16);
    EXPECT_EQ(m.num_elements(), 256u);
    EXPECT_NEAR(m.mesh_size(), 0.176776695296637, 1e-14);
    const Mesh m12 = build_rect_mesh({0, 1, 0, 2}, 12, 24);
    EXPECT_NEAR(m12.mesh_size(), 0.117851130197758, 1e-14);
}

TEST(Mesh, SingleCell) {
    const Mesh m = build_rect_mesh({0, 1, 0, 1}, 1, 1);
    EXPECT_EQ(m.num_elements(), 2u);
    EXPECT_NEAR(m.element_area(0) + m.element_area(1), 1.0, 1e-15);
    EXPECT_NEAR(m.mesh_size(), std::sqrt(2.0), 1e-15);
    EXPECT_EQ(m.num_faces(), 5u);
}

TEST(Mesh, RejectsBadCounts) {
    EXPECT_THROW(build_rect_mesh({0, 1, 0, 1}, 0, 3), ConfigError);
    EXPECT_THROW(build_rect_mesh({0, 1, 0, 1}, 2, -1), ConfigError);
    EXPECT_THROW(build_rect_mesh({1, 1, 0, 1}, 2, 2), ConfigError);
}

TEST(Mesh, TopologyAndOrientation) {
    const Mesh m = build_rect_mesh({0, 1, 0, 2}, 5, 7);
    double area = 0.0;
    for (std::size_t k = 0; k < m.num_elements(); ++k) {
        EXPECT_GT(m.element_area(k), 0.0);
        area += m.element_area(k);
    }
    EXPECT_NEAR(area, m.domain_area(), 1e-12 * m.domain_area());

    std::map<int, int> incidence;
    double hmax = 0.0;
    for (const Face& f : m.faces()) {
        ++incidence[f.left];
        if (!f.is_boundary()) {
            ++incidence[f.right];
            // n_F points out of K1: away from K1's centroid.
            const auto p = m.element_points(f.left);
            const Point c{(p[0].x + p[1].x + p[2].x) / 3, (p[0].y + p[1].y + p[2].y) / 3};
            EXPECT_GT(dot(f.midpoint - c, f.normal), 0.0);
            const auto q = m.element_points(f.right);
            const Point c2{(q[0].x + q[1].x + q[2].x) / 3, (q[0].y + q[1].y + q[2].y) / 3};
            EXPECT_LT(dot(f.midpoint - c2, f.normal), 0.0);
        } else {
            EXPECT_NE(f.side, Side::None);
        }
        EXPECT_NEAR(std::hypot(f.normal.x, f.normal.y), 1.0, 1e-15);
        hmax = std::max(hmax, f.length);
    }
    for (const auto& [k, n] : incidence) EXPECT_EQ(n, 3) << "element " << k;
    EXPECT_LE(hmax, m.mesh_size() + 1e-15);
}

TEST(Mesh, DiscreteDivergenceOfConstantField) {
    const Mesh m = build_rect_mesh({0, 1, 0, 1}, 4, 4);
    const Vec2 v{0.3, -1.7};
    // sum over elements of int_{dK} v.n_K: interior faces cancel, so only the
    // closed outer boundary remains, which also integrates to zero.
    double total = 0.0;
    for (const Face& f : m.faces()) {
        total += dot(v, f.normal) * f.length;                            // from K1
        if (!f.is_boundary()) total -= dot(v, f.normal) * f.length;      // from K2
    }
    EXPECT_NEAR(total, 0.0, 1e-14);
}

TEST(Mesh, ShapeRegularityAndHalving) {
    double prev_h = 0.0;
    for (int n : {4, 8, 16, 32}) {
        const Mesh m = build_rect_mesh({0, 1, 0, 1}, n, n);
        double quality = 1.0;
        for (std::size_t k = 0; k < m.num_elements(); ++k) {
            quality = std::min(quality, m.element_inradius(k) / m.element_diameter(k));
        }
        EXPECT_GT(quality, 0.2);
        if (prev_h > 0.0) EXPECT_NEAR(m.mesh_size(), prev_h / 2, 1e-15);
        prev_h = m.mesh_size();
    }
}

TEST(Mesh, ClassifyBoundary) {
    Mesh m = build_rect_mesh({0, 1, 0, 2}, 3, 6);
    m.classify_boundary({0, 1});
    for (const Face& f : m.faces()) {
        if (!f.is_boundary()) continue;
        EXPECT_EQ(f.tag == BoundaryTag::Inflow, f.side == Side::Bottom);
    }
    m.classify_boundary({0, 0});
    for (const Face& f : m.faces()) {
        if (f.is_boundary()) EXPECT_EQ(f.tag, BoundaryTag::Outflow);
    }
    Mesh sq = build_rect_mesh({0, 1, 0, 1}, 3, 3);
    sq.classify_boundary({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)});
    for (const Face& f : sq.faces()) {
        if (!f.is_boundary()) continue;
        const bool expect_in = f.side == Side::Left || f.side == Side::Bottom;
        EXPECT_EQ(f.tag == BoundaryTag::Inflow, expect_in);
    }
}

TEST(Mesh, FaceQuadrature) {
    const auto q1 = segment_quadrature({0, 0}, {0.5, 0}, 1);
    ASSERT_EQ(q1.points.size(), 1u);
    EXPECT_NEAR(q1.points[0].x, 0.25, 1e-15);
    EXPECT_NEAR(q1.weights[0], 0.5, 1e-15);

    for (int deg = 1; deg <= 9; ++deg) {
        const auto q = segment_quadrature({0, 0}, {1, 0}, deg);
        double wsum = 0.0, ix = 0.0;
        for (std::size_t i = 0; i < q.weights.size(); ++i) {
            wsum += q.weights[i];
            ix += q.weights[i] * q.points[i].x;
        }
        EXPECT_NEAR(wsum, 1.0, 1e-14);
        EXPECT_NEAR(ix, 0.5, 1e-14);
    }
    const auto q5 = segment_quadrature({0, 0}, {1, 0}, 5);
    double ix3 = 0.0;
    for (std::size_t i = 0; i < q5.weights.size(); ++i) ix3 += q5.weights[i] * std::pow(q5.points[i].x, 3);
    EXPECT_NEAR(ix3, 0.25, 1e-14);
    EXPECT_THROW(segment_quadrature({0, 0}, {1, 0}, -1), ConfigError);
}

TEST(Mesh, VtkDump) {
    const Mesh m = build_rect_mesh({0, 1, 0, 1}, 2, 2);
    std::ostringstream os;
    m.write_vtk(os);
    const std::string s = os.str();
    EXPECT_NE(s.find("DATASET UNSTRUCTURED_GRID"), std::string::npos);
    EXPECT_NE(s.find("CELL_TYPES 8"), std::string::npos);
}
