#include "wdg/checks.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "wdg/acoustics.hpp"
#include "wdg/error.hpp"
#include "wdg/mms.hpp"
#include "wdg/transport.hpp"

namespace wdg {

namespace {

FieldVector random_field(const DgSpace& s, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    FieldVector u(s);
    for (double& v : u.values()) v = nd(rng);
    return u;
}

// 1/2 sum_F int |v.n| [phi]^2 with the boundary trace as the jump.
double upwind_identity_rhs(const FieldVector& u, Vec2 v) {
    const DgSpace& s = u.space();
    const Mesh& m = s.mesh();
    double total = 0.0;
    for (const Face& f : m.faces()) {
        const auto fq = face_quadrature(m, f, 2 * s.degree() + 2);
        const double avn = std::abs(dot(v, f.normal));
        for (std::size_t i = 0; i < fq.points.size(); ++i) {
            const double a = u.eval(f.left, s.to_reference(f.left, fq.points[i]));
            const double b = f.is_boundary() ? 0.0 : u.eval(f.right, s.to_reference(f.right, fq.points[i]));
            total += 0.5 * fq.weights[i] * avn * (a - b) * (a - b);
        }
    }
    return total;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

}  // namespace

CheckResult check_upwind_identity(unsigned seed) {
    CheckResult r{"upwind identity", true, ""};
    std::mt19937 rng(seed);
    const double s2 = 1.0 / std::sqrt(2.0);
    double worst = 0.0;
    for (int n : {4, 8}) {
        for (int q : {1, 2}) {
            for (Vec2 v : {Vec2{0.0, 1.0}, Vec2{s2, s2}}) {
                Mesh mesh = build_rect_mesh({0, 1, 0, 1}, n, n);
                mesh.classify_boundary(v);
                const DgSpace s(mesh, q);
                const SparseMatrix b = assemble_upwind(s, v);
                for (int t = 0; t < 100; ++t) {
                    const FieldVector u = random_field(s, rng);
                    const double lhs = bilinear(b, u.values(), u.values());
                    const double rhs = upwind_identity_rhs(u, v);
                    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
                }
            }
        }
    }
    r.passed = worst <= 1e-12;
    r.detail = "max |lhs - rhs| / (1 + |rhs|) = " + fmt(worst) + " over 800 fields";
    return r;
}

CheckResult check_sip_coercivity(unsigned seed) {
    CheckResult r{"SIP coercivity and symmetry", true, ""};
    std::mt19937 rng(seed);
    std::ostringstream detail;
    for (int q : {1, 2}) {
        std::vector<double> ratios;
        double asym = 0.0;
        for (int n : {16, 32, 64}) {
            const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, n, n);
            const DgSpace s(mesh, q);
            const double thr = coercivity_threshold(measure_trace_constant_sq(s), 1.0, 1.0);
            const SparseMatrix a = assemble_sip(s, CoefficientField::constant(1.0), {1.0, 2.0 * thr});
            const SparseMatrix g = assemble_dg_seminorm(s);
            double cmin = std::numeric_limits<double>::infinity();
            for (int t = 0; t < 100; ++t) {
                const FieldVector u = random_field(s, rng);
                cmin = std::min(cmin, bilinear(a, u.values(), u.values()) / bilinear(g, u.values(), u.values()));
            }
            ratios.push_back(cmin);
            asym = std::max(asym, linear_combination(1.0, a, -1.0, a.transpose()).max_abs() / a.max_abs());
            if (n == 16) detail << "q=" << q << " penalty " << fmt(2.0 * thr) << ": ";
        }
        for (double c : ratios) {
            detail << fmt(c) << ' ';
            if (c < 0.1 || std::abs(c / ratios.front() - 1.0) > 0.2) r.passed = false;
        }
        if (asym > 1e-12) r.passed = false;
        detail << "asym " << fmt(asym) << "; ";
    }
    r.detail = detail.str();
    return r;
}

CheckResult check_linear_energy() {
    CheckResult r{"linear energy behaviour", true, ""};
    const Mesh mesh = build_rect_mesh({0, 1, 0, 1}, 8, 8);
    const DgSpace s(mesh, 2);
    const auto p0 = [](Point x) { return std::sin(std::numbers::pi * x.x) * std::sin(std::numbers::pi * x.y); };
    const auto zero = [](Point) { return 0.0; };
    const AcousticSources none;
    std::ostringstream detail;

    AcousticSolver lossless(s, AcousticParams{1.0, 0.0, 0.0, 0.0});
    AcousticState st = lossless.init_state(p0, zero, none);
    const double e0 = lossless.energy(st);
    for (int n = 0; n < 100; ++n) lossless.newmark_step(st, 0.01, none);
    const double drift = std::abs(lossless.energy(st) - e0) / e0;
    if (drift > 1e-10) r.passed = false;
    detail << "drift over 100 steps " << fmt(drift);

    AcousticSolver absorbing(s, AcousticParams{1.0, 0.0, 0.0, 1.0});
    st = absorbing.init_state(p0, zero, none);
    double prev = absorbing.energy(st);
    const double start = prev;
    int increases = 0;
    for (int n = 0; n < 100; ++n) {
        absorbing.newmark_step(st, 0.01, none);
        const double e = absorbing.energy(st);
        if (e > prev) ++increases;
        prev = e;
    }
    if (increases > 0) r.passed = false;
    detail << "; alpha = c: " << increases << " increases, E(T)/E(0) = " << fmt(prev / start);
    r.detail = detail.str();
    return r;
}

CheckResult check_decoupled_limit() {
    CheckResult r{"decoupled limit", true, ""};
    Mesh mesh = build_rect_mesh({0, 1, 0, 2}, 6, 12);
    const TransportParams tp{1.0, 0.0, false, {0.0, 1.0}};
    mesh.classify_boundary(tp.v);
    const DgSpace s(mesh, 1);
    const ExactSolution exact = academic_solution();
    const AcousticParams ap{1.0, 0.1, 0.0, 1.0};
    AcousticSolver acoustics(s, ap);
    TransportSolver coupled_tr(s, tp);
    TransportSolver alone_tr(s, tp);
    AcousticSources asrc;
    asrc.load = academic_pressure_load(s, ap);
    TransportSources tsrc;
    tsrc.load = academic_transport_load(s, tp);
    AcousticState ps = acoustics.init_state([&](Point x) { return exact.p(x, 0.0); },
                                            [&](Point x) { return exact.p_t(x, 0.0); }, asrc);
    TransportState a = coupled_tr.init_state([&](Point x) { return exact.u(x, 0.0); });
    TransportState b = alone_tr.init_state([&](Point x) { return exact.u(x, 0.0); });
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
        coupled_step(acoustics, ps, coupled_tr, a, 0.01, asrc, tsrc);
        alone_tr.backward_euler_step(b, nullptr, 0.01, tsrc);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < a.u.values().size(); ++i) {
            diff = std::max(diff, std::abs(a.u.values()[i] - b.u.values()[i]));
            scale = std::max(scale, std::abs(b.u.values()[i]));
        }
        worst = std::max(worst, diff / std::max(1.0, scale));
    }
    r.passed = worst <= 1e-10;
    r.detail = "max per-step difference " + fmt(worst);
    return r;
}

CheckResult check_oracle(const std::filesystem::path& csv) {
    CheckResult r{"MMS oracle agreement", false, ""};
    std::ifstream in(csv);
    if (!in) {
        r.detail = "cannot read " + csv.string();
        return r;
    }
    const ExactSolution e = academic_solution();
    const AcousticParams ap{1.0, 0.1, 0.1, 1.0};
    const TransportParams tp{1.0, 1.0, false, {0.0, 1.0}};
    const TransportParams tp_abs{1.0, 1.0, true, {0.0, 1.0}};
    const SourceFn fp = forcing_pressure(e, ap);
    const BoundaryFn gabs = boundary_forcing_pressure(e, ap);
    const SourceFn fu = forcing_concentration(e, tp);
    const BoundaryFn gin = inflow_data(e, tp);
    const SourceFn fu_abs = forcing_concentration(e, tp_abs);
    const BoundaryFn gin_abs = inflow_data(e, tp_abs);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    double worst = 0.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> c;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) c.push_back(std::stod(cell));
        if (c.size() != 11) {
            r.detail = "malformed row " + std::to_string(rows + 2);
            return r;
        }
        const Point x{c[0], c[1]};
        const double t = c[2];
        const Vec2 n{c[3], c[4]};
        const double got[6] = {fp(x, t), gabs(x, n, t), fu(x, t), gin(x, n, t), fu_abs(x, t), gin_abs(x, n, t)};
        for (int k = 0; k < 6; ++k) {
            worst = std::max(worst, std::abs(got[k] - c[5 + k]) / std::max(1.0, std::abs(c[5 + k])));
        }
        ++rows;
    }
    r.passed = rows == 1000 && worst <= 1e-10;
    r.detail = std::to_string(rows) + " points, max relative error " + fmt(worst);
    return r;
}

}  // namespace wdg
