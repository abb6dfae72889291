// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

#include "wdg/checks.hpp"
#include "wdg/experiments.hpp"

using namespace wdg;

namespace {

struct Reference {
    std::vector<double> dg;
    std::vector<double> pdot;
};

// Published discrete pressure errors on h = sqrt2/{8,12,16,20}.
const Reference kPressureQ1{{0.1418881628307, 0.0903614996228256, 0.0661848614004209, 0.0522107031228204},
                            {0.0280242575312351, 0.0131226623924627, 0.00748200657725841, 0.0048068166045527}};
const Reference kPressureQ2{{0.0059201724359692, 0.0024540957628792, 0.00132730380567255, 0.000828244127145295},
                            {0.00156151287306523, 0.000459907458408615, 0.000194667640630837, 9.97512983683621e-05}};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

// Rates of `table` inside [lo, hi]; appends them to `detail`.
bool rates_in(const EocTable& table, double lo, double hi, std::ostringstream& detail) {
    bool ok = table.rows.size() >= 2;
    detail << table.name << " rates";
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const double r = table.rows[i].rate;
        detail << ' ' << fmt(r);
        ok = ok && r >= lo && r <= hi;
    }
    detail << " in [" << lo << ", " << hi << "]; ";
    return ok;
}

bool within_factor(const EocTable& table, const std::vector<double>& ref, double factor, std::ostringstream& detail) {
    bool ok = table.rows.size() == ref.size();
    double worst = 1.0;
    for (std::size_t i = 0; ok && i < ref.size(); ++i) {
        const double ratio = table.rows[i].error / ref[i];
        worst = std::max(worst, std::max(ratio, 1.0 / ratio));
    }
    ok = ok && worst <= factor;
    detail << table.name << " worst ratio to reference " << fmt(worst) << "; ";
    return ok;
}

bool has_table(const StudyReport& r, const std::string& name) {
    for (const auto& t : r.tables) {
        if (t.name == name) return true;
    }
    return false;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const CheckResult& r, int id, double seconds, bool& all) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << id << " (" << r.name << "): " << r.detail << " ["
              << fmt(seconds) << " s]" << std::endl;
    all = all && r.passed;
}

struct KappaLog {
    double max = 0.0;
    bool complete = true;
    std::vector<std::string> sources;
    void add(const StudyReport& r, const std::string& what) {
        for (const auto& l : r.levels) max = std::max(max, l.max_kappa_p);
        if (r.failure) complete = false;
        sources.push_back(what);
    }
};

CheckResult pressure_criterion(const std::filesystem::path& out, KappaLog& kappa) {
    CheckResult r{"pressure convergence", true, ""};
    std::ostringstream d;
    struct Band {
        int q;
        double dg_lo, dg_hi, pdot_lo, pdot_hi;
        const Reference* ref;
    };
    for (const Band& b : {Band{1, 0.9, 1.3, 1.7, 2.1, &kPressureQ1}, Band{2, 1.9, 2.3, 2.8, 3.2, &kPressureQ2}}) {
        SimulationConfig cfg = SimulationConfig::convergence_defaults(ExperimentKind::ConvergencePressure);
        cfg.degree = b.q;
        cfg.levels = {8, 12, 16, 20};
        const StudyReport s = run_convergence_pressure(cfg, out / ("pressure_q" + std::to_string(b.q)));
        kappa.add(s, "pressure q=" + std::to_string(b.q));
        d << "q=" << b.q << ": ";
        if (s.failure) {
            r.passed = false;
            d << "study failed: " << *s.failure << "; ";
        }
        if (!has_table(s, "dg_p") || !has_table(s, "l2_pdot")) {
            r.passed = false;
            continue;
        }
        r.passed = rates_in(s.table("dg_p"), b.dg_lo, b.dg_hi, d) && r.passed;
        r.passed = rates_in(s.table("l2_pdot"), b.pdot_lo, b.pdot_hi, d) && r.passed;
        r.passed = within_factor(s.table("dg_p"), b.ref->dg, 3.0, d) && r.passed;
        r.passed = within_factor(s.table("l2_pdot"), b.ref->pdot, 3.0, d) && r.passed;
    }
    r.detail = d.str();
    return r;
}

CheckResult coupled_criterion(const std::filesystem::path& out, KappaLog& kappa) {
    CheckResult r{"coupled concentration convergence", true, ""};
    std::ostringstream d;
    struct Band {
        int q;
        double dg_lo, dg_hi, l2_lo, l2_hi;
    };
    for (const Band& b : {Band{1, 0.9, 1.3, 1.7, 2.1}, Band{2, 1.8, 2.2, 2.8, 3.3}}) {
        SimulationConfig cfg = SimulationConfig::convergence_defaults(ExperimentKind::ConvergenceCoupled);
        cfg.degree = b.q;
        cfg.levels = {8, 12, 16, 20};
        const StudyReport s = run_convergence_coupled(cfg, out / ("coupled_q" + std::to_string(b.q)));
        kappa.add(s, "coupled q=" + std::to_string(b.q));
        d << "q=" << b.q << ": ";
        if (s.failure) {
            r.passed = false;
            d << "study failed: " << *s.failure << "; ";
        }
        if (!has_table(s, "dg_u") || !has_table(s, "l2_u")) {
            r.passed = false;
            continue;
        }
        r.passed = rates_in(s.table("dg_u"), b.dg_lo, b.dg_hi, d) && r.passed;
        r.passed = rates_in(s.table("l2_u"), b.l2_lo, b.l2_hi, d) && r.passed;
    }
    r.detail = d.str();
    return r;
}

CheckResult simulation_criterion(const std::filesystem::path& out, KappaLog& kappa, double& seconds) {
    CheckResult r{"realistic simulation", false, ""};
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationConfig cfg = SimulationConfig::simulate_defaults();
    SimulationReport s;
    try {
        s = run_simulation(cfg, out / "simulate");
    } catch (const std::exception& e) {
        kappa.complete = false;
        r.detail = std::string("run failed: ") + e.what();
        seconds = seconds_since(t0);
        return r;
    }
    seconds = seconds_since(t0);
    for (double k : s.max_kappa_p) kappa.max = std::max(kappa.max, k);
    kappa.sources.push_back("simulate");

    const auto& delta = s.delta;
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < delta.size(); ++i) {
        if (delta[i] > delta[argmax]) argmax = i;
    }
    const double peak = delta[argmax];
    // Single rise: non-decreasing up to the peak, non-increasing after it,
    // both up to 1e-3 of the peak.
    const double tol = 1e-3 * std::abs(peak);
    bool single_rise = true;
    for (std::size_t i = 1; i < delta.size(); ++i) {
        if (i <= argmax && delta[i] < delta[i - 1] - tol) single_rise = false;
        if (i > argmax && delta[i] > delta[i - 1] + tol) single_rise = false;
    }
    const bool starts_at_zero = std::abs(delta.front()) <= 1e-14;
    const bool in_band = peak >= 0.20 && peak <= 0.50;
    const bool fast = seconds <= 900.0;
    r.passed = starts_at_zero && single_rise && in_band && fast;
    std::ostringstream d;
    d << "delta(0) = " << delta.front() << ", single rise " << (single_rise ? "yes" : "no") << ", peak " << fmt(peak)
      << " at t = " << s.times[argmax] << " (band [0.20, 0.50]), u range [" << fmt(s.bounds.min) << ", "
      << fmt(s.bounds.max) << "], runtime " << fmt(seconds) << " s (limit 900)";
    r.detail = d.str();
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    std::string out = "acceptance_out";
    std::string oracle = WDG_ORACLE_CSV;
    app.add_option("criteria", only, "subset of criteria to run (default all)")->check(CLI::Range(1, 9));
    app.add_option("--out", out, "directory for study outputs");
    app.add_option("--oracle", oracle, "oracle table");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> selected(only.begin(), only.end());
    auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };
    std::filesystem::create_directories(out);

    bool all = true;
    KappaLog kappa;
    auto timed = [&](int id, auto&& fn) {
        if (!wanted(id)) return;
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        report(r, id, seconds_since(t0), all);
    };
    timed(1, [] { return check_upwind_identity(); });
    timed(2, [] { return check_sip_coercivity(); });
    timed(3, [&] { return pressure_criterion(out, kappa); });
    timed(4, [&] { return coupled_criterion(out, kappa); });
    timed(5, [] { return check_linear_energy(); });
    timed(6, [] { return check_decoupled_limit(); });
    double sim_seconds = 0.0;
    timed(7, [&] { return simulation_criterion(out, kappa, sim_seconds); });
    timed(8, [&] { return check_oracle(oracle); });
    timed(9, [&] {
        CheckResult r{"non-degeneracy monitor", false, ""};
        const bool covered = wanted(3) && wanted(4) && wanted(7);
        r.passed = covered && kappa.complete && kappa.max < 1.0;
        std::ostringstream d;
        d << "max |kappa p^h| = " << fmt(kappa.max) << " over " << kappa.sources.size() << " runs";
        if (!covered) d << "; criteria 3, 4 and 7 were not all run";
        if (!kappa.complete) d << "; a run stopped early";
        r.detail = d.str();
        return r;
    });
    return all ? 0 : 1;
}
