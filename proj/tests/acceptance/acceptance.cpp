// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "commands.hpp"
#include "run_config.hpp"

#include "oseen/analysis.hpp"
#include "oseen/experiments.hpp"
#include "oseen/property_suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace oseen;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Verdict {
    int id = 0;
    bool passed = false;
    std::string summary;
    std::vector<std::string> details;
};

std::vector<Verdict> g_verdicts;

// Every mesh and parameter set used in a run, for the tau check.
struct TauRecord {
    std::string where;
    PropertyResult result;
};
std::vector<TauRecord> g_tau;

void record_tau(const std::string& where, const TriMesh& mesh, const PhysParams& p)
{
    g_tau.push_back({where, check_tau_bounds(mesh, p)});
}

std::string fmt(double v, int prec = 4)
{
    std::ostringstream o;
    o << std::setprecision(prec) << v;
    return o.str();
}

const std::vector<double> kKovasznayMu{1.0, 0.1, 0.01, 0.001};
constexpr int kLevels = 4;
constexpr int kBaseCells = 4;

PhysParams kovasznay_params(double mu)
{
    return {mu, 1.0, 1.0, 0.5, 0.001};
}

struct StudyRun {
    ConvergenceRecord record;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

StudyRun kovasznay_study(double mu, int k, bool nonlinear)
{
    const PhysParams p = kovasznay_params(mu);
    ManufacturedCase c = make_kovasznay_case(mu, p.rho, p.sigma, ZetaVariant::Standard, nonlinear ? 1.0 : 0.9);
    c.params = p;
    StudyOptions o;
    o.base_cells = kBaseCells;
    o.pattern = TriPattern::Right;
    o.picard = {1e-6, 25};
    o.settings.warn = [](std::string_view) {};
    for (int l = 0; l < kLevels; ++l) {
        const int n = kBaseCells << l;
        record_tau("kovasznay mu=" + fmt(mu) + " level " + std::to_string(l),
                   build_rect_tri_mesh(c.domain, n, n, TriPattern::Right), p);
    }
    StudyRun run;
    const auto t0 = Clock::now();
    try {
        run.record = run_convergence_study(c, k, kLevels, nonlinear, o);
    } catch (const StudyFailure& e) {
        run.record = e.partial();
        run.failed = true;
        run.error = e.what();
    } catch (const SolverFailure& e) {
        run.failed = true;
        run.error = e.what();
    }
    run.seconds = seconds_since(t0);
    return run;
}

// Finest-pair rates against k for e1_w and e0_p, time per study.
Verdict rate_criterion(int id, bool nonlinear)
{
    Verdict v{id, true, "", {}};
    double worst_e1 = 0.0;
    double worst_p = 0.0;
    int max_iters = 0;
    for (const int k : {1, 2}) {
        for (const double mu : {1.0, 0.01}) {
            const StudyRun run = kovasznay_study(mu, k, nonlinear);
            std::string line = "k=" + std::to_string(k) + " mu=" + fmt(mu) + ": ";
            if (run.failed || static_cast<int>(run.record.levels.size()) != kLevels) {
                v.passed = false;
                v.details.push_back(line + "solver failure: " + run.error);
                continue;
            }
            const double r1 = run.record.rates(&ErrorNorms::e1_w).back();
            const double rp = run.record.rates(&ErrorNorms::e0_p).back();
            const double d1 = std::abs(r1 - k);
            const double dp = std::abs(rp - k);
            worst_e1 = std::max(worst_e1, d1);
            worst_p = std::max(worst_p, dp);
            bool ok = d1 <= 0.25 && dp <= 0.3 && run.seconds < 300.0;
            line += "rate_e1=" + fmt(r1) + " rate_e0p=" + fmt(rp) + " time=" + fmt(run.seconds, 3) + "s";
            if (nonlinear) {
                int iters = 0;
                bool converged = true;
                for (const auto& l : run.record.levels) {
                    iters = std::max(iters, l.picard_iters);
                    converged = converged && l.report.converged;
                }
                max_iters = std::max(max_iters, iters);
                ok = ok && converged && iters <= 25;
                line += " max_picard=" + std::to_string(iters) + (converged ? "" : " (not converged)");
            }
            v.details.push_back(line + (ok ? "" : "  <-- fails"));
            v.passed = v.passed && ok;
        }
    }
    v.summary = "Kovasznay " + std::string(nonlinear ? "nonlinear" : "linear") +
                " rates: worst |rate_e1 - k| = " + fmt(worst_e1) + " (<= 0.25), worst |rate_e0p - k| = " +
                fmt(worst_p) + " (<= 0.3)";
    if (nonlinear) {
        v.summary += ", max Picard iterations " + std::to_string(max_iters) + " (<= 25)";
    }
    return v;
}

// For each (level, norm), errors must not grow as mu decreases through
// 1, 0.1, 0.01, 0.001.
Verdict viscosity_trend()
{
    Verdict v{3, false, "", {}};
    std::vector<ConvergenceRecord> records;
    for (const double mu : kKovasznayMu) {
        const StudyRun run = kovasznay_study(mu, 1, false);
        if (run.failed) {
            v.summary = "solver failure at mu=" + fmt(mu) + ": " + run.error;
            return v;
        }
        records.push_back(run.record);
    }
    const std::vector<std::pair<const char*, double ErrorNorms::*>> norms{
        {"e0_w", &ErrorNorms::e0_w}, {"e1_w", &ErrorNorms::e1_w}, {"e0_p", &ErrorNorms::e0_p}};
    int monotone = 0;
    int pairs_ok = 0;
    int pairs = 0;
    for (int l = 0; l < kLevels; ++l) {
        for (const auto& [name, norm] : norms) {
            std::string line = "level " + std::to_string(l) + " " + name + ":";
            bool ok = true;
            for (std::size_t i = 0; i < records.size(); ++i) {
                const double e = records[i].levels[static_cast<std::size_t>(l)].errors.*norm;
                line += " " + fmt(e);
                if (i > 0) {
                    const double prev = records[i - 1].levels[static_cast<std::size_t>(l)].errors.*norm;
                    ++pairs;
                    pairs_ok += e <= prev;
                    ok = ok && e <= prev;
                }
            }
            monotone += ok;
            v.details.push_back(line + (ok ? "" : "  <-- grows"));
        }
    }
    v.passed = monotone >= 10;
    v.summary = "viscosity trend (k=1): " + std::to_string(monotone) +
                "/12 (level, norm) sequences non-increasing (>= 10); pairwise " + std::to_string(pairs_ok) + "/" +
                std::to_string(pairs);
    return v;
}

Verdict coercivity()
{
    Verdict v{4, true, "", {}};
    const PhysParams p{1.0, 1.0, 1.0, 0.5, 0.001};
    ProblemData d;
    d.u_m = analytic_vector([](const Vec2& x) { return Vec2(0.2 * x.x(), -0.2 * x.y()); },
                            [](const Vec2&) {
                                Mat2 g;
                                g << 0.2, 0, 0, -0.2;
                                return g;
                            });
    double worst = 1e300;
    for (const int k : {1, 2}) {
        for (const auto& [n, samples] : {std::pair{2, 0}, std::pair{8, 200}}) {
            const auto mesh =
                std::make_shared<const TriMesh>(build_rect_tri_mesh({0, 1, 0, 1}, n, n, TriPattern::CrissCross));
            record_tau("coercivity " + std::to_string(n) + "x" + std::to_string(n), *mesh, p);
            const CoercivityResult r = coercivity_ratio(mesh, k, p, d, samples, 1);
            const bool ok = r.certified && r.min_ratio >= 0.25;
            worst = std::min(worst, r.min_ratio);
            v.passed = v.passed && ok;
            v.details.push_back("k=" + std::to_string(k) + " mesh " + std::to_string(n) + "x" + std::to_string(n) +
                                (samples == 0 ? " dense" : " random(" + std::to_string(samples) + ")") +
                                ": min ratio " + fmt(r.min_ratio) + (r.certified ? "" : " (not certified)") +
                                " C_inv=" + fmt(r.c_inv) + " delta_bound=" + fmt(r.delta_bound));
        }
    }
    v.summary = "coercivity: smallest ratio " + fmt(worst) + " (>= 0.25)";
    return v;
}

Verdict trilinear()
{
    Verdict v{6, true, "", {}};
    double worst = 0.0;
    for (const int k : {1, 2}) {
        for (const auto& [n, pat] : {std::pair{3, TriPattern::CrissCross}, std::pair{5, TriPattern::Right}}) {
            const auto mesh = std::make_shared<const TriMesh>(build_rect_tri_mesh({0, 1, 0, 1}, n, n, pat));
            const double r = trilinear_identity_residual(mesh, k, 50, 7);
            worst = std::max(worst, r);
            v.details.push_back("k=" + std::to_string(k) + " mesh " + std::to_string(n) + "x" + std::to_string(n) +
                                ": " + fmt(r, 3));
        }
    }
    v.passed = worst < 1e-10;
    v.summary = "trilinear identity: max residual " + fmt(worst, 3) + " over 50 triples per mesh (< 1e-10)";
    return v;
}

Verdict patch_test()
{
    Verdict v{7, true, "", {}};
    const PhysParams p{0.5, 1.2, 3.0, 0.5, 0.01};
    const ManufacturedCase c = make_polynomial_case(p);
    double worst = 0.0;
    for (const int k : {2, 3}) {
        for (const TriPattern pat : {TriPattern::Right, TriPattern::CrissCross}) {
            const auto mesh = std::make_shared<const TriMesh>(build_rect_tri_mesh({0, 1, 0, 1}, 3, 3, pat));
            record_tau("patch", *mesh, p);
            const ProblemData d = problem_data(c, analytic_vector(c.a->value, c.a->gradient));
            SolveSettings quiet;
            quiet.warn = [](std::string_view) {};
            const OseenSolution s = solve_perturbed_oseen(mesh, k, p, d, quiet);
            const ErrorNorms e = error_norms(s.velocity, s.pressure, c, d);
            const double m = std::max({e.e0_w, e.e1_w, e.e0_p, e.e_triple});
            worst = std::max(worst, m);
            v.details.push_back("k=" + std::to_string(k) +
                                (pat == TriPattern::Right ? " right" : " criss-cross") + ": max error " + fmt(m, 3));
        }
    }
    v.passed = worst <= 1e-9;
    v.summary = "polynomial patch test: max error " + fmt(worst, 3) + " (<= 1e-9)";
    return v;
}

Verdict ns_recovery()
{
    Verdict v{8, false, "", {}};
    NsRecoveryOptions o;
    o.settings.warn = [](std::string_view) {};
    const auto t0 = Clock::now();
    NsRecoveryResult r;
    try {
        r = run_ns_recovery(o);
    } catch (const SolverFailure& e) {
        v.summary = std::string("ns-recovery solver failure: ") + e.what();
        return v;
    }
    const double secs = seconds_since(t0);
    record_tau("ns-recovery coarse mesh", *r.mesh, {o.mu, o.rho, o.sigma, o.lambda, o.delta});
    double dp0 = 0.0;
    double ds = 0.0;
    for (const Profile& p : r.profiles) {
        if (p.name == "x=0") {
            dp0 = p.pressure_deviation;
        }
        ds = std::max(ds, p.speed_deviation);
        v.details.push_back(p.name + ": pressure deviation " + fmt(100 * p.pressure_deviation, 3) +
                            "%, speed deviation " + fmt(100 * p.speed_deviation, 3) + "%");
    }
    v.details.push_back("Picard iterations: coarse " + std::to_string(r.coarse.report.iterations) + ", recovery " +
                        std::to_string(r.recovery.report.iterations) + ", reference " +
                        std::to_string(r.reference.report.iterations));
    const bool converged =
        r.coarse.report.converged && r.recovery.report.converged && r.reference.report.converged;
    v.passed = converged && dp0 <= 0.03 && ds <= 0.02 && secs < 600.0;
    v.summary = "NS recovery: pressure deviation at x=0 " + fmt(100 * dp0, 3) + "% (<= 3%), speed deviation " +
                fmt(100 * ds, 3) + "% (<= 2%), time " + fmt(secs, 3) + " s (< 600)";
    return v;
}

std::map<std::string, std::string> read_tree(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        // run.log records paths and wall times; the data products are CSV and VTK.
        const auto ext = e.path().extension();
        if (ext != ".csv" && ext != ".vtk") {
            continue;
        }
        std::ifstream in(e.path(), std::ios::binary);
        out[e.path().filename().string()] = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
    return out;
}

Verdict bent_determinism()
{
    Verdict v{9, false, "", {}};
    cli::RunConfig c = cli::default_config(cli::Experiment::BentRandom);
    c.seed = 2024;
    const fs::path root = fs::temp_directory_path() / "oseen_acceptance_bent";
    fs::remove_all(root);
    std::vector<std::map<std::string, std::string>> trees;
    std::ostringstream console;
    for (const char* run : {"a", "b"}) {
        c.out = (root / run).string();
        const int code = cli::cmd_bent_random(c, console);
        if (code != cli::kExitOk) {
            v.summary = "bent-random exited with " + std::to_string(code);
            return v;
        }
        trees.push_back(read_tree(root / run));
    }
    BentRandomOptions o;
    const QuadGrid grid = build_bent_quad_grid(o.channel, o.n_across, o.n_along);
    record_tau("bent channel", crisscross_refine(grid), o.params);
    std::size_t bytes = 0;
    for (const auto& [name, content] : trees[0]) {
        bytes += content.size();
    }
    v.passed = trees[0] == trees[1] && !trees[0].empty();
    v.summary = "bent-random determinism: " + std::to_string(trees[0].size()) + " files, " + std::to_string(bytes) +
                " bytes of CSV/VTK, " + (v.passed ? "identical" : "DIFFERENT") + " across two runs with seed 2024";
    fs::remove_all(root);
    return v;
}

Verdict tau_bounds()
{
    Verdict v{5, true, "", {}};
    double worst = 1e300;
    for (const auto& t : g_tau) {
        worst = std::min(worst, t.result.margin);
        if (!t.result.passed) {
            v.passed = false;
            v.details.push_back(t.where + ": " + t.result.detail);
        }
    }
    v.summary = "tau bounds: " + std::to_string(g_tau.size()) + " (mesh, parameter) pairs checked, smallest margin " +
                fmt(worst, 3);
    return v;
}

} // namespace

int main()
{
    const auto t0 = Clock::now();
    auto run = [](const char* name, auto fn) {
        std::cout << "running " << name << "...\n" << std::flush;
        g_verdicts.push_back(fn());
    };
    run("criterion 1", [] { return rate_criterion(1, false); });
    run("criterion 2", [] { return rate_criterion(2, true); });
    run("criterion 3", viscosity_trend);
    run("criterion 4", coercivity);
    run("criterion 6", trilinear);
    run("criterion 7", patch_test);
    run("criterion 8", ns_recovery);
    run("criterion 9", bent_determinism);
    run("criterion 5", tau_bounds);
    std::sort(g_verdicts.begin(), g_verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });

    std::cout << '\n';
    int failed = 0;
    for (const Verdict& v : g_verdicts) {
        for (const auto& d : v.details) {
            std::cout << "  [" << v.id << "] " << d << '\n';
        }
    }
    std::cout << '\n';
    for (const Verdict& v : g_verdicts) {
        std::cout << (v.passed ? "PASS" : "FAIL") << " criterion " << v.id << ": " << v.summary << '\n';
        failed += !v.passed;
    }
    std::cout << "\n" << g_verdicts.size() - static_cast<std::size_t>(failed) << "/" << g_verdicts.size()
              << " criteria passed in " << fmt(seconds_since(t0), 4) << " s\n";
    return failed == 0 ? 0 : 1;
}
