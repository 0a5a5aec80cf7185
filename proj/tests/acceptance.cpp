// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance        run every criterion
//   acceptance 4      run criterion 4 only (exit status reflects it)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "circlepf/baselines.hpp"
#include "circlepf/caseio.hpp"
#include "circlepf/experiments.hpp"
#include "circlepf/fpsolver.hpp"
#include "circlepf/geometry.hpp"

using namespace circlepf;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        note(why);
    }
    void note(const std::string& text) {
        if (!detail.empty()) detail += "; ";
        detail += text;
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

NetworkCase load(const std::string& stem) {
    return read_case_file(std::string(CIRCLEPF_DATA_DIR) + "/" + stem + ".m");
}

double max_rect_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double out = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out = std::max({out, std::abs(a[i].real() - b[i].real()), std::abs(a[i].imag() - b[i].imag())});
    }
    return out;
}

// Converged fixed-point reports gathered by criteria 3 to 7 for criterion 8.
struct FpRecord {
    std::string label;
    NetworkCase net;
    SolverConfig cfg;
    SolveReport report;
};
std::vector<FpRecord> g_fp_runs;

SolveReport solve_fp_recorded(const std::string& label, const NetworkCase& net, const SolverConfig& cfg) {
    SolveReport rep = solve_fixed_point(net, cfg);
    if (rep.converged()) g_fp_runs.push_back({label, net, cfg, rep});
    return rep;
}

// 1 ---------------------------------------------------------------------

Outcome geometry_suite() {
    Outcome out;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20190101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&] { return std::exp(std::log(1e-3) + unit(rng) * std::log(1e6)); };
    auto circle = [](PlanePoint c, double r) { return CircleTuple{1.0, -2.0 * c, norm_sq(c) - r * r}; };

    std::size_t hits = 0, tangent = 0, misses = 0, ill_posed = 0;
    double worst_member = 0, worst_line = 0, worst_chord = 0, worst_scale = 0;
    for (int i = 0; i < 10000; ++i) {
        const double r1 = log_uniform(), r2 = log_uniform();
        const PlanePoint c1{10.0 * (unit(rng) - 0.5), 10.0 * (unit(rng) - 0.5)};
        const double phi = 2.0 * std::numbers::pi * unit(rng);
        double dist;
        if (i % 50 == 0) {
            dist = r1 + r2;  // externally tangent
        } else {
            const double lo = std::abs(r1 - r2), hi = r1 + r2;
            dist = lo + (hi - lo) * (unit(rng) * 1.2 - 0.1);
            dist = std::max(dist, 0.0);
        }
        const PlanePoint c2 = c1 + dist * PlanePoint{std::cos(phi), std::sin(phi)};
        const CircleTuple a = circle(c1, r1), b = circle(c2, r2);
        if (norm_sq(a.b - b.b) < 1e-20) continue;

        const IntersectionResult res = intersect_circles(a, b);
        if (res.kind == IntersectionKind::NoIntersection) {
            ++misses;
            continue;
        }
        (res.kind == IntersectionKind::TwoPoints ? hits : tangent)++;
        const CircleTuple line = radical_line(a, b);
        const double lscale = std::max({1.0, norm(line.b), std::abs(line.c)});
        for (PlanePoint p : res.points()) {
            worst_member = std::max({worst_member, membership_residual(a, p), membership_residual(b, p)});
            worst_line = std::max(worst_line, std::abs(dot(line.b, p) + line.c) / lscale);
        }
        // Nearly tangent pairs: a one-ulp change in the tuples moves the
        // points by about eps * r^2 / half_chord, far above 1e-10.
        const double half = 0.5 * norm(res.storage[0] - res.storage[1]);
        if (res.kind == IntersectionKind::TwoPoints && half < 1e-4 * std::min(r1, r2)) ++ill_posed;
        else if (res.kind == IntersectionKind::TwoPoints) {
            const PlanePoint o = local_origin(a, b);
            const double r = std::sqrt(tuple_center_radius(orthogonal_circle(shifted(a, o), shifted(b, o))).radius_sq);
            worst_chord = std::max(worst_chord, std::abs(r - half) / std::max(1.0, r));
            for (double k : {1e-6, 1.0, 1e6}) {
                const IntersectionResult s = intersect_circles(a.scaled(k).normalized(), b);
                if (s.kind != res.kind) {
                    worst_scale = std::numeric_limits<double>::infinity();
                    continue;
                }
                for (std::size_t j = 0; j < 2; ++j) {
                    worst_scale = std::max(worst_scale, norm(s.storage[j] - res.storage[j]) /
                                                            std::max(1.0, norm(res.storage[j])));
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    out.note(fmt("%zu two-point (%zu nearly tangent, membership only), %zu tangent, %zu disjoint", hits,
                 ill_posed, tangent, misses));
    out.note(fmt("membership %.1e, radical line %.1e, half chord %.1e, scale %.1e, %.2f s", worst_member,
                 worst_line, worst_chord, worst_scale, secs));
    if (worst_member >= 1e-10) out.fail("membership residual too large");
    if (worst_line >= 1e-10) out.fail("radical line containment too large");
    if (worst_chord >= 1e-9) out.fail("orthogonal circle radius differs from half chord");
    if (worst_scale >= 1e-10) out.fail("scaled tuple changed the points");
    if (secs >= 5.0) out.fail("runtime over 5 s");
    return out;
}

// 2 ---------------------------------------------------------------------

Outcome oracle_equivalence() {
    Outcome out;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> mag(0.5, 1.5);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    double worst = 0;
    for (const char* stem : {"case14", "case30"}) {
        const NetworkCase net = load(stem);
        const AdmittanceModel model = build_admittance(net);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<Complex> v(net.size());
            for (auto& x : v) x = std::polar(mag(rng), ang(rng));
            for (std::size_t d = 0; d < net.size(); ++d) {
                if (net.buses[d].kind == BusKind::Slack) continue;
                const TCoefficients t = t_coefficients(model, d, v);
                const Complex s = oracle_injection(model, d, v);
                const double p = t.active_drawn(v[d].real(), v[d].imag());
                const double q = t.reactive_drawn(v[d].real(), v[d].imag());
                worst = std::max(worst, std::abs(p + s.real()) / std::max(1.0, std::abs(s.real())));
                worst = std::max(worst, std::abs(q + s.imag()) / std::max(1.0, std::abs(s.imag())));
            }
        }
    }
    out.note(fmt("worst relative difference %.2e over 2000 assignments", worst));
    if (worst >= 1e-12) out.fail("power equations disagree with the oracle");
    return out;
}

// 3 ---------------------------------------------------------------------

Outcome nominal_convergence() {
    Outcome out;
    const auto t0 = Clock::now();
    for (const char* stem : {"case14", "case30", "case118"}) {
        const NetworkCase net = load(stem);
        SolverConfig cfg;
        const SolveReport rep = solve_fp_recorded(std::string(stem) + " nominal", net, cfg);

        // Same solution check at a tolerance where 1e-6 is meaningful.
        SolverConfig fine = cfg;
        fine.tol = 1e-10;
        fine.max_rounds = 50000;
        const SolveReport fp = solve_fixed_point(net, fine);
        BaselineConfig nr_cfg;
        nr_cfg.tol = 1e-10;
        nr_cfg.max_iters = 20;
        const SolveReport nr = solve_newton(net, nr_cfg);
        const double diff = fp.converged() && nr.converged() ? max_rect_diff(fp.final.v, nr.final.v)
                                                              : std::numeric_limits<double>::infinity();

        out.note(fmt("%s: %s in %zu rounds, |FP-NR| %.1e", stem, to_string(rep.status), rep.rounds, diff));
        if (!rep.converged()) out.fail(std::string(stem) + " did not converge");
        if (rep.rounds > 200) out.fail(fmt("%s needs %zu rounds > 200", stem, rep.rounds));
        if (diff >= 1e-6) out.fail(std::string(stem) + " differs from Newton");
    }
    const double secs = seconds_since(t0);
    out.note(fmt("%.2f s", secs));
    if (secs >= 10.0) out.fail("runtime over 10 s");
    return out;
}

// 4 ---------------------------------------------------------------------

Outcome heavy_loading() {
    Outcome out;
    const auto t0 = Clock::now();
    const std::vector<std::pair<const char*, double>> points{
        {"case14", 3.99}, {"case30", 3.65}, {"case118", 1.78}, {"case4gs", 4.5}};
    for (const auto& [stem, lambda] : points) {
        const NetworkCase net = scale_loading(load(stem), lambda);
        const SolveReport fp = solve_fp_recorded(fmt("%s x%.2f", stem, lambda), net, SolverConfig{});
        BaselineConfig nr_cfg;
        nr_cfg.max_iters = 50;
        const SolveReport nr = solve_newton(net, nr_cfg);
        out.note(fmt("%s x%.2f: FP %s (%zu rounds, %.1e), NR %s (%zu iters)", stem, lambda,
                     to_string(fp.status), fp.rounds, fp.final_mismatch, to_string(nr.status), nr.rounds));
        if (!fp.converged() || !(fp.final_mismatch < 1e-3)) out.fail(fmt("FP fails on %s", stem));
        if (nr.converged()) out.fail(fmt("NR converges on %s", stem));
    }
    const double secs = seconds_since(t0);
    out.note(fmt("%.2f s", secs));
    if (secs >= 60.0) out.fail("runtime over 60 s");
    return out;
}

// 5 ---------------------------------------------------------------------

Outcome damped_newton_heavy() {
    Outcome out;
    const NetworkCase net = scale_loading(load("case14"), 3.99);
    BaselineConfig cfg;
    cfg.max_iters = default_iteration_cap(SolverKind::DampedNewton);
    const SolveReport rep = solve_damped_newton(net, cfg);
    out.note(fmt("damped Newton %s after %zu iterations, mismatch %.1e", to_string(rep.status), rep.rounds,
                 rep.final_mismatch));
    if (rep.converged()) out.fail("damped Newton converged");
    return out;
}

// 6 ---------------------------------------------------------------------

Outcome random_initialization() {
    Outcome out;
    const auto t0 = Clock::now();
    const NetworkCase net = load("case30");
    const std::vector<double> alphas{0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.9};
    const std::uint64_t seed = 1;
    const auto cells = robustness(net, alphas, {SolverKind::FixedPoint, SolverKind::Newton}, 100, seed,
                                  RunOptions{});
    std::map<std::pair<double, SolverKind>, std::size_t> count;
    for (const auto& c : cells) count[{c.alpha, c.solver}] = c.converged;

    std::string table;
    for (double a : alphas) {
        const std::size_t fp = count[{a, SolverKind::FixedPoint}];
        const std::size_t nr = count[{a, SolverKind::Newton}];
        table += fmt("%s%.2f:%zu/%zu", table.empty() ? "" : " ", a, fp, nr);
        if (fp < 99) out.fail(fmt("FP %zu/100 at alpha %.2f", fp, a));
        if (a == 0.05 && nr < 95) out.fail(fmt("NR %zu/100 at alpha 0.05", nr));
        if (a == 0.2 && nr > 20) out.fail(fmt("NR %zu/100 at alpha 0.2 (want <= 20)", nr));
        if (a >= 0.3 && nr > 0) out.fail(fmt("NR %zu/100 at alpha %.2f (want 0)", nr, a));
    }

    // Keep the converged FP trials for the fixed-point consistency check.
    for (double a : alphas) {
        for (std::size_t i = 0; i < 100; ++i) {
            SolverConfig cfg;
            cfg.init = UniformRandomStart{a, seed + i};
            solve_fp_recorded(fmt("case30 random %.2f #%zu", a, i), net, cfg);
        }
    }
    const double secs = seconds_since(t0);
    out.detail = "alpha:FP/NR " + table + (out.detail.empty() ? "" : "; " + out.detail);
    out.note(fmt("%.2f s", secs));
    if (secs >= 300.0) out.fail("runtime over 5 min");
    return out;
}

// 7 ---------------------------------------------------------------------

Outcome pv_pq_switching() {
    Outcome out;
    const NetworkCase base = load("case14");
    const std::size_t bus = base.index_of.at(2);

    const SolveReport free_run = solve_fp_recorded("case14 unconstrained", base, SolverConfig{});
    if (!free_run.converged()) {
        out.fail("unconstrained run did not converge");
        return out;
    }
    const AdmittanceModel model = build_admittance(base);
    const double q_needed = oracle_injection(model, bus, free_run.final.v).imag();

    NetworkCase tight = base;
    tight.buses[bus].q_max = q_needed - 0.1;
    SolverConfig cfg;
    cfg.strict_q_limits = true;
    const SolveReport limited = solve_fp_recorded("case14 tightened Qmax", tight, cfg);
    bool event = false;
    for (const auto& ev : limited.switching_events) {
        if (ev.bus == bus && ev.to == DynamicKind::PQmax) event = true;
    }
    const DynamicKind end_kind = limited.final.kind[bus];
    const double q_spec = specified_reactive(tight.buses[bus], end_kind);
    const double q_final = oracle_injection(model, bus, limited.final.v).imag();
    out.note(fmt("Q needed %.4f, Qmax set to %.4f: %s, bus 2 ends %s with Q %.4f, %zu events", q_needed,
                 tight.buses[bus].q_max, to_string(limited.status), to_string(end_kind), q_final,
                 limited.switching_events.size()));
    if (!limited.converged()) out.fail("tightened case did not converge");
    if (end_kind != DynamicKind::PQmax) out.fail("bus 2 does not end as PQmax");
    if (q_spec != tight.buses[bus].q_max || std::abs(q_final - q_spec) >= cfg.tol) {
        out.fail("reactive injection not pinned at Qmax");
    }
    if (!event) out.fail("no switching event recorded");

    const SolveReport restored = solve_fp_recorded("case14 restored Qmax", base, cfg);
    const double dv = std::abs(std::abs(restored.final.v[bus]) - base.buses[bus].v_ref);
    out.note(fmt("restored limit: %s, bus 2 %s, ||v|-v_ref| %.1e", to_string(restored.status),
                 to_string(restored.final.kind[bus]), dv));
    if (!restored.converged()) out.fail("restored case did not converge");
    if (restored.final.kind[bus] != DynamicKind::PV) out.fail("bus 2 not PV after restoring the limit");
    if (dv > 1e-9) out.fail("PV magnitude off its setpoint");
    return out;
}

// 8 ---------------------------------------------------------------------

Outcome fixed_point_consistency(bool collected) {
    Outcome out;
    if (!collected) {
        nominal_convergence();
        heavy_loading();
        random_initialization();
        pv_pq_switching();
    }
    double worst = 0;
    std::string worst_label;
    for (const auto& rec : g_fp_runs) {
        const AdmittanceModel model = build_admittance(rec.net);
        VoltageState again = rec.report.final;
        run_round(model, rec.net, again, rec.cfg, rec.report.rounds + 1);
        const double move = max_rect_diff(again.v, rec.report.final.v);
        if (move > worst) {
            worst = move;
            worst_label = rec.label;
        }
        if (move > 10.0 * rec.cfg.tol) out.fail(fmt("%s moves %.1e", rec.label.c_str(), move));
    }
    out.note(fmt("%zu converged reports, largest move %.1e (%s)", g_fp_runs.size(), worst, worst_label.c_str()));
    if (g_fp_runs.empty()) out.fail("no converged reports to check");
    return out;
}

// 9 ---------------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CIRCLEPF_CLI) + " " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string masked_report(const fs::path& p) {
    std::ifstream is(p);
    auto doc = nlohmann::json::parse(is);
    doc.erase("elapsed_ms");
    return doc.dump(2);
}

Outcome determinism() {
    Outcome out;
    const fs::path dir = fs::temp_directory_path() / "circlepf_acceptance";
    fs::create_directories(dir);
    const std::string c30 = std::string(CIRCLEPF_DATA_DIR) + "/case30.m";
    for (const char* solver : {"fp", "nr", "gs", "dnr"}) {
        const std::string args = std::string("solve --case ") + c30 + " --solver " + solver +
                                 " --init random:0.3 --seed 77 --lambda 1.5 --out ";
        const fs::path a = dir / (std::string(solver) + "_a.json");
        const fs::path b = dir / (std::string(solver) + "_b.json");
        const int ea = run_cli(args + a.string());
        const int eb = run_cli(args + b.string());
        if (ea != eb || ea == 2) {
            out.fail(fmt("%s exit codes %d / %d", solver, ea, eb));
            continue;
        }
        if (masked_report(a) != masked_report(b)) out.fail(std::string(solver) + " reports differ");
    }
    if (out.pass) out.note("fp, nr, gs and dnr reports identical with timing masked");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"geometry property suite", geometry_suite},
        {"power equations match the injection oracle", oracle_equivalence},
        {"nominal-load convergence", nominal_convergence},
        {"heavy-loading comparison with Newton", heavy_loading},
        {"damped Newton at 3.99x on IEEE 14", damped_newton_heavy},
        {"random-initialization robustness", random_initialization},
        {"PV/PQ switching", pv_pq_switching},
        {"fixed-point consistency", [&] { return fixed_point_consistency(only == 0); }},
        {"deterministic reports", determinism},
    };

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i + 1);
        if (only != 0 && only != n) continue;
        const Outcome o = criteria[i].second();
        std::cout << "criterion " << n << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL")
                  << " - " << o.detail << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
