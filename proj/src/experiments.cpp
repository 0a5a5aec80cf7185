#include "circlepf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "circlepf/baselines.hpp"
#include "circlepf/caseio.hpp"
#include "circlepf/fpsolver.hpp"

namespace circlepf {

SolverKind parse_solver(std::string_view name) {
    if (name == "fp") return SolverKind::FixedPoint;
    if (name == "nr") return SolverKind::Newton;
    if (name == "gs") return SolverKind::GaussSeidel;
    if (name == "dnr") return SolverKind::DampedNewton;
    throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

const char* to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::FixedPoint: return "fp";
        case SolverKind::Newton: return "nr";
        case SolverKind::GaussSeidel: return "gs";
        case SolverKind::DampedNewton: return "dnr";
    }
    return "?";
}

std::size_t default_iteration_cap(SolverKind kind) {
    switch (kind) {
        case SolverKind::FixedPoint: return 5000;
        case SolverKind::Newton: return 10;  // MATPOWER's pf.nr.max_it
        case SolverKind::GaussSeidel: return 1000;  // MATPOWER's pf.gs.max_it
        case SolverKind::DampedNewton: return 100;
    }
    return 0;
}

SolveReport run_solver(const NetworkCase& net, const RunOptions& opts) {
    const std::size_t cap = opts.max_rounds.value_or(default_iteration_cap(opts.solver));
    if (opts.solver == SolverKind::FixedPoint) {
        SolverConfig cfg;
        cfg.tol = opts.tol;
        cfg.max_rounds = cap;
        cfg.init = opts.init;
        cfg.strict_q_limits = opts.strict_q_limits;
        return solve_fixed_point(net, cfg);
    }
    BaselineConfig cfg;
    cfg.tol = opts.tol;
    cfg.max_iters = cap;
    cfg.init = opts.init;
    cfg.enforce_q_limits = opts.strict_q_limits;
    switch (opts.solver) {
        case SolverKind::Newton: return solve_newton(net, cfg);
        case SolverKind::DampedNewton: return solve_damped_newton(net, cfg);
        default: return solve_gauss_seidel(net, cfg);
    }
}

InitSpec parse_init(std::string_view text, std::uint64_t seed) {
    if (text == "flat") return FlatStart{};
    constexpr std::string_view prefix = "random:";
    if (text.substr(0, prefix.size()) == prefix) {
        const auto body = text.substr(prefix.size());
        double alpha = 0.0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), alpha);
        if (ec != std::errc() || ptr != body.data() + body.size() || alpha < 0.0) {
            throw std::invalid_argument("bad random spread in '" + std::string(text) + "'");
        }
        return UniformRandomStart{alpha, seed};
    }
    throw std::invalid_argument("init must be 'flat' or 'random:ALPHA'");
}

std::vector<SweepRow> lambda_sweep(const NetworkCase& net, const std::vector<double>& lambdas,
                                   const std::vector<SolverKind>& solvers, const RunOptions& base) {
    std::vector<SweepRow> rows;
    for (double lambda : lambdas) {
        const NetworkCase scaled = scale_loading(net, lambda);
        for (SolverKind solver : solvers) {
            RunOptions opts = base;
            opts.solver = solver;
            const SolveReport rep = run_solver(scaled, opts);
            rows.push_back({lambda, solver, rep.status, rep.rounds, rep.final_mismatch, rep.elapsed_ms});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    const auto saved = os.precision(6);
    os << "lambda,solver,status,rounds,final_mismatch_pu,elapsed_ms\n";
    for (const auto& r : rows) {
        os << r.lambda << ',' << to_string(r.solver) << ',' << to_string(r.status) << ','
           << r.rounds << ',' << r.final_mismatch << ',' << r.elapsed_ms << '\n';
    }
    os.precision(saved);
}

std::vector<RobustnessCell> robustness(const NetworkCase& net, const std::vector<double>& alphas,
                                       const std::vector<SolverKind>& solvers,
                                       std::size_t trials, std::uint64_t seed,
                                       const RunOptions& base, unsigned threads) {
    struct Job {
        std::size_t cell;
        std::size_t trial;
    };
    std::vector<RobustnessCell> cells;
    std::vector<Job> jobs;
    for (double alpha : alphas) {
        for (SolverKind solver : solvers) {
            for (std::size_t i = 0; i < trials; ++i) jobs.push_back({cells.size(), i});
            cells.push_back({alpha, solver, 0, trials});
        }
    }

    std::vector<char> converged(jobs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto& cell = cells[jobs[j].cell];
            RunOptions opts = base;
            opts.solver = cell.solver;
            opts.init = UniformRandomStart{cell.alpha, seed + jobs[j].trial};
            converged[j] = run_solver(net, opts).converged() ? 1 : 0;
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) cells[jobs[j].cell].converged += converged[j];
    return cells;
}

void write_robustness_csv(std::ostream& os, const std::vector<RobustnessCell>& cells) {
    std::vector<SolverKind> solvers;
    std::map<double, std::map<SolverKind, std::size_t>> table;
    std::size_t trials = 0;
    for (const auto& c : cells) {
        if (std::find(solvers.begin(), solvers.end(), c.solver) == solvers.end()) {
            solvers.push_back(c.solver);
        }
        table[c.alpha][c.solver] = c.converged;
        trials = c.trials;
    }
    os << "alpha";
    for (auto s : solvers) os << ',' << to_string(s);
    os << ",trials\n";
    for (const auto& [alpha, row] : table) {
        os << alpha;
        for (auto s : solvers) os << ',' << row.at(s);
        os << ',' << trials << '\n';
    }
}

BenchRow bench(const NetworkCase& net, SolverKind solver, const RunOptions& base,
               std::size_t repeats) {
    RunOptions opts = base;
    opts.solver = solver;
    std::vector<double> times;
    SolveStatus status = SolveStatus::MaxRoundsExceeded;
    for (std::size_t i = 0; i < std::max<std::size_t>(repeats, 1); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        status = run_solver(net, opts).status;
        times.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(times.begin(), times.end());
    return {net.name, solver, status, times.size(), times[times.size() / 2], times.front(),
            times.back()};
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << "case,solver,status,repeats,median_ms,min_ms,max_ms\n";
    for (const auto& r : rows) {
        os << r.case_name << ',' << to_string(r.solver) << ',' << to_string(r.status) << ','
           << r.repeats << ',' << r.median_ms << ',' << r.min_ms << ',' << r.max_ms << '\n';
    }
}

}  // namespace circlepf
