// circlepf: run the fixed-point power flow and the baseline solvers on
// MATPOWER cases.
//
//   circlepf solve --case data/case14.m --solver fp --lambda 3.99 --out r.json
//   circlepf sweep --case data/case30.m --lambdas 1,2,3.65 --solvers fp,nr
//   circlepf robustness --case data/case30.m --alphas 0.05,0.3 --trials 100
//   circlepf bench --case data/case14.m --case data/case118.m
//
// Exit codes: 0 success (solve: converged), 1 solve did not converge,
// 2 bad input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "circlepf/caseio.hpp"
#include "circlepf/errors.hpp"
#include "circlepf/experiments.hpp"

using namespace circlepf;

namespace {

struct Common {
    std::string case_path;
    std::string solver = "fp";
    double lambda = 1.0;
    double tol = 1e-3;
    std::size_t max_rounds = 0;
    std::string init = "flat";
    std::uint64_t seed = 1;
    bool strict_q_limits = false;
    std::string out;
};

template <typename T>
std::vector<T> split_list(const std::string& text, T (*convert)(const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(convert(item));
    }
    return out;
}

double to_double(const std::string& s) { return std::stod(s); }
SolverKind to_solver(const std::string& s) { return parse_solver(s); }

RunOptions options_from(const Common& c) {
    RunOptions opts;
    opts.solver = parse_solver(c.solver);
    opts.tol = c.tol;
    if (c.max_rounds > 0) opts.max_rounds = c.max_rounds;
    opts.init = parse_init(c.init, c.seed);
    opts.strict_q_limits = c.strict_q_limits;
    return opts;
}

// Writes to the named file, or stdout when the name is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    fn(os);
}

void add_common(CLI::App* cmd, Common& c, bool with_solver) {
    cmd->add_option("--case", c.case_path, "MATPOWER case file")->required();
    if (with_solver) cmd->add_option("--solver", c.solver, "fp|nr|gs|dnr");
    cmd->add_option("--tol", c.tol, "mismatch tolerance, per-unit");
    cmd->add_option("--max-rounds", c.max_rounds, "round / iteration cap (0 = solver default)");
    cmd->add_option("--init", c.init, "flat | random:ALPHA");
    cmd->add_option("--seed", c.seed, "random seed");
    cmd->add_flag("--strict-q-limits", c.strict_q_limits,
                  "check reactive limits after every PV update");
    cmd->add_option("--out", c.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixed-point power flow by circle intersection"};
    app.require_subcommand(1);

    Common solve_args;
    std::string trace_path;
    auto* solve = app.add_subcommand("solve", "run one power flow and write a JSON report");
    add_common(solve, solve_args, true);
    solve->add_option("--lambda", solve_args.lambda, "load scaling factor")->check(CLI::PositiveNumber);
    solve->add_option("--trace", trace_path, "mismatch trace CSV");

    Common sweep_args;
    std::string lambdas = "1";
    std::string sweep_solvers = "fp,nr";
    auto* sweep = app.add_subcommand("sweep", "solve over a list of load scaling factors");
    add_common(sweep, sweep_args, false);
    sweep->add_option("--lambdas", lambdas, "comma separated scaling factors");
    sweep->add_option("--solvers", sweep_solvers, "comma separated solvers");

    Common robust_args;
    std::string alphas = "0.05,0.1,0.2,0.3,0.4,0.6,0.9";
    std::string robust_solvers = "fp,nr";
    std::size_t trials = 100;
    unsigned threads = 0;
    auto* robust = app.add_subcommand("robustness", "count convergences from random starts");
    add_common(robust, robust_args, false);
    robust->add_option("--lambda", robust_args.lambda, "load scaling factor")->check(CLI::PositiveNumber);
    robust->add_option("--alphas", alphas, "comma separated initialization spreads");
    robust->add_option("--solvers", robust_solvers, "comma separated solvers");
    robust->add_option("--trials", trials, "trials per (alpha, solver)")->check(CLI::PositiveNumber);
    robust->add_option("--threads", threads, "worker threads (0 = all cores)");

    std::vector<std::string> bench_cases;
    std::string bench_solvers = "fp,nr,gs,dnr";
    std::size_t repeats = 9;
    double bench_lambda = 1.0;
    double bench_tol = 1e-3;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "median wall-clock time per case and solver");
    bench_cmd->add_option("--case", bench_cases, "MATPOWER case file (repeatable)")->required();
    bench_cmd->add_option("--solvers", bench_solvers, "comma separated solvers");
    bench_cmd->add_option("--repeats", repeats, "solves per measurement");
    bench_cmd->add_option("--lambda", bench_lambda, "load scaling factor");
    bench_cmd->add_option("--tol", bench_tol, "mismatch tolerance, per-unit");
    bench_cmd->add_option("--out", bench_out, "output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const RunOptions opts = options_from(solve_args);
            const NetworkCase net = scale_loading(read_case_file(solve_args.case_path), solve_args.lambda);
            const SolveReport rep = run_solver(net, opts);
            const auto doc = report_to_json(net, {net.name, solve_args.lambda, solve_args.solver}, rep);
            emit(solve_args.out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
            if (!trace_path.empty()) emit(trace_path, [&](std::ostream& os) { write_trace_csv(os, rep); });
            return rep.converged() ? 0 : 1;
        }
        if (*sweep) {
            RunOptions opts = options_from(sweep_args);
            const NetworkCase net = read_case_file(sweep_args.case_path);
            const auto rows = lambda_sweep(net, split_list<double>(lambdas, to_double),
                                           split_list<SolverKind>(sweep_solvers, to_solver), opts);
            emit(sweep_args.out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
            return 0;
        }
        if (*robust) {
            RunOptions opts = options_from(robust_args);
            const NetworkCase net = scale_loading(read_case_file(robust_args.case_path), robust_args.lambda);
            const auto cells = robustness(net, split_list<double>(alphas, to_double),
                                          split_list<SolverKind>(robust_solvers, to_solver), trials,
                                          robust_args.seed, opts, threads);
            emit(robust_args.out, [&](std::ostream& os) { write_robustness_csv(os, cells); });
            return 0;
        }
        if (*bench_cmd) {
            RunOptions opts;
            opts.tol = bench_tol;
            std::vector<BenchRow> rows;
            for (const auto& path : bench_cases) {
                const NetworkCase net = scale_loading(read_case_file(path), bench_lambda);
                for (SolverKind s : split_list<SolverKind>(bench_solvers, to_solver)) {
                    rows.push_back(bench(net, s, opts, repeats));
                }
            }
            emit(bench_out, [&](std::ostream& os) { write_bench_csv(os, rows); });
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid case: " << e.what() << '\n';
        return 2;
    } catch (const DegenerateDiagonal& e) {
        std::cerr << "invalid case: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
