#pragma once

// Experiment harness behind the command-line tool: single solves, load
// scaling sweeps, random-initialization robustness counts and timing.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "circlepf/netmodel.hpp"
#include "circlepf/state.hpp"

namespace circlepf {

enum class SolverKind { FixedPoint, Newton, GaussSeidel, DampedNewton };

// "fp", "nr", "gs", "dnr"; throws std::invalid_argument otherwise.
SolverKind parse_solver(std::string_view name);
const char* to_string(SolverKind kind);

std::size_t default_iteration_cap(SolverKind kind);

struct RunOptions {
    SolverKind solver = SolverKind::FixedPoint;
    double tol = 1e-3;
    std::optional<std::size_t> max_rounds;  // solver default when empty
    InitSpec init = FlatStart{};
    bool strict_q_limits = false;
};

SolveReport run_solver(const NetworkCase& net, const RunOptions& opts);

// "flat" or "random:ALPHA"; the seed applies to random starts.
InitSpec parse_init(std::string_view text, std::uint64_t seed);

struct SweepRow {
    double lambda = 1.0;
    SolverKind solver = SolverKind::FixedPoint;
    SolveStatus status = SolveStatus::MaxRoundsExceeded;
    std::size_t rounds = 0;
    double final_mismatch = 0.0;
    double elapsed_ms = 0.0;
};

std::vector<SweepRow> lambda_sweep(const NetworkCase& net, const std::vector<double>& lambdas,
                                   const std::vector<SolverKind>& solvers, const RunOptions& base);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct RobustnessCell {
    double alpha = 0.0;
    SolverKind solver = SolverKind::FixedPoint;
    std::size_t converged = 0;
    std::size_t trials = 0;
};

// Trial i uses UniformRandomStart{alpha, seed + i}. Trials run on `threads`
// workers (0 = hardware concurrency); counts do not depend on scheduling.
std::vector<RobustnessCell> robustness(const NetworkCase& net, const std::vector<double>& alphas,
                                       const std::vector<SolverKind>& solvers,
                                       std::size_t trials, std::uint64_t seed,
                                       const RunOptions& base, unsigned threads = 0);

// One row per alpha, one column per solver.
void write_robustness_csv(std::ostream& os, const std::vector<RobustnessCell>& cells);

struct BenchRow {
    std::string case_name;
    SolverKind solver = SolverKind::FixedPoint;
    SolveStatus status = SolveStatus::MaxRoundsExceeded;
    std::size_t repeats = 0;
    double median_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
};

BenchRow bench(const NetworkCase& net, SolverKind solver, const RunOptions& base,
               std::size_t repeats);

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace circlepf
