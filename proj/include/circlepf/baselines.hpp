#pragma once

// Reference solvers used for comparison: polar Newton-Raphson, a damped
// Newton variant whose step multiplier comes from a backtracking line
// search, and classical Gauss-Seidel.

#include <cstddef>

#include "circlepf/netmodel.hpp"
#include "circlepf/state.hpp"

namespace circlepf {

enum class Damping { None, LineSearch };

struct BaselineConfig {
    double tol = 1e-3;
    std::size_t max_iters = 10;
    Damping damping = Damping::None;
    InitSpec init = FlatStart{};
    // Newton only: hold PV buses at a violated reactive limit, with the same
    // PQmax / PQmin reversion rule as the fixed-point solver.
    bool enforce_q_limits = false;
    double divergence_threshold = 1e6;
    // Damped Newton: Oscillating when the mismatch norm has not improved by
    // 1% for this many consecutive iterations.
    std::size_t oscillation_window = 50;
    // Damped Newton: smallest multiplier tried, 2^-20.
    double min_step = 1.0 / 1048576.0;
};

SolveReport solve_newton(const NetworkCase& net, const BaselineConfig& cfg);

// Same as solve_newton with Damping::LineSearch forced on.
SolveReport solve_damped_newton(const NetworkCase& net, const BaselineConfig& cfg);

// Reactive limits are not enforced.
SolveReport solve_gauss_seidel(const NetworkCase& net, const BaselineConfig& cfg);

}  // namespace circlepf
