#pragma once

// Solver-facing state and result types shared by the fixed-point solver and
// the baseline methods.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "circlepf/netmodel.hpp"

namespace circlepf {

// Dynamic bus type during a solve. PQmax / PQmin are PV buses temporarily
// held at a violated reactive limit.
enum class DynamicKind { Slack, PQ, PV, PQmax, PQmin };

const char* to_string(DynamicKind kind);

struct VoltageState {
    std::vector<Complex> v;
    std::vector<DynamicKind> kind;

    std::size_t size() const noexcept { return v.size(); }
};

struct FlatStart {};

// Real parts iid uniform on [1 - alpha, 1 + alpha], imaginary parts zero.
struct UniformRandomStart {
    double alpha = 0.0;
    std::uint64_t seed = 0;
};

struct ExplicitStart {
    std::vector<Complex> voltages;
};

using InitSpec = std::variant<FlatStart, UniformRandomStart, ExplicitStart>;

enum class SolveStatus {
    Converged,
    MaxRoundsExceeded,
    Stalled,
    Infeasible,
    RestartsExhausted,
    Diverged,
    Oscillating,
};

const char* to_string(SolveStatus status);

struct SwitchEvent {
    std::size_t round = 0;
    std::size_t bus = 0;
    DynamicKind from = DynamicKind::PV;
    DynamicKind to = DynamicKind::PV;
};

struct SolveReport {
    std::string solver;
    SolveStatus status = SolveStatus::MaxRoundsExceeded;
    std::size_t rounds = 0;
    // Entry 0 is the mismatch of the initial point, then one per round.
    std::vector<double> mismatch_trace;
    std::vector<SwitchEvent> switching_events;
    std::size_t restarts = 0;
    VoltageState final;
    double final_mismatch = 0.0;
    std::string reason;
    double elapsed_ms = 0.0;

    bool converged() const noexcept { return status == SolveStatus::Converged; }
};

// Starting point shared by all solvers. The slack bus always sits at
// v_ref at angle zero; Flat puts PV buses at v_ref and PQ buses at 1.
VoltageState initialize(const NetworkCase& net, const InitSpec& init);

}  // namespace circlepf
