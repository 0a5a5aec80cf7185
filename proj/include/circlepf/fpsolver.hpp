#pragma once

// Fixed-point power flow: every bus voltage is recomputed from its
// neighbours as an intersection of two circles (active/reactive power for PQ
// buses, active power/voltage magnitude for PV buses), sweeping the buses in
// order and using each new voltage immediately.

#include <cstddef>
#include <variant>
#include <vector>

#include "circlepf/geometry.hpp"
#include "circlepf/netmodel.hpp"
#include "circlepf/state.hpp"

namespace circlepf {

struct SolverConfig {
    double tol = 1e-3;  // per-unit mismatch
    std::size_t max_rounds = 5000;
    std::size_t restart_limit = 5;
    InitSpec init = FlatStart{};
    bool record_trace = true;
    // Also enforce reactive limits after a successful PV update, not only
    // when the PV circles fail to intersect.
    bool strict_q_limits = false;
    // Sweep order over dense bus indices; empty means ascending.
    std::vector<std::size_t> update_order;
};

struct MismatchResult {
    std::vector<Complex> per_bus;  // zero at the slack
    double max_abs = 0.0;          // over real and imaginary components
};

// PQ-like buses: (p + j q_now) - v conj(Y v). PV buses: the active residual in
// the real slot and |v| - v_ref in the imaginary slot.
MismatchResult mismatch(const AdmittanceModel& model, const NetworkCase& net,
                        const VoltageState& state);

// Reactive injection currently imposed on a PQ-like bus: the load value for
// PQ, the violated limit for PQmax / PQmin.
double specified_reactive(const BusSpec& bus, DynamicKind kind);

// New voltage of a PQ-like bus from its current neighbours. Throws
// NonIntersecting when the two circles have no common point.
PlanePoint update_pq_bus(const AdmittanceModel& model, const NetworkCase& net,
                         const VoltageState& state, std::size_t d);

struct SwitchToPQ {
    DynamicKind to = DynamicKind::PQmax;
    double q_limit = 0.0;
    double q_computed = 0.0;
};

using PvUpdate = std::variant<PlanePoint, SwitchToPQ>;

// New voltage of a PV bus (magnitude v_ref, angle updated), or the limit the
// bus must be held at when the active-power circle misses the voltage circle.
PvUpdate update_pv_bus(const AdmittanceModel& model, const NetworkCase& net,
                       const VoltageState& state, std::size_t d);

// Returns true (and retags the bus as PV) when a PQmax bus rises above
// v_ref or a PQmin bus falls below it.
bool maybe_revert_to_pv(const NetworkCase& net, VoltageState& state, std::size_t d);

struct RoundResult {
    double max_change = 0.0;
    std::vector<SwitchEvent> events;
};

// One sweep over all non-slack buses, updating `state` in place. Throws
// NonIntersecting from PQ updates.
RoundResult run_round(const AdmittanceModel& model, const NetworkCase& net,
                      VoltageState& state, const SolverConfig& cfg, std::size_t round);

SolveReport solve_fixed_point(const NetworkCase& net, const SolverConfig& cfg);
SolveReport solve_fixed_point(const NetworkCase& net, const AdmittanceModel& model,
                              const SolverConfig& cfg);

}  // namespace circlepf
