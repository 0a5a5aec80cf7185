#include "circlepf/fpsolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "circlepf/errors.hpp"

namespace circlepf {

namespace {

bool is_pq_like(DynamicKind kind) {
    return kind == DynamicKind::PQ || kind == DynamicKind::PQmax || kind == DynamicKind::PQmin;
}

Complex to_complex(PlanePoint p) { return {p.x, p.y}; }

}  // namespace

double specified_reactive(const BusSpec& bus, DynamicKind kind) {
    switch (kind) {
        case DynamicKind::PQmax: return bus.q_max;
        case DynamicKind::PQmin: return bus.q_min;
        default: return bus.q_inj;
    }
}

MismatchResult mismatch(const AdmittanceModel& model, const NetworkCase& net,
                        const VoltageState& state) {
    MismatchResult out;
    out.per_bus.assign(net.size(), Complex{});
    for (const auto& bus : net.buses) {
        const auto d = bus.id;
        const DynamicKind kind = state.kind[d];
        if (kind == DynamicKind::Slack) continue;
        const Complex s = oracle_injection(model, d, state.v);
        Complex delta;
        if (kind == DynamicKind::PV) {
            delta = {bus.p_inj - s.real(), std::abs(state.v[d]) - bus.v_ref};
        } else {
            delta = Complex(bus.p_inj, specified_reactive(bus, kind)) - s;
        }
        out.per_bus[d] = delta;
        out.max_abs = std::max({out.max_abs, std::abs(delta.real()), std::abs(delta.imag())});
    }
    return out;
}

PlanePoint update_pq_bus(const AdmittanceModel& model, const NetworkCase& net,
                         const VoltageState& state, std::size_t d) {
    const BusSpec& bus = net.buses[d];
    const TCoefficients t = t_coefficients(model, d, state.v);
    // The circles describe power drawn from the bus, the negated injection.
    const CircleTuple active = real_power_circle(t, -bus.p_inj);
    const CircleTuple reactive = reactive_power_circle(t, -specified_reactive(bus, state.kind[d]));
    const IntersectionResult res = intersect_tuples(active, reactive);
    if (res.kind == IntersectionKind::NoIntersection) {
        std::ostringstream os;
        os << "power circles of bus " << d << " do not intersect";
        throw NonIntersecting(d, os.str());
    }
    return choose_pq_solution(res);
}

PvUpdate update_pv_bus(const AdmittanceModel& model, const NetworkCase& net,
                       const VoltageState& state, std::size_t d) {
    const BusSpec& bus = net.buses[d];
    const TCoefficients t = t_coefficients(model, d, state.v);
    const CircleTuple active = real_power_circle(t, -bus.p_inj);
    const IntersectionResult res = intersect_tuples(active, voltage_circle(bus.v_ref));
    if (res.kind != IntersectionKind::NoIntersection) {
        const PlanePoint p = choose_pv_solution(res);
        return (bus.v_ref / norm(p)) * p;
    }

    SwitchToPQ sw;
    sw.q_computed = oracle_injection(model, d, state.v).imag();
    bool upper;
    if (sw.q_computed > bus.q_max) {
        upper = true;
    } else if (sw.q_computed < bus.q_min) {
        upper = false;
    } else {
        upper = bus.q_max - sw.q_computed <= sw.q_computed - bus.q_min;
    }
    sw.to = upper ? DynamicKind::PQmax : DynamicKind::PQmin;
    sw.q_limit = upper ? bus.q_max : bus.q_min;
    return sw;
}

bool maybe_revert_to_pv(const NetworkCase& net, VoltageState& state, std::size_t d) {
    const double vm = std::abs(state.v[d]);
    const double v_ref = net.buses[d].v_ref;
    const DynamicKind kind = state.kind[d];
    if ((kind == DynamicKind::PQmax && vm > v_ref) || (kind == DynamicKind::PQmin && vm < v_ref)) {
        state.kind[d] = DynamicKind::PV;
        return true;
    }
    return false;
}

RoundResult run_round(const AdmittanceModel& model, const NetworkCase& net,
                      VoltageState& state, const SolverConfig& cfg, std::size_t round) {
    RoundResult out;
    auto assign = [&](std::size_t d, Complex v) {
        out.max_change = std::max(out.max_change, std::abs(v - state.v[d]));
        state.v[d] = v;
    };
    auto retag = [&](std::size_t d, DynamicKind to) {
        out.events.push_back({round, d, state.kind[d], to});
        state.kind[d] = to;
    };

    auto visit = [&](std::size_t d) {
        const DynamicKind kind = state.kind[d];
        if (kind == DynamicKind::Slack) return;
        if (is_pq_like(kind)) {
            assign(d, to_complex(update_pq_bus(model, net, state, d)));
            if (kind != DynamicKind::PQ && maybe_revert_to_pv(net, state, d)) {
                out.events.push_back({round, d, kind, DynamicKind::PV});
            }
            return;
        }

        const PvUpdate upd = update_pv_bus(model, net, state, d);
        if (const auto* p = std::get_if<PlanePoint>(&upd)) {
            assign(d, to_complex(*p));
            if (cfg.strict_q_limits) {
                const BusSpec& bus = net.buses[d];
                const double q = oracle_injection(model, d, state.v).imag();
                if (q > bus.q_max) {
                    retag(d, DynamicKind::PQmax);
                } else if (q < bus.q_min) {
                    retag(d, DynamicKind::PQmin);
                }
            }
            return;
        }
        retag(d, std::get<SwitchToPQ>(upd).to);
        assign(d, to_complex(update_pq_bus(model, net, state, d)));
    };

    if (cfg.update_order.empty()) {
        for (std::size_t d = 0; d < net.size(); ++d) visit(d);
    } else {
        for (auto d : cfg.update_order) visit(d);
    }
    return out;
}

SolveReport solve_fixed_point(const NetworkCase& net, const SolverConfig& cfg) {
    return solve_fixed_point(net, build_admittance(net), cfg);
}

SolveReport solve_fixed_point(const NetworkCase& net, const AdmittanceModel& model,
                              const SolverConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    SolveReport report;
    report.solver = "fp";

    std::uint64_t base_seed = 0;
    if (const auto* rnd = std::get_if<UniformRandomStart>(&cfg.init)) base_seed = rnd->seed;

    VoltageState state = initialize(net, cfg.init);
    double current = mismatch(model, net, state).max_abs;
    report.mismatch_trace.push_back(current);

    std::vector<std::size_t> failing_buses;
    report.status = SolveStatus::MaxRoundsExceeded;
    if (current < cfg.tol) report.status = SolveStatus::Converged;

    while (report.status == SolveStatus::MaxRoundsExceeded && report.rounds < cfg.max_rounds) {
        ++report.rounds;
        RoundResult round;
        try {
            round = run_round(model, net, state, cfg, report.rounds);
        } catch (const NonIntersecting& e) {
            failing_buses.push_back(e.bus());
            if (report.restarts >= cfg.restart_limit) {
                const bool same_bus =
                    std::all_of(failing_buses.begin(), failing_buses.end(),
                                [&](std::size_t b) { return b == failing_buses.front(); });
                report.status = failing_buses.size() > 1 && same_bus ? SolveStatus::Infeasible
                                                                     : SolveStatus::RestartsExhausted;
                report.reason = e.what();
                break;
            }
            ++report.restarts;
            state = initialize(net, UniformRandomStart{0.1, base_seed + report.restarts});
            current = mismatch(model, net, state).max_abs;
            if (cfg.record_trace) report.mismatch_trace.push_back(current);
            continue;
        }
        report.switching_events.insert(report.switching_events.end(), round.events.begin(),
                                       round.events.end());
        current = mismatch(model, net, state).max_abs;
        if (cfg.record_trace) report.mismatch_trace.push_back(current);
        if (!std::isfinite(current)) {
            report.status = SolveStatus::Diverged;
            report.reason = "non-finite mismatch";
        } else if (current < cfg.tol) {
            report.status = SolveStatus::Converged;
        } else if (round.max_change < cfg.tol * 1e-3) {
            report.status = SolveStatus::Stalled;
            report.reason = "voltages stopped changing above tolerance";
        }
    }

    if (!cfg.record_trace && report.mismatch_trace.back() != current) {
        report.mismatch_trace.push_back(current);
    }
    report.final_mismatch = current;
    report.final = std::move(state);
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace circlepf
