#include <random>
#include <stdexcept>

#include "circlepf/state.hpp"

namespace circlepf {

const char* to_string(DynamicKind kind) {
    switch (kind) {
        case DynamicKind::Slack: return "Slack";
        case DynamicKind::PQ: return "PQ";
        case DynamicKind::PV: return "PV";
        case DynamicKind::PQmax: return "PQmax";
        case DynamicKind::PQmin: return "PQmin";
    }
    return "?";
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxRoundsExceeded: return "MaxRoundsExceeded";
        case SolveStatus::Stalled: return "Stalled";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::RestartsExhausted: return "RestartsExhausted";
        case SolveStatus::Diverged: return "Diverged";
        case SolveStatus::Oscillating: return "Oscillating";
    }
    return "?";
}

namespace {

DynamicKind static_kind(BusKind kind) {
    switch (kind) {
        case BusKind::Slack: return DynamicKind::Slack;
        case BusKind::PQ: return DynamicKind::PQ;
        case BusKind::PV: return DynamicKind::PV;
    }
    return DynamicKind::PQ;
}

}  // namespace

VoltageState initialize(const NetworkCase& net, const InitSpec& init) {
    const std::size_t n = net.size();
    VoltageState state;
    state.v.resize(n);
    state.kind.resize(n);
    for (const auto& bus : net.buses) {
        state.kind[bus.id] = static_kind(bus.kind);
        const bool fixed_mag = bus.kind != BusKind::PQ;
        state.v[bus.id] = Complex(fixed_mag ? bus.v_ref : 1.0, 0.0);
    }

    if (const auto* rnd = std::get_if<UniformRandomStart>(&init)) {
        std::mt19937_64 rng(rnd->seed);
        std::uniform_real_distribution<double> dist(1.0 - rnd->alpha, 1.0 + rnd->alpha);
        for (const auto& bus : net.buses) {
            if (bus.kind == BusKind::Slack) continue;
            // Draw even for a zero-width interval so the stream stays aligned.
            const double draw = dist(rng);
            state.v[bus.id] = Complex(rnd->alpha == 0.0 ? state.v[bus.id].real() : draw, 0.0);
        }
    } else if (const auto* given = std::get_if<ExplicitStart>(&init)) {
        if (given->voltages.size() != n) {
            throw std::invalid_argument("explicit start has the wrong number of voltages");
        }
        for (const auto& bus : net.buses) {
            if (bus.kind == BusKind::Slack) continue;
            state.v[bus.id] = given->voltages[bus.id];
        }
    }
    return state;
}

}  // namespace circlepf
