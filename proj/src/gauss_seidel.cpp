#include <chrono>
#include <cmath>

#include "circlepf/baselines.hpp"
#include "circlepf/fpsolver.hpp"

namespace circlepf {

SolveReport solve_gauss_seidel(const NetworkCase& net, const BaselineConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    const AdmittanceModel model = build_admittance(net);

    SolveReport report;
    report.solver = "gs";
    VoltageState state = initialize(net, cfg.init);

    double current = mismatch(model, net, state).max_abs;
    report.mismatch_trace.push_back(current);
    report.status = current < cfg.tol ? SolveStatus::Converged : SolveStatus::MaxRoundsExceeded;

    while (report.status == SolveStatus::MaxRoundsExceeded && report.rounds < cfg.max_iters) {
        ++report.rounds;
        for (const auto& bus : net.buses) {
            const auto d = bus.id;
            if (bus.kind == BusKind::Slack) continue;
            Complex others{};
            for (const auto& nb : model.neighbors(d)) others += nb.y * state.v[nb.bus];
            const Complex vd = state.v[d];

            double q = bus.q_inj;
            if (bus.kind == BusKind::PV) q = (vd * std::conj(model.diag(d) * vd + others)).imag();
            const Complex s(bus.p_inj, q);
            Complex updated = (std::conj(s) / std::conj(vd) - others) / model.diag(d);
            if (bus.kind == BusKind::PV) updated *= bus.v_ref / std::abs(updated);
            state.v[d] = updated;
        }
        current = mismatch(model, net, state).max_abs;
        report.mismatch_trace.push_back(current);
        if (!std::isfinite(current) || current > cfg.divergence_threshold) {
            report.status = SolveStatus::Diverged;
            report.reason = "mismatch exceeded divergence threshold";
        } else if (current < cfg.tol) {
            report.status = SolveStatus::Converged;
        }
    }

    report.final_mismatch = current;
    report.final = std::move(state);
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace circlepf
