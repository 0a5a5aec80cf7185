#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Dense>

#include "circlepf/baselines.hpp"
#include "circlepf/fpsolver.hpp"

namespace circlepf {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

bool is_pq_like(DynamicKind kind) {
    return kind == DynamicKind::PQ || kind == DynamicKind::PQmax || kind == DynamicKind::PQmin;
}

MatrixXcd dense_ybus(const AdmittanceModel& model) {
    const auto n = static_cast<Eigen::Index>(model.size());
    MatrixXcd y = MatrixXcd::Zero(n, n);
    for (Eigen::Index d = 0; d < n; ++d) {
        const auto row = static_cast<std::size_t>(d);
        y(d, d) = model.diag(row);
        for (const auto& nb : model.neighbors(row)) y(d, static_cast<Eigen::Index>(nb.bus)) = nb.y;
    }
    return y;
}

struct Layout {
    std::vector<Eigen::Index> angle_buses;      // PV and PQ-like
    std::vector<Eigen::Index> magnitude_buses;  // PQ-like
};

Layout layout_of(const VoltageState& state) {
    Layout out;
    for (std::size_t d = 0; d < state.size(); ++d) {
        const DynamicKind kind = state.kind[d];
        if (kind == DynamicKind::Slack) continue;
        out.angle_buses.push_back(static_cast<Eigen::Index>(d));
        if (is_pq_like(kind)) out.magnitude_buses.push_back(static_cast<Eigen::Index>(d));
    }
    return out;
}

// Specified minus computed: P on angle buses, then Q on magnitude buses.
VectorXd residual(const NetworkCase& net, const VoltageState& state, const Layout& layout,
                  const VectorXcd& s_calc) {
    const auto na = static_cast<Eigen::Index>(layout.angle_buses.size());
    const auto nm = static_cast<Eigen::Index>(layout.magnitude_buses.size());
    VectorXd f(na + nm);
    for (Eigen::Index i = 0; i < na; ++i) {
        const auto d = layout.angle_buses[static_cast<std::size_t>(i)];
        f(i) = net.buses[static_cast<std::size_t>(d)].p_inj - s_calc(d).real();
    }
    for (Eigen::Index i = 0; i < nm; ++i) {
        const auto d = layout.magnitude_buses[static_cast<std::size_t>(i)];
        const auto bus = static_cast<std::size_t>(d);
        f(na + i) = specified_reactive(net.buses[bus], state.kind[bus]) - s_calc(d).imag();
    }
    return f;
}

VectorXcd to_eigen(const std::vector<Complex>& v) {
    return Eigen::Map<const VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// dS/dVa and dS/dVm restricted to the unknowns.
MatrixXd jacobian(const MatrixXcd& y, const VectorXcd& v, const Layout& layout) {
    const VectorXcd current = y * v;
    const VectorXcd vnorm = v.array() / v.array().abs().cast<Complex>();
    const auto n = v.size();

    MatrixXcd ds_dva(n, n);
    MatrixXcd ds_dvm(n, n);
    const Complex j(0.0, 1.0);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const Complex yrc = y(r, c);
            const Complex diag_i = r == c ? current(r) : Complex{};
            ds_dva(r, c) = j * v(r) * std::conj(diag_i - yrc * v(c));
            ds_dvm(r, c) = v(r) * std::conj(yrc * vnorm(c));
            if (r == c) ds_dvm(r, c) += std::conj(current(r)) * vnorm(r);
        }
    }

    const auto na = static_cast<Eigen::Index>(layout.angle_buses.size());
    const auto nm = static_cast<Eigen::Index>(layout.magnitude_buses.size());
    MatrixXd jac(na + nm, na + nm);
    for (Eigen::Index i = 0; i < na; ++i) {
        const auto r = layout.angle_buses[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < na; ++k) {
            jac(i, k) = ds_dva(r, layout.angle_buses[static_cast<std::size_t>(k)]).real();
        }
        for (Eigen::Index k = 0; k < nm; ++k) {
            jac(i, na + k) = ds_dvm(r, layout.magnitude_buses[static_cast<std::size_t>(k)]).real();
        }
    }
    for (Eigen::Index i = 0; i < nm; ++i) {
        const auto r = layout.magnitude_buses[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < na; ++k) {
            jac(na + i, k) = ds_dva(r, layout.angle_buses[static_cast<std::size_t>(k)]).imag();
        }
        for (Eigen::Index k = 0; k < nm; ++k) {
            jac(na + i, na + k) = ds_dvm(r, layout.magnitude_buses[static_cast<std::size_t>(k)]).imag();
        }
    }
    return jac;
}

VoltageState apply_step(const VoltageState& state, const Layout& layout, const VectorXd& dx,
                        double mu) {
    VoltageState out = state;
    const auto na = static_cast<Eigen::Index>(layout.angle_buses.size());
    std::vector<double> vm(state.size());
    std::vector<double> va(state.size());
    for (std::size_t d = 0; d < state.size(); ++d) {
        vm[d] = std::abs(state.v[d]);
        va[d] = std::arg(state.v[d]);
    }
    for (Eigen::Index i = 0; i < na; ++i) {
        va[static_cast<std::size_t>(layout.angle_buses[static_cast<std::size_t>(i)])] += mu * dx(i);
    }
    for (std::size_t i = 0; i < layout.magnitude_buses.size(); ++i) {
        vm[static_cast<std::size_t>(layout.magnitude_buses[i])] +=
            mu * dx(na + static_cast<Eigen::Index>(i));
    }
    for (std::size_t d = 0; d < state.size(); ++d) out.v[d] = std::polar(vm[d], va[d]);
    return out;
}

VectorXcd power_injection(const MatrixXcd& y, const VectorXcd& v) {
    return v.array() * (y * v).conjugate().array();
}

// Newton iterations share everything except the step multiplier.
SolveReport run_newton(const NetworkCase& net, const BaselineConfig& cfg, bool damped) {
    const auto started = std::chrono::steady_clock::now();
    const AdmittanceModel model = build_admittance(net);
    const MatrixXcd y = dense_ybus(model);

    SolveReport report;
    report.solver = damped ? "dnr" : "nr";

    VoltageState state = initialize(net, cfg.init);
    // Polar Newton keeps PV magnitudes at their setpoints.
    for (const auto& bus : net.buses) {
        if (bus.kind == BusKind::PV) state.v[bus.id] = std::polar(bus.v_ref, std::arg(state.v[bus.id]));
    }

    auto finish = [&](SolveStatus status, std::string reason = {}) {
        report.status = status;
        report.reason = std::move(reason);
        report.final_mismatch = mismatch(model, net, state).max_abs;
        report.final = state;
        report.elapsed_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - started)
                                .count();
        return report;
    };

    double current = mismatch(model, net, state).max_abs;
    report.mismatch_trace.push_back(current);
    if (current < cfg.tol) return finish(SolveStatus::Converged);

    double best_norm = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;

    while (report.rounds < cfg.max_iters) {
        ++report.rounds;
        const Layout layout = layout_of(state);
        const VectorXcd v = to_eigen(state.v);
        const VectorXd f = residual(net, state, layout, power_injection(y, v));
        const MatrixXd jac = jacobian(y, v, layout);

        Eigen::PartialPivLU<MatrixXd> lu(jac);
        const VectorXd dx = lu.solve(f);
        if (!dx.allFinite() || !(lu.rcond() > 1e-16)) {
            return finish(SolveStatus::Diverged, "singular Jacobian");
        }

        double mu = 1.0;
        VoltageState next = apply_step(state, layout, dx, mu);
        if (damped) {
            const double f_norm = f.norm();
            auto trial_norm = [&](const VoltageState& s) {
                const VectorXd g = residual(net, s, layout, power_injection(y, to_eigen(s.v)));
                return g.allFinite() ? g.norm() : std::numeric_limits<double>::infinity();
            };
            double next_norm = trial_norm(next);
            while (!(next_norm < f_norm) && mu > cfg.min_step) {
                mu *= 0.5;
                next = apply_step(state, layout, dx, mu);
                next_norm = trial_norm(next);
            }
            if (!(next_norm < f_norm)) {
                report.mismatch_trace.push_back(current);
                return finish(SolveStatus::Stalled, "line search found no decrease");
            }
            if (next_norm < 0.99 * best_norm) {
                best_norm = next_norm;
                stale = 0;
            } else if (++stale >= cfg.oscillation_window) {
                state = std::move(next);
                current = mismatch(model, net, state).max_abs;
                report.mismatch_trace.push_back(current);
                return finish(SolveStatus::Oscillating,
                              "mismatch norm stopped improving by 1% per window");
            }
        }
        state = std::move(next);

        if (cfg.enforce_q_limits) {
            const VectorXcd s_now = power_injection(y, to_eigen(state.v));
            for (const auto& bus : net.buses) {
                const auto d = bus.id;
                const DynamicKind kind = state.kind[d];
                const double q = s_now(static_cast<Eigen::Index>(d)).imag();
                DynamicKind to = kind;
                if (kind == DynamicKind::PV && q > bus.q_max) to = DynamicKind::PQmax;
                if (kind == DynamicKind::PV && q < bus.q_min) to = DynamicKind::PQmin;
                if (kind == DynamicKind::PQmax || kind == DynamicKind::PQmin) {
                    VoltageState probe = state;
                    if (maybe_revert_to_pv(net, probe, d)) {
                        to = DynamicKind::PV;
                        state.v[d] = std::polar(bus.v_ref, std::arg(state.v[d]));
                    }
                }
                if (to != kind) {
                    report.switching_events.push_back({report.rounds, d, kind, to});
                    state.kind[d] = to;
                }
            }
        }

        current = mismatch(model, net, state).max_abs;
        report.mismatch_trace.push_back(current);
        if (!std::isfinite(current) || current > cfg.divergence_threshold) {
            return finish(SolveStatus::Diverged, "mismatch exceeded divergence threshold");
        }
        if (current < cfg.tol) return finish(SolveStatus::Converged);
    }
    return finish(SolveStatus::MaxRoundsExceeded);
}

}  // namespace

SolveReport solve_newton(const NetworkCase& net, const BaselineConfig& cfg) {
    return run_newton(net, cfg, cfg.damping == Damping::LineSearch);
}

SolveReport solve_damped_newton(const NetworkCase& net, const BaselineConfig& cfg) {
    return run_newton(net, cfg, true);
}

}  // namespace circlepf
