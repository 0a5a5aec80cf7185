#include "circlepf/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "circlepf/errors.hpp"

namespace circlepf {

const char* to_string(BusKind kind) {
    switch (kind) {
        case BusKind::Slack: return "Slack";
        case BusKind::PQ: return "PQ";
        case BusKind::PV: return "PV";
    }
    return "?";
}

std::size_t NetworkCase::slack_index() const {
    for (const auto& bus : buses) {
        if (bus.kind == BusKind::Slack) return bus.id;
    }
    throw ValidationError("case has no slack bus");
}

std::vector<std::string> validate_case(const NetworkCase& net) {
    std::vector<std::string> warnings;
    const std::size_t n = net.buses.size();
    if (n == 0) throw ValidationError("case has no buses");

    std::size_t slack_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& bus = net.buses[i];
        if (bus.id != i) throw ValidationError("bus ids are not dense");
        if (bus.kind == BusKind::Slack) ++slack_count;
        if (bus.kind == BusKind::PV || bus.kind == BusKind::Slack) {
            if (!(bus.v_ref > 0.0)) {
                std::ostringstream os;
                os << "bus " << i << " has non-positive voltage setpoint";
                throw ValidationError(os.str());
            }
        }
        if (bus.kind == BusKind::PV && bus.q_min > bus.q_max) {
            std::ostringstream os;
            os << "PV bus " << i << " has q_min > q_max";
            throw ValidationError(os.str());
        }
    }
    if (slack_count != 1) {
        std::ostringstream os;
        os << "expected exactly one slack bus, found " << slack_count;
        throw ValidationError(os.str());
    }

    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const auto& br = net.branches[b];
        if (br.from >= n || br.to >= n) {
            std::ostringstream os;
            os << "branch " << b << " references an unknown bus";
            throw ValidationError(os.str());
        }
        if (br.from == br.to) {
            std::ostringstream os;
            os << "branch " << b << " is a self loop";
            throw ValidationError(os.str());
        }
        if (!(br.tap > 0.0)) {
            std::ostringstream os;
            os << "branch " << b << " has non-positive tap ratio";
            throw ValidationError(os.str());
        }
        if (br.y_series.imag() > 0.0) {
            std::ostringstream os;
            os << "branch " << b << " has capacitive series susceptance";
            warnings.push_back(os.str());
        }
        adj[br.from].push_back(br.to);
        adj[br.to].push_back(br.from);
    }

    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{net.slack_index()};
    seen[stack.back()] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const auto d = stack.back();
        stack.pop_back();
        for (auto k : adj[d]) {
            if (!seen[k]) {
                seen[k] = true;
                ++reached;
                stack.push_back(k);
            }
        }
    }
    if (reached != n) throw ValidationError("network graph is not connected");
    return warnings;
}

AdmittanceModel::AdmittanceModel(std::vector<Complex> diag,
                                 std::vector<std::vector<Neighbor>> rows)
    : diag_(std::move(diag)), rows_(std::move(rows)) {}

Complex AdmittanceModel::entry(std::size_t d, std::size_t k) const {
    if (d == k) return diag_[d];
    for (const auto& nb : rows_[d]) {
        if (nb.bus == k) return nb.y;
    }
    return {};
}

Complex AdmittanceModel::row_current(std::size_t d, std::span<const Complex> v) const {
    Complex sum = diag_[d] * v[d];
    for (const auto& nb : rows_[d]) sum += nb.y * v[nb.bus];
    return sum;
}

namespace {

void accumulate(std::vector<Neighbor>& row, std::size_t k, Complex y) {
    auto it = std::find_if(row.begin(), row.end(),
                           [k](const Neighbor& nb) { return nb.bus == k; });
    if (it == row.end()) {
        row.push_back({k, y});
    } else {
        it->y += y;
    }
}

}  // namespace

AdmittanceModel build_admittance(const NetworkCase& net) {
    const std::size_t n = net.buses.size();
    std::vector<Complex> diag(n);
    std::vector<std::vector<Neighbor>> rows(n);

    for (const auto& bus : net.buses) diag[bus.id] += Complex(bus.g_sh, bus.b_sh);

    for (const auto& br : net.branches) {
        const Complex ys = br.y_series;
        const Complex ytt = ys + Complex(0.0, br.b_charge / 2.0);
        const Complex ratio = std::polar(br.tap, br.shift);
        diag[br.from] += ytt / (br.tap * br.tap);
        diag[br.to] += ytt;
        accumulate(rows[br.from], br.to, -ys / std::conj(ratio));
        accumulate(rows[br.to], br.from, -ys / ratio);
    }

    for (auto& row : rows) {
        std::sort(row.begin(), row.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.bus < b.bus; });
    }

    for (const auto& bus : net.buses) {
        if (bus.kind == BusKind::Slack) continue;
        if (std::abs(diag[bus.id]) <= kDegenerateDiagonalEps) {
            std::ostringstream os;
            os << "bus " << bus.id << " has a vanishing self admittance";
            throw DegenerateDiagonal(bus.id, os.str());
        }
    }
    return AdmittanceModel(std::move(diag), std::move(rows));
}

TCoefficients t_coefficients(const AdmittanceModel& model, std::size_t d,
                             std::span<const Complex> v) {
    Complex w{0.0, 0.0};
    for (const auto& nb : model.neighbors(d)) w += nb.y * v[nb.bus];
    const Complex ydd = model.diag(d);
    return {-ydd.real(), -w.real(), -w.imag(), ydd.imag()};
}

Complex oracle_injection(const AdmittanceModel& model, std::size_t d,
                         std::span<const Complex> v) {
    return v[d] * std::conj(model.row_current(d, v));
}

}  // namespace circlepf
