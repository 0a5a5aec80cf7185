#pragma once

// Grid data model in per-unit, the bus admittance matrix by rows, and the
// per-bus coefficients that turn the rectangular power balance equations
// into circles in the (v_r, v_i) plane.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace circlepf {

using Complex = std::complex<double>;

enum class BusKind { Slack, PQ, PV };

const char* to_string(BusKind kind);

struct BusSpec {
    std::size_t id = 0;  // dense index
    BusKind kind = BusKind::PQ;
    double p_inj = 0.0;  // generation minus load
    double q_inj = 0.0;  // generation minus load (meaningful for PQ)
    double v_ref = 1.0;  // Slack / PV magnitude setpoint
    // Reactive injection limits at the bus (generator limits minus local
    // reactive load), so they compare directly with the computed injection.
    double q_min = 0.0;
    double q_max = 0.0;
    double g_sh = 0.0;
    double b_sh = 0.0;
};

struct BranchSpec {
    std::size_t from = 0;
    std::size_t to = 0;
    Complex y_series{0.0, 0.0};
    double b_charge = 0.0;  // total line charging
    double tap = 1.0;
    double shift = 0.0;  // radians
};

struct NetworkCase {
    std::string name;
    double base_mva = 100.0;
    std::vector<BusSpec> buses;
    std::vector<BranchSpec> branches;
    std::vector<int> external_ids;              // dense index -> file bus number
    std::unordered_map<int, std::size_t> index_of;  // file bus number -> dense index

    std::size_t size() const noexcept { return buses.size(); }
    std::size_t slack_index() const;
};

// Throws ValidationError on structural problems (slack count, dangling or
// self-loop branches, disconnected graph, bad taps, bad PV data). Returns
// non-fatal warnings such as capacitive series branches.
std::vector<std::string> validate_case(const NetworkCase& net);

struct Neighbor {
    std::size_t bus;
    Complex y;  // off-diagonal Y_dk
};

// Ybus stored as diagonal plus per-row neighbor lists. Immutable after build.
class AdmittanceModel {
  public:
    AdmittanceModel() = default;
    AdmittanceModel(std::vector<Complex> diag, std::vector<std::vector<Neighbor>> rows);

    std::size_t size() const noexcept { return diag_.size(); }
    Complex diag(std::size_t d) const { return diag_[d]; }
    std::span<const Neighbor> neighbors(std::size_t d) const { return rows_[d]; }

    // Y_dk, zero when the buses are not adjacent.
    Complex entry(std::size_t d, std::size_t k) const;

    // (Y v)_d
    Complex row_current(std::size_t d, std::span<const Complex> v) const;

  private:
    std::vector<Complex> diag_;
    std::vector<std::vector<Neighbor>> rows_;
};

// Pi-model Ybus. Throws DegenerateDiagonal when a non-slack bus has
// |Y_dd| <= 1e-12, i.e. no connection at all.
AdmittanceModel build_admittance(const NetworkCase& net);

inline constexpr double kDegenerateDiagonalEps = 1e-12;

// Coefficients of
//   p = t1 |v|^2 + t2 v_r + t3 v_i
//   q = t4 |v|^2 - t3 v_r + t2 v_i
// where (p, q) is the complex power *drawn* at the bus, i.e. the negative of
// the injection v_d conj((Y v)_d). t1 and t4 come from Y_dd alone; t2 and t3
// from the neighbor voltages.
struct TCoefficients {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double t4 = 0.0;

    double active_drawn(double vr, double vi) const {
        return t1 * (vr * vr + vi * vi) + t2 * vr + t3 * vi;
    }
    double reactive_drawn(double vr, double vi) const {
        return t4 * (vr * vr + vi * vi) - t3 * vr + t2 * vi;
    }
};

TCoefficients t_coefficients(const AdmittanceModel& model, std::size_t d,
                             std::span<const Complex> v);

// v_d * conj((Y v)_d): complex power injected into the network at bus d.
Complex oracle_injection(const AdmittanceModel& model, std::size_t d,
                         std::span<const Complex> v);

}  // namespace circlepf
