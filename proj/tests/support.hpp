#pragma once

#include <string>
#include <vector>

#include "circlepf/caseio.hpp"
#include "circlepf/netmodel.hpp"

namespace testing_support {

inline std::string data_path(const std::string& file) {
    return std::string(CIRCLEPF_DATA_DIR) + "/" + file;
}

inline circlepf::NetworkCase load(const std::string& stem) {
    return circlepf::read_case_file(data_path(stem + ".m"));
}

inline circlepf::BusSpec bus(std::size_t id, circlepf::BusKind kind, double p = 0.0,
                             double q = 0.0, double v_ref = 1.0) {
    circlepf::BusSpec b;
    b.id = id;
    b.kind = kind;
    b.p_inj = p;
    b.q_inj = q;
    b.v_ref = v_ref;
    b.q_min = -10.0;
    b.q_max = 10.0;
    return b;
}

inline circlepf::BranchSpec line(std::size_t from, std::size_t to, circlepf::Complex y,
                                 double b_charge = 0.0) {
    circlepf::BranchSpec br;
    br.from = from;
    br.to = to;
    br.y_series = y;
    br.b_charge = b_charge;
    return br;
}

inline circlepf::NetworkCase make_case(std::vector<circlepf::BusSpec> buses,
                                       std::vector<circlepf::BranchSpec> branches) {
    circlepf::NetworkCase net;
    net.name = "synthetic";
    net.buses = std::move(buses);
    net.branches = std::move(branches);
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        net.external_ids.push_back(static_cast<int>(i + 1));
        net.index_of[static_cast<int>(i + 1)] = i;
    }
    return net;
}

// Slack at bus 0 and a triangle of identical lines, as in the small
// illustrative network with all admittances 1 - j1.5.
inline circlepf::NetworkCase triangle(double p2, double q2, double p3, double q3) {
    using circlepf::BusKind;
    const circlepf::Complex y(1.0, -1.5);
    return make_case({bus(0, BusKind::Slack), bus(1, BusKind::PQ, p2, q2), bus(2, BusKind::PQ, p3, q3)},
                     {line(0, 1, y), line(1, 2, y), line(0, 2, y)});
}

}  // namespace testing_support
