#pragma once

// MATPOWER case files (matrix subset) in, JSON reports and CSV traces out.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "circlepf/netmodel.hpp"
#include "circlepf/state.hpp"

namespace circlepf {

// Reads mpc.baseMVA, mpc.bus, mpc.gen and mpc.branch textually; never
// evaluates anything. Powers are converted to per-unit on the case base.
// Throws ParseError / ValidationError.
NetworkCase parse_case(std::string_view text, std::string name = "case");

NetworkCase read_case_file(const std::filesystem::path& path);

// Writes the case back as MATPOWER text. Loads and generation are folded into
// net injections, so the output is equivalent rather than identical to the
// source file.
std::string serialize_case(const NetworkCase& net);

// Multiplies PQ injections (P and Q) and PV active injections by lambda.
NetworkCase scale_loading(const NetworkCase& net, double lambda);

struct RunInfo {
    std::string case_name;
    double lambda = 1.0;
    std::string solver;
};

nlohmann::json report_to_json(const NetworkCase& net, const RunInfo& info,
                              const SolveReport& report);

// columns: round,max_mismatch_pu
void write_trace_csv(std::ostream& os, const SolveReport& report);

}  // namespace circlepf
