#include "circlepf/caseio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "circlepf/errors.hpp"

namespace circlepf {

namespace {

using Matrix = std::vector<std::vector<double>>;

// MATPOWER column indices (0-based) for the consumed subset.
namespace bus_col {
constexpr std::size_t kId = 0, kType = 1, kPd = 2, kQd = 3, kGs = 4, kBs = 5, kVm = 7;
constexpr std::size_t kMinCols = 13;
}  // namespace bus_col
namespace gen_col {
constexpr std::size_t kBus = 0, kPg = 1, kQg = 2, kQmax = 3, kQmin = 4, kVg = 5, kStatus = 7;
constexpr std::size_t kMinCols = 10;
}  // namespace gen_col
namespace branch_col {
constexpr std::size_t kFrom = 0, kTo = 1, kR = 2, kX = 3, kB = 4, kTap = 8, kShift = 9,
                      kStatus = 10;
constexpr std::size_t kMinCols = 11;
}  // namespace branch_col

std::string strip_comments(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_comment = false;
    bool in_string = false;
    for (char ch : text) {
        if (ch == '\n') {
            in_comment = false;
            in_string = false;
            out.push_back(ch);
            continue;
        }
        if (in_comment) continue;
        if (ch == '\'') in_string = !in_string;
        if (ch == '%' && !in_string) {
            in_comment = true;
            continue;
        }
        out.push_back(ch);
    }
    return out;
}

bool is_ident_char(char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
}

// Position just after "mpc.<field>" followed by optional blanks and '=', or npos.
std::size_t find_assignment(const std::string& text, std::string_view field) {
    const std::string key = "mpc." + std::string(field);
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        std::size_t end = pos + key.size();
        const bool bounded_left = pos == 0 || !is_ident_char(text[pos - 1]);
        if (bounded_left && (end >= text.size() || !is_ident_char(text[end]))) {
            while (end < text.size() && std::isspace(static_cast<unsigned char>(text[end]))) ++end;
            if (end < text.size() && text[end] == '=') return end + 1;
        }
        pos = end;
    }
    return std::string::npos;
}

double parse_number(std::string_view token, std::string_view field) {
    if (token == "Inf" || token == "inf" || token == "+Inf") return std::numeric_limits<double>::infinity();
    if (token == "-Inf" || token == "-inf") return -std::numeric_limits<double>::infinity();
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("mpc." + std::string(field) + ": cannot read number '" + std::string(token) + "'");
    }
    return value;
}

std::optional<double> read_scalar(const std::string& text, std::string_view field) {
    const auto start = find_assignment(text, field);
    if (start == std::string::npos) return std::nullopt;
    const auto stop = text.find(';', start);
    if (stop == std::string::npos) throw ParseError("mpc." + std::string(field) + ": missing ';'");
    std::string token;
    std::istringstream is(text.substr(start, stop - start));
    is >> token;
    return parse_number(token, field);
}

std::optional<Matrix> read_matrix(const std::string& text, std::string_view field,
                                  std::size_t min_cols) {
    auto start = find_assignment(text, field);
    if (start == std::string::npos) return std::nullopt;
    while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
    if (start >= text.size() || text[start] != '[') {
        throw ParseError("mpc." + std::string(field) + ": expected '['");
    }
    const auto stop = text.find(']', start);
    if (stop == std::string::npos) throw ParseError("mpc." + std::string(field) + ": missing ']'");
    const std::string body = text.substr(start + 1, stop - start - 1);

    Matrix rows;
    std::vector<double> row;
    std::string token;
    auto flush_token = [&] {
        if (!token.empty()) {
            row.push_back(parse_number(token, field));
            token.clear();
        }
    };
    auto flush_row = [&] {
        flush_token();
        if (!row.empty()) rows.push_back(std::move(row));
        row.clear();
    };
    for (char ch : body) {
        if (ch == ';' || ch == '\n') {
            flush_row();
        } else if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
            flush_token();
        } else {
            token.push_back(ch);
        }
    }
    flush_row();

    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size() || rows[i].size() < min_cols) {
            std::ostringstream os;
            os << "mpc." << field << ": row " << (i + 1) << " has " << rows[i].size()
               << " columns (need >= " << min_cols << ", consistent across rows)";
            throw ParseError(os.str());
        }
    }
    return rows;
}

int as_bus_number(double value, std::string_view what) {
    if (value != std::floor(value)) {
        throw ParseError(std::string(what) + ": bus number is not an integer");
    }
    return static_cast<int>(value);
}

}  // namespace

NetworkCase parse_case(std::string_view text, std::string name) {
    const std::string clean = strip_comments(text);

    const auto base = read_scalar(clean, "baseMVA");
    if (!base) throw ParseError("missing mpc.baseMVA");
    if (!(*base > 0.0)) throw ValidationError("baseMVA must be positive");
    const auto bus_rows = read_matrix(clean, "bus", bus_col::kMinCols);
    if (!bus_rows || bus_rows->empty()) throw ParseError("missing mpc.bus");
    const auto gen_rows = read_matrix(clean, "gen", gen_col::kMinCols).value_or(Matrix{});
    const auto branch_rows = read_matrix(clean, "branch", branch_col::kMinCols);
    if (!branch_rows) throw ParseError("missing mpc.branch");

    NetworkCase net;
    net.name = std::move(name);
    net.base_mva = *base;
    const double base_mva = *base;

    // Isolated buses (type 4) are dropped together with their branches.
    std::vector<int> isolated;
    for (const auto& row : *bus_rows) {
        const int ext = as_bus_number(row[bus_col::kId], "mpc.bus");
        const int type = static_cast<int>(row[bus_col::kType]);
        if (type == 4) {
            isolated.push_back(ext);
            continue;
        }
        if (type < 1 || type > 3) {
            throw ParseError("mpc.bus: unknown bus type " + std::to_string(type));
        }
        if (net.index_of.count(ext)) {
            throw ValidationError("duplicate bus number " + std::to_string(ext));
        }
        BusSpec bus;
        bus.id = net.buses.size();
        bus.kind = type == 3 ? BusKind::Slack : (type == 2 ? BusKind::PV : BusKind::PQ);
        bus.p_inj = -row[bus_col::kPd] / base_mva;
        bus.q_inj = -row[bus_col::kQd] / base_mva;
        bus.g_sh = row[bus_col::kGs] / base_mva;
        bus.b_sh = row[bus_col::kBs] / base_mva;
        bus.v_ref = row[bus_col::kVm];
        bus.q_min = bus.q_inj;
        bus.q_max = bus.q_inj;
        net.index_of.emplace(ext, bus.id);
        net.external_ids.push_back(ext);
        net.buses.push_back(bus);
    }

    std::vector<bool> has_gen(net.buses.size(), false);
    for (const auto& row : gen_rows) {
        if (row[gen_col::kStatus] <= 0.0) continue;
        const int ext = as_bus_number(row[gen_col::kBus], "mpc.gen");
        auto it = net.index_of.find(ext);
        if (it == net.index_of.end()) {
            throw ValidationError("generator at unknown bus " + std::to_string(ext));
        }
        auto& bus = net.buses[it->second];
        bus.p_inj += row[gen_col::kPg] / base_mva;
        bus.q_inj += row[gen_col::kQg] / base_mva;
        bus.q_max += row[gen_col::kQmax] / base_mva;
        bus.q_min += row[gen_col::kQmin] / base_mva;
        if (!has_gen[bus.id]) bus.v_ref = row[gen_col::kVg];
        has_gen[bus.id] = true;
    }
    for (auto& bus : net.buses) {
        if (bus.kind == BusKind::PV && !has_gen[bus.id]) bus.kind = BusKind::PQ;
    }

    for (const auto& row : *branch_rows) {
        if (row[branch_col::kStatus] <= 0.0) continue;
        const int from_ext = as_bus_number(row[branch_col::kFrom], "mpc.branch");
        const int to_ext = as_bus_number(row[branch_col::kTo], "mpc.branch");
        if (std::find(isolated.begin(), isolated.end(), from_ext) != isolated.end() ||
            std::find(isolated.begin(), isolated.end(), to_ext) != isolated.end()) {
            continue;
        }
        auto from = net.index_of.find(from_ext);
        auto to = net.index_of.find(to_ext);
        if (from == net.index_of.end() || to == net.index_of.end()) {
            throw ValidationError("branch " + std::to_string(from_ext) + "-" + std::to_string(to_ext) +
                                  " references an unknown bus");
        }
        const Complex z(row[branch_col::kR], row[branch_col::kX]);
        if (z == Complex(0.0, 0.0)) {
            throw ValidationError("branch " + std::to_string(from_ext) + "-" + std::to_string(to_ext) +
                                  " has zero impedance");
        }
        BranchSpec br;
        br.from = from->second;
        br.to = to->second;
        br.y_series = 1.0 / z;
        br.b_charge = row[branch_col::kB];
        br.tap = row[branch_col::kTap] == 0.0 ? 1.0 : row[branch_col::kTap];
        br.shift = row[branch_col::kShift] * std::numbers::pi / 180.0;
        net.branches.push_back(br);
    }

    validate_case(net);
    return net;
}

NetworkCase read_case_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open case file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_case(buf.str(), path.stem().string());
}

std::string serialize_case(const NetworkCase& net) {
    std::ostringstream os;
    os << std::setprecision(17);
    const double base = net.base_mva;
    auto ext = [&](std::size_t i) {
        return net.external_ids.size() == net.size() ? net.external_ids[i] : static_cast<int>(i + 1);
    };

    os << "function mpc = " << net.name << "\n";
    os << "mpc.version = '2';\n";
    os << "mpc.baseMVA = " << base << ";\n\n";
    os << "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin\n";
    os << "mpc.bus = [\n";
    for (const auto& bus : net.buses) {
        const int type = bus.kind == BusKind::Slack ? 3 : (bus.kind == BusKind::PV ? 2 : 1);
        // PQ buses carry their injection as load; generator buses carry P on the
        // generator row and zero reactive load so the limits map back exactly.
        const double pd = bus.kind == BusKind::PQ ? -bus.p_inj * base : 0.0;
        const double qd = bus.kind == BusKind::PQ ? -bus.q_inj * base : 0.0;
        os << '\t' << ext(bus.id) << '\t' << type << '\t' << pd << '\t' << qd << '\t'
           << bus.g_sh * base << '\t' << bus.b_sh * base << "\t1\t" << bus.v_ref
           << "\t0\t0\t1\t1.1\t0.9;\n";
    }
    os << "];\n\n";
    os << "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin\n";
    os << "mpc.gen = [\n";
    for (const auto& bus : net.buses) {
        if (bus.kind == BusKind::PQ) continue;
        os << '\t' << ext(bus.id) << '\t' << bus.p_inj * base << '\t' << bus.q_inj * base << '\t'
           << bus.q_max * base << '\t' << bus.q_min * base << '\t' << bus.v_ref << '\t' << base
           << "\t1\t0\t0;\n";
    }
    os << "];\n\n";
    os << "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\n";
    os << "mpc.branch = [\n";
    for (const auto& br : net.branches) {
        const Complex z = 1.0 / br.y_series;
        os << '\t' << ext(br.from) << '\t' << ext(br.to) << '\t' << z.real() << '\t' << z.imag()
           << '\t' << br.b_charge << "\t0\t0\t0\t" << br.tap << '\t'
           << br.shift * 180.0 / std::numbers::pi << "\t1;\n";
    }
    os << "];\n";
    return os.str();
}

NetworkCase scale_loading(const NetworkCase& net, double lambda) {
    NetworkCase out = net;
    for (auto& bus : out.buses) {
        if (bus.kind == BusKind::PQ) {
            bus.p_inj *= lambda;
            bus.q_inj *= lambda;
        } else if (bus.kind == BusKind::PV) {
            bus.p_inj *= lambda;
        }
    }
    return out;
}

nlohmann::json report_to_json(const NetworkCase& net, const RunInfo& info,
                              const SolveReport& report) {
    nlohmann::json doc;
    doc["case"] = info.case_name;
    doc["lambda"] = info.lambda;
    doc["solver"] = info.solver;
    doc["status"] = to_string(report.status);
    doc["rounds"] = report.rounds;
    doc["restarts"] = report.restarts;
    doc["final_mismatch"] = report.final_mismatch;
    if (!report.reason.empty()) doc["reason"] = report.reason;
    doc["mismatch_trace"] = report.mismatch_trace;

    auto events = nlohmann::json::array();
    for (const auto& ev : report.switching_events) {
        events.push_back({{"round", ev.round},
                          {"bus", net.external_ids.at(ev.bus)},
                          {"from", to_string(ev.from)},
                          {"to", to_string(ev.to)}});
    }
    doc["switching_events"] = std::move(events);

    auto voltages = nlohmann::json::array();
    for (std::size_t i = 0; i < report.final.size(); ++i) {
        const Complex v = report.final.v[i];
        voltages.push_back({{"bus", net.external_ids.at(i)},
                            {"kind", to_string(report.final.kind[i])},
                            {"vm", std::abs(v)},
                            {"va_deg", std::arg(v) * 180.0 / std::numbers::pi},
                            {"vr", v.real()},
                            {"vi", v.imag()}});
    }
    doc["voltages"] = std::move(voltages);
    doc["elapsed_ms"] = report.elapsed_ms;
    return doc;
}

void write_trace_csv(std::ostream& os, const SolveReport& report) {
    os << "round,max_mismatch_pu\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < report.mismatch_trace.size(); ++i) {
        os << i << ',' << report.mismatch_trace[i] << '\n';
    }
}

}  // namespace circlepf
