#include "sct/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mipred::sct {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("supply chain config: " + msg);
}

bool identifier_safe(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) return false;
    for (char ch : s) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
    }
    return true;
}

void check_tensor(const std::vector<std::vector<std::vector<double>>>& t,
                  int d0, int d1, int d2, const std::string& what) {
    if (static_cast<int>(t.size()) != d0) fail(what + ": outer dimension mismatch");
    for (const auto& plane : t) {
        if (static_cast<int>(plane.size()) != d1) fail(what + ": middle dimension mismatch");
        for (const auto& row : plane) {
            if (static_cast<int>(row.size()) != d2) fail(what + ": inner dimension mismatch");
            for (double v : row) {
                if (!(v >= 0.0) || !std::isfinite(v)) fail(what + ": costs must be finite and nonnegative");
            }
        }
    }
}

}  // namespace

int SupplyChainConfig::min_route_days() const {
    int t1 = std::numeric_limits<int>::max(), t2 = std::numeric_limits<int>::max();
    for (const auto& m : modes) {
        t1 = std::min(t1, m.leg1_days);
        t2 = std::min(t2, m.leg2_days);
    }
    return collection_days + t1 + processing_days() + t2;
}

int SupplyChainConfig::max_route_days() const {
    int t1 = 0, t2 = 0;
    for (const auto& m : modes) {
        t1 = std::max(t1, m.leg1_days);
        t2 = std::max(t2, m.leg2_days);
    }
    return collection_days + t1 + processing_days() + t2;
}

void SupplyChainConfig::validate() const {
    if (facilities.empty()) fail("no facilities");
    if (centers.empty()) fail("no collection centers");
    if (modes.empty()) fail("no transport modes");

    std::set<std::string> seen;
    for (const auto& f : facilities) {
        if (!identifier_safe(f.name)) fail("facility name '" + f.name + "' is not identifier-safe");
        if (!seen.insert(f.name).second) fail("duplicate facility name '" + f.name + "'");
        if (f.lines < 1) fail("facility '" + f.name + "' needs at least one line");
        if (!(f.capital_cost >= 0.0) || !(f.fixed_variable_cost >= 0.0))
            fail("facility '" + f.name + "' has negative cost");
    }
    std::set<std::string> hospitals;
    for (const auto& c : centers) {
        if (!identifier_safe(c.name)) fail("center name '" + c.name + "' is not identifier-safe");
        if (!identifier_safe(c.hospital)) fail("hospital name '" + c.hospital + "' is not identifier-safe");
        if (!seen.insert(c.name).second) fail("duplicate center name '" + c.name + "'");
        if (!hospitals.insert(c.hospital).second)
            fail("hospital '" + c.hospital + "' is paired with more than one center");
    }
    for (const auto& h : hospitals) {
        if (seen.count(h)) fail("hospital name '" + h + "' collides with another entity");
    }
    for (const auto& m : modes) {
        if (!identifier_safe(m.name)) fail("mode name '" + m.name + "' is not identifier-safe");
        if (!seen.insert(m.name).second) fail("duplicate mode name '" + m.name + "'");
        if (m.leg1_days < 1 || m.leg2_days < 1) fail("mode '" + m.name + "' needs positive transit days");
    }

    check_tensor(leg1_unit_cost, center_count(), facility_count(), mode_count(), "leg1 unit cost");
    check_tensor(leg2_unit_cost, facility_count(), hospital_count(), mode_count(), "leg2 unit cost");

    if (!(therapy_material_cost >= 0.0)) fail("therapy material cost must be nonnegative");
    if (!(qc_release_cost >= 0.0)) fail("qc release cost must be nonnegative");
    if (collection_days < 0) fail("collection days must be nonnegative");
    if (manufacturing_days < 1) fail("manufacturing days must be positive");
    if (qc_days < 0) fail("qc days must be nonnegative");
    if (max_facilities < 1) fail("max facilities must be positive");
    if (max_facilities > facility_count()) fail("max facilities exceeds the facility count");
    if (!(min_flow >= 0.0) || !(max_flow >= min_flow)) fail("flow window is empty");
    if (!(max_flow >= 1.0)) fail("max flow below 1 makes every route infeasible");
    if (time_periods < 0) fail("time periods must be nonnegative");
    if (daily_center_cap < 1) fail("daily center cap must be positive");
    if (max_turnaround_days < min_route_days())
        fail("turnaround limit " + std::to_string(max_turnaround_days) +
             " is shorter than the fastest possible route (" +
             std::to_string(min_route_days()) + " days)");
}

SupplyChainConfig SupplyChainConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);  // allow comments
    } catch (const std::exception& e) {
        fail("parse error in '" + path + "': " + e.what());
    }

    SupplyChainConfig cfg;
    try {
        for (const auto& f : j.at("facilities")) {
            Facility fac;
            fac.name = f.at("name").get<std::string>();
            fac.lines = f.at("lines").get<int>();
            fac.capital_cost = f.at("capital_cost").get<double>();
            fac.fixed_variable_cost = f.at("fixed_variable_cost").get<double>();
            cfg.facilities.push_back(std::move(fac));
        }
        for (const auto& c : j.at("centers")) {
            Center cen;
            cen.name = c.at("name").get<std::string>();
            cen.hospital = c.at("hospital").get<std::string>();
            cfg.centers.push_back(std::move(cen));
        }
        for (const auto& m : j.at("modes")) {
            Mode mode;
            mode.name = m.at("name").get<std::string>();
            mode.leg1_days = m.at("leg1_days").get<int>();
            mode.leg2_days = m.at("leg2_days").get<int>();
            cfg.modes.push_back(std::move(mode));
        }
        cfg.leg1_unit_cost = j.at("leg1_unit_cost").get<std::vector<std::vector<std::vector<double>>>>();
        cfg.leg2_unit_cost = j.at("leg2_unit_cost").get<std::vector<std::vector<std::vector<double>>>>();
        cfg.therapy_material_cost = j.at("therapy_material_cost").get<double>();
        cfg.qc_release_cost = j.at("qc_release_cost").get<double>();
        cfg.collection_days = j.at("collection_days").get<int>();
        cfg.manufacturing_days = j.at("manufacturing_days").get<int>();
        cfg.qc_days = j.at("qc_days").get<int>();
        cfg.max_turnaround_days = j.at("max_turnaround_days").get<int>();
        cfg.max_facilities = j.at("max_facilities").get<int>();
        cfg.min_flow = j.value("min_flow", 0.0);
        cfg.max_flow = j.value("max_flow", 1.0);
        cfg.time_periods = j.value("time_periods", 0);
        cfg.daily_center_cap = j.value("daily_center_cap", 8);
    } catch (const json::exception& e) {
        fail("missing or mistyped field in '" + path + "': " + e.what());
    }
    cfg.validate();
    return cfg;
}

void SupplyChainConfig::to_json_file(const std::string& path) const {
    json j;
    for (const auto& f : facilities) {
        j["facilities"].push_back({{"name", f.name},
                                   {"lines", f.lines},
                                   {"capital_cost", f.capital_cost},
                                   {"fixed_variable_cost", f.fixed_variable_cost}});
    }
    for (const auto& c : centers) {
        j["centers"].push_back({{"name", c.name}, {"hospital", c.hospital}});
    }
    for (const auto& m : modes) {
        j["modes"].push_back({{"name", m.name}, {"leg1_days", m.leg1_days}, {"leg2_days", m.leg2_days}});
    }
    j["leg1_unit_cost"] = leg1_unit_cost;
    j["leg2_unit_cost"] = leg2_unit_cost;
    j["therapy_material_cost"] = therapy_material_cost;
    j["qc_release_cost"] = qc_release_cost;
    j["collection_days"] = collection_days;
    j["manufacturing_days"] = manufacturing_days;
    j["qc_days"] = qc_days;
    j["max_turnaround_days"] = max_turnaround_days;
    j["max_facilities"] = max_facilities;
    j["min_flow"] = min_flow;
    j["max_flow"] = max_flow;
    j["time_periods"] = time_periods;
    j["daily_center_cap"] = daily_center_cap;

    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

void DemandProfile::validate(const SupplyChainConfig& config) const {
    if (arrivals.empty()) fail("demand profile has no patients");
    if (horizon < 1) fail("demand horizon must be positive");
    for (size_t p = 0; p < arrivals.size(); ++p) {
        const auto& a = arrivals[p];
        if (a.center < 0 || a.center >= config.center_count())
            fail("patient " + std::to_string(p + 1) + " references an unknown center");
        if (a.day < 1 || a.day > horizon)
            fail("patient " + std::to_string(p + 1) + " arrives outside the horizon");
    }
}

DemandProfile DemandProfile::load(const std::string& path, const SupplyChainConfig& config) {
    std::ifstream in(path);
    if (!in) fail("cannot open demand file '" + path + "'");
    DemandProfile d;
    d.horizon = 0;
    std::string line;
    int expect = 1;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            auto pos = line.find("horizon=");
            if (pos != std::string::npos) d.horizon = std::stoi(line.substr(pos + 8));
            continue;
        }
        std::istringstream row(line);
        std::string pf, cf, tf;
        if (!std::getline(row, pf, ',') || !std::getline(row, cf, ',') || !std::getline(row, tf))
            fail("malformed demand row '" + line + "'");
        if (std::stoi(pf) != expect)
            fail("demand rows must list patients 1..n in order; saw '" + pf + "'");
        ++expect;
        int center = -1;
        for (int c = 0; c < config.center_count(); ++c) {
            if (config.centers[c].name == cf) { center = c; break; }
        }
        if (center < 0) fail("unknown center '" + cf + "' in demand file");
        Arrival a;
        a.center = center;
        a.day = std::stoi(tf);
        d.arrivals.push_back(a);
    }
    if (d.horizon == 0) {
        for (const auto& a : d.arrivals) d.horizon = std::max(d.horizon, a.day);
    }
    d.validate(config);
    return d;
}

void DemandProfile::save(const std::string& path, const SupplyChainConfig& config) const {
    std::ofstream out(path);
    if (!out) fail("cannot write demand file '" + path + "'");
    out << "# patient,center,arrival_day horizon=" << horizon << '\n';
    for (size_t p = 0; p < arrivals.size(); ++p) {
        out << (p + 1) << ',' << config.centers[arrivals[p].center].name << ','
            << arrivals[p].day << '\n';
    }
}

std::vector<double> DemandProfile::daily_totals(int width) const {
    std::vector<double> totals(static_cast<size_t>(width), 0.0);
    for (const auto& a : arrivals) {
        if (a.day < 1 || a.day > width)
            fail("arrival day " + std::to_string(a.day) + " outside the " +
                 std::to_string(width) + "-day feature window");
        totals[static_cast<size_t>(a.day - 1)] += 1.0;
    }
    return totals;
}

}  // namespace mipred::sct
