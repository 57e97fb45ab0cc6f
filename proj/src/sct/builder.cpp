#include "sct/builder.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>

namespace mipred::sct {

namespace {

std::atomic<long> g_builds{0};

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("model builder: " + msg);
}

std::string day_tag(int day) { return "_t" + std::to_string(day); }

using Terms = std::vector<std::pair<int, double>>;

}  // namespace

long build_invocations() { return g_builds.load(); }

BuiltModel build_model(const SupplyChainConfig& config, const DemandProfile& demand) {
    std::vector<int> all(static_cast<size_t>(config.facility_count()));
    std::iota(all.begin(), all.end(), 0);
    return build_model(config, demand, all);
}

BuiltModel build_model(const SupplyChainConfig& config,
                       const DemandProfile& demand,
                       const std::vector<int>& active_facilities) {
    g_builds.fetch_add(1, std::memory_order_relaxed);
    config.validate();
    demand.validate(config);
    if (active_facilities.empty()) fail("no facilities selected");

    std::vector<int> active = active_facilities;
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    for (int m : active) {
        if (m < 0 || m >= config.facility_count()) fail("facility index out of range");
    }

    const int np = demand.patients();
    const int dur = config.processing_days();
    const int needed = demand.horizon + config.max_route_days();
    const int horizon = config.time_periods > 0 ? config.time_periods : needed;

    BuiltModel out;
    out.active = active;
    out.horizon = horizon;
    milp::MilpProblem& prob = out.problem;
    ModelStats& st = out.stats;

    auto addv = [&](const std::string& name, double lo, double up, milp::VarKind kind,
                    const char* family) {
        const int col = prob.add_variable(name, lo, up, kind);
        ++st.variables;
        if (kind == milp::VarKind::Binary) ++st.binaries;
        ++st.variable_families[family];
        return col;
    };
    auto addc = [&](const std::string& name, Terms terms, milp::Relation rel, double rhs,
                    const char* family) {
        prob.add_constraint(name, std::move(terms), rel, rhs);
        ++st.constraints;
        ++st.constraint_families[family];
    };
    auto check_day = [&](int day, const std::string& what) {
        if (day > horizon)
            fail("planning horizon too short: " + what + " needs day " + std::to_string(day) +
                 " but only " + std::to_string(horizon) + " periods exist");
        return day;
    };

    const auto Bin = milp::VarKind::Binary;
    const auto Cont = milp::VarKind::Continuous;
    const auto LE = milp::Relation::LessEqual;
    const auto EQ = milp::Relation::Equal;
    const auto GE = milp::Relation::GreaterEqual;
    const double fmax = config.max_flow;
    const double fmin = config.min_flow;

    // Site selection and assignment eligibility.
    out.open_col.assign(static_cast<size_t>(config.facility_count()), -1);
    for (int m : active) {
        out.open_col[static_cast<size_t>(m)] =
            addv("open_" + config.facilities[m].name, 0, 1, Bin, "open");
    }
    std::vector<std::vector<int>> serve_col(static_cast<size_t>(config.center_count()),
                                            std::vector<int>(static_cast<size_t>(config.facility_count()), -1));
    std::vector<std::vector<int>> supply_col(static_cast<size_t>(config.facility_count()),
                                             std::vector<int>(static_cast<size_t>(config.hospital_count()), -1));
    for (int c = 0; c < config.center_count(); ++c) {
        for (int m : active) {
            serve_col[c][m] = addv("serve_" + config.centers[c].name + "_" + config.facilities[m].name,
                                   0, 1, Bin, "serve_link");
        }
    }
    for (int m : active) {
        for (int h = 0; h < config.hospital_count(); ++h) {
            supply_col[m][h] = addv("supply_" + config.facilities[m].name + "_" +
                                        config.centers[h].hospital,
                                    0, 1, Bin, "supply_link");
        }
    }

    // Per-patient routing structure, instantiated at reachable days only.
    out.leg1.resize(static_cast<size_t>(np));
    out.leg2.resize(static_cast<size_t>(np));
    out.material_cost_col.resize(static_cast<size_t>(np));
    out.transport_cost_col.resize(static_cast<size_t>(np));
    out.checkin_col.resize(static_cast<size_t>(np));
    out.delivery_col.resize(static_cast<size_t>(np));
    out.turnaround_col.resize(static_cast<size_t>(np));

    // (facility, arrival day) -> inflow columns feeding the shared capacity rows.
    std::vector<std::map<int, std::vector<int>>> inflow_by_day(
        static_cast<size_t>(config.facility_count()));

    std::vector<int> release_col(static_cast<size_t>(np));
    for (int p = 0; p < np; ++p) {
        const std::string pp = "p" + std::to_string(p + 1);
        const Arrival& a = demand.arrivals[static_cast<size_t>(p)];
        const int depart = a.day + config.collection_days;

        release_col[p] = addv(pp + "_release", 0, fmax, Cont, "release");

        // First leg candidates and facility-side day aggregates.
        std::map<int, int> inflow_col;              // arrival day -> column
        std::map<int, int> outflow_col;             // departure day -> column
        std::map<std::pair<int, int>, int> fac_in;  // (facility, day) -> column
        struct FacOut { int facility; int day; int col; };
        for (int m : active) {
            for (int j = 0; j < config.mode_count(); ++j) {
                Leg1Option opt;
                opt.facility = m;
                opt.mode = j;
                opt.depart_day = depart;
                opt.arrive_day = check_day(depart + config.modes[j].leg1_days,
                                           pp + " arrival at " + config.facilities[m].name);
                const std::string stem = pp + "_" + config.facilities[m].name + "_" +
                                         config.modes[j].name;
                opt.choice_col = addv(stem + "_pick1", 0, 1, Bin, "leg1_choice");
                opt.ship_col = addv(stem + "_ship1", 0, fmax, Cont, "leg1_flow");
                opt.arrive_col = addv(stem + "_arr1", 0, fmax, Cont, "leg1_flow");
                out.leg1[p].push_back(opt);
            }
        }
        std::vector<FacOut> fac_outs;
        for (int m : active) {
            for (const auto& opt : out.leg1[p]) {
                if (opt.facility != m) continue;
                auto key = std::make_pair(m, opt.arrive_day);
                if (fac_in.count(key)) continue;
                const int in_col = addv(pp + "_in_" + config.facilities[m].name +
                                            day_tag(opt.arrive_day),
                                        0, fmax, Cont, "facility_in");
                fac_in[key] = in_col;
                inflow_by_day[static_cast<size_t>(m)][opt.arrive_day].push_back(in_col);
                const int out_day = check_day(opt.arrive_day + dur,
                                              pp + " release from " + config.facilities[m].name);
                const int out_col = addv(pp + "_out_" + config.facilities[m].name +
                                             day_tag(out_day),
                                         0, fmax, Cont, "facility_out");
                fac_outs.push_back({m, out_day, out_col});
            }
        }

        // Second leg candidates from every facility departure day.
        std::map<std::pair<int, int>, int> hosp_in;  // (hospital, day) -> column
        for (const auto& fo : fac_outs) {
            for (int h = 0; h < config.hospital_count(); ++h) {
                for (int j = 0; j < config.mode_count(); ++j) {
                    Leg2Option opt;
                    opt.facility = fo.facility;
                    opt.hospital = h;
                    opt.mode = j;
                    opt.depart_day = fo.day;
                    opt.deliver_day = check_day(fo.day + config.modes[j].leg2_days,
                                                pp + " delivery to " + config.centers[h].hospital);
                    const std::string stem = pp + "_" + config.facilities[fo.facility].name + "_" +
                                             config.centers[h].hospital + "_" +
                                             config.modes[j].name + day_tag(fo.day);
                    opt.choice_col = addv(stem + "_pick2", 0, 1, Bin, "leg2_choice");
                    opt.ship_col = addv(stem + "_ship2", 0, fmax, Cont, "leg2_flow");
                    opt.deliver_col = addv(stem + "_del2", 0, fmax, Cont, "leg2_flow");
                    out.leg2[p].push_back(opt);
                    auto key = std::make_pair(h, opt.deliver_day);
                    if (!hosp_in.count(key)) {
                        hosp_in[key] = addv(pp + "_in_" + config.centers[h].hospital +
                                                day_tag(opt.deliver_day),
                                            0, fmax, Cont, "hospital_in");
                    }
                }
            }
        }

        out.material_cost_col[p] = addv(pp + "_mfg_cost", 0, milp::kInf, Cont, "cost");
        out.transport_cost_col[p] = addv(pp + "_trans_cost", 0, milp::kInf, Cont, "cost");
        out.checkin_col[p] = addv(pp + "_start", 0, horizon, Cont, "time");
        out.delivery_col[p] = addv(pp + "_finish", 0, horizon, Cont, "time");
        out.turnaround_col[p] = addv(pp + "_turnaround", 0, horizon, Cont, "time");

        // Therapy release and conservation through the first leg.
        addc(pp + "_release_def", {{release_col[p], 1.0}}, EQ, 1.0, "release");
        {
            Terms t{{release_col[p], -1.0}};
            for (const auto& opt : out.leg1[p]) t.emplace_back(opt.ship_col, 1.0);
            addc(pp + "_center_balance", std::move(t), EQ, 0.0, "center_balance");
        }
        for (const auto& opt : out.leg1[p]) {
            const std::string stem = pp + "_" + config.facilities[opt.facility].name + "_" +
                                     config.modes[opt.mode].name;
            addc(stem + "_leg1", {{opt.ship_col, 1.0}, {opt.arrive_col, -1.0}}, EQ, 0.0,
                 "leg1_transit");
            addc(stem + "_match1", {{opt.choice_col, 1.0}, {serve_col[a.center][opt.facility], -1.0}},
                 LE, 0.0, "open_match1");
            addc(stem + "_flowlo1", {{opt.ship_col, 1.0}, {opt.choice_col, -fmin}}, GE, 0.0,
                 "flow_window1");
            addc(stem + "_flowhi1", {{opt.ship_col, 1.0}, {opt.choice_col, -fmax}}, LE, 0.0,
                 "flow_window2");
        }

        // Facility-side aggregation, processing delay, and dispatch split.
        for (const auto& [key, in_col] : fac_in) {
            const auto& [m, day] = key;
            Terms t{{in_col, -1.0}};
            for (const auto& opt : out.leg1[p]) {
                if (opt.facility == m && opt.arrive_day == day) t.emplace_back(opt.arrive_col, 1.0);
            }
            addc(pp + "_fac_in_" + config.facilities[m].name + day_tag(day), std::move(t), EQ, 0.0,
                 "facility_in");
        }
        for (const auto& fo : fac_outs) {
            const int in_col = fac_in.at({fo.facility, fo.day - dur});
            addc(pp + "_process_" + config.facilities[fo.facility].name + day_tag(fo.day - dur),
                 {{in_col, 1.0}, {fo.col, -1.0}}, EQ, 0.0, "processing");
            Terms t{{fo.col, -1.0}};
            for (const auto& opt : out.leg2[p]) {
                if (opt.facility == fo.facility && opt.depart_day == fo.day)
                    t.emplace_back(opt.ship_col, 1.0);
            }
            addc(pp + "_fac_out_" + config.facilities[fo.facility].name + day_tag(fo.day),
                 std::move(t), EQ, 0.0, "facility_out");
        }

        // Second-leg transit, eligibility, and flow windows.
        for (const auto& opt : out.leg2[p]) {
            const std::string stem = pp + "_" + config.facilities[opt.facility].name + "_" +
                                     config.centers[opt.hospital].hospital + "_" +
                                     config.modes[opt.mode].name + day_tag(opt.depart_day);
            addc(stem + "_leg2", {{opt.ship_col, 1.0}, {opt.deliver_col, -1.0}}, EQ, 0.0,
                 "leg2_transit");
            addc(stem + "_match2",
                 {{opt.choice_col, 1.0}, {supply_col[opt.facility][opt.hospital], -1.0}}, LE, 0.0,
                 "open_match2");
            addc(stem + "_flowlo2", {{opt.ship_col, 1.0}, {opt.choice_col, -fmin}}, GE, 0.0,
                 "flow_window1");
            addc(stem + "_flowhi2", {{opt.ship_col, 1.0}, {opt.choice_col, -fmax}}, LE, 0.0,
                 "flow_window2");
        }
        for (const auto& [key, in_col] : hosp_in) {
            const auto& [h, day] = key;
            Terms t{{in_col, -1.0}};
            for (const auto& opt : out.leg2[p]) {
                if (opt.hospital == h && opt.deliver_day == day) t.emplace_back(opt.deliver_col, 1.0);
            }
            addc(pp + "_hosp_in_" + config.centers[h].hospital + day_tag(day), std::move(t), EQ, 0.0,
                 "hospital_in");
        }

        // One route in, one route out.
        {
            Terms t;
            for (const auto& opt : out.leg1[p]) t.emplace_back(opt.choice_col, 1.0);
            addc(pp + "_one_leg1", std::move(t), EQ, 1.0, "single_leg1");
        }
        {
            Terms t;
            for (const auto& opt : out.leg2[p]) t.emplace_back(opt.choice_col, 1.0);
            addc(pp + "_one_leg2", std::move(t), EQ, 1.0, "single_leg2");
        }

        // Deliveries may only reach the hospital paired with the patient's center.
        for (int h = 0; h < config.hospital_count(); ++h) {
            Terms t;
            for (const auto& opt : out.leg2[p]) {
                if (opt.hospital == h) t.emplace_back(opt.choice_col, 1.0);
            }
            if (t.empty()) continue;
            const double rhs = (h == a.center) ? static_cast<double>(a.day) : 0.0;
            addc(pp + "_colocate_" + config.centers[h].hospital, std::move(t), LE, rhs,
                 "colocation");
        }

        // Timeline bookkeeping and per-patient costs.
        addc(pp + "_checkin", {{out.checkin_col[p], 1.0}}, EQ, static_cast<double>(a.day),
             "checkin");
        {
            Terms t{{out.delivery_col[p], 1.0}};
            for (const auto& [key, in_col] : hosp_in)
                t.emplace_back(in_col, -static_cast<double>(key.second));
            addc(pp + "_delivery_day", std::move(t), EQ, 0.0, "delivery_day");
        }
        addc(pp + "_order", {{out.checkin_col[p], 1.0}, {out.delivery_col[p], -1.0}}, LE, 0.0,
             "order");
        addc(pp + "_turn_def",
             {{out.turnaround_col[p], 1.0}, {out.delivery_col[p], -1.0}, {out.checkin_col[p], 1.0}},
             EQ, 0.0, "turnaround");
        addc(pp + "_turn_cap", {{out.turnaround_col[p], 1.0}}, LE,
             static_cast<double>(config.max_turnaround_days), "turnaround_cap");
        {
            Terms t{{out.material_cost_col[p], 1.0}};
            for (int m : active) {
                const double share = (config.facilities[m].capital_cost +
                                      config.facilities[m].fixed_variable_cost) /
                                     static_cast<double>(np);
                t.emplace_back(out.open_col[static_cast<size_t>(m)], -share);
            }
            addc(pp + "_mfg_cost_def", std::move(t), EQ, config.therapy_material_cost,
                 "material_cost");
        }
        {
            Terms t{{out.transport_cost_col[p], 1.0}};
            for (const auto& opt : out.leg1[p]) {
                const double days = config.modes[opt.mode].leg1_days;
                t.emplace_back(opt.choice_col,
                               -days * config.leg1_unit_cost[a.center][opt.facility][opt.mode]);
            }
            for (const auto& opt : out.leg2[p]) {
                const double days = config.modes[opt.mode].leg2_days;
                t.emplace_back(opt.choice_col,
                               -days * config.leg2_unit_cost[opt.facility][opt.hospital][opt.mode]);
            }
            addc(pp + "_trans_cost_def", std::move(t), EQ, 0.0, "transport_cost");
        }
    }

    // Rolling line capacity: each therapy occupies a line from arrival through
    // the end of quality control. The windowed load can only peak on an
    // arrival day, so one row per distinct arrival day per facility suffices.
    for (int m : active) {
        const auto& by_day = inflow_by_day[static_cast<size_t>(m)];
        for (const auto& entry : by_day) {
            const int day = entry.first;
            Terms t;
            for (const auto& [tau, cols] : by_day) {
                if (tau > day || tau <= day - dur) continue;
                for (int col : cols) t.emplace_back(col, 1.0);
            }
            addc("cap_" + config.facilities[m].name + day_tag(day), std::move(t), LE,
                 static_cast<double>(config.facilities[m].lines), "line_capacity");
        }
    }

    // Assignments require open facilities; openings are budgeted.
    for (int c = 0; c < config.center_count(); ++c) {
        for (int m : active) {
            addc("link1_" + config.centers[c].name + "_" + config.facilities[m].name,
                 {{serve_col[c][m], 1.0}, {out.open_col[static_cast<size_t>(m)], -1.0}}, LE, 0.0,
                 "open_link1");
        }
    }
    for (int m : active) {
        for (int h = 0; h < config.hospital_count(); ++h) {
            addc("link2_" + config.facilities[m].name + "_" + config.centers[h].hospital,
                 {{supply_col[m][h], 1.0}, {out.open_col[static_cast<size_t>(m)], -1.0}}, LE, 0.0,
                 "open_link2");
        }
    }
    {
        Terms t;
        for (int m : active) t.emplace_back(out.open_col[static_cast<size_t>(m)], 1.0);
        addc("open_budget", std::move(t), LE, static_cast<double>(config.max_facilities),
             "facility_budget");
    }

    // Every therapy is delivered; totals and averages close the model.
    {
        Terms t;
        for (int p = 0; p < np; ++p) {
            for (const auto& opt : out.leg2[p]) t.emplace_back(opt.deliver_col, 1.0);
        }
        addc("deliveries_total", std::move(t), EQ, static_cast<double>(np), "demand_total");
    }
    out.avg_turnaround_col = addv("avg_turnaround", 0, horizon, Cont, "time");
    out.total_cost_col = addv("total_cost", 0, milp::kInf, Cont, "cost");
    {
        Terms t{{out.avg_turnaround_col, static_cast<double>(np)}};
        for (int p = 0; p < np; ++p) t.emplace_back(out.turnaround_col[p], -1.0);
        addc("avg_turn_def", std::move(t), EQ, 0.0, "average_turnaround");
    }
    {
        Terms t{{out.total_cost_col, 1.0}};
        for (int p = 0; p < np; ++p) {
            t.emplace_back(out.material_cost_col[p], -1.0);
            t.emplace_back(out.transport_cost_col[p], -1.0);
        }
        addc("total_cost_def", std::move(t), EQ, np * config.qc_release_cost, "total_cost");
    }

    prob.set_objective(milp::Sense::Minimize, {{out.total_cost_col, 1.0}});
    prob.validate();
    return out;
}

}  // namespace mipred::sct
