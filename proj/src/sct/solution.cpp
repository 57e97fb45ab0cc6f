#include "sct/solution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "milp/branch_and_bound.hpp"

namespace mipred::sct {

namespace {

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("solution extraction: " + msg);
}

}  // namespace

SupplyChainSolution extract_solution(const SupplyChainConfig& config,
                                     const DemandProfile& demand,
                                     const BuiltModel& model,
                                     const milp::MilpSolution& milp_solution) {
    if (!milp_solution.has_incumbent) fail("no incumbent to extract");
    const std::vector<double>& x = milp_solution.values;
    if (static_cast<int>(x.size()) != model.problem.variable_count())
        fail("value vector does not match the model");

    SupplyChainSolution sol;
    sol.status = milp_solution.status;
    sol.objective = milp_solution.objective;
    sol.best_bound = milp_solution.best_bound;
    sol.relative_gap = milp_solution.relative_gap;
    sol.nodes = milp_solution.nodes_explored;

    for (int m = 0; m < config.facility_count(); ++m) {
        const int col = model.open_col[static_cast<size_t>(m)];
        if (col >= 0 && x[static_cast<size_t>(col)] > 0.5) sol.open_facilities.push_back(m);
    }

    const int np = demand.patients();
    const double open_share =
        [&] {
            double total = 0.0;
            for (int m : sol.open_facilities)
                total += config.facilities[m].capital_cost + config.facilities[m].fixed_variable_cost;
            return total / static_cast<double>(np);
        }();

    // facility -> occupancy deltas at day boundaries, from decoded routes.
    std::map<int, std::map<int, int>> occupancy_delta;
    std::map<int, int> therapies_at;

    for (int p = 0; p < np; ++p) {
        const Leg1Option* first = nullptr;
        for (const auto& opt : model.leg1[static_cast<size_t>(p)]) {
            if (x[static_cast<size_t>(opt.choice_col)] > 0.5) {
                if (first) fail("patient " + std::to_string(p + 1) + " has two first legs");
                first = &opt;
            }
        }
        const Leg2Option* second = nullptr;
        for (const auto& opt : model.leg2[static_cast<size_t>(p)]) {
            if (x[static_cast<size_t>(opt.choice_col)] > 0.5) {
                if (second) fail("patient " + std::to_string(p + 1) + " has two second legs");
                second = &opt;
            }
        }
        if (!first || !second) fail("patient " + std::to_string(p + 1) + " has an incomplete route");
        if (first->facility != second->facility)
            fail("patient " + std::to_string(p + 1) + " changes facility mid-route");
        if (second->depart_day != first->arrive_day + config.processing_days())
            fail("patient " + std::to_string(p + 1) + " leaves before processing completes");

        const Arrival& a = demand.arrivals[static_cast<size_t>(p)];
        if (second->hospital != a.center)
            fail("patient " + std::to_string(p + 1) + " is delivered away from the paired hospital");

        PatientRoute r;
        r.patient = p + 1;
        r.center = a.center;
        r.facility = first->facility;
        r.hospital = second->hospital;
        r.leg1_mode = first->mode;
        r.leg2_mode = second->mode;
        r.checkin_day = a.day;
        r.depart_center_day = first->depart_day;
        r.arrive_facility_day = first->arrive_day;
        r.leave_facility_day = second->depart_day;
        r.deliver_day = second->deliver_day;
        r.processing_days = r.leave_facility_day - r.arrive_facility_day;
        r.turnaround_days = r.deliver_day - r.checkin_day;
        if (r.turnaround_days > config.max_turnaround_days)
            fail("patient " + std::to_string(p + 1) + " exceeds the turnaround limit");
        r.material_cost = open_share + config.therapy_material_cost;
        r.transport_cost =
            config.modes[r.leg1_mode].leg1_days *
                config.leg1_unit_cost[r.center][r.facility][r.leg1_mode] +
            config.modes[r.leg2_mode].leg2_days *
                config.leg2_unit_cost[r.facility][r.hospital][r.leg2_mode];
        sol.routes.push_back(r);

        occupancy_delta[r.facility][r.arrive_facility_day] += 1;
        occupancy_delta[r.facility][r.leave_facility_day] -= 1;
        therapies_at[r.facility] += 1;
        sol.average_turnaround += r.turnaround_days;
        sol.recomputed_total += r.material_cost + r.transport_cost + config.qc_release_cost;
    }
    sol.average_turnaround /= static_cast<double>(np);

    const double scale = std::max({1.0, std::abs(sol.objective), std::abs(sol.recomputed_total)});
    if (std::abs(sol.recomputed_total - sol.objective) > 1e-6 * scale)
        fail("route costs rebuild to " + std::to_string(sol.recomputed_total) +
             " but the solver reported " + std::to_string(sol.objective));

    for (int m = 0; m < config.facility_count(); ++m) {
        FacilityUse use;
        use.facility = m;
        use.name = config.facilities[m].name;
        use.open = std::binary_search(sol.open_facilities.begin(), sol.open_facilities.end(), m);
        use.lines = config.facilities[m].lines;
        use.therapies = therapies_at.count(m) ? therapies_at[m] : 0;
        int level = 0;
        auto it = occupancy_delta.find(m);
        if (it != occupancy_delta.end()) {
            for (const auto& [day, delta] : it->second) {
                level += delta;
                use.peak_in_process = std::max(use.peak_in_process, level);
                (void)day;
            }
        }
        if (use.peak_in_process > use.lines)
            fail("facility " + use.name + " holds " + std::to_string(use.peak_in_process) +
                 " therapies on " + std::to_string(use.lines) + " lines");
        if (use.therapies > 0 && !use.open) fail("closed facility " + use.name + " processed therapies");
        use.peak_utilization =
            use.lines > 0 ? static_cast<double>(use.peak_in_process) / use.lines : 0.0;
        sol.facilities.push_back(std::move(use));
    }
    return sol;
}

SupplyChainSolution solve_instance(const SupplyChainConfig& config,
                                   const DemandProfile& demand,
                                   const std::vector<int>& active_facilities,
                                   const milp::SolverConfig& solver) {
    BuiltModel model = build_model(config, demand, active_facilities);
    milp::MilpSolution got = milp::solve_milp(model.problem, solver);
    if (!got.has_incumbent) {
        SupplyChainSolution sol;
        sol.status = got.status;
        sol.nodes = got.nodes_explored;
        return sol;
    }
    return extract_solution(config, demand, model, got);
}

}  // namespace mipred::sct
