#pragma once

#include <string>
#include <vector>

#include "milp/problem.hpp"
#include "sct/builder.hpp"
#include "sct/config.hpp"

namespace mipred::sct {

struct PatientRoute {
    int patient = 0;  // 1-based
    int center = -1;
    int facility = -1;
    int hospital = -1;
    int leg1_mode = -1;
    int leg2_mode = -1;
    int checkin_day = 0;
    int depart_center_day = 0;
    int arrive_facility_day = 0;
    int leave_facility_day = 0;
    int deliver_day = 0;
    int processing_days = 0;   // facility residency
    int turnaround_days = 0;   // check-in to delivery
    double material_cost = 0.0;
    double transport_cost = 0.0;
};

struct FacilityUse {
    int facility = -1;
    std::string name;
    bool open = false;
    int therapies = 0;          // total processed
    int lines = 0;
    int peak_in_process = 0;    // max simultaneous occupancy
    double peak_utilization = 0.0;
};

struct SupplyChainSolution {
    milp::MilpStatus status = milp::MilpStatus::Infeasible;
    double objective = 0.0;
    double best_bound = 0.0;
    double relative_gap = 0.0;
    long nodes = 0;
    std::vector<int> open_facilities;  // global indices, ascending
    std::vector<PatientRoute> routes;
    std::vector<FacilityUse> facilities;
    double average_turnaround = 0.0;
    double recomputed_total = 0.0;  // rebuilt from routes and cost data
};

// Decodes routes from an incumbent, recomputes every cost from first
// principles, and throws if the rebuilt total disagrees with the solver
// objective by more than 1e-6 relative, if any patient lacks exactly one
// route, or if a turnaround limit is breached. Requires an incumbent.
SupplyChainSolution extract_solution(const SupplyChainConfig& config,
                                     const DemandProfile& demand,
                                     const BuiltModel& model,
                                     const milp::MilpSolution& milp_solution);

// Builds and solves in one step; extraction runs only when an incumbent
// exists.
SupplyChainSolution solve_instance(const SupplyChainConfig& config,
                                   const DemandProfile& demand,
                                   const std::vector<int>& active_facilities,
                                   const milp::SolverConfig& solver);

}  // namespace mipred::sct
