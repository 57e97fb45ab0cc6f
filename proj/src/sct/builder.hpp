#pragma once

#include <map>
#include <string>
#include <vector>

#include "milp/problem.hpp"
#include "sct/config.hpp"

namespace mipred::sct {

// Candidate first leg for one patient: center -> facility by one mode.
struct Leg1Option {
    int facility = -1;  // global facility index
    int mode = -1;
    int depart_day = 0;  // leaves the center after collection
    int arrive_day = 0;  // reaches the facility
    int choice_col = -1;
    int ship_col = -1;
    int arrive_col = -1;
};

// Candidate second leg: facility -> hospital by one mode, leaving when
// manufacturing and quality control finish.
struct Leg2Option {
    int facility = -1;
    int hospital = -1;
    int mode = -1;
    int depart_day = 0;
    int deliver_day = 0;
    int choice_col = -1;
    int ship_col = -1;
    int deliver_col = -1;
};

// Raw construction size, before any solver-side reduction.
struct ModelStats {
    int variables = 0;
    int binaries = 0;
    int constraints = 0;
    std::map<std::string, int> variable_families;
    std::map<std::string, int> constraint_families;
};

struct BuiltModel {
    milp::MilpProblem problem;
    std::vector<int> active;  // facilities the model may open, global indices
    int horizon = 0;          // planning periods actually used

    std::vector<int> open_col;                  // [global facility] -> column or -1
    std::vector<std::vector<Leg1Option>> leg1;  // [patient]
    std::vector<std::vector<Leg2Option>> leg2;  // [patient]
    std::vector<int> material_cost_col;
    std::vector<int> transport_cost_col;
    std::vector<int> checkin_col;
    std::vector<int> delivery_col;
    std::vector<int> turnaround_col;
    int total_cost_col = -1;
    int avg_turnaround_col = -1;

    ModelStats stats;
};

// Builds the time-expanded therapy routing model restricted to the given
// facility subset. Routing variables are instantiated only at day indices a
// patient can actually occupy (arrival day plus collection, transit, and
// processing offsets), never over the full horizon grid; aggregate rows such
// as line capacity and co-location then range over those days only. Throws
// when the subset is empty, a route overruns a user-fixed horizon, or the
// demand profile fails validation.
BuiltModel build_model(const SupplyChainConfig& config,
                       const DemandProfile& demand,
                       const std::vector<int>& active_facilities);

// Convenience: all facilities allowed.
BuiltModel build_model(const SupplyChainConfig& config, const DemandProfile& demand);

// Process-wide count of build_model calls; lets callers assert that a code
// path constructed no model at all.
long build_invocations();

}  // namespace mipred::sct
