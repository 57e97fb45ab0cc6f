#pragma once

#include <string>
#include <vector>

namespace mipred::sct {

struct Facility {
    std::string name;
    int lines = 1;                    // parallel manufacturing lines
    double capital_cost = 0.0;        // annualized, per facility
    double fixed_variable_cost = 0.0; // annualized operating cost
};

struct Center {
    std::string name;
    std::string hospital;  // co-located hospital, bijective
};

struct Mode {
    std::string name;
    int leg1_days = 1;  // center -> facility transit
    int leg2_days = 1;  // facility -> hospital transit
};

// Network description plus scalar process economics. Transport unit costs
// are per day in transit: leg1_unit_cost[c][m][j], leg2_unit_cost[m][h][j]
// with h indexed like the centers they pair with.
struct SupplyChainConfig {
    std::vector<Facility> facilities;
    std::vector<Center> centers;
    std::vector<Mode> modes;
    std::vector<std::vector<std::vector<double>>> leg1_unit_cost;
    std::vector<std::vector<std::vector<double>>> leg2_unit_cost;
    double therapy_material_cost = 0.0;  // per therapy
    double qc_release_cost = 0.0;        // per therapy
    int collection_days = 1;
    int manufacturing_days = 8;
    int qc_days = 1;
    int max_turnaround_days = 21;
    int max_facilities = 2;
    double min_flow = 0.0;
    double max_flow = 1.0;
    int time_periods = 0;     // 0 derives the horizon from the demand
    int daily_center_cap = 8; // patient arrivals per center per day

    int facility_count() const { return static_cast<int>(facilities.size()); }
    int center_count() const { return static_cast<int>(centers.size()); }
    int hospital_count() const { return static_cast<int>(centers.size()); }
    int mode_count() const { return static_cast<int>(modes.size()); }

    int processing_days() const { return manufacturing_days + qc_days; }
    int min_route_days() const;
    int max_route_days() const;

    // Structural checks: nonempty sets, identifier-safe names, bijective
    // co-location, tensor dimensions, positive durations, and a turnaround
    // limit the fastest route can actually meet.
    void validate() const;

    static SupplyChainConfig from_json_file(const std::string& path);
    void to_json_file(const std::string& path) const;
};

// One arrival per patient; days are 1-based.
struct Arrival {
    int center = 0;
    int day = 1;
};

struct DemandProfile {
    std::vector<Arrival> arrivals;  // index = patient
    int horizon = 90;

    int patients() const { return static_cast<int>(arrivals.size()); }
    void validate(const SupplyChainConfig& config) const;

    // Plain text: comment header, then "p,c,t" rows with 1-based patient
    // numbers and center names.
    static DemandProfile load(const std::string& path, const SupplyChainConfig& config);
    void save(const std::string& path, const SupplyChainConfig& config) const;

    // Total arrivals per day over a fixed-width window, the classifier's
    // input convention. Throws if any arrival falls outside the window.
    std::vector<double> daily_totals(int width = 90) const;
};

}  // namespace mipred::sct
