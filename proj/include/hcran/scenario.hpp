#pragma once

#include <cstdint>

#include "hcran/channel.hpp"
#include "hcran/model.hpp"
#include "hcran/power_allocation.hpp"

namespace hcran {

struct ScenarioConfig {
    // spectrum
    int k_total = 25;
    double bandwidth_hz = 5e6;
    double omega1_ratio = 0.6;
    // population
    int n_high = 10;
    int n_low = 3;
    int t_hues = 5;
    int l_rrh = 12;
    // geometry (m)
    double d_high_rrh = 50.0;
    double d_high_hpn = 450.0;
    double d_low_rrh = 75.0;
    double d_low_hpn = 375.0;
    double d_rrh_hue = 125.0;
    double d_hpn_hue = 375.0;
    double n0_dbm_hz = -174.0;
    // QoS
    double eta_r = 128e3;
    double eta_er = 64e3;
    double eta_hue_db = 0.0;
    // Lower floors that no allocation on this snapshot can reach to what a
    // certified allocation reaches.
    bool relax_floors = false;
    // RRH
    double p_max_r_dbm = 20.0;
    double phi_r = 2.0;
    double pc_r = 0.1;
    double pbh_r = 0.2;
    // HPN
    double p_max_m_dbm = 43.0;
    double phi_m = 4.0;
    double pc_m = 10.0;
    double pbh_m = 0.2;
    // PBS
    double p_max_p_dbm = 30.0;
    double phi_p = 4.0;
    double pc_p = 6.8;
    double pbh_p = 0.2;
    // Number of low-power nodes per macro node when scenarios report system
    // EE; 0 evaluates the dense limit (reference node EE).
    int scenario_l = 0;

    double b0() const { return bandwidth_hz / k_total; }
    double noise_psd() const;
    SffrPartition partition() const;
    QosProfile qos() const { return {eta_r, eta_er}; }
    PowerModel rrh_power() const;
    PowerModel hpn_power() const;
    PowerModel pbs_power() const;
    HpnModel hpn() const;
    Geometry geometry() const;
    double delta0() const;
    void validate() const;
    bool operator==(const ScenarioConfig&) const = default;
};

// H-CRAN reference-RRH problem for one snapshot.
struct SnapshotProblem {
    ProblemInstance inst;
    std::vector<double> nominal_floors;
    FloorCertificate certificate;
    HpnModel hpn;
    bool relaxed = false;
};

SnapshotProblem make_snapshot_problem(const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t snapshot);
// Applies the floor policy of `cfg` to an instance whose rate_floor holds the nominal floors.
SnapshotProblem finish_problem(ProblemInstance inst, const ScenarioConfig& cfg, const HpnModel& hpn);

}  // namespace hcran
