#include "hcran/scenario.hpp"

#include "hcran/error.hpp"
#include "hcran/units.hpp"

namespace hcran {

double ScenarioConfig::noise_psd() const { return noise_psd_w_per_hz(n0_dbm_hz); }

SffrPartition ScenarioConfig::partition() const { return SffrPartition::from_ratio(k_total, omega1_ratio, b0()); }

PowerModel ScenarioConfig::rrh_power() const { return {phi_r, pc_r, pbh_r, units::dbm_to_watts(p_max_r_dbm)}; }
PowerModel ScenarioConfig::hpn_power() const { return {phi_m, pc_m, pbh_m, units::dbm_to_watts(p_max_m_dbm)}; }
PowerModel ScenarioConfig::pbs_power() const { return {phi_p, pc_p, pbh_p, units::dbm_to_watts(p_max_p_dbm)}; }

HpnModel ScenarioConfig::hpn() const {
    return HpnModel::make(units::dbm_to_watts(p_max_m_dbm), hpn_power(), partition(), t_hues);
}

Geometry ScenarioConfig::geometry() const {
    auto g = Geometry::two_ring(n_high, n_low, t_hues, l_rrh, d_high_rrh, d_high_hpn, d_low_rrh, d_low_hpn);
    g.d_rrh_hue = d_rrh_hue;
    g.d_hpn_hue = d_hpn_hue;
    return g;
}

double ScenarioConfig::delta0() const {
    return delta0_from_eta_hue(units::db_to_linear(eta_hue_db), hpn(), d_hpn_hue, l_rrh, noise_psd(), b0());
}

void ScenarioConfig::validate() const {
    if (k_total < 1) throw ConfigError("sffr.k_total must be >= 1");
    if (!(bandwidth_hz > 0)) throw ConfigError("sffr.bandwidth_hz must be > 0");
    if (!(omega1_ratio >= 0 && omega1_ratio <= 1)) throw ConfigError("sffr.omega1_ratio must lie in [0, 1]");
    if (n_high < 0 || n_low < 0 || n_high + n_low < 1) throw ConfigError("population: need at least one UE");
    if (t_hues < 0) throw ConfigError("population.t_hues must be >= 0");
    if (l_rrh < 1) throw ConfigError("population.l_rrh must be >= 1");
    if (scenario_l < 0) throw ConfigError("scenario.l must be >= 0");
    geometry().validate();
    qos().validate();
    rrh_power().validate();
    hpn_power().validate();
    pbs_power().validate();
    const auto part = partition();
    if (!part.omega1().empty() && n_high == 0) throw ConfigError("exclusive RBs need at least one high-QoS UE");
    if (!part.omega2().empty() && n_low == 0) throw ConfigError("shared RBs need at least one low-QoS UE");
}

SnapshotProblem finish_problem(ProblemInstance inst, const ScenarioConfig& cfg, const HpnModel& hpn) {
    SnapshotProblem sp;
    sp.hpn = hpn;
    sp.nominal_floors = inst.rate_floor;
    sp.certificate = attainable_floors(inst, sp.nominal_floors);
    if (cfg.relax_floors) {
        inst.rate_floor = sp.certificate.floors;
        sp.relaxed = sp.certificate.relaxed;
    }
    sp.inst = std::move(inst);
    return sp;
}

SnapshotProblem make_snapshot_problem(const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t snapshot) {
    cfg.validate();
    SnapshotRng rng(seed, snapshot);
    const auto part = cfg.partition();
    const auto hpn = cfg.hpn();
    ProblemInstance inst;
    inst.channel = build_cinr(cfg.geometry(), part, hpn, cfg.noise_psd(), rng);
    inst.partition = part;
    inst.ues = {cfg.n_high, cfg.n_low};
    inst.power = cfg.rrh_power();
    inst.rate_floor = nominal_floors(inst.ues, cfg.qos());
    inst.delta0 = cfg.delta0();
    inst.eligibility = Eligibility::Sffr;
    return finish_problem(std::move(inst), cfg, hpn);
}

}  // namespace hcran
