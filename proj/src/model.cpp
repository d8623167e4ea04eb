#include "hcran/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hcran/channel.hpp"
#include "hcran/error.hpp"

namespace hcran {

SffrPartition::SffrPartition(std::vector<int> omega1, std::vector<int> omega2, int k_total, double b0_hz)
    : omega1_(std::move(omega1)), omega2_(std::move(omega2)), k_total_(k_total), b0_(b0_hz) {
    if (k_total < 1) throw ConfigError("k_total must be >= 1");
    if (!(b0_hz > 0.0)) throw ConfigError("b0 must be > 0");
    bands_.assign(k_total, Band::Exclusive);
    std::vector<int> seen(k_total, 0);
    for (int k : omega1_) {
        if (k < 0 || k >= k_total) throw ConfigError("omega1 index out of range: " + std::to_string(k));
        ++seen[k];
    }
    for (int k : omega2_) {
        if (k < 0 || k >= k_total) throw ConfigError("omega2 index out of range: " + std::to_string(k));
        ++seen[k];
        bands_[k] = Band::Shared;
    }
    for (int k = 0; k < k_total; ++k)
        if (seen[k] != 1) throw ConfigError("RB " + std::to_string(k) + " must be in exactly one of omega1/omega2");
    std::sort(omega1_.begin(), omega1_.end());
    std::sort(omega2_.begin(), omega2_.end());
}

SffrPartition SffrPartition::split(int k_total, int exclusive, double b0_hz) {
    if (exclusive < 0 || exclusive > k_total) throw ConfigError("exclusive RB count out of range");
    std::vector<int> o1(exclusive), o2(k_total - exclusive);
    std::iota(o1.begin(), o1.end(), 0);
    std::iota(o2.begin(), o2.end(), exclusive);
    return SffrPartition(std::move(o1), std::move(o2), k_total, b0_hz);
}

SffrPartition SffrPartition::from_ratio(int k_total, double omega1_ratio, double b0_hz) {
    if (!(omega1_ratio >= 0.0 && omega1_ratio <= 1.0)) throw ConfigError("omega1 ratio must lie in [0, 1]");
    return split(k_total, static_cast<int>(std::lround(omega1_ratio * k_total)), b0_hz);
}

void QosProfile::validate() const {
    if (!(eta_er >= 0.0) || !(eta_r >= eta_er)) throw ConfigError("QoS floors must satisfy eta_r >= eta_er >= 0");
}

void PowerModel::validate() const {
    if (!(phi_eff > 0 && p_circuit > 0 && p_bh > 0 && p_max > 0))
        throw ConfigError("power model fields must all be > 0");
}

HpnModel HpnModel::make(double p_max_m, const PowerModel& pm, const SffrPartition& part, int t_hues) {
    HpnModel h;
    h.p_max_m = p_max_m;
    h.power_model = pm;
    h.t_hues = t_hues;
    const auto shared = part.omega2().size();
    h.per_rb_power = shared > 0 ? p_max_m / static_cast<double>(shared) : 0.0;
    return h;
}

void HpnModel::validate(const SffrPartition& part) const {
    power_model.validate();
    if (per_rb_power < 0.0) throw ConfigError("per-RB HPN power must be >= 0");
    if (per_rb_power * part.omega2().size() > p_max_m * (1.0 + 1e-12))
        throw ConfigError("HPN per-RB power exceeds its budget");
    if (t_hues < 0) throw ConfigError("HUE count must be >= 0");
}

void AllocationMatrix::assign(int n, int k) {
    for (int m = 0; m < ues(); ++m) a_.at(m, k) = 0;
    a_.at(n, k) = 1;
}

int AllocationMatrix::owner(int k) const {
    int who = -1;
    for (int n = 0; n < ues(); ++n) {
        if (a_(n, k)) {
            if (who >= 0) return -1;
            who = n;
        }
    }
    return who;
}

bool ProblemInstance::eligible(int n, int k) const {
    if (eligibility == Eligibility::Full) return true;
    return partition.shared(k) ? !ues.is_high(n) : ues.is_high(n);
}

double ProblemInstance::power_cap(int k) const {
    if (!partition.shared(k)) return std::numeric_limits<double>::infinity();
    const double g = channel.g_r2m[k];
    if (std::isinf(delta0)) return std::numeric_limits<double>::infinity();
    if (g <= 0.0) return std::numeric_limits<double>::infinity();
    return delta0 / g;
}

void ProblemInstance::validate() const {
    if (channel.ues() != ues.total())
        throw DimensionError("channel has " + std::to_string(channel.ues()) + " UEs, layout has " +
                             std::to_string(ues.total()));
    if (channel.rbs() != partition.k_total())
        throw DimensionError("channel has " + std::to_string(channel.rbs()) + " RBs, partition has " +
                             std::to_string(partition.k_total()));
    if (static_cast<int>(channel.g_r2m.size()) != channel.rbs()) throw DimensionError("g_r2m length mismatch");
    if (static_cast<int>(rate_floor.size()) != ues.total()) throw DimensionError("rate floor length mismatch");
    power.validate();
    if (!(delta0 >= 0.0)) throw ConfigError("delta0 must be >= 0");
    for (int k = 0; k < n_rbs(); ++k) {
        bool any = false;
        for (int n = 0; n < n_ues() && !any; ++n) any = eligible(n, k);
        if (!any) throw ConfigError("RB " + std::to_string(k) + " has no eligible UE");
    }
}

std::vector<double> nominal_floors(const UeLayout& ues, const QosProfile& qos) {
    std::vector<double> f(ues.total());
    for (int n = 0; n < ues.total(); ++n) f[n] = ues.is_high(n) ? qos.eta_r : qos.eta_er;
    return f;
}

namespace {

void check_dims(const AllocationMatrix& a, const PowerMatrix& p) {
    if (a.ues() != p.ues() || a.rbs() != p.rbs()) throw DimensionError("allocation and power shapes differ");
}

void check_dims(const AllocationMatrix& a, const PowerMatrix& p, const Grid<double>& sigma) {
    check_dims(a, p);
    if (!sigma.same_shape(a.ues(), a.rbs())) throw DimensionError("allocation and CINR shapes differ");
}

}  // namespace

std::vector<double> ue_rates(const AllocationMatrix& a, const PowerMatrix& p, const Grid<double>& sigma, double b0) {
    check_dims(a, p, sigma);
    std::vector<double> r(a.ues(), 0.0);
    for (int n = 0; n < a.ues(); ++n)
        for (int k = 0; k < a.rbs(); ++k)
            if (a(n, k) && p(n, k) > 0.0) r[n] += b0 * std::log2(1.0 + sigma(n, k) * p(n, k));
    return r;
}

double rrh_sum_rate(const AllocationMatrix& a, const PowerMatrix& p, const Grid<double>& sigma, double b0) {
    const auto r = ue_rates(a, p, sigma, b0);
    return std::accumulate(r.begin(), r.end(), 0.0);
}

double rrh_power(const AllocationMatrix& a, const PowerMatrix& p, const PowerModel& pm) {
    check_dims(a, p);
    double tx = 0.0;
    for (int n = 0; n < a.ues(); ++n)
        for (int k = 0; k < a.rbs(); ++k)
            if (a(n, k)) tx += p(n, k);
    return pm.phi_eff * tx + pm.p_circuit + pm.p_bh;
}

double rrh_ee(const AllocationMatrix& a, const PowerMatrix& p, const Grid<double>& sigma, double b0,
              const PowerModel& pm) {
    return rrh_sum_rate(a, p, sigma, b0) / rrh_power(a, p, pm);
}

double hpn_sum_rate(const AllocationMatrix& a_m, const PowerMatrix& p_m, const Grid<double>& sigma_m, double b0) {
    return rrh_sum_rate(a_m, p_m, sigma_m, b0);
}

double hpn_power(const AllocationMatrix& a_m, const PowerMatrix& p_m, const HpnModel& hpn) {
    return rrh_power(a_m, p_m, hpn.power_model);
}

double system_ee(double l, const NodeTerms& rrh, const NodeTerms& hpn) {
    if (!(l >= 1.0)) throw ConfigError("L must be >= 1");
    return (l * rrh.rate + hpn.rate) / (l * rrh.power + hpn.power);
}

bool FeasibilityReport::qos_ok() const {
    return std::none_of(violations.begin(), violations.end(), [](const ConstraintCheck& c) { return c.name == "qos"; });
}

std::optional<ConstraintCheck> FeasibilityReport::first_violation() const {
    if (violations.empty()) return std::nullopt;
    return violations.front();
}

FeasibilityReport check_feasibility(const AllocationMatrix& a, const PowerMatrix& p, const ProblemInstance& inst) {
    check_dims(a, p, inst.channel.sigma);
    FeasibilityReport r;
    const int nu = a.ues(), kk = a.rbs();

    for (int k = 0; k < kk; ++k) {
        int count = 0;
        for (int n = 0; n < nu; ++n) {
            if (!a(n, k)) continue;
            ++count;
            if (!inst.eligible(n, k)) {
                r.eligibility = false;
                r.violations.push_back({"eligibility", k, -1.0, false});
            }
        }
        if (count != 1) {
            r.exclusivity = false;
            r.violations.push_back({"exclusivity", k, 1.0 - count, false});
        }
    }

    const auto rates = ue_rates(a, p, inst.channel.sigma, inst.b0());
    r.qos_slack.resize(nu);
    for (int n = 0; n < nu; ++n) {
        r.qos_slack[n] = rates[n] - inst.rate_floor[n];
        if (rates[n] < inst.rate_floor[n] * (1.0 - kFeasibilityTol))
            r.violations.push_back({"qos", n, r.qos_slack[n], false});
    }

    r.interference_slack.assign(kk, std::numeric_limits<double>::quiet_NaN());
    for (int k : inst.partition.omega2()) {
        double interference = 0.0;
        for (int n = 0; n < nu; ++n)
            if (a(n, k)) interference += p(n, k) * inst.channel.g_r2m[k];
        r.interference_slack[k] = inst.delta0 - interference;
        if (interference > inst.delta0 * (1.0 + kFeasibilityTol) + 1e-300)
            r.violations.push_back({"interference", k, r.interference_slack[k], false});
    }

    double total = 0.0;
    for (int n = 0; n < nu; ++n)
        for (int k = 0; k < kk; ++k) {
            if (p(n, k) < 0.0) r.violations.push_back({"nonnegative-power", k, p(n, k), false});
            if (a(n, k)) total += p(n, k);
        }
    r.power_slack = inst.power.p_max - total;
    if (total > inst.power.p_max * (1.0 + kFeasibilityTol)) r.violations.push_back({"power", -1, r.power_slack, false});
    return r;
}

double delta0_from_eta_hue(double eta_hue, const HpnModel& hpn, double d_hpn_hue_m, int l_rrh, double n0_w_per_hz,
                           double b0_hz) {
    if (!(eta_hue > 0.0)) throw ConfigError("eta_hue must be > 0");
    if (l_rrh < 1) throw ConfigError("L must be >= 1");
    const double g = path_gain(LinkType::HpnToHue, d_hpn_hue_m);
    const double v = (hpn.per_rb_power * g / eta_hue - b0_hz * n0_w_per_hz) / l_rrh;
    return std::max(0.0, v);
}

}  // namespace hcran
