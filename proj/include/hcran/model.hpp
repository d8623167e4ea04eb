#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hcran/grid.hpp"

namespace hcran {

enum class Band : std::uint8_t { Exclusive, Shared };

// Split of the K resource blocks into the exclusive set and the shared set.
class SffrPartition {
public:
    SffrPartition() = default;
    SffrPartition(std::vector<int> omega1, std::vector<int> omega2, int k_total, double b0_hz);

    // First `exclusive` RBs are exclusive, the rest shared.
    static SffrPartition split(int k_total, int exclusive, double b0_hz);
    // |omega1| = round(ratio * k_total).
    static SffrPartition from_ratio(int k_total, double omega1_ratio, double b0_hz);

    const std::vector<int>& omega1() const { return omega1_; }
    const std::vector<int>& omega2() const { return omega2_; }
    int k_total() const { return k_total_; }
    double b0_hz() const { return b0_; }
    Band band(int k) const { return bands_.at(k); }
    bool shared(int k) const { return bands_[k] == Band::Shared; }

private:
    std::vector<int> omega1_;
    std::vector<int> omega2_;
    std::vector<Band> bands_;
    int k_total_ = 0;
    double b0_ = 0.0;
};

struct QosProfile {
    double eta_r = 128e3;
    double eta_er = 64e3;
    void validate() const;
};

struct PowerModel {
    double phi_eff = 2.0;
    double p_circuit = 0.1;
    double p_bh = 0.2;
    double p_max = 0.1;
    double static_power() const { return p_circuit + p_bh; }
    void validate() const;
};

struct HpnModel {
    double p_max_m = 0.0;
    double per_rb_power = 0.0;
    PowerModel power_model;
    int t_hues = 0;

    // P^M = p_max_m / |omega2|.
    static HpnModel make(double p_max_m, const PowerModel& pm, const SffrPartition& part, int t_hues);
    void validate(const SffrPartition& part) const;
};

// UEs 0..n_high-1 are high-QoS, n_high..n_high+n_low-1 are low-QoS.
struct UeLayout {
    int n_high = 0;
    int n_low = 0;
    int total() const { return n_high + n_low; }
    bool is_high(int n) const { return n < n_high; }
};

// Sffr: exclusive RBs go to high-QoS UEs, shared RBs to low-QoS UEs.
// Full: any UE may take any RB.
enum class Eligibility : std::uint8_t { Sffr, Full };

class AllocationMatrix {
public:
    AllocationMatrix() = default;
    AllocationMatrix(int ues, int rbs) : a_(ues, rbs, 0) {}

    int ues() const { return a_.rows(); }
    int rbs() const { return a_.cols(); }
    bool operator()(int n, int k) const { return a_(n, k) != 0; }
    void set(int n, int k, bool v) { a_.at(n, k) = v ? 1 : 0; }
    // Clears column k and gives the RB to n.
    void assign(int n, int k);
    // Owner of RB k, or -1 if none (or several).
    int owner(int k) const;
    const Grid<std::uint8_t>& grid() const { return a_; }

    friend bool operator==(const AllocationMatrix& x, const AllocationMatrix& y) { return x.a_ == y.a_; }

private:
    Grid<std::uint8_t> a_;
};

class PowerMatrix {
public:
    PowerMatrix() = default;
    PowerMatrix(int ues, int rbs) : p_(ues, rbs, 0.0) {}

    int ues() const { return p_.rows(); }
    int rbs() const { return p_.cols(); }
    double& operator()(int n, int k) { return p_(n, k); }
    double operator()(int n, int k) const { return p_(n, k); }
    const Grid<double>& grid() const { return p_; }

private:
    Grid<double> p_;
};

struct DualState {
    std::vector<double> beta;
    std::vector<double> lambda;
    double nu = 0.0;

    static DualState zeros(int ues, int rbs) { return {std::vector<double>(ues, 0.0), std::vector<double>(rbs, 0.0), 0.0}; }
};

struct FadingDraws {
    Grid<double> rrh_rue;  // (N+M) x K
    Grid<double> hpn_rue;  // (N+M) x K
    std::vector<double> rrh_hue;  // K
    Grid<double> hpn_hue;  // T x K
};

struct ChannelState {
    Grid<double> sigma;          // (N+M) x K, 1/W
    std::vector<double> g_r2m;   // K, coupling gain to the HUE
    Grid<double> sigma_hue;      // T x K, 1/W, noise only
    FadingDraws fading;
    std::uint64_t seed = 0;
    std::uint64_t snapshot_id = 0;

    int ues() const { return sigma.rows(); }
    int rbs() const { return sigma.cols(); }
};

// One reference-node resource allocation problem.
struct ProblemInstance {
    ChannelState channel;
    SffrPartition partition;
    UeLayout ues;
    PowerModel power;
    std::vector<double> rate_floor;  // bit/s per UE
    double delta0 = std::numeric_limits<double>::infinity();
    Eligibility eligibility = Eligibility::Sffr;

    int n_ues() const { return channel.ues(); }
    int n_rbs() const { return channel.rbs(); }
    double b0() const { return partition.b0_hz(); }
    bool eligible(int n, int k) const;
    // Per-RB power ceiling from the interference constraint; +inf on exclusive RBs.
    double power_cap(int k) const;
    void validate() const;
};

std::vector<double> nominal_floors(const UeLayout& ues, const QosProfile& qos);

// Evaluation.
std::vector<double> ue_rates(const AllocationMatrix& a, const PowerMatrix& p, const Grid<double>& sigma, double b0);
double rrh_sum_rate(const AllocationMatrix& a, const PowerMatrix& p, const Grid<double>& sigma, double b0);
double rrh_power(const AllocationMatrix& a, const PowerMatrix& p, const PowerModel& pm);
double rrh_ee(const AllocationMatrix& a, const PowerMatrix& p, const Grid<double>& sigma, double b0, const PowerModel& pm);
double hpn_sum_rate(const AllocationMatrix& a_m, const PowerMatrix& p_m, const Grid<double>& sigma_m, double b0);
double hpn_power(const AllocationMatrix& a_m, const PowerMatrix& p_m, const HpnModel& hpn);

struct NodeTerms {
    double rate = 0.0;
    double power = 0.0;
};
double system_ee(double l, const NodeTerms& rrh, const NodeTerms& hpn);

struct ConstraintCheck {
    std::string name;
    int index = -1;
    double slack = 0.0;
    bool ok = true;
};

struct FeasibilityReport {
    bool exclusivity = true;
    bool eligibility = true;
    std::vector<double> qos_slack;           // rate - floor, per UE
    std::vector<double> interference_slack;  // delta0 - interference, shared RBs only (NaN elsewhere)
    double power_slack = 0.0;                // p_max - total
    std::vector<ConstraintCheck> violations;

    bool feasible() const { return violations.empty(); }
    bool qos_ok() const;
    std::optional<ConstraintCheck> first_violation() const;
};

// Relative tolerance used for all constraint checks.
inline constexpr double kFeasibilityTol = 1e-9;

FeasibilityReport check_feasibility(const AllocationMatrix& a, const PowerMatrix& p, const ProblemInstance& inst);

// Interference budget per shared RB from the HUE SINR threshold (linear).
double delta0_from_eta_hue(double eta_hue, const HpnModel& hpn, double d_hpn_hue_m, int l_rrh, double n0_w_per_hz,
                           double b0_hz);

}  // namespace hcran
