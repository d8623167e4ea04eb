#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hcran/model.hpp"

namespace hcran {

enum class LinkType { RrhToRue, HpnToRue, RrhToHue, HpnToHue };

double path_loss_db(LinkType link, double d_m);
double path_gain(LinkType link, double d_m);

struct Geometry {
    std::vector<double> d_rrh_rue;  // per UE
    std::vector<double> d_hpn_rue;  // per UE
    double d_rrh_hue = 125.0;
    double d_hpn_hue = 375.0;
    int n_high = 0;
    int n_low = 0;
    int t_hues = 0;
    int l_rrh = 1;

    // High-QoS UEs at (d_high_rrh, d_high_hpn), low-QoS UEs at (d_low_rrh, d_low_hpn).
    static Geometry two_ring(int n_high, int n_low, int t_hues, int l_rrh, double d_high_rrh = 50.0,
                             double d_high_hpn = 450.0, double d_low_rrh = 75.0, double d_low_hpn = 375.0);
    void validate() const;
};

// mt19937_64 seeded through splitmix64 from (master seed, snapshot index).
class SnapshotRng {
public:
    static constexpr std::string_view kName = "mt19937_64+splitmix64/v1";

    SnapshotRng(std::uint64_t master_seed, std::uint64_t snapshot);
    // Further independent stream for the same snapshot.
    SnapshotRng(std::uint64_t master_seed, std::uint64_t snapshot, std::uint64_t stream);

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t snapshot() const { return snapshot_; }

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Exp(1) by inversion.
    double exponential();

private:
    std::uint64_t master_;
    std::uint64_t snapshot_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

Grid<double> draw_fading(SnapshotRng& rng, int rows, int cols);

// Linear link budget feeding the CINR construction.
struct LinkBudget {
    std::vector<double> serving_gain;     // per UE
    std::vector<double> interferer_gain;  // per UE, from the interfering macro node
    double interferer_power_shared = 0.0;     // W per shared RB
    double interferer_power_exclusive = 0.0;  // W per exclusive RB
    double coupling_gain = 0.0;  // reference node to protected HUE
    double hue_gain = 0.0;       // macro node to its HUEs
    int t_hues = 0;
    double noise_w = 0.0;        // B0 * N0
};

ChannelState build_cinr(const LinkBudget& budget, const SffrPartition& part, SnapshotRng& rng);
ChannelState build_cinr(const Geometry& geom, const SffrPartition& part, const HpnModel& hpn, double n0_w_per_hz,
                        SnapshotRng& rng);

void write_channel_csv(std::ostream& os, const ChannelState& ch);
// Restores sigma and g_r2m; fading draws are not part of the dump.
ChannelState read_channel_csv(std::istream& is);

double noise_psd_w_per_hz(double n0_dbm_per_hz);

}  // namespace hcran
