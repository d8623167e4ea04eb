#include "hcran/channel.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "hcran/error.hpp"
#include "hcran/units.hpp"

namespace hcran {

double path_loss_db(LinkType link, double d_m) {
    if (!(d_m > 0.0)) throw ConfigError("distance must be > 0, got " + std::to_string(d_m));
    const double exponent = link == LinkType::RrhToRue ? 40.0 : 35.0;
    return 31.5 + exponent * std::log10(d_m);
}

double path_gain(LinkType link, double d_m) { return units::loss_db_to_gain(path_loss_db(link, d_m)); }

Geometry Geometry::two_ring(int n_high, int n_low, int t_hues, int l_rrh, double d_high_rrh, double d_high_hpn,
                            double d_low_rrh, double d_low_hpn) {
    Geometry g;
    g.n_high = n_high;
    g.n_low = n_low;
    g.t_hues = t_hues;
    g.l_rrh = l_rrh;
    for (int n = 0; n < n_high; ++n) {
        g.d_rrh_rue.push_back(d_high_rrh);
        g.d_hpn_rue.push_back(d_high_hpn);
    }
    for (int n = 0; n < n_low; ++n) {
        g.d_rrh_rue.push_back(d_low_rrh);
        g.d_hpn_rue.push_back(d_low_hpn);
    }
    return g;
}

void Geometry::validate() const {
    if (n_high < 0 || n_low < 0 || t_hues < 0 || l_rrh < 1) throw ConfigError("invalid geometry counts");
    const auto ues = static_cast<std::size_t>(n_high + n_low);
    if (d_rrh_rue.size() != ues || d_hpn_rue.size() != ues) throw DimensionError("distance vectors must have N+M entries");
    for (double d : d_rrh_rue)
        if (!(d > 0)) throw ConfigError("distances must be > 0");
    for (double d : d_hpn_rue)
        if (!(d > 0)) throw ConfigError("distances must be > 0");
    if (!(d_rrh_hue > 0) || !(d_hpn_hue > 0)) throw ConfigError("distances must be > 0");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SnapshotRng::SnapshotRng(std::uint64_t master_seed, std::uint64_t snapshot) : SnapshotRng(master_seed, snapshot, 0) {}

SnapshotRng::SnapshotRng(std::uint64_t master_seed, std::uint64_t snapshot, std::uint64_t stream)
    : master_(master_seed), snapshot_(snapshot) {
    const std::uint64_t s = splitmix64(splitmix64(splitmix64(master_seed) ^ snapshot) ^ (stream * 0xd1b54a32d192ed03ULL));
    engine_.seed(s);
}

double SnapshotRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SnapshotRng::exponential() { return -std::log1p(-uniform()); }

Grid<double> draw_fading(SnapshotRng& rng, int rows, int cols) {
    Grid<double> h(rows, cols);
    for (auto& v : h.data()) v = rng.exponential();
    return h;
}

ChannelState build_cinr(const LinkBudget& b, const SffrPartition& part, SnapshotRng& rng) {
    const int ues = static_cast<int>(b.serving_gain.size());
    const int kk = part.k_total();
    if (b.interferer_gain.size() != b.serving_gain.size()) throw DimensionError("interferer gain vector length mismatch");
    if (!(b.noise_w > 0.0)) throw ConfigError("noise power must be > 0");

    ChannelState ch;
    ch.seed = rng.master_seed();
    ch.snapshot_id = rng.snapshot();
    ch.fading.rrh_rue = draw_fading(rng, ues, kk);
    ch.fading.hpn_rue = draw_fading(rng, ues, kk);
    ch.fading.rrh_hue.resize(kk);
    for (auto& v : ch.fading.rrh_hue) v = rng.exponential();
    ch.fading.hpn_hue = draw_fading(rng, b.t_hues, kk);

    ch.sigma = Grid<double>(ues, kk);
    for (int n = 0; n < ues; ++n) {
        for (int k = 0; k < kk; ++k) {
            const double ip = part.shared(k) ? b.interferer_power_shared : b.interferer_power_exclusive;
            const double interference = ip * b.interferer_gain[n] * ch.fading.hpn_rue(n, k);
            ch.sigma(n, k) = b.serving_gain[n] * ch.fading.rrh_rue(n, k) / (interference + b.noise_w);
        }
    }
    ch.g_r2m.resize(kk);
    for (int k = 0; k < kk; ++k) ch.g_r2m[k] = b.coupling_gain * ch.fading.rrh_hue[k];
    ch.sigma_hue = Grid<double>(b.t_hues, kk);
    for (int t = 0; t < b.t_hues; ++t)
        for (int k = 0; k < kk; ++k) ch.sigma_hue(t, k) = b.hue_gain * ch.fading.hpn_hue(t, k) / b.noise_w;
    return ch;
}

ChannelState build_cinr(const Geometry& geom, const SffrPartition& part, const HpnModel& hpn, double n0_w_per_hz,
                        SnapshotRng& rng) {
    geom.validate();
    LinkBudget b;
    for (std::size_t n = 0; n < geom.d_rrh_rue.size(); ++n) {
        b.serving_gain.push_back(path_gain(LinkType::RrhToRue, geom.d_rrh_rue[n]));
        b.interferer_gain.push_back(path_gain(LinkType::HpnToRue, geom.d_hpn_rue[n]));
    }
    b.interferer_power_shared = hpn.per_rb_power;
    b.interferer_power_exclusive = 0.0;
    b.coupling_gain = path_gain(LinkType::RrhToHue, geom.d_rrh_hue);
    b.hue_gain = path_gain(LinkType::HpnToHue, geom.d_hpn_hue);
    b.t_hues = geom.t_hues;
    b.noise_w = part.b0_hz() * n0_w_per_hz;
    return build_cinr(b, part, rng);
}

void write_channel_csv(std::ostream& os, const ChannelState& ch) {
    os << "n,k,sigma,g_r2m\n";
    char buf[96];
    for (int n = 0; n < ch.ues(); ++n)
        for (int k = 0; k < ch.rbs(); ++k) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", n, k, ch.sigma(n, k), ch.g_r2m[k]);
            os << buf;
        }
}

ChannelState read_channel_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "n,k,sigma,g_r2m") throw ConfigError("channel CSV: bad header");
    struct Entry {
        int n, k;
        double sigma, g;
    };
    std::vector<Entry> entries;
    int max_n = -1, max_k = -1, lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        Entry e{};
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &e.n, &e.k, &e.sigma, &e.g) != 4 || e.n < 0 || e.k < 0)
            throw ConfigError("channel CSV: malformed line " + std::to_string(lineno));
        max_n = std::max(max_n, e.n);
        max_k = std::max(max_k, e.k);
        entries.push_back(e);
    }
    ChannelState ch;
    ch.sigma = Grid<double>(max_n + 1, max_k + 1);
    ch.g_r2m.assign(max_k + 1, 0.0);
    if (entries.size() != static_cast<std::size_t>(max_n + 1) * (max_k + 1))
        throw ConfigError("channel CSV: incomplete matrix");
    for (const auto& e : entries) {
        ch.sigma(e.n, e.k) = e.sigma;
        ch.g_r2m[e.k] = e.g;
    }
    return ch;
}

double noise_psd_w_per_hz(double n0_dbm_per_hz) { return units::dbm_to_watts(n0_dbm_per_hz); }

}  // namespace hcran
