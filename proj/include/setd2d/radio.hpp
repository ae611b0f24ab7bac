#pragma once

// Parametric channel abstraction: geometry -> SINR -> CQI, and CQI -> per-frame
// capacity on the TDD frame (multicast in DL slots, D2D in UL slots).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"

namespace setd2d::radio {

using Cqi = int;

inline constexpr Cqi min_cqi = 1;
inline constexpr Cqi max_cqi = 15;

/// 4-bit CQI table: spectral efficiency (bits per resource element) for CQI 1..15.
inline constexpr std::array<double, 15> cqi_efficiency{
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.9141,
    2.4063, 2.7305, 3.3223, 3.9023, 4.5234, 5.1152, 5.5547};

/// Minimum SINR (dB) at which each CQI is reported (10% BLER operating points).
inline constexpr std::array<double, 15> cqi_sinr_threshold_db{
    -6.9355, -5.1459, -3.1804, -1.2535, 0.7610, 2.6993, 4.6942, 6.5256,
    8.5730,  10.3658, 12.2885, 14.1730, 15.8880, 17.8142, 19.8291};

inline double efficiency(Cqi c) {
    if (c < min_cqi || c > max_cqi) throw std::domain_error("CQI outside [1,15]");
    return cqi_efficiency[static_cast<std::size_t>(c - 1)];
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct CellLayout {
    double side = 100.0;
    Point gnb{50.0, 50.0};
    std::vector<Point> positions;

    std::size_t size() const { return positions.size(); }
    Point at(NodeId n) const {
        if (index_of(n) >= positions.size()) throw std::domain_error("unknown node in layout");
        return positions[index_of(n)];
    }

    void validate() const {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            auto p = positions[i];
            if (p.x < 0.0 || p.y < 0.0 || p.x > side || p.y > side)
                throw config_error("layout.node" + std::to_string(i), "position outside the cell");
        }
    }
};

/// n nodes uniformly distributed over the square cell, gNB at the center.
inline CellLayout uniform_layout(std::size_t n, double side, std::uint64_t seed) {
    CellLayout layout;
    layout.side = side;
    layout.gnb = {side / 2.0, side / 2.0};
    layout.positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        layout.positions.push_back({side * unit_double(hash_combine(seed, i, 0)),
                                    side * unit_double(hash_combine(seed, i, 1))});
    return layout;
}

inline void write_layout_csv(std::ostream& os, const CellLayout& layout) {
    os << "node,x,y\n";
    os.precision(17);
    for (std::size_t i = 0; i < layout.positions.size(); ++i)
        os << i << ',' << layout.positions[i].x << ',' << layout.positions[i].y << '\n';
}

inline CellLayout read_layout_csv(std::istream& is, double side) {
    CellLayout layout;
    layout.side = side;
    layout.gnb = {side / 2.0, side / 2.0};
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t idx;
        char c1, c2;
        Point p;
        if (!(ls >> idx >> c1 >> p.x >> c2 >> p.y) || c1 != ',' || c2 != ',')
            throw std::invalid_argument("bad layout line: " + line);
        if (idx != layout.positions.size()) throw std::invalid_argument("layout nodes must be listed in order");
        layout.positions.push_back(p);
    }
    layout.validate();
    return layout;
}

enum class ChannelMode {
    shadowed,  // log-distance path loss + seeded log-normal shadowing
    banded,    // deterministic: CQI drops by one every band_m meters
};

struct ChannelParams {
    ChannelMode mode = ChannelMode::shadowed;
    double cellular_snr_ref_db = 50.0;  // SNR at 1 m from the gNB
    double cellular_exponent = 3.0;
    double cellular_shadowing_db = 4.0;
    double d2d_snr_ref_db = 40.0;  // SNR at 1 m between UEs
    double d2d_exponent = 3.0;
    double d2d_shadowing_db = 3.0;
    double max_d2d_range_m = 25.0;
    double cellular_band_m = 5.0;  // banded mode only
    bool time_varying = true;      // redraw shadowing every frame

    void validate() const {
        if (!(max_d2d_range_m > 0.0)) throw config_error("radio.max_d2d_range", "must be > 0");
        if (!(cellular_exponent > 0.0)) throw config_error("radio.cellular_exponent", "must be > 0");
        if (!(d2d_exponent > 0.0)) throw config_error("radio.d2d_exponent", "must be > 0");
        if (cellular_shadowing_db < 0.0) throw config_error("radio.cellular_shadowing_db", "must be >= 0");
        if (d2d_shadowing_db < 0.0) throw config_error("radio.d2d_shadowing_db", "must be >= 0");
        if (!(cellular_band_m > 0.0)) throw config_error("radio.cellular_band", "must be > 0");
    }
};

/// Highest CQI whose SINR threshold is met; 0 below CQI 1.
inline Cqi cqi_from_sinr(double sinr_db) {
    Cqi c = 0;
    for (std::size_t i = 0; i < cqi_sinr_threshold_db.size(); ++i)
        if (sinr_db >= cqi_sinr_threshold_db[i]) c = static_cast<Cqi>(i + 1);
    return c;
}

struct CellularLink {
    NodeId ue;
};
struct D2DLink {
    NodeId a;
    NodeId b;
};
using Link = std::variant<CellularLink, D2DLink>;

namespace detail {
inline double path_snr(double ref_db, double exponent, double d) {
    return ref_db - 10.0 * exponent * std::log10(std::max(d, 1.0));
}
} // namespace detail

/// Cellular CQI in [1,15]; D2D CQI in [0,15] with 0 meaning no usable link.
inline Cqi compute_cqi(const CellLayout& layout, const Link& link, const ChannelParams& p,
                       std::uint64_t seed) {
    if (auto* cell = std::get_if<CellularLink>(&link)) {
        double d = distance(layout.at(cell->ue), layout.gnb);
        if (p.mode == ChannelMode::banded)
            return std::clamp(max_cqi - static_cast<Cqi>(d / p.cellular_band_m), min_cqi, max_cqi);
        double snr = detail::path_snr(p.cellular_snr_ref_db, p.cellular_exponent, d) +
                     p.cellular_shadowing_db * hashed_normal(hash_combine(seed, 1, index_of(cell->ue)));
        return std::clamp(cqi_from_sinr(snr), min_cqi, max_cqi);
    }
    const auto& dl = std::get<D2DLink>(link);
    if (dl.a == dl.b) return 0;
    double d = distance(layout.at(dl.a), layout.at(dl.b));
    if (d > p.max_d2d_range_m) return 0;
    if (p.mode == ChannelMode::banded) {
        double band = p.max_d2d_range_m / static_cast<double>(max_cqi);
        return std::clamp(max_cqi - static_cast<Cqi>(d / band), min_cqi, max_cqi);
    }
    auto lo = std::min(index_of(dl.a), index_of(dl.b));
    auto hi = std::max(index_of(dl.a), index_of(dl.b));
    double snr = detail::path_snr(p.d2d_snr_ref_db, p.d2d_exponent, d) +
                 p.d2d_shadowing_db * hashed_normal(hash_combine(seed, 2, lo, hi));
    return std::clamp(cqi_from_sinr(snr), 0, max_cqi);
}

/// CQI values collected by the gNB in one frame.
class CqiReport {
public:
    CqiReport() = default;
    explicit CqiReport(std::size_t n) : n_(n), cellular_(n, min_cqi), d2d_(n * n, 0) {}

    std::size_t size() const { return n_; }
    Cqi cellular(NodeId u) const { return cellular_.at(index_of(u)); }
    Cqi d2d(NodeId a, NodeId b) const { return d2d_.at(index_of(a) * n_ + index_of(b)); }

    void set_cellular(NodeId u, Cqi c) {
        if (c < min_cqi || c > max_cqi) throw std::domain_error("cellular CQI outside [1,15]");
        cellular_.at(index_of(u)) = static_cast<std::uint8_t>(c);
    }
    void set_d2d(NodeId a, NodeId b, Cqi c) {
        if (c < 0 || c > max_cqi) throw std::domain_error("D2D CQI outside [0,15]");
        if (a == b && c != 0) throw std::domain_error("self D2D link");
        d2d_.at(index_of(a) * n_ + index_of(b)) = static_cast<std::uint8_t>(c);
        d2d_.at(index_of(b) * n_ + index_of(a)) = static_cast<std::uint8_t>(c);
    }

    friend bool operator==(const CqiReport&, const CqiReport&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> cellular_;
    std::vector<std::uint8_t> d2d_;
};

inline CqiReport build_cqi_report(const CellLayout& layout, const ChannelParams& p, std::uint64_t seed) {
    const auto n = layout.size();
    CqiReport report(n);
    for (std::uint32_t i = 0; i < n; ++i) report.set_cellular(node(i), compute_cqi(layout, CellularLink{node(i)}, p, seed));
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            report.set_d2d(node(i), node(j), compute_cqi(layout, D2DLink{node(i), node(j)}, p, seed));
    return report;
}

struct FramePlan {
    int slots = 10;
    int dl_slots = 6;
    int ul_slots = 3;
    int special_slots = 1;
    double slot_ms = 1.0;
    int bandwidth_rbs = 100;
    int subcarriers_per_rb = 12;
    int symbols_per_slot = 14;

    double frame_seconds() const { return slots * slot_ms / 1000.0; }

    void validate() const {
        if (dl_slots + ul_slots + special_slots != slots)
            throw config_error("radio.slots", "dl + ul + special slots must equal slots per frame");
        if (dl_slots < 0 || ul_slots < 0 || special_slots < 0)
            throw config_error("radio.slots", "slot counts must be >= 0");
    }
};

enum class LinkRole { multicast_dl, d2d_ul };

/// Kbits one link carries in one frame at the given CQI.
inline double capacity_kbits(Cqi c, const FramePlan& plan, LinkRole role) {
    if (c == 0) throw std::domain_error("CQI 0: no link");
    int slots = role == LinkRole::multicast_dl ? plan.dl_slots : plan.ul_slots;
    double res_per_slot = static_cast<double>(plan.bandwidth_rbs) * plan.subcarriers_per_rb * plan.symbols_per_slot;
    return efficiency(c) * res_per_slot * slots / 1000.0;
}

} // namespace setd2d::radio
