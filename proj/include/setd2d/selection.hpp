#pragma once

// Multicast / D2D configuration selection: for every candidate multicast CQI,
// split the registered nodes into multicast-served and D2D-served sets, give
// each D2D receiver its best trusted relay, and keep the full-coverage
// configuration with the highest throughput.

#include <algorithm>
#include <concepts>
#include <limits>
#include <utility>
#include <vector>

#include "core.hpp"
#include "radio.hpp"

namespace setd2d::selection {

using radio::Cqi;
using radio::CqiReport;
using radio::FramePlan;

/// Maps a (receiver, relay) pair to its service trust at selection time.
template <typename F>
concept TrustSource = std::invocable<F&, NodePair> && std::convertible_to<std::invoke_result_t<F&, NodePair>, double>;

struct Configuration {
    Cqi multicast_cqi = radio::min_cqi;
    std::vector<NodeId> multicast;  // U_m, ascending
    std::vector<NodePair> pairs;    // P_d, ascending by receiver
    double throughput_kbits = 0.0;
    bool fallback = false;          // pure multicast at the worst reported CQI

    /// Number of receivers served by `relay`.
    std::size_t fanout(NodeId relay) const {
        return static_cast<std::size_t>(
            std::count_if(pairs.begin(), pairs.end(), [&](const NodePair& p) { return p.relay == relay; }));
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// (U_m, U_rest): nodes able to decode MCS(c), i.e. cellular CQI >= c, and the rest.
inline std::pair<std::vector<NodeId>, std::vector<NodeId>>
partition_by_cqi(const CqiReport& report, const std::vector<NodeId>& registered, Cqi c) {
    if (c < radio::min_cqi || c > radio::max_cqi) throw std::domain_error("multicast CQI outside [1,15]");
    std::pair<std::vector<NodeId>, std::vector<NodeId>> out;
    for (NodeId u : registered) (report.cellular(u) >= c ? out.first : out.second).push_back(u);
    return out;
}

namespace detail {

// Candidate order: higher D2D CQI first, lower node id on ties.
inline void sort_candidates(std::vector<NodeId>& v, NodeId receiver, const CqiReport& report) {
    std::sort(v.begin(), v.end(), [&](NodeId a, NodeId b) {
        Cqi ca = report.d2d(receiver, a);
        Cqi cb = report.d2d(receiver, b);
        return ca != cb ? ca > cb : a < b;
    });
}

} // namespace detail

/// Members of U_m reachable over D2D from `receiver` whose trust meets the threshold,
/// best D2D CQI first.
template <TrustSource Trust>
std::vector<NodeId> eligible_relays(NodeId receiver, const std::vector<NodeId>& multicast, const CqiReport& report,
                                    Trust&& trust, double threshold) {
    std::vector<NodeId> out;
    for (NodeId s : multicast) {
        if (s == receiver || report.d2d(receiver, s) == 0) continue;
        if (static_cast<double>(trust(NodePair{receiver, s})) >= threshold) out.push_back(s);
    }
    detail::sort_candidates(out, receiver, report);
    return out;
}

/// THR: every multicast-served node at capacity(c) plus each D2D pair's link capacity.
inline double configuration_throughput(const CqiReport& report, Cqi c, std::size_t multicast_size,
                                       const std::vector<NodePair>& pairs, const FramePlan& plan) {
    double thr = static_cast<double>(multicast_size) * radio::capacity_kbits(c, plan, radio::LinkRole::multicast_dl);
    for (const auto& p : pairs)
        thr += radio::capacity_kbits(report.d2d(p.receiver, p.relay), plan, radio::LinkRole::d2d_ul);
    return thr;
}

template <TrustSource Trust>
Configuration select_configuration(const CqiReport& report, std::vector<NodeId> registered, Trust&& trust,
                                   double threshold, const FramePlan& plan) {
    if (registered.empty()) throw std::domain_error("no registered nodes");
    std::sort(registered.begin(), registered.end());

    // The trust-eligible candidate list of a receiver does not depend on c,
    // only membership in U_m does; build it once over all registered nodes.
    std::vector<std::vector<NodeId>> candidates(registered.size());
    for (std::size_t k = 0; k < registered.size(); ++k)
        candidates[k] = eligible_relays(registered[k], registered, report, trust, threshold);

    Configuration best;
    bool found = false;
    for (Cqi c = radio::min_cqi; c <= radio::max_cqi; ++c) {
        Configuration cand;
        cand.multicast_cqi = c;
        bool covered = true;
        for (std::size_t k = 0; k < registered.size() && covered; ++k) {
            NodeId u = registered[k];
            if (report.cellular(u) >= c) {
                cand.multicast.push_back(u);
                continue;
            }
            auto it = std::find_if(candidates[k].begin(), candidates[k].end(),
                                   [&](NodeId s) { return report.cellular(s) >= c; });
            if (it == candidates[k].end()) covered = false;
            else cand.pairs.push_back({u, *it});
        }
        if (!covered || cand.multicast.empty()) continue;
        cand.throughput_kbits = configuration_throughput(report, c, cand.multicast.size(), cand.pairs, plan);
        if (!found || cand.throughput_kbits > best.throughput_kbits) {
            best = std::move(cand);
            found = true;
        }
    }
    if (found) return best;

    // Unreachable with a nonempty registered set (c = min CQI always covers
    // everyone), kept as the documented safety net.
    Configuration fb;
    fb.fallback = true;
    fb.multicast_cqi = radio::max_cqi;
    for (NodeId u : registered) fb.multicast_cqi = std::min(fb.multicast_cqi, report.cellular(u));
    fb.multicast = registered;
    fb.throughput_kbits = configuration_throughput(report, fb.multicast_cqi, fb.multicast.size(), {}, plan);
    return fb;
}

} // namespace setd2d::selection
