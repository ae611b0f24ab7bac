#pragma once

// CSV and JSON-lines writers for simulation results. Numbers are written in
// shortest round-trip form so identical runs give identical bytes.

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attack.hpp"
#include "protocol.hpp"
#include "simulation.hpp"
#include "trust.hpp"

namespace setd2d::out {

inline std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline std::string_view to_string(attack::Decision d) { return d == attack::Decision::tamper ? "tamper" : "honest"; }

inline void write_metrics_csv(std::ostream& os, const std::vector<sim::FrameResult>& frames) {
    os << "frame,multicast_cqi,multicast_nodes,d2d_receivers,throughput_kbits,d2d_total_kbits,corrupted_kbits,"
          "non_corrupted_kbits,mean_non_corrupted_kbits,wasted_pct,malicious_relays,malicious_selected\n";
    for (const auto& f : frames) {
        const auto& m = f.metrics;
        os << m.frame << ',' << m.multicast_cqi << ',' << m.multicast_nodes << ',' << m.d2d_receivers << ','
           << num(m.throughput_kbits) << ',' << num(m.d2d_total_kbits) << ',' << num(m.corrupted_kbits) << ','
           << num(m.non_corrupted_kbits) << ',' << num(m.mean_non_corrupted_kbits) << ',' << num(m.wasted_pct) << ','
           << m.malicious_relays << ',' << (m.malicious_selected ? 1 : 0) << '\n';
    }
}

inline const char* summary_header =
    "frames,d2d_receptions,mean_non_corrupted_kbits,non_corrupted_kbits_per_frame,wasted_pct,malicious_selection_pct";

inline std::string summary_fields(const sim::RunSummary& s) {
    return std::to_string(s.frames) + ',' + std::to_string(s.d2d_receptions) + ',' + num(s.mean_non_corrupted_kbits) +
           ',' + num(s.non_corrupted_kbits_per_frame) + ',' + num(s.wasted_pct) + ',' + num(s.malicious_selection_pct);
}

inline void write_summary_csv(std::ostream& os, const sim::RunSummary& s) {
    os << summary_header << '\n' << summary_fields(s) << '\n';
}

/// One line per frame: chosen multicast CQI, |U_m|, D2D pairs, THR.
inline void write_configurations_jsonl(std::ostream& os, const std::vector<sim::FrameResult>& frames) {
    for (const auto& f : frames) {
        nlohmann::ordered_json j;
        j["frame"] = f.metrics.frame;
        j["c"] = f.config.multicast_cqi;
        j["multicast"] = f.config.multicast.size();
        auto pairs = nlohmann::json::array();
        for (const auto& p : f.config.pairs) pairs.push_back({index_of(p.receiver), index_of(p.relay)});
        j["pairs"] = pairs;
        j["thr_kbits"] = f.config.throughput_kbits;
        j["fallback"] = f.config.fallback;
        os << j.dump() << '\n';
    }
}

/// Per selected pair and frame: frozen trust values and the round verdict.
inline void write_st_trace_jsonl(std::ostream& os, const std::vector<sim::FrameResult>& frames) {
    for (const auto& f : frames)
        for (const auto& r : f.pairs) {
            nlohmann::ordered_json j;
            j["frame"] = f.metrics.frame;
            j["receiver"] = index_of(r.pair.receiver);
            j["relay"] = index_of(r.pair.relay);
            j["sh"] = r.trust.sh;
            j["scb"] = r.trust.scb;
            j["sib"] = r.trust.sib;
            j["sr"] = r.trust.sr;
            j["st"] = r.trust.st;
            j["d2d_cqi"] = r.d2d_cqi;
            j["malicious"] = r.malicious_relay;
            j["decision"] = to_string(r.decision);
            j["outcome"] = protocol::to_string(r.outcome);
            j["gtf"] = r.gtf ? nlohmann::json(*r.gtf ? 1 : 0) : nlohmann::json(nullptr);
            j["kbits"] = r.kbits;
            os << j.dump() << '\n';
        }
}

inline const char* trust_header = "receiver,relay,frame,sh,scb,sib,so_lon,so_rec,sr,st";

inline void write_trust_row(std::ostream& os, NodePair p, std::uint32_t frame, const trust::TrustSnapshot& s) {
    os << index_of(p.receiver) << ',' << index_of(p.relay) << ',' << frame << ',' << s.sh << ',' << num(s.scb) << ','
       << num(s.sib) << ',' << num(s.so_lon) << ',' << num(s.so_rec) << ',' << num(s.sr) << ',' << num(s.st) << '\n';
}

/// Trust of every pair that interacted, evaluated after the last frame.
inline void write_final_trust_csv(std::ostream& os, const sim::RunResult& r) {
    os << trust_header << '\n';
    auto frame = static_cast<std::uint32_t>(r.frames.size());
    for (const auto& [p, s] : r.final_trust) write_trust_row(os, p, frame, s);
}

inline void write_trace_jsonl(std::ostream& os, const sim::TraceResult& t) {
    for (const auto& p : t.points) {
        nlohmann::ordered_json j;
        j["experiment"] = setd2d::to_string(t.experiment);
        j["series"] = p.series;
        j["round"] = p.round;
        j["receiver"] = index_of(p.receiver);
        j["decision"] = to_string(p.decision);
        j["gtf"] = p.gtf ? nlohmann::json(*p.gtf ? 1 : 0) : nlohmann::json(nullptr);
        j["sh"] = p.snapshot.sh;
        j["scb"] = p.snapshot.scb;
        j["sib"] = p.snapshot.sib;
        j["so_lon"] = p.snapshot.so_lon;
        j["so_rec"] = p.snapshot.so_rec;
        j["sr"] = p.snapshot.sr;
        j["st"] = p.snapshot.st;
        os << j.dump() << '\n';
    }
}

} // namespace setd2d::out
