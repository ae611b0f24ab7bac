#pragma once

// Frame-level orchestration of the cell: CQI collection, trust snapshot,
// configuration selection, secure relay rounds, verdicts and trust update.
// Also the single-relay trace experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "attack.hpp"
#include "core.hpp"
#include "crypto.hpp"
#include "protocol.hpp"
#include "radio.hpp"
#include "scenario.hpp"
#include "selection.hpp"
#include "social.hpp"
#include "trust.hpp"

namespace setd2d::sim {

struct PairRecord {
    NodePair pair;
    radio::Cqi d2d_cqi = 0;
    double st = 0.0;  // value the selection used (1 for the trust-unaware variant)
    trust::TrustSnapshot trust;  // frozen at frame start, variant weights
    bool malicious_relay = false;
    attack::Decision decision = attack::Decision::honest;
    protocol::RoundOutcome outcome = protocol::RoundOutcome::no_report;
    std::optional<bool> gtf;
    double kbits = 0.0;
    bool corrupted = false;
};

struct MetricsRow {
    std::uint32_t frame = 0;
    radio::Cqi multicast_cqi = 1;
    std::size_t multicast_nodes = 0;
    std::size_t d2d_receivers = 0;
    double throughput_kbits = 0.0;     // THR of the chosen configuration
    double d2d_total_kbits = 0.0;
    double corrupted_kbits = 0.0;
    double non_corrupted_kbits = 0.0;  // summed over D2D receivers
    double mean_non_corrupted_kbits = 0.0;  // per D2D receiver; 0 without D2D receivers
    double wasted_pct = 0.0;
    std::size_t malicious_relays = 0;
    bool malicious_selected = false;
};

struct FrameResult {
    MetricsRow metrics;
    selection::Configuration config;
    std::vector<PairRecord> pairs;
};

/// Which nodes are malicious and how they behave.
inline std::vector<attack::AttackProfile> assign_attacks(const Scenario& sc) {
    const auto n = sc.n_nodes;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    const auto seed = sc.seeds.attacks_seed();
    for (std::size_t i = n - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(unit_double(hash_combine(seed, 0xa1, i)) * static_cast<double>(i + 1));
        std::swap(order[i], order[std::min(j, i)]);
    }
    auto n_mal = static_cast<std::size_t>(std::floor(sc.malicious_fraction * static_cast<double>(n) + 1e-9));
    std::uint32_t horizon = sc.attack.horizon ? sc.attack.horizon : sc.frames;

    std::vector<attack::AttackProfile> profiles;
    profiles.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) profiles.push_back(attack::honest(node(i)));
    for (std::size_t k = 0; k < n_mal; ++k) {
        std::uint32_t id = order[k];
        auto& p = profiles[id];
        const auto& a = sc.attack;
        if (a.kind == "consecutive") {
            p.kind = attack::OnOffConsecutive{a.rate, a.phase, horizon};
        } else if (a.kind == "irregular") {
            p.kind = attack::OnOffIrregular(hash_combine(seed, 0xb2, id), a.rate, horizon);
        } else if (a.kind == "periodic") {
            p.kind = attack::OnOffPeriodic{a.period};
        } else if (a.kind == "selective") {
            attack::ReceiverSelective s;
            for (std::uint32_t v = 0; v < n; ++v)
                if (v != id && unit_double(hash_combine(seed, 0xc3, id, v)) < a.victim_fraction) s.victims.push_back(node(v));
            p.kind = std::move(s);
        }
    }
    for (const auto& [id, p] : sc.node_attacks) profiles[id] = p;
    return profiles;
}

class Simulation {
public:
    /// Without a layout the nodes are dropped uniformly from the layout seed.
    explicit Simulation(Scenario sc, std::optional<radio::CellLayout> layout = std::nullopt)
        : sc_(validated(std::move(sc))),
          layout_(layout ? checked(std::move(*layout), sc_)
                         : radio::uniform_layout(sc_.n_nodes, sc_.side, sc_.seeds.layout_seed())),
          attacks_(assign_attacks(sc_)),
          suite_(crypto::make_suite(sc_.suite)),
          cell_(*suite_, sc_.seeds.crypto_seed()) {
        social::GenerationOptions opt;
        opt.mix = sc_.social.mix;
        opt.intelligence = sc_.social.intelligence;
        if (sc_.social.correlate) {
            opt.adversarial.resize(sc_.n_nodes);
            for (std::size_t i = 0; i < sc_.n_nodes; ++i) opt.adversarial[i] = attacks_[i].malicious();
            opt.adversarial_mix = sc_.social.adversarial_mix;
            opt.adversarial_intelligence = sc_.social.adversarial_intelligence;
        }
        social_ = social::generate_social_graph(sc_.n_nodes, sc_.seeds.social_seed(), opt);
        if (sc_.transcript) cell_.set_transcript(&transcript_);
        registered_.reserve(sc_.n_nodes);
        for (std::uint32_t i = 0; i < sc_.n_nodes; ++i) {
            cell_.register_ue(node(i), 0);
            registered_.push_back(node(i));
        }
    }

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const Scenario& scenario() const { return sc_; }
    const radio::CellLayout& layout() const { return layout_; }
    const social::SocialProfile& social() const { return social_; }
    const trust::HistoryStore& store() const { return store_; }
    const protocol::Transcript& transcript() const { return transcript_; }
    const attack::AttackProfile& attack_profile(NodeId n) const { return attacks_.at(index_of(n)); }
    bool malicious(NodeId n) const { return attack_profile(n).malicious(); }
    std::uint32_t frames_done() const { return frame_; }

    double frame_time(std::uint32_t frame) const { return (frame - 1) * sc_.plan.frame_seconds(); }

    /// Trust weights the variant actually scores with.
    trust::TrustWeights effective_weights() const {
        return sc_.variant == Variant::sed2d ? sc_.weights.without_social() : sc_.weights;
    }

    trust::SocialInputs social_inputs(NodePair p) const {
        return {social_.relationship_factor(p.receiver, p.relay), social::centrality(p.receiver, p.relay, social_),
                social_.intelligence(p.relay)};
    }

    trust::TrustSnapshot trust(NodePair p, double t) const {
        auto w = effective_weights();
        return trust::service_trust(store_.history(p), social_inputs(p), store_.reputation(p.relay, w.reputation_default),
                                    w, t);
    }

    radio::CqiReport cqi_report(std::uint32_t frame) const {
        auto seed = sc_.channel.time_varying ? hash_combine(sc_.seeds.channel_seed(), frame) : sc_.seeds.channel_seed();
        return radio::build_cqi_report(layout_, sc_.channel, seed);
    }

    FrameResult run_frame() {
        const std::uint32_t f = ++frame_;
        const double t = frame_time(f);
        FrameResult out;

        // notify, CQI and trust-parameter uploads
        auto report = cqi_report(f);
        {
            Bytes info;
            crypto::put_u64(info, f);
            cell_.notify(f, info);
        }
        for (NodeId u : registered_) {
            Bytes cqi{static_cast<std::uint8_t>(report.cellular(u))};
            for (std::uint32_t v = 0; v < sc_.n_nodes; ++v) cqi.push_back(static_cast<std::uint8_t>(report.d2d(u, node(v))));
            cell_.control(f, u, protocol::MessageKind::CqiReport, cqi);
            Bytes params;
            crypto::put_u64(params, static_cast<std::uint64_t>(social_.intelligence(u) * 1000.0));
            for (NodeId fr : social_.friends(u)) crypto::put_u64(params, index_of(fr));
            cell_.control(f, u, protocol::MessageKind::TrustParams, params);
        }

        // selection against the trust state frozen at frame start
        std::unordered_map<NodePair, double> frozen;
        auto st_of = [&](NodePair p) {
            auto [it, inserted] = frozen.try_emplace(p, 0.0);
            if (inserted) it->second = sc_.variant == Variant::d2d ? 1.0 : trust(p, t).st;
            return it->second;
        };
        double threshold = sc_.variant == Variant::d2d ? 0.0 : sc_.weights.threshold;
        out.config = selection::select_configuration(report, registered_, st_of, threshold, sc_.plan);
        const auto& cfg = out.config;

        // secure relay rounds
        auto md = cell_.multicast(f, sc_.payload_bytes);
        const double cap_dl = radio::capacity_kbits(cfg.multicast_cqi, sc_.plan, radio::LinkRole::multicast_dl);
        std::unordered_map<NodeId, std::size_t> fanout;
        for (const auto& p : cfg.pairs) ++fanout[p.relay];
        for (const auto& p : cfg.pairs) {
            PairRecord rec;
            rec.pair = p;
            rec.d2d_cqi = report.d2d(p.receiver, p.relay);
            rec.st = st_of(p);
            rec.trust = trust(p, t);
            rec.malicious_relay = malicious(p.relay);
            rec.decision = attack::decide(attack_profile(p.relay), f, p.receiver);
            protocol::RoundOptions opt;
            if (rec.decision == attack::Decision::tamper)
                opt.action = sc_.attack.tamper_ciphertext ? protocol::RelayAction::tamper_ciphertext
                                                          : protocol::RelayAction::tamper_payload;
            auto res = cell_.run_relay_round(p.relay, p.receiver, md, opt);
            rec.outcome = res.outcome;
            rec.gtf = res.gtf;
            double cap_ul = radio::capacity_kbits(rec.d2d_cqi, sc_.plan, radio::LinkRole::d2d_ul) /
                            static_cast<double>(fanout[p.relay]);
            rec.kbits = std::min({sc_.file_kbits, cap_dl, cap_ul});
            rec.corrupted = !rec.gtf.value_or(false);
            out.pairs.push_back(rec);
        }

        // trust update with the verdicts
        for (const auto& rec : out.pairs)
            if (rec.gtf) store_.record(rec.pair, *rec.gtf, t);

        auto& m = out.metrics;
        m.frame = f;
        m.multicast_cqi = cfg.multicast_cqi;
        m.multicast_nodes = cfg.multicast.size();
        m.d2d_receivers = cfg.pairs.size();
        m.throughput_kbits = cfg.throughput_kbits;
        std::vector<NodeId> bad_relays;
        for (const auto& rec : out.pairs) {
            m.d2d_total_kbits += rec.kbits;
            (rec.corrupted ? m.corrupted_kbits : m.non_corrupted_kbits) += rec.kbits;
            if (rec.malicious_relay) bad_relays.push_back(rec.pair.relay);
        }
        std::sort(bad_relays.begin(), bad_relays.end());
        m.malicious_relays = static_cast<std::size_t>(std::unique(bad_relays.begin(), bad_relays.end()) - bad_relays.begin());
        m.malicious_selected = m.malicious_relays > 0;
        if (m.d2d_receivers > 0) m.mean_non_corrupted_kbits = m.non_corrupted_kbits / static_cast<double>(m.d2d_receivers);
        if (m.d2d_total_kbits > 0.0) m.wasted_pct = 100.0 * m.corrupted_kbits / m.d2d_total_kbits;
        return out;
    }

private:
    static radio::CellLayout checked(radio::CellLayout l, const Scenario& sc) {
        if (l.size() != sc.n_nodes) throw config_error("layout", "node count differs from scenario.n_nodes");
        l.side = sc.side;
        l.gnb = {sc.side / 2, sc.side / 2};
        l.validate();
        return l;
    }

    static Scenario validated(Scenario sc) {
        sc.validate();
        return sc;
    }

    Scenario sc_;
    radio::CellLayout layout_;
    std::vector<attack::AttackProfile> attacks_;
    social::SocialProfile social_;
    std::unique_ptr<crypto::CryptoSuite> suite_;
    protocol::SecureCell cell_;
    protocol::Transcript transcript_;
    trust::HistoryStore store_;
    std::vector<NodeId> registered_;
    std::uint32_t frame_ = 0;
};

struct RunSummary {
    std::uint32_t frames = 0;
    std::size_t d2d_receptions = 0;
    double mean_non_corrupted_kbits = 0.0;       // per D2D reception over the run
    double non_corrupted_kbits_per_frame = 0.0;  // D2D total per frame
    double wasted_pct = 0.0;
    double malicious_selection_pct = 0.0;
};

inline RunSummary summarize(const std::vector<FrameResult>& frames) {
    RunSummary s;
    s.frames = static_cast<std::uint32_t>(frames.size());
    double non_corrupted = 0.0, corrupted = 0.0;
    std::size_t bad_frames = 0;
    for (const auto& f : frames) {
        s.d2d_receptions += f.metrics.d2d_receivers;
        non_corrupted += f.metrics.non_corrupted_kbits;
        corrupted += f.metrics.corrupted_kbits;
        bad_frames += f.metrics.malicious_selected ? 1 : 0;
    }
    if (s.d2d_receptions) s.mean_non_corrupted_kbits = non_corrupted / static_cast<double>(s.d2d_receptions);
    if (s.frames) {
        s.non_corrupted_kbits_per_frame = non_corrupted / s.frames;
        s.malicious_selection_pct = 100.0 * static_cast<double>(bad_frames) / s.frames;
    }
    if (non_corrupted + corrupted > 0.0) s.wasted_pct = 100.0 * corrupted / (non_corrupted + corrupted);
    return s;
}

struct RunResult {
    std::vector<FrameResult> frames;
    RunSummary summary;
    protocol::Transcript transcript;
    std::vector<std::pair<NodePair, trust::TrustSnapshot>> final_trust;  // every pair that interacted
    radio::CellLayout layout;
    social::SocialProfile social;
};

inline RunResult run_scenario(const Scenario& sc) {
    Simulation sim(sc);
    RunResult r;
    r.frames.reserve(sc.frames);
    for (std::uint32_t f = 0; f < sc.frames; ++f) r.frames.push_back(sim.run_frame());
    r.summary = summarize(r.frames);
    r.transcript = sim.transcript();
    r.layout = sim.layout();
    r.social = sim.social();
    double t_end = sim.frame_time(sc.frames + 1);
    for (const auto& h : sim.store().histories()) r.final_trust.emplace_back(h.pair(), sim.trust(h.pair(), t_end));
    std::sort(r.final_trust.begin(), r.final_trust.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return r;
}

// --- single-relay trace experiments ---

struct TracePoint {
    std::string series;
    std::uint32_t round = 0;  // or history size for the pure-trust figures
    NodeId receiver{};
    attack::Decision decision = attack::Decision::honest;
    std::optional<bool> gtf;
    trust::TrustSnapshot snapshot;
};

struct TraceResult {
    Experiment experiment = Experiment::fig6;
    std::vector<TracePoint> points;

    std::vector<TracePoint> series(const std::string& name, std::optional<NodeId> receiver = std::nullopt) const {
        std::vector<TracePoint> out;
        for (const auto& p : points)
            if (p.series == name && (!receiver || p.receiver == *receiver)) out.push_back(p);
        return out;
    }
};

/// One relay (node 0) serving receivers 1..k through the secure protocol for
/// the given number of rounds; trust recomputed after each round.
inline std::vector<TracePoint> protocol_trace(const Scenario& sc, const attack::AttackProfile& profile, std::uint32_t receivers,
                                              const trust::TrustWeights& w, const std::string& label) {
    auto suite = crypto::make_suite(sc.suite);
    protocol::SecureCell cell(*suite, sc.seeds.crypto_seed());
    const NodeId relay = node(0);
    cell.register_ue(relay);
    for (std::uint32_t k = 1; k <= receivers; ++k) cell.register_ue(node(k));
    trust::HistoryStore store;
    trust::SocialInputs social{sc.trace.relationship, sc.trace.centrality, sc.trace.intelligence};

    std::vector<TracePoint> out;
    for (std::uint32_t r = 1; r <= sc.trace.rounds; ++r) {
        double t = (r - 1) * sc.trace.spacing;
        auto md = cell.multicast(r, sc.payload_bytes);
        std::vector<TracePoint> round_points;
        for (std::uint32_t k = 1; k <= receivers; ++k) {
            TracePoint pt;
            pt.series = label;
            pt.round = r;
            pt.receiver = node(k);
            pt.decision = attack::decide(profile, r, node(k));
            protocol::RoundOptions opt;
            if (pt.decision == attack::Decision::tamper) opt.action = protocol::RelayAction::tamper_payload;
            pt.gtf = cell.run_relay_round(relay, node(k), md, opt).gtf;
            if (pt.gtf) store.record({node(k), relay}, *pt.gtf, t);
            round_points.push_back(pt);
        }
        double sr = store.reputation(relay, w.reputation_default);
        for (auto& pt : round_points) {
            pt.snapshot = trust::service_trust(store.history({pt.receiver, relay}), social, sr, w, t);
            out.push_back(std::move(pt));
        }
    }
    return out;
}

namespace detail {

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Pure-trust series over a fixed interaction timeline: point sh evaluates
// the first sh interactions at time eval_time(sh).
template <typename EvalTime>
std::vector<TracePoint> history_trace(const std::string& label, const std::vector<std::pair<double, bool>>& timeline,
                                      const trust::TrustWeights& w, const trust::SocialInputs& social,
                                      trust::IntegrityFormula formula, EvalTime eval_time, bool include_empty) {
    std::vector<TracePoint> out;
    trust::InteractionHistory h({node(1), node(0)});
    double good = 0.0;
    auto emit = [&](std::uint32_t sh) {
        TracePoint pt;
        pt.series = label;
        pt.round = sh;
        pt.receiver = node(1);
        double sr = sh ? good / sh : w.reputation_default;
        pt.snapshot = trust::service_trust(h, social, sr, w, eval_time(sh), formula);
        out.push_back(pt);
    };
    if (include_empty) emit(0);
    for (std::size_t k = 0; k < timeline.size(); ++k) {
        h.append_flag(timeline[k].second, timeline[k].first);
        good += timeline[k].second ? 1.0 : 0.0;
        emit(static_cast<std::uint32_t>(k + 1));
    }
    return out;
}

} // namespace detail

/// Decay-preset labels for the short/long-interval figures.
inline const std::vector<std::pair<std::string, trust::TrustWeights>>& decay_presets() {
    static const std::vector<std::pair<std::string, trust::TrustWeights>> presets{
        {"mu=1,nu=0", trust::TrustWeights::cardinal_only()},
        {"mu=0.5,nu=0.5", trust::TrustWeights::balanced()},
        {"mu=0,nu=1", trust::TrustWeights::temporal_only()},
    };
    return presets;
}

/// Ten interactions: five bad then five good. Short: 0.01 s apart. Long: a
/// 3600 s gap before the good ones. Evaluated at the latest interaction.
inline std::vector<std::pair<double, bool>> decay_timeline(bool long_interval) {
    std::vector<std::pair<double, bool>> tl;
    for (int k = 0; k < 10; ++k) {
        double t = 0.01 * k + (long_interval && k >= 5 ? 3600.0 : 0.0);
        tl.emplace_back(t, k >= 5);
    }
    return tl;
}

inline TraceResult run_trace_experiment(const Scenario& sc) {
    TraceResult res;
    res.experiment = sc.experiment;
    const auto& tr = sc.trace;
    trust::SocialInputs social{tr.relationship, tr.centrality, tr.intelligence};
    auto append = [&](std::vector<TracePoint> pts) { res.points.insert(res.points.end(), pts.begin(), pts.end()); };

    switch (sc.experiment) {
    case Experiment::fig5a:
    case Experiment::fig5b: {
        auto tl = decay_timeline(sc.experiment == Experiment::fig5b);
        for (const auto& [label, preset] : decay_presets()) {
            auto w = sc.weights.with_decay(preset.mu, preset.nu);
            append(detail::history_trace(label, tl, w, social, trust::IntegrityFormula::windowed_deviation,
                                         [&](std::uint32_t sh) { return tl[sh - 1].first; }, false));
        }
        break;
    }
    case Experiment::figCI: {
        // all-good history, interactions 10 s apart, evaluated 10 s after the latest
        std::vector<std::pair<double, bool>> tl;
        for (std::uint32_t k = 0; k < tr.rounds; ++k) tl.emplace_back(10.0 * k, true);
        auto eval = [](std::uint32_t sh) { return 10.0 * sh; };
        append(detail::history_trace("windowed", tl, sc.weights, social, trust::IntegrityFormula::windowed_deviation, eval, true));
        append(detail::history_trace("sort", tl, sc.weights, social, trust::IntegrityFormula::sort_deviation, eval, true));
        break;
    }
    case Experiment::fig6:
        for (double rate : tr.rates)
            for (auto phase : {attack::Phase::initial, attack::Phase::final}) {
                attack::AttackProfile p{node(0), attack::OnOffConsecutive{rate, phase, tr.rounds}};
                std::string label = std::string(phase == attack::Phase::initial ? "initial" : "final") + "-" +
                                    detail::fmt_double(rate);
                append(protocol_trace(sc, p, 1, sc.weights, label));
            }
        break;
    case Experiment::fig7:
        for (double rate : tr.rates) {
            attack::AttackProfile p{node(0), attack::OnOffIrregular(sc.seeds.attacks_seed(), rate, tr.rounds)};
            append(protocol_trace(sc, p, 1, sc.weights, "irregular-" + detail::fmt_double(rate)));
        }
        break;
    case Experiment::fig8: {
        std::uint32_t k = std::max<std::uint32_t>(tr.receivers, 3);
        attack::AttackProfile p{node(0), attack::ReceiverSelective{{node(1)}}};
        append(protocol_trace(sc, p, k, sc.weights, "selective"));
        break;
    }
    case Experiment::fig9:
        for (double b2 : tr.beta2_values) {
            auto w = sc.weights;
            w.beta2 = b2;
            attack::AttackProfile p{node(0), attack::OnOffPeriodic{sc.attack.period}};
            append(protocol_trace(sc, p, 1, w, "beta2=" + detail::fmt_double(b2)));
        }
        break;
    case Experiment::network:
        throw config_error("scenario.experiment", "network scenarios run through run_scenario");
    }
    return res;
}

} // namespace setd2d::sim
