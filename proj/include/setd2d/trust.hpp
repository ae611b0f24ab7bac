#pragma once

// Service-trust model maintained by the gNB: satisfaction, decay,
// competence/integrity beliefs, reputation and the combined service trust.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ranges>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "core.hpp"

namespace setd2d::trust {

struct InteractionRecord {
    std::uint32_t index = 0;      // l, 1-based within one (receiver, relay) history
    double timestamp = 0.0;       // seconds on the simulation clock
    double satisfaction = 0.0;    // sf in [0,1]
    double importance = 1.0;      // s-omega in (0,1]
    bool good_transmission = false;
    std::optional<double> throughput;  // normalized, extended satisfaction only
    std::optional<double> delay;
};

enum class SatisfactionMode { flag_only, extended };

enum class IntegrityFormula {
    windowed_deviation,  // deviation of recent vs long-term service opinion
    sort_deviation,      // SORT-style RMS deviation of weighted satisfaction from scb
};

struct TrustWeights {
    double beta1 = 1.0;     // competence
    double beta2 = 0.5;     // integrity
    double gamma = 0.5;     // reputation
    double epsilon = 0.175; // relationship factor
    double zeta = 0.175;    // centrality
    double theta = 0.15;    // intelligence
    double mu = 0.5;        // cardinal decay
    double nu = 0.5;        // temporal decay
    // Extended satisfaction; never exercised by the reference experiments.
    double chi = 0.6;
    double psi = 0.2;
    double sigma = 0.2;
    std::uint32_t long_window = 20;
    std::uint32_t recent_window = 5;
    double threshold = 0.3;
    double reputation_default = 0.5;

    /// Throws config_error naming the first violated constraint.
    void validate() const {
        auto non_negative = [](double v, const char* field) {
            if (!(v >= 0.0)) throw config_error(field, "weight must be >= 0");
        };
        non_negative(beta1, "weights.beta1");
        non_negative(beta2, "weights.beta2");
        non_negative(gamma, "weights.gamma");
        non_negative(epsilon, "weights.epsilon");
        non_negative(zeta, "weights.zeta");
        non_negative(theta, "weights.theta");
        non_negative(mu, "weights.mu");
        non_negative(nu, "weights.nu");
        non_negative(chi, "weights.chi");
        non_negative(psi, "weights.psi");
        non_negative(sigma, "weights.sigma");
        if (std::abs(gamma + epsilon + zeta + theta - 1.0) > 1e-9)
            throw config_error("weights.gamma", "gamma + epsilon + zeta + theta must equal 1");
        if (std::abs(mu + nu - 1.0) > 1e-9)
            throw config_error("weights.mu", "mu + nu must equal 1");
        if (recent_window < 1)
            throw config_error("weights.recent_window", "must be >= 1");
        if (long_window <= recent_window)
            throw config_error("weights.long_window", "must be greater than recent_window");
        if (!(threshold >= 0.0 && threshold <= 1.0))
            throw config_error("weights.threshold", "must lie in [0,1]");
        if (!(reputation_default >= 0.0 && reputation_default <= 1.0))
            throw config_error("weights.reputation_default", "must lie in [0,1]");
    }

    /// Same weights with the social indirect terms removed and reputation
    /// carrying the whole indirect contribution (direct-history-only trust).
    TrustWeights without_social() const {
        TrustWeights w = *this;
        w.gamma = 1.0;
        w.epsilon = w.zeta = w.theta = 0.0;
        return w;
    }

    TrustWeights with_decay(double cardinal, double temporal) const {
        TrustWeights w = *this;
        w.mu = cardinal;
        w.nu = temporal;
        return w;
    }

    static TrustWeights cardinal_only() { return TrustWeights{}.with_decay(1.0, 0.0); }
    static TrustWeights temporal_only() { return TrustWeights{}.with_decay(0.0, 1.0); }
    static TrustWeights balanced() { return TrustWeights{}; }
};

/// Append-only interaction log of one ordered (receiver, relay) pair.
class InteractionHistory {
public:
    InteractionHistory() = default;
    explicit InteractionHistory(NodePair pair) : pair_(pair) {}

    NodePair pair() const { return pair_; }
    const std::vector<InteractionRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const InteractionRecord& operator[](std::size_t i) const { return records_[i]; }

    /// Appends a record; the index is assigned here.
    const InteractionRecord& append(InteractionRecord r) {
        if (!(r.satisfaction >= 0.0 && r.satisfaction <= 1.0))
            throw std::domain_error("satisfaction outside [0,1]");
        if (!(r.importance > 0.0 && r.importance <= 1.0))
            throw std::domain_error("importance outside (0,1]");
        if (!records_.empty() && r.timestamp < records_.back().timestamp)
            throw std::domain_error("interaction timestamps must be nondecreasing");
        r.index = static_cast<std::uint32_t>(records_.size() + 1);
        records_.push_back(r);
        return records_.back();
    }

    /// Flag-only interaction: sf = gtf.
    const InteractionRecord& append_flag(bool gtf, double timestamp, double importance = 1.0) {
        InteractionRecord r;
        r.timestamp = timestamp;
        r.good_transmission = gtf;
        r.satisfaction = gtf ? 1.0 : 0.0;
        r.importance = importance;
        return append(r);
    }

private:
    NodePair pair_{};
    std::vector<InteractionRecord> records_;
};

inline double satisfaction(const InteractionRecord& r, const TrustWeights& w, SatisfactionMode mode) {
    if (mode == SatisfactionMode::flag_only) return r.good_transmission ? 1.0 : 0.0;
    if (!r.throughput || !r.delay)
        throw config_error("record.throughput", "extended satisfaction needs throughput and delay");
    if (std::abs(w.chi + w.psi + w.sigma - 1.0) > 1e-9)
        throw config_error("weights.chi", "chi + psi + sigma must equal 1");
    double gtf = r.good_transmission ? 1.0 : 0.0;
    return std::clamp(w.chi * gtf + w.psi * *r.throughput + w.sigma * *r.delay, 0.0, 1.0);
}

/// Decay of the l-th of sh interactions evaluated at time t.
inline double decay_factor(std::uint32_t l, std::size_t sh, double t, double t_interaction,
                           double mu, double nu) {
    if (l < 1 || l > sh) throw std::domain_error("interaction index outside [1, sh]");
    double cardinal = mu * static_cast<double>(l) / static_cast<double>(sh);
    double elapsed = std::abs(t - t_interaction);
    // ln|t - tI| requires a positive argument; zero elapsed time falls to the flat branch.
    if (elapsed > 0.0) {
        double ln = std::log(elapsed);
        if (ln > 1.0) return cardinal + nu / ln;
    }
    return cardinal + nu;
}

namespace detail {

// Decayed, importance-weighted mean of sf over records [first, sh] (1-based).
inline double weighted_mean(const InteractionHistory& h, std::size_t first, double t,
                            const TrustWeights& w) {
    const std::size_t sh = h.size();
    double num = 0.0;
    double den = 0.0;
    for (std::size_t l = first; l <= sh; ++l) {
        const auto& r = h[l - 1];
        double weight = r.importance *
                        decay_factor(static_cast<std::uint32_t>(l), sh, t, r.timestamp, w.mu, w.nu);
        num += r.satisfaction * weight;
        den += weight;
    }
    return num / den;
}

} // namespace detail

/// scb: nullopt on an empty history (no direct evidence).
inline std::optional<double> competence_belief(const InteractionHistory& h, double t,
                                               const TrustWeights& w) {
    if (h.empty()) return std::nullopt;
    return detail::weighted_mean(h, 1, t, w);
}

/// Service opinion over the `window` most recent interactions.
inline std::optional<double> service_opinion(const InteractionHistory& h, std::uint32_t window,
                                             double t, const TrustWeights& w) {
    if (window < 1) throw std::domain_error("opinion window must be >= 1");
    if (h.empty()) return std::nullopt;
    std::size_t sh = h.size();
    std::size_t first = sh > window ? sh - window + 1 : 1;
    return detail::weighted_mean(h, first, t, w);
}

/// sib as printed: sqrt of the mean over sh terms of (SO_rec - SO_lon)^2.
/// The summand does not depend on the summation index, so this equals
/// |SO_rec - SO_lon| up to rounding.
inline std::optional<double> integrity_belief(const InteractionHistory& h, double t,
                                              const TrustWeights& w) {
    if (h.empty()) return std::nullopt;
    double lon = *service_opinion(h, w.long_window, t, w);
    double rec = *service_opinion(h, w.recent_window, t, w);
    const std::size_t sh = h.size();
    double sum = 0.0;
    for (std::size_t l = 1; l <= sh; ++l) sum += (rec - lon) * (rec - lon);
    return std::sqrt(sum / static_cast<double>(sh));
}

/// Comparison formula: RMS deviation of sf * s-omega * s-delta from scb.
inline std::optional<double> integrity_belief_sort(const InteractionHistory& h, double t,
                                                   const TrustWeights& w) {
    auto scb = competence_belief(h, t, w);
    if (!scb) return std::nullopt;
    const std::size_t sh = h.size();
    double sum = 0.0;
    for (std::size_t l = 1; l <= sh; ++l) {
        const auto& r = h[l - 1];
        double v = r.satisfaction * r.importance *
                   decay_factor(static_cast<std::uint32_t>(l), sh, t, r.timestamp, w.mu, w.nu);
        sum += (v - *scb) * (v - *scb);
    }
    return std::sqrt(sum / static_cast<double>(sh));
}

/// Mean satisfaction the relay earned across every receiver's history.
template <std::ranges::input_range R>
    requires std::same_as<std::remove_cvref_t<std::ranges::range_reference_t<R>>, InteractionHistory>
double service_reputation(NodeId relay, R&& histories, double reputation_default) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const InteractionHistory& h : histories) {
        if (h.pair().relay != relay) continue;
        for (const auto& r : h.records()) sum += r.satisfaction;
        n += h.size();
    }
    return n == 0 ? reputation_default : sum / static_cast<double>(n);
}

/// Social evidence about a (receiver, relay) pair.
struct SocialInputs {
    double relationship = 0.1;  // F_ij
    double centrality = 0.0;    // R_ij
    double intelligence = 0.5;  // I_j
};

struct TrustSnapshot {
    double scb = 0.0;
    double sib = 0.0;
    double so_lon = 0.0;
    double so_rec = 0.0;
    double sr = 0.0;
    double st = 0.0;
    double direct_weight = 0.0;  // log(sh+1) / (1 + log(sh+1))
    std::size_t sh = 0;
    double computed_at = 0.0;
};

/// Weight of the direct contribution for a history of size sh; the indirect
/// weight is 1 minus this.
inline double direct_weight(std::size_t sh) {
    double lg = std::log(static_cast<double>(sh) + 1.0);
    return lg / (1.0 + lg);
}

inline double indirect_weight(std::size_t sh) {
    return 1.0 / (1.0 + std::log(static_cast<double>(sh) + 1.0));
}

inline TrustSnapshot service_trust(const InteractionHistory& h, const SocialInputs& social, double sr,
                                   const TrustWeights& w, double t,
                                   IntegrityFormula formula = IntegrityFormula::windowed_deviation) {
    TrustSnapshot s;
    s.sh = h.size();
    s.sr = sr;
    s.computed_at = t;
    double indirect = w.gamma * sr + w.epsilon * social.relationship + w.zeta * social.centrality +
                      w.theta * (1.0 - social.intelligence);
    double direct = 0.0;
    if (!h.empty()) {
        s.scb = *competence_belief(h, t, w);
        s.so_lon = *service_opinion(h, w.long_window, t, w);
        s.so_rec = *service_opinion(h, w.recent_window, t, w);
        s.sib = formula == IntegrityFormula::windowed_deviation ? *integrity_belief(h, t, w)
                                                                : *integrity_belief_sort(h, t, w);
        s.direct_weight = direct_weight(s.sh);
        direct = w.beta1 * s.scb - w.beta2 * s.sib;
    }
    double value = s.direct_weight * direct + indirect_weight(s.sh) * indirect;
    s.st = std::clamp(value, 0.0, 1.0);
    return s;
}

/// Central per-pair history store kept by the gNB. Single writer.
class HistoryStore {
public:
    const InteractionHistory& record(NodePair pair, bool gtf, double timestamp, double importance = 1.0) {
        auto [it, inserted] = histories_.try_emplace(pair, pair);
        const auto& rec = it->second.append_flag(gtf, timestamp, importance);
        auto& tally = tallies_[pair.relay];
        tally.sum += rec.satisfaction;
        tally.count += 1;
        return it->second;
    }

    const InteractionRecord& record(NodePair pair, InteractionRecord r) {
        auto [it, inserted] = histories_.try_emplace(pair, pair);
        const auto& rec = it->second.append(r);
        auto& tally = tallies_[pair.relay];
        tally.sum += rec.satisfaction;
        tally.count += 1;
        return rec;
    }

    /// Empty history for pairs that never interacted.
    const InteractionHistory& history(NodePair pair) const {
        auto it = histories_.find(pair);
        if (it != histories_.end()) return it->second;
        static const InteractionHistory empty;
        return empty;
    }

    bool contains(NodePair pair) const { return histories_.contains(pair); }

    /// Incrementally maintained equivalent of service_reputation().
    double reputation(NodeId relay, double reputation_default) const {
        auto it = tallies_.find(relay);
        if (it == tallies_.end() || it->second.count == 0) return reputation_default;
        return it->second.sum / static_cast<double>(it->second.count);
    }

    std::size_t transactions(NodeId relay) const {
        auto it = tallies_.find(relay);
        return it == tallies_.end() ? 0 : it->second.count;
    }

    auto histories() const { return std::views::values(histories_); }
    std::size_t pair_count() const { return histories_.size(); }

private:
    struct Tally {
        double sum = 0.0;
        std::size_t count = 0;
    };
    std::unordered_map<NodePair, InteractionHistory> histories_;
    std::unordered_map<NodeId, Tally> tallies_;
};

} // namespace setd2d::trust
