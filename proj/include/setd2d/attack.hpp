#pragma once

// Adversarial relay behaviour as a pure schedule over (round, receiver).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core.hpp"

namespace setd2d::attack {

enum class Decision { honest, tamper };

enum class Phase {
    initial,  // tamper first, then behave
    final,    // behave first, then tamper
};

struct Honest {};

struct OnOffConsecutive {
    double rate = 1.0;
    Phase phase = Phase::final;
    std::uint32_t horizon = 100;  // N rounds the rate is taken over
};

/// Exactly floor(rate * horizon) tamper rounds at seeded positions; the
/// schedule repeats past the horizon.
class OnOffIrregular {
public:
    OnOffIrregular(std::uint64_t seed, double rate, std::uint32_t horizon = 100) : seed_(seed), rate_(rate) {
        if (!(rate >= 0.0 && rate <= 1.0)) throw config_error("attacks.rate", "must lie in [0,1]");
        if (horizon < 1) throw config_error("attacks.horizon", "must be >= 1");
        auto n_tamper = static_cast<std::size_t>(std::floor(rate * horizon + 1e-9));
        schedule_.assign(horizon, false);
        std::fill_n(schedule_.begin(), n_tamper, true);
        // Fisher-Yates with hashed draws
        for (std::size_t i = horizon - 1; i > 0; --i) {
            auto j = static_cast<std::size_t>(unit_double(hash_combine(seed, 0x1a7, i)) * static_cast<double>(i + 1));
            std::swap(schedule_[i], schedule_[std::min(j, i)]);
        }
    }

    bool tamper(std::uint32_t round) const { return schedule_[(round - 1) % schedule_.size()]; }
    std::uint64_t seed() const { return seed_; }
    double rate() const { return rate_; }
    std::uint32_t horizon() const { return static_cast<std::uint32_t>(schedule_.size()); }
    const std::vector<bool>& schedule() const { return schedule_; }

private:
    std::uint64_t seed_;
    double rate_;
    std::vector<bool> schedule_;
};

/// period honest rounds, then period tamper rounds, repeating.
struct OnOffPeriodic {
    std::uint32_t period = 10;
};

struct ReceiverSelective {
    std::vector<NodeId> victims;  // sorted
};

using AttackKind = std::variant<Honest, OnOffConsecutive, OnOffIrregular, OnOffPeriodic, ReceiverSelective>;

struct AttackProfile {
    NodeId node{};
    AttackKind kind = Honest{};

    bool malicious() const { return !std::holds_alternative<Honest>(kind); }
};

inline AttackProfile honest(NodeId n) { return {n, Honest{}}; }
inline AttackProfile always_tamper(NodeId n) { return {n, OnOffConsecutive{1.0, Phase::final, 1}}; }

inline std::uint32_t tamper_rounds(double rate, std::uint32_t horizon) {
    return static_cast<std::uint32_t>(std::floor(rate * horizon + 1e-9));
}

inline Decision decide(const AttackProfile& profile, std::uint32_t round, NodeId receiver) {
    if (round < 1) throw std::domain_error("rounds are 1-based");
    auto to = [](bool t) { return t ? Decision::tamper : Decision::honest; };
    return std::visit(
        [&](const auto& k) -> Decision {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Honest>) {
                return Decision::honest;
            } else if constexpr (std::is_same_v<K, OnOffConsecutive>) {
                std::uint32_t n = tamper_rounds(k.rate, k.horizon);
                std::uint32_t r = (round - 1) % k.horizon + 1;
                return to(k.phase == Phase::initial ? r <= n : r > k.horizon - n);
            } else if constexpr (std::is_same_v<K, OnOffIrregular>) {
                return to(k.tamper(round));
            } else if constexpr (std::is_same_v<K, OnOffPeriodic>) {
                return to(((round - 1) / k.period) % 2 == 1);
            } else {
                return to(std::binary_search(k.victims.begin(), k.victims.end(), receiver));
            }
        },
        profile.kind);
}

inline void validate(const AttackProfile& p) {
    std::visit(
        [](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, OnOffConsecutive>) {
                if (!(k.rate >= 0.0 && k.rate <= 1.0)) throw config_error("attacks.rate", "must lie in [0,1]");
                if (k.horizon < 1) throw config_error("attacks.horizon", "must be >= 1");
            } else if constexpr (std::is_same_v<K, OnOffPeriodic>) {
                if (k.period < 1) throw config_error("attacks.period", "must be >= 1");
            } else if constexpr (std::is_same_v<K, ReceiverSelective>) {
                if (!std::is_sorted(k.victims.begin(), k.victims.end()))
                    throw config_error("attacks.victims", "must be sorted");
            }
        },
        p.kind);
}

inline std::string_view kind_name(const AttackProfile& p) {
    static constexpr std::string_view names[] = {"honest", "consecutive", "irregular", "periodic", "selective"};
    return names[p.kind.index()];
}

} // namespace setd2d::attack
