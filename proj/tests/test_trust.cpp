#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "setd2d/trust.hpp"

using namespace setd2d;
using namespace setd2d::trust;

namespace {

InteractionHistory history_of(std::initializer_list<double> sfs, double spacing = 1.0) {
    InteractionHistory h({node(1), node(0)});
    double t = 0;
    for (double sf : sfs) {
        InteractionRecord r;
        r.satisfaction = sf;
        r.good_transmission = sf >= 1.0;
        r.timestamp = t;
        h.append(r);
        t += spacing;
    }
    return h;
}

// Weights whose decay is identically 1 (mu = 0, nu = 1, elapsed time under e).
TrustWeights unit_decay() { return TrustWeights{}.with_decay(0.0, 1.0); }

} // namespace

TEST(Satisfaction, FlagOnlyIsTheFlag) {
    InteractionRecord r;
    r.good_transmission = true;
    EXPECT_EQ(satisfaction(r, {}, SatisfactionMode::flag_only), 1.0);
    r.good_transmission = false;
    EXPECT_EQ(satisfaction(r, {}, SatisfactionMode::flag_only), 0.0);
}

TEST(Satisfaction, ExtendedWeightedSum) {
    InteractionRecord r;
    r.good_transmission = true;
    r.throughput = 0.8;
    r.delay = 0.5;
    TrustWeights w;
    w.chi = 0.5;
    w.psi = 0.3;
    w.sigma = 0.2;
    EXPECT_NEAR(satisfaction(r, w, SatisfactionMode::extended), 0.84, 1e-12);
}

TEST(Satisfaction, ExtendedWithoutThroughputIsConfigError) {
    InteractionRecord r;
    r.good_transmission = true;
    EXPECT_THROW(satisfaction(r, {}, SatisfactionMode::extended), config_error);
    r.throughput = 0.5;
    r.delay = 0.5;
    TrustWeights w;
    w.chi = 0.9;
    EXPECT_THROW(satisfaction(r, w, SatisfactionMode::extended), config_error);
}

TEST(Decay, Examples) {
    EXPECT_DOUBLE_EQ(decay_factor(10, 10, 123.0, 0.0, 1.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(decay_factor(5, 10, 0.5, 0.0, 0.0, 1.0), 1.0);
    EXPECT_NEAR(decay_factor(5, 10, std::exp(2.0), 0.0, 0.5, 0.5), 0.5, 1e-12);
}

TEST(Decay, IndexOutsideHistoryIsDomainError) {
    EXPECT_THROW(decay_factor(0, 10, 0, 0, 0.5, 0.5), std::domain_error);
    EXPECT_THROW(decay_factor(11, 10, 0, 0, 0.5, 0.5), std::domain_error);
}

TEST(Decay, ZeroElapsedTakesFlatBranch) { EXPECT_DOUBLE_EQ(decay_factor(1, 2, 3.0, 3.0, 0.5, 0.5), 0.75); }

TEST(Decay, MonotoneInAgeAndElapsed) {
    for (std::uint32_t l = 1; l < 20; ++l)
        EXPECT_LE(decay_factor(l, 20, 100, 0, 0.5, 0.5), decay_factor(l + 1, 20, 100, 0, 0.5, 0.5));
    double prev = 2.0;
    for (double d = 3.0; d < 1e5; d *= 1.7) {
        double v = decay_factor(3, 10, d, 0, 0.5, 0.5);
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(Competence, Examples) {
    auto w = unit_decay();
    EXPECT_DOUBLE_EQ(*competence_belief(history_of({1, 1, 1, 1}), 0.5, TrustWeights{}), 1.0);
    EXPECT_DOUBLE_EQ(*competence_belief(history_of({0}), 0.0, w), 0.0);
    EXPECT_DOUBLE_EQ(*competence_belief(history_of({1, 0, 1, 0}, 0.1), 0.3, w), 0.5);
    EXPECT_FALSE(competence_belief(InteractionHistory{}, 0.0, w).has_value());
}

TEST(ServiceOpinion, WindowExamples) {
    auto w = unit_decay();
    auto h = history_of({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 0.01);
    double t = 0.14;
    EXPECT_DOUBLE_EQ(*service_opinion(h, 5, t, w), 1.0);
    EXPECT_NEAR(*service_opinion(h, 15, t, w), 5.0 / 15.0, 1e-12);
    EXPECT_THROW(service_opinion(h, 0, t, w), std::domain_error);
}

TEST(ServiceOpinion, LongWindowCoveringHistoryEqualsCompetence) {
    std::mt19937_64 rng(7);
    TrustWeights w;
    for (int trial = 0; trial < 200; ++trial) {
        InteractionHistory h({node(1), node(0)});
        int sh = 1 + static_cast<int>(rng() % 20);
        double t = 0;
        for (int k = 0; k < sh; ++k) {
            t += std::uniform_real_distribution<>(0, 5)(rng);
            h.append_flag(rng() & 1, t);
        }
        EXPECT_NEAR(*service_opinion(h, w.long_window, t + 1, w), *competence_belief(h, t + 1, w), 1e-12);
    }
}

TEST(Integrity, Examples) {
    auto w = unit_decay();
    EXPECT_DOUBLE_EQ(*integrity_belief(history_of({1, 1, 1, 1, 1, 1}), 0.0, TrustWeights{}), 0.0);
    // SO_rec = 1, SO_lon = 0.5: five zeros then five ones, long window 10
    w.long_window = 10;
    auto h = history_of({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 0.01);
    EXPECT_NEAR(*integrity_belief(h, 0.1, w), 0.5, 1e-12);
}

TEST(Integrity, LiteralFormReducesToAbsoluteDifference) {
    std::mt19937_64 rng(11);
    TrustWeights w;
    for (int trial = 0; trial < 500; ++trial) {
        InteractionHistory h({node(1), node(0)});
        int sh = 1 + static_cast<int>(rng() % 40);
        double t = 0;
        for (int k = 0; k < sh; ++k) {
            t += std::uniform_real_distribution<>(0, 20)(rng);
            InteractionRecord r;
            r.timestamp = t;
            r.satisfaction = std::uniform_real_distribution<>(0, 1)(rng);
            h.append(r);
        }
        double lon = *service_opinion(h, w.long_window, t, w);
        double rec = *service_opinion(h, w.recent_window, t, w);
        EXPECT_NEAR(*integrity_belief(h, t, w), std::fabs(rec - lon), 1e-12);
    }
}

TEST(Reputation, Examples) {
    std::vector<InteractionHistory> hs;
    hs.push_back(history_of({1, 1, 0}));
    hs.push_back(history_of({0}));
    EXPECT_DOUBLE_EQ(service_reputation(node(0), hs, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(service_reputation(node(9), hs, 0.5), 0.5);
    std::vector<InteractionHistory> good{history_of({1, 1, 1, 1, 1, 1})};
    EXPECT_DOUBLE_EQ(service_reputation(node(0), good, 0.5), 1.0);
}

TEST(Reputation, StoreTallyMatchesScanAndIsOrderInvariant) {
    std::mt19937_64 rng(3);
    std::vector<std::tuple<std::uint32_t, std::uint32_t, bool>> events;
    for (int k = 0; k < 300; ++k) events.emplace_back(rng() % 6, rng() % 4, rng() % 3 != 0);
    auto build = [&](auto evs) {
        HistoryStore s;
        for (auto [rx, relay, g] : evs) s.record({node(rx + 10), node(relay)}, g, 0.0);
        return s;
    };
    auto a = build(events);
    std::shuffle(events.begin(), events.end(), rng);
    auto b = build(events);
    for (std::uint32_t relay = 0; relay < 4; ++relay) {
        double scan = service_reputation(node(relay), a.histories(), 0.5);
        EXPECT_NEAR(a.reputation(node(relay), 0.5), scan, 1e-12);
        EXPECT_NEAR(b.reputation(node(relay), 0.5), scan, 1e-12);
    }
}

TEST(ServiceTrust, EmptyHistoryUsesIndirectOnly) {
    auto s = service_trust(InteractionHistory{}, {0.1, 0.0, 1.0}, 0.5, TrustWeights{}, 0.0);
    EXPECT_NEAR(s.st, 0.2675, 1e-12);
    EXPECT_EQ(s.direct_weight, 0.0);
    EXPECT_EQ(direct_weight(0), 0.0);
    EXPECT_EQ(indirect_weight(0), 1.0);
}

TEST(ServiceTrust, WeightsSumToOne) {
    for (std::size_t sh = 0; sh < 5000; sh += 7) EXPECT_NEAR(direct_weight(sh) + indirect_weight(sh), 1.0, 1e-15);
}

TEST(ServiceTrust, AllGoodHistoryIncreasesTowardOne) {
    TrustWeights w;
    InteractionHistory h({node(1), node(0)});
    double prev = -1;
    for (int sh = 1; sh <= 300; ++sh) {
        h.append_flag(true, sh * 0.01);
        auto s = service_trust(h, {}, 1.0, w, sh * 0.01);
        EXPECT_GT(s.st, prev);
        prev = s.st;
    }
    EXPECT_GT(prev, 0.9);
}

TEST(ServiceTrust, ClampedToUnitInterval) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        TrustWeights w;
        w.beta1 = std::uniform_real_distribution<>(0, 3)(rng);
        w.beta2 = std::uniform_real_distribution<>(0, 3)(rng);
        InteractionHistory h({node(1), node(0)});
        int sh = static_cast<int>(rng() % 30);
        for (int k = 0; k < sh; ++k) h.append_flag(rng() & 1, k);
        auto s = service_trust(h, {1.0, 1.0, 0.0}, std::uniform_real_distribution<>(0, 1)(rng), w, sh);
        EXPECT_GE(s.st, 0.0);
        EXPECT_LE(s.st, 1.0);
    }
}

TEST(ServiceTrust, MatchesIndependentOracle) {
    std::mt19937_64 rng(99);
    TrustWeights w;
    oracle::Weights ow;
    for (int trial = 0; trial < 300; ++trial) {
        InteractionHistory h({node(1), node(0)});
        std::vector<oracle::Rec> oh;
        int sh = static_cast<int>(rng() % 40);
        double t = 0;
        for (int k = 0; k < sh; ++k) {
            t += std::uniform_real_distribution<>(0, 30)(rng);
            InteractionRecord r;
            r.timestamp = t;
            r.satisfaction = (rng() % 4) / 3.0;
            r.importance = 0.25 + 0.75 * std::uniform_real_distribution<>(0, 1)(rng);
            h.append(r);
            oh.push_back({t, r.satisfaction, r.importance});
        }
        double F = 0.5, R = 0.25, I = 0.8, sr = 0.6, now = t + 4;
        auto s = service_trust(h, {F, R, I}, sr, w, now);
        auto o = oracle::evaluate(oh, F, R, I, sr, now, ow);
        EXPECT_NEAR(s.st, o.st, 1e-9);
        EXPECT_NEAR(s.scb, o.scb, 1e-9);
        EXPECT_NEAR(s.sib, o.sib, 1e-9);
    }
}

TEST(Weights, Validation) {
    TrustWeights w;
    EXPECT_NO_THROW(w.validate());
    auto bad = w;
    bad.gamma = 0.6;
    try {
        bad.validate();
        FAIL();
    } catch (const config_error& e) {
        EXPECT_EQ(e.field(), "weights.gamma");
    }
    bad = w.with_decay(0.7, 0.7);
    EXPECT_THROW(bad.validate(), config_error);
    bad = w;
    bad.long_window = 5;
    EXPECT_THROW(bad.validate(), config_error);
    bad = w;
    bad.beta2 = -1;
    EXPECT_THROW(bad.validate(), config_error);
    EXPECT_NO_THROW(w.without_social().validate());
}

TEST(History, AppendAssignsIndicesAndRejectsBadRecords) {
    InteractionHistory h({node(1), node(0)});
    EXPECT_EQ(h.append_flag(true, 1.0).index, 1u);
    EXPECT_EQ(h.append_flag(false, 2.0).index, 2u);
    EXPECT_THROW(h.append_flag(true, 1.5), std::domain_error);
    InteractionRecord r;
    r.timestamp = 3;
    r.satisfaction = 1.2;
    EXPECT_THROW(h.append(r), std::domain_error);
    r.satisfaction = 1;
    r.importance = 0;
    EXPECT_THROW(h.append(r), std::domain_error);
    EXPECT_EQ(h.size(), 2u);
}
