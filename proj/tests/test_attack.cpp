#include <gtest/gtest.h>

#include "setd2d/attack.hpp"

using namespace setd2d;
using namespace setd2d::attack;

TEST(Attack, ConsecutiveFinalPhase) {
    AttackProfile p{node(0), OnOffConsecutive{0.3, Phase::final, 100}};
    for (std::uint32_t r = 1; r <= 100; ++r)
        EXPECT_EQ(decide(p, r, node(1)), r <= 70 ? Decision::honest : Decision::tamper) << r;
}

TEST(Attack, ConsecutiveInitialPhase) {
    AttackProfile p{node(0), OnOffConsecutive{0.5, Phase::initial, 100}};
    for (std::uint32_t r = 1; r <= 100; ++r) EXPECT_EQ(decide(p, r, node(1)), r <= 50 ? Decision::tamper : Decision::honest);
}

TEST(Attack, RealizedRateWithinOneRound) {
    for (std::uint32_t n : {1u, 7u, 10u, 33u, 100u, 101u})
        for (double rate : {0.0, 0.1, 0.3, 0.5, 0.8, 0.99, 1.0})
            for (auto phase : {Phase::initial, Phase::final}) {
                AttackProfile c{node(0), OnOffConsecutive{rate, phase, n}};
                AttackProfile i{node(0), OnOffIrregular(5, rate, n)};
                int tc = 0, ti = 0;
                for (std::uint32_t r = 1; r <= n; ++r) {
                    tc += decide(c, r, node(1)) == Decision::tamper;
                    ti += decide(i, r, node(1)) == Decision::tamper;
                }
                EXPECT_LE(std::abs(tc / double(n) - rate), 1.0 / n + 1e-12);
                EXPECT_LE(std::abs(ti / double(n) - rate), 1.0 / n + 1e-12);
            }
}

TEST(Attack, SelectiveOnlyHitsVictims) {
    AttackProfile p{node(0), ReceiverSelective{{node(3), node(5)}}};
    for (std::uint32_t r = 1; r <= 50; ++r) {
        EXPECT_EQ(decide(p, r, node(3)), Decision::tamper);
        EXPECT_EQ(decide(p, r, node(5)), Decision::tamper);
        EXPECT_EQ(decide(p, r, node(4)), Decision::honest);
    }
}

TEST(Attack, PeriodicAlternates) {
    AttackProfile p{node(0), OnOffPeriodic{10}};
    for (std::uint32_t r = 1; r <= 60; ++r)
        EXPECT_EQ(decide(p, r, node(1)), ((r - 1) / 10) % 2 ? Decision::tamper : Decision::honest);
}

TEST(Attack, IrregularSeededAndRepeating) {
    OnOffIrregular a(11, 0.5, 40), b(11, 0.5, 40), c(12, 0.5, 40);
    EXPECT_EQ(a.schedule(), b.schedule());
    EXPECT_NE(a.schedule(), c.schedule());
    for (std::uint32_t r = 1; r <= 40; ++r) EXPECT_EQ(a.tamper(r), a.tamper(r + 40));
    // not a single block: at least two separate tamper runs
    int runs = 0;
    for (std::size_t k = 0; k < 40; ++k) runs += a.schedule()[k] && (k == 0 || !a.schedule()[k - 1]);
    EXPECT_GE(runs, 2);
}

TEST(Attack, HonestAndAlwaysTamper) {
    for (std::uint32_t r = 1; r < 30; ++r) {
        EXPECT_EQ(decide(honest(node(0)), r, node(1)), Decision::honest);
        EXPECT_EQ(decide(always_tamper(node(0)), r, node(1)), Decision::tamper);
    }
    EXPECT_FALSE(honest(node(0)).malicious());
    EXPECT_TRUE(always_tamper(node(0)).malicious());
}

TEST(Attack, RoundZeroIsDomainError) { EXPECT_THROW(decide(honest(node(0)), 0, node(1)), std::domain_error); }

TEST(Attack, Validation) {
    EXPECT_THROW(validate({node(0), OnOffConsecutive{1.5, Phase::final, 10}}), config_error);
    EXPECT_THROW(validate({node(0), OnOffPeriodic{0}}), config_error);
    EXPECT_THROW(validate({node(0), ReceiverSelective{{node(5), node(2)}}}), config_error);
    EXPECT_THROW(OnOffIrregular(1, -0.1, 10), config_error);
    EXPECT_EQ(kind_name({node(0), OnOffPeriodic{3}}), "periodic");
}
