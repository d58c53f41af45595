#include "doctest.h"

#include <cmath>

#include "epigym/envs.hpp"
#include "epigym/error.hpp"
#include "epigym/rl.hpp"
#include "epigym/search.hpp"
#include "temp_path.hpp"
#include "toy_envs.hpp"

using namespace epigym;
using epigym::testing::TempPath;
using epigym::testing::TwoStepToyEnv;

namespace {

std::vector<std::int64_t> stride_levels() {
    std::vector<std::int64_t> out;
    for (std::int64_t l = 0; l <= 90; l += 10) out.push_back(l);
    return out;
}

std::vector<std::int64_t> greedy_rollout(Environment& env, const Policy& policy) {
    std::vector<std::int64_t> out;
    for (const auto& a : run_episode(env, policy, 0).actions) out.push_back(a.level());
    return out;
}

}  // namespace

TEST_CASE("discretize buckets") {
    DiscretizerConfig d;
    CHECK(discretize({0, 0, 0, 0}, d) == StateBucket{0, 0, 0, 0});
    CHECK(discretize({1.0}, d) == StateBucket{9});
    CHECK(discretize({0.35}, d) == StateBucket{3});
    d.bins_per_dim = 4;
    CHECK(discretize({0.25, 0.9999, 0.5}, d) == StateBucket{1, 3, 2});
    try {
        discretize({1.0 + 1e-12}, DiscretizerConfig{});
        FAIL("expected ComponentOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ComponentOutOfRange);
    }
    CHECK_THROWS_AS(discretize({-0.1}, DiscretizerConfig{}), Error);
}

TEST_CASE("action levels follow the stride") {
    CHECK(action_levels(ActionSpace::discrete(0, 99), DiscretizerConfig{}) == stride_levels());
    DiscretizerConfig d;
    d.action_stride = 33;
    CHECK(action_levels(ActionSpace::discrete(0, 99), d) == std::vector<std::int64_t>{0, 33, 66, 99});
    d.action_stride = 1;
    CHECK(action_levels(ActionSpace::discrete(3, 5), d) == std::vector<std::int64_t>{3, 4, 5});
}

TEST_CASE("q_update arithmetic") {
    QLearnConfig cfg;
    const StateBucket s{1}, s2{2};
    QTable q(stride_levels());

    cfg.discount = 0.0;
    cfg.learning_rate = 1.0;
    q_update(q, s, 30, 2.5, s2, false, cfg);
    CHECK(q.value(s, 30) == 2.5);
    CHECK(q.visits(s, 30) == 1);

    QTable zero(stride_levels());
    q_update(zero, s, 10, 0.0, s2, false, QLearnConfig{});
    CHECK(zero.value(s, 10) == 0.0);
    CHECK(zero.max_value(s2) == 0.0);

    QTable t(stride_levels());
    t.set(s, 40, 1.0);
    t.set(s2, 70, 2.0);
    cfg.learning_rate = 0.5;
    cfg.discount = 0.9;
    q_update(t, s, 40, 0.5, s2, false, cfg);
    CHECK(t.value(s, 40) == doctest::Approx(1.65).epsilon(1e-15));
    // Terminal transitions ignore the successor.
    t.set(s, 40, 1.0);
    q_update(t, s, 40, 0.5, s2, true, cfg);
    CHECK(t.value(s, 40) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(t.visits(s, 40) == 2);
}

TEST_CASE("greedy policy tie-breaks and defaults") {
    DiscretizerConfig d;
    QTable empty(stride_levels());
    const auto p0 = greedy_policy(empty, d);
    CHECK(p0(0, {0.3, 0.3}).level() == 0);

    QTable single(stride_levels());
    single.set({3}, 30, 1.0);
    CHECK(greedy_policy(single, d)(0, {0.35}).level() == 30);

    QTable tie(stride_levels());
    tie.set({3}, 10, 2.0);
    tie.set({3}, 20, 2.0);
    CHECK(greedy_policy(tie, d)(0, {0.35}).level() == 10);
    CHECK(greedy_policy(tie, d)(0, {0.95}).level() == 0);
}

TEST_CASE("q-learning solves the two-step toy problem") {
    TwoStepToyEnv toy;
    OpenLoopPolicyEnv wrapped(std::make_unique<TwoStepToyEnv>(), stride_levels());
    const auto oracle = exhaustive_search(wrapped, 100);
    const auto optimum = wrapped.decode(oracle.best_action.level());
    CHECK(optimum == std::vector<std::int64_t>{0, 90});
    CHECK(oracle.best_reward == 2.0);

    int solved = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        QLearnConfig cfg;
        cfg.seed = seed;
        const auto result = q_learn(toy, DiscretizerConfig{}, cfg);
        CHECK(result.history.size() == 500);
        if (greedy_rollout(toy, result.policy) == optimum) ++solved;
        // Rewards are at most 1 per step, so values stay below 1/(1 - discount).
        for (const auto& [state, values] : result.table.entries())
            for (double v : values) CHECK(std::abs(v) <= 1.0 / (1.0 - cfg.discount));
    }
    MESSAGE("solved in " << solved << "/10 seeds");
    CHECK(solved >= 9);
}

TEST_CASE("pure exploitation starts from the earliest level") {
    TwoStepToyEnv toy;
    QLearnConfig cfg;
    cfg.episodes = 3;
    cfg.epsilon_start = cfg.epsilon_end = 0.0;
    const auto result = q_learn(toy, DiscretizerConfig{}, cfg);
    CHECK(result.history[0].action == nlohmann::json::array({0, 0}));
    CHECK(result.history[0].reward == 1.0);
}

TEST_CASE("pre-seeded optimal table reproduces the optimal rollout") {
    TwoStepToyEnv toy;
    QTable q(stride_levels());
    q.set({0}, 0, 2.0);
    q.set({5}, 90, 1.0);
    CHECK(greedy_rollout(toy, greedy_policy(q, DiscretizerConfig{})) == std::vector<std::int64_t>{0, 90});
}

TEST_CASE("q-learning is deterministic and logs every episode") {
    PolicyEnvConfig pc;
    pc.horizon = 4;
    auto env = make_policy_env(pc);
    QLearnConfig cfg;
    cfg.episodes = 25;
    cfg.seed = 6;
    TempPath path("rl_ledger");
    Ledger ledger(path.path());
    const auto a = q_learn(*env, DiscretizerConfig{}, cfg, &ledger);
    const auto b = q_learn(*env, DiscretizerConfig{}, cfg);
    CHECK(a.table == b.table);
    CHECK(a.table.to_json() == b.table.to_json());
    const auto stored = query_ledger(path.path());
    REQUIRE(stored.records.size() == 25);
    CHECK(stored.records[0].algorithm == "q_learning");
    CHECK(stored.records[0].env_type == "policy");
    CHECK(stored.records[0].action.size() == 4);
}

TEST_CASE("q-learning config validation") {
    QLearnConfig cfg;
    cfg.epsilon_end = 0.9;
    cfg.epsilon_start = 0.1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = QLearnConfig{};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = QLearnConfig{};
    cfg.episodes = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
