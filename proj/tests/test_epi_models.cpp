#include "doctest.h"

#include <cmath>
#include <random>

#include "epigym/epi_models.hpp"
#include "epigym/error.hpp"

using namespace epigym;

namespace {

void check_conservation(const Trajectory& t) {
    for (const auto& st : t.days) CHECK(std::abs(st.s + st.i + st.r + st.d - st.n) <= 1e-9 * st.n);
}

}  // namespace

TEST_CASE("sird_substep matches the hand-computed Euler update") {
    auto next = sird_substep(CompartmentState::from_counts(990, 10, 0, 0), {0.0, 0.1, 0.0}, 1.0);
    CHECK(next.s == 990.0);
    CHECK(next.i == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(next.r == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(next.d == 0.0);

    next = sird_substep(CompartmentState::from_counts(500, 100, 350, 50), {0.3, 0.1, 0.01}, 0.25);
    CHECK(next.s == doctest::Approx(496.25).epsilon(1e-14));
    CHECK(next.i == doctest::Approx(101.0).epsilon(1e-14));
    CHECK(next.r == doctest::Approx(352.5).epsilon(1e-14));
    CHECK(next.d == doctest::Approx(50.25).epsilon(1e-14));
}

TEST_CASE("zero rates are a fixed point") {
    const auto st = CompartmentState::from_counts(700, 200, 60, 40);
    CHECK(sird_substep(st, {0, 0, 0}, 0.5) == st);
    const auto traj = simulate_sird({0, 0, 0}, st, 30, 4);
    for (const auto& d : traj.days) CHECK(d == st);
}

TEST_CASE("sird_substep rejects unstable steps") {
    const auto st = CompartmentState::from_counts(900, 100, 0, 0);
    CHECK_THROWS_AS(sird_substep(st, {0.1, 0.6, 0.5}, 1.0), Error);
    try {
        sird_substep(st, {20.0, 0.1, 0.0}, 1.0);
        FAIL("expected UnstableStep");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnstableStep);
    }
}

TEST_CASE("disease-free state stays constant") {
    const auto st = CompartmentState::from_counts(1000, 0, 0, 0);
    const auto traj = simulate_sird({0.5, 0.1, 0.01}, st, 50, 4);
    REQUIRE(traj.days.size() == 51);
    for (std::size_t t = 0; t < traj.days.size(); ++t) {
        CHECK(traj.days[t] == st);
        CHECK(traj.cumulative_cases[t] == 0.0);
    }
}

TEST_CASE("coarse Euler tracks the fine-step reference") {
    // Reference values from an independent NumPy implementation of the same update:
    // final S is 27913.25 at 4 substeps/day and 29221.44 at 64 (4.48% apart); final
    // cumulative cases differ by 0.13%.
    const auto init = CompartmentState::from_counts(1e6 - 100, 100, 0, 0);
    const SirdParams p{0.4, 0.1, 0.01};
    const auto coarse = simulate_sird(p, init, 200, 4);
    const auto fine = simulate_sird(p, init, 200, 64);
    const double s_coarse = coarse.days.back().s;
    const double s_fine = fine.days.back().s;
    CHECK(s_coarse == doctest::Approx(27913.249697412586).epsilon(1e-9));
    CHECK(s_fine == doctest::Approx(29221.435951175677).epsilon(1e-9));
    CHECK(std::abs(s_coarse - s_fine) / s_fine <= 0.05);
    CHECK(std::abs(coarse.cumulative_cases.back() - fine.cumulative_cases.back()) / fine.cumulative_cases.back() <= 0.01);
    check_conservation(coarse);
}

TEST_CASE("doubling every rate halves the time axis") {
    const auto init = CompartmentState::from_counts(1e6 - 100, 100, 0, 0);
    const auto slow = simulate_sird({0.4, 0.1, 0.01}, init, 200, 64);
    const auto fast = simulate_sird({0.8, 0.2, 0.02}, init, 100, 64);
    double worst = 0.0;
    double peak = 0.0;
    for (std::size_t t = 0; t <= 100; ++t) {
        worst = std::max(worst, std::abs(fast.cumulative_cases[t] - slow.cumulative_cases[2 * t]));
        peak = std::max(peak, slow.cumulative_cases[2 * t]);
    }
    CHECK(worst / peak <= 0.01);

    // Same products rate * dt: the two runs take identical arithmetic steps.
    const auto fast_matched = simulate_sird({0.8, 0.2, 0.02}, init, 100, 128);
    for (std::size_t t = 0; t <= 100; ++t) CHECK(fast_matched.days[t] == slow.days[2 * t]);
}

TEST_CASE("stringency map endpoints and arithmetic") {
    CHECK(stringency_to_beta(0, {0.4, 0.9}) == 0.4);
    CHECK(stringency_to_beta(99, {0.4, 0.9}) == doctest::Approx(0.04).epsilon(1e-14));
    CHECK(stringency_to_beta(33, {1.0, 0.9}) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK_THROWS_AS(stringency_to_beta(100, {0.4, 0.9}), Error);
    CHECK_THROWS_AS(stringency_to_beta(-1, {0.4, 0.9}), Error);
    double prev = 1e9;
    for (int level = 0; level <= 99; ++level) {
        const double b = stringency_to_beta(level, {0.3, 0.7});
        CHECK(b <= prev);
        CHECK(b >= 0.3 * (1 - 0.7) - 1e-15);
        prev = b;
    }
}

TEST_CASE("higher constant stringency never yields more cases") {
    const auto init = CompartmentState::from_counts(1e6 - 100, 100, 0, 0);
    double prev = -1;
    for (int level = 99; level >= 0; level -= 3) {
        const auto t = simulate_sird({stringency_to_beta(level, {0.3, 0.9}), 0.1, 0.01}, init, 168, 4);
        CHECK(t.cumulative_cases.back() >= prev);
        prev = t.cumulative_cases.back();
    }
}

TEST_CASE("chain binomial: no infection source means no change") {
    const auto st = CompartmentState::from_counts(1000, 0, 20, 5);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const auto t = simulate_chain_binomial({0.5, 0.1, 0.05}, st, 40, seed);
        for (const auto& d : t.days) CHECK(d == st);
    }
}

TEST_CASE("chain binomial: zero transmission drains I and keeps S") {
    const auto st = CompartmentState::from_counts(1000, 50, 0, 0);
    const auto t = simulate_chain_binomial({0.0, 0.2, 0.05}, st, 200, 5);
    for (const auto& d : t.days) CHECK(d.s == 1000.0);
    CHECK(t.days.back().i == 0.0);
    CHECK(t.days.back().r + t.days.back().d == 50.0);
}

TEST_CASE("chain binomial: validation and determinism") {
    const auto st = CompartmentState::from_counts(1000, 10, 0, 0);
    try {
        simulate_chain_binomial({0.3, 0.7, 0.4}, st, 10, 1);
        FAIL("expected InvalidRates");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidRates);
    }
    CHECK_THROWS_AS(simulate_chain_binomial({0.3, 0.1, 0.0}, CompartmentState::from_counts(999.5, 10.5, 0, 0), 10, 1),
                    Error);
    const auto a = simulate_chain_binomial({0.4, 0.1, 0.02}, st, 60, 17);
    const auto b = simulate_chain_binomial({0.4, 0.1, 0.02}, st, 60, 17);
    CHECK(a.days == b.days);
}

TEST_CASE("chain binomial mean follows the deterministic model") {
    const auto init = CompartmentState::from_counts(1e5 - 1000, 1000, 0, 0);
    const SirdParams p{0.3, 0.1, 0.0};
    const double det = simulate_sird(p, init, 60, 4).cumulative_cases.back();
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
        mean += simulate_chain_binomial(p, init, 60, seed).cumulative_cases.back() / 200.0;
    CHECK(std::abs(mean - det) / det <= 0.05);
}

TEST_CASE("random parameters keep conservation and monotonicity") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const double n = std::floor(1e3 + u(rng) * 1e6);
        const double i0 = std::floor(1 + u(rng) * 0.01 * n);
        const auto init = CompartmentState::from_counts(n - i0, i0, 0, 0);
        const SirdParams p{u(rng) * 1.0, u(rng) * 0.4, u(rng) * 0.1};
        for (const auto& traj : {simulate_sird(p, init, 120, 4), simulate_chain_binomial(p, init, 120, trial)}) {
            check_conservation(traj);
            for (std::size_t t = 1; t < traj.days.size(); ++t) {
                CHECK(traj.days[t].s <= traj.days[t - 1].s);
                CHECK(traj.days[t].r >= traj.days[t - 1].r);
                CHECK(traj.days[t].d >= traj.days[t - 1].d);
                CHECK(traj.cumulative_cases[t] >= traj.cumulative_cases[t - 1]);
            }
        }
    }
}
