/*
 * Copyright 2026 The epigym Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "epigym/epi_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epigym/error.hpp"

namespace epigym {

void CompartmentState::validate() const {
    if (!(n > 0) || !std::isfinite(n)) throw Error(ErrorCode::ConfigInvalid, "population must be positive");
    if (s < 0 || i < 0 || r < 0 || d < 0) throw Error(ErrorCode::ConfigInvalid, "compartments must be nonnegative");
    if (std::abs(s + i + r + d - n) > 1e-9 * n)
        throw Error(ErrorCode::ConfigInvalid, "compartments must sum to the population");
}

namespace {

void check_rates(const SirdParams& p) {
    if (!(p.beta >= 0) || !(p.gamma >= 0) || !(p.mu >= 0) || !std::isfinite(p.beta) || !std::isfinite(p.gamma) ||
        !std::isfinite(p.mu))
        throw Error(ErrorCode::InvalidRates, "rates must be finite and nonnegative");
}

bool is_integral(double v) { return std::floor(v) == v; }

}  // namespace

CompartmentState sird_substep(const CompartmentState& state, const SirdParams& params, double dt) {
    check_rates(params);
    if (!(dt > 0)) throw Error(ErrorCode::UnstableStep, "substep length must be positive");
    if ((params.gamma + params.mu) * dt >= 1.0)
        throw Error(ErrorCode::UnstableStep, "(gamma + mu) * dt must be below 1");
    const double force = params.beta * (state.i / state.n) * dt;
    if (force > 1.0) throw Error(ErrorCode::UnstableStep, "beta * (I/N) * dt exceeds 1");

    const double infections = force * state.s;
    const double recoveries = params.gamma * state.i * dt;
    const double deaths = params.mu * state.i * dt;

    CompartmentState next = state;
    next.s = state.s - infections;
    next.i = state.i + infections - recoveries - deaths;
    next.r = state.r + recoveries;
    next.d = state.d + deaths;
    if (next.s < 0 || next.i < 0) throw Error(ErrorCode::UnstableStep, "compartment would become negative");
    return next;
}

std::vector<CompartmentState> advance_sird(CompartmentState state, const SirdParams& params, int days,
                                           int substeps_per_day) {
    if (substeps_per_day < 1) throw Error(ErrorCode::ConfigInvalid, "substeps_per_day must be positive");
    if (days < 0) throw Error(ErrorCode::ConfigInvalid, "days must be nonnegative");
    const double dt = 1.0 / substeps_per_day;
    std::vector<CompartmentState> out;
    out.reserve(static_cast<std::size_t>(days));
    for (int day = 0; day < days; ++day) {
        for (int k = 0; k < substeps_per_day; ++k) state = sird_substep(state, params, dt);
        out.push_back(state);
    }
    return out;
}

Trajectory simulate_sird(const SirdParams& params, const CompartmentState& init, int days, int substeps_per_day) {
    if (days < 1) throw Error(ErrorCode::ConfigInvalid, "days must be positive");
    init.validate();
    Trajectory traj;
    traj.push(init);
    for (const auto& st : advance_sird(init, params, days, substeps_per_day)) traj.push(st);
    return traj;
}

double stringency_to_beta(std::int64_t level, const StringencyLink& link) {
    if (level < 0 || level > 99)
        throw Error(ErrorCode::LevelOutOfRange, "stringency level " + std::to_string(level) + " outside [0,99]");
    if (!(link.kappa >= 0 && link.kappa <= 1)) throw Error(ErrorCode::ConfigInvalid, "kappa must lie in [0,1]");
    if (!(link.base_beta >= 0)) throw Error(ErrorCode::ConfigInvalid, "base_beta must be nonnegative");
    return link.base_beta * (1.0 - link.kappa * static_cast<double>(level) / 99.0);
}

CompartmentState chain_binomial_day(const CompartmentState& state, const SirdParams& params, Rng& rng) {
    check_rates(params);
    if (params.gamma + params.mu > 1.0) throw Error(ErrorCode::InvalidRates, "gamma + mu must not exceed 1");
    if (params.beta > state.n) throw Error(ErrorCode::InvalidRates, "beta / N must not exceed 1");

    const auto s = static_cast<std::int64_t>(state.s);
    const auto i = static_cast<std::int64_t>(state.i);

    // 1 - (1 - beta/N)^I without cancellation for small beta/N
    const double p_inf = i > 0 ? -std::expm1(static_cast<double>(i) * std::log1p(-params.beta / state.n)) : 0.0;
    std::int64_t infected = 0;
    if (s > 0 && p_inf > 0) infected = std::binomial_distribution<std::int64_t>(s, std::min(p_inf, 1.0))(rng);

    std::int64_t recovered = 0;
    std::int64_t died = 0;
    if (i > 0 && params.gamma > 0) recovered = std::binomial_distribution<std::int64_t>(i, params.gamma)(rng);
    if (i - recovered > 0 && params.mu > 0 && params.gamma < 1.0) {
        const double p_death = std::min(1.0, params.mu / (1.0 - params.gamma));
        died = std::binomial_distribution<std::int64_t>(i - recovered, p_death)(rng);
    }

    CompartmentState next = state;
    next.s = static_cast<double>(s - infected);
    next.i = static_cast<double>(i + infected - recovered - died);
    next.r = state.r + static_cast<double>(recovered);
    next.d = state.d + static_cast<double>(died);
    return next;
}

std::vector<CompartmentState> advance_chain_binomial(CompartmentState state, const SirdParams& params, int days,
                                                     Rng& rng) {
    if (days < 0) throw Error(ErrorCode::ConfigInvalid, "days must be nonnegative");
    std::vector<CompartmentState> out;
    out.reserve(static_cast<std::size_t>(days));
    for (int day = 0; day < days; ++day) {
        state = chain_binomial_day(state, params, rng);
        out.push_back(state);
    }
    return out;
}

Trajectory simulate_chain_binomial(const SirdParams& params, const CompartmentState& init, int days,
                                   std::uint64_t seed) {
    if (days < 1) throw Error(ErrorCode::ConfigInvalid, "days must be positive");
    check_rates(params);
    if (params.gamma + params.mu > 1.0) throw Error(ErrorCode::InvalidRates, "gamma + mu must not exceed 1");
    init.validate();
    if (!is_integral(init.s) || !is_integral(init.i) || !is_integral(init.r) || !is_integral(init.d))
        throw Error(ErrorCode::ConfigInvalid, "chain-binomial model needs integer counts");
    Rng rng(seed);
    Trajectory traj;
    traj.push(init);
    for (const auto& st : advance_chain_binomial(init, params, days, rng)) traj.push(st);
    return traj;
}

}  // namespace epigym
