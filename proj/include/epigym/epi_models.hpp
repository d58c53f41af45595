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
#pragma once

#include <cstdint>
#include <vector>

#include "epigym/sim_core.hpp"

namespace epigym {

/// Population counts at one instant. Deterministic models carry fractional
/// persons; the chain-binomial model keeps integer values.
struct CompartmentState {
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
    double d = 0.0;
    double n = 0.0;

    static CompartmentState from_counts(double s, double i, double r, double d) { return {s, i, r, d, s + i + r + d}; }

    // Throws ConfigInvalid unless n > 0, all counts >= 0 and they sum to n within 1e-9 n.
    void validate() const;
    std::vector<double> fractions() const { return {s / n, i / n, r / n, d / n}; }

    friend bool operator==(const CompartmentState&, const CompartmentState&) = default;
};

// Per-day rates.
struct SirdParams {
    double beta = 0.0;
    double gamma = 0.0;
    double mu = 0.0;
};

/// Effective transmission is base_beta * (1 - kappa * level / 99).
struct StringencyLink {
    double base_beta = 0.3;
    double kappa = 0.9;
};

struct Trajectory {
    std::vector<CompartmentState> days;  // days[0] is the initial state
    std::vector<double> cumulative_cases;

    void push(const CompartmentState& st) {
        days.push_back(st);
        cumulative_cases.push_back(st.n - st.s);
    }
};

/// One explicit Euler step of the SIRD equations
///   S' = -beta S I / N,  I' = beta S I / N - (gamma + mu) I,  R' = gamma I,  D' = mu I.
/// Each flow is subtracted from one compartment and added to another, so the
/// total is preserved up to rounding. Throws UnstableStep when
/// (gamma + mu) dt >= 1, beta (I/N) dt > 1, or S would go negative.
CompartmentState sird_substep(const CompartmentState& state, const SirdParams& params, double dt);

// Advances `days` whole days; returns the state at each day boundary (excluding the start).
std::vector<CompartmentState> advance_sird(CompartmentState state, const SirdParams& params, int days,
                                           int substeps_per_day);

Trajectory simulate_sird(const SirdParams& params, const CompartmentState& init, int days, int substeps_per_day);

double stringency_to_beta(std::int64_t level, const StringencyLink& link);

/// One day of the chain-binomial model: every susceptible is infected with
/// probability 1 - (1 - beta/N)^I, every infectious person recovers with
/// probability gamma or dies with probability mu (exclusive).
CompartmentState chain_binomial_day(const CompartmentState& state, const SirdParams& params, Rng& rng);

std::vector<CompartmentState> advance_chain_binomial(CompartmentState state, const SirdParams& params, int days,
                                                     Rng& rng);

Trajectory simulate_chain_binomial(const SirdParams& params, const CompartmentState& init, int days,
                                   std::uint64_t seed);

}  // namespace epigym
