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
#include <optional>
#include <vector>

#include "epigym/data_io.hpp"
#include "epigym/gp.hpp"
#include "epigym/sim_core.hpp"

namespace epigym {

struct BOConfig {
    int budget = 20;
    int init_random = 5;
    double ucb_beta = 4.0;
    int candidate_count = 2000;
    std::uint64_t seed = 0;
    std::vector<GPHyperparams> hyper_grid = default_hyper_grid();
};

struct BestResult {
    Action best_action;
    double best_reward = 0.0;
    std::vector<EvalRecord> history;

    // Bayesian optimization only: argmax of the final posterior mean.
    std::optional<Action> surrogate_best_action;
    std::optional<double> surrogate_best_mean;

    // Drops run_id and timestamp from the history so equal-seed runs compare equal.
    nlohmann::json to_json(bool include_volatile = true) const;
};

/// Sequential GP-UCB over the environment's action space. Environments must
/// have horizon 1; wrap multi-step environments in OpenLoopPolicyEnv.
///
/// The first init_random actions are uniform draws (without replacement when
/// the discrete space is no larger than the budget). Afterwards each action
/// maximizes the UCB score over either the whole discrete space minus already
/// evaluated points (spaces up to 10^4 elements) or candidate_count fresh
/// uniform samples plus every evaluated point. Hyperparameters are refit by
/// grid search before every acquisition. Every evaluation resets with
/// config.seed and is appended to `ledger` when given.
BestResult bayes_opt(Environment& env, const BOConfig& config, const Ledger* ledger = nullptr);

// Uniform draws; discrete spaces no larger than the budget are covered without replacement first.
BestResult random_search(Environment& env, int budget, std::uint64_t seed, const Ledger* ledger = nullptr);

// Every element of a discrete space, in index order; throws SpaceTooLarge above max_enumeration.
BestResult exhaustive_search(Environment& env, std::uint64_t max_enumeration, std::uint64_t seed = 0,
                             const Ledger* ledger = nullptr);

inline constexpr std::uint64_t kFullEnumerationLimit = 10000;

}  // namespace epigym
