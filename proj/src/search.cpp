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
#include "epigym/search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "epigym/error.hpp"

namespace epigym {

nlohmann::json BestResult::to_json(bool include_volatile) const {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& rec : history) {
        auto j = rec.to_json();
        if (!include_volatile) {
            j.erase("run_id");
            j.erase("timestamp");
        }
        hist.push_back(std::move(j));
    }
    nlohmann::json out = {{"best_action", best_action.to_json()}, {"best_reward", best_reward}, {"history", hist}};
    if (surrogate_best_action) {
        out["surrogate_best_action"] = surrogate_best_action->to_json();
        out["surrogate_best_mean"] = *surrogate_best_mean;
        out["surrogate_matches_evaluated"] = *surrogate_best_action == best_action;
    }
    return out;
}

namespace {

// Runs one single-step episode per action and keeps the evaluated argmax.
class Evaluator {
public:
    Evaluator(Environment& env, std::string algorithm, std::uint64_t seed, const Ledger* ledger)
        : env_(env), algorithm_(std::move(algorithm)), seed_(seed), ledger_(ledger) {
        if (env.horizon() != 1)
            throw Error(ErrorCode::ConfigInvalid,
                        "search needs single-step episodes; wrap multi-step environments in OpenLoopPolicyEnv");
        const auto desc = env.describe();
        env_type_ = desc.env_type;
        digest_ = config_digest(desc.config);
    }

    double operator()(const Action& a) {
        env_.reset(seed_);
        const StepResult r = env_.step(a);

        EvalRecord rec;
        rec.run_id = new_uuid();
        rec.env_type = env_type_;
        rec.config_digest = digest_;
        rec.algorithm = algorithm_;
        rec.seed = seed_;
        rec.action = a.to_json();
        rec.reward = r.reward;
        rec.info_summary = r.info;
        rec.timestamp = utc_timestamp_now();
        if (ledger_) ledger_->append(rec);
        result_.history.push_back(std::move(rec));

        if (result_.history.size() == 1 || r.reward > result_.best_reward) {
            result_.best_reward = r.reward;
            result_.best_action = a;
        }
        return r.reward;
    }

    BestResult& result() { return result_; }

private:
    Environment& env_;
    std::string algorithm_;
    std::uint64_t seed_;
    const Ledger* ledger_;
    std::string env_type_;
    std::string digest_;
    BestResult result_;
};

std::vector<std::uint64_t> shuffled_indices(std::uint64_t count, Rng& rng) {
    std::vector<std::uint64_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::uint64_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

GPPosterior fit_surrogate(const std::vector<std::vector<double>>& features, const std::vector<double>& rewards,
                          const std::vector<GPHyperparams>& grid) {
    const Eigen::MatrixXd x = to_matrix(features);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(rewards.data(), static_cast<Eigen::Index>(rewards.size()));
    const GPHyperparams hyper = rewards.size() >= 2 ? fit_hyperparams(x, y, grid) : grid.front();
    return gp_fit(x, y, hyper);
}

}  // namespace

BestResult bayes_opt(Environment& env, const BOConfig& config, const Ledger* ledger) {
    if (config.budget < 2) throw Error(ErrorCode::BudgetTooSmall, "bayes_opt needs a budget of at least 2");
    if (config.init_random < 1 || config.init_random >= config.budget)
        throw Error(ErrorCode::ConfigInvalid, "init_random must satisfy 1 <= init_random < budget");
    if (!(config.ucb_beta > 0)) throw Error(ErrorCode::ConfigInvalid, "ucb_beta must be positive");
    if (config.candidate_count < 1) throw Error(ErrorCode::ConfigInvalid, "candidate_count must be positive");
    if (config.hyper_grid.empty()) throw Error(ErrorCode::ConfigInvalid, "hyperparameter grid is empty");

    Evaluator evaluate(env, "bayes_opt", config.seed, ledger);
    const ActionSpace& space = env.action_space();
    Rng rng(config.seed);
    const auto budget = static_cast<std::size_t>(config.budget);

    const bool enumerable = space.is_discrete() && space.size() <= kFullEnumerationLimit;
    std::vector<std::vector<double>> all_features;
    std::vector<bool> seen;
    if (enumerable) {
        all_features.reserve(space.size());
        for (std::uint64_t k = 0; k < space.size(); ++k) all_features.push_back(env.action_features(space.at(k)));
        seen.assign(space.size(), false);
    }

    std::vector<Action> actions;
    std::vector<std::vector<double>> features;
    std::vector<double> rewards;
    auto run = [&](const Action& a) {
        rewards.push_back(evaluate(a));
        features.push_back(env.action_features(a));
        actions.push_back(a);
        if (enumerable) seen[space.index_of(a)] = true;
    };

    // Random initialization.
    if (space.is_discrete() && space.size() <= budget) {
        const auto order = shuffled_indices(space.size(), rng);
        for (int k = 0; k < config.init_random; ++k) run(space.at(order[static_cast<std::size_t>(k) % order.size()]));
    } else {
        for (int k = 0; k < config.init_random; ++k) run(sample_action(space, rng));
    }

    // Acquisition-driven evaluations.
    for (std::size_t i = actions.size(); i < budget; ++i) {
        const GPPosterior post = fit_surrogate(features, rewards, config.hyper_grid);

        std::optional<Action> best;
        double best_score = -std::numeric_limits<double>::infinity();
        auto consider = [&](const Action& a, const std::vector<double>& f) {
            const double score = ucb_acquisition(post, f, config.ucb_beta);
            if (!best || score > best_score) {
                best = a;
                best_score = score;
            }
        };

        if (enumerable) {
            const bool exhausted = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
            for (std::uint64_t k = 0; k < space.size(); ++k) {
                if (!exhausted && seen[k]) continue;
                consider(space.at(k), all_features[k]);
            }
        } else {
            for (int c = 0; c < config.candidate_count; ++c) {
                const Action a = sample_action(space, rng);
                consider(a, env.action_features(a));
            }
            for (std::size_t k = 0; k < actions.size(); ++k) consider(actions[k], features[k]);
        }
        run(*best);
    }

    // Surrogate argmax, reported alongside the evaluated argmax.
    BestResult& result = evaluate.result();
    const GPPosterior post = fit_surrogate(features, rewards, config.hyper_grid);
    double best_mean = -std::numeric_limits<double>::infinity();
    auto consider_mean = [&](const Action& a, const std::vector<double>& f) {
        const double m = gp_predict(post, f).mean;
        if (!result.surrogate_best_action || m > best_mean) {
            result.surrogate_best_action = a;
            best_mean = m;
        }
    };
    if (enumerable) {
        for (std::uint64_t k = 0; k < space.size(); ++k) consider_mean(space.at(k), all_features[k]);
    } else {
        for (std::size_t k = 0; k < actions.size(); ++k) consider_mean(actions[k], features[k]);
        for (int c = 0; c < config.candidate_count; ++c) {
            const Action a = sample_action(space, rng);
            consider_mean(a, env.action_features(a));
        }
    }
    result.surrogate_best_mean = best_mean;
    return std::move(result);
}

BestResult random_search(Environment& env, int budget, std::uint64_t seed, const Ledger* ledger) {
    if (budget < 1) throw Error(ErrorCode::BudgetTooSmall, "random_search needs a budget of at least 1");
    Evaluator evaluate(env, "random_search", seed, ledger);
    const ActionSpace& space = env.action_space();
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(budget);
    if (space.is_discrete() && space.size() <= n) {
        for (auto k : shuffled_indices(space.size(), rng)) evaluate(space.at(k));
        for (std::size_t k = space.size(); k < n; ++k) evaluate(sample_action(space, rng));
    } else {
        for (std::size_t k = 0; k < n; ++k) evaluate(sample_action(space, rng));
    }
    return std::move(evaluate.result());
}

BestResult exhaustive_search(Environment& env, std::uint64_t max_enumeration, std::uint64_t seed, const Ledger* ledger) {
    const ActionSpace& space = env.action_space();
    if (!space.is_discrete()) throw Error(ErrorCode::SpaceTooLarge, "exhaustive_search needs a discrete space");
    if (space.size() > max_enumeration)
        throw Error(ErrorCode::SpaceTooLarge, "space of " + std::to_string(space.size()) + " actions exceeds limit " +
                                                  std::to_string(max_enumeration));
    Evaluator evaluate(env, "exhaustive_search", seed, ledger);
    for (std::uint64_t k = 0; k < space.size(); ++k) evaluate(space.at(k));
    return std::move(evaluate.result());
}

}  // namespace epigym
