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
#include "epigym/experiments.hpp"

#include <set>

#include "epigym/envs.hpp"
#include "epigym/error.hpp"
#include "json_get.hpp"

namespace epigym {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Calibrate: return "calibrate";
        case ExperimentKind::OptimizePolicy: return "optimize_policy";
        case ExperimentKind::QLearn: return "qlearn";
    }
    return "unknown";
}

namespace {

ExperimentKind kind_from_string(std::string_view s) {
    if (s == "calibrate") return ExperimentKind::Calibrate;
    if (s == "optimize_policy") return ExperimentKind::OptimizePolicy;
    if (s == "qlearn") return ExperimentKind::QLearn;
    throw Error(ErrorCode::ConfigInvalid, "unknown experiment kind '" + std::string(s) + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return detail::strict_get<T>(j.at(key), key);
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view what) {
    const std::set<std::string_view> allowed(known);
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key))
            throw Error(ErrorCode::ConfigInvalid, "unknown key '" + key + "' in " + std::string(what));
    }
}

std::string algorithm_name(const ExperimentRequest& r) {
    const std::string fallback = r.kind == ExperimentKind::QLearn ? "qlearn" : "bo";
    return get_or<std::string>(r.algorithm, "name", fallback);
}

std::vector<std::int64_t> policy_levels(const json& algorithm) {
    auto levels = get_or<std::vector<std::int64_t>>(algorithm, "levels", default_policy_levels());
    if (levels.empty()) throw Error(ErrorCode::ConfigInvalid, "levels must not be empty");
    return levels;
}

json strip_volatile(json history) {
    for (auto& rec : history) {
        rec.erase("run_id");
        rec.erase("timestamp");
    }
    return history;
}

}  // namespace

std::vector<std::int64_t> default_policy_levels() { return {0, 33, 66, 99}; }

BOConfig bo_config_from_json(const json& a, std::uint64_t seed) {
    BOConfig c;
    c.budget = get_or(a, "budget", c.budget);
    c.init_random = get_or(a, "init_random", std::min(c.init_random, std::max(1, c.budget - 1)));
    c.ucb_beta = get_or(a, "ucb_beta", c.ucb_beta);
    c.candidate_count = get_or(a, "candidate_count", c.candidate_count);
    c.seed = seed;
    if (c.budget < 2) throw Error(ErrorCode::BudgetTooSmall, "bayes_opt needs a budget of at least 2");
    if (c.init_random < 1 || c.init_random >= c.budget)
        throw Error(ErrorCode::ConfigInvalid, "init_random must satisfy 1 <= init_random < budget");
    if (!(c.ucb_beta > 0)) throw Error(ErrorCode::ConfigInvalid, "ucb_beta must be positive");
    if (c.candidate_count < 1) throw Error(ErrorCode::ConfigInvalid, "candidate_count must be positive");
    return c;
}

QLearnConfig qlearn_config_from_json(const json& a, std::uint64_t seed) {
    QLearnConfig c;
    c.episodes = get_or(a, "episodes", c.episodes);
    c.learning_rate = get_or(a, "learning_rate", c.learning_rate);
    c.discount = get_or(a, "discount", c.discount);
    c.epsilon_start = get_or(a, "epsilon_start", c.epsilon_start);
    c.epsilon_end = get_or(a, "epsilon_end", c.epsilon_end);
    c.seed = seed;
    c.validate();
    return c;
}

DiscretizerConfig discretizer_config_from_json(const json& a) {
    DiscretizerConfig d;
    d.bins_per_dim = get_or(a, "bins_per_dim", d.bins_per_dim);
    d.action_stride = get_or(a, "action_stride", d.action_stride);
    if (d.bins_per_dim < 1 || d.action_stride < 1)
        throw Error(ErrorCode::ConfigInvalid, "bins_per_dim and action_stride must be positive");
    return d;
}

ExperimentRequest ExperimentRequest::from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "experiment request must be a JSON object");
    reject_unknown(j, {"kind", "env_type", "env_config", "algorithm", "seed"}, "experiment request");
    ExperimentRequest r;
    r.kind = kind_from_string(get_or<std::string>(j, "kind", "calibrate"));
    r.env_type = get_or<std::string>(j, "env_type", r.kind == ExperimentKind::Calibrate ? "calibration" : "policy");
    if (j.contains("env_config")) r.env_config = j["env_config"];
    if (j.contains("algorithm")) r.algorithm = j["algorithm"];
    r.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (!r.env_config.is_object()) throw Error(ErrorCode::ConfigInvalid, "env_config must be an object");
    if (!r.algorithm.is_object()) throw Error(ErrorCode::ConfigInvalid, "algorithm must be an object");
    r.validate();
    return r;
}

json ExperimentRequest::to_json() const {
    return {{"kind", epigym::to_string(kind)}, {"env_type", env_type}, {"env_config", env_config},
            {"algorithm", algorithm},          {"seed", seed}};
}

void ExperimentRequest::validate() const {
    if (kind == ExperimentKind::Calibrate && env_type != "calibration")
        throw Error(ErrorCode::ConfigInvalid, "calibrate experiments need env_type 'calibration'");
    if (kind != ExperimentKind::Calibrate && env_type != "policy" && env_type != "cost")
        throw Error(ErrorCode::ConfigInvalid, "policy experiments need env_type 'policy' or 'cost'");
    make_environment(env_type, env_config);

    const auto name = algorithm_name(*this);
    switch (kind) {
        case ExperimentKind::Calibrate:
            reject_unknown(algorithm, {"name", "budget", "init_random", "ucb_beta", "candidate_count"}, "algorithm");
            if (name == "bo") {
                bo_config_from_json(algorithm, seed);
            } else if (name == "random") {
                if (get_or(algorithm, "budget", 20) < 1) throw Error(ErrorCode::BudgetTooSmall, "budget must be positive");
            } else {
                throw Error(ErrorCode::ConfigInvalid, "calibration algorithm must be 'bo' or 'random'");
            }
            break;
        case ExperimentKind::OptimizePolicy:
            reject_unknown(algorithm, {"name", "budget", "init_random", "ucb_beta", "candidate_count", "levels"},
                           "algorithm");
            policy_levels(algorithm);
            if (name == "bo") {
                bo_config_from_json(algorithm, seed);
            } else if (name == "random") {
                if (get_or(algorithm, "budget", 20) < 1) throw Error(ErrorCode::BudgetTooSmall, "budget must be positive");
            } else if (name != "exhaustive") {
                throw Error(ErrorCode::ConfigInvalid, "policy algorithm must be 'bo', 'random' or 'exhaustive'");
            }
            break;
        case ExperimentKind::QLearn:
            reject_unknown(algorithm,
                           {"name", "episodes", "learning_rate", "discount", "epsilon_start", "epsilon_end",
                            "bins_per_dim", "action_stride"},
                           "algorithm");
            if (name != "qlearn") throw Error(ErrorCode::ConfigInvalid, "qlearn experiments use algorithm 'qlearn'");
            qlearn_config_from_json(algorithm, seed);
            discretizer_config_from_json(algorithm);
            break;
    }
}

json run_experiment(const ExperimentRequest& request, const Ledger* ledger, bool include_volatile) {
    request.validate();
    const auto name = algorithm_name(request);
    json out = {{"kind", to_string(request.kind)}, {"algorithm", name}, {"seed", request.seed}};

    if (request.kind == ExperimentKind::QLearn) {
        auto env = make_environment(request.env_type, request.env_config);
        const auto dcfg = discretizer_config_from_json(request.algorithm);
        const auto qcfg = qlearn_config_from_json(request.algorithm, request.seed);
        auto trained = q_learn(*env, dcfg, qcfg, ledger);
        const auto rollout = run_episode(*env, trained.policy, request.seed);
        json levels = json::array();
        for (const auto& a : rollout.actions) levels.push_back(a.level());
        json hist = json::array();
        for (const auto& rec : trained.history) hist.push_back(rec.to_json());
        out["greedy_policy_levels"] = levels;
        out["greedy_total_reward"] = rollout.total_reward;
        out["history"] = include_volatile ? hist : strip_volatile(hist);
        out["q_table"] = trained.table.to_json();
        return out;
    }

    std::unique_ptr<Environment> env = make_environment(request.env_type, request.env_config);
    OpenLoopPolicyEnv* open_loop = nullptr;
    if (request.kind == ExperimentKind::OptimizePolicy) {
        auto wrapped = std::make_unique<OpenLoopPolicyEnv>(std::move(env), policy_levels(request.algorithm));
        open_loop = wrapped.get();
        env = std::move(wrapped);
    }

    BestResult result;
    if (name == "bo") {
        result = bayes_opt(*env, bo_config_from_json(request.algorithm, request.seed), ledger);
    } else if (name == "random") {
        result = random_search(*env, get_or(request.algorithm, "budget", 20), request.seed, ledger);
    } else {
        result = exhaustive_search(*env, kFullEnumerationLimit, request.seed, ledger);
    }
    out.update(result.to_json(include_volatile));

    if (auto* cal = dynamic_cast<CalibrationEnv*>(env.get())) {
        const auto params = cal->denormalize(result.best_action.vector());
        const auto names = calibration_parameter_names(cal->config().model_kind);
        json best = json::object();
        for (std::size_t k = 0; k < names.size(); ++k) best[names[k]] = params[k];
        out["best_parameters"] = best;
        out["best_curve"] = cal->simulate_curve(params, request.seed);
    }
    if (open_loop) {
        out["best_policy_levels"] = open_loop->decode(result.best_action);
    }
    return out;
}

}  // namespace epigym
