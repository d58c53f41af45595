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
#include "epigym/rl.hpp"

#include <algorithm>
#include <cmath>

#include "epigym/error.hpp"

namespace epigym {

void QLearnConfig::validate() const {
    if (episodes < 1) throw Error(ErrorCode::ConfigInvalid, "episodes must be positive");
    if (!(learning_rate > 0 && learning_rate <= 1)) throw Error(ErrorCode::ConfigInvalid, "learning_rate must be in (0,1]");
    if (!(discount >= 0 && discount <= 1)) throw Error(ErrorCode::ConfigInvalid, "discount must be in [0,1]");
    if (!(epsilon_start >= 0 && epsilon_start <= 1 && epsilon_end >= 0 && epsilon_end <= 1))
        throw Error(ErrorCode::ConfigInvalid, "epsilon values must be in [0,1]");
    if (epsilon_end > epsilon_start) throw Error(ErrorCode::ConfigInvalid, "epsilon_end must not exceed epsilon_start");
}

StateBucket discretize(const std::vector<double>& observation, const DiscretizerConfig& cfg) {
    if (cfg.bins_per_dim < 1) throw Error(ErrorCode::ConfigInvalid, "bins_per_dim must be positive");
    StateBucket out;
    out.reserve(observation.size());
    for (double v : observation) {
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(ErrorCode::ComponentOutOfRange, "observation component outside [0,1]");
        out.push_back(std::min(static_cast<int>(std::floor(v * cfg.bins_per_dim)), cfg.bins_per_dim - 1));
    }
    return out;
}

std::vector<std::int64_t> action_levels(const ActionSpace& space, const DiscretizerConfig& cfg) {
    if (!space.is_discrete()) throw Error(ErrorCode::ConfigInvalid, "Q-learning needs a discrete action space");
    if (cfg.action_stride < 1) throw Error(ErrorCode::ConfigInvalid, "action_stride must be positive");
    std::vector<std::int64_t> levels;
    for (std::int64_t l = space.low(); l <= space.high(); l += cfg.action_stride) levels.push_back(l);
    return levels;
}

QTable::QTable(std::vector<std::int64_t> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) throw Error(ErrorCode::ConfigInvalid, "Q table needs at least one level");
}

std::size_t QTable::slot(std::int64_t level) const {
    auto it = std::find(levels_.begin(), levels_.end(), level);
    if (it == levels_.end()) throw Error(ErrorCode::ActionOutOfSpace, "level " + std::to_string(level) + " is not in the Q table");
    return static_cast<std::size_t>(it - levels_.begin());
}

std::vector<double>& QTable::row(const StateBucket& s) {
    auto [it, inserted] = values_.try_emplace(s, levels_.size(), 0.0);
    if (inserted) visits_.try_emplace(s, levels_.size(), 0);
    return it->second;
}

double QTable::value(const StateBucket& s, std::int64_t level) const {
    const auto k = slot(level);
    auto it = values_.find(s);
    return it == values_.end() ? 0.0 : it->second[k];
}

std::int64_t QTable::visits(const StateBucket& s, std::int64_t level) const {
    const auto k = slot(level);
    auto it = visits_.find(s);
    return it == visits_.end() ? 0 : it->second[k];
}

double QTable::max_value(const StateBucket& s) const {
    auto it = values_.find(s);
    if (it == values_.end()) return 0.0;
    return *std::max_element(it->second.begin(), it->second.end());
}

std::int64_t QTable::greedy_level(const StateBucket& s) const {
    auto it = values_.find(s);
    if (it == values_.end() || levels_.empty()) return 0;
    const auto best = std::max_element(it->second.begin(), it->second.end());
    return levels_[static_cast<std::size_t>(best - it->second.begin())];
}

void QTable::set(const StateBucket& s, std::int64_t level, double v) { row(s)[slot(level)] = v; }

void QTable::add_visit(const StateBucket& s, std::int64_t level) {
    const auto k = slot(level);
    row(s);
    ++visits_[s][k];
}

nlohmann::json QTable::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [s, vals] : values_) rows.push_back({{"state", s}, {"values", vals}, {"visits", visits_.at(s)}});
    return {{"levels", levels_}, {"entries", rows}};
}

void q_update(QTable& q, const StateBucket& s, std::int64_t a, double r, const StateBucket& s_next, bool done,
              const QLearnConfig& cfg) {
    const double bootstrap = done ? 0.0 : cfg.discount * q.max_value(s_next);
    const double current = q.value(s, a);
    q.set(s, a, current + cfg.learning_rate * (r + bootstrap - current));
    q.add_visit(s, a);
}

Policy greedy_policy(const QTable& q, const DiscretizerConfig& dcfg) {
    return [q, dcfg](std::size_t, const std::vector<double>& obs) { return Action(q.greedy_level(discretize(obs, dcfg))); };
}

QLearnResult q_learn(Environment& env, const DiscretizerConfig& dcfg, const QLearnConfig& qcfg, const Ledger* ledger) {
    qcfg.validate();
    const auto levels = action_levels(env.action_space(), dcfg);
    QLearnResult out{QTable(levels), {}, {}};
    QTable& q = out.table;

    const auto desc = env.describe();
    const auto digest = config_digest(desc.config);
    Rng rng(qcfg.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);

    for (int e = 0; e < qcfg.episodes; ++e) {
        const double frac = qcfg.episodes > 1 ? static_cast<double>(e) / (qcfg.episodes - 1) : 0.0;
        const double epsilon = qcfg.epsilon_start + (qcfg.epsilon_end - qcfg.epsilon_start) * frac;
        const std::uint64_t episode_seed = rng();

        auto state = discretize(env.reset(episode_seed), dcfg);
        nlohmann::json played = nlohmann::json::array();
        double total = 0.0;
        StepResult r;
        do {
            std::int64_t level;
            if (coin(rng) < epsilon) {
                level = levels[pick(rng)];
            } else {
                level = q.greedy_level(state);
                if (q.entries().find(state) == q.entries().end()) level = levels.front();
            }
            r = env.step(Action(level));
            const auto next = discretize(r.observation, dcfg);
            q_update(q, state, level, r.reward, next, r.done, qcfg);
            state = next;
            total += r.reward;
            played.push_back(level);
        } while (!r.done);

        EvalRecord rec;
        rec.run_id = new_uuid();
        rec.env_type = desc.env_type;
        rec.config_digest = digest;
        rec.algorithm = "q_learning";
        rec.seed = episode_seed;
        rec.action = std::move(played);
        rec.reward = total;
        rec.info_summary = r.info;
        rec.timestamp = utc_timestamp_now();
        if (ledger) ledger->append(rec);
        out.history.push_back(std::move(rec));
    }
    out.policy = greedy_policy(q, dcfg);
    return out;
}

}  // namespace epigym
