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
#include <map>
#include <vector>

#include "epigym/data_io.hpp"
#include "epigym/sim_core.hpp"

namespace epigym {

using StateBucket = std::vector<int>;

struct DiscretizerConfig {
    int bins_per_dim = 10;
    int action_stride = 10;  // levels low, low + stride, ... up to high
};

struct QLearnConfig {
    int episodes = 500;
    double learning_rate = 0.5;
    double discount = 0.95;
    // Linearly decayed from start (first episode) to end (last episode).
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    std::uint64_t seed = 0;

    void validate() const;
};

// Per-dimension bucket min(floor(v * bins), bins - 1). ComponentOutOfRange outside [0,1].
StateBucket discretize(const std::vector<double>& observation, const DiscretizerConfig& cfg);

std::vector<std::int64_t> action_levels(const ActionSpace& space, const DiscretizerConfig& cfg);

/// Action values over a fixed set of levels. Unvisited pairs read as 0.
class QTable {
public:
    QTable() = default;
    explicit QTable(std::vector<std::int64_t> levels);

    const std::vector<std::int64_t>& levels() const { return levels_; }
    double value(const StateBucket& s, std::int64_t level) const;
    std::int64_t visits(const StateBucket& s, std::int64_t level) const;
    double max_value(const StateBucket& s) const;
    // Earliest level among the maxima; level 0 for states never seen.
    std::int64_t greedy_level(const StateBucket& s) const;

    void set(const StateBucket& s, std::int64_t level, double v);
    void add_visit(const StateBucket& s, std::int64_t level);

    const std::map<StateBucket, std::vector<double>>& entries() const { return values_; }
    nlohmann::json to_json() const;

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t slot(std::int64_t level) const;
    std::vector<double>& row(const StateBucket& s);

    std::vector<std::int64_t> levels_;
    std::map<StateBucket, std::vector<double>> values_;
    std::map<StateBucket, std::vector<std::int64_t>> visits_;
};

/// Q(s,a) += lr * (r + discount * max_a' Q(s',a') * [not done] - Q(s,a)); increments the visit count.
void q_update(QTable& q, const StateBucket& s, std::int64_t a, double r, const StateBucket& s_next, bool done,
              const QLearnConfig& cfg);

Policy greedy_policy(const QTable& q, const DiscretizerConfig& dcfg);

struct QLearnResult {
    QTable table;
    Policy policy;
    std::vector<EvalRecord> history;  // one per training episode
};

/// Epsilon-greedy tabular Q-learning through reset/step only. Episode seeds
/// are drawn from an Rng seeded with qcfg.seed.
QLearnResult q_learn(Environment& env, const DiscretizerConfig& dcfg, const QLearnConfig& qcfg,
                     const Ledger* ledger = nullptr);

}  // namespace epigym
