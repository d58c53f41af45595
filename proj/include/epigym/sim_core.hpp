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
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace epigym {

// Every stochastic draw inside an environment comes from one of these,
// seeded at reset.
using Rng = std::mt19937_64;

// Either an integer level (discrete spaces) or a real vector (box spaces).
class Action {
public:
    Action() = default;
    Action(std::int64_t level) : value_(level) {}
    Action(int level) : value_(static_cast<std::int64_t>(level)) {}
    Action(std::vector<double> coords) : value_(std::move(coords)) {}

    bool is_level() const { return std::holds_alternative<std::int64_t>(value_); }
    bool is_vector() const { return std::holds_alternative<std::vector<double>>(value_); }
    std::int64_t level() const { return std::get<std::int64_t>(value_); }
    const std::vector<double>& vector() const { return std::get<std::vector<double>>(value_); }

    nlohmann::json to_json() const;
    static Action from_json(const nlohmann::json& j);

    friend bool operator==(const Action&, const Action&) = default;

private:
    std::variant<std::int64_t, std::vector<double>> value_{std::int64_t{0}};
};

class ActionSpace {
public:
    enum class Kind { DiscreteRange, ContinuousBox };

    static ActionSpace discrete(std::int64_t low, std::int64_t high);
    static ActionSpace box(std::vector<double> lower, std::vector<double> upper);
    static ActionSpace unit_box(std::size_t dims);

    Kind kind() const { return kind_; }
    bool is_discrete() const { return kind_ == Kind::DiscreteRange; }
    std::int64_t low() const { return low_; }
    std::int64_t high() const { return high_; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    std::size_t dims() const { return is_discrete() ? 1 : lower_.size(); }

    // Number of elements of a discrete space.
    std::uint64_t size() const;
    Action at(std::uint64_t index) const;
    std::uint64_t index_of(const Action& a) const;

    bool contains(const Action& a) const;

    nlohmann::json to_json() const;

private:
    Kind kind_ = Kind::DiscreteRange;
    std::int64_t low_ = 0;
    std::int64_t high_ = 0;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

// Uniform draw; advances rng.
Action sample_action(const ActionSpace& space, Rng& rng);

using Info = std::map<std::string, double>;

struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    Info info;

    friend bool operator==(const StepResult&, const StepResult&) = default;
};

nlohmann::json to_json(const StepResult& r);

struct EnvDescription {
    std::string env_type;
    nlohmann::json config;
    std::vector<std::string> observation_labels;
    std::size_t horizon = 1;
};

/// The reset/step contract shared by every model wrapper.
///
/// step() validates the action and the episode state before the model is
/// touched, so a rejected call leaves the environment exactly as it was.
/// Exactly horizon() steps succeed after each reset.
class Environment {
public:
    virtual ~Environment() = default;

    std::vector<double> reset(std::uint64_t seed);
    StepResult step(const Action& action);

    virtual const ActionSpace& action_space() const = 0;
    virtual EnvDescription describe() const = 0;

    // Coordinates in [0,1]^d used by surrogate models. Discrete levels map to
    // (level - low) / (high - low); box actions are rescaled per dimension.
    virtual std::vector<double> action_features(const Action& a) const;

    std::size_t horizon() const { return horizon_; }
    std::size_t step_index() const { return steps_; }
    bool needs_reset() const { return !was_reset_; }
    bool done() const { return was_reset_ && steps_ >= horizon_; }
    std::uint64_t seed() const { return seed_; }

protected:
    explicit Environment(std::size_t horizon);

    virtual std::vector<double> do_reset(std::uint64_t seed) = 0;
    // Called with a validated action; must not leave partial state behind on throw.
    virtual StepResult do_step(const Action& action) = 0;

private:
    std::size_t horizon_;
    std::size_t steps_ = 0;
    bool was_reset_ = false;
    std::uint64_t seed_ = 0;
};

// Maps (step index, current observation) to the next action.
using Policy = std::function<Action(std::size_t step, const std::vector<double>& observation)>;

Policy constant_policy(Action a);
// Plays actions in order; the last one repeats if the episode is longer.
Policy sequence_policy(std::vector<Action> actions);

struct EpisodeRecord {
    std::vector<Action> actions;
    std::vector<StepResult> step_results;
    double total_reward = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

EpisodeRecord run_episode(Environment& env, const Policy& policy, std::uint64_t seed);

/// Presents a whole open-loop level sequence for a multi-step environment as
/// a single discrete action, so optimizers that only call step() can search
/// over policies. Action k decodes to one level per step in mixed radix
/// (first step most significant); the reward is the episode total.
class OpenLoopPolicyEnv final : public Environment {
public:
    OpenLoopPolicyEnv(std::unique_ptr<Environment> inner, std::vector<std::int64_t> levels);

    const ActionSpace& action_space() const override { return space_; }
    EnvDescription describe() const override;
    std::vector<double> action_features(const Action& a) const override;

    std::vector<std::int64_t> decode(const Action& a) const;
    Action encode(const std::vector<std::int64_t>& sequence) const;

    Environment& inner() { return *inner_; }
    const EpisodeRecord& last_episode() const { return last_; }

protected:
    std::vector<double> do_reset(std::uint64_t seed) override;
    StepResult do_step(const Action& action) override;

private:
    std::unique_ptr<Environment> inner_;
    std::vector<std::int64_t> levels_;
    std::size_t steps_;
    ActionSpace space_;
    std::uint64_t episode_seed_ = 0;
    EpisodeRecord last_;
};

// Holds one level of the inner environment for its whole episode; horizon 1.
class ConstantPolicyEnv final : public Environment {
public:
    explicit ConstantPolicyEnv(std::unique_ptr<Environment> inner);

    const ActionSpace& action_space() const override { return inner_->action_space(); }
    EnvDescription describe() const override;
    std::vector<double> action_features(const Action& a) const override { return inner_->action_features(a); }

    Environment& inner() { return *inner_; }
    const EpisodeRecord& last_episode() const { return last_; }

protected:
    std::vector<double> do_reset(std::uint64_t seed) override;
    StepResult do_step(const Action& action) override;

private:
    std::unique_ptr<Environment> inner_;
    std::uint64_t episode_seed_ = 0;
    EpisodeRecord last_;
};

}  // namespace epigym
