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
#include "epigym/sim_core.hpp"

#include <algorithm>
#include <cmath>

#include "epigym/error.hpp"

namespace epigym {

nlohmann::json Action::to_json() const {
    if (is_level()) return level();
    return vector();
}

Action Action::from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Action(j.get<std::int64_t>());
    if (j.is_number()) return Action(std::vector<double>{j.get<double>()});
    if (j.is_array()) {
        std::vector<double> v;
        v.reserve(j.size());
        for (const auto& e : j) {
            if (!e.is_number()) throw Error(ErrorCode::ActionOutOfSpace, "action vector entries must be numbers");
            v.push_back(e.get<double>());
        }
        return Action(std::move(v));
    }
    throw Error(ErrorCode::ActionOutOfSpace, "action must be an integer level or an array of numbers");
}

ActionSpace ActionSpace::discrete(std::int64_t low, std::int64_t high) {
    if (low > high) throw Error(ErrorCode::ConfigInvalid, "discrete range requires low <= high");
    ActionSpace s;
    s.kind_ = Kind::DiscreteRange;
    s.low_ = low;
    s.high_ = high;
    return s;
}

ActionSpace ActionSpace::box(std::vector<double> lower, std::vector<double> upper) {
    if (lower.empty() || lower.size() != upper.size())
        throw Error(ErrorCode::ConfigInvalid, "box bounds must be nonempty and of equal length");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw Error(ErrorCode::ConfigInvalid, "box requires finite lower[i] < upper[i]");
    }
    ActionSpace s;
    s.kind_ = Kind::ContinuousBox;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
}

ActionSpace ActionSpace::unit_box(std::size_t dims) {
    return box(std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0));
}

std::uint64_t ActionSpace::size() const {
    if (!is_discrete()) throw Error(ErrorCode::SpaceTooLarge, "continuous space has no finite size");
    return static_cast<std::uint64_t>(high_ - low_) + 1;
}

Action ActionSpace::at(std::uint64_t index) const {
    if (index >= size()) throw Error(ErrorCode::ActionOutOfSpace, "index beyond discrete space");
    return Action(low_ + static_cast<std::int64_t>(index));
}

std::uint64_t ActionSpace::index_of(const Action& a) const {
    if (!is_discrete() || !contains(a)) throw Error(ErrorCode::ActionOutOfSpace, "action not in discrete space");
    return static_cast<std::uint64_t>(a.level() - low_);
}

bool ActionSpace::contains(const Action& a) const {
    if (is_discrete()) return a.is_level() && a.level() >= low_ && a.level() <= high_;
    if (!a.is_vector() || a.vector().size() != lower_.size()) return false;
    for (std::size_t i = 0; i < lower_.size(); ++i) {
        const double v = a.vector()[i];
        if (!(v >= lower_[i] && v <= upper_[i])) return false;
    }
    return true;
}

nlohmann::json ActionSpace::to_json() const {
    if (is_discrete()) return {{"kind", "DiscreteRange"}, {"low", low_}, {"high", high_}};
    return {{"kind", "ContinuousBox"}, {"dims", lower_.size()}, {"lower", lower_}, {"upper", upper_}};
}

Action sample_action(const ActionSpace& space, Rng& rng) {
    if (space.is_discrete()) {
        std::uniform_int_distribution<std::int64_t> dist(space.low(), space.high());
        return Action(dist(rng));
    }
    std::vector<double> v(space.dims());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uniform_real_distribution<double> dist(space.lower()[i], space.upper()[i]);
        v[i] = dist(rng);
    }
    return Action(std::move(v));
}

nlohmann::json to_json(const StepResult& r) {
    nlohmann::json info = nlohmann::json::object();
    for (const auto& [k, v] : r.info) info[k] = v;
    return {{"observation", r.observation}, {"reward", r.reward}, {"done", r.done}, {"info", info}};
}

Environment::Environment(std::size_t horizon) : horizon_(horizon) {
    if (horizon == 0) throw Error(ErrorCode::ConfigInvalid, "horizon must be at least 1");
}

std::vector<double> Environment::reset(std::uint64_t seed) {
    auto obs = do_reset(seed);
    seed_ = seed;
    steps_ = 0;
    was_reset_ = true;
    return obs;
}

StepResult Environment::step(const Action& action) {
    if (!was_reset_) throw Error(ErrorCode::NotReset, "step called before reset");
    if (steps_ >= horizon_) throw Error(ErrorCode::EpisodeFinished, "episode already finished; call reset");
    if (!action_space().contains(action)) {
        throw Error(ErrorCode::ActionOutOfSpace, "action " + action.to_json().dump() + " is not in " +
                                                     action_space().to_json().dump());
    }
    StepResult result = do_step(action);
    ++steps_;
    result.done = steps_ >= horizon_;
    return result;
}

std::vector<double> Environment::action_features(const Action& a) const {
    const auto& space = action_space();
    if (space.is_discrete()) {
        const double span = static_cast<double>(space.high() - space.low());
        return {span > 0 ? static_cast<double>(a.level() - space.low()) / span : 0.0};
    }
    std::vector<double> f(space.dims());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = (a.vector()[i] - space.lower()[i]) / (space.upper()[i] - space.lower()[i]);
    return f;
}

Policy constant_policy(Action a) {
    return [a = std::move(a)](std::size_t, const std::vector<double>&) { return a; };
}

Policy sequence_policy(std::vector<Action> actions) {
    if (actions.empty()) throw Error(ErrorCode::ConfigInvalid, "sequence policy needs at least one action");
    return [actions = std::move(actions)](std::size_t step, const std::vector<double>&) {
        return actions[std::min(step, actions.size() - 1)];
    };
}

EpisodeRecord run_episode(Environment& env, const Policy& policy, std::uint64_t seed) {
    EpisodeRecord rec;
    rec.seed = seed;
    auto obs = env.reset(seed);
    bool done = false;
    while (!done) {
        Action a = policy(env.step_index(), obs);
        StepResult r = env.step(a);
        obs = r.observation;
        done = r.done;
        rec.total_reward += r.reward;
        rec.actions.push_back(std::move(a));
        rec.step_results.push_back(std::move(r));
    }
    return rec;
}

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp) {
    std::uint64_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (out > (std::uint64_t{1} << 62) / base)
            throw Error(ErrorCode::SpaceTooLarge, "open-loop policy space exceeds 2^62 elements");
        out *= base;
    }
    return out;
}

}  // namespace

OpenLoopPolicyEnv::OpenLoopPolicyEnv(std::unique_ptr<Environment> inner, std::vector<std::int64_t> levels)
    : Environment(1), inner_(std::move(inner)), levels_(std::move(levels)) {
    if (!inner_) throw Error(ErrorCode::ConfigInvalid, "open-loop wrapper needs an environment");
    if (levels_.empty()) throw Error(ErrorCode::ConfigInvalid, "open-loop wrapper needs at least one level");
    if (!inner_->action_space().is_discrete())
        throw Error(ErrorCode::ConfigInvalid, "open-loop wrapper needs a discrete inner action space");
    for (auto l : levels_) {
        if (!inner_->action_space().contains(Action(l)))
            throw Error(ErrorCode::ConfigInvalid, "level " + std::to_string(l) + " outside inner action space");
    }
    steps_ = inner_->horizon();
    const auto count = checked_pow(levels_.size(), steps_);
    space_ = ActionSpace::discrete(0, static_cast<std::int64_t>(count - 1));
}

EnvDescription OpenLoopPolicyEnv::describe() const {
    auto d = inner_->describe();
    d.config = {{"inner_env_type", d.env_type}, {"inner_config", d.config}, {"levels", levels_}};
    d.env_type = "open_loop";
    d.horizon = 1;
    return d;
}

std::vector<std::int64_t> OpenLoopPolicyEnv::decode(const Action& a) const {
    auto index = static_cast<std::uint64_t>(a.level());
    std::vector<std::int64_t> seq(steps_);
    for (std::size_t k = steps_; k-- > 0;) {
        seq[k] = levels_[index % levels_.size()];
        index /= levels_.size();
    }
    return seq;
}

Action OpenLoopPolicyEnv::encode(const std::vector<std::int64_t>& sequence) const {
    if (sequence.size() != steps_) throw Error(ErrorCode::DimMismatch, "sequence length must equal inner horizon");
    std::uint64_t index = 0;
    for (auto level : sequence) {
        auto it = std::find(levels_.begin(), levels_.end(), level);
        if (it == levels_.end()) throw Error(ErrorCode::ActionOutOfSpace, "level not among the allowed levels");
        index = index * levels_.size() + static_cast<std::uint64_t>(it - levels_.begin());
    }
    return Action(static_cast<std::int64_t>(index));
}

std::vector<double> OpenLoopPolicyEnv::action_features(const Action& a) const {
    std::vector<double> f;
    f.reserve(steps_);
    for (auto level : decode(a)) f.push_back(inner_->action_features(Action(level))[0]);
    return f;
}

std::vector<double> OpenLoopPolicyEnv::do_reset(std::uint64_t seed) {
    episode_seed_ = seed;
    return inner_->reset(seed);
}

StepResult OpenLoopPolicyEnv::do_step(const Action& action) {
    std::vector<Action> seq;
    for (auto l : decode(action)) seq.emplace_back(l);
    last_ = run_episode(*inner_, sequence_policy(std::move(seq)), episode_seed_);
    StepResult out = last_.step_results.back();
    out.reward = last_.total_reward;
    return out;
}

ConstantPolicyEnv::ConstantPolicyEnv(std::unique_ptr<Environment> inner) : Environment(1), inner_(std::move(inner)) {
    if (!inner_) throw Error(ErrorCode::ConfigInvalid, "constant-policy wrapper needs an environment");
}

EnvDescription ConstantPolicyEnv::describe() const {
    auto d = inner_->describe();
    d.config = {{"inner_env_type", d.env_type}, {"inner_config", d.config}};
    d.env_type = "constant_policy";
    d.horizon = 1;
    return d;
}

std::vector<double> ConstantPolicyEnv::do_reset(std::uint64_t seed) {
    episode_seed_ = seed;
    return inner_->reset(seed);
}

StepResult ConstantPolicyEnv::do_step(const Action& action) {
    last_ = run_episode(*inner_, constant_policy(action), episode_seed_);
    StepResult out = last_.step_results.back();
    out.reward = last_.total_reward;
    return out;
}

}  // namespace epigym
