#pragma once

#include "epigym/sim_core.hpp"

namespace epigym::testing {

// Two decisions; reward 1 for level 0 at step 0 and for level 90 at step 1.
class TwoStepToyEnv final : public Environment {
public:
    TwoStepToyEnv() : Environment(2), space_(ActionSpace::discrete(0, 99)) {}
    const ActionSpace& action_space() const override { return space_; }
    EnvDescription describe() const override { return {"toy_two_step", nlohmann::json::object(), {"progress"}, 2}; }

protected:
    std::vector<double> do_reset(std::uint64_t) override { return {0.0}; }
    StepResult do_step(const Action& a) override {
        const std::size_t t = step_index();
        StepResult r;
        r.reward = (t == 0 && a.level() == 0) || (t == 1 && a.level() == 90) ? 1.0 : 0.0;
        r.observation = {static_cast<double>(t + 1) / 2.0};
        r.info["day"] = static_cast<double>(t + 1);
        return r;
    }

private:
    ActionSpace space_;
};

// Single step on [0,1]: reward -(x - 0.3)^2 times a scale.
class QuadraticEnv final : public Environment {
public:
    explicit QuadraticEnv(double scale = 1.0) : Environment(1), space_(ActionSpace::unit_box(1)), scale_(scale) {}
    const ActionSpace& action_space() const override { return space_; }
    EnvDescription describe() const override { return {"toy_quadratic", {{"scale", scale_}}, {"x"}, 1}; }

protected:
    std::vector<double> do_reset(std::uint64_t) override { return {0.0}; }
    StepResult do_step(const Action& a) override {
        const double x = a.vector()[0];
        StepResult r;
        r.observation = {x};
        r.reward = -scale_ * (x - 0.3) * (x - 0.3);
        return r;
    }

private:
    ActionSpace space_;
    double scale_;
};

// Discrete single-step env whose reward is an arbitrary table.
class TableEnv final : public Environment {
public:
    explicit TableEnv(std::vector<double> rewards, double scale = 1.0)
        : Environment(1),
          space_(ActionSpace::discrete(0, static_cast<std::int64_t>(rewards.size()) - 1)),
          rewards_(std::move(rewards)),
          scale_(scale) {}
    const ActionSpace& action_space() const override { return space_; }
    EnvDescription describe() const override { return {"toy_table", {{"rewards", rewards_}}, {"level"}, 1}; }

protected:
    std::vector<double> do_reset(std::uint64_t) override { return {0.0}; }
    StepResult do_step(const Action& a) override {
        StepResult r;
        r.observation = {0.0};
        r.reward = scale_ * rewards_[static_cast<std::size_t>(a.level())];
        return r;
    }

private:
    ActionSpace space_;
    std::vector<double> rewards_;
    double scale_;
};

}  // namespace epigym::testing
