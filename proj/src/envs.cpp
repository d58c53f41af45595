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
#include "epigym/envs.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "epigym/error.hpp"

namespace epigym {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::SirdDirect: return "sird_direct";
        case ModelKind::SirdStringency: return "sird_stringency";
        case ModelKind::ChainBinomial: return "chain_binomial";
    }
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "sird_direct") return ModelKind::SirdDirect;
    if (name == "sird_stringency") return ModelKind::SirdStringency;
    if (name == "chain_binomial") return ModelKind::ChainBinomial;
    throw Error(ErrorCode::ConfigInvalid, "unknown model kind '" + std::string(name) + "'");
}

std::optional<long> parse_iso_date(std::string_view text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    for (std::size_t k : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (text[k] < '0' || text[k] > '9') return std::nullopt;
    }
    y = std::stoi(std::string(text.substr(0, 4)));
    m = static_cast<unsigned>(std::stoi(std::string(text.substr(5, 2))));
    d = static_cast<unsigned>(std::stoi(std::string(text.substr(8, 2))));
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

std::string format_iso_date(long days_since_epoch) {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days_since_epoch}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

void CaseSeries::validate() const {
    if (dates.empty()) throw Error(ErrorCode::ConfigInvalid, "case series is empty");
    if (dates.size() != cumulative_cases.size())
        throw Error(ErrorCode::ConfigInvalid, "case series dates and counts differ in length");
    std::optional<long> prev;
    for (std::size_t k = 0; k < dates.size(); ++k) {
        auto day = parse_iso_date(dates[k]);
        if (!day) throw Error(ErrorCode::ConfigInvalid, "bad date '" + dates[k] + "'");
        if (prev && *day != *prev + 1) throw Error(ErrorCode::ConfigInvalid, "case series dates are not consecutive");
        const double c = cumulative_cases[k];
        if (!(c >= 0) || !std::isfinite(c)) throw Error(ErrorCode::ConfigInvalid, "case counts must be finite and >= 0");
        if (k > 0 && c < cumulative_cases[k - 1])
            throw Error(ErrorCode::ConfigInvalid, "cumulative cases must be nondecreasing");
        prev = day;
    }
}

std::vector<std::string> calibration_parameter_names(ModelKind kind) {
    if (kind == ModelKind::SirdStringency) return {"base_beta", "kappa", "gamma", "mu", "initial_infected"};
    return {"beta", "gamma", "mu", "initial_infected"};
}

void CalibrationConfig::validate() const {
    if (!(population > 0) || !std::isfinite(population)) throw Error(ErrorCode::ConfigInvalid, "population must be positive");
    if (substeps_per_day < 1) throw Error(ErrorCode::ConfigInvalid, "substeps_per_day must be positive");
    if (replicates < 1) throw Error(ErrorCode::ConfigInvalid, "replicates must be positive");
    series.validate();
    const auto names = calibration_parameter_names(model_kind);
    if (param_bounds.size() != names.size())
        throw Error(ErrorCode::ConfigInvalid, "param_bounds must list exactly the model's free parameters");
    for (const auto& name : names) {
        auto it = param_bounds.find(name);
        if (it == param_bounds.end()) throw Error(ErrorCode::ConfigInvalid, "missing bounds for '" + name + "'");
        const auto& b = it->second;
        if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper))
            throw Error(ErrorCode::ConfigInvalid, "bounds for '" + name + "' must be finite with lower < upper");
        if (b.lower < 0) throw Error(ErrorCode::ConfigInvalid, "bounds for '" + name + "' must be nonnegative");
    }
    const double dt = 1.0 / substeps_per_day;
    const double beta_hi = model_kind == ModelKind::SirdStringency ? param_bounds.at("base_beta").upper
                                                                     : param_bounds.at("beta").upper;
    const double gamma_hi = param_bounds.at("gamma").upper;
    const double mu_hi = param_bounds.at("mu").upper;
    if (param_bounds.at("initial_infected").upper > population)
        throw Error(ErrorCode::ConfigInvalid, "initial_infected cannot exceed the population");
    if (model_kind == ModelKind::ChainBinomial) {
        if (gamma_hi + mu_hi > 1.0) throw Error(ErrorCode::ConfigInvalid, "gamma + mu upper bounds exceed 1");
        if (beta_hi > population) throw Error(ErrorCode::ConfigInvalid, "beta upper bound exceeds population");
    } else {
        if ((gamma_hi + mu_hi) * dt >= 1.0)
            throw Error(ErrorCode::ConfigInvalid, "gamma + mu upper bounds violate the Euler stability limit");
        if (beta_hi * dt > 1.0) throw Error(ErrorCode::ConfigInvalid, "beta upper bound violates the Euler stability limit");
    }
    if (model_kind == ModelKind::SirdStringency && param_bounds.at("kappa").upper > 1.0)
        throw Error(ErrorCode::ConfigInvalid, "kappa bounds must lie in [0,1]");
    for (auto level : stringency) {
        if (level < 0 || level > 99) throw Error(ErrorCode::ConfigInvalid, "stringency levels must lie in [0,99]");
    }
}

CaseSeries synthetic_case_series(const SirdParams& truth, double population, double initial_infected, int days,
                                 std::string_view start_date, int substeps_per_day) {
    if (days < 1) throw Error(ErrorCode::ConfigInvalid, "synthetic series needs at least one day");
    const auto start = parse_iso_date(start_date);
    if (!start) throw Error(ErrorCode::ConfigInvalid, "bad start date");
    const auto init = CompartmentState::from_counts(population - initial_infected, initial_infected, 0.0, 0.0);
    CaseSeries out;
    if (days == 1) {
        out.dates.push_back(format_iso_date(*start));
        out.cumulative_cases.push_back(init.n - init.s);
        return out;
    }
    const auto traj = simulate_sird(truth, init, days - 1, substeps_per_day);
    for (int k = 0; k < days; ++k) {
        out.dates.push_back(format_iso_date(*start + k));
        out.cumulative_cases.push_back(traj.cumulative_cases[static_cast<std::size_t>(k)]);
    }
    return out;
}

CaseSeries bundled_case_series() {
    return synthetic_case_series({0.3, 0.1, 0.01}, 1e5, 20.0, 100);
}

CalibrationConfig default_calibration_config(ModelKind kind) {
    CalibrationConfig c;
    c.model_kind = kind;
    c.population = 1e5;
    c.series = bundled_case_series();
    if (kind == ModelKind::SirdStringency) {
        c.param_bounds = {{"base_beta", {0.05, 0.6}},
                          {"kappa", {0.0, 1.0}},
                          {"gamma", {0.02, 0.3}},
                          {"mu", {0.0, 0.03}},
                          {"initial_infected", {1.0, 100.0}}};
    } else {
        c.param_bounds = {
            {"beta", {0.05, 0.6}}, {"gamma", {0.02, 0.3}}, {"mu", {0.0, 0.03}}, {"initial_infected", {1.0, 100.0}}};
    }
    return c;
}

void PolicyEnvConfig::validate() const {
    if (horizon < 1) throw Error(ErrorCode::ConfigInvalid, "horizon must be at least 1");
    if (substeps_per_day < 1) throw Error(ErrorCode::ConfigInvalid, "substeps_per_day must be positive");
    init.validate();
    if (!(gamma >= 0) || !(mu >= 0) || !std::isfinite(gamma) || !std::isfinite(mu))
        throw Error(ErrorCode::ConfigInvalid, "gamma and mu must be finite and nonnegative");
    if (!(link.kappa >= 0 && link.kappa <= 1)) throw Error(ErrorCode::ConfigInvalid, "kappa must lie in [0,1]");
    if (!(link.base_beta >= 0) || !std::isfinite(link.base_beta))
        throw Error(ErrorCode::ConfigInvalid, "base_beta must be finite and nonnegative");
    if (model_kind == ModelKind::ChainBinomial) {
        if (gamma + mu > 1.0) throw Error(ErrorCode::ConfigInvalid, "gamma + mu must not exceed 1");
        if (link.base_beta > init.n) throw Error(ErrorCode::ConfigInvalid, "base_beta must not exceed the population");
        for (double v : {init.s, init.i, init.r, init.d}) {
            if (std::floor(v) != v) throw Error(ErrorCode::ConfigInvalid, "chain-binomial model needs integer counts");
        }
    } else {
        const double dt = 1.0 / substeps_per_day;
        if ((gamma + mu) * dt >= 1.0) throw Error(ErrorCode::ConfigInvalid, "(gamma + mu) * dt must be below 1");
        if (link.base_beta * dt > 1.0) throw Error(ErrorCode::ConfigInvalid, "base_beta * dt must not exceed 1");
    }
}

void CostConfig::validate() const {
    if (!(c0 >= 0) || !(value_per_life_year >= 0) || !(life_years_per_death >= 0))
        throw Error(ErrorCode::ConfigInvalid, "cost parameters must be nonnegative");
    if (!(exponent >= 1)) throw Error(ErrorCode::ConfigInvalid, "cost exponent must be at least 1");
}

double calibration_reward(const std::vector<double>& simulated, const std::vector<double>& observed) {
    if (simulated.size() != observed.size() || simulated.empty())
        throw Error(ErrorCode::LengthMismatch, "calibration_reward needs equal, nonzero lengths (got " +
                                                   std::to_string(simulated.size()) + " and " +
                                                   std::to_string(observed.size()) + ")");
    double sq = 0.0;
    for (std::size_t k = 0; k < simulated.size(); ++k) {
        const double e = simulated[k] - observed[k];
        sq += e * e;
    }
    return -std::sqrt(sq / static_cast<double>(simulated.size()));
}

double cost_reward(std::int64_t level, double new_deaths, const CostConfig& cost) {
    const double intensity = std::pow(static_cast<double>(level) / 99.0, cost.exponent);
    return -(kDaysPerStep * cost.c0 * intensity +
             new_deaths * cost.life_years_per_death * cost.value_per_life_year);
}

// ---------------------------------------------------------------------------

CalibrationEnv::CalibrationEnv(CalibrationConfig config)
    : Environment(1), config_(std::move(config)), names_(calibration_parameter_names(config_.model_kind)) {
    config_.validate();
    space_ = ActionSpace::unit_box(names_.size());
}

EnvDescription CalibrationEnv::describe() const {
    std::vector<std::string> labels;
    for (const auto& d : config_.series.dates) labels.push_back("cumulative_fraction@" + d);
    return {"calibration", to_json(config_), std::move(labels), 1};
}

std::vector<double> CalibrationEnv::denormalize(const std::vector<double>& unit) const {
    if (unit.size() != names_.size()) throw Error(ErrorCode::DimMismatch, "parameter vector has wrong length");
    std::vector<double> out(unit.size());
    for (std::size_t k = 0; k < unit.size(); ++k) {
        const auto& b = config_.param_bounds.at(names_[k]);
        out[k] = b.lower + unit[k] * (b.upper - b.lower);
    }
    return out;
}

std::vector<double> CalibrationEnv::normalize(const std::vector<double>& params) const {
    if (params.size() != names_.size()) throw Error(ErrorCode::DimMismatch, "parameter vector has wrong length");
    std::vector<double> out(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& b = config_.param_bounds.at(names_[k]);
        out[k] = (params[k] - b.lower) / (b.upper - b.lower);
    }
    return out;
}

std::vector<double> CalibrationEnv::run_once(const std::vector<double>& p, std::uint64_t seed) const {
    const int days = static_cast<int>(config_.series.size()) - 1;
    const double n = config_.population;
    const double i0 = p.back();
    std::vector<double> curve;
    curve.reserve(config_.series.size());

    if (config_.model_kind == ModelKind::SirdStringency) {
        const StringencyLink link{p[0], p[1]};
        const SirdParams base{0.0, p[2], p[3]};
        auto state = CompartmentState::from_counts(n - i0, i0, 0.0, 0.0);
        curve.push_back(state.n - state.s);
        for (int day = 0; day < days; ++day) {
            std::int64_t level = 0;
            if (!config_.stringency.empty())
                level = config_.stringency[std::min<std::size_t>(static_cast<std::size_t>(day), config_.stringency.size() - 1)];
            SirdParams today = base;
            today.beta = stringency_to_beta(level, link);
            state = advance_sird(state, today, 1, config_.substeps_per_day).back();
            curve.push_back(state.n - state.s);
        }
        return curve;
    }

    const SirdParams params{p[0], p[1], p[2]};
    Trajectory traj;
    if (config_.model_kind == ModelKind::ChainBinomial) {
        const double i0_count = std::round(i0);
        const auto init = CompartmentState::from_counts(n - i0_count, i0_count, 0.0, 0.0);
        if (days == 0) return {init.n - init.s};
        traj = simulate_chain_binomial(params, init, days, seed);
    } else {
        const auto init = CompartmentState::from_counts(n - i0, i0, 0.0, 0.0);
        if (days == 0) return {init.n - init.s};
        traj = simulate_sird(params, init, days, config_.substeps_per_day);
    }
    return traj.cumulative_cases;
}

std::vector<double> CalibrationEnv::simulate_curve(const std::vector<double>& params, std::uint64_t seed) const {
    if (config_.model_kind != ModelKind::ChainBinomial) return run_once(params, seed);
    Rng seeds(seed);
    std::vector<double> mean(config_.series.size(), 0.0);
    for (int k = 0; k < config_.replicates; ++k) {
        const auto curve = run_once(params, seeds());
        for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += curve[t] / config_.replicates;
    }
    return mean;
}

std::vector<double> CalibrationEnv::do_reset(std::uint64_t seed) {
    rng_.seed(seed);
    return std::vector<double>(config_.series.size(), 0.0);
}

StepResult CalibrationEnv::do_step(const Action& action) {
    const auto params = denormalize(action.vector());
    const auto& observed = config_.series.cumulative_cases;
    StepResult out;
    std::vector<double> mean_curve;
    if (config_.model_kind == ModelKind::ChainBinomial) {
        // RMSE is averaged over replicates, each scored against the data on its own.
        mean_curve.assign(observed.size(), 0.0);
        double total = 0.0;
        for (int k = 0; k < config_.replicates; ++k) {
            const auto curve = run_once(params, rng_());
            total += calibration_reward(curve, observed);
            for (std::size_t t = 0; t < curve.size(); ++t) mean_curve[t] += curve[t] / config_.replicates;
        }
        out.reward = total / config_.replicates;
    } else {
        mean_curve = run_once(params, 0);
        out.reward = calibration_reward(mean_curve, observed);
    }
    out.observation.reserve(mean_curve.size());
    for (double c : mean_curve) out.observation.push_back(std::clamp(c / config_.population, 0.0, 1.0));
    out.info["cumulative_cases"] = mean_curve.back();
    out.info["new_cases"] = mean_curve.back() - mean_curve.front();
    out.info["new_deaths"] = 0.0;
    out.info["day"] = static_cast<double>(mean_curve.size() - 1);
    return out;
}

// ---------------------------------------------------------------------------

PolicyEnv::PolicyEnv(PolicyEnvConfig config, std::optional<CostConfig> cost)
    : Environment(config.horizon >= 1 ? static_cast<std::size_t>(config.horizon) : 0),
      config_(std::move(config)),
      cost_(std::move(cost)),
      space_(ActionSpace::discrete(0, 99)) {
    config_.validate();
    if (cost_) cost_->validate();
    state_ = config_.init;
}

EnvDescription PolicyEnv::describe() const {
    EnvDescription d;
    d.env_type = cost_ ? "cost" : "policy";
    d.config = to_json(config_);
    if (cost_) d.config["cost"] = to_json(*cost_);
    d.observation_labels = {"s_fraction", "i_fraction", "r_fraction", "d_fraction"};
    d.horizon = static_cast<std::size_t>(config_.horizon);
    return d;
}

std::vector<double> PolicyEnv::do_reset(std::uint64_t seed) {
    rng_.seed(seed);
    state_ = config_.init;
    day_ = 0;
    trajectory_ = Trajectory{};
    trajectory_.push(state_);
    return state_.fractions();
}

StepResult PolicyEnv::do_step(const Action& action) {
    const std::int64_t level = action.level();
    const SirdParams params{stringency_to_beta(level, config_.link), config_.gamma, config_.mu};

    // Work on copies so a throwing model call leaves the episode untouched.
    Rng rng = rng_;
    const auto window = config_.model_kind == ModelKind::ChainBinomial
                            ? advance_chain_binomial(state_, params, kDaysPerStep, rng)
                            : advance_sird(state_, params, kDaysPerStep, config_.substeps_per_day);

    const CompartmentState& end = window.back();
    const double new_cases = (end.n - end.s) - (state_.n - state_.s);
    const double new_deaths = end.d - state_.d;

    StepResult out;
    out.observation = end.fractions();
    out.reward = cost_ ? cost_reward(level, new_deaths, *cost_) : -new_cases;
    out.info["new_cases"] = new_cases;
    out.info["new_deaths"] = new_deaths;
    out.info["cumulative_cases"] = end.n - end.s;
    out.info["day"] = static_cast<double>(day_ + kDaysPerStep);

    rng_ = rng;
    for (const auto& st : window) trajectory_.push(st);
    state_ = end;
    day_ += kDaysPerStep;
    return out;
}

std::unique_ptr<CalibrationEnv> make_calibration_env(const CalibrationConfig& config) {
    return std::make_unique<CalibrationEnv>(config);
}

std::unique_ptr<PolicyEnv> make_policy_env(const PolicyEnvConfig& config) {
    return std::make_unique<PolicyEnv>(config);
}

std::unique_ptr<PolicyEnv> make_cost_env(const PolicyEnvConfig& policy_config, const CostConfig& cost) {
    return std::make_unique<PolicyEnv>(policy_config, cost);
}

}  // namespace epigym
