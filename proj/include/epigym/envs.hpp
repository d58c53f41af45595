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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epigym/epi_models.hpp"
#include "epigym/sim_core.hpp"

namespace epigym {

enum class ModelKind { SirdDirect, SirdStringency, ChainBinomial };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

// Days per decision step in the planning environments.
inline constexpr int kDaysPerStep = 14;

struct CaseSeries {
    std::vector<std::string> dates;  // ISO-8601, consecutive days
    std::vector<double> cumulative_cases;

    std::size_t size() const { return dates.size(); }
    // ConfigInvalid on length mismatch, empty series, bad dates or decreasing counts.
    void validate() const;
};

// Days since 1970-01-01 for a YYYY-MM-DD string; nullopt if malformed.
std::optional<long> parse_iso_date(std::string_view text);
std::string format_iso_date(long days_since_epoch);

struct ParamBounds {
    double lower = 0.0;
    double upper = 1.0;
};

struct CalibrationConfig {
    ModelKind model_kind = ModelKind::SirdDirect;
    double population = 1e5;
    // Keys are calibration_parameter_names(model_kind).
    std::map<std::string, ParamBounds> param_bounds;
    CaseSeries series;
    // Daily stringency levels driving SirdStringency fits; missing days use the last entry, empty means 0.
    std::vector<std::int64_t> stringency;
    int substeps_per_day = 4;
    int replicates = 5;

    void validate() const;
};

// Free parameters in action-coordinate order.
std::vector<std::string> calibration_parameter_names(ModelKind kind);

CalibrationConfig default_calibration_config(ModelKind kind);

// Noiseless cumulative-case curve from the deterministic SIRD model, `days` entries long.
CaseSeries synthetic_case_series(const SirdParams& truth, double population, double initial_infected, int days,
                                 std::string_view start_date = "2020-03-01", int substeps_per_day = 4);

// The series shipped as the default calibration target.
CaseSeries bundled_case_series();

struct PolicyEnvConfig {
    ModelKind model_kind = ModelKind::SirdStringency;
    StringencyLink link;
    CompartmentState init = CompartmentState::from_counts(1e6 - 100.0, 100.0, 0.0, 0.0);
    int horizon = 12;
    double gamma = 0.1;
    double mu = 0.01;
    int substeps_per_day = 4;

    void validate() const;
};

struct CostConfig {
    double c0 = 1000.0;        // currency per day at full stringency
    double exponent = 1.0;     // p >= 1
    double value_per_life_year = 50000.0;
    double life_years_per_death = 10.0;

    void validate() const;
};

/// Negative root-mean-square error in persons; 0 is the best attainable value.
double calibration_reward(const std::vector<double>& simulated, const std::vector<double>& observed);

/// -(14 c0 (level/99)^p + new_deaths * life years per death * value per life year)
double cost_reward(std::int64_t level, double new_deaths, const CostConfig& cost);

class CalibrationEnv final : public Environment {
public:
    explicit CalibrationEnv(CalibrationConfig config);

    const ActionSpace& action_space() const override { return space_; }
    EnvDescription describe() const override;

    // Affine map of unit-box coordinates onto param_bounds, in parameter-name order.
    std::vector<double> denormalize(const std::vector<double>& unit) const;
    std::vector<double> normalize(const std::vector<double>& params) const;

    // Simulated cumulative cases (persons) for the given denormalized parameters;
    // stochastic models average `replicates` runs seeded from `seed`.
    std::vector<double> simulate_curve(const std::vector<double>& params, std::uint64_t seed) const;

    const CalibrationConfig& config() const { return config_; }

protected:
    std::vector<double> do_reset(std::uint64_t seed) override;
    StepResult do_step(const Action& action) override;

private:
    std::vector<double> run_once(const std::vector<double>& params, std::uint64_t seed) const;

    CalibrationConfig config_;
    std::vector<std::string> names_;
    ActionSpace space_;
    Rng rng_;
};

/// Stringency planning environment. Each step holds one level for 14 days.
/// Without a CostConfig the reward is minus the new cases in the window;
/// with one it is cost_reward. Dynamics and observations do not depend on
/// which reward is used.
class PolicyEnv final : public Environment {
public:
    explicit PolicyEnv(PolicyEnvConfig config, std::optional<CostConfig> cost = std::nullopt);

    const ActionSpace& action_space() const override { return space_; }
    EnvDescription describe() const override;

    const PolicyEnvConfig& config() const { return config_; }
    const std::optional<CostConfig>& cost() const { return cost_; }
    const CompartmentState& state() const { return state_; }
    // Daily states since the last reset, including the initial one.
    const Trajectory& trajectory() const { return trajectory_; }

protected:
    std::vector<double> do_reset(std::uint64_t seed) override;
    StepResult do_step(const Action& action) override;

private:
    PolicyEnvConfig config_;
    std::optional<CostConfig> cost_;
    ActionSpace space_;
    CompartmentState state_;
    Trajectory trajectory_;
    Rng rng_;
    int day_ = 0;
};

std::unique_ptr<CalibrationEnv> make_calibration_env(const CalibrationConfig& config);
std::unique_ptr<PolicyEnv> make_policy_env(const PolicyEnvConfig& config);
std::unique_ptr<PolicyEnv> make_cost_env(const PolicyEnvConfig& policy_config, const CostConfig& cost);

// JSON forms. Parsing fills defaults for absent keys and rejects unknown ones.
nlohmann::json to_json(const CaseSeries& s);
nlohmann::json to_json(const CalibrationConfig& c);
nlohmann::json to_json(const PolicyEnvConfig& c);
nlohmann::json to_json(const CostConfig& c);
CaseSeries case_series_from_json(const nlohmann::json& j);
CalibrationConfig calibration_config_from_json(const nlohmann::json& j);
PolicyEnvConfig policy_config_from_json(const nlohmann::json& j);
CostConfig cost_config_from_json(const nlohmann::json& j);

/// Builds "calibration", "policy" or "cost" environments from their JSON
/// config. A cost config is a policy config plus a "cost" object.
std::unique_ptr<Environment> make_environment(std::string_view env_type, const nlohmann::json& config);

}  // namespace epigym
