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
#include <set>

#include "epigym/envs.hpp"
#include "epigym/error.hpp"
#include "json_get.hpp"

namespace epigym {

namespace {

using nlohmann::json;

void require_object(const json& j, std::string_view what) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view what) {
    const std::set<std::string_view> allowed(known);
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key))
            throw Error(ErrorCode::ConfigInvalid, "unknown key '" + key + "' in " + std::string(what));
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    out = detail::strict_get<T>(j.at(key), key);
}

}  // namespace

json to_json(const CaseSeries& s) { return {{"dates", s.dates}, {"cumulative_cases", s.cumulative_cases}}; }

CaseSeries case_series_from_json(const json& j) {
    require_object(j, "series");
    reject_unknown(j, {"dates", "cumulative_cases"}, "series");
    CaseSeries s;
    read(j, "dates", s.dates);
    read(j, "cumulative_cases", s.cumulative_cases);
    s.validate();
    return s;
}

json to_json(const CalibrationConfig& c) {
    json bounds = json::object();
    for (const auto& [name, b] : c.param_bounds) bounds[name] = {b.lower, b.upper};
    return {{"model_kind", to_string(c.model_kind)},
            {"population", c.population},
            {"param_bounds", bounds},
            {"series", to_json(c.series)},
            {"stringency", c.stringency},
            {"substeps_per_day", c.substeps_per_day},
            {"replicates", c.replicates}};
}

CalibrationConfig calibration_config_from_json(const json& j) {
    require_object(j, "calibration config");
    reject_unknown(j, {"model_kind", "population", "param_bounds", "series", "stringency", "substeps_per_day", "replicates"},
                   "calibration config");
    ModelKind kind = ModelKind::SirdDirect;
    if (j.contains("model_kind")) {
        if (!j["model_kind"].is_string()) throw Error(ErrorCode::ConfigInvalid, "model_kind must be a string");
        kind = model_kind_from_string(j["model_kind"].get<std::string>());
    }
    CalibrationConfig c = default_calibration_config(kind);
    read(j, "population", c.population);
    read(j, "stringency", c.stringency);
    read(j, "substeps_per_day", c.substeps_per_day);
    read(j, "replicates", c.replicates);
    if (j.contains("series")) c.series = case_series_from_json(j["series"]);
    if (j.contains("param_bounds")) {
        const auto& pb = j["param_bounds"];
        require_object(pb, "param_bounds");
        for (const auto& [name, v] : pb.items()) {
            if (!c.param_bounds.contains(name))
                throw Error(ErrorCode::ConfigInvalid, "'" + name + "' is not a free parameter of this model");
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw Error(ErrorCode::ConfigInvalid, "bounds for '" + name + "' must be [lower, upper]");
            c.param_bounds[name] = {v[0].get<double>(), v[1].get<double>()};
        }
    }
    c.validate();
    return c;
}

json to_json(const PolicyEnvConfig& c) {
    return {{"model_kind", to_string(c.model_kind)},
            {"link", {{"base_beta", c.link.base_beta}, {"kappa", c.link.kappa}}},
            {"init", {{"s", c.init.s}, {"i", c.init.i}, {"r", c.init.r}, {"d", c.init.d}}},
            {"horizon", c.horizon},
            {"gamma", c.gamma},
            {"mu", c.mu},
            {"substeps_per_day", c.substeps_per_day}};
}

namespace {

PolicyEnvConfig policy_fields_from_json(const json& j) {
    PolicyEnvConfig c;
    if (j.contains("model_kind")) {
        if (!j["model_kind"].is_string()) throw Error(ErrorCode::ConfigInvalid, "model_kind must be a string");
        c.model_kind = model_kind_from_string(j["model_kind"].get<std::string>());
    }
    if (j.contains("link")) {
        const auto& l = j["link"];
        require_object(l, "link");
        reject_unknown(l, {"base_beta", "kappa"}, "link");
        read(l, "base_beta", c.link.base_beta);
        read(l, "kappa", c.link.kappa);
    }
    if (j.contains("init")) {
        const auto& in = j["init"];
        require_object(in, "init");
        reject_unknown(in, {"s", "i", "r", "d"}, "init");
        double s = c.init.s, i = c.init.i, r = c.init.r, d = c.init.d;
        read(in, "s", s);
        read(in, "i", i);
        read(in, "r", r);
        read(in, "d", d);
        c.init = CompartmentState::from_counts(s, i, r, d);
    }
    read(j, "horizon", c.horizon);
    read(j, "gamma", c.gamma);
    read(j, "mu", c.mu);
    read(j, "substeps_per_day", c.substeps_per_day);
    c.validate();
    return c;
}

}  // namespace

PolicyEnvConfig policy_config_from_json(const json& j) {
    require_object(j, "policy config");
    reject_unknown(j, {"model_kind", "link", "init", "horizon", "gamma", "mu", "substeps_per_day"}, "policy config");
    return policy_fields_from_json(j);
}

json to_json(const CostConfig& c) {
    return {{"c0", c.c0},
            {"exponent", c.exponent},
            {"value_per_life_year", c.value_per_life_year},
            {"life_years_per_death", c.life_years_per_death}};
}

CostConfig cost_config_from_json(const json& j) {
    require_object(j, "cost config");
    reject_unknown(j, {"c0", "exponent", "value_per_life_year", "life_years_per_death"}, "cost config");
    CostConfig c;
    read(j, "c0", c.c0);
    read(j, "exponent", c.exponent);
    read(j, "value_per_life_year", c.value_per_life_year);
    read(j, "life_years_per_death", c.life_years_per_death);
    c.validate();
    return c;
}

std::unique_ptr<Environment> make_environment(std::string_view env_type, const json& config) {
    const json cfg = config.is_null() ? json::object() : config;
    if (env_type == "calibration") return make_calibration_env(calibration_config_from_json(cfg));
    if (env_type == "policy") return make_policy_env(policy_config_from_json(cfg));
    if (env_type == "cost") {
        require_object(cfg, "cost env config");
        reject_unknown(cfg, {"model_kind", "link", "init", "horizon", "gamma", "mu", "substeps_per_day", "cost"},
                       "cost env config");
        const auto policy = policy_fields_from_json(cfg);
        const auto cost = cost_config_from_json(cfg.contains("cost") ? cfg["cost"] : json::object());
        return make_cost_env(policy, cost);
    }
    throw Error(ErrorCode::UnknownEnvType, "unknown env_type '" + std::string(env_type) + "'");
}

}  // namespace epigym
