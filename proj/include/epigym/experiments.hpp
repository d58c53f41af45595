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
#include <string>

#include "epigym/data_io.hpp"
#include "epigym/rl.hpp"
#include "epigym/search.hpp"

namespace epigym {

enum class ExperimentKind { Calibrate, OptimizePolicy, QLearn };

std::string_view to_string(ExperimentKind kind);

/// A batch experiment as accepted by the service and the CLI.
///
/// JSON form:
///   {"kind": "calibrate" | "optimize_policy" | "qlearn",
///    "env_type": "calibration" | "policy" | "cost",
///    "env_config": {...},
///    "algorithm": {"name": "bo" | "random" | "exhaustive", "budget": 20, ...},
///    "seed": 0}
struct ExperimentRequest {
    ExperimentKind kind = ExperimentKind::Calibrate;
    std::string env_type = "calibration";
    nlohmann::json env_config = nlohmann::json::object();
    nlohmann::json algorithm = nlohmann::json::object();
    std::uint64_t seed = 0;

    // Throws ConfigInvalid for malformed or kind-incompatible requests.
    static ExperimentRequest from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    // Builds the environment and algorithm settings without running anything.
    void validate() const;
};

// Levels used for open-loop policy search when the request names none.
std::vector<std::int64_t> default_policy_levels();

BOConfig bo_config_from_json(const nlohmann::json& algorithm, std::uint64_t seed);
QLearnConfig qlearn_config_from_json(const nlohmann::json& algorithm, std::uint64_t seed);
DiscretizerConfig discretizer_config_from_json(const nlohmann::json& algorithm);

/// Runs the experiment to completion on the calling thread and returns its
/// result document. With include_volatile=false, record ids and timestamps
/// are dropped so equal-seed runs produce identical documents.
nlohmann::json run_experiment(const ExperimentRequest& request, const Ledger* ledger = nullptr,
                              bool include_volatile = true);

}  // namespace epigym
