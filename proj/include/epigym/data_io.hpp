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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epigym/envs.hpp"
#include "epigym/sim_core.hpp"

namespace epigym {

/// One evaluation of one action, as stored in the shared ledger.
struct EvalRecord {
    std::string run_id;  // UUID, unique per record
    std::string env_type;
    std::string config_digest;
    std::string algorithm;
    std::uint64_t seed = 0;
    nlohmann::json action;
    double reward = 0.0;
    Info info_summary;
    std::string timestamp;  // ISO-8601 UTC

    nlohmann::json to_json() const;
    static EvalRecord from_json(const nlohmann::json& j);

    friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

// Sorted keys, shortest round-trip numbers, no whitespace.
std::string canonical_json(const nlohmann::json& j);
// Hex SHA-256 of canonical_json(config).
std::string config_digest(const nlohmann::json& config);

std::string new_uuid();
std::string utc_timestamp_now();

EvalRecord make_eval_record(const EnvDescription& env, std::string algorithm, std::uint64_t seed,
                            const nlohmann::json& action, double reward, const Info& info);

/// Append-only JSON-lines file. Each append is one write(2) of one full line
/// on an O_APPEND descriptor, serialized per path inside the process.
class Ledger {
public:
    explicit Ledger(std::filesystem::path path);

    void append(const EvalRecord& record) const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

void append_eval(const std::filesystem::path& ledger_path, const EvalRecord& record);

struct LedgerQuery {
    std::optional<std::string> env_type;
    std::optional<std::string> config_digest;
    std::optional<std::string> algorithm;
    std::optional<std::size_t> limit;
};

struct LedgerQueryResult {
    std::vector<EvalRecord> records;
    std::size_t skipped_lines = 0;  // unparseable lines
};

// A missing file reads as an empty ledger.
LedgerQueryResult query_ledger(const std::filesystem::path& ledger_path, const LedgerQuery& query = {});

/// Parses `date,cumulative_cases` CSV. Throws ParseError (with line number),
/// GapError for a missing day, MonotonicityError for a decreasing count.
CaseSeries load_case_series(std::string_view bytes);
CaseSeries load_case_series_file(const std::filesystem::path& path);
std::string case_series_to_csv(const CaseSeries& series);

enum class ExportFormat { Csv, Json };

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

std::string export_trajectory(const Trajectory& traj, ExportFormat format);
Trajectory parse_trajectory_csv(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace epigym
