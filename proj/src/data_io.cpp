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
#include <openssl/sha.h>
#include <openssl/rand.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "epigym/data_io.hpp"
#include "epigym/error.hpp"

namespace epigym {

using nlohmann::json;

json EvalRecord::to_json() const {
    json info = json::object();
    for (const auto& [k, v] : info_summary) info[k] = v;
    return {{"run_id", run_id},     {"env_type", env_type}, {"config_digest", config_digest},
            {"algorithm", algorithm}, {"seed", seed},         {"action", action},
            {"reward", reward},       {"info_summary", info}, {"timestamp", timestamp}};
}

EvalRecord EvalRecord::from_json(const json& j) {
    EvalRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.env_type = j.at("env_type").get<std::string>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.algorithm = j.at("algorithm").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.action = j.at("action");
    r.reward = j.at("reward").get<double>();
    for (const auto& [k, v] : j.at("info_summary").items()) r.info_summary[k] = v.get<double>();
    r.timestamp = j.at("timestamp").get<std::string>();
    return r;
}

std::string canonical_json(const json& j) { return j.dump(); }

std::string config_digest(const json& config) {
    const std::string text = canonical_json(config);
    unsigned char hash[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), hash);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char b : hash) {
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xF]);
    }
    return out;
}

// RAND_bytes reseeds after fork, so child processes never repeat a parent's ids.
std::string new_uuid() {
    unsigned char b[16];
    if (RAND_bytes(b, sizeof b) != 1) throw Error(ErrorCode::IoError, "random source unavailable");
    b[6] = static_cast<unsigned char>((b[6] & 0x0F) | 0x40);
    b[8] = static_cast<unsigned char>((b[8] & 0x3F) | 0x80);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
        out.push_back(kHex[b[i] >> 4]);
        out.push_back(kHex[b[i] & 0x0F]);
    }
    return out;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::system_clock::to_time_t(now);
    const auto millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                  tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(millis));
    return buf;
}

EvalRecord make_eval_record(const EnvDescription& env, std::string algorithm, std::uint64_t seed, const json& action,
                            double reward, const Info& info) {
    EvalRecord r;
    r.run_id = new_uuid();
    r.env_type = env.env_type;
    r.config_digest = config_digest(env.config);
    r.algorithm = std::move(algorithm);
    r.seed = seed;
    r.action = action;
    r.reward = reward;
    r.info_summary = info;
    r.timestamp = utc_timestamp_now();
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_lines(std::string_view bytes) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < bytes.size()) {
        auto end = bytes.find('\n', start);
        if (end == std::string_view::npos) end = bytes.size();
        auto line = bytes.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

bool parse_number(std::string_view text, double& out) {
    if (text.empty()) return false;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

CaseSeries load_case_series(std::string_view bytes) {
    const auto lines = split_lines(bytes);
    if (lines.empty() || lines[0] != "date,cumulative_cases")
        throw Error(ErrorCode::ParseError, "line 1: header must be exactly 'date,cumulative_cases'", 1);

    CaseSeries series;
    std::optional<long> prev_day;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const std::size_t line_no = k + 1;
        const auto line = lines[k];
        if (line.empty()) {
            if (k + 1 == lines.size()) break;
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty row", line_no);
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected two fields", line_no);
        const auto date_text = line.substr(0, comma);
        const auto day = parse_iso_date(date_text);
        if (!day)
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line_no) + ": bad date '" + std::string(date_text) + "'", line_no);
        double count = 0.0;
        if (!parse_number(line.substr(comma + 1), count) || count < 0)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad cumulative_cases", line_no);
        if (prev_day) {
            if (*day <= *prev_day)
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": date out of order", line_no);
            if (*day != *prev_day + 1)
                throw Error(ErrorCode::GapError, "line " + std::to_string(line_no) + ": missing day before " +
                                                     std::string(date_text), line_no);
            if (count < series.cumulative_cases.back())
                throw Error(ErrorCode::MonotonicityError,
                            "line " + std::to_string(line_no) + ": cumulative_cases decreased", line_no);
        }
        prev_day = day;
        series.dates.emplace_back(date_text);
        series.cumulative_cases.push_back(count);
    }
    if (series.dates.empty()) throw Error(ErrorCode::ParseError, "no data rows", lines.size());
    return series;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CaseSeries load_case_series_file(const std::filesystem::path& path) { return load_case_series(read_file(path)); }

std::string case_series_to_csv(const CaseSeries& series) {
    std::string out = "date,cumulative_cases\n";
    for (std::size_t k = 0; k < series.size(); ++k)
        out += series.dates[k] + "," + format_double(series.cumulative_cases[k]) + "\n";
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string export_trajectory(const Trajectory& traj, ExportFormat format) {
    if (traj.days.empty()) throw Error(ErrorCode::ConfigInvalid, "cannot export an empty trajectory");
    if (format == ExportFormat::Json) {
        json rows = json::array();
        for (std::size_t t = 0; t < traj.days.size(); ++t) {
            const auto& st = traj.days[t];
            rows.push_back({{"day", t},
                            {"s", st.s},
                            {"i", st.i},
                            {"r", st.r},
                            {"d", st.d},
                            {"cumulative_cases", traj.cumulative_cases[t]}});
        }
        return rows.dump();
    }
    std::string out = "day,s,i,r,d,cumulative_cases\n";
    for (std::size_t t = 0; t < traj.days.size(); ++t) {
        const auto& st = traj.days[t];
        out += std::to_string(t) + "," + format_double(st.s) + "," + format_double(st.i) + "," + format_double(st.r) +
               "," + format_double(st.d) + "," + format_double(traj.cumulative_cases[t]) + "\n";
    }
    return out;
}

Trajectory parse_trajectory_csv(std::string_view bytes) {
    const auto lines = split_lines(bytes);
    if (lines.empty() || lines[0] != "day,s,i,r,d,cumulative_cases")
        throw Error(ErrorCode::ParseError, "line 1: bad trajectory header", 1);
    Trajectory traj;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (lines[k].empty()) continue;
        double fields[6];
        std::size_t start = 0;
        for (int f = 0; f < 6; ++f) {
            auto end = lines[k].find(',', start);
            if ((f < 5) == (end == std::string_view::npos))
                throw Error(ErrorCode::ParseError, "line " + std::to_string(k + 1) + ": expected six fields", k + 1);
            if (end == std::string_view::npos) end = lines[k].size();
            if (!parse_number(lines[k].substr(start, end - start), fields[f]))
                throw Error(ErrorCode::ParseError, "line " + std::to_string(k + 1) + ": bad number", k + 1);
            start = end + 1;
        }
        traj.days.push_back(CompartmentState::from_counts(fields[1], fields[2], fields[3], fields[4]));
        traj.cumulative_cases.push_back(fields[5]);
    }
    return traj;
}

}  // namespace epigym
