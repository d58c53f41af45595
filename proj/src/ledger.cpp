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
#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "epigym/data_io.hpp"
#include "epigym/error.hpp"

namespace epigym {

namespace {

std::mutex& writer_mutex_for(const std::filesystem::path& path) {
    static std::mutex registry_guard;
    static std::map<std::string, std::mutex> writers;
    std::error_code ec;
    auto key = std::filesystem::weakly_canonical(path, ec);
    std::lock_guard lock(registry_guard);
    return writers[ec ? path.string() : key.string()];
}

}  // namespace

Ledger::Ledger(std::filesystem::path path) : path_(std::move(path)) {}

void Ledger::append(const EvalRecord& record) const {
    const std::string line = canonical_json(record.to_json()) + "\n";
    std::lock_guard lock(writer_mutex_for(path_));
    const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorCode::IoError, "cannot open ledger " + path_.string() + ": " + std::strerror(errno));
    const ssize_t written = ::write(fd, line.data(), line.size());
    const int write_errno = errno;
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size()))
        throw Error(ErrorCode::IoError, "short write to ledger " + path_.string() + ": " + std::strerror(write_errno));
}

void append_eval(const std::filesystem::path& ledger_path, const EvalRecord& record) {
    Ledger(ledger_path).append(record);
}

LedgerQueryResult query_ledger(const std::filesystem::path& ledger_path, const LedgerQuery& query) {
    if (query.limit && *query.limit < 1) throw Error(ErrorCode::ConfigInvalid, "ledger query limit must be >= 1");
    LedgerQueryResult out;
    std::error_code ec;
    if (!std::filesystem::exists(ledger_path, ec)) return out;
    std::ifstream in(ledger_path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read ledger " + ledger_path.string());

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        EvalRecord rec;
        try {
            rec = EvalRecord::from_json(nlohmann::json::parse(line));
        } catch (const std::exception&) {
            ++out.skipped_lines;
            continue;
        }
        if (query.env_type && rec.env_type != *query.env_type) continue;
        if (query.config_digest && rec.config_digest != *query.config_digest) continue;
        if (query.algorithm && rec.algorithm != *query.algorithm) continue;
        out.records.push_back(std::move(rec));
        if (query.limit && out.records.size() >= *query.limit) break;
    }
    return out;
}

}  // namespace epigym
