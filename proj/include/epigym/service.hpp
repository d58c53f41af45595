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

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "epigym/data_io.hpp"
#include "epigym/experiments.hpp"

namespace httplib {
class Server;
}

namespace epigym {

struct ServiceResponse {
    int status = 200;
    nlohmann::json body;
};

/// In-process environment sessions and asynchronous experiments behind a
/// JSON API. The handler methods are transport independent; mount() wires
/// them to HTTP routes under /v1.
///
/// Requests against one session are serialized by a per-session mutex.
/// Experiments run on a fixed pool of worker threads.
class Service {
public:
    struct Options {
        std::filesystem::path ledger_path = "epigym_ledger.jsonl";
        std::size_t experiment_workers = 2;
    };

    explicit Service(Options options);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    ServiceResponse create_environment(const nlohmann::json& body);
    ServiceResponse reset_environment(const std::string& env_id, const nlohmann::json& body);
    ServiceResponse step_environment(const std::string& env_id, const nlohmann::json& body);
    ServiceResponse get_environment(const std::string& env_id) const;
    ServiceResponse delete_environment(const std::string& env_id);
    ServiceResponse submit_experiment(const nlohmann::json& body);
    ServiceResponse get_experiment(const std::string& run_id) const;
    ServiceResponse query_ledger(const std::map<std::string, std::string>& params) const;

    void mount(httplib::Server& server);

    // Binds (port 0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void serve();
    void stop();

    const Ledger& ledger() const { return ledger_; }

private:
    enum class SessionState { Fresh, Running, Done };

    struct Session {
        std::string env_id;
        std::string env_type;
        nlohmann::json config;
        std::string created_at;
        std::unique_ptr<Environment> env;
        SessionState state = SessionState::Fresh;
        std::uint64_t seed = 0;
        mutable std::mutex lock;
    };

    struct Run {
        std::string run_id;
        ExperimentRequest request;
        std::string status = "pending";
        nlohmann::json result;
        nlohmann::json error;
    };

    std::shared_ptr<Session> find_session(const std::string& env_id) const;
    static nlohmann::json session_json(const Session& s);
    void worker_loop();

    Ledger ledger_;

    mutable std::shared_mutex sessions_lock_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;

    mutable std::mutex runs_lock_;
    std::map<std::string, std::shared_ptr<Run>> runs_;
    std::deque<std::shared_ptr<Run>> queue_;
    std::condition_variable queue_cv_;
    bool shutting_down_ = false;
    std::vector<std::thread> workers_;

    std::unique_ptr<httplib::Server> server_;
};

// {"error": {"code": ..., "message": ...}}
nlohmann::json error_body(std::string_view code, std::string_view message);

}  // namespace epigym
