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
#include "epigym/service.hpp"

#include "httplib.h"

#include "epigym/envs.hpp"
#include "epigym/error.hpp"

namespace epigym {

using nlohmann::json;

json error_body(std::string_view code, std::string_view message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

namespace {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::ActionOutOfSpace: return 422;
        case ErrorCode::EpisodeFinished:
        case ErrorCode::NotReset: return 409;
        case ErrorCode::UnstableStep:
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::IoError: return 500;
        default: return 400;
    }
}

ServiceResponse from_error(const Error& e) { return {http_status(e.code()), error_body(to_string(e.code()), e.what())}; }

ServiceResponse not_found(std::string_view code, const std::string& id) {
    return {404, error_body(code, "no such id '" + id + "'")};
}

std::string_view state_name(int s) {
    switch (s) {
        case 0: return "fresh";
        case 1: return "running";
        default: return "done";
    }
}

}  // namespace

Service::Service(Options options) : ledger_(std::move(options.ledger_path)) {
    const std::size_t n = std::max<std::size_t>(1, options.experiment_workers);
    for (std::size_t k = 0; k < n; ++k) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
    stop();
    {
        std::lock_guard lock(runs_lock_);
        shutting_down_ = true;
    }
    queue_cv_.notify_all();
    for (auto& w : workers_) w.join();
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& env_id) const {
    std::shared_lock lock(sessions_lock_);
    auto it = sessions_.find(env_id);
    return it == sessions_.end() ? nullptr : it->second;
}

json Service::session_json(const Session& s) {
    return {{"env_id", s.env_id},
            {"env_type", s.env_type},
            {"config", s.config},
            {"config_digest", config_digest(s.config)},
            {"created_at", s.created_at},
            {"state", state_name(static_cast<int>(s.state))},
            {"step_index", s.env->needs_reset() ? 0 : s.env->step_index()},
            {"horizon", s.env->horizon()},
            {"seed", s.seed},
            {"action_space", s.env->action_space().to_json()},
            {"observation_labels", s.env->describe().observation_labels}};
}

ServiceResponse Service::create_environment(const json& body) {
    try {
        if (!body.is_object() || !body.contains("env_type") || !body["env_type"].is_string())
            throw Error(ErrorCode::ConfigInvalid, "request needs a string 'env_type'");
        const std::string env_type = body["env_type"].get<std::string>();
        const json config = body.contains("config") ? body["config"] : json::object();
        auto session = std::make_shared<Session>();
        session->env = make_environment(env_type, config);
        session->env_id = new_uuid();
        session->env_type = env_type;
        session->config = session->env->describe().config;
        session->created_at = utc_timestamp_now();
        {
            std::unique_lock lock(sessions_lock_);
            sessions_[session->env_id] = session;
        }
        return {201, {{"env_id", session->env_id}}};
    } catch (const Error& e) {
        return from_error(e);
    }
}

ServiceResponse Service::reset_environment(const std::string& env_id, const json& body) {
    auto s = find_session(env_id);
    if (!s) return not_found("UnknownEnv", env_id);
    std::uint64_t seed = 0;
    if (body.is_object() && body.contains("seed")) {
        const auto& v = body["seed"];
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            return {400, error_body("ConfigInvalid", "seed must be a nonnegative integer")};
        seed = body["seed"].get<std::uint64_t>();
    }
    std::lock_guard lock(s->lock);
    try {
        auto obs = s->env->reset(seed);
        s->seed = seed;
        s->state = SessionState::Running;
        return {200, {{"observation", obs}}};
    } catch (const Error& e) {
        return from_error(e);
    }
}

ServiceResponse Service::step_environment(const std::string& env_id, const json& body) {
    auto s = find_session(env_id);
    if (!s) return not_found("UnknownEnv", env_id);
    if (!body.is_object() || !body.contains("action"))
        return {400, error_body("ConfigInvalid", "request needs an 'action' field")};
    std::lock_guard lock(s->lock);
    try {
        if (s->state == SessionState::Fresh) throw Error(ErrorCode::NotReset, "reset the environment before stepping");
        if (s->state == SessionState::Done) throw Error(ErrorCode::EpisodeFinished, "episode finished; reset to continue");
        const Action action = Action::from_json(body["action"]);
        const StepResult r = s->env->step(action);
        if (r.done) s->state = SessionState::Done;
        EvalRecord rec;
        rec.run_id = new_uuid();
        rec.env_type = s->env_type;
        rec.config_digest = config_digest(s->config);
        rec.algorithm = "api_session";
        rec.seed = s->seed;
        rec.action = action.to_json();
        rec.reward = r.reward;
        rec.info_summary = r.info;
        rec.timestamp = utc_timestamp_now();
        ledger_.append(rec);
        json out = to_json(r);
        out["step_index"] = s->env->step_index();
        return {200, out};
    } catch (const Error& e) {
        return from_error(e);
    }
}

ServiceResponse Service::get_environment(const std::string& env_id) const {
    auto s = find_session(env_id);
    if (!s) return not_found("UnknownEnv", env_id);
    std::lock_guard lock(s->lock);
    return {200, session_json(*s)};
}

ServiceResponse Service::delete_environment(const std::string& env_id) {
    std::unique_lock lock(sessions_lock_);
    if (sessions_.erase(env_id) == 0) return not_found("UnknownEnv", env_id);
    return {200, {{"deleted", env_id}}};
}

ServiceResponse Service::submit_experiment(const json& body) {
    try {
        auto run = std::make_shared<Run>();
        run->request = ExperimentRequest::from_json(body);
        run->run_id = new_uuid();
        {
            std::lock_guard lock(runs_lock_);
            runs_[run->run_id] = run;
            queue_.push_back(run);
        }
        queue_cv_.notify_one();
        return {202, {{"run_id", run->run_id}, {"status", "pending"}}};
    } catch (const Error& e) {
        return from_error(e);
    }
}

ServiceResponse Service::get_experiment(const std::string& run_id) const {
    std::lock_guard lock(runs_lock_);
    auto it = runs_.find(run_id);
    if (it == runs_.end()) return not_found("UnknownRun", run_id);
    const Run& run = *it->second;
    json out = {{"run_id", run.run_id}, {"status", run.status}, {"request", run.request.to_json()}, {"result", run.result}};
    if (!run.error.is_null()) out["error"] = run.error;
    return {200, out};
}

ServiceResponse Service::query_ledger(const std::map<std::string, std::string>& params) const {
    try {
        LedgerQuery q;
        for (const auto& [key, value] : params) {
            if (value.empty()) continue;
            if (key == "env_type") q.env_type = value;
            else if (key == "algorithm") q.algorithm = value;
            else if (key == "config_digest") q.config_digest = value;
            else if (key == "limit") {
                std::size_t pos = 0;
                long long n = 0;
                try {
                    n = std::stoll(value, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos != value.size() || n < 1) throw Error(ErrorCode::ConfigInvalid, "limit must be a positive integer");
                q.limit = static_cast<std::size_t>(n);
            } else {
                throw Error(ErrorCode::ConfigInvalid, "unknown query parameter '" + key + "'");
            }
        }
        const auto res = epigym::query_ledger(ledger_.path(), q);
        json records = json::array();
        for (const auto& r : res.records) records.push_back(r.to_json());
        return {200, {{"records", records}, {"skipped_lines", res.skipped_lines}}};
    } catch (const Error& e) {
        return from_error(e);
    }
}

void Service::worker_loop() {
    for (;;) {
        std::shared_ptr<Run> run;
        {
            std::unique_lock lock(runs_lock_);
            queue_cv_.wait(lock, [this] { return shutting_down_ || !queue_.empty(); });
            if (shutting_down_) return;
            run = queue_.front();
            queue_.pop_front();
            run->status = "running";
        }
        json result;
        json error;
        try {
            result = run_experiment(run->request, &ledger_);
        } catch (const Error& e) {
            error = error_body(to_string(e.code()), e.what())["error"];
        } catch (const std::exception& e) {
            error = error_body("InternalError", e.what())["error"];
        }
        std::lock_guard lock(runs_lock_);
        if (error.is_null()) {
            run->result = std::move(result);
            run->status = "done";
        } else {
            run->error = std::move(error);
            run->status = "failed";
        }
    }
}

// ---------------------------------------------------------------------------

void Service::mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const ServiceResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto parse_body = [](const httplib::Request& req, json& out) -> bool {
        if (req.body.empty()) {
            out = json::object();
            return true;
        }
        out = json::parse(req.body, nullptr, false);
        return !out.is_discarded();
    };
    auto bad_json = [reply](httplib::Response& res) {
        reply(res, {400, error_body("InvalidJson", "request body is not valid JSON")});
    };

    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/v1/environments", [=, this](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (!parse_body(req, body)) return bad_json(res);
        reply(res, create_environment(body));
    });
    server.Post(R"(/v1/environments/([^/]+)/reset)", [=, this](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (!parse_body(req, body)) return bad_json(res);
        reply(res, reset_environment(req.matches[1], body));
    });
    server.Post(R"(/v1/environments/([^/]+)/step)", [=, this](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (!parse_body(req, body)) return bad_json(res);
        reply(res, step_environment(req.matches[1], body));
    });
    server.Get(R"(/v1/environments/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
        reply(res, get_environment(req.matches[1]));
    });
    server.Delete(R"(/v1/environments/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
        reply(res, delete_environment(req.matches[1]));
    });
    server.Post("/v1/experiments", [=, this](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (!parse_body(req, body)) return bad_json(res);
        reply(res, submit_experiment(body));
    });
    server.Get(R"(/v1/experiments/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
        reply(res, get_experiment(req.matches[1]));
    });
    server.Get("/v1/ledger", [=, this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [k, v] : req.params) params[k] = v;
        reply(res, query_ledger(params));
    });
}

int Service::bind(const std::string& host, int port) {
    server_ = std::make_unique<httplib::Server>();
    mount(*server_);
    if (port == 0) return server_->bind_to_any_port(host);
    if (!server_->bind_to_port(host, port)) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void Service::serve() {
    if (!server_) throw Error(ErrorCode::IoError, "bind() must be called before serve()");
    server_->listen_after_bind();
}

void Service::stop() {
    if (server_) server_->stop();
}

}  // namespace epigym
