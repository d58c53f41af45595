#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include "epigym/service.hpp"
#include "httplib.h"
#include "json.hpp"

namespace epigym::testing {

// A Service listening on an ephemeral loopback port for the fixture's lifetime.
class LiveService {
public:
    explicit LiveService(std::filesystem::path ledger_path) : service_(Service::Options{std::move(ledger_path), 2}) {
        port_ = service_.bind("127.0.0.1", 0);
        thread_ = std::thread([this] { service_.serve(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
        client_->set_read_timeout(60, 0);
        for (int i = 0; i < 200 && !client_->Get("/v1/ledger?limit=1"); ++i)
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ~LiveService() {
        service_.stop();
        thread_.join();
    }

    struct Reply {
        int status = 0;
        nlohmann::json body;
    };

    Reply post(const std::string& path, const nlohmann::json& body) { return wrap(client_->Post(path, body.dump(), "application/json")); }
    Reply post_raw(const std::string& path, const std::string& body) { return wrap(client_->Post(path, body, "application/json")); }
    Reply get(const std::string& path) { return wrap(client_->Get(path)); }
    Reply del(const std::string& path) { return wrap(client_->Delete(path)); }

    Service& service() { return service_; }
    int port() const { return port_; }

private:
    static Reply wrap(const httplib::Result& r) {
        if (!r) return {};
        return {r->status, r->body.empty() ? nlohmann::json() : nlohmann::json::parse(r->body, nullptr, false)};
    }

    Service service_;
    int port_ = 0;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace epigym::testing
