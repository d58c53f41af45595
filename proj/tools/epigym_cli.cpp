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
// epigym_cli: batch calibration, policy optimization, simulation and the HTTP service.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "epigym/data_io.hpp"
#include "epigym/envs.hpp"
#include "epigym/error.hpp"
#include "epigym/experiments.hpp"
#include "epigym/service.hpp"

namespace {

using nlohmann::json;
using namespace epigym;

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

bool is_validation(ErrorCode code) {
    switch (code) {
        case ErrorCode::IoError:
        case ErrorCode::UnstableStep:
        case ErrorCode::NotPositiveDefinite: return false;
        default: return true;
    }
}

json load_json_file(const std::string& path) {
    if (path.empty()) return json::object();
    const auto text = read_file(path);
    auto j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::ConfigInvalid, path + " is not a JSON object");
    return j;
}

std::vector<std::int64_t> parse_levels(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != item.size()) throw Error(ErrorCode::ConfigInvalid, "bad level '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorCode::ConfigInvalid, "policy needs at least one level");
    return out;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? v : fallback;
}

Service* g_service = nullptr;

void handle_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epigym: epidemic models as reset/step environments, with optimizers"};
    app.require_subcommand(1);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Fit model parameters to a case series");
    std::string cal_model = "sird_direct";
    std::string cal_data;
    std::string cal_algorithm = "bo";
    int cal_budget = 20;
    int cal_init = 5;
    std::uint64_t cal_seed = 0;
    std::string cal_ledger;
    std::string cal_out;
    std::string cal_config;
    calibrate->add_option("--model", cal_model, "sird_direct | sird_stringency | chain_binomial")
        ->check(CLI::IsMember({"sird_direct", "sird_stringency", "chain_binomial"}));
    calibrate->add_option("--data", cal_data, "CSV with header date,cumulative_cases (default: bundled synthetic)")
        ->check(CLI::ExistingFile);
    calibrate->add_option("--algorithm", cal_algorithm, "bo | random")->check(CLI::IsMember({"bo", "random"}));
    calibrate->add_option("--budget", cal_budget, "number of evaluations");
    calibrate->add_option("--init-random", cal_init, "random evaluations before the surrogate takes over");
    calibrate->add_option("--seed", cal_seed);
    calibrate->add_option("--ledger", cal_ledger, "JSON-lines ledger to append evaluations to");
    calibrate->add_option("--out", cal_out, "result JSON path (default stdout)");
    calibrate->add_option("--config", cal_config, "calibration config JSON overriding defaults")->check(CLI::ExistingFile);

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Search stringency policies");
    std::string opt_env = "policy";
    std::string opt_algorithm = "bo";
    int opt_budget = 20;
    int opt_episodes = 500;
    std::uint64_t opt_seed = 0;
    std::string opt_out;
    std::string opt_ledger;
    std::string opt_config;
    std::string opt_levels;
    optimize->add_option("--env", opt_env, "policy | cost")->check(CLI::IsMember({"policy", "cost"}));
    optimize->add_option("--algorithm", opt_algorithm, "bo | qlearn | random | exhaustive")
        ->check(CLI::IsMember({"bo", "qlearn", "random", "exhaustive"}));
    optimize->add_option("--budget", opt_budget, "evaluations for bo/random");
    optimize->add_option("--episodes", opt_episodes, "training episodes for qlearn");
    optimize->add_option("--seed", opt_seed);
    optimize->add_option("--out", opt_out, "result JSON path (default stdout)");
    optimize->add_option("--ledger", opt_ledger);
    optimize->add_option("--config", opt_config, "environment config JSON")->check(CLI::ExistingFile);
    optimize->add_option("--levels", opt_levels, "comma-separated levels per step for bo/random/exhaustive");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Play a fixed policy and export the daily trajectory");
    std::string sim_env = "policy";
    std::string sim_policy = "0";
    std::string sim_export = "csv";
    std::uint64_t sim_seed = 0;
    std::string sim_config;
    std::string sim_out;
    simulate->add_option("--env", sim_env, "policy | cost")->check(CLI::IsMember({"policy", "cost"}));
    simulate->add_option("--policy", sim_policy, "comma-separated levels, one per step (a single value is held)");
    simulate->add_option("--export", sim_export, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--seed", sim_seed);
    simulate->add_option("--config", sim_config)->check(CLI::ExistingFile);
    simulate->add_option("--out", sim_out);

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    int port = std::stoi(env_or("EPIGYM_PORT", "8080"));
    std::string serve_ledger = env_or("EPIGYM_LEDGER_PATH", "epigym_ledger.jsonl");
    std::string host = "127.0.0.1";
    serve->add_option("--port", port);
    serve->add_option("--ledger", serve_ledger);
    serve->add_option("--host", host);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        std::optional<Ledger> ledger;

        if (*calibrate) {
            json env_config = load_json_file(cal_config);
            env_config["model_kind"] = cal_model;
            if (!cal_data.empty()) env_config["series"] = to_json(load_case_series_file(cal_data));
            ExperimentRequest req;
            req.kind = ExperimentKind::Calibrate;
            req.env_type = "calibration";
            req.env_config = env_config;
            req.algorithm = {{"name", cal_algorithm}, {"budget", cal_budget}};
            if (cal_algorithm == "bo") req.algorithm["init_random"] = std::min(cal_init, std::max(1, cal_budget - 1));
            req.seed = cal_seed;
            if (!cal_ledger.empty()) ledger.emplace(cal_ledger);
            const auto result = run_experiment(req, ledger ? &*ledger : nullptr, !cal_ledger.empty());
            write_output(cal_out, result.dump(2));
            return 0;
        }

        if (*optimize) {
            ExperimentRequest req;
            req.env_type = opt_env;
            req.env_config = load_json_file(opt_config);
            req.seed = opt_seed;
            if (opt_algorithm == "qlearn") {
                req.kind = ExperimentKind::QLearn;
                req.algorithm = {{"name", "qlearn"}, {"episodes", opt_episodes}};
            } else {
                req.kind = ExperimentKind::OptimizePolicy;
                req.algorithm = {{"name", opt_algorithm}, {"budget", opt_budget}};
                if (opt_algorithm == "bo") req.algorithm["init_random"] = std::min(5, std::max(1, opt_budget - 1));
                if (!opt_levels.empty()) req.algorithm["levels"] = parse_levels(opt_levels);
            }
            if (!opt_ledger.empty()) ledger.emplace(opt_ledger);
            const auto result = run_experiment(req, ledger ? &*ledger : nullptr, !opt_ledger.empty());
            write_output(opt_out, result.dump(2));
            return 0;
        }

        if (*simulate) {
            auto env = make_environment(sim_env, load_json_file(sim_config));
            auto* policy_env = dynamic_cast<PolicyEnv*>(env.get());
            const auto levels = parse_levels(sim_policy);
            if (levels.size() != 1 && levels.size() != env->horizon())
                throw Error(ErrorCode::ConfigInvalid, "policy must have one level or exactly " +
                                                          std::to_string(env->horizon()) + " levels");
            std::vector<Action> actions(levels.begin(), levels.end());
            const auto episode = run_episode(*env, sequence_policy(actions), sim_seed);
            write_output(sim_out, export_trajectory(policy_env->trajectory(),
                                                    sim_export == "json" ? ExportFormat::Json : ExportFormat::Csv));
            std::cerr << "total_reward " << format_double(episode.total_reward) << " cumulative_cases "
                      << format_double(policy_env->trajectory().cumulative_cases.back()) << "\n";
            return 0;
        }

        if (*serve) {
            Service service({serve_ledger, 2});
            const int bound = service.bind(host, port);
            g_service = &service;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            std::cerr << "epigym listening on " << host << ":" << bound << " (ledger " << serve_ledger << ")\n";
            service.serve();
            g_service = nullptr;
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return is_validation(e.code()) ? kExitValidation : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
