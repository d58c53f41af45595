#include "doctest.h"

#include <fstream>

#include "epigym/envs.hpp"
#include "epigym/error.hpp"
#include "epigym/experiments.hpp"
#include "process.hpp"
#include "temp_path.hpp"

using namespace epigym;
using epigym::testing::run_process;
using epigym::testing::TempPath;
using nlohmann::json;

namespace {

const std::string kCli = EPIGYM_CLI_PATH;

ErrorCode request_error(const json& j) {
    try {
        ExperimentRequest::from_json(j).validate();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an epigym::Error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("experiment requests round-trip and validate") {
    const json j = {{"kind", "optimize_policy"},
                    {"env_type", "policy"},
                    {"env_config", {{"horizon", 3}}},
                    {"algorithm", {{"name", "exhaustive"}}},
                    {"seed", 4}};
    const auto req = ExperimentRequest::from_json(j);
    CHECK(req.kind == ExperimentKind::OptimizePolicy);
    CHECK(ExperimentRequest::from_json(req.to_json()).to_json() == req.to_json());
    CHECK_NOTHROW(req.validate());

    CHECK(request_error({{"kind", "dance"}}) == ErrorCode::ConfigInvalid);
    CHECK(request_error({{"kind", "calibrate"}, {"env_type", "policy"}}) == ErrorCode::ConfigInvalid);
    CHECK(request_error({{"kind", "calibrate"}, {"colour", 1}}) == ErrorCode::ConfigInvalid);
    CHECK(request_error({{"kind", "calibrate"}, {"seed", -1}}) == ErrorCode::ConfigInvalid);
    CHECK(request_error({{"kind", "calibrate"}, {"algorithm", {{"budget", 20.5}}}}) == ErrorCode::ConfigInvalid);
    CHECK(request_error({{"kind", "optimize_policy"}, {"env_type", "policy"}, {"env_config", {{"horizon", 0}}}}) ==
          ErrorCode::ConfigInvalid);
    CHECK(request_error({{"kind", "calibrate"}, {"algorithm", {{"name", "bo"}, {"budget", 1}}}}) ==
          ErrorCode::BudgetTooSmall);
    CHECK(request_error({{"kind", "calibrate"}, {"algorithm", {{"name", "qlearn"}}}}) == ErrorCode::ConfigInvalid);
}

TEST_CASE("algorithm configs from JSON") {
    const auto bo = bo_config_from_json({{"name", "bo"}, {"budget", 30}, {"init_random", 7}, {"ucb_beta", 2.0}}, 9);
    CHECK(bo.budget == 30);
    CHECK(bo.init_random == 7);
    CHECK(bo.ucb_beta == 2.0);
    CHECK(bo.seed == 9);
    CHECK(bo_config_from_json(json::object(), 0).budget == 20);
    const auto ql = qlearn_config_from_json({{"episodes", 40}, {"discount", 0.5}}, 3);
    CHECK(ql.episodes == 40);
    CHECK(ql.discount == 0.5);
    CHECK(discretizer_config_from_json({{"action_stride", 33}}).action_stride == 33);
    CHECK(default_policy_levels() == std::vector<std::int64_t>{0, 33, 66, 99});
}

TEST_CASE("calibration experiment returns parameters and curve") {
    ExperimentRequest req;
    req.kind = ExperimentKind::Calibrate;
    req.algorithm = {{"name", "bo"}, {"budget", 20}};
    req.seed = 2;
    const auto result = run_experiment(req, nullptr, false);
    CHECK(result["history"].size() == 20);
    CHECK(result["best_parameters"].contains("beta"));
    CHECK(result["best_curve"].size() == bundled_case_series().cumulative_cases.size());
    CHECK(result == run_experiment(req, nullptr, false));
    CHECK_FALSE(result["history"][0].contains("run_id"));
}

TEST_CASE("policy optimization over a small open-loop space") {
    ExperimentRequest req;
    req.kind = ExperimentKind::OptimizePolicy;
    req.env_type = "policy";
    req.env_config = {{"horizon", 3}};
    req.algorithm = {{"name", "exhaustive"}};
    const auto ex = run_experiment(req);
    CHECK(ex["history"].size() == 64);
    CHECK(ex["best_policy_levels"].size() == 3);

    req.algorithm = {{"name", "bo"}, {"budget", 64}};
    const auto bo = run_experiment(req);
    CHECK(bo["best_reward"] == ex["best_reward"]);
    CHECK(bo["best_policy_levels"] == ex["best_policy_levels"]);
}

TEST_CASE("q-learning experiment writes one record per episode") {
    TempPath path("exp_ledger");
    Ledger ledger(path.path());
    ExperimentRequest req;
    req.kind = ExperimentKind::QLearn;
    req.env_type = "cost";
    req.env_config = {{"horizon", 4}, {"cost", json::object()}};
    req.algorithm = {{"name", "qlearn"}, {"episodes", 15}};
    const auto result = run_experiment(req, &ledger);
    CHECK(result["greedy_policy_levels"].size() == 4);
    CHECK(result.contains("q_table"));
    CHECK(query_ledger(path.path()).records.size() == 15);
}

TEST_CASE("cli exit codes") {
    TempPath dir("cli_codes");
    std::filesystem::create_directories(dir.path());
    const auto csv = (dir.path() / "cases.csv").string();
    {
        std::ofstream(csv) << "date,cumulative_cases\n2020-03-01,10\n2020-03-02,9\n";
    }
    CHECK(run_process({kCli, "calibrate", "--data", csv, "--budget", "4"}).exit_code == 2);
    {
        std::ofstream(csv) << "date,cumulative_cases\n2020-03-01,10\n2020-03-02,12\n2020-03-03,20\n";
    }
    const auto ok = run_process({kCli, "calibrate", "--data", csv, "--budget", "4", "--init-random", "2"});
    CHECK(ok.exit_code == 0);
    CHECK(json::parse(ok.out)["history"].size() == 4);

    CHECK(run_process({kCli, "calibrate", "--budget", "1"}).exit_code == 2);
    CHECK(run_process({kCli, "calibrate", "--model", "nonsense"}).exit_code == 2);
    CHECK(run_process({kCli, "optimize", "--env", "weather"}).exit_code == 2);
    CHECK(run_process({kCli, "simulate", "--policy", "150"}).exit_code == 2);
    CHECK(run_process({kCli, "calibrate", "--data", "/nonexistent/cases.csv"}).exit_code == 2);
    CHECK(run_process({kCli, "bogus"}).exit_code == 2);
    CHECK(run_process({kCli, "optimize", "--out", "/nonexistent-dir/out.json", "--budget", "3", "--algorithm", "random"})
              .exit_code == 1);
}

TEST_CASE("cli simulate exports the daily trajectory") {
    const auto csv = run_process({kCli, "simulate", "--policy", "50", "--export", "csv"});
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("day,s,i,r,d,cumulative_cases\n", 0) == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 1 + 12 * kDaysPerStep + 1);
    const auto js = run_process({kCli, "simulate", "--policy", "0,99,0,99,0,99,0,99,0,99,0,99", "--export", "json"});
    REQUIRE(js.exit_code == 0);
    CHECK(json::parse(js.out).size() == 12 * kDaysPerStep + 1);
    CHECK(run_process({kCli, "simulate", "--policy", "0,99"}).exit_code == 2);
}

TEST_CASE("cli runs are reproducible across processes") {
    TempPath dir("cli_repro");
    std::filesystem::create_directories(dir.path());
    const auto a = (dir.path() / "a.json").string(), b = (dir.path() / "b.json").string();
    for (const auto& out : {a, b})
        CHECK(run_process({kCli, "optimize", "--env", "cost", "--algorithm", "bo", "--budget", "6", "--seed", "5",
                           "--out", out})
                  .exit_code == 0);
    CHECK(read_file(a) == read_file(b));
    CHECK(read_file(a).size() > 100);
}
