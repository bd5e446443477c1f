#include <doctest.h>

#include <json.hpp>

#include "crmimo/verify.hpp"

using namespace crmimo;

TEST_CASE("bound-domination criterion passes clean and fails under the mutation fixture") {
    VerifyOptions opts;
    opts.seed = 20260808;
    const CriterionResult clean = run_single_criterion(4, opts);
    CHECK(clean.pass);
    CHECK(clean.name == "bound-domination");

    opts.mutation = Mutation::ChernoffConstant;
    const CriterionResult corrupted = run_single_criterion(4, opts);
    CHECK_FALSE(corrupted.pass);
    CHECK(corrupted.id == 4);  // the failure names the criterion
}

TEST_CASE("report formats carry per-criterion runtime and pass state") {
    std::vector<CriterionResult> results;
    results.push_back({1, "alpha", true, 0.25, "x=1", "fine"});
    results.push_back({2, "beta", false, 1.5, "y=2", "broken"});

    const std::string text = format_report(results);
    CHECK(text.find("[PASS] criterion 1") != std::string::npos);
    CHECK(text.find("[FAIL] criterion 2") != std::string::npos);
    CHECK(text.find("FAILED") != std::string::npos);
    CHECK_FALSE(all_passed(results));

    const auto doc = nlohmann::json::parse(report_json(results, 99));
    CHECK(doc["seed"] == 99);
    CHECK(doc["all_passed"] == false);
    REQUIRE(doc["criteria"].size() == 2);
    CHECK(doc["criteria"][0]["seconds"].get<double>() == 0.25);
    CHECK(doc["criteria"][1]["name"] == "beta");
}
