#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crmimo {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string payload;  // deterministic numeric record, byte-compared across runs
    std::string detail;   // human-readable notes (may include timing)
};

/// Test fixture: corrupts a bound constant inside the verification harness so
/// the negative-control path can demonstrate a named criterion failure.
enum class Mutation { None, ChernoffConstant };

struct VerifyOptions {
    std::uint64_t seed = 20260808;
    int threads_first = 1;
    int threads_second = 2;  // reproducibility rerun
    Mutation mutation = Mutation::None;
};

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options);

/// One criterion (1..9) at the current thread setting; used by targeted tests.
CriterionResult run_single_criterion(int id, const VerifyOptions& options);

/// One pass/fail line per criterion, suitable for console output.
std::string format_report(const std::vector<CriterionResult>& results);

/// Machine-readable JSON report.
std::string report_json(const std::vector<CriterionResult>& results, std::uint64_t seed);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace crmimo
