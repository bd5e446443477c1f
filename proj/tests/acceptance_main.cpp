// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include "crmimo/verify.hpp"

int main(int argc, char** argv) {
    crmimo::VerifyOptions opts;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed" && i + 1 < argc) {
            opts.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (arg == "--mutate-chernoff") {
            opts.mutation = crmimo::Mutation::ChernoffConstant;
        } else {
            std::cerr << "usage: acceptance [--seed N] [--mutate-chernoff]\n";
            return 2;
        }
    }
    const auto results = crmimo::run_acceptance(opts);
    std::cout << crmimo::format_report(results);
    return crmimo::all_passed(results) ? 0 : 1;
}
