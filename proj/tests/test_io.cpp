#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "crmimo/io.hpp"
#include "crmimo/rng.hpp"

using namespace crmimo;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("ensemble CSV round trip") {
    SplitRng rng(1);
    std::vector<ChannelState> states;
    for (int k = 0; k < 5; ++k) {
        CMat g(2, 3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) g(i, j) = rng.cnormal(1.0);
        states.emplace_back(std::move(g));
    }
    const std::string path = temp_path("crmimo_ens_test.csv");
    save_ensemble_csv(path, states);
    const FadingEnsemble loaded = load_ensemble_csv(path);
    REQUIRE(loaded.kind() == FadingEnsemble::Kind::Empirical);
    REQUIRE(loaded.states().size() == 5);
    CHECK(loaded.n_rx() == 2);
    CHECK(loaded.n_tx() == 3);
    for (std::size_t k = 0; k < 5; ++k)
        CHECK((loaded.states()[k].entries - states[k].entries).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("source CSV round trip preserves labels and probabilities") {
    const JointSource src = JointSource::dsbs(0.1);
    const std::string path = temp_path("crmimo_src_test.csv");
    save_source_csv(path, src);
    const JointSource loaded = load_source_csv(path);
    CHECK(loaded.x_labels() == src.x_labels());
    CHECK(loaded.y_labels() == src.y_labels());
    CHECK((loaded.pmf() - src.pmf()).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("loader errors") {
    CHECK_THROWS(load_ensemble_csv("/nonexistent/path.csv"));
    CHECK_THROWS(load_source_csv("/nonexistent/path.csv"));

    const std::string path = temp_path("crmimo_bad_test.csv");
    write_text_file(path, "not_a_header\n1,2\n");
    CHECK_THROWS(load_ensemble_csv(path));
    write_text_file(path, ",y0,y1\nx0,0.5,oops\nx1,0.25,0.25\n");
    CHECK_THROWS(load_source_csv(path));
    std::remove(path.c_str());
}

TEST_CASE("fmt_num round trips doubles") {
    for (double v : {1.0, 0.1, 2.3398500028846243, 1e-300, -3.75}) {
        CHECK(std::stod(fmt_num(v)) == v);
    }
}
