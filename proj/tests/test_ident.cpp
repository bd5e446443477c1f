#include <doctest.h>

#include <cmath>

#include "crmimo/ident.hpp"

using namespace crmimo;

namespace {

ProtocolConfig id_config(int n) {
    ProtocolConfig c;
    c.block_length_n = n;
    c.mu = 0.45;
    c.typ_delta = 0.15;
    c.alpha_target = 0.3;
    c.u_type = {0.5, 0.5};
    c.trials = 1;
    c.noiseless = true;
    c.codebook_cap = std::size_t{1} << 21;
    return c;
}

OutageSpec id_spec() {
    OutageSpec s;
    s.eta = 0.1;
    s.power = 100.0;
    s.sigma_sq = 1.0;
    s.n_state_samples = 2;
    return s;
}

}  // namespace

TEST_CASE("colorings: degenerate color set, collision rate, toy double-exponential size") {
    const auto constant = build_colorings(3, 16, 1, SplitRng(1));
    for (const auto& map : constant.colorings)
        for (auto v : map) CHECK(v == 0);

    // Two uniform maps over 4 colors agree on about 1/4 of the domain.
    double agree = 0.0;
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
        const auto fam = build_colorings(2, 16, 4, SplitRng(100 + r));
        int eq = 0;
        for (std::size_t k = 0; k < 16; ++k)
            if (fam.colorings[0][k] == fam.colorings[1][k]) ++eq;
        agree += eq / 16.0;
    }
    agree /= reps;
    CHECK(std::abs(agree - 0.25) < 3.5 * std::sqrt(0.25 * 0.75 / (16.0 * reps)));

    const auto big = build_colorings(16, 8, 4, SplitRng(2));  // 2^(2^2) identities
    CHECK(big.n_identities() == 16);
}

TEST_CASE("id_round: matching identity accepts, mismatched constant colorings reject") {
    const IdSetup setup(JointSource::identical_bits(), TestChannel::identity(2, 2), id_config(8),
                        id_spec(), SplitRng(3));
    const ChannelState g{(CMat(1, 1) << 1.0).finished()};

    // Hand-built colorings: identity 0 all-zero, identity 1 all-one.
    ColoringFamily fam;
    fam.m_prime = setup.codebook.k_alphabet();
    fam.m_double_prime = 2;
    fam.colorings = {std::vector<std::uint32_t>(fam.m_prime, 0),
                     std::vector<std::uint32_t>(fam.m_prime, 1)};

    SplitRng rng(4);
    for (int t = 0; t < 20; ++t) {
        SplitRng sub = rng.split(t);
        CHECK(id_round(0, 0, setup, fam, g, sub));
    }
    for (int t = 0; t < 20; ++t) {
        SplitRng sub = rng.split(1000 + t);
        CHECK_FALSE(id_round(0, 1, setup, fam, g, sub));
    }
}

TEST_CASE("false accepts between distinct identities happen at about 1/M''") {
    // X = Y and N2 = 1 force K = L, so acceptance of a wrong identity is a pure
    // coloring collision. The family is redrawn per trial so the collision
    // indicator is an independent Bernoulli(1/M'') each round.
    const IdSetup setup(JointSource::identical_bits(), TestChannel::identity(2, 2), id_config(8),
                        id_spec(), SplitRng(5));
    const ChannelState g{(CMat(1, 1) << 1.0).finished()};
    const std::size_t m_dp = 4;
    SplitRng rng(7);
    int accepts = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        SplitRng sub = rng.split(t);
        const auto fam = build_colorings(2, setup.codebook.k_alphabet(), m_dp, sub.split("maps"));
        if (id_round(0, 1, setup, fam, g, sub)) ++accepts;
    }
    const double frac = static_cast<double>(accepts) / trials;
    CHECK(std::abs(frac - 1.0 / m_dp) < 3.5 * std::sqrt(0.25 * 0.75 / trials));
}

TEST_CASE("estimate_id_errors: noiseless X=Y has zero error of the first kind") {
    const IdSetup setup(JointSource::identical_bits(), TestChannel::identity(2, 2), id_config(8),
                        id_spec(), SplitRng(8));
    const auto fam = build_colorings(4, setup.codebook.k_alphabet(), 8, SplitRng(9));
    const auto out = estimate_id_errors(fam, setup, FadingEnsemble::rayleigh_iid(1, 1, 1.0), 2, 10,
                                        0.3, 0.6, SplitRng(10));
    CHECK(out.lambda1_measured == 0.0);
    CHECK(out.identity_count == 4);
    CHECK(out.second_stage_messages == 8);
    for (double e : out.e2_per_state) CHECK(e <= 1.0);
}

TEST_CASE("identical colorings make distinct identities indistinguishable") {
    const IdSetup setup(JointSource::identical_bits(), TestChannel::identity(2, 2), id_config(8),
                        id_spec(), SplitRng(11));
    ColoringFamily fam;
    fam.m_prime = setup.codebook.k_alphabet();
    fam.m_double_prime = 4;
    std::vector<std::uint32_t> shared(fam.m_prime);
    SplitRng color_rng(12);
    for (auto& v : shared) v = static_cast<std::uint32_t>(color_rng.below(4));
    fam.colorings = {shared, shared};
    const auto out = estimate_id_errors(fam, setup, FadingEnsemble::rayleigh_iid(1, 1, 1.0), 2, 10,
                                        0.3, 0.6, SplitRng(13));
    CHECK(out.lambda2_measured == 1.0);  // colliding pair always accepts
}

TEST_CASE("K = L regime: max error of the second kind near the collision rate") {
    // M'' = 16: each ordered pair collides on ~1/16 of K values; the measured
    // max over 12 ordered pairs stays within union-bound reach of 4/16.
    const IdSetup setup(JointSource::identical_bits(), TestChannel::identity(2, 2), id_config(8),
                        id_spec(), SplitRng(17));
    const auto fam = build_colorings(4, setup.codebook.k_alphabet(), 16, SplitRng(18));
    const auto out = estimate_id_errors(fam, setup, FadingEnsemble::rayleigh_iid(1, 1, 1.0), 2, 40,
                                        0.3, 0.6, SplitRng(19));
    CHECK(out.lambda1_measured == 0.0);
    CHECK(out.lambda2_measured <= 4.0 / 16.0 + 0.15);
}

TEST_CASE("determinism under a fixed seed") {
    const IdSetup setup(JointSource::dsbs(0.05), TestChannel::identity(2, 2), id_config(8),
                        id_spec(), SplitRng(14));
    const auto fam = build_colorings(4, setup.codebook.k_alphabet(), 4, SplitRng(15));
    const auto a = estimate_id_errors(fam, setup, FadingEnsemble::rayleigh_iid(1, 1, 1.0), 2, 8,
                                      0.3, 0.6, SplitRng(16));
    const auto b = estimate_id_errors(fam, setup, FadingEnsemble::rayleigh_iid(1, 1, 1.0), 2, 8,
                                      0.3, 0.6, SplitRng(16));
    CHECK(a.e1_per_state == b.e1_per_state);
    CHECK(a.e2_per_state == b.e2_per_state);
}
