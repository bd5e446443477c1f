#include <doctest.h>

#include <cmath>

#include "crmimo/compound.hpp"
#include "crmimo/rng.hpp"
#include "crmimo/stats.hpp"

using namespace crmimo;

namespace {

constexpr double kLn2 = 0.6931471805599453;

CMat scalar(double re, double im = 0.0) {
    CMat m(1, 1);
    m(0, 0) = {re, im};
    return m;
}

}  // namespace

TEST_CASE("info_density at the origin equals n bits for the unit scalar channel") {
    const ChannelState g{scalar(1.0)};
    const InputCovariance q(scalar(1.0), 1.0);
    const int n = 7;
    const CMat t = CMat::Zero(1, n), z = CMat::Zero(1, n);
    // Hand evaluation: per symbol log2(Theta/sigma^2) = log2 2, quadratic terms vanish.
    CHECK(info_density(g, q, t, z, 1.0) == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
}

TEST_CASE("info_density mean matches n log det") {
    const ChannelState g{scalar(0.9, 0.3)};
    const InputCovariance q(scalar(1.4), 1.5);
    const int n = 6;
    const int trials = 10000;
    const double expected = n * log_det_mi_raw(g.entries, q.matrix(), 1.0);
    SplitRng rng(77);
    double acc = 0.0;
    for (int k = 0; k < trials; ++k) {
        CMat t(1, n), z(1, n);
        for (int i = 0; i < n; ++i) {
            t(0, i) = rng.cnormal(1.4);
            z(0, i) = g.entries(0, 0) * t(0, i) + rng.cnormal(1.0);
        }
        acc += info_density(g, q, t, z, 1.0);
    }
    const double mean = acc / trials;
    // 3 sigma with a generous per-sample std estimate.
    CHECK(std::abs(mean - expected) < 0.25);
}

TEST_CASE("change of measure: mean of 2^i over independent outputs is 1") {
    const ChannelState g{scalar(0.8)};
    const InputCovariance q(scalar(1.0), 1.0);
    const double theta = 0.8 * 0.8 + 1.0;  // output variance
    SplitRng rng(78);
    const int trials = 200000;
    double acc = 0.0;
    for (int k = 0; k < trials; ++k) {
        CMat t(1, 1), z(1, 1);
        t(0, 0) = rng.cnormal(1.0);
        z(0, 0) = rng.cnormal(theta);  // drawn from q, independent of t
        acc += std::exp2(info_density(g, q, t, z, 1.0));
    }
    CHECK(std::abs(acc / trials - 1.0) < 0.05);
}

TEST_CASE("info_density rejects a singular covariance") {
    const ChannelState g{scalar(1.0)};
    CMat q2 = CMat::Zero(2, 2);
    q2(0, 0) = 1.0;
    CMat g2(1, 2);
    g2 << 1.0, 0.5;
    CHECK_THROWS(info_density(ChannelState{g2}, InputCovariance(q2, 1.0), CMat::Zero(2, 3),
                              CMat::Zero(1, 3), 1.0));
}

TEST_CASE("chernoff info-density bound: value, limits, n-scaling") {
    // Direct evaluation in e-base as an independent route.
    const double x = std::log(2.0) * 1.0;
    const double expected = std::exp(-(100.0 / 2.0) * (std::sqrt(1.0 + x * x) - 1.0));
    CHECK(chernoff_info_density_bound(100, 1, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(chernoff_info_density_bound(100, 1, 1.0) == doctest::Approx(2.0e-5).epsilon(0.05));
    CHECK(chernoff_info_density_bound(50, 2, 0.0) == doctest::Approx(1.0));
    const double b1 = chernoff_info_density_bound(30, 1, 0.4);
    CHECK(chernoff_info_density_bound(60, 1, 0.4) == doctest::Approx(b1 * b1).epsilon(1e-12));
}

TEST_CASE("power overflow bound: value, limits, Monte Carlo domination") {
    CHECK(power_overflow_bound(10, 1.0, 1.0) ==
          doctest::Approx(std::pow(2.0 / std::exp(1.0), 10.0)).epsilon(1e-12));
    CHECK(power_overflow_bound(10, 1.0, 1.0) == doctest::Approx(0.0465).epsilon(0.01));
    CHECK(power_overflow_bound(5, 2.0, 0.0) == doctest::Approx(1.0));

    SplitRng rng(79);
    const int n = 10, trials = 100000;
    int hits = 0;
    for (int k = 0; k < trials; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::norm(rng.cnormal(1.0));
        if (s >= n * 2.0) ++hits;
    }
    const double emp = static_cast<double>(hits) / trials;
    CHECK(emp <= power_overflow_bound(n, 1.0, 1.0) + wilson_half_width(emp, trials, 0.95));
}

TEST_CASE("feinstein bound: display form, empty family, monotone in family size") {
    // Parameters of the finite-family construction: tau = floor(2^{nR}),
    // alpha = n(R + theta/8), delta = n theta/8, beta = P/4.
    const int n = 200;
    const double rate = 0.5, theta = 0.5, power = 2.0, beta = power / 4.0;
    const double alpha = n * (rate + theta / 8.0);
    const double delta = n * theta / 8.0;
    const double tau = std::floor(std::exp2(n * rate));
    const double bhat = beta_hat_backoff(power, beta);
    const double tail = chernoff_info_density_bound(n, 1, theta / 4.0);
    const double got = feinstein_compound_bound(1, tau, alpha, delta, n, bhat, tail);
    // Displayed regrouping: (|G'|+|G'|^2) 2^{-n theta/8} + |G'| 2^{-n beta_hat} + tail,
    // using tau 2^{-alpha} <= 2^{-n theta/8}.
    const double display = 2.0 * std::exp2(-n * theta / 8.0) + std::exp2(-n * bhat) + tail;
    CHECK(got <= display + 1e-15);
    CHECK(got == doctest::Approx(display).epsilon(1e-6));

    CHECK(feinstein_compound_bound(0, tau, alpha, delta, n, bhat, 0.0) == 0.0);
    double prev = 0.0;
    for (std::size_t fs : {1, 2, 4, 8}) {
        const double b = feinstein_compound_bound(fs, tau, alpha, delta, n, bhat,
                                                  fs * tail);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("beta_hat is positive and scale-free in beta/P") {
    const double b1 = beta_hat_backoff(2.0, 0.5);
    const double b2 = beta_hat_backoff(4.0, 1.0);
    CHECK(b1 > 0.0);
    CHECK(b1 == doctest::Approx(b2).epsilon(1e-12));
}

TEST_CASE("likelihood ratio bound: identity, distance scaling, Monte Carlo domination") {
    const ChannelState g{scalar(0.6)}, same{scalar(0.6)};
    CHECK(likelihood_ratio_bound(g, same, 10, 1.0, 6.0, 1.0, 1.0) == doctest::Approx(1.0));

    const ChannelState g2{scalar(0.7)};
    const double b_one = likelihood_ratio_bound(g, g2, 10, 1.0, 6.0, 1.0, 1.0);
    const ChannelState g3{scalar(0.8)};  // doubled distance
    CHECK(likelihood_ratio_bound(g, g3, 10, 1.0, 6.0, 1.0, 1.0) ==
          doctest::Approx(b_one * b_one).epsilon(1e-9));

    SplitRng rng(80);
    const int n = 8;
    const double rho = output_power_threshold(1.0, 1.0, 1, 1.0).rho;
    double max_log = -1e300;
    for (int k = 0; k < 1000; ++k) {
        CMat t(1, n), z(1, n);
        for (int i = 0; i < n; ++i) {
            t(0, i) = rng.cnormal(1.0);
            z(0, i) = rng.cnormal(1.0);
        }
        t *= std::sqrt(n * 1.0 / t.squaredNorm());
        z *= std::sqrt(n * rho / z.squaredNorm());
        double log_ratio = 0.0;
        for (int i = 0; i < n; ++i)
            log_ratio += (std::norm(z(0, i) - 0.7 * t(0, i)) - std::norm(z(0, i) - 0.6 * t(0, i))) /
                         kLn2;
        max_log = std::max(max_log, log_ratio);
    }
    CHECK(max_log <= std::log2(likelihood_ratio_bound(g, g2, n, 1.0, rho, 1.0, 1.0)) + 1e-9);
}

TEST_CASE("output power threshold: closed forms and Monte Carlo domination") {
    const auto b = output_power_threshold(1.0, 1.0, 1, 1.0);
    CHECK(b.rho == doctest::Approx(6.0));
    CHECK(b.prob_bound_per_n == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-12));
    CHECK(b.prob_bound_per_n == doctest::Approx(0.736).epsilon(0.01));

    SplitRng rng(81);
    const int n = 10, trials = 10000;
    int hits = 0;
    for (int k = 0; k < trials; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::norm(1.0 + rng.cnormal(1.0));  // a sqrt(P) = 1 input
        if (s >= n * b.rho) ++hits;
    }
    const double emp = static_cast<double>(hits) / trials;
    CHECK(emp <= std::pow(b.prob_bound_per_n, n) + wilson_half_width(emp, trials, 0.95));
}

TEST_CASE("perturb_to_nonsingular") {
    const CompoundFamily family({ChannelState{scalar(0.8)}}, 1.0, 1.0);
    const InputCovariance fine(scalar(0.9), 1.0);
    CHECK(perturb_to_nonsingular(fine, 0.05, family).matrix() == fine.matrix());

    // Rank-1 beamformer in 2x2.
    CMat v = CMat::Zero(2, 1);
    v(0, 0) = 1.0;
    const InputCovariance rank1(CMat(v * v.adjoint()), 1.0);
    CMat g2(1, 2);
    g2 << 0.9, 0.2;
    const CompoundFamily fam2({ChannelState{g2}}, 1.0, 1.0);
    const double before = log_det_mi_raw(g2, rank1.matrix(), 1.0);
    const InputCovariance fixed = perturb_to_nonsingular(rank1, 0.05, fam2);
    Eigen::SelfAdjointEigenSolver<CMat> es(fixed.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(fixed.trace() < 1.0);
    CHECK(log_det_mi_raw(g2, fixed.matrix(), 1.0) >= before - 0.05);
}

TEST_CASE("epsilon net: scalar count, coverage, degenerate ball") {
    const auto tiny = epsilon_net(1.0, 1, 1, 2.0);
    REQUIRE(tiny.size() == 1);
    CHECK(tiny[0].entries(0, 0) == std::complex<double>(0.0, 0.0));

    const auto net = epsilon_net(1.0, 1, 1, 1.0);
    CHECK(net.size() <= 16);
    CHECK(net.size() >= 9);

    SplitRng rng(82);
    for (int k = 0; k < 1000; ++k) {
        // Uniform over the disc by rejection.
        std::complex<double> g;
        do {
            g = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        } while (std::abs(g) > 1.0);
        double best = 1e300;
        for (const auto& m : net) best = std::min(best, std::abs(g - m.entries(0, 0)));
        CHECK(best <= 1.0 + 1e-12);
    }

    CHECK_THROWS(epsilon_net(1.0, 2, 2, 1e-3));  // cap exceeded
}

TEST_CASE("epsilon net covers a 2x2 ball in operator norm") {
    const double mu = 1.9, a = 1.0;
    const auto net = epsilon_net(a, 2, 2, mu, 1000000);
    SplitRng rng(83);
    for (int k = 0; k < 200; ++k) {
        CMat g(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = rng.cnormal(0.3);
        const double nrm = operator_norm(g);
        if (nrm > a) g *= (a / nrm) * rng.uniform();
        double best = 1e300;
        for (const auto& m : net) best = std::min(best, operator_norm(CMat(g - m.entries)));
        CHECK(best <= mu + 1e-12);
    }
}

TEST_CASE("codebook respects the power cap; expurgation is logged") {
    const InputCovariance q1(scalar(1.0), 1.0);
    const auto book = sample_codebook(200, 20, q1, 1.0, SplitRng(84));
    REQUIRE(book.codewords.size() == 200);
    for (const auto& t : book.codewords) CHECK(t.squaredNorm() <= 20.0 * 1.0 + 1e-12);
    CHECK(book.resampled > 0);  // trace equals the cap, so overflow draws are common
}

TEST_CASE("threshold decoder: noiseless separation and determinism") {
    const InputCovariance q1(scalar(0.9), 1.0);
    GaussianCodebook book = sample_codebook(2, 16, q1, 1.0, SplitRng(85));
    const CompoundFamily family({ChannelState{scalar(1.0)}}, 1.1, 1.0);
    const ThresholdDecoderSpec dec(4.0, 2.0);
    const auto r1 = simulate_compound_error(book, dec, family, 64, SplitRng(86), true);
    CHECK(r1.per_state_error[0] == 0.0);
    CHECK(r1.per_state_max_message_error[0] == 0.0);
    const auto r2 = simulate_compound_error(book, dec, family, 64, SplitRng(86), true);
    CHECK(r1.per_state_error == r2.per_state_error);
}

TEST_CASE("rate above the compound max-min drives the error toward 1") {
    const double p_hat = 0.75;
    const InputCovariance q1(scalar(p_hat), 1.0);
    const CompoundFamily family({ChannelState{scalar(0.5)}}, 1.1, 1.0);
    const double f = log_det_mi_raw(family.states[0].entries, q1.matrix(), 1.0);
    const int n = 10;
    const double rate = f + 1.0;  // 1 bit above the achievable mean
    const auto tau = static_cast<std::size_t>(std::floor(std::exp2(n * rate)));
    GaussianCodebook book = sample_codebook(tau, n, q1, 1.0, SplitRng(87));
    const ThresholdDecoderSpec dec(n * (rate + 0.05), n * 0.05);
    const auto rep = simulate_compound_error(book, dec, family, 400, SplitRng(88));
    CHECK(rep.per_state_error[0] >= 0.9);
}

TEST_CASE("small-instance max error is dominated by the assembled bound") {
    // 2-state scalar family, n = 100, rate 0.4 bits below the weaker mean.
    const double power = 2.0, beta = 0.5, p_hat = power - beta;
    const InputCovariance q1(scalar(p_hat), power);
    const CompoundFamily family({ChannelState{scalar(0.513)}, ChannelState{scalar(0.7)}}, 1.0, 1.0);
    const int n = 100;
    double min_f = 1e300;
    std::vector<double> fs;
    for (const auto& g : family.states) {
        fs.push_back(log_det_mi_raw(g.entries, q1.matrix(), 1.0));
        min_f = std::min(min_f, fs.back());
    }
    const double rate = min_f - 0.4;
    const double theta = 0.8;
    REQUIRE(rate > 0.0);
    const auto tau = static_cast<std::size_t>(std::floor(std::exp2(n * rate)));
    REQUIRE(tau >= 2);
    const double alpha = n * (rate + theta / 8.0);
    const double delta = n * theta / 8.0;
    double tail = 0.0;
    for (double f : fs) tail += chernoff_info_density_bound(n, 1, f - rate - theta / 4.0);
    const double bound = feinstein_compound_bound(2, static_cast<double>(tau), alpha, delta, n,
                                                  beta_hat_backoff(power, beta), tail);
    REQUIRE(bound < 1.0);  // parameters chosen to keep the check non-vacuous

    GaussianCodebook book = sample_codebook(tau, n, q1, power, SplitRng(89));
    const ThresholdDecoderSpec dec(alpha, delta);
    const std::size_t per_message = 16;
    const std::size_t trials = per_message * tau;
    const auto rep = simulate_compound_error(book, dec, family, trials, SplitRng(90));
    for (std::size_t s = 0; s < family.states.size(); ++s) {
        const double emp = rep.per_state_max_message_error[s];
        CHECK(emp <= bound + wilson_half_width(emp, per_message, 0.95));
        CHECK(rep.per_state_error[s] <=
              bound + wilson_half_width(rep.per_state_error[s], trials, 0.95));
    }
}

TEST_CASE("degraded-state adjustment: pure scaling when noiseless levels match") {
    // ||g|| = 2 > a = 1: the received block is scaled by 1/2 and topped up with
    // noise of variance sigma^2 (1 - 1/4).
    const ChannelState g{scalar(2.0)};
    SplitRng rng(91);
    CMat z = CMat::Ones(1, 2000);
    const CMat adjusted = degrade_received(z, g, 1.0, 1.0, rng);
    double acc = 0.0;
    for (int i = 0; i < adjusted.cols(); ++i) acc += std::norm(adjusted(0, i) - 0.5);
    CHECK(std::abs(acc / adjusted.cols() - 0.75) < 0.06);

    const ChannelState inside{scalar(0.5)};
    CHECK(degrade_received(z, inside, 1.0, 1.0, rng) == z);
}

TEST_CASE("family validation rejects members outside the ball") {
    CHECK_THROWS(CompoundFamily({ChannelState{scalar(1.5)}}, 1.0, 1.0));
}
