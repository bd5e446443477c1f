#include <doctest.h>

#include <cmath>

#include "crmimo/cr.hpp"
#include "crmimo/stats.hpp"

using namespace crmimo;

TEST_CASE("induced quantities: identity channel on the DSBS") {
    const JointSource s = JointSource::dsbs(0.1);
    const auto [iux, iuy] = induced_quantities(s, TestChannel::identity(2, 2));
    CHECK(iux == doctest::Approx(1.0).epsilon(1e-12));  // H(X)
    CHECK(iuy == doctest::Approx(1.0 - binary_entropy_bits(0.1)).epsilon(1e-12));
}

TEST_CASE("induced quantities: constant channel and X=Y chain") {
    const JointSource s = JointSource::dsbs(0.2);
    const auto [iux, iuy] = induced_quantities(s, TestChannel::uniform(2, 3));
    CHECK(iux == doctest::Approx(0.0));
    CHECK(iuy == doctest::Approx(0.0));

    const JointSource eq = JointSource::identical_bits();
    SplitRng rng(1);
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd w(2, 3);
        for (int r = 0; r < 2; ++r) {
            double sum = 0.0;
            for (int c = 0; c < 3; ++c) {
                w(r, c) = rng.uniform() + 0.01;
                sum += w(r, c);
            }
            w.row(r) /= sum;
        }
        const auto [a, b] = induced_quantities(eq, TestChannel(w));
        CHECK(a == doctest::Approx(b).epsilon(1e-9));  // U-X-X forces equality
    }
}

TEST_CASE("cr_capacity special cases") {
    CrOptions opts;
    const CrPoint ind = cr_capacity(JointSource::independent_bits(), 0.3, opts, SplitRng(2));
    CHECK(ind.cr_rate == doctest::Approx(0.3).epsilon(1e-3));

    const CrPoint eq = cr_capacity(JointSource::identical_bits(), 0.0, opts, SplitRng(3));
    CHECK(eq.cr_rate == doctest::Approx(1.0).epsilon(1e-3));

    const JointSource dsbs = JointSource::dsbs(0.1);
    const CrPoint sat = cr_capacity(dsbs, dsbs.entropy_x_given_y() + 0.05, opts, SplitRng(4));
    CHECK(sat.cr_rate == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cr_capacity matches the brute-force oracle on the DSBS") {
    const JointSource dsbs = JointSource::dsbs(0.1);
    CrOptions opts;
    const CrPoint opt = cr_capacity(dsbs, 0.2, opts, SplitRng(5));
    const CrPoint oracle = cr_capacity_bruteforce(dsbs, 0.2, 0.02);
    CHECK(opt.cr_rate >= oracle.cr_rate - 0.02);
    CHECK(opt.cr_rate <= oracle.cr_rate + 0.03);
}

TEST_CASE("brute force: trivial cases within one grid step, refinement monotone") {
    const CrPoint ind = cr_capacity_bruteforce(JointSource::independent_bits(), 0.3, 0.02);
    CHECK(std::abs(ind.cr_rate - 0.3) <= 0.05);
    const CrPoint eq = cr_capacity_bruteforce(JointSource::identical_bits(), 0.0, 0.02);
    CHECK(eq.cr_rate == doctest::Approx(1.0).epsilon(1e-9));

    const JointSource dsbs = JointSource::dsbs(0.1);
    const double coarse = cr_capacity_bruteforce(dsbs, 0.25, 0.04).cr_rate;
    const double fine = cr_capacity_bruteforce(dsbs, 0.25, 0.02).cr_rate;
    CHECK(fine >= coarse - 1e-12);

    CHECK_THROWS(cr_capacity_bruteforce(dsbs, 0.2, 0.001));
}

TEST_CASE("brute-force curve over the DSBS budget sweep is nondecreasing") {
    const JointSource dsbs = JointSource::dsbs(0.1);
    double prev = -1.0;
    for (double c = 0.0; c <= dsbs.entropy_x_given_y() + 0.01; c += 0.1) {
        const double v = cr_capacity_bruteforce(dsbs, c, 0.05).cr_rate;
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("cr_curve endpoints and monotonicity") {
    CrOptions opts;
    const std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    const auto ind = cr_curve(JointSource::independent_bits(), grid, opts, SplitRng(6));
    CHECK(ind.front().cr_rate == doctest::Approx(0.0).epsilon(1e-6));

    const JointSource dsbs = JointSource::dsbs(0.1);
    const auto curve = cr_curve(dsbs, grid, opts, SplitRng(7));
    double prev = -1.0;
    for (const auto& pt : curve) {
        CHECK(pt.cr_rate >= prev - 1e-9);
        prev = pt.cr_rate;
    }
    CHECK(curve.back().cr_rate == doctest::Approx(1.0).epsilon(1e-3));  // c >= H(X|Y)

    // Interior points at least match the oracle.
    for (std::size_t i = 1; i < 4; ++i) {
        const double oracle = cr_capacity_bruteforce(dsbs, grid[i], 0.02).cr_rate;
        CHECK(curve[i].cr_rate >= oracle - 0.02);
    }

    std::vector<double> unsorted = {0.3, 0.1};
    CHECK_THROWS(cr_curve(dsbs, unsorted, opts, SplitRng(8)));
}

TEST_CASE("feasibility certificate and entropy cap hold on random instances") {
    SplitRng rng(9);
    for (int t = 0; t < 5; ++t) {
        SplitRng sub = rng.split(t);
        Eigen::MatrixXd pmf(2, 2);
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            pmf(i / 2, i % 2) = 0.2 + sub.uniform();
            sum += pmf(i / 2, i % 2);
        }
        pmf /= sum;
        pmf(1, 1) = 1.0 - pmf(0, 0) - pmf(0, 1) - pmf(1, 0);
        const JointSource source(pmf);
        const double c = 0.05 + 0.3 * sub.uniform();
        CrOptions opts;
        const CrPoint pt = cr_capacity(source, c, opts, sub.split("solve"));
        const auto [iux, iuy] = induced_quantities(source, pt.channel);
        CHECK(iux - iuy <= c + 1e-9);
        CHECK(pt.cr_rate <= source.entropy_x() + 1e-9);
        CHECK(pt.cr_rate >= -1e-12);
    }
}

TEST_CASE("relabeling the U alphabet leaves the induced quantities unchanged") {
    const JointSource dsbs = JointSource::dsbs(0.15);
    CrOptions opts;
    const CrPoint pt = cr_capacity(dsbs, 0.25, opts, SplitRng(10));
    const auto base = induced_quantities(dsbs, pt.channel);
    Eigen::MatrixXd w = pt.channel.rows();
    Eigen::MatrixXd perm(w.rows(), w.cols());
    // Rotate the U labels.
    for (int c = 0; c < w.cols(); ++c) perm.col((c + 1) % w.cols()) = w.col(c);
    const auto rotated = induced_quantities(dsbs, TestChannel(perm));
    CHECK(rotated.first == doctest::Approx(base.first).epsilon(1e-12));
    CHECK(rotated.second == doctest::Approx(base.second).epsilon(1e-12));
}

TEST_CASE("outage composition: saturating budget, independence, DSBS over SISO Rayleigh") {
    CrOptions opts;
    OutageSpec spec;
    spec.eta = 0.2;
    spec.power = 10.0;
    spec.sigma_sq = 1.0;
    spec.n_state_samples = 500;

    // Strong point mass: budget log2(1+10*4) ~ 5.4 bits >= H(X|Y) saturates the curve.
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = 2.0;
    const auto strong = FadingEnsemble::point_mass(ChannelState{g});
    const auto sat = eta_outage_cr_capacity(JointSource::dsbs(0.1), strong, spec, opts, SplitRng(11));
    CHECK(sat.point.cr_rate == doctest::Approx(1.0).epsilon(1e-6));

    // Independence: min(C_eta, H(X)); here C_eta > 1 = H(X).
    const auto ind = eta_outage_cr_capacity(JointSource::independent_bits(), strong, spec, opts,
                                            SplitRng(12));
    CHECK(ind.point.cr_rate ==
          doctest::Approx(std::min(ind.channel_capacity.value_bits, 1.0)).epsilon(1e-3));

    // DSBS over 1x1 Rayleigh at eta=0.1, P=10: budget ~ 1.038 >= H(X|Y), so H(X).
    OutageSpec ray = spec;
    ray.eta = 0.1;
    ray.n_state_samples = 20000;
    const auto comp = eta_outage_cr_capacity(JointSource::dsbs(0.1),
                                             FadingEnsemble::rayleigh_iid(1, 1, 1.0), ray, opts,
                                             SplitRng(13));
    CHECK(std::abs(comp.channel_capacity.value_bits - 1.038) < 0.05);
    const double oracle =
        cr_capacity_bruteforce(JointSource::dsbs(0.1), comp.channel_capacity.value_bits, 0.02)
            .cr_rate;
    CHECK(comp.point.cr_rate >= oracle - 0.02);
}

TEST_CASE("source validation") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.5, 0.25, -0.25;
    CHECK_THROWS(JointSource(bad));
    Eigen::MatrixXd zero_col(2, 2);
    zero_col << 0.5, 0.0, 0.5, 0.0;
    CHECK_THROWS(JointSource(zero_col));
    Eigen::MatrixXd rowbad(1, 2);
    rowbad << 0.7, 0.2;
    CHECK_THROWS(JointSource(rowbad));
}

TEST_CASE("DSBS entropy helpers") {
    const JointSource s = JointSource::dsbs(0.1);
    CHECK(s.entropy_x() == doctest::Approx(1.0));
    CHECK(s.entropy_x_given_y() == doctest::Approx(binary_entropy_bits(0.1)).epsilon(1e-12));
    CHECK(s.mutual_information() ==
          doctest::Approx(1.0 - binary_entropy_bits(0.1)).epsilon(1e-12));
}
