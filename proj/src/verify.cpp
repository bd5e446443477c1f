#include "crmimo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "crmimo/compound.hpp"
#include "crmimo/cr.hpp"
#include "crmimo/ident.hpp"
#include "crmimo/io.hpp"
#include "crmimo/outage.hpp"
#include "crmimo/parallel.hpp"
#include "crmimo/protocol.hpp"
#include "crmimo/source.hpp"
#include "crmimo/stats.hpp"

namespace crmimo {

namespace {

struct Ctx {
    std::uint64_t seed = 0;
    Mutation mutation = Mutation::None;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// ---- 1. SISO pipeline vs Corollary closed form -----------------------------

CriterionResult criterion1(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{1, "siso-consistency", false, 0.0, "", ""};
    OutageSpec spec;
    spec.eta = 0.1;
    spec.power = 10.0;
    spec.sigma_sq = 1.0;
    spec.n_state_samples = 100000;
    const auto ensemble = FadingEnsemble::rayleigh_iid(1, 1, 1.0);
    const CapacityEstimate est = eta_outage_capacity(ensemble, spec, SplitRng(ctx.seed).split("c1"));
    const double analytic = std::log2(1.0 + 10.0 * (-std::log(0.9)));
    const double diff = std::abs(est.value_bits - analytic);
    r.seconds = timer.seconds();
    r.pass = diff <= 0.05 && r.seconds < 60.0;
    r.payload = "capacity=" + fmt_num(est.value_bits) + ";analytic=" + fmt_num(analytic) +
                ";lower=" + fmt_num(est.lower_bracket) + ";upper=" + fmt_num(est.upper_bracket);
    r.detail = "|pipeline - closed form| = " + fmt_num(diff) + " (tol 0.05)";
    return r;
}

// ---- 2. Point mass equals water-filling ------------------------------------

CriterionResult criterion2(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{2, "pointmass-waterfilling", false, 0.0, "", ""};
    const ChannelState g{(CMat(2, 2) << 2.0, 0.0, 0.0, 1.0).finished()};
    const auto ensemble = FadingEnsemble::point_mass(g);
    const double expected = 2.3398500028846243;  // log2(4.5) + log2(1.125)
    bool ok = true;
    std::ostringstream payload;
    for (double eta : {0.0, 0.3}) {
        OutageSpec spec;
        spec.eta = eta;
        spec.power = 1.0;
        spec.sigma_sq = 1.0;
        spec.n_state_samples = 500;
        const CapacityEstimate est =
            eta_outage_capacity(ensemble, spec, SplitRng(ctx.seed).split("c2").split(fmt_num(eta)));
        ok = ok && std::abs(est.value_bits - expected) <= 0.02;
        payload << "eta=" << fmt_num(eta) << ";capacity=" << fmt_num(est.value_bits) << ";";
    }
    r.seconds = timer.seconds();
    r.pass = ok && r.seconds < 60.0;
    r.payload = payload.str() + "expected=" + fmt_num(expected);
    r.detail = "tolerance 0.02 around the water-filling value";
    return r;
}

// ---- 3. Monotonicity in eta, P, and the CR budget --------------------------

CriterionResult criterion3(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{3, "monotonicity", false, 0.0, "", ""};
    std::ostringstream payload;
    bool ok = true;

    const auto ensemble = FadingEnsemble::rayleigh_iid(2, 2, 1.0);
    const StatePool pool = StatePool::draw(ensemble, 600, SplitRng(ctx.seed).split("c3-pool"));
    std::vector<CMat> cache;

    double prev = -1.0;
    payload << "eta-grid:";
    for (int k = 1; k <= 10; ++k) {
        OutageSpec spec;
        spec.eta = 0.05 * k;
        spec.power = 2.0;
        spec.sigma_sq = 1.0;
        spec.n_state_samples = pool.draw_count();
        spec.optimizer_restarts = 3;
        const CapacityEstimate est =
            eta_outage_capacity_pool(pool, spec, SplitRng(ctx.seed).split("c3-eta").split(k), &cache);
        payload << fmt_num(est.value_bits) << ",";
        if (est.value_bits < prev - 1e-6) ok = false;
        prev = est.value_bits;
    }

    prev = -1.0;
    payload << "p-grid:";
    std::vector<CMat> cache_p;
    for (double p : {1.0, 2.0, 5.0, 10.0}) {
        OutageSpec spec;
        spec.eta = 0.1;
        spec.power = p;
        spec.sigma_sq = 1.0;
        spec.n_state_samples = pool.draw_count();
        spec.optimizer_restarts = 3;
        const CapacityEstimate est =
            eta_outage_capacity_pool(pool, spec, SplitRng(ctx.seed).split("c3-p").split(fmt_num(p)),
                                     &cache_p);
        payload << fmt_num(est.value_bits) << ",";
        if (est.value_bits < prev - 1e-6) ok = false;
        prev = est.value_bits;
    }

    const JointSource dsbs = JointSource::dsbs(0.1);
    std::vector<double> c_grid;
    for (int k = 0; k <= 10; ++k) c_grid.push_back(0.05 * k);
    CrOptions opts;
    const auto curve = cr_curve(dsbs, c_grid, opts, SplitRng(ctx.seed).split("c3-cr"));
    payload << "cr-curve:";
    prev = -1.0;
    for (const auto& pt : curve) {
        payload << fmt_num(pt.cr_rate) << ",";
        if (pt.cr_rate < prev - 1e-6) ok = false;
        prev = pt.cr_rate;
    }

    r.seconds = timer.seconds();
    r.pass = ok;
    r.payload = payload.str();
    r.detail = "nondecreasing within 1e-6 on all three grids";
    return r;
}

// ---- 4. Analytic bounds dominate Monte Carlo --------------------------------

CriterionResult criterion4(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{4, "bound-domination", false, 0.0, "", ""};
    std::ostringstream payload;
    bool ok = true;
    const double mutation_factor = ctx.mutation == Mutation::ChernoffConstant ? 1e-3 : 1.0;
    const std::size_t trials = 100000;

    // Info-density deviation tail.
    {
        struct Point {
            int n;
            CMat g;
            CMat q;
            double delta;
        };
        std::vector<Point> points;
        points.push_back({10, (CMat(1, 1) << 1.0).finished(), (CMat(1, 1) << 1.0).finished(), 0.5});
        points.push_back({20, (CMat(1, 1) << 0.8).finished(), (CMat(1, 1) << 2.0).finished(), 0.35});
        points.push_back({8,
                          (CMat(2, 2) << std::complex<double>(0.9, 0.1), 0.0, 0.0,
                           std::complex<double>(1.1, -0.2))
                              .finished(),
                          (CMat(2, 2) << 0.7, 0.0, 0.0, 0.5).finished(), 0.6});
        const double sigma_sq = 1.0;
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const auto& pt = points[pi];
            const int n_rx = static_cast<int>(pt.g.rows());
            const int n_tx = static_cast<int>(pt.g.cols());
            const double bound =
                chernoff_info_density_bound(pt.n, n_rx, pt.delta) * mutation_factor;
            const ChannelState gs{pt.g};
            const InputCovariance q(pt.q, pt.q.trace().real() + 1e-9);
            const double mean_bits = pt.n * log_det_mi_raw(pt.g, pt.q, sigma_sq);
            Eigen::LLT<CMat> lq(pt.q);
            const CMat lfac = lq.matrixL();
            std::vector<std::uint8_t> hit(trials, 0);
            SplitRng root = SplitRng(ctx.seed).split("c4-info").split(pi);
            par::for_each_index(trials, [&](std::size_t t_idx) {
                SplitRng rng = root.split(t_idx);
                CMat t(n_tx, pt.n), z(n_rx, pt.n);
                for (int c = 0; c < pt.n; ++c) {
                    for (int a = 0; a < n_tx; ++a) t(a, c) = rng.cnormal(1.0);
                }
                t = lfac * t;
                z = pt.g * t;
                for (int c = 0; c < pt.n; ++c)
                    for (int a = 0; a < n_rx; ++a) z(a, c) += rng.cnormal(sigma_sq);
                const double i_bits = info_density(gs, q, t, z, sigma_sq);
                hit[t_idx] = i_bits <= mean_bits - pt.n * pt.delta ? 1 : 0;
            });
            std::size_t hits = 0;
            for (auto h : hit) hits += h;
            const double emp = static_cast<double>(hits) / static_cast<double>(trials);
            const double hw = wilson_half_width(emp, trials, 0.95);
            if (emp > bound + hw) ok = false;
            payload << "info" << pi << ":emp=" << fmt_num(emp) << ",bound=" << fmt_num(bound) << ";";
        }
    }

    // Input power overflow.
    {
        struct Point {
            int n;
            Eigen::VectorXd diag;
            double delta;
        };
        std::vector<Point> points;
        points.push_back({10, Eigen::VectorXd::Constant(1, 1.0), 1.0});
        points.push_back({5, (Eigen::VectorXd(2) << 1.2, 0.8).finished(), 1.5});
        points.push_back({20, Eigen::VectorXd::Constant(1, 1.0), 0.5});
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const auto& pt = points[pi];
            const double m_cap = pt.diag.sum();
            const double bound = power_overflow_bound(pt.n, m_cap, pt.delta);
            const int dim = static_cast<int>(pt.diag.size());
            std::vector<std::uint8_t> hit(trials, 0);
            SplitRng root = SplitRng(ctx.seed).split("c4-power").split(pi);
            par::for_each_index(trials, [&](std::size_t t_idx) {
                SplitRng rng = root.split(t_idx);
                double sum = 0.0;
                for (int i = 0; i < pt.n; ++i)
                    for (int d = 0; d < dim; ++d) sum += std::norm(rng.cnormal(pt.diag(d)));
                hit[t_idx] = sum >= pt.n * (m_cap + pt.delta) ? 1 : 0;
            });
            std::size_t hits = 0;
            for (auto h : hit) hits += h;
            const double emp = static_cast<double>(hits) / static_cast<double>(trials);
            const double hw = wilson_half_width(emp, trials, 0.95);
            if (emp > bound + hw) ok = false;
            payload << "pow" << pi << ":emp=" << fmt_num(emp) << ",bound=" << fmt_num(bound) << ";";
        }
    }

    // Likelihood ratio (deterministic bound; Monte Carlo max over blocks).
    {
        struct Point {
            CMat g, g_hat;
            double power;
            double sigma_sq;
            double a;
            int n;
        };
        std::vector<Point> points;
        points.push_back({(CMat(1, 1) << 0.6).finished(), (CMat(1, 1) << 0.7).finished(), 1.0, 1.0,
                          1.0, 10});
        points.push_back({(CMat(1, 1) << std::complex<double>(0.5, 0.2)).finished(),
                          (CMat(1, 1) << std::complex<double>(0.45, 0.25)).finished(), 2.0, 1.0, 1.0,
                          8});
        points.push_back({(CMat(2, 2) << 0.5, 0.1, 0.0, 0.6).finished(),
                          (CMat(2, 2) << 0.45, 0.12, 0.02, 0.55).finished(), 1.0, 0.5, 0.8, 6});
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const auto& pt = points[pi];
            const ChannelState g{pt.g}, g_hat{pt.g_hat};
            const double rho = output_power_threshold(pt.a, pt.power, static_cast<int>(pt.g.rows()),
                                                      pt.sigma_sq)
                                   .rho;
            const double bound =
                likelihood_ratio_bound(g, g_hat, pt.n, pt.power, rho, pt.a, pt.sigma_sq);
            const int n_rx = static_cast<int>(pt.g.rows());
            const int n_tx = static_cast<int>(pt.g.cols());
            double max_log_ratio = -1e300;
            SplitRng rng = SplitRng(ctx.seed).split("c4-ratio").split(pi);
            for (int trial = 0; trial < 1000; ++trial) {
                CMat t(n_tx, pt.n), z(n_rx, pt.n);
                for (int c = 0; c < pt.n; ++c) {
                    for (int a = 0; a < n_tx; ++a) t(a, c) = rng.cnormal(1.0);
                    for (int a = 0; a < n_rx; ++a) z(a, c) = rng.cnormal(1.0);
                }
                t *= std::sqrt(pt.n * pt.power / t.squaredNorm());
                z *= std::sqrt(pt.n * rho / z.squaredNorm());
                double log_ratio = 0.0;  // log2 W_g / W_ghat
                for (int c = 0; c < pt.n; ++c) {
                    const double dg = (z.col(c) - pt.g * t.col(c)).squaredNorm();
                    const double dh = (z.col(c) - pt.g_hat * t.col(c)).squaredNorm();
                    log_ratio += (dh - dg) / (pt.sigma_sq * 0.6931471805599453);
                }
                max_log_ratio = std::max(max_log_ratio, log_ratio);
            }
            if (max_log_ratio > std::log2(bound) + 1e-9) ok = false;
            payload << "ratio" << pi << ":maxlog=" << fmt_num(max_log_ratio)
                    << ",boundlog=" << fmt_num(std::log2(bound)) << ";";
        }
    }

    // Output power overflow.
    {
        struct Point {
            double a, power, sigma_sq;
            int n_rx, n;
        };
        std::vector<Point> points = {{1.0, 1.0, 1.0, 1, 10}, {1.5, 2.0, 0.5, 2, 8},
                                     {0.8, 1.0, 2.0, 1, 12}};
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const auto& pt = points[pi];
            const OutputPowerBound opb =
                output_power_threshold(pt.a, pt.power, pt.n_rx, pt.sigma_sq);
            const double bound = std::pow(opb.prob_bound_per_n, pt.n);
            // Worst-case norm-a state and a full-power constant input.
            CMat g = CMat::Zero(pt.n_rx, 1);
            g(0, 0) = pt.a;
            std::vector<std::uint8_t> hit(trials, 0);
            SplitRng root = SplitRng(ctx.seed).split("c4-out").split(pi);
            par::for_each_index(trials, [&](std::size_t t_idx) {
                SplitRng rng = root.split(t_idx);
                double sum = 0.0;
                for (int i = 0; i < pt.n; ++i) {
                    for (int a = 0; a < pt.n_rx; ++a) {
                        std::complex<double> zi = (a == 0 ? pt.a * std::sqrt(pt.power) : 0.0);
                        zi += rng.cnormal(pt.sigma_sq);
                        sum += std::norm(zi);
                    }
                }
                hit[t_idx] = sum >= pt.n * opb.rho ? 1 : 0;
            });
            std::size_t hits = 0;
            for (auto h : hit) hits += h;
            const double emp = static_cast<double>(hits) / static_cast<double>(trials);
            const double hw = wilson_half_width(emp, trials, 0.95);
            if (emp > bound + hw) ok = false;
            payload << "outp" << pi << ":emp=" << fmt_num(emp) << ",bound=" << fmt_num(bound) << ";";
        }
    }

    r.seconds = timer.seconds();
    r.pass = ok && r.seconds < 300.0;
    r.payload = payload.str();
    r.detail = "one-sided domination, empirical <= analytic + Wilson half-width";
    return r;
}

// ---- 5. CR special cases ----------------------------------------------------

CriterionResult criterion5(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{5, "cr-special-cases", false, 0.0, "", ""};
    CrOptions opts;
    bool ok = true;
    std::ostringstream payload;

    const CrPoint p1 = cr_capacity(JointSource::independent_bits(), 0.3, opts,
                                   SplitRng(ctx.seed).split("c5-ind"));
    ok = ok && std::abs(p1.cr_rate - 0.3) <= 1e-3;
    payload << "independent=" << fmt_num(p1.cr_rate) << ";";

    const CrPoint p2 =
        cr_capacity(JointSource::identical_bits(), 0.0, opts, SplitRng(ctx.seed).split("c5-eq"));
    ok = ok && std::abs(p2.cr_rate - 1.0) <= 1e-3;
    payload << "identical=" << fmt_num(p2.cr_rate) << ";";

    const JointSource dsbs = JointSource::dsbs(0.1);
    const CrPoint p3 = cr_capacity(dsbs, dsbs.entropy_x_given_y(), opts,
                                   SplitRng(ctx.seed).split("c5-dsbs"));
    ok = ok && std::abs(p3.cr_rate - 1.0) <= 1e-2;
    payload << "dsbs=" << fmt_num(p3.cr_rate);

    r.seconds = timer.seconds();
    r.pass = ok;
    r.payload = payload.str();
    r.detail = "independence hits the budget, X=Y hits H(X), saturated DSBS hits H(X)";
    return r;
}

// ---- 6. Optimizer vs brute-force oracle -------------------------------------

CriterionResult criterion6(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{6, "cr-optimizer-vs-oracle", false, 0.0, "", ""};
    bool ok = true;
    std::ostringstream payload;
    SplitRng gen = SplitRng(ctx.seed).split("c6-sources");
    for (int inst = 0; inst < 10; ++inst) {
        SplitRng sub = gen.split(inst);
        Eigen::MatrixXd pmf(2, 2);
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            pmf(i / 2, i % 2) = 0.5 + sub.uniform();
            sum += pmf(i / 2, i % 2);
        }
        pmf /= sum;
        // Exact rational renormalization so the pmf sums to 1 bit-exactly.
        pmf(1, 1) = 1.0 - pmf(0, 0) - pmf(0, 1) - pmf(1, 0);
        const JointSource source(pmf);
        const double c = 0.05 + sub.uniform() * (source.entropy_x_given_y() * 1.2);

        CrOptions opts;
        const CrPoint opt = cr_capacity(source, c, opts, SplitRng(ctx.seed).split("c6-opt").split(inst));
        const CrPoint oracle = cr_capacity_bruteforce(source, c, 0.02);
        bool lower_ok = opt.cr_rate >= oracle.cr_rate - 0.02 - 1e-9;
        bool upper_ok = opt.cr_rate <= oracle.cr_rate + 0.02 + 1e-6;
        if (!upper_ok) {
            const CrPoint fine = cr_capacity_bruteforce(source, c, 0.01);
            upper_ok = opt.cr_rate <= fine.cr_rate + 0.01 + 1e-6;
        }
        const auto [iux, iuy] = induced_quantities(source, opt.channel);
        const bool feasible = (iux - iuy) <= c + 1e-9;
        if (!(lower_ok && upper_ok && feasible)) ok = false;
        payload << "i" << inst << ":opt=" << fmt_num(opt.cr_rate)
                << ",oracle=" << fmt_num(oracle.cr_rate) << ";";
    }
    r.seconds = timer.seconds();
    r.pass = ok && r.seconds < 300.0;
    r.payload = payload.str();
    r.detail = "optimizer within one grid step of the 0.02-resolution oracle, feasible within 1e-9";
    return r;
}

// ---- 7. Protocol end-to-end -------------------------------------------------

ProtocolConfig criterion7_config() {
    ProtocolConfig config;
    config.block_length_n = 12;
    config.mu = 0.35;
    config.typ_delta = 0.15;
    config.alpha_target = 0.1;
    config.u_type = {0.5, 0.5};
    config.transport = ProtocolConfig::Transport::GenieBitPipe;
    config.trials = 200;
    return config;
}

CriterionResult criterion7(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{7, "protocol-end-to-end", false, 0.0, "", ""};
    const JointSource source = JointSource::dsbs(0.05);
    const TestChannel aux = TestChannel::identity(2, 2);
    const auto ensemble = FadingEnsemble::rayleigh_iid(1, 1, 1.0);
    OutageSpec spec;
    spec.eta = 0.1;
    spec.power = 100.0;
    spec.sigma_sq = 1.0;
    spec.n_state_samples = 20;

    ProtocolConfig config = criterion7_config();
    const ProtocolOutcome out =
        run_protocol(source, aux, config, ensemble, spec, SplitRng(ctx.seed).split("c7"));
    const double med = median(out.per_state_disagreement);

    ProtocolConfig forced = config;
    forced.transport = ProtocolConfig::Transport::ForcedWrongIndex;
    forced.decoder_typ_delta = 1.0;
    const ProtocolOutcome ctrl =
        run_protocol(source, aux, forced, ensemble, spec, SplitRng(ctx.seed).split("c7-forced"));
    const double med_ctrl = median(ctrl.per_state_disagreement);

    const bool sizes_ok = out.k_alphabet_size == out.n1 * out.n2 + 1 && out.cardinality_ok;
    r.seconds = timer.seconds();
    r.pass = med <= 0.1 && sizes_ok && med_ctrl >= 0.5;
    r.payload = "median=" + fmt_num(med) + ";n1=" + std::to_string(out.n1) +
                ";n2=" + std::to_string(out.n2) + ";k=" + std::to_string(out.k_alphabet_size) +
                ";entropy_rate=" + fmt_num(out.entropy_rate_estimate) +
                ";forced_median=" + fmt_num(med_ctrl);
    r.detail = "median disagreement <= 0.1, |K| = N1 N2 + 1, forced-failure median >= 0.5";
    return r;
}

// ---- 8. Compound simulation vs Feinstein bound -------------------------------

CriterionResult criterion8(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{8, "compound-vs-feinstein", false, 0.0, "", ""};
    const int n = 200;
    const double power = 2.0;
    const double sigma_sq = 1.0;
    const double beta = power / 4.0;
    const double p_hat = power - beta;
    const double a = 1.1;
    const double theta = 1.0;

    const std::vector<double> mags = {0.557, 0.75, 1.0};
    const std::vector<double> phases = {0.4, -1.1, 2.2};
    std::vector<ChannelState> states;
    for (std::size_t i = 0; i < mags.size(); ++i) {
        CMat g(1, 1);
        g(0, 0) = std::polar(mags[i], phases[i]);
        states.emplace_back(std::move(g));
    }
    const CompoundFamily family(states, a, sigma_sq);
    const InputCovariance q1((CMat(1, 1) << p_hat).finished(), power);

    std::vector<double> f_bits;
    double min_f = 1e300;
    for (const auto& g : family.states) {
        f_bits.push_back(log_det_mi_raw(g.entries, q1.matrix(), sigma_sq));
        min_f = std::min(min_f, f_bits.back());
    }
    const double rate = min_f - 0.5;
    const auto tau = static_cast<std::size_t>(std::floor(std::exp2(n * rate)));
    const double alpha = n * (rate + theta / 8.0);
    const double delta = n * theta / 8.0;

    double tail_sum = 0.0;
    for (double f : f_bits) tail_sum += chernoff_info_density_bound(n, 1, f - rate - theta / 4.0);
    const double beta_hat = beta_hat_backoff(power, beta);
    const double bound = feinstein_compound_bound(family.states.size(), static_cast<double>(tau),
                                                  alpha, delta, n, beta_hat, tail_sum);

    const GaussianCodebook book =
        sample_codebook(tau, n, q1, power, SplitRng(ctx.seed).split("c8-book"));
    const ThresholdDecoderSpec decoder(alpha, delta);
    const CompoundErrorReport report =
        simulate_compound_error(book, decoder, family, 1000, SplitRng(ctx.seed).split("c8-sim"));

    bool ok = true;
    std::ostringstream payload;
    payload << "rate=" << fmt_num(rate) << ";tau=" << tau << ";bound=" << fmt_num(bound) << ";";
    for (std::size_t s = 0; s < report.per_state_error.size(); ++s) {
        const double emp = report.per_state_error[s];
        payload << "state" << s << "=" << fmt_num(emp) << ";";
        if (bound < 1.0) {
            const double hw = wilson_half_width(emp, report.trials_per_state, 0.95);
            if (emp > bound + hw) ok = false;
        }
    }
    r.seconds = timer.seconds();
    r.pass = ok && r.seconds < 300.0;
    r.payload = payload.str();
    r.detail = bound < 1.0 ? "bound nontrivial; empirical error dominated per state"
                           : "bound vacuous at these parameters (check skipped)";
    return r;
}

// ---- 9. Identification demo ---------------------------------------------------

CriterionResult criterion9(const Ctx& ctx) {
    Timer timer;
    CriterionResult r{9, "identification-demo", false, 0.0, "", ""};
    ProtocolConfig config;
    config.block_length_n = 16;
    config.mu = 0.35;  // single-member bins: ambiguity would otherwise dominate at n=16
    config.typ_delta = 0.15;
    config.decoder_typ_delta = 0.25;  // margin over the encoder's boundary-of-ball picks
    config.alpha_target = 0.3;
    config.u_type = {0.5, 0.5};
    config.transport = ProtocolConfig::Transport::GenieBitPipe;
    config.trials = 1;
    config.noiseless = true;
    config.codebook_cap = std::size_t{1} << 22;

    OutageSpec spec;
    spec.eta = 0.1;
    spec.power = 100.0;
    spec.sigma_sq = 1.0;
    spec.n_state_samples = 4;

    const IdSetup setup(JointSource::dsbs(0.05), TestChannel::identity(2, 2), config, spec,
                        SplitRng(ctx.seed).split("c9-setup"));
    const ColoringFamily family = build_colorings(16, setup.codebook.k_alphabet(), 8,
                                                  SplitRng(ctx.seed).split("c9-colors"));
    const auto ensemble = FadingEnsemble::rayleigh_iid(1, 1, 1.0);
    const IdOutcome out = estimate_id_errors(family, setup, ensemble, 4, 50, 0.4, 0.6,
                                             SplitRng(ctx.seed).split("c9-run"));

    const double lam_sum = out.lambda1_measured + out.lambda2_measured;
    r.seconds = timer.seconds();
    r.pass = lam_sum < 1.0 && out.identity_count > out.second_stage_messages;
    r.payload = "lambda1=" + fmt_num(out.lambda1_measured) +
                ";lambda2=" + fmt_num(out.lambda2_measured) +
                ";identities=" + std::to_string(out.identity_count) +
                ";stage2_messages=" + std::to_string(out.second_stage_messages);
    r.detail = "measured lambda1+lambda2 = " + fmt_num(lam_sum) +
               " < 1; identities exceed second-stage message count";
    return r;
}

CriterionResult dispatch_criterion(int id, const Ctx& ctx) {
    switch (id) {
        case 1: return criterion1(ctx);
        case 2: return criterion2(ctx);
        case 3: return criterion3(ctx);
        case 4: return criterion4(ctx);
        case 5: return criterion5(ctx);
        case 6: return criterion6(ctx);
        case 7: return criterion7(ctx);
        case 8: return criterion8(ctx);
        case 9: return criterion9(ctx);
        default: throw std::invalid_argument("unknown criterion id");
    }
}

std::vector<CriterionResult> run_once(const Ctx& ctx) {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 9; ++id) out.push_back(dispatch_criterion(id, ctx));
    return out;
}

}  // namespace

CriterionResult run_single_criterion(int id, const VerifyOptions& options) {
    return dispatch_criterion(id, Ctx{options.seed, options.mutation});
}

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options) {
    const Ctx ctx{options.seed, options.mutation};
    const int previous_threads = par::max_threads();

    par::set_max_threads(options.threads_first);
    std::vector<CriterionResult> results = run_once(ctx);

    Timer timer;
    par::set_max_threads(options.threads_second);
    const std::vector<CriterionResult> second = run_once(ctx);
    par::set_max_threads(previous_threads);

    CriterionResult repro{10, "reproducibility", true, timer.seconds(), "", ""};
    std::ostringstream detail;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].payload != second[i].payload) {
            repro.pass = false;
            detail << "criterion " << results[i].id << " differs across thread counts; ";
        }
    }
    repro.payload = repro.pass ? "identical" : "mismatch";
    repro.detail = repro.pass ? "criteria 1-9 byte-identical across thread counts (" +
                                    std::to_string(options.threads_first) + " vs " +
                                    std::to_string(options.threads_second) + ")"
                              : detail.str();
    results.push_back(std::move(repro));
    return results;
}

std::string format_report(const std::vector<CriterionResult>& results) {
    std::ostringstream out;
    for (const auto& r : results) {
        out << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << " (" << r.name << "): "
            << r.detail << " [" << fmt_num(r.seconds) << " s]\n";
    }
    out << (all_passed(results) ? "ACCEPTANCE: all criteria passed\n"
                                : "ACCEPTANCE: some criteria FAILED\n");
    return out.str();
}

std::string report_json(const std::vector<CriterionResult>& results, std::uint64_t seed) {
    nlohmann::ordered_json doc;
    doc["seed"] = seed;
    doc["all_passed"] = all_passed(results);
    doc["criteria"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json c;
        c["id"] = r.id;
        c["name"] = r.name;
        c["pass"] = r.pass;
        c["seconds"] = r.seconds;
        c["payload"] = r.payload;
        c["detail"] = r.detail;
        doc["criteria"].push_back(std::move(c));
    }
    return doc.dump(2) + "\n";
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace crmimo
