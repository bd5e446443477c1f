// Command-line front end: every subcommand seeds a labeled generator from the
// root --seed, writes plot-ready CSV/JSON artifacts with a parameter echo, and
// keeps wall-clock timing out of output files so reruns are byte-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "crmimo/compound.hpp"
#include "crmimo/cr.hpp"
#include "crmimo/ident.hpp"
#include "crmimo/io.hpp"
#include "crmimo/outage.hpp"
#include "crmimo/parallel.hpp"
#include "crmimo/protocol.hpp"
#include "crmimo/source.hpp"
#include "crmimo/stats.hpp"
#include "crmimo/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitCriterion = 4;
constexpr const char* kVersion = "crmimo 1.0.0";

struct GlobalOpts {
    std::uint64_t seed = 1;
    int threads = 0;  // 0: library default
    std::string out;
    std::string format = "csv";
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const GlobalOpts& g, const std::string& content) {
    if (g.out.empty()) {
        std::cout << content;
    } else {
        crmimo::write_text_file(g.out, content);
    }
}

std::string meta_line(const GlobalOpts& g, const std::string& params) {
    return std::string("# ") + kVersion + " seed=" + std::to_string(g.seed) + " " + params + "\n";
}

crmimo::FadingEnsemble make_ensemble(const std::string& kind, const std::string& file, int n_rx,
                                     int n_tx, double scale) {
    if (kind == "rayleigh") return crmimo::FadingEnsemble::rayleigh_iid(n_rx, n_tx, scale);
    if (kind == "csv") {
        if (file.empty()) throw InputError("--ensemble csv requires --ensemble-file");
        return crmimo::load_ensemble_csv(file);
    }
    throw InputError("unknown ensemble kind: " + kind);
}

crmimo::JointSource make_source(const std::string& file, const std::string& builtin, double p) {
    if (!file.empty()) return crmimo::load_source_csv(file);
    if (builtin == "dsbs") return crmimo::JointSource::dsbs(p);
    if (builtin == "independent") return crmimo::JointSource::independent_bits();
    if (builtin == "identical") return crmimo::JointSource::identical_bits();
    throw InputError("need --source FILE or --builtin {dsbs,independent,identical}");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outage transmission and common-randomness capacity toolkit for MIMO slow fading"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "root seed; all generators derive from it by labeled splitting");
    app.add_option("--threads", g.threads, "worker threads (results are thread-count independent)");
    app.add_option("--out", g.out, "output path (default: stdout)");
    app.add_option("--format", g.format, "csv or json where applicable");
    app.set_config("--config-file", "", "TOML config; explicit flags take precedence");

    // outage-capacity ---------------------------------------------------------
    auto* cap = app.add_subcommand("outage-capacity", "eta-outage capacity of a MIMO ensemble");
    struct {
        double eta = 0.1, power = 1.0, sigma_sq = 1.0, scale = 1.0;
        std::size_t samples = 100000;
        int n_rx = 1, n_tx = 1, restarts = 8;
        std::string ensemble = "rayleigh", ensemble_file;
    } capo;
    cap->add_option("--eta", capo.eta)->check(CLI::Range(0.0, 0.999999));
    cap->add_option("--power", capo.power)->check(CLI::PositiveNumber);
    cap->add_option("--sigma-sq", capo.sigma_sq)->check(CLI::PositiveNumber);
    cap->add_option("--samples", capo.samples)->check(CLI::PositiveNumber);
    cap->add_option("--n-rx", capo.n_rx)->check(CLI::PositiveNumber);
    cap->add_option("--n-tx", capo.n_tx)->check(CLI::PositiveNumber);
    cap->add_option("--restarts", capo.restarts)->check(CLI::PositiveNumber);
    cap->add_option("--scale", capo.scale)->check(CLI::PositiveNumber);
    cap->add_option("--ensemble", capo.ensemble, "rayleigh or csv");
    cap->add_option("--ensemble-file", capo.ensemble_file);

    // siso-capacity -----------------------------------------------------------
    auto* siso = app.add_subcommand("siso-capacity", "SISO closed form from gain quantiles");
    struct {
        double eta = 0.1, power = 1.0, sigma_sq = 1.0, scale = 1.0;
        std::size_t samples = 100000;
        std::string ensemble = "rayleigh", ensemble_file;
    } so;
    siso->add_option("--eta", so.eta)->check(CLI::Range(0.0, 0.999999));
    siso->add_option("--power", so.power)->check(CLI::PositiveNumber);
    siso->add_option("--sigma-sq", so.sigma_sq)->check(CLI::PositiveNumber);
    siso->add_option("--samples", so.samples)->check(CLI::PositiveNumber);
    siso->add_option("--scale", so.scale)->check(CLI::PositiveNumber);
    siso->add_option("--ensemble", so.ensemble, "rayleigh or csv");
    siso->add_option("--ensemble-file", so.ensemble_file);

    // cr-capacity / cr-curve ----------------------------------------------------
    auto* crc = app.add_subcommand("cr-capacity", "CR capacity at a communication budget");
    struct {
        std::string source_file, builtin;
        double p = 0.1, c = 0.0;
        int u_card = 0;
    } cro;
    crc->add_option("--source", cro.source_file, "joint source CSV");
    crc->add_option("--builtin", cro.builtin, "dsbs, independent, identical");
    crc->add_option("--p", cro.p, "DSBS crossover");
    crc->add_option("--c", cro.c, "communication budget in bits")->required();
    crc->add_option("--u-card", cro.u_card, "auxiliary alphabet size (default |X|+1)");

    auto* crv = app.add_subcommand("cr-curve", "CR capacity across a budget grid");
    struct {
        std::string source_file, builtin;
        double p = 0.1, c_min = 0.0, c_max = 0.5;
        int steps = 11, u_card = 0;
    } cvo;
    crv->add_option("--source", cvo.source_file);
    crv->add_option("--builtin", cvo.builtin);
    crv->add_option("--p", cvo.p);
    crv->add_option("--c-min", cvo.c_min);
    crv->add_option("--c-max", cvo.c_max);
    crv->add_option("--steps", cvo.steps)->check(CLI::Range(2, 10000));
    crv->add_option("--u-card", cvo.u_card);

    // simulate-protocol ---------------------------------------------------------
    auto* prot = app.add_subcommand("simulate-protocol", "end-to-end CR generation protocol");
    struct {
        std::string config_file, out_csv, out_json;
    } po;
    prot->add_option("--config", po.config_file, "JSON config")->required();
    prot->add_option("--out-csv", po.out_csv, "per-state CSV path");
    prot->add_option("--out-json", po.out_json, "summary JSON path");

    // compound-verify -------------------------------------------------------------
    auto* comp = app.add_subcommand("compound-verify", "bound-vs-Monte-Carlo domination table");
    struct {
        std::size_t trials = 100000;
    } cvopt;
    comp->add_option("--trials", cvopt.trials)->check(CLI::PositiveNumber);

    // id-demo ---------------------------------------------------------------------
    auto* iddemo = app.add_subcommand("id-demo", "correlation-assisted identification demo");
    struct {
        int n = 16;
        std::size_t identities = 16, m_colors = 8, states = 4, trials = 25;
        double lambda1 = 0.4, lambda2 = 0.6, p = 0.05;
    } ido;
    iddemo->add_option("--n", ido.n)->check(CLI::PositiveNumber);
    iddemo->add_option("--identities", ido.identities)->check(CLI::PositiveNumber);
    iddemo->add_option("--m-colors", ido.m_colors)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    iddemo->add_option("--states", ido.states)->check(CLI::PositiveNumber);
    iddemo->add_option("--trials", ido.trials)->check(CLI::PositiveNumber);
    iddemo->add_option("--lambda1", ido.lambda1);
    iddemo->add_option("--lambda2", ido.lambda2);
    iddemo->add_option("--p", ido.p, "DSBS crossover");

    // bounds -----------------------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "closed-form bound tabulation");
    struct {
        std::string lemma;
        int n = 100, n_rx = 1;
        double delta = 1.0, m = 1.0, a = 1.0, power = 1.0, sigma_sq = 1.0, rho = 0.0, dist = 0.1;
    } bo;
    bounds->add_option("--lemma", bo.lemma,
                       "info-density-tail, power-overflow, likelihood-ratio, output-power")
        ->required();
    bounds->add_option("--n", bo.n)->check(CLI::PositiveNumber);
    bounds->add_option("--n-rx", bo.n_rx)->check(CLI::PositiveNumber);
    bounds->add_option("--delta", bo.delta);
    bounds->add_option("--m", bo.m);
    bounds->add_option("--a", bo.a);
    bounds->add_option("--power", bo.power);
    bounds->add_option("--sigma-sq", bo.sigma_sq);
    bounds->add_option("--rho", bo.rho, "output power level (default from output-power)");
    bounds->add_option("--dist", bo.dist, "||g - ghat|| for the ratio bound");

    // verify --------------------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    struct {
        std::string mutate;
        int threads_second = 2;
    } vo;
    verify->add_option("--mutate", vo.mutate, "test fixture: chernoff-constant");
    verify->add_option("--threads-second", vo.threads_second, "thread count for the rerun");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (g.threads > 0) crmimo::par::set_max_threads(g.threads);
    const auto wall_start = std::chrono::steady_clock::now();

    try {
        using namespace crmimo;
        SplitRng root(g.seed);

        if (cap->parsed()) {
            const auto ens =
                make_ensemble(capo.ensemble, capo.ensemble_file, capo.n_rx, capo.n_tx, capo.scale);
            OutageSpec spec;
            spec.eta = capo.eta;
            spec.power = capo.power;
            spec.sigma_sq = capo.sigma_sq;
            spec.n_state_samples = capo.samples;
            spec.optimizer_restarts = capo.restarts;
            const CapacityEstimate est = eta_outage_capacity(ens, spec, root.split("outage-capacity"));
            std::ostringstream out;
            out << meta_line(g, "subcommand=outage-capacity");
            out << "eta,P,sigma_sq,capacity_bits,bracket_lo,bracket_hi,samples,seed\n";
            out << fmt_num(capo.eta) << "," << fmt_num(capo.power) << "," << fmt_num(capo.sigma_sq)
                << "," << fmt_num(est.value_bits) << "," << fmt_num(est.lower_bracket) << ","
                << fmt_num(est.upper_bracket) << "," << capo.samples << "," << g.seed << "\n";
            emit(g, out.str());
        } else if (siso->parsed()) {
            const auto ens = make_ensemble(so.ensemble, so.ensemble_file, 1, 1, so.scale);
            if (ens.n_rx() != 1 || ens.n_tx() != 1) throw InputError("siso-capacity needs a 1x1 ensemble");
            const double cap_bits = siso_outage_capacity(ens, so.eta, so.power, so.sigma_sq,
                                                         so.samples, root.split("siso-capacity"));
            std::ostringstream out;
            out << meta_line(g, "subcommand=siso-capacity");
            out << "eta,P,sigma_sq,capacity_bits,samples,seed\n";
            out << fmt_num(so.eta) << "," << fmt_num(so.power) << "," << fmt_num(so.sigma_sq) << ","
                << fmt_num(cap_bits) << "," << so.samples << "," << g.seed << "\n";
            emit(g, out.str());
        } else if (crc->parsed()) {
            const JointSource src = make_source(cro.source_file, cro.builtin, cro.p);
            CrOptions opts;
            opts.u_card = cro.u_card;
            const CrPoint pt = cr_capacity(src, cro.c, opts, root.split("cr-capacity"));
            std::ostringstream out;
            out << meta_line(g, "subcommand=cr-capacity");
            out << "c,cr_rate,iux,iuy,seed\n";
            out << fmt_num(pt.comm_rate_c) << "," << fmt_num(pt.cr_rate) << "," << fmt_num(pt.cr_rate)
                << "," << fmt_num(pt.iuy) << "," << g.seed << "\n";
            emit(g, out.str());
        } else if (crv->parsed()) {
            const JointSource src = make_source(cvo.source_file, cvo.builtin, cvo.p);
            CrOptions opts;
            opts.u_card = cvo.u_card;
            std::vector<double> grid;
            for (int i = 0; i < cvo.steps; ++i)
                grid.push_back(cvo.c_min + (cvo.c_max - cvo.c_min) * i / (cvo.steps - 1));
            const auto curve = cr_curve(src, grid, opts, root.split("cr-curve"));
            std::ostringstream out;
            out << meta_line(g, "subcommand=cr-curve");
            out << "c,cr_rate,channel_row_major\n";
            for (const auto& pt : curve) {
                out << fmt_num(pt.comm_rate_c) << "," << fmt_num(pt.cr_rate) << ",";
                const auto& w = pt.channel.rows();
                for (int r = 0; r < w.rows(); ++r)
                    for (int c = 0; c < w.cols(); ++c)
                        out << fmt_num(w(r, c)) << (r + 1 == w.rows() && c + 1 == w.cols() ? "" : ";");
                out << "\n";
            }
            emit(g, out.str());
        } else if (prot->parsed()) {
            std::ifstream cfg_in(po.config_file);
            if (!cfg_in) throw InputError("cannot open config: " + po.config_file);
            nlohmann::json cfg;
            try {
                cfg_in >> cfg;
            } catch (const std::exception& e) {
                throw InputError(std::string("bad config JSON: ") + e.what());
            }
            ProtocolConfig config;
            config.block_length_n = cfg.value("n", 12);
            config.mu = cfg.value("mu", 0.35);
            config.typ_delta = cfg.value("typ_delta", 0.15);
            config.decoder_typ_delta = cfg.value("decoder_typ_delta", -1.0);
            config.alpha_target = cfg.value("alpha", 0.1);
            config.trials = cfg.value("trials", std::size_t{200});
            config.noiseless = cfg.value("noiseless", false);
            const std::string transport = cfg.value("transport", std::string("genie"));
            if (transport == "genie")
                config.transport = ProtocolConfig::Transport::GenieBitPipe;
            else if (transport == "physical")
                config.transport = ProtocolConfig::Transport::PhysicalCompound;
            else if (transport == "forced-wrong")
                config.transport = ProtocolConfig::Transport::ForcedWrongIndex;
            else
                throw InputError("unknown transport: " + transport);
            const double p = cfg.value("dsbs_p", 0.05);
            const JointSource src = cfg.contains("source_csv")
                                        ? load_source_csv(cfg["source_csv"].get<std::string>())
                                        : JointSource::dsbs(p);
            const TestChannel aux = TestChannel::identity(src.nx(), src.nx());
            config.u_type = quantize_type(joint_ux_pmf(src, aux).rowwise().sum(),
                                          config.block_length_n);
            OutageSpec spec;
            spec.eta = cfg.value("eta", 0.1);
            spec.power = cfg.value("power", 100.0);
            spec.sigma_sq = cfg.value("sigma_sq", 1.0);
            spec.n_state_samples = cfg.value("states", std::size_t{20});
            const auto ens = FadingEnsemble::rayleigh_iid(cfg.value("n_rx", 1), cfg.value("n_tx", 1),
                                                          cfg.value("scale", 1.0));
            const std::uint64_t seed = cfg.value("seed", g.seed);
            const ProtocolOutcome out =
                run_protocol(src, aux, config, ens, spec, SplitRng(seed).split("simulate-protocol"));

            std::ostringstream csv;
            csv << meta_line(g, "subcommand=simulate-protocol");
            csv << "state_index,disagreement\n";
            for (std::size_t s = 0; s < out.per_state_disagreement.size(); ++s)
                csv << s << "," << fmt_num(out.per_state_disagreement[s]) << "\n";
            if (!po.out_csv.empty())
                write_text_file(po.out_csv, csv.str());
            else
                std::cout << csv.str();

            nlohmann::ordered_json summary;
            summary["seed"] = seed;
            summary["outage_fraction"] = out.outage_fraction;
            summary["entropy_rate"] = out.entropy_rate_estimate;
            summary["k_alphabet_size"] = out.k_alphabet_size;
            summary["n1"] = out.n1;
            summary["n2"] = out.n2;
            summary["cardinality_ok"] = out.cardinality_ok;
            const std::string sj = summary.dump(2) + "\n";
            if (!po.out_json.empty())
                write_text_file(po.out_json, sj);
            else
                std::cout << sj;
        } else if (comp->parsed()) {
            // Domination table over a small grid of each closed-form bound.
            std::ostringstream out;
            out << meta_line(g, "subcommand=compound-verify");
            out << "bound_name,parameters,analytic_value,empirical_value,trials,pass\n";
            SplitRng rng = root.split("compound-verify");
            {
                const int n = 10;
                const double delta = 0.5;
                const double bound = chernoff_info_density_bound(n, 1, delta);
                const ChannelState gch{(CMat(1, 1) << 1.0).finished()};
                const InputCovariance q((CMat(1, 1) << 1.0).finished(), 1.0);
                const double mean_bits = n * log_det_mi_raw(gch.entries, q.matrix(), 1.0);
                std::size_t hits = 0;
                for (std::size_t t = 0; t < cvopt.trials; ++t) {
                    SplitRng sub = rng.split("info").split(t);
                    CMat tt(1, n), zz(1, n);
                    for (int c = 0; c < n; ++c) {
                        tt(0, c) = sub.cnormal(1.0);
                        zz(0, c) = tt(0, c) + sub.cnormal(1.0);
                    }
                    if (info_density(gch, q, tt, zz, 1.0) <= mean_bits - n * delta) ++hits;
                }
                const double emp = static_cast<double>(hits) / static_cast<double>(cvopt.trials);
                const bool pass = emp <= bound + wilson_half_width(emp, cvopt.trials, 0.95);
                out << "info-density-tail,n=10;n_rx=1;delta=0.5," << fmt_num(bound) << ","
                    << fmt_num(emp) << "," << cvopt.trials << "," << (pass ? "pass" : "fail") << "\n";
            }
            {
                const int n = 10;
                const double bound = power_overflow_bound(n, 1.0, 1.0);
                std::size_t hits = 0;
                for (std::size_t t = 0; t < cvopt.trials; ++t) {
                    SplitRng sub = rng.split("power").split(t);
                    double sum = 0.0;
                    for (int i = 0; i < n; ++i) sum += std::norm(sub.cnormal(1.0));
                    if (sum >= n * 2.0) ++hits;
                }
                const double emp = static_cast<double>(hits) / static_cast<double>(cvopt.trials);
                const bool pass = emp <= bound + wilson_half_width(emp, cvopt.trials, 0.95);
                out << "power-overflow,n=10;M=1;delta=1," << fmt_num(bound) << "," << fmt_num(emp)
                    << "," << cvopt.trials << "," << (pass ? "pass" : "fail") << "\n";
            }
            {
                const int n = 8;
                const ChannelState ga{(CMat(1, 1) << 0.6).finished()};
                const ChannelState gb{(CMat(1, 1) << 0.7).finished()};
                const double rho = output_power_threshold(1.0, 1.0, 1, 1.0).rho;
                const double bound = likelihood_ratio_bound(ga, gb, n, 1.0, rho, 1.0, 1.0);
                const std::size_t ratio_trials = std::min<std::size_t>(cvopt.trials, 2000);
                double max_log = -1e300;
                SplitRng sub = rng.split("ratio");
                for (std::size_t t = 0; t < ratio_trials; ++t) {
                    CMat tt(1, n), zz(1, n);
                    for (int i = 0; i < n; ++i) {
                        tt(0, i) = sub.cnormal(1.0);
                        zz(0, i) = sub.cnormal(1.0);
                    }
                    tt *= std::sqrt(n * 1.0 / tt.squaredNorm());
                    zz *= std::sqrt(n * rho / zz.squaredNorm());
                    double lr = 0.0;
                    for (int i = 0; i < n; ++i)
                        lr += (std::norm(zz(0, i) - 0.7 * tt(0, i)) -
                               std::norm(zz(0, i) - 0.6 * tt(0, i))) /
                              (1.0 * 0.6931471805599453);
                    max_log = std::max(max_log, lr);
                }
                const bool pass = max_log <= std::log2(bound) + 1e-9;
                out << "likelihood-ratio,n=8;g=0.6;ghat=0.7;log2-scale," << fmt_num(std::log2(bound))
                    << "," << fmt_num(max_log) << "," << ratio_trials << ","
                    << (pass ? "pass" : "fail") << "\n";
            }
            {
                const int n = 10;
                const auto b = output_power_threshold(1.0, 1.0, 1, 1.0);
                const double bound = std::pow(b.prob_bound_per_n, n);
                std::size_t hits = 0;
                SplitRng sub = rng.split("output");
                for (std::size_t t = 0; t < cvopt.trials; ++t) {
                    double sum = 0.0;
                    for (int i = 0; i < n; ++i) sum += std::norm(1.0 + sub.cnormal(1.0));
                    if (sum >= n * b.rho) ++hits;
                }
                const double emp = static_cast<double>(hits) / static_cast<double>(cvopt.trials);
                const bool pass = emp <= bound + wilson_half_width(emp, cvopt.trials, 0.95);
                out << "output-power,n=10;a=1;P=1;sigma_sq=1," << fmt_num(bound) << ","
                    << fmt_num(emp) << "," << cvopt.trials << "," << (pass ? "pass" : "fail")
                    << "\n";
            }
            emit(g, out.str());
        } else if (iddemo->parsed()) {
            ProtocolConfig config;
            config.block_length_n = ido.n;
            config.mu = 0.30;
            config.typ_delta = 0.15;
            config.alpha_target = 0.3;
            config.u_type = {0.5, 0.5};
            config.trials = 1;
            config.noiseless = true;
            config.codebook_cap = std::size_t{1} << 21;
            OutageSpec spec;
            spec.eta = 0.1;
            spec.power = 100.0;
            spec.sigma_sq = 1.0;
            spec.n_state_samples = ido.states;
            const IdSetup setup(JointSource::dsbs(ido.p), TestChannel::identity(2, 2), config, spec,
                                root.split("id-demo-setup"));
            const ColoringFamily family = build_colorings(ido.identities, setup.codebook.k_alphabet(),
                                                          ido.m_colors, root.split("id-demo-colors"));
            const auto ens = FadingEnsemble::rayleigh_iid(1, 1, 1.0);
            const IdOutcome out = estimate_id_errors(family, setup, ens, ido.states, ido.trials,
                                                     ido.lambda1, ido.lambda2, root.split("id-demo"));
            nlohmann::ordered_json doc;
            doc["seed"] = g.seed;
            doc["identities"] = out.identity_count;
            doc["second_stage_messages"] = out.second_stage_messages;
            doc["lambda1_measured"] = out.lambda1_measured;
            doc["lambda2_measured"] = out.lambda2_measured;
            doc["lambda_sum_below_one"] = out.lambda1_measured + out.lambda2_measured < 1.0;
            doc["outage_fraction_e1"] = out.outage_fraction_e1;
            doc["outage_fraction_e2"] = out.outage_fraction_e2;
            emit(g, doc.dump(2) + "\n");
        } else if (bounds->parsed()) {
            std::ostringstream out;
            out << meta_line(g, "subcommand=bounds");
            out << "lemma,value\n";
            if (bo.lemma == "info-density-tail") {
                out << bo.lemma << "," << fmt_num(chernoff_info_density_bound(bo.n, bo.n_rx, bo.delta))
                    << "\n";
            } else if (bo.lemma == "power-overflow") {
                out << bo.lemma << "," << fmt_num(power_overflow_bound(bo.n, bo.m, bo.delta)) << "\n";
            } else if (bo.lemma == "output-power") {
                const auto b = output_power_threshold(bo.a, bo.power, bo.n_rx, bo.sigma_sq);
                out << bo.lemma << "-rho," << fmt_num(b.rho) << "\n";
                out << bo.lemma << "-per-n," << fmt_num(b.prob_bound_per_n) << "\n";
            } else if (bo.lemma == "likelihood-ratio") {
                const ChannelState gA{(CMat(1, 1) << bo.a).finished()};
                const ChannelState gB{(CMat(1, 1) << bo.a - bo.dist).finished()};
                const double rho = bo.rho > 0.0
                                       ? bo.rho
                                       : output_power_threshold(bo.a, bo.power, 1, bo.sigma_sq).rho;
                out << bo.lemma << ","
                    << fmt_num(likelihood_ratio_bound(gA, gB, bo.n, bo.power, rho, bo.a, bo.sigma_sq))
                    << "\n";
            } else {
                throw InputError("unknown lemma: " + bo.lemma);
            }
            emit(g, out.str());
        } else if (verify->parsed()) {
            VerifyOptions opts;
            opts.seed = g.seed == 1 ? 20260808 : g.seed;
            opts.threads_first = g.threads > 0 ? g.threads : 1;
            opts.threads_second = vo.threads_second;
            if (vo.mutate == "chernoff-constant")
                opts.mutation = Mutation::ChernoffConstant;
            else if (!vo.mutate.empty())
                throw InputError("unknown mutation fixture: " + vo.mutate);
            const auto results = run_acceptance(opts);
            std::cerr << format_report(results);
            emit(g, report_json(results, opts.seed));
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
            std::cerr << "wall_time_s=" << wall << "\n";
            return all_passed(results) ? kExitOk : kExitCriterion;
        }

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        std::cerr << "wall_time_s=" << wall << "\n";
        return kExitOk;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
