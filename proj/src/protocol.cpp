#include "crmimo/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "crmimo/cr.hpp"
#include "crmimo/stats.hpp"

namespace crmimo {

namespace {

// Counts per symbol of a sequence over an alphabet of the given size.
std::vector<int> symbol_counts(const Symbol* s, std::size_t n, int alphabet) {
    std::vector<int> c(alphabet, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (s[i] >= alphabet) throw std::invalid_argument("sequence symbol out of range");
        ++c[s[i]];
    }
    return c;
}

bool typical_span(const Symbol* x, const Symbol* u, std::size_t n, const Eigen::MatrixXd& joint_pmf,
                  double typ_delta) {
    const int nu = static_cast<int>(joint_pmf.rows());
    const int nx = static_cast<int>(joint_pmf.cols());
    // Pair counts on a small stack-friendly buffer.
    int counts[64] = {0};
    if (nu * nx > 64) throw std::invalid_argument("joint_typicality: alphabet too large");
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] >= nu || x[i] >= nx)
            throw std::invalid_argument("joint_typicality: symbol out of range");
        ++counts[u[i] * nx + x[i]];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int uu = 0; uu < nu; ++uu)
        for (int xx = 0; xx < nx; ++xx)
            if (std::abs(counts[uu * nx + xx] * inv_n - joint_pmf(uu, xx)) > typ_delta) return false;
    return true;
}

// Necessary condition for any sequence of the given row type to be jointly
// typical with x: every column ("x symbol") demand must fit inside the per-cell
// typicality windows, and likewise every row supply. A failed check proves no
// codeword can match, so the bin scan may be skipped.
bool typicality_possible(const std::vector<int>& x_counts, const std::vector<int>& u_type_counts,
                         const Eigen::MatrixXd& joint_pmf, double typ_delta, int n) {
    const int nu = static_cast<int>(joint_pmf.rows());
    const int nx = static_cast<int>(joint_pmf.cols());
    for (int x = 0; x < nx; ++x) {
        double lo = 0.0, hi = 0.0;
        for (int u = 0; u < nu; ++u) {
            lo += std::max(0.0, n * (joint_pmf(u, x) - typ_delta));
            hi += n * (joint_pmf(u, x) + typ_delta);
        }
        if (x_counts[x] + 1e-9 < lo || x_counts[x] - 1e-9 > hi) return false;
    }
    for (int u = 0; u < nu; ++u) {
        double lo = 0.0, hi = 0.0;
        for (int x = 0; x < nx; ++x) {
            lo += std::max(0.0, n * (joint_pmf(u, x) - typ_delta));
            hi += n * (joint_pmf(u, x) + typ_delta);
        }
        if (u_type_counts[u] + 1e-9 < lo || u_type_counts[u] - 1e-9 > hi) return false;
    }
    return true;
}

}  // namespace

void ProtocolConfig::validate() const {
    if (block_length_n < 1) throw std::invalid_argument("ProtocolConfig: bad block length");
    if (!(mu > 0.0)) throw std::invalid_argument("ProtocolConfig: mu must be > 0");
    if (!(typ_delta > 0.0)) throw std::invalid_argument("ProtocolConfig: typ_delta must be > 0");
    if (!(alpha_target > 0.0 && alpha_target < 1.0))
        throw std::invalid_argument("ProtocolConfig: alpha_target must be in (0,1)");
    if (u_type.empty()) throw std::invalid_argument("ProtocolConfig: u_type required");
    double sum = 0.0;
    for (double p : u_type) {
        if (p < 0.0) throw std::invalid_argument("ProtocolConfig: negative type entry");
        const double scaled = p * block_length_n;
        if (std::abs(scaled - std::lround(scaled)) > 1e-9)
            throw std::invalid_argument("ProtocolConfig: u_type is not a possible type for n");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("ProtocolConfig: u_type must sum to 1");
    if (trials == 0) throw std::invalid_argument("ProtocolConfig: trials must be > 0");
}

std::vector<double> quantize_type(const Eigen::VectorXd& pmf, int n) {
    const int k = static_cast<int>(pmf.size());
    std::vector<int> counts(k, 0);
    std::vector<std::pair<double, int>> rema(k);
    int assigned = 0;
    for (int i = 0; i < k; ++i) {
        const double exact = pmf(i) * n;
        counts[i] = static_cast<int>(std::floor(exact));
        assigned += counts[i];
        rema[i] = {exact - counts[i], i};
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int i = 0; i < n - assigned; ++i) ++counts[rema[static_cast<std::size_t>(i)].second];
    std::vector<double> type(k);
    for (int i = 0; i < k; ++i) type[i] = static_cast<double>(counts[i]) / n;
    return type;
}

std::pair<std::size_t, std::size_t> bin_code_sizes(const JointSource& source, const TestChannel& aux,
                                                   const ProtocolConfig& config) {
    const auto [iux, iuy] = induced_quantities(source, aux);
    const double n = config.block_length_n;
    const double e1 = n * (iux - iuy + 3.0 * config.mu);
    const double e2 = n * (iuy - 2.0 * config.mu);
    const auto clamp = [](double e) {
        if (e <= 0.0) return std::size_t{1};
        return static_cast<std::size_t>(std::max(1.0, std::floor(std::exp2(e))));
    };
    return {clamp(e1), clamp(e2)};
}

Eigen::MatrixXd joint_ux_pmf(const JointSource& source, const TestChannel& aux) {
    if (aux.nx() != source.nx()) throw std::invalid_argument("joint_ux_pmf: dimension mismatch");
    const Eigen::VectorXd px = source.marginal_x();
    Eigen::MatrixXd out(aux.u_card(), source.nx());
    for (int u = 0; u < aux.u_card(); ++u)
        for (int x = 0; x < source.nx(); ++x) out(u, x) = px(x) * aux.rows()(x, u);
    return out;
}

Eigen::MatrixXd joint_uy_pmf(const JointSource& source, const TestChannel& aux) {
    if (aux.nx() != source.nx()) throw std::invalid_argument("joint_uy_pmf: dimension mismatch");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(aux.u_card(), source.ny());
    for (int u = 0; u < aux.u_card(); ++u)
        for (int y = 0; y < source.ny(); ++y)
            for (int x = 0; x < source.nx(); ++x) out(u, y) += aux.rows()(x, u) * source.pmf()(x, y);
    return out;
}

BinCodebook generate_codebook(const ProtocolConfig& config, const TestChannel& aux,
                              const JointSource& source, SplitRng rng) {
    config.validate();
    const auto [n1, n2] = bin_code_sizes(source, aux, config);
    if (n1 * n2 > config.codebook_cap)
        throw std::runtime_error("generate_codebook: N1*N2 exceeds the desk-scale cap");
    const int n = config.block_length_n;
    const int nu = static_cast<int>(config.u_type.size());

    // Base multiset of the type; each word is an independent uniform shuffle.
    Sequence base;
    base.reserve(static_cast<std::size_t>(n));
    for (int u = 0; u < nu; ++u) {
        const auto c = static_cast<int>(std::lround(config.u_type[static_cast<std::size_t>(u)] * n));
        base.insert(base.end(), static_cast<std::size_t>(c), static_cast<Symbol>(u));
    }

    BinCodebook book;
    book.n1 = n1;
    book.n2 = n2;
    book.n = n;
    book.flat.resize(n1 * n2 * static_cast<std::size_t>(n));
    Sequence scratch;
    for (std::size_t w = 0; w < book.word_count(); ++w) {
        SplitRng sub = rng.split(w);
        scratch = base;
        for (std::size_t i = scratch.size(); i > 1; --i)
            std::swap(scratch[i - 1], scratch[static_cast<std::size_t>(sub.below(i))]);
        std::copy(scratch.begin(), scratch.end(),
                  book.flat.begin() + static_cast<std::ptrdiff_t>(w * static_cast<std::size_t>(n)));
    }
    // u0: constant sequence of the most probable U symbol; distinct by tag
    // (its k index), not by content.
    const int top = static_cast<int>(std::max_element(config.u_type.begin(), config.u_type.end()) -
                                     config.u_type.begin());
    book.reserve_word.assign(static_cast<std::size_t>(n), static_cast<Symbol>(top));
    return book;
}

bool joint_typicality(const Sequence& x_seq, const Sequence& u_seq, const Eigen::MatrixXd& joint_pmf,
                      double typ_delta) {
    if (x_seq.size() != u_seq.size()) throw std::invalid_argument("joint_typicality: length mismatch");
    return typical_span(x_seq.data(), u_seq.data(), x_seq.size(), joint_pmf, typ_delta);
}

EncodeResult encoder_phi(const Sequence& x_seq, const BinCodebook& codebook,
                         const Eigen::MatrixXd& joint_pmf_ux, double typ_delta) {
    const int n = static_cast<int>(x_seq.size());
    const int nu = static_cast<int>(joint_pmf_ux.rows());
    const int nx = static_cast<int>(joint_pmf_ux.cols());
    const auto x_counts = symbol_counts(x_seq.data(), x_seq.size(), nx);
    const auto type_counts = symbol_counts(codebook.word(0), static_cast<std::size_t>(codebook.n), nu);
    if (typicality_possible(x_counts, type_counts, joint_pmf_ux, typ_delta, n)) {
        for (std::size_t w = 0; w < codebook.word_count(); ++w) {
            if (typical_span(x_seq.data(), codebook.word(w), x_seq.size(), joint_pmf_ux, typ_delta))
                return {w, w / codebook.n2 + 1};
        }
    }
    return {codebook.u0_index(), codebook.n1 + 1};
}

std::size_t transmit_bin(std::size_t bin_index, const ProtocolConfig& config, const ChannelState& g,
                         const OutageSpec& spec, std::size_t n1, SplitRng& rng,
                         const PhysicalLink* link) {
    if (bin_index < 1 || bin_index > n1 + 1) throw std::invalid_argument("transmit_bin: bad index");
    const std::size_t alphabet = n1 + 1;

    auto uniform_wrong = [&](std::size_t sent) {
        const std::size_t r = static_cast<std::size_t>(rng.below(alphabet - 1)) + 1;
        return r >= sent ? r + 1 : r;
    };

    switch (config.transport) {
        case ProtocolConfig::Transport::ForcedWrongIndex:
            return uniform_wrong(bin_index);
        case ProtocolConfig::Transport::GenieBitPipe: {
            if (config.noiseless) return bin_index;
            const double rate = std::log2(static_cast<double>(alphabet)) / config.block_length_n;
            CMat qg = config.genie_covariance
                          ? *config.genie_covariance
                          : CMat(CMat::Identity(g.n_tx(), g.n_tx()) * (spec.power / g.n_tx()));
            const double f = log_det_mi_raw(g.entries, qg, spec.sigma_sq);
            return rate <= f ? bin_index : uniform_wrong(bin_index);
        }
        case ProtocolConfig::Transport::PhysicalCompound: {
            if (link == nullptr) throw std::invalid_argument("transmit_bin: physical link missing");
            const CMat& t = link->codebook.codewords[bin_index - 1];
            SignalBlock in{t, true, spec.power};
            SplitRng noise_rng = rng.split("channel-noise");
            SignalBlock out = apply_channel(g, in, NoiseSpec(spec.sigma_sq, !config.noiseless),
                                            noise_rng);
            // CSIR: the decoder adapts to the realized state.
            CompoundFamily self({g}, std::max(operator_norm(g), 1e-9), spec.sigma_sq);
            ThresholdDecoderSpec dec(link->threshold_alpha, link->threshold_delta);
            const double thr = dec.threshold();
            std::size_t candidates = 0, candidate = 0;
            for (std::size_t m = 0; m < link->codebook.codewords.size(); ++m) {
                const double i_bits = info_density(g, link->codebook.generator_covariance,
                                                   link->codebook.codewords[m], out.columns,
                                                   spec.sigma_sq);
                if (i_bits > thr) {
                    ++candidates;
                    candidate = m;
                    if (candidates > 1) break;
                }
            }
            if (candidates == 1) return candidate + 1;
            return uniform_wrong(bin_index);
        }
    }
    throw std::logic_error("transmit_bin: unreachable");
}

std::size_t decoder_psi(const Sequence& y_seq, std::size_t received_index,
                        const BinCodebook& codebook, const Eigen::MatrixXd& joint_pmf_uy,
                        double typ_delta) {
    if (received_index < 1 || received_index > codebook.n1 + 1)
        throw std::invalid_argument("decoder_psi: bad index");
    if (received_index == codebook.n1 + 1) return codebook.u0_index();
    std::size_t found = 0, hit = 0;
    const std::size_t base = (received_index - 1) * codebook.n2;
    for (std::size_t j = 0; j < codebook.n2; ++j) {
        if (typical_span(y_seq.data(), codebook.word(base + j), y_seq.size(), joint_pmf_uy,
                         typ_delta)) {
            ++found;
            hit = base + j;
            if (found > 1) break;
        }
    }
    return found == 1 ? hit : codebook.u0_index();
}

ProtocolOutcome run_protocol(const JointSource& source, const TestChannel& aux,
                             const ProtocolConfig& config, const FadingEnsemble& ensemble,
                             const OutageSpec& spec, SplitRng rng) {
    config.validate();
    spec.validate();
    BinCodebook book = generate_codebook(config, aux, source, rng.split("codebook"));
    const Eigen::MatrixXd pux = joint_ux_pmf(source, aux);
    const Eigen::MatrixXd puy = joint_uy_pmf(source, aux);
    const int n = config.block_length_n;

    PhysicalLink link;
    const PhysicalLink* link_ptr = nullptr;
    if (config.transport == ProtocolConfig::Transport::PhysicalCompound) {
        const double beta = spec.power * config.physical_beta_fraction;
        CMat q1 = CMat::Identity(ensemble.n_tx(), ensemble.n_tx()) *
                  ((spec.power - beta) / ensemble.n_tx());
        const double rate = std::log2(static_cast<double>(book.n1 + 1)) / n;
        link.codebook = sample_codebook(book.n1 + 1, n, InputCovariance(q1, spec.power), spec.power,
                                        rng.split("physical-codebook"));
        link.threshold_alpha = n * (rate + config.physical_theta / 8.0);
        link.threshold_delta = n * config.physical_theta / 8.0;
        link_ptr = &link;
    }

    ProtocolOutcome out;
    out.n1 = book.n1;
    out.n2 = book.n2;
    out.k_alphabet_size = book.k_alphabet();
    out.cardinality_ok = std::log2(static_cast<double>(out.k_alphabet_size)) <=
                         n * (source.entropy_x() + config.mu + 1.0) + 1e-9;

    std::vector<std::size_t> k_counts(book.k_alphabet(), 0);
    SplitRng state_rng = rng.split("states");
    const std::size_t n_states = spec.n_state_samples;
    out.per_state_disagreement.resize(n_states);
    std::size_t outage_states = 0;

    for (std::size_t s = 0; s < n_states; ++s) {
        const ChannelState g = sample_state(ensemble, state_rng);
        SplitRng trial_root = rng.split("trials").split(s);
        std::size_t disagreements = 0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            SplitRng trial_rng = trial_root.split(t);
            Sequence xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const auto [x, y] = source.sample(trial_rng);
                xs[static_cast<std::size_t>(i)] = static_cast<Symbol>(x);
                ys[static_cast<std::size_t>(i)] = static_cast<Symbol>(y);
            }
            const EncodeResult enc = encoder_phi(xs, book, pux, config.typ_delta);
            SplitRng chan_rng = trial_rng.split("transport");
            const std::size_t received =
                transmit_bin(enc.bin_index, config, g, spec, book.n1, chan_rng, link_ptr);
            const std::size_t l = decoder_psi(ys, received, book, puy, config.decoder_delta());
            ++k_counts[enc.k_index];
            if (enc.k_index != l) ++disagreements;
        }
        const double d = static_cast<double>(disagreements) / static_cast<double>(config.trials);
        out.per_state_disagreement[s] = d;
        if (d > config.alpha_target) ++outage_states;
    }
    out.outage_fraction = static_cast<double>(outage_states) / static_cast<double>(n_states);
    out.entropy_rate_estimate = plugin_entropy_bits(k_counts) / n;
    return out;
}

}  // namespace crmimo
