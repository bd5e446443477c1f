#include "crmimo/ident.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crmimo {

ColoringFamily build_colorings(std::size_t n_identities, std::size_t m_prime,
                               std::size_t m_double_prime, SplitRng rng) {
    if (n_identities == 0 || m_prime == 0 || m_double_prime == 0)
        throw std::invalid_argument("build_colorings: arguments must be positive");
    ColoringFamily fam;
    fam.m_prime = m_prime;
    fam.m_double_prime = m_double_prime;
    fam.colorings.resize(n_identities);
    for (std::size_t i = 0; i < n_identities; ++i) {
        SplitRng sub = rng.split(i);
        auto& map = fam.colorings[i];
        map.resize(m_prime);
        for (std::size_t k = 0; k < m_prime; ++k)
            map[k] = static_cast<std::uint32_t>(sub.below(m_double_prime));
    }
    return fam;
}

IdSetup::IdSetup(JointSource src, TestChannel aux_channel, ProtocolConfig cfg, OutageSpec spec,
                 SplitRng rng)
    : source(std::move(src)),
      aux(std::move(aux_channel)),
      config(std::move(cfg)),
      channel_spec(spec),
      codebook(generate_codebook(config, aux, source, rng.split("codebook"))),
      pux(joint_ux_pmf(source, aux)),
      puy(joint_uy_pmf(source, aux)) {}

std::uint32_t transmit_color(std::uint32_t color, std::size_t m_double_prime, const IdSetup& setup,
                             const ChannelState& g, SplitRng& rng) {
    if (setup.config.noiseless) return color;
    const auto stage2_len =
        static_cast<double>(std::ceil(std::sqrt(static_cast<double>(setup.config.block_length_n))));
    const double rate = std::log2(static_cast<double>(m_double_prime)) / stage2_len;
    CMat qg = setup.config.genie_covariance
                  ? *setup.config.genie_covariance
                  : CMat(CMat::Identity(g.n_tx(), g.n_tx()) * (setup.channel_spec.power / g.n_tx()));
    const double f = log_det_mi_raw(g.entries, qg, setup.channel_spec.sigma_sq);
    if (rate <= f) return color;
    const auto wrong = static_cast<std::uint32_t>(rng.below(m_double_prime - 1));
    return wrong >= color ? wrong + 1 : wrong;
}

bool id_round(std::size_t identity_sent, std::size_t identity_tested, const IdSetup& setup,
              const ColoringFamily& family, const ChannelState& g, SplitRng& rng) {
    if (identity_sent >= family.n_identities() || identity_tested >= family.n_identities())
        throw std::invalid_argument("id_round: identity out of range");
    if (family.m_prime != setup.codebook.k_alphabet())
        throw std::invalid_argument("id_round: coloring domain does not match the K alphabet");

    const int n = setup.config.block_length_n;
    Sequence xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto [x, y] = setup.source.sample(rng);
        xs[static_cast<std::size_t>(i)] = static_cast<Symbol>(x);
        ys[static_cast<std::size_t>(i)] = static_cast<Symbol>(y);
    }
    const EncodeResult enc = encoder_phi(xs, setup.codebook, setup.pux, setup.config.typ_delta);

    SplitRng stage1_rng = rng.split("stage1");
    const std::size_t received_bin = transmit_bin(enc.bin_index, setup.config, g,
                                                  setup.channel_spec, setup.codebook.n1, stage1_rng);
    SplitRng stage2_rng = rng.split("stage2");
    const std::uint32_t sent_color = family.colorings[identity_sent][enc.k_index];
    const std::uint32_t received_color =
        transmit_color(sent_color, family.m_double_prime, setup, g, stage2_rng);

    const std::size_t l = decoder_psi(ys, received_bin, setup.codebook, setup.puy,
                                      setup.config.decoder_delta());
    return received_color == family.colorings[identity_tested][l];
}

IdOutcome estimate_id_errors(const ColoringFamily& family, const IdSetup& setup,
                             const FadingEnsemble& ensemble, std::size_t n_states,
                             std::size_t trials_per_pair, double lambda1, double lambda2,
                             SplitRng rng) {
    if (n_states == 0 || trials_per_pair == 0)
        throw std::invalid_argument("estimate_id_errors: empty experiment");
    const std::size_t n_ids = family.n_identities();

    IdOutcome out;
    out.identity_count = n_ids;
    out.second_stage_messages = family.m_double_prime;
    out.e1_per_state.resize(n_states);
    out.e2_per_state.resize(n_states);

    SplitRng state_rng = rng.split("states");
    std::size_t e1_outages = 0, e2_outages = 0;
    for (std::size_t s = 0; s < n_states; ++s) {
        const ChannelState g = sample_state(ensemble, state_rng);
        SplitRng round_root = rng.split("rounds").split(s);

        double e1 = 0.0;
        for (std::size_t i = 0; i < n_ids; ++i) {
            std::size_t rejects = 0;
            SplitRng pair_rng = round_root.split(i * n_ids + i);
            for (std::size_t t = 0; t < trials_per_pair; ++t) {
                SplitRng trial_rng = pair_rng.split(t);
                if (!id_round(i, i, setup, family, g, trial_rng)) ++rejects;
            }
            e1 = std::max(e1, static_cast<double>(rejects) / static_cast<double>(trials_per_pair));
        }

        double e2 = 0.0;
        for (std::size_t tested = 0; tested < n_ids; ++tested) {
            for (std::size_t sent = 0; sent < n_ids; ++sent) {
                if (sent == tested) continue;
                std::size_t accepts = 0;
                SplitRng pair_rng = round_root.split(tested * n_ids + sent);
                for (std::size_t t = 0; t < trials_per_pair; ++t) {
                    SplitRng trial_rng = pair_rng.split(t);
                    if (id_round(sent, tested, setup, family, g, trial_rng)) ++accepts;
                }
                e2 = std::max(e2,
                              static_cast<double>(accepts) / static_cast<double>(trials_per_pair));
            }
        }

        out.e1_per_state[s] = e1;
        out.e2_per_state[s] = e2;
        if (e1 > lambda1) ++e1_outages;
        if (e2 > lambda2) ++e2_outages;
        out.lambda1_measured = std::max(out.lambda1_measured, e1);
        out.lambda2_measured = std::max(out.lambda2_measured, e2);
    }
    out.outage_fraction_e1 = static_cast<double>(e1_outages) / static_cast<double>(n_states);
    out.outage_fraction_e2 = static_cast<double>(e2_outages) / static_cast<double>(n_states);
    return out;
}

}  // namespace crmimo
