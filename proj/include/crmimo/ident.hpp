#pragma once

#include <cstdint>
#include <vector>

#include "crmimo/protocol.hpp"

namespace crmimo {

/// N uniform random maps from the K alphabet (size M') to {0..M''-1}.
struct ColoringFamily {
    std::vector<std::vector<std::uint32_t>> colorings;
    std::size_t m_prime = 0;
    std::size_t m_double_prime = 0;

    std::size_t n_identities() const { return colorings.size(); }
};

ColoringFamily build_colorings(std::size_t n_identities, std::size_t m_prime,
                               std::size_t m_double_prime, SplitRng rng);

/// Everything one identification round needs; codebook built once and shared.
struct IdSetup {
    JointSource source;
    TestChannel aux;
    ProtocolConfig config;
    OutageSpec channel_spec;
    BinCodebook codebook;
    Eigen::MatrixXd pux;
    Eigen::MatrixXd puy;

    IdSetup(JointSource src, TestChannel aux_channel, ProtocolConfig cfg, OutageSpec spec,
            SplitRng rng);
};

/// Stage-2 genie: the color survives iff log2(M'')/ceil(sqrt(n)) fits under
/// the instantaneous mutual information (always, when noiseless).
std::uint32_t transmit_color(std::uint32_t color, std::size_t m_double_prime, const IdSetup& setup,
                             const ChannelState& g, SplitRng& rng);

/// One round of the two-stage scheme; true = receiver accepts the tested identity.
bool id_round(std::size_t identity_sent, std::size_t identity_tested, const IdSetup& setup,
              const ColoringFamily& family, const ChannelState& g, SplitRng& rng);

struct IdOutcome {
    std::vector<double> e1_per_state;  // max over identities, reject when sent = tested
    std::vector<double> e2_per_state;  // max over ordered pairs, accept when sent != tested
    std::size_t identity_count = 0;
    std::size_t second_stage_messages = 0;  // M''
    double lambda1_measured = 0.0;          // max over states of e1
    double lambda2_measured = 0.0;
    double outage_fraction_e1 = 0.0;  // states with e1 > lambda1 target
    double outage_fraction_e2 = 0.0;
};

IdOutcome estimate_id_errors(const ColoringFamily& family, const IdSetup& setup,
                             const FadingEnsemble& ensemble, std::size_t n_states,
                             std::size_t trials_per_pair, double lambda1, double lambda2,
                             SplitRng rng);

}  // namespace crmimo
