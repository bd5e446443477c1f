#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crmimo/compound.hpp"
#include "crmimo/outage.hpp"
#include "crmimo/source.hpp"

namespace crmimo {

using Symbol = std::uint8_t;
using Sequence = std::vector<Symbol>;

struct ProtocolConfig {
    int block_length_n = 12;
    double mu = 0.3;                 // rate slack in the N1/N2 exponents
    double typ_delta = 0.05;         // encoder-side typicality tolerance
    double decoder_typ_delta = -1.0; // < 0: same as typ_delta
    double alpha_target = 0.1;
    std::vector<double> u_type;      // pmf over U; n * u_type must be integral

    enum class Transport { GenieBitPipe, PhysicalCompound, ForcedWrongIndex };
    Transport transport = Transport::GenieBitPipe;
    std::size_t trials = 200;
    std::size_t codebook_cap = std::size_t{1} << 20;
    bool noiseless = false;  // transports always deliver (test control)

    std::optional<CMat> genie_covariance;  // default (P/N_T) I
    double physical_beta_fraction = 0.25;  // beta = P * fraction
    double physical_theta = 1.0;

    double decoder_delta() const { return decoder_typ_delta < 0.0 ? typ_delta : decoder_typ_delta; }
    void validate() const;
};

/// N1 bins of N2 type-class sequences plus the tagged reserve word u0.
/// Words live in one flat buffer (word w at flat[w*n .. w*n+n)), scan order
/// (i-1)*n2 + (j-1).
struct BinCodebook {
    std::vector<Symbol> flat;
    int n = 0;
    Sequence reserve_word;  // u0, distinct by tagging
    std::size_t n1 = 0;
    std::size_t n2 = 0;

    std::size_t k_alphabet() const { return n1 * n2 + 1; }
    std::size_t u0_index() const { return n1 * n2; }
    std::size_t word_count() const { return n1 * n2; }
    const Symbol* word(std::size_t idx) const {
        return flat.data() + idx * static_cast<std::size_t>(n);
    }
    Sequence word_copy(std::size_t idx) const {
        return Sequence(word(idx), word(idx) + n);
    }
};

struct ProtocolOutcome {
    std::vector<double> per_state_disagreement;
    double outage_fraction = 0.0;       // states with disagreement > alpha_target
    double entropy_rate_estimate = 0.0; // plug-in H(K)/n
    std::size_t k_alphabet_size = 0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    bool cardinality_ok = false;  // log2 |K| <= n (H(X) + mu + 1)
};

/// Largest-remainder quantization of a pmf into a valid type for block length n.
std::vector<double> quantize_type(const Eigen::VectorXd& pmf, int n);

/// N1 = floor(2^{n[I(U;X)-I(U;Y)+3mu]}), N2 = floor(2^{n[I(U;Y)-2mu]}), clamped to >= 1.
std::pair<std::size_t, std::size_t> bin_code_sizes(const JointSource& source, const TestChannel& aux,
                                                   const ProtocolConfig& config);

BinCodebook generate_codebook(const ProtocolConfig& config, const TestChannel& aux,
                              const JointSource& source, SplitRng rng);

/// L-infinity closeness of the joint empirical distribution of (u, x) to joint_pmf(u, x).
bool joint_typicality(const Sequence& x_seq, const Sequence& u_seq, const Eigen::MatrixXd& joint_pmf,
                      double typ_delta);

struct EncodeResult {
    std::size_t k_index = 0;    // word index, or u0_index() for the reserve word
    std::size_t bin_index = 0;  // 1..N1, or N1+1 for the fallback branch
};

/// First-scan encoder: bins in index order, within a bin in index order.
EncodeResult encoder_phi(const Sequence& x_seq, const BinCodebook& codebook,
                         const Eigen::MatrixXd& joint_pmf_ux, double typ_delta);

/// Physical transport state, built once per run.
struct PhysicalLink {
    GaussianCodebook codebook;
    double threshold_alpha = 0.0;
    double threshold_delta = 0.0;
};

std::size_t transmit_bin(std::size_t bin_index, const ProtocolConfig& config, const ChannelState& g,
                         const OutageSpec& spec, std::size_t n1, SplitRng& rng,
                         const PhysicalLink* link = nullptr);

/// Bin scan with the exactly-one rule; returns a k index (u0_index() on the
/// reserve branches).
std::size_t decoder_psi(const Sequence& y_seq, std::size_t received_index,
                        const BinCodebook& codebook, const Eigen::MatrixXd& joint_pmf_uy,
                        double typ_delta);

ProtocolOutcome run_protocol(const JointSource& source, const TestChannel& aux,
                             const ProtocolConfig& config, const FadingEnsemble& ensemble,
                             const OutageSpec& spec, SplitRng rng);

/// P_UX(u,x) = P_X(x) W(u|x) and P_UY(u,y) = sum_x W(u|x) P_XY(x,y).
Eigen::MatrixXd joint_ux_pmf(const JointSource& source, const TestChannel& aux);
Eigen::MatrixXd joint_uy_pmf(const JointSource& source, const TestChannel& aux);

}  // namespace crmimo
