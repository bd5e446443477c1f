#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "crmimo/channel.hpp"
#include "crmimo/rng.hpp"

namespace crmimo {

/// Finite family {W_g : g in G'} with every member inside the operator-norm ball.
struct CompoundFamily {
    std::vector<ChannelState> states;
    double norm_bound_a = 1.0;
    double sigma_sq = 1.0;

    CompoundFamily(std::vector<ChannelState> s, double a, double sig);
};

struct GaussianCodebook {
    std::vector<CMat> codewords;  // each n_tx x n, all inside E_n
    InputCovariance generator_covariance;
    int block_length = 0;
    double power_cap = 0.0;
    std::size_t resampled = 0;  // raw draws rejected by the power cap (logged)
};

struct ThresholdDecoderSpec {
    double alpha_bits = 0.0;
    double delta_bits = 0.0;

    ThresholdDecoderSpec(double a, double d);
    double threshold() const { return alpha_bits + delta_bits; }
};

/// i_g(t^n, z^n) in bits against the product output density CN(0, gQg^H + sigma^2 I).
double info_density(const ChannelState& g, const InputCovariance& q, const CMat& t_block,
                    const CMat& z_block, double sigma_sq);

/// Right side of the Chernoff tail P[i <= E[i] - n*delta], delta in bits/symbol.
double chernoff_info_density_bound(int n, int n_rx, double delta);

/// Right side of P[sum ||X_i||^2 >= n(M + delta)] for i.i.d. CN with tr cov <= M.
double power_overflow_bound(int n, double trace_cap_m, double delta);

/// beta_hat = beta/(ln2 * (P-beta)) - log2(1 + beta/(P-beta)).
double beta_hat_backoff(double power, double beta);

/// Four-term code-existence bound: |G'| tau 2^-alpha + |G'|^2 2^-delta
/// + |G'| 2^-n*beta_hat + (sum of per-state info-density tail bounds).
double feinstein_compound_bound(std::size_t family_size, double tau, double alpha_bits,
                                double delta_bits, int n, double beta_hat, double info_tail_sum);

/// Deterministic bound on W_g(z|t)/W_ghat(z|t) over power-bounded blocks.
double likelihood_ratio_bound(const ChannelState& g, const ChannelState& g_hat, int n, double power,
                              double rho, double a, double sigma_sq);

struct OutputPowerBound {
    double rho = 0.0;               // 2 a^2 P + 2 N_R sigma^2 + 2
    double prob_bound_per_n = 0.0;  // per-symbol factor of the overflow bound
};
OutputPowerBound output_power_threshold(double a, double power, int n_rx, double sigma_sq);

/// Non-singular Q' = (1-s) q + s (P'/N_T) I with tr(Q') < P and min-over-family
/// f deficit <= epsilon; s halved until the deficit condition holds.
InputCovariance perturb_to_nonsingular(const InputCovariance& q, double epsilon,
                                       const CompoundFamily& family);

/// Finite mu-net of the operator-norm ball {||g|| <= a}.
std::vector<ChannelState> epsilon_net(double norm_bound_a, int n_tx, int n_rx, double mu,
                                      std::size_t cap = 1000000);

/// tau codewords of length n drawn i.i.d. CN(0, Q1) per symbol; draws violating
/// the per-block power cap are resampled (expurgation), never rescaled.
GaussianCodebook sample_codebook(std::size_t tau, int n, const InputCovariance& q1, double power_cap,
                                 SplitRng rng);

struct CompoundErrorReport {
    std::vector<double> per_state_error;              // pooled over trials, uniform messages
    std::vector<double> per_state_max_message_error;  // filled when trials >= 2*tau
    std::size_t trials_per_state = 0;
};

/// Per-state empirical error of the unique-above-threshold decoder
/// (decide l iff exactly one codeword has max over family of i_ghat > alpha+delta).
CompoundErrorReport simulate_compound_error(const GaussianCodebook& codebook,
                                            const ThresholdDecoderSpec& decoder,
                                            const CompoundFamily& family, std::size_t trials,
                                            SplitRng rng, bool noiseless = false);

/// CSIR adjustment for ||g|| > a: scale the received block to the degraded
/// channel g' = (a/||g||) g and top up the noise to the common level.
CMat degrade_received(const CMat& z_block, const ChannelState& g, double a, double sigma_sq,
                      SplitRng& rng);

}  // namespace crmimo
