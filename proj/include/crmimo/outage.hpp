#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "crmimo/channel.hpp"
#include "crmimo/rng.hpp"

namespace crmimo {

struct OutageSpec {
    double eta = 0.1;
    double power = 1.0;
    double sigma_sq = 1.0;
    std::size_t n_state_samples = 100000;
    double confidence = 0.95;
    int optimizer_restarts = 8;

    void validate() const;
};

struct CapacityDiagnostics {
    std::size_t sample_count = 0;
    int optimizer_restarts = 0;
    double ci_half_width = 0.0;
    double primal_rate = 0.0;     // best sup{R : empirical outage <= eta} over optimizer-found Q
    double bisection_rate = 0.0;  // rate certified by the bisection on R
    int bisection_iterations = 0;
};

struct CapacityEstimate {
    double value_bits = 0.0;
    double lower_bracket = 0.0;
    double upper_bracket = 0.0;
    InputCovariance argmax_q;
    CapacityDiagnostics diagnostics;
};

// Fixed pool of states drawn once and reused across all Q and R evaluations
// (common random numbers). Bit-identical draws are merged with multiplicity.
class StatePool {
public:
    static StatePool draw(const FadingEnsemble& ensemble, std::size_t n, SplitRng rng);
    static StatePool from_states(std::vector<ChannelState> states, std::vector<std::size_t> counts);

    const std::vector<ChannelState>& states() const { return states_; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    std::size_t draw_count() const { return draw_count_; }
    int n_rx() const { return states_.front().n_rx(); }
    int n_tx() const { return states_.front().n_tx(); }

    /// f(g_i, Q) for every unique state, parallel over states.
    std::vector<double> mi_values(const CMat& q, double sigma_sq) const;

private:
    std::vector<ChannelState> states_;
    std::vector<std::size_t> counts_;
    std::size_t draw_count_ = 0;
};

/// Fraction of pool draws with f(g,q) < rate (strict), plus the Wilson
/// half-width at spec.confidence.
std::pair<double, double> outage_probability(const StatePool& pool, const InputCovariance& q,
                                             double rate, const OutageSpec& spec);

/// Largest rate whose empirical outage is <= eta: the order statistic of the
/// pooled f values at sample index floor(eta * N).
double rate_for_q(const StatePool& pool, const InputCovariance& q, double eta, double sigma_sq);

/// Approximate minimizer of the empirical outage over Q_P at the given rate.
/// Deterministic given rng. Extra warm starts may be supplied.
std::pair<InputCovariance, double> min_outage_over_q(const StatePool& pool, double rate,
                                                     const OutageSpec& spec, SplitRng rng,
                                                     const std::vector<CMat>* warm_starts = nullptr);

CapacityEstimate eta_outage_capacity(const FadingEnsemble& ensemble, const OutageSpec& spec,
                                     SplitRng rng);

/// Shared-pool variant for monotonicity grids; q_cache (optional) carries
/// optimizer-found covariances across calls and is extended with new finds.
CapacityEstimate eta_outage_capacity_pool(const StatePool& pool, const OutageSpec& spec,
                                          SplitRng rng, std::vector<CMat>* q_cache = nullptr);

/// SISO closed form from empirical gain-magnitude quantiles.
double siso_outage_capacity(const FadingEnsemble& ensemble, double eta, double power,
                            double sigma_sq, std::size_t n_samples, SplitRng rng);

/// SISO closed form from an analytic CDF of |G|.
double siso_outage_capacity_analytic(const std::function<double(double)>& gain_cdf, double eta,
                                     double power, double sigma_sq);

}  // namespace crmimo
