#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "crmimo/rng.hpp"

namespace crmimo {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// One realization of the complex gain matrix (n_rx x n_tx).
struct ChannelState {
    CMat entries;

    ChannelState() = default;
    explicit ChannelState(CMat m);

    int n_rx() const { return static_cast<int>(entries.rows()); }
    int n_tx() const { return static_cast<int>(entries.cols()); }
};

/// Per-antenna complex noise variance; `enabled = false` is the noiseless
/// degenerate mode (sigma_sq stays positive so densities remain defined).
struct NoiseSpec {
    double sigma_sq = 1.0;
    bool enabled = true;

    NoiseSpec() = default;
    NoiseSpec(double s, bool en = true) : sigma_sq(s), enabled(en) {
        if (!(sigma_sq > 0.0)) throw std::invalid_argument("NoiseSpec: sigma_sq must be > 0");
    }
};

/// A sampleable distribution over channel states.
class FadingEnsemble {
public:
    enum class Kind { RayleighIid, PointMass, FiniteSupport, Empirical };

    static FadingEnsemble rayleigh_iid(int n_rx, int n_tx, double scale);
    static FadingEnsemble point_mass(ChannelState state);
    static FadingEnsemble finite_support(std::vector<ChannelState> states, std::vector<double> probs);
    static FadingEnsemble empirical(std::vector<ChannelState> samples);

    Kind kind() const { return kind_; }
    int n_rx() const { return n_rx_; }
    int n_tx() const { return n_tx_; }
    double scale() const { return scale_; }
    const std::vector<ChannelState>& states() const { return states_; }
    const std::vector<double>& probs() const { return probs_; }

private:
    FadingEnsemble() = default;

    Kind kind_ = Kind::RayleighIid;
    int n_rx_ = 1;
    int n_tx_ = 1;
    double scale_ = 1.0;                 // RayleighIid per-entry std of |G_ij| (E|G_ij|^2 = scale^2)
    std::vector<ChannelState> states_;   // PointMass/FiniteSupport/Empirical
    std::vector<double> probs_;          // FiniteSupport
};

/// Hermitian PSD input covariance with trace <= power budget (element of Q_P).
class InputCovariance {
public:
    InputCovariance() : matrix_(CMat::Identity(1, 1)), power_budget_(1.0) {}
    InputCovariance(CMat matrix, double power_budget);

    const CMat& matrix() const { return matrix_; }
    double power_budget() const { return power_budget_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    double trace() const { return matrix_.trace().real(); }

    static InputCovariance isotropic(int n_tx, double power);

private:
    CMat matrix_;
    double power_budget_;
};

/// Block of n channel-input columns; per-block power (1/n) sum ||t_i||^2.
struct SignalBlock {
    CMat columns;  // n_tx x n
    bool power_constrained = false;
    double power_cap = 0.0;

    int length() const { return static_cast<int>(columns.cols()); }
    double block_power() const;
};

ChannelState sample_state(const FadingEnsemble& ensemble, SplitRng& rng);

SignalBlock apply_channel(const ChannelState& g, const SignalBlock& t, const NoiseSpec& noise,
                          SplitRng& rng);

/// f(g,Q) = log2 det(I + (1/sigma^2) g Q g^H) in bits per channel use.
double log_det_mi(const ChannelState& g, const InputCovariance& q, const NoiseSpec& noise);

/// Same functional on a raw covariance matrix (callers that already validated Q).
double log_det_mi_raw(const CMat& g, const CMat& q, double sigma_sq);

/// Largest singular value.
double operator_norm(const ChannelState& g);
double operator_norm(const CMat& g);

/// Water-filling over the eigenmodes of g^H g; returned Q has trace exactly P
/// (isotropic when g = 0). Second element is the achieved log-det MI.
std::pair<InputCovariance, double> waterfilling_capacity(const ChannelState& g, double power,
                                                         const NoiseSpec& noise);

}  // namespace crmimo
