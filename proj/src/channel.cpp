#include "crmimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crmimo {

namespace {

constexpr double kHermTol = 1e-10;

void require_finite(const CMat& m, const char* what) {
    if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

ChannelState::ChannelState(CMat m) : entries(std::move(m)) {
    if (entries.rows() < 1 || entries.cols() < 1)
        throw std::invalid_argument("ChannelState: empty matrix");
    require_finite(entries, "ChannelState");
}

FadingEnsemble FadingEnsemble::rayleigh_iid(int n_rx, int n_tx, double scale) {
    if (n_rx < 1 || n_tx < 1) throw std::invalid_argument("rayleigh_iid: bad dimensions");
    if (!(scale > 0.0)) throw std::invalid_argument("rayleigh_iid: scale must be > 0");
    FadingEnsemble e;
    e.kind_ = Kind::RayleighIid;
    e.n_rx_ = n_rx;
    e.n_tx_ = n_tx;
    e.scale_ = scale;
    return e;
}

FadingEnsemble FadingEnsemble::point_mass(ChannelState state) {
    FadingEnsemble e;
    e.kind_ = Kind::PointMass;
    e.n_rx_ = state.n_rx();
    e.n_tx_ = state.n_tx();
    e.states_.push_back(std::move(state));
    return e;
}

FadingEnsemble FadingEnsemble::finite_support(std::vector<ChannelState> states,
                                              std::vector<double> probs) {
    if (states.empty() || states.size() != probs.size())
        throw std::invalid_argument("finite_support: states/probs mismatch");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::invalid_argument("finite_support: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("finite_support: probs must sum to 1");
    FadingEnsemble e;
    e.kind_ = Kind::FiniteSupport;
    e.n_rx_ = states.front().n_rx();
    e.n_tx_ = states.front().n_tx();
    for (const auto& s : states)
        if (s.n_rx() != e.n_rx_ || s.n_tx() != e.n_tx_)
            throw std::invalid_argument("finite_support: mixed dimensions");
    e.states_ = std::move(states);
    e.probs_ = std::move(probs);
    return e;
}

FadingEnsemble FadingEnsemble::empirical(std::vector<ChannelState> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical: no samples");
    FadingEnsemble e;
    e.kind_ = Kind::Empirical;
    e.n_rx_ = samples.front().n_rx();
    e.n_tx_ = samples.front().n_tx();
    for (const auto& s : samples)
        if (s.n_rx() != e.n_rx_ || s.n_tx() != e.n_tx_)
            throw std::invalid_argument("empirical: mixed dimensions");
    e.states_ = std::move(samples);
    return e;
}

InputCovariance::InputCovariance(CMat matrix, double power_budget)
    : matrix_(std::move(matrix)), power_budget_(power_budget) {
    if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("InputCovariance: not square");
    if (!(power_budget_ > 0.0)) throw std::invalid_argument("InputCovariance: power budget must be > 0");
    require_finite(matrix_, "InputCovariance");
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("InputCovariance: not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kHermTol)
        throw std::invalid_argument("InputCovariance: not positive semi-definite");
    if (matrix_.trace().real() > power_budget_ + kHermTol)
        throw std::invalid_argument("InputCovariance: trace exceeds power budget");
}

InputCovariance InputCovariance::isotropic(int n_tx, double power) {
    return InputCovariance(CMat::Identity(n_tx, n_tx) * (power / n_tx), power);
}

double SignalBlock::block_power() const {
    if (columns.cols() == 0) return 0.0;
    return columns.squaredNorm() / static_cast<double>(columns.cols());
}

ChannelState sample_state(const FadingEnsemble& ensemble, SplitRng& rng) {
    switch (ensemble.kind()) {
        case FadingEnsemble::Kind::RayleighIid: {
            CMat g(ensemble.n_rx(), ensemble.n_tx());
            const double var = ensemble.scale() * ensemble.scale();
            for (int r = 0; r < g.rows(); ++r)
                for (int c = 0; c < g.cols(); ++c) g(r, c) = rng.cnormal(var);
            return ChannelState(std::move(g));
        }
        case FadingEnsemble::Kind::PointMass:
            return ensemble.states().front();
        case FadingEnsemble::Kind::FiniteSupport: {
            const double u = rng.uniform();
            double acc = 0.0;
            const auto& ps = ensemble.probs();
            for (std::size_t i = 0; i < ps.size(); ++i) {
                acc += ps[i];
                if (u < acc) return ensemble.states()[i];
            }
            return ensemble.states().back();
        }
        case FadingEnsemble::Kind::Empirical: {
            const auto& ss = ensemble.states();
            return ss[static_cast<std::size_t>(rng.below(ss.size()))];
        }
    }
    throw std::logic_error("sample_state: unreachable");
}

SignalBlock apply_channel(const ChannelState& g, const SignalBlock& t, const NoiseSpec& noise,
                          SplitRng& rng) {
    if (t.columns.rows() != g.n_tx())
        throw std::invalid_argument("apply_channel: input dimension mismatch");
    if (t.power_constrained && t.block_power() > t.power_cap + 1e-9)
        throw std::invalid_argument("apply_channel: block power exceeds the declared cap");
    SignalBlock out;
    out.columns = g.entries * t.columns;
    if (noise.enabled) {
        for (int c = 0; c < out.columns.cols(); ++c)
            for (int r = 0; r < out.columns.rows(); ++r)
                out.columns(r, c) += rng.cnormal(noise.sigma_sq);
    }
    return out;
}

double log_det_mi_raw(const CMat& g, const CMat& q, double sigma_sq) {
    const int n_rx = static_cast<int>(g.rows());
    CMat a = CMat::Identity(n_rx, n_rx) + (g * q * g.adjoint()) / sigma_sq;
    // Symmetrize away round-off before factorizing.
    a = (a + a.adjoint()) / 2.0;
    Eigen::LLT<CMat> llt(a);
    if (llt.info() == Eigen::Success) {
        double log2det = 0.0;
        const auto& l = llt.matrixLLT();
        for (int i = 0; i < n_rx; ++i) log2det += std::log2(l(i, i).real());
        return std::max(0.0, 2.0 * log2det);
    }
    // Marginal Cholesky failure: fall back to eigenvalues of gQg^H / sigma^2.
    Eigen::SelfAdjointEigenSolver<CMat> es((g * q * g.adjoint()) / sigma_sq, Eigen::EigenvaluesOnly);
    double v = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        v += std::log2(1.0 + std::max(0.0, es.eigenvalues()(i)));
    return v;
}

double log_det_mi(const ChannelState& g, const InputCovariance& q, const NoiseSpec& noise) {
    if (q.dim() != g.n_tx()) throw std::invalid_argument("log_det_mi: dimension mismatch");
    return log_det_mi_raw(g.entries, q.matrix(), noise.sigma_sq);
}

double operator_norm(const CMat& g) {
    // Largest singular value = sqrt of the top eigenvalue of g^H g.
    Eigen::SelfAdjointEigenSolver<CMat> es(g.adjoint() * g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double operator_norm(const ChannelState& g) { return operator_norm(g.entries); }

std::pair<InputCovariance, double> waterfilling_capacity(const ChannelState& g, double power,
                                                         const NoiseSpec& noise) {
    if (!(power > 0.0)) throw std::invalid_argument("waterfilling_capacity: power must be > 0");
    const int n_tx = g.n_tx();
    Eigen::SelfAdjointEigenSolver<CMat> es(g.entries.adjoint() * g.entries);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
    const CMat u = es.eigenvectors();

    // Mode gains descending.
    std::vector<int> order(n_tx);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d(a) > d(b); });

    if (d(order[0]) <= 0.0) {
        return {InputCovariance::isotropic(n_tx, power), 0.0};
    }

    // nu = (P + sum sigma^2/d_i) / k over the largest feasible active set.
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n_tx);
    for (int k = n_tx; k >= 1; --k) {
        if (d(order[k - 1]) <= 0.0) continue;
        double inv_sum = 0.0;
        for (int i = 0; i < k; ++i) inv_sum += noise.sigma_sq / d(order[i]);
        const double nu = (power + inv_sum) / k;
        if (nu >= noise.sigma_sq / d(order[k - 1])) {
            for (int i = 0; i < k; ++i) p(order[i]) = nu - noise.sigma_sq / d(order[i]);
            break;
        }
    }

    CMat q = CMat::Zero(n_tx, n_tx);
    double value = 0.0;
    for (int i = 0; i < n_tx; ++i) {
        q += p(i) * (u.col(i) * u.col(i).adjoint());
        value += std::log2(1.0 + p(i) * d(i) / noise.sigma_sq);
    }
    q = (q + q.adjoint()) / 2.0;
    // Renormalize round-off so the trace is exactly the budget.
    const double tr = q.trace().real();
    if (tr > 0.0) q *= power / tr;
    return {InputCovariance(std::move(q), power), value};
}

}  // namespace crmimo
