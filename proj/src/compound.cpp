#include "crmimo/compound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crmimo/parallel.hpp"

namespace crmimo {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

CompoundFamily::CompoundFamily(std::vector<ChannelState> s, double a, double sig)
    : states(std::move(s)), norm_bound_a(a), sigma_sq(sig) {
    if (states.empty()) throw std::invalid_argument("CompoundFamily: empty family");
    if (!(norm_bound_a > 0.0) || !(sigma_sq > 0.0))
        throw std::invalid_argument("CompoundFamily: bad parameters");
    for (const auto& g : states)
        if (operator_norm(g) > norm_bound_a + 1e-12)
            throw std::invalid_argument("CompoundFamily: member exceeds the norm bound");
}

ThresholdDecoderSpec::ThresholdDecoderSpec(double a, double d) : alpha_bits(a), delta_bits(d) {
    if (!(alpha_bits > 0.0) || !(delta_bits > 0.0))
        throw std::invalid_argument("ThresholdDecoderSpec: alpha, delta must be > 0");
}

double info_density(const ChannelState& g, const InputCovariance& q, const CMat& t_block,
                    const CMat& z_block, double sigma_sq) {
    if (t_block.cols() != z_block.cols()) throw std::invalid_argument("info_density: block length mismatch");
    if (t_block.rows() != g.n_tx() || z_block.rows() != g.n_rx())
        throw std::invalid_argument("info_density: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMat> es(q.matrix(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("info_density: generator covariance must be non-singular");

    const int n_rx = g.n_rx();
    CMat theta = g.entries * q.matrix() * g.entries.adjoint() +
                 sigma_sq * CMat::Identity(n_rx, n_rx);
    theta = (theta + theta.adjoint()) / 2.0;
    Eigen::LLT<CMat> llt(theta);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("info_density: singular output covariance");

    const double f_bits = log_det_mi_raw(g.entries, q.matrix(), sigma_sq);
    const int n = static_cast<int>(t_block.cols());
    double quad = 0.0;  // sum z^H Theta^-1 z - ||z - g t||^2 / sigma^2, in nats
    for (int i = 0; i < n; ++i) {
        const CVec z = z_block.col(i);
        const CVec resid = z - g.entries * t_block.col(i);
        const CVec w = llt.solve(z);
        quad += z.dot(w).real() - resid.squaredNorm() / sigma_sq;
    }
    return n * f_bits + quad / kLn2;
}

double chernoff_info_density_bound(int n, int n_rx, double delta) {
    if (n < 1 || n_rx < 1) throw std::invalid_argument("chernoff_info_density_bound: bad dimensions");
    if (!(delta > 0.0)) {
        if (delta == 0.0) return 1.0;
        throw std::invalid_argument("chernoff_info_density_bound: delta must be >= 0");
    }
    const double x = kLn2 * delta / n_rx;
    const double exponent = (static_cast<double>(n) * n_rx / (2.0 * kLn2)) * (std::sqrt(1.0 + x * x) - 1.0);
    return std::exp2(-exponent);
}

double power_overflow_bound(int n, double trace_cap_m, double delta) {
    if (n < 1 || !(trace_cap_m > 0.0)) throw std::invalid_argument("power_overflow_bound: bad arguments");
    if (!(delta > 0.0)) {
        if (delta == 0.0) return 1.0;
        throw std::invalid_argument("power_overflow_bound: delta must be >= 0");
    }
    const double d = delta / trace_cap_m;
    return std::exp2(static_cast<double>(n) * (std::log2(1.0 + d) - d / kLn2));
}

double beta_hat_backoff(double power, double beta) {
    if (!(power > 0.0) || !(beta > 0.0) || !(beta < power))
        throw std::invalid_argument("beta_hat_backoff: need 0 < beta < P");
    const double p_hat = power - beta;
    return beta / (kLn2 * p_hat) - std::log2(1.0 + beta / p_hat);
}

double feinstein_compound_bound(std::size_t family_size, double tau, double alpha_bits,
                                double delta_bits, int n, double beta_hat, double info_tail_sum) {
    if (family_size == 0) return 0.0;
    if (!(tau >= 1.0) || !(alpha_bits > 0.0) || !(delta_bits > 0.0) || n < 1 || !(beta_hat > 0.0) ||
        info_tail_sum < 0.0)
        throw std::invalid_argument("feinstein_compound_bound: bad arguments");
    const double fs = static_cast<double>(family_size);
    return fs * tau * std::exp2(-alpha_bits) + fs * fs * std::exp2(-delta_bits) +
           fs * std::exp2(-static_cast<double>(n) * beta_hat) + info_tail_sum;
}

double likelihood_ratio_bound(const ChannelState& g, const ChannelState& g_hat, int n, double power,
                              double rho, double a, double sigma_sq) {
    if (operator_norm(g) > a + 1e-12 || operator_norm(g_hat) > a + 1e-12)
        throw std::invalid_argument("likelihood_ratio_bound: states outside the norm ball");
    const double dist = operator_norm(CMat(g.entries - g_hat.entries));
    const double exponent =
        (2.0 * n / (kLn2 * sigma_sq)) * (std::sqrt(power * rho) + a * power) * dist;
    return std::exp2(exponent);
}

OutputPowerBound output_power_threshold(double a, double power, int n_rx, double sigma_sq) {
    if (!(a > 0.0) || !(power > 0.0) || n_rx < 1 || !(sigma_sq > 0.0))
        throw std::invalid_argument("output_power_threshold: bad arguments");
    OutputPowerBound out;
    out.rho = 2.0 * a * a * power + 2.0 * n_rx * sigma_sq + 2.0;
    const double m = sigma_sq * n_rx;
    out.prob_bound_per_n = (1.0 + 1.0 / m) * std::exp2(-1.0 / (kLn2 * m));
    return out;
}

InputCovariance perturb_to_nonsingular(const InputCovariance& q, double epsilon,
                                       const CompoundFamily& family) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("perturb_to_nonsingular: epsilon must be > 0");
    const int n_tx = q.dim();
    const double power = q.power_budget();

    auto family_min_f = [&](const CMat& m) {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& g : family.states)
            v = std::min(v, log_det_mi_raw(g.entries, m, family.sigma_sq));
        return v;
    };

    Eigen::SelfAdjointEigenSolver<CMat> es(q.matrix(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() > 1e-12 && q.trace() < power) return q;

    const double base = family_min_f(q.matrix());
    for (int k = 1; k <= 30; ++k) {
        const double s = std::ldexp(1.0, -k);
        const double p_prime = power * (1.0 - s / 2.0);
        CMat cand = (1.0 - s) * q.matrix() + (s * p_prime / n_tx) * CMat::Identity(n_tx, n_tx);
        cand = (cand + cand.adjoint()) / 2.0;
        if (family_min_f(cand) >= base - epsilon) return InputCovariance(std::move(cand), power);
    }
    throw std::runtime_error("perturb_to_nonsingular: epsilon too small for numerics");
}

std::vector<ChannelState> epsilon_net(double norm_bound_a, int n_tx, int n_rx, double mu,
                                      std::size_t cap) {
    if (!(mu > 0.0) || !(norm_bound_a > 0.0) || n_tx < 1 || n_rx < 1)
        throw std::invalid_argument("epsilon_net: bad arguments");
    if (mu >= 2.0 * norm_bound_a) {
        return {ChannelState(CMat::Zero(n_rx, n_tx))};
    }
    const int dims = 2 * n_tx * n_rx;
    const double pitch = mu / std::sqrt(static_cast<double>(dims));
    const double reach = norm_bound_a + mu / 2.0;
    const long k_max = static_cast<long>(std::floor(reach / pitch));
    const double per_axis = 2.0 * k_max + 1.0;
    if (std::pow(per_axis, dims) > static_cast<double>(cap))
        throw std::runtime_error("epsilon_net: net size above cap (mu too small)");

    std::vector<ChannelState> net;
    std::vector<long> odo(dims, -k_max);
    for (;;) {
        CMat g(n_rx, n_tx);
        for (int e = 0; e < n_tx * n_rx; ++e)
            g(e % n_rx, e / n_rx) = std::complex<double>(odo[2 * e] * pitch, odo[2 * e + 1] * pitch);
        const double nrm = operator_norm(g);
        if (nrm <= norm_bound_a) {
            net.emplace_back(std::move(g));
        } else if (nrm <= reach) {
            // Project boundary-adjacent grid points back onto the ball.
            net.emplace_back(CMat(g * (norm_bound_a / nrm)));
        }
        int axis = 0;
        while (axis < dims && odo[axis] == k_max) odo[axis++] = -k_max;
        if (axis == dims) break;
        ++odo[axis];
    }
    return net;
}

GaussianCodebook sample_codebook(std::size_t tau, int n, const InputCovariance& q1, double power_cap,
                                 SplitRng rng) {
    if (tau == 0 || n < 1) throw std::invalid_argument("sample_codebook: bad size");
    Eigen::SelfAdjointEigenSolver<CMat> es(q1.matrix(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("sample_codebook: generator covariance must be non-singular");
    Eigen::LLT<CMat> llt(q1.matrix());
    const CMat l = llt.matrixL();
    const int n_tx = q1.dim();

    GaussianCodebook book{{}, q1, n, power_cap, 0};
    book.codewords.reserve(tau);
    for (std::size_t m = 0; m < tau; ++m) {
        SplitRng sub = rng.split(m);
        for (;;) {
            CMat t(n_tx, n);
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n_tx; ++r) t(r, c) = sub.cnormal(1.0);
            t = l * t;
            if (t.squaredNorm() <= static_cast<double>(n) * power_cap) {
                book.codewords.push_back(std::move(t));
                break;
            }
            ++book.resampled;
        }
    }
    return book;
}

CompoundErrorReport simulate_compound_error(const GaussianCodebook& codebook,
                                            const ThresholdDecoderSpec& decoder,
                                            const CompoundFamily& family, std::size_t trials,
                                            SplitRng rng, bool noiseless) {
    const std::size_t tau = codebook.codewords.size();
    const int n = codebook.block_length;
    const std::size_t n_states = family.states.size();
    const double sigma_sq = family.sigma_sq;
    const double thr = decoder.threshold();

    // Per family member: f(ghat,Q1), Theta^-1 factor, and ghat * t_l blocks.
    std::vector<double> f_bits(n_states);
    std::vector<Eigen::LLT<CMat>> theta_llt(n_states);
    std::vector<std::vector<CMat>> gt(n_states);  // [state][codeword] = ghat * t
    for (std::size_t s = 0; s < n_states; ++s) {
        const CMat& g = family.states[s].entries;
        f_bits[s] = log_det_mi_raw(g, codebook.generator_covariance.matrix(), sigma_sq);
        CMat theta = g * codebook.generator_covariance.matrix() * g.adjoint() +
                     sigma_sq * CMat::Identity(g.rows(), g.rows());
        theta_llt[s].compute((theta + theta.adjoint()) / 2.0);
        gt[s].resize(tau);
        for (std::size_t m = 0; m < tau; ++m) gt[s][m] = g * codebook.codewords[m];
    }

    const bool per_message = trials >= 2 * tau;

    CompoundErrorReport report;
    report.trials_per_state = trials;
    report.per_state_error.assign(n_states, 0.0);
    if (per_message) report.per_state_max_message_error.assign(n_states, 0.0);

    for (std::size_t s = 0; s < n_states; ++s) {
        std::vector<std::uint8_t> trial_error(trials, 0);
        std::vector<std::size_t> trial_msg(trials, 0);
        SplitRng state_rng = rng.split(s);
        par::for_each_index(trials, [&](std::size_t t_idx) {
            SplitRng trial_rng = state_rng.split(t_idx);
            const std::size_t sent =
                per_message ? t_idx % tau : static_cast<std::size_t>(trial_rng.below(tau));
            trial_msg[t_idx] = sent;

            CMat z = gt[s][sent];
            if (!noiseless)
                for (int c = 0; c < n; ++c)
                    for (int r = 0; r < z.rows(); ++r) z(r, c) += trial_rng.cnormal(sigma_sq);

            // Codeword-independent part of i per family member.
            std::vector<double> base(n_states);
            for (std::size_t h = 0; h < n_states; ++h) {
                double quad = 0.0;
                for (int c = 0; c < n; ++c) {
                    const CVec zc = z.col(c);
                    quad += zc.dot(theta_llt[h].solve(zc)).real();
                }
                base[h] = n * f_bits[h] + quad / kLn2;
            }

            std::size_t candidates = 0;
            std::size_t candidate = 0;
            for (std::size_t m = 0; m < tau; ++m) {
                double best = -std::numeric_limits<double>::infinity();
                for (std::size_t h = 0; h < n_states; ++h) {
                    const double resid = (z - gt[h][m]).squaredNorm();
                    const double i_bits = base[h] - resid / (sigma_sq * kLn2);
                    if (i_bits > best) best = i_bits;
                }
                if (best > thr) {
                    ++candidates;
                    candidate = m;
                    if (candidates > 1) break;
                }
            }
            trial_error[t_idx] = (candidates == 1 && candidate == sent) ? 0 : 1;
        });

        std::size_t errors = 0;
        for (auto e : trial_error) errors += e;
        report.per_state_error[s] = static_cast<double>(errors) / static_cast<double>(trials);

        if (per_message) {
            std::vector<std::size_t> msg_err(tau, 0), msg_tot(tau, 0);
            for (std::size_t t_idx = 0; t_idx < trials; ++t_idx) {
                ++msg_tot[trial_msg[t_idx]];
                msg_err[trial_msg[t_idx]] += trial_error[t_idx];
            }
            double worst = 0.0;
            for (std::size_t m = 0; m < tau; ++m)
                if (msg_tot[m] > 0)
                    worst = std::max(worst, static_cast<double>(msg_err[m]) /
                                                static_cast<double>(msg_tot[m]));
            report.per_state_max_message_error[s] = worst;
        }
    }
    return report;
}

CMat degrade_received(const CMat& z_block, const ChannelState& g, double a, double sigma_sq,
                      SplitRng& rng) {
    const double nrm = operator_norm(g);
    if (nrm <= a) return z_block;
    const double scale = a / nrm;
    CMat out = scale * z_block;
    const double extra_var = sigma_sq * (1.0 - scale * scale);
    for (int c = 0; c < out.cols(); ++c)
        for (int r = 0; r < out.rows(); ++r) out(r, c) += rng.cnormal(extra_var);
    return out;
}

}  // namespace crmimo
