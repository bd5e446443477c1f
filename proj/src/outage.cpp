#include "crmimo/outage.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "crmimo/parallel.hpp"
#include "crmimo/stats.hpp"

namespace crmimo {

namespace {

using Eigen::VectorXd;

// Sample index of the empirical quantile sup{R : P[f < R] <= eta}.
std::size_t quantile_index(double eta, std::size_t n) {
    const double raw = eta * static_cast<double>(n);
    auto m = static_cast<std::size_t>(std::floor(raw + 1e-9));
    if (m >= n) m = n - 1;
    return m;
}

// m-th smallest (0-based) of values with multiplicities.
double weighted_order_stat(const std::vector<double>& values, const std::vector<std::size_t>& counts,
                           std::size_t m) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::size_t cum = 0;
    for (std::size_t i : idx) {
        cum += counts[i];
        if (cum > m) return values[i];
    }
    return values[idx.back()];
}

std::size_t strict_below_count(const std::vector<double>& values, const std::vector<std::size_t>& counts,
                               double rate) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] < rate) c += counts[i];
    return c;
}

// --- Q parametrization: x in R^{d}, d = n_tx^2, maps to L (lower triangular,
// complex off-diagonal) and Q = L L^H scaled onto the trace ball.
int param_dim(int n_tx) { return n_tx * n_tx; }

CMat params_to_q(const VectorXd& x, int n_tx, double power) {
    CMat l = CMat::Zero(n_tx, n_tx);
    int k = 0;
    for (int i = 0; i < n_tx; ++i) l(i, i) = x(k++);
    for (int i = 1; i < n_tx; ++i)
        for (int j = 0; j < i; ++j) {
            l(i, j) = std::complex<double>(x(k), x(k + 1));
            k += 2;
        }
    CMat q = l * l.adjoint();
    const double tr = q.trace().real();
    if (tr > power) q *= power / tr;
    q = (q + q.adjoint()) / 2.0;
    if (q.trace().real() > power + 1e-10)
        throw std::logic_error("params_to_q: trace feasibility violated");
    return q;
}

VectorXd q_to_params(const CMat& q, int n_tx) {
    // Cholesky of Q + eps I so rank-deficient warm starts still factor.
    CMat reg = q + CMat::Identity(n_tx, n_tx) * 1e-12;
    Eigen::LLT<CMat> llt(reg);
    CMat l = llt.matrixL();
    VectorXd x(param_dim(n_tx));
    int k = 0;
    for (int i = 0; i < n_tx; ++i) x(k++) = l(i, i).real();
    for (int i = 1; i < n_tx; ++i)
        for (int j = 0; j < i; ++j) {
            x(k) = l(i, j).real();
            x(k + 1) = l(i, j).imag();
            k += 2;
        }
    return x;
}

struct NmResult {
    VectorXd x;
    double value = 0.0;
    int evals = 0;
};

// Plain Nelder-Mead (reflection/expansion/contraction/shrink), deterministic.
NmResult nelder_mead(const std::function<double(const VectorXd&)>& f, const VectorXd& x0, double step,
                     int max_evals) {
    const int d = static_cast<int>(x0.size());
    std::vector<VectorXd> xs(d + 1, x0);
    std::vector<double> fs(d + 1);
    int evals = 0;
    for (int i = 1; i <= d; ++i) xs[i](i - 1) += step;
    for (int i = 0; i <= d; ++i) {
        fs[i] = f(xs[i]);
        ++evals;
    }
    std::vector<int> ord(d + 1);
    auto sort_simplex = [&] {
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    };
    while (evals < max_evals) {
        sort_simplex();
        const int best = ord[0], worst = ord[d], second = ord[d - 1];
        if (std::abs(fs[worst] - fs[best]) < 1e-12) break;
        VectorXd centroid = VectorXd::Zero(d);
        for (int i = 0; i <= d; ++i)
            if (i != worst) centroid += xs[i];
        centroid /= d;
        VectorXd xr = centroid + (centroid - xs[worst]);
        double fr = f(xr);
        ++evals;
        if (fr < fs[best]) {
            VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
            double fe = f(xe);
            ++evals;
            if (fe < fr) {
                xs[worst] = xe;
                fs[worst] = fe;
            } else {
                xs[worst] = xr;
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = xr;
            fs[worst] = fr;
        } else {
            VectorXd xc = centroid + 0.5 * (xs[worst] - centroid);
            double fc = f(xc);
            ++evals;
            if (fc < fs[worst]) {
                xs[worst] = xc;
                fs[worst] = fc;
            } else {
                for (int i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
                    fs[i] = f(xs[i]);
                    ++evals;
                }
            }
        }
    }
    sort_simplex();
    return {xs[ord[0]], fs[ord[0]], evals};
}

std::vector<VectorXd> restart_points(const StatePool& pool, const OutageSpec& spec, SplitRng& rng,
                                     const std::vector<CMat>* warm_starts,
                                     double warm_rank_rate, double sigma_sq) {
    const int n_tx = pool.n_tx();
    const int d = param_dim(n_tx);
    std::vector<VectorXd> starts;
    // Isotropic Q = (P/N_T) I.
    {
        VectorXd x = VectorXd::Zero(d);
        for (int i = 0; i < n_tx; ++i) x(i) = std::sqrt(spec.power / n_tx);
        starts.push_back(x);
    }
    const int extra = std::max(0, spec.optimizer_restarts - 1);
    for (int r = 0; r < extra; ++r) {
        SplitRng sub = rng.split(static_cast<std::uint64_t>(r) + 101);
        if (r % 2 == 0) {
            // Random Cholesky factor.
            VectorXd x(d);
            for (int i = 0; i < d; ++i) x(i) = sub.normal() * std::sqrt(spec.power / n_tx);
            starts.push_back(x);
        } else {
            // Rank-1 beamformer Q = P v v^H.
            CVec v(n_tx);
            for (int i = 0; i < n_tx; ++i) v(i) = sub.cnormal(1.0);
            v.normalize();
            CMat q = spec.power * (v * v.adjoint());
            starts.push_back(q_to_params(q, n_tx));
        }
    }
    if (warm_starts && !warm_starts->empty()) {
        // Keep only the strongest few so cross-call caches cannot balloon the
        // restart count: rank by the exact outage at the target rate.
        std::vector<std::pair<double, std::size_t>> ranked;
        ranked.reserve(warm_starts->size());
        for (std::size_t i = 0; i < warm_starts->size(); ++i) {
            const auto values = pool.mi_values((*warm_starts)[i], sigma_sq);
            std::size_t below = 0;
            for (std::size_t k = 0; k < values.size(); ++k)
                if (values[k] < warm_rank_rate) below += pool.counts()[k];
            ranked.emplace_back(static_cast<double>(below), i);
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        const std::size_t keep = std::min<std::size_t>(3, ranked.size());
        for (std::size_t i = 0; i < keep; ++i)
            starts.push_back(q_to_params((*warm_starts)[ranked[i].second], n_tx));
    }
    return starts;
}

}  // namespace

void OutageSpec::validate() const {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("OutageSpec: eta must be in [0,1)");
    if (!(power > 0.0)) throw std::invalid_argument("OutageSpec: power must be > 0");
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("OutageSpec: sigma_sq must be > 0");
    if (n_state_samples == 0) throw std::invalid_argument("OutageSpec: need at least one state sample");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("OutageSpec: confidence must be in (0,1)");
}

StatePool StatePool::draw(const FadingEnsemble& ensemble, std::size_t n, SplitRng rng) {
    if (n == 0) throw std::invalid_argument("StatePool::draw: empty pool");
    StatePool pool;
    pool.draw_count_ = n;
    std::map<std::string, std::size_t> seen;  // matrix bytes -> unique index
    for (std::size_t i = 0; i < n; ++i) {
        ChannelState s = sample_state(ensemble, rng);
        std::string key(reinterpret_cast<const char*>(s.entries.data()),
                        sizeof(std::complex<double>) * static_cast<std::size_t>(s.entries.size()));
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(std::move(key), pool.states_.size());
            pool.states_.push_back(std::move(s));
            pool.counts_.push_back(1);
        } else {
            ++pool.counts_[it->second];
        }
    }
    return pool;
}

StatePool StatePool::from_states(std::vector<ChannelState> states, std::vector<std::size_t> counts) {
    if (states.empty() || states.size() != counts.size())
        throw std::invalid_argument("StatePool::from_states: bad arguments");
    StatePool pool;
    pool.states_ = std::move(states);
    pool.counts_ = std::move(counts);
    pool.draw_count_ = std::accumulate(pool.counts_.begin(), pool.counts_.end(), std::size_t{0});
    return pool;
}

std::vector<double> StatePool::mi_values(const CMat& q, double sigma_sq) const {
    std::vector<double> out(states_.size());
    par::for_each_index(states_.size(),
                        [&](std::size_t i) { out[i] = log_det_mi_raw(states_[i].entries, q, sigma_sq); });
    return out;
}

std::pair<double, double> outage_probability(const StatePool& pool, const InputCovariance& q,
                                             double rate, const OutageSpec& spec) {
    spec.validate();
    if (pool.states().empty()) throw std::invalid_argument("outage_probability: empty pool");
    const auto values = pool.mi_values(q.matrix(), spec.sigma_sq);
    const std::size_t below = strict_below_count(values, pool.counts(), rate);
    const double p_hat = static_cast<double>(below) / static_cast<double>(pool.draw_count());
    return {p_hat, wilson_half_width(p_hat, pool.draw_count(), spec.confidence)};
}

namespace {

double rate_for_q_impl(const StatePool& pool, const CMat& q, double eta, double sigma_sq) {
    const auto values = pool.mi_values(q, sigma_sq);
    return weighted_order_stat(values, pool.counts(), quantile_index(eta, pool.draw_count()));
}

}  // namespace

double rate_for_q(const StatePool& pool, const InputCovariance& q, double eta, double sigma_sq) {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("rate_for_q: eta must be in [0,1)");
    return rate_for_q_impl(pool, q.matrix(), eta, sigma_sq);
}

std::pair<InputCovariance, double> min_outage_over_q(const StatePool& pool, double rate,
                                                     const OutageSpec& spec, SplitRng rng,
                                                     const std::vector<CMat>* warm_starts) {
    spec.validate();
    const int n_tx = pool.n_tx();
    const double n_total = static_cast<double>(pool.draw_count());

    auto exact_outage = [&](const CMat& q) {
        const auto values = pool.mi_values(q, spec.sigma_sq);
        return static_cast<double>(strict_below_count(values, pool.counts(), rate)) / n_total;
    };

    if (n_tx == 1) {
        // f is monotone in the scalar Q, so full power is always optimal.
        InputCovariance q = InputCovariance::isotropic(1, spec.power);
        const double out = exact_outage(q.matrix());
        return {std::move(q), out};
    }

    // Search on a logistically smoothed count; score candidates exactly.
    auto smooth_outage = [&](const CMat& q, double width) {
        const auto values = pool.mi_values(q, spec.sigma_sq);
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double z = (rate - values[i]) / width;
            acc += static_cast<double>(pool.counts()[i]) / (1.0 + std::exp(-z));
        }
        return acc / n_total;
    };

    const int d = param_dim(n_tx);
    const int budget = 60 * d;
    auto starts = restart_points(pool, spec, rng, warm_starts, rate, spec.sigma_sq);

    CMat best_q = InputCovariance::isotropic(n_tx, spec.power).matrix();
    double best_exact = exact_outage(best_q);
    for (const auto& x0 : starts) {
        auto obj = [&](const VectorXd& x) { return smooth_outage(params_to_q(x, n_tx, spec.power), 0.05); };
        NmResult coarse = nelder_mead(obj, x0, 0.25 * std::sqrt(spec.power / n_tx), budget);
        auto obj_fine = [&](const VectorXd& x) {
            return smooth_outage(params_to_q(x, n_tx, spec.power), 0.01);
        };
        NmResult fine = nelder_mead(obj_fine, coarse.x, 0.05 * std::sqrt(spec.power / n_tx), budget / 2);
        for (const VectorXd* cand : {&coarse.x, &fine.x}) {
            CMat q = params_to_q(*cand, n_tx, spec.power);
            const double e = exact_outage(q);
            if (e < best_exact - 1e-15) {
                best_exact = e;
                best_q = q;
            }
        }
    }
    return {InputCovariance(best_q, spec.power), best_exact};
}

CapacityEstimate eta_outage_capacity_pool(const StatePool& pool, const OutageSpec& spec, SplitRng rng,
                                          std::vector<CMat>* q_cache) {
    spec.validate();
    const int n_tx = pool.n_tx();
    const std::size_t m = quantile_index(spec.eta, pool.draw_count());

    // Rigorous upper bracket: f(g,Q) <= water-filling value of g for every
    // feasible Q, so the eta-quantile of water-filling values dominates.
    std::vector<double> wf(pool.states().size());
    par::for_each_index(pool.states().size(), [&](std::size_t i) {
        wf[i] = waterfilling_capacity(pool.states()[i], spec.power, NoiseSpec(spec.sigma_sq)).second;
    });
    const double upper0 = weighted_order_stat(wf, pool.counts(), m);

    std::vector<CMat> local_cache;
    std::vector<CMat>& cache = q_cache ? *q_cache : local_cache;

    auto rate_of = [&](const CMat& q) { return rate_for_q_impl(pool, q, spec.eta, spec.sigma_sq); };

    CMat best_q = InputCovariance::isotropic(n_tx, spec.power).matrix();
    double best_rate = rate_of(best_q);

    auto consider = [&](const CMat& q) {
        const double r = rate_of(q);
        if (r > best_rate + 1e-15) {
            best_rate = r;
            best_q = q;
        }
    };

    for (const auto& q : cache) consider(q);

    if (n_tx > 1) {
        // Primal stage: maximize the order statistic directly over Q.
        const int d = param_dim(n_tx);
        auto starts = restart_points(pool, spec, rng, nullptr, 0.0, spec.sigma_sq);
        for (const auto& x0 : starts) {
            auto obj = [&](const VectorXd& x) { return -rate_of(params_to_q(x, n_tx, spec.power)); };
            NmResult r = nelder_mead(obj, x0, 0.25 * std::sqrt(spec.power / n_tx), 60 * d);
            CMat q = params_to_q(r.x, n_tx, spec.power);
            consider(q);
            cache.push_back(q);
        }
    }
    const double primal = best_rate;

    double lo = best_rate;
    double hi = std::max(upper0, lo);
    int iters = 0;
    const double tol = 1e-3;
    if (n_tx > 1) {
        while (hi - lo > tol && iters < 40) {
            ++iters;
            const double mid = 0.5 * (lo + hi);
            OutageSpec inner = spec;
            auto [q_mid, out_mid] = min_outage_over_q(pool, mid, inner, rng.split(1000 + iters), &cache);
            if (out_mid <= spec.eta + 1e-15) {
                cache.push_back(q_mid.matrix());
                const double r = rate_of(q_mid.matrix());
                if (r > best_rate) {
                    best_rate = r;
                    best_q = q_mid.matrix();
                }
                lo = std::max(mid, best_rate);
            } else {
                hi = mid;
            }
        }
    } else {
        hi = lo;  // scalar Q: the order statistic at full power is exact
    }

    CapacityEstimate est{
        best_rate, best_rate, std::max(hi, best_rate), InputCovariance(best_q, spec.power), {}};
    est.diagnostics.sample_count = pool.draw_count();
    est.diagnostics.optimizer_restarts = spec.optimizer_restarts;
    est.diagnostics.primal_rate = primal;
    est.diagnostics.bisection_rate = lo;
    est.diagnostics.bisection_iterations = iters;
    const auto values = pool.mi_values(best_q, spec.sigma_sq);
    const double p_hat = static_cast<double>(strict_below_count(values, pool.counts(), best_rate)) /
                         static_cast<double>(pool.draw_count());
    est.diagnostics.ci_half_width = wilson_half_width(p_hat, pool.draw_count(), spec.confidence);
    return est;
}

CapacityEstimate eta_outage_capacity(const FadingEnsemble& ensemble, const OutageSpec& spec,
                                     SplitRng rng) {
    spec.validate();
    StatePool pool = StatePool::draw(ensemble, spec.n_state_samples, rng.split("state-pool"));
    return eta_outage_capacity_pool(pool, spec, rng.split("optimizer"));
}

double siso_outage_capacity(const FadingEnsemble& ensemble, double eta, double power, double sigma_sq,
                            std::size_t n_samples, SplitRng rng) {
    if (ensemble.n_rx() != 1 || ensemble.n_tx() != 1)
        throw std::invalid_argument("siso_outage_capacity: ensemble must be 1x1");
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("siso_outage_capacity: bad eta");
    StatePool pool = StatePool::draw(ensemble, n_samples, rng.split("state-pool"));
    std::vector<double> mags(pool.states().size());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(pool.states()[i].entries(0, 0));
    const double gamma0 =
        weighted_order_stat(mags, pool.counts(), quantile_index(eta, pool.draw_count()));
    return std::log2(1.0 + power * gamma0 * gamma0 / sigma_sq);
}

double siso_outage_capacity_analytic(const std::function<double(double)>& gain_cdf, double eta,
                                     double power, double sigma_sq) {
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("siso_outage_capacity_analytic: bad eta");
    // gamma0 = sup{gamma : F(gamma) <= eta} by predicate bisection.
    double lo = 0.0, hi = 1.0;
    if (gain_cdf(lo) > eta) return std::log2(1.0);  // gamma0 = 0
    while (gain_cdf(hi) <= eta && hi < 1e12) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gain_cdf(mid) <= eta)
            lo = mid;
        else
            hi = mid;
    }
    return std::log2(1.0 + power * lo * lo / sigma_sq);
}

}  // namespace crmimo
