#include "crmimo/cr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace crmimo {

namespace {

double safe_log2(double x) { return std::log2(std::max(x, 1e-300)); }

struct Quantities {
    double iux = 0.0;
    double iuy = 0.0;
};

// Tight evaluation shared by the optimizer and the brute-force oracle.
Quantities evaluate(const Eigen::MatrixXd& pmf, const Eigen::VectorXd& px, const Eigen::VectorXd& py,
                    const Eigen::MatrixXd& w) {
    const int nx = static_cast<int>(pmf.rows());
    const int ny = static_cast<int>(pmf.cols());
    const int nu = static_cast<int>(w.cols());
    Quantities out;
    for (int u = 0; u < nu; ++u) {
        double pu = 0.0;
        for (int x = 0; x < nx; ++x) pu += px(x) * w(x, u);
        if (pu <= 0.0) continue;
        for (int x = 0; x < nx; ++x) {
            const double joint = px(x) * w(x, u);
            if (joint > 0.0) out.iux += joint * std::log2(w(x, u) / pu);
        }
        for (int y = 0; y < ny; ++y) {
            double puy = 0.0;
            for (int x = 0; x < nx; ++x) puy += w(x, u) * pmf(x, y);
            if (puy > 0.0) out.iuy += puy * std::log2(puy / (pu * py(y)));
        }
    }
    return out;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int rho = 0;
    for (int j = 0; j < n; ++j) {
        css += u[j];
        const double t = (css - 1.0) / (j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            tau = t;
        }
    }
    (void)rho;
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out(i) = std::max(v(i) - tau, 0.0);
    const double s = out.sum();
    if (s > 0.0) out /= s;  // renormalize round-off
    return out;
}

struct PgaState {
    Eigen::MatrixXd w;
    Quantities q;
};

// Gradients of I(U;X) and I(U;Y) in the channel entries.
void gradients(const Eigen::MatrixXd& pmf, const Eigen::VectorXd& px, const Eigen::VectorXd& py,
               const Eigen::MatrixXd& w, Eigen::MatrixXd& g_iux, Eigen::MatrixXd& g_iuy) {
    const int nx = static_cast<int>(pmf.rows());
    const int ny = static_cast<int>(pmf.cols());
    const int nu = static_cast<int>(w.cols());
    g_iux.resize(nx, nu);
    g_iuy.resize(nx, nu);
    Eigen::VectorXd pu = Eigen::VectorXd::Zero(nu);
    for (int u = 0; u < nu; ++u)
        for (int x = 0; x < nx; ++x) pu(u) += px(x) * w(x, u);
    Eigen::MatrixXd puy = Eigen::MatrixXd::Zero(nu, ny);
    for (int u = 0; u < nu; ++u)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) puy(u, y) += w(x, u) * pmf(x, y);
    for (int x = 0; x < nx; ++x)
        for (int u = 0; u < nu; ++u) {
            g_iux(x, u) = px(x) * (safe_log2(w(x, u)) - safe_log2(pu(u)));
            double acc = 0.0;
            for (int y = 0; y < ny; ++y)
                if (pmf(x, y) > 0.0)
                    acc += pmf(x, y) * (safe_log2(puy(u, y)) - safe_log2(pu(u) * py(y)));
            g_iuy(x, u) = acc;
        }
}

}  // namespace

std::pair<double, double> induced_quantities(const JointSource& source, const TestChannel& channel) {
    if (channel.nx() != source.nx())
        throw std::invalid_argument("induced_quantities: dimension mismatch");
    const Quantities q =
        evaluate(source.pmf(), source.marginal_x(), source.marginal_y(), channel.rows());
    return {q.iux, q.iuy};
}

CrPoint cr_capacity(const JointSource& source, double c_budget, const CrOptions& options,
                    SplitRng rng) {
    if (!(c_budget >= 0.0)) throw std::invalid_argument("cr_capacity: c_budget must be >= 0");
    const int nx = source.nx();
    const int nu = options.u_card > 0 ? options.u_card : nx + 1;
    const double tol = options.feasibility_tol;
    const Eigen::MatrixXd& pmf = source.pmf();
    const Eigen::VectorXd px = source.marginal_x();
    const Eigen::VectorXd py = source.marginal_y();

    auto eval = [&](const Eigen::MatrixXd& w) { return evaluate(pmf, px, py, w); };
    auto slack = [&](const Quantities& q) { return q.iux - q.iuy; };

    // Restart stock: identity embedding, uniform, vertex-biased randoms.
    std::vector<Eigen::MatrixXd> starts;
    if (nu >= nx) starts.push_back(TestChannel::identity(nx, nu).rows());
    starts.push_back(TestChannel::uniform(nx, nu).rows());
    for (const auto& w : options.warm_starts)
        if (w.rows() == nx && w.cols() == nu) starts.push_back(w);
    const int random_needed = std::max(0, options.restarts - static_cast<int>(starts.size()));
    for (int r = 0; r < random_needed; ++r) {
        SplitRng sub = rng.split(static_cast<std::uint64_t>(r) + 7);
        Eigen::MatrixXd w(nx, nu);
        for (int x = 0; x < nx; ++x) {
            Eigen::VectorXd row = Eigen::VectorXd::Constant(nu, 0.05 / nu);
            row(static_cast<int>(sub.below(static_cast<std::uint64_t>(nu)))) += 0.95;
            for (int u = 0; u < nu; ++u) row(u) += 0.05 * sub.uniform();
            w.row(x) = (row / row.sum()).transpose();
        }
        starts.push_back(w);
    }

    Eigen::MatrixXd best_feasible_w = TestChannel::uniform(nx, nu).rows();
    Quantities best_feasible_q = eval(best_feasible_w);  // uniform is always feasible
    Eigen::MatrixXd best_any_w = best_feasible_w;
    Quantities best_any_q = best_feasible_q;

    auto offer = [&](const Eigen::MatrixXd& w, const Quantities& q) {
        if (q.iux > best_any_q.iux) {
            best_any_q = q;
            best_any_w = w;
        }
        if (slack(q) <= c_budget + tol && q.iux > best_feasible_q.iux) {
            best_feasible_q = q;
            best_feasible_w = w;
        }
    };

    Eigen::MatrixXd g_iux, g_iuy, grad;
    for (const auto& w0 : starts) {
        Eigen::MatrixXd w = w0;
        Quantities q = eval(w);
        offer(w, q);
        for (double lambda = 4.0; lambda <= 4.0e8; lambda *= 10.0) {
            auto penalized = [&](const Quantities& qq) {
                return qq.iux - lambda * std::max(0.0, slack(qq) - c_budget);
            };
            double step = 0.5;
            double cur = penalized(q);
            for (int it = 0; it < options.max_iters; ++it) {
                gradients(pmf, px, py, w, g_iux, g_iuy);
                const bool active = slack(q) > c_budget;
                grad = active ? Eigen::MatrixXd(g_iux - lambda * (g_iux - g_iuy)) : g_iux;
                bool moved = false;
                for (int bt = 0; bt < 25; ++bt) {
                    Eigen::MatrixXd cand = w + step * grad;
                    for (int x = 0; x < nx; ++x)
                        cand.row(x) = project_simplex(cand.row(x).transpose()).transpose();
                    const Quantities qc = eval(cand);
                    if (penalized(qc) > cur + 1e-13) {
                        w = std::move(cand);
                        q = qc;
                        cur = penalized(q);
                        step = std::min(step * 1.3, 4.0);
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
                offer(w, q);
                if (!moved) break;
            }
            if (slack(q) <= c_budget + tol) break;
        }
    }

    // Infeasible-but-better point: line search along the segment toward the
    // best feasible restart until the constraint boundary.
    if (best_any_q.iux > best_feasible_q.iux + 1e-12 && slack(best_any_q) > c_budget + tol) {
        double lo = 0.0, hi = 1.0;  // s=0: infeasible best_any; s=1: feasible anchor
        const Eigen::MatrixXd anchor = best_feasible_w;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            Eigen::MatrixXd cand = (1.0 - mid) * best_any_w + mid * anchor;
            if (slack(eval(cand)) <= c_budget + 0.5 * tol)
                hi = mid;
            else
                lo = mid;
        }
        Eigen::MatrixXd cand = (1.0 - hi) * best_any_w + hi * anchor;
        offer(cand, eval(cand));
    }

    CrPoint point{c_budget, best_feasible_q.iux, best_feasible_q.iuy, TestChannel(best_feasible_w)};
    if (point.cr_rate > source.entropy_x() + 1e-9)
        throw std::logic_error("cr_capacity: rate exceeds H(X)");
    if (point.cr_rate - point.iuy > c_budget + tol)
        throw std::logic_error("cr_capacity: infeasible result");
    return point;
}

CrPoint cr_capacity_bruteforce(const JointSource& source, double c_budget, double grid_resolution,
                               int u_card) {
    const int nx = source.nx();
    const int nu = u_card > 0 ? u_card : nx + 1;
    if (nx > 3 || nu > 4 || grid_resolution < 0.01)
        throw std::invalid_argument("cr_capacity_bruteforce: instance too large");
    const int k = static_cast<int>(std::lround(1.0 / grid_resolution));

    // All pmf rows with entries j/k.
    std::vector<Eigen::VectorXd> rows;
    std::vector<int> comp(nu, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == nu - 1) {
            comp[pos] = left;
            Eigen::VectorXd r(nu);
            for (int i = 0; i < nu; ++i) r(i) = static_cast<double>(comp[i]) / k;
            rows.push_back(std::move(r));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            comp[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, k);

    const double work = std::pow(static_cast<double>(rows.size()), nx);
    if (work > 2.0e8) throw std::invalid_argument("cr_capacity_bruteforce: instance too large");

    const Eigen::MatrixXd& pmf = source.pmf();
    const Eigen::VectorXd px = source.marginal_x();
    const Eigen::VectorXd py = source.marginal_y();

    Eigen::MatrixXd w(nx, nu), best_w = TestChannel::uniform(nx, nu).rows();
    Quantities best = evaluate(pmf, px, py, best_w);
    std::vector<std::size_t> odo(nx, 0);
    for (;;) {
        for (int x = 0; x < nx; ++x) w.row(x) = rows[odo[x]].transpose();
        const Quantities q = evaluate(pmf, px, py, w);
        if (q.iux - q.iuy <= c_budget + 1e-12 && q.iux > best.iux) {
            best = q;
            best_w = w;
        }
        int axis = 0;
        while (axis < nx && odo[axis] + 1 == rows.size()) odo[axis++] = 0;
        if (axis == nx) break;
        ++odo[axis];
    }
    return CrPoint{c_budget, best.iux, best.iuy, TestChannel(best_w)};
}

std::vector<CrPoint> cr_curve(const JointSource& source, const std::vector<double>& c_grid,
                              const CrOptions& options, SplitRng rng) {
    if (!std::is_sorted(c_grid.begin(), c_grid.end()))
        throw std::invalid_argument("cr_curve: grid must be sorted ascending");
    std::vector<CrPoint> out;
    CrOptions opts = options;
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        CrPoint p = cr_capacity(source, c_grid[i], opts, rng.split(i));
        if (!out.empty() && p.cr_rate < out.back().cr_rate) {
            // The previous channel stays feasible at a larger budget.
            const auto [iux, iuy] = induced_quantities(source, out.back().channel);
            p = CrPoint{c_grid[i], iux, iuy, out.back().channel};
        }
        opts.warm_starts.push_back(p.channel.rows());
        out.push_back(std::move(p));
    }
    return out;
}

CrOutageResult eta_outage_cr_capacity(const JointSource& source, const FadingEnsemble& ensemble,
                                      const OutageSpec& spec, const CrOptions& options,
                                      SplitRng rng) {
    CapacityEstimate cap = eta_outage_capacity(ensemble, spec, rng.split("channel"));
    CrPoint point = cr_capacity(source, std::max(0.0, cap.value_bits), options, rng.split("cr"));
    return {std::move(point), std::move(cap)};
}

}  // namespace crmimo
