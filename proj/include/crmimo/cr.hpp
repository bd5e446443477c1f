#pragma once

#include <utility>
#include <vector>

#include "crmimo/outage.hpp"
#include "crmimo/rng.hpp"
#include "crmimo/source.hpp"

namespace crmimo {

struct CrPoint {
    double comm_rate_c = 0.0;  // the budget C
    double cr_rate = 0.0;      // achieved I(U;X)
    double iuy = 0.0;
    TestChannel channel = TestChannel::uniform(1, 1);
};

/// (I(U;X), I(U;Y)) induced by the channel rows through P_XY; base 2, 0 log 0 = 0.
std::pair<double, double> induced_quantities(const JointSource& source, const TestChannel& channel);

struct CrOptions {
    int u_card = 0;  // 0: default |X|+1
    int restarts = 24;
    int max_iters = 300;
    double feasibility_tol = 1e-9;
    std::vector<Eigen::MatrixXd> warm_starts;  // extra starting channels
};

/// max I(U;X) s.t. I(U;X) - I(U;Y) <= c over test channels; multi-start
/// projected gradient ascent on an exact-penalty objective with vertex-biased
/// restarts; deterministic given rng. The returned point always satisfies the
/// constraint within options.feasibility_tol.
CrPoint cr_capacity(const JointSource& source, double c_budget, const CrOptions& options,
                    SplitRng rng);

/// Exhaustive simplex-grid enumeration oracle (guarded: |X| <= 3, u_card <= 4,
/// resolution >= 0.01, and a total-work cap).
CrPoint cr_capacity_bruteforce(const JointSource& source, double c_budget, double grid_resolution,
                               int u_card = 0);

/// One solve per ascending grid value, warm-started; cr_rate nondecreasing by
/// carrying the best-so-far channel forward.
std::vector<CrPoint> cr_curve(const JointSource& source, const std::vector<double>& c_grid,
                              const CrOptions& options, SplitRng rng);

struct CrOutageResult {
    CrPoint point;
    CapacityEstimate channel_capacity;
};

/// c = eta-outage capacity of the ensemble, then cr_capacity at that budget.
CrOutageResult eta_outage_cr_capacity(const JointSource& source, const FadingEnsemble& ensemble,
                                      const OutageSpec& spec, const CrOptions& options, SplitRng rng);

}  // namespace crmimo
