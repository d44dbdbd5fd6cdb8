#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lsmtune/cost_model.hpp"
#include "lsmtune/minimize.hpp"
#include "lsmtune/types.hpp"

namespace lsmtune {

struct SolverDiagnostics {
    int iterations = 0;     // local-search iterations accumulated over starts
    int restarts = 0;       // number of multi-start points
    bool converged = false; // best start terminated by its own criterion
    double grid_best = 0;   // best objective seen on the verification grid
    double size_ratio_max = 0;
    double filter_bits_max = 0;
};

struct TuningResult {
    Tuning tuning;
    double objective = 0;
    SolverDiagnostics diagnostics;
};

namespace detail {

// Candidate ordering: lower objective wins; near-ties (1e-9) prefer leveling,
// then smaller size ratio, then smaller filter allocation, so concurrent
// multi-start reductions stay deterministic.
inline bool better_candidate(double obj_a, const Tuning& a, double obj_b, const Tuning& b) {
    if (obj_a < obj_b - 1e-9) return true;
    if (obj_b < obj_a - 1e-9) return false;
    if (a.policy != b.policy) return a.policy == Policy::leveling;
    if (a.size_ratio != b.size_ratio) return a.size_ratio < b.size_ratio;
    return a.filter_bits < b.filter_bits;
}

} // namespace detail

// Shared search contract for both tuning problems: enumerate both policies,
// run multi-start projected descent over (T, m_filt) inside the box
// [2, T_max] x [0, m - B*E], then sweep a dense verification grid (integer
// size ratios, 64 filter steps) and polish from its best cell. The returned
// objective is never above the best grid value.
template <class Objective>
TuningResult tune_over(const SystemParams& sys, Objective&& objective) {
    sys.require_feasible();
    double t_max = size_ratio_cap(sys);
    double mf_max = sys.max_filter_bits();

    TuningResult best;
    best.objective = std::numeric_limits<double>::infinity();
    SolverDiagnostics diag;
    diag.size_ratio_max = t_max;
    diag.filter_bits_max = mf_max;

    const double t_starts[] = {2, 5, 10, 20, 50};
    const double mf_fracs[] = {0.1, 0.5, 0.9};

    for (Policy pi : {Policy::leveling, Policy::tiering}) {
        auto f = [&](double t, double mf) { return objective(pi, t, mf); };
        Box2 box{{2.0, 0.0}, {t_max, mf_max}};

        for (double t0 : t_starts) {
            if (t0 > t_max && t0 != 2.0) continue;
            for (double frac : mf_fracs) {
                double mf0 = std::min(frac * sys.total_memory_bits, mf_max);
                auto r = projected_descent(f, box, {std::min(t0, t_max), mf0});
                ++diag.restarts;
                diag.iterations += r.iterations;
                Tuning cand{r.x[0], r.x[1], pi};
                if (detail::better_candidate(r.value, cand, best.objective, best.tuning)) {
                    best.tuning = cand;
                    best.objective = r.value;
                    diag.converged = r.converged;
                }
            }
        }
    }

    // Dense verification grid.
    double grid_best = std::numeric_limits<double>::infinity();
    Tuning grid_tun;
    int t_hi = std::max(2, int(std::ceil(t_max)));
    for (Policy pi : {Policy::leveling, Policy::tiering}) {
        for (int t = 2; t <= t_hi; ++t) {
            double tt = std::min(double(t), t_max);
            for (int k = 0; k < 64; ++k) {
                double mf = mf_max * double(k) / 63.0;
                double v = objective(pi, tt, mf);
                Tuning cand{tt, mf, pi};
                if (detail::better_candidate(v, cand, grid_best, grid_tun)) {
                    grid_tun = cand;
                    grid_best = v;
                }
            }
        }
    }
    diag.grid_best = grid_best;

    if (detail::better_candidate(grid_best, grid_tun, best.objective, best.tuning)) {
        // Polish from the winning grid cell.
        auto f = [&](double t, double mf) { return objective(grid_tun.policy, t, mf); };
        Box2 box{{2.0, 0.0}, {t_max, mf_max}};
        auto r = projected_descent(f, box, {grid_tun.size_ratio, grid_tun.filter_bits});
        diag.iterations += r.iterations;
        Tuning cand{r.x[0], r.x[1], grid_tun.policy};
        if (detail::better_candidate(r.value, cand, grid_best, grid_tun)) {
            best.tuning = cand;
            best.objective = r.value;
        } else {
            best.tuning = grid_tun;
            best.objective = grid_best;
        }
        diag.converged = r.converged;
    }

    best.diagnostics = diag;
    return best;
}

// Minimize the expected workload cost over tunings for a fixed workload.
inline TuningResult tune_nominal(const SystemParams& sys, const Workload& wkl) {
    wkl.validate();
    auto result = tune_over(sys, [&](Policy pi, double t, double mf) {
        return workload_cost(wkl, sys, Tuning{t, mf, pi});
    });
    // Report the exact model cost at the returned tuning.
    result.objective = workload_cost(wkl, sys, result.tuning);
    return result;
}

} // namespace lsmtune
