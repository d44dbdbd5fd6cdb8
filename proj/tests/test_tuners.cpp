#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lsmtune/nominal_tuner.hpp"
#include "lsmtune/robust_tuner.hpp"

using namespace lsmtune;

namespace {

// Desk-scale environment: 1M entries of 1 KB, 10 bits of memory per entry,
// 4 KB pages, short range queries, symmetric-ish storage.
SystemParams desk_system() {
    SystemParams sys;
    sys.num_entries = 1e6;
    sys.entry_size_bits = 8192;
    sys.page_entries = 4;
    sys.total_memory_bits = 1e7;
    sys.rw_asymmetry = 1.0;
    sys.range_selectivity = 4e-6;
    return sys;
}

// 10M entries of 1 KB with a 10 GB budget.
SystemParams large_system() {
    SystemParams sys;
    sys.num_entries = 1e7;
    sys.entry_size_bits = 8192;
    sys.page_entries = 4;
    sys.total_memory_bits = 10.0 * 1024 * 1024 * 1024 * 8;
    sys.rw_asymmetry = 1.0;
    sys.range_selectivity = 4e-7;
    return sys;
}

struct GridBest {
    Tuning tuning;
    double value = std::numeric_limits<double>::infinity();
};

// Independent dense-grid search: integer size ratios up to the cap, 64 filter
// steps, both policies.
template <class F>
GridBest dense_grid(const SystemParams& sys, F&& objective) {
    GridBest best;
    double t_max = size_ratio_cap(sys);
    double mf_max = sys.max_filter_bits();
    for (Policy pi : {Policy::leveling, Policy::tiering}) {
        for (int t = 2; t <= int(std::ceil(t_max)); ++t) {
            double tt = std::min(double(t), t_max);
            for (int k = 0; k < 64; ++k) {
                double mf = mf_max * double(k) / 63.0;
                double v = objective(Tuning{tt, mf, pi});
                if (v < best.value) {
                    best.value = v;
                    best.tuning = Tuning{tt, mf, pi};
                }
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("nominal tuning is deterministic") {
    auto sys = desk_system();
    Workload w(0.2, 0.3, 0.1, 0.4);
    auto a = tune_nominal(sys, w);
    auto b = tune_nominal(sys, w);
    CHECK(a.tuning.policy == b.tuning.policy);
    CHECK(a.tuning.size_ratio == b.tuning.size_ratio);
    CHECK(a.tuning.filter_bits == b.tuning.filter_bits);
    CHECK(a.objective == b.objective);
}

TEST_CASE("nominal objective is consistent with a fresh model evaluation") {
    auto sys = desk_system();
    for (int idx : {0, 4, 11}) {
        Workload w = expected_catalog()[std::size_t(idx)].workload;
        auto r = tune_nominal(sys, w);
        CHECK(r.objective == doctest::Approx(workload_cost(w, sys, r.tuning)).epsilon(1e-12));
        CHECK(r.diagnostics.restarts > 0);
    }
}

TEST_CASE("nominal solver stays within 0.1% of the dense grid on the large system") {
    auto sys = large_system();
    for (const auto& entry : expected_catalog()) {
        auto r = tune_nominal(sys, entry.workload);
        auto grid = dense_grid(sys, [&](const Tuning& t) {
            return workload_cost(entry.workload, sys, t);
        });
        CHECK(r.objective <= grid.value * (1.0 + 1e-6) + 1e-12);
        CHECK(r.objective <= grid.value * 1.001);
    }
}

TEST_CASE("write-heavy workloads pick tiering, read-heavy pick leveling with filters") {
    auto sys = desk_system();

    Workload write_heavy = expected_catalog()[4].workload; // (.01,.01,.01,.97)
    auto grid_w = dense_grid(sys, [&](const Tuning& t) {
        return workload_cost(write_heavy, sys, t);
    });
    auto rw = tune_nominal(sys, write_heavy);
    CHECK(grid_w.tuning.policy == Policy::tiering);
    CHECK(rw.tuning.policy == Policy::tiering);
    CHECK(rw.objective <= grid_w.value * (1.0 + 1e-6));

    Workload read_heavy = expected_catalog()[5].workload; // (.49,.49,.01,.01)
    auto grid_r = dense_grid(sys, [&](const Tuning& t) {
        return workload_cost(read_heavy, sys, t);
    });
    auto rr = tune_nominal(sys, read_heavy);
    CHECK(grid_r.tuning.policy == Policy::leveling);
    CHECK(rr.tuning.policy == Policy::leveling);
    // Most of the budget goes to the filters.
    CHECK(rr.tuning.filter_bits >= 0.4 * sys.total_memory_bits);
    CHECK(rr.objective <= grid_r.value * (1.0 + 1e-6));
}

TEST_CASE("the argmin is invariant under a positive scaling of the objective") {
    auto sys = desk_system();
    Workload w(0.3, 0.2, 0.25, 0.25);
    auto plain = tune_over(sys, [&](Policy pi, double t, double mf) {
        return workload_cost(w, sys, Tuning{t, mf, pi});
    });
    // 1024 is a power of two, so the scaled objective rounds identically and
    // the deterministic search must walk the exact same path.
    auto scaled = tune_over(sys, [&](Policy pi, double t, double mf) {
        return 1024.0 * workload_cost(w, sys, Tuning{t, mf, pi});
    });
    CHECK(plain.tuning.policy == scaled.tuning.policy);
    CHECK(plain.tuning.size_ratio == scaled.tuning.size_ratio);
    CHECK(plain.tuning.filter_bits == scaled.tuning.filter_bits);
}

TEST_CASE("infeasible memory budgets are rejected") {
    auto sys = desk_system();
    sys.total_memory_bits = sys.page_entries * sys.entry_size_bits; // no room for a buffer
    CHECK_THROWS_AS(tune_nominal(sys, Workload(0.25, 0.25, 0.25, 0.25)), FeasibilityError);
    CHECK_THROWS_AS(tune_robust(sys, Workload(0.25, 0.25, 0.25, 0.25), 1.0), FeasibilityError);
}

TEST_CASE("zero-radius robust tuning coincides with the nominal tuning") {
    auto sys = desk_system();
    for (int idx : {0, 1, 4, 11}) {
        Workload w = expected_catalog()[std::size_t(idx)].workload;
        auto nominal = tune_nominal(sys, w);
        auto robust = tune_robust(sys, w, 0.0);
        CHECK(robust.tuning.policy == nominal.tuning.policy);
        CHECK(robust.tuning.size_ratio == doctest::Approx(nominal.tuning.size_ratio));
        CHECK(robust.tuning.filter_bits == doctest::Approx(nominal.tuning.filter_bits));
        double cn = workload_cost(w, sys, nominal.tuning);
        double cr = workload_cost(w, sys, robust.tuning);
        CHECK(cr <= 1.01 * cn);
    }
}

TEST_CASE("robust results satisfy their own contracts") {
    auto sys = desk_system();
    Workload w = expected_catalog()[11].workload;
    for (double rho : {0.25, 1.0, 2.0}) {
        auto r = tune_robust(sys, w, rho);
        CHECK(r.rho == rho);
        // The worst case can only be at least as bad as the center.
        CHECK(r.objective >= workload_cost(w, sys, r.tuning) - 1e-6);
        CHECK(kl_divergence(r.worst_workload, w) <= rho + 1e-4);
        CHECK(dot(r.worst_workload, cost_vector(sys, r.tuning)) ==
              doctest::Approx(r.objective).epsilon(1e-4));
        CHECK(r.diagnostics.restarts > 0);
    }
}

TEST_CASE("robust tuning verifies against the worst-case grid") {
    auto sys = desk_system();
    Workload w = expected_catalog()[7].workload;
    double rho = 1.0;
    auto r = tune_robust(sys, w, rho);
    auto grid = dense_grid(sys, [&](const Tuning& t) {
        return worst_case_cost(cost_vector(sys, t), w, rho).value;
    });
    CHECK(r.objective <= grid.value * (1.0 + 1e-6) + 1e-12);
}

TEST_CASE("larger uncertainty trims the size ratio for write-light workloads") {
    auto sys = desk_system();
    Workload w = expected_catalog()[11].workload; // 1% writes
    double t_half = tune_robust(sys, w, 0.5).tuning.size_ratio;
    double t_one = tune_robust(sys, w, 1.0).tuning.size_ratio;
    double t_two = tune_robust(sys, w, 2.0).tuning.size_ratio;
    CHECK(t_one <= t_half + 1e-6);
    CHECK(t_two <= t_one + 1e-6);
}

TEST_CASE("pessimism has a price on the uniform workload") {
    auto sys = desk_system();
    Workload w = expected_catalog()[0].workload;
    auto nominal = tune_nominal(sys, w);
    auto robust = tune_robust(sys, w, 2.0);
    CHECK(workload_cost(w, sys, robust.tuning) >=
          workload_cost(w, sys, nominal.tuning) - 1e-9);
}
