#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "lsmtune/cost_model.hpp"
#include "lsmtune/nominal_tuner.hpp"
#include "lsmtune/robust_tuner.hpp"
#include "lsmtune/workloads.hpp"

namespace lsmtune {

// Relative throughput gain of tuning `b` over tuning `a` on a workload;
// positive when `b` is faster. Equals C(w, a) / C(w, b) - 1.
inline double delta_throughput(const Workload& wkl, const SystemParams& sys, const Tuning& a,
                               const Tuning& b) {
    double ca = workload_cost(wkl, sys, a);
    double cb = workload_cost(wkl, sys, b);
    if (!(ca > 0) || !(cb > 0) || !std::isfinite(ca) || !std::isfinite(cb))
        throw std::invalid_argument("costs must be positive and finite");
    return (1.0 / cb - 1.0 / ca) / (1.0 / ca);
}

// Spread between the best and worst throughput of one tuning across a
// benchmark set; smaller means more consistent performance.
inline double throughput_range(const BenchmarkSet& bench, const SystemParams& sys,
                               const Tuning& tun) {
    if (bench.entries.empty()) throw std::invalid_argument("benchmark set is empty");
    CostVector c = cost_vector(sys, tun);
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& e : bench.entries) {
        double thr = 1.0 / dot(e.workload, c);
        best = std::max(best, thr);
        worst = std::min(worst, thr);
    }
    return best - worst;
}

// One benchmark workload evaluated under a nominal and a robust tuning.
struct ComparisonRecord {
    int expected_idx = 0;
    double rho = 0.0;
    Workload workload;
    double cost_nominal = 0.0;
    double cost_robust = 0.0;
    double delta = 0.0; // delta_throughput(nominal, robust)
    double kl = 0.0;    // KL(workload, expected workload)
};

// Aggregates for one (expected workload, rho) cell.
struct SweepCell {
    int expected_idx = 0;
    double rho = 0.0;
    WorkloadCategory category = WorkloadCategory::uniform;
    double mean_delta = 0.0;
    double theta_nominal = 0.0;
    double theta_robust = 0.0;
    double mean_kl = 0.0;
    Tuning nominal_tuning;
    Tuning robust_tuning;
    double nominal_objective = 0.0;
    double robust_objective = 0.0;
};

struct SweepReport {
    std::vector<SweepCell> cells;

    // Unweighted mean of mean_delta over catalog members of one category at
    // one radius.
    double category_mean_delta(WorkloadCategory cat, double rho) const {
        double sum = 0.0;
        int n = 0;
        for (const auto& c : cells)
            if (c.category == cat && c.rho == rho) {
                sum += c.mean_delta;
                ++n;
            }
        return n > 0 ? sum / n : 0.0;
    }

    // Mean robust throughput range over all expected workloads at one radius.
    double mean_theta_robust(double rho) const {
        double sum = 0.0;
        int n = 0;
        for (const auto& c : cells)
            if (c.rho == rho) {
                sum += c.theta_robust;
                ++n;
            }
        return n > 0 ? sum / n : 0.0;
    }
};

// Tune nominally once per expected workload and robustly per (workload, rho),
// then evaluate both tunings on every benchmark workload. Records stream to
// `sink` in deterministic (workload, rho, benchmark index) order regardless of
// the parallelism degree.
inline SweepReport run_sweep(const SystemParams& sys, std::span<const CatalogEntry> catalog,
                             std::span<const double> rho_grid, const BenchmarkSet& bench,
                             int jobs = 1,
                             const std::function<void(const ComparisonRecord&)>& sink = {}) {
    sys.require_feasible();
    if (catalog.empty() || rho_grid.empty() || bench.entries.empty())
        throw std::invalid_argument("sweep needs a catalog, a rho grid, and a benchmark");
    jobs = std::max(1, jobs);

    std::vector<TuningResult> nominal(catalog.size());
    auto tune_block = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            nominal[i] = tune_nominal(sys, catalog[i].workload);
    };
    if (jobs == 1) {
        tune_block(0, catalog.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (catalog.size() + std::size_t(jobs) - 1) / std::size_t(jobs);
        for (std::size_t b = 0; b < catalog.size(); b += chunk)
            pool.emplace_back(tune_block, b, std::min(catalog.size(), b + chunk));
        for (auto& t : pool) t.join();
    }

    std::size_t n_cells = catalog.size() * rho_grid.size();
    std::vector<SweepCell> cells(n_cells);
    std::vector<std::vector<ComparisonRecord>> records(n_cells);

    auto run_cell = [&](std::size_t cell) {
        std::size_t wi = cell / rho_grid.size();
        std::size_t ri = cell % rho_grid.size();
        const Workload& expected = catalog[wi].workload;
        double rho = rho_grid[ri];

        RobustResult robust = tune_robust(sys, expected, rho);
        CostVector cn = cost_vector(sys, nominal[wi].tuning);
        CostVector cr = cost_vector(sys, robust.tuning);

        SweepCell& out = cells[cell];
        out.expected_idx = int(wi);
        out.rho = rho;
        out.category = catalog[wi].category;
        out.nominal_tuning = nominal[wi].tuning;
        out.robust_tuning = robust.tuning;
        out.nominal_objective = nominal[wi].objective;
        out.robust_objective = robust.objective;

        auto& recs = records[cell];
        recs.reserve(bench.entries.size());
        double sum_delta = 0.0, sum_kl = 0.0;
        double thr_best_n = -1e300, thr_worst_n = 1e300;
        double thr_best_r = -1e300, thr_worst_r = 1e300;
        for (const auto& e : bench.entries) {
            ComparisonRecord rec;
            rec.expected_idx = int(wi);
            rec.rho = rho;
            rec.workload = e.workload;
            rec.cost_nominal = dot(e.workload, cn);
            rec.cost_robust = dot(e.workload, cr);
            rec.delta = rec.cost_nominal / rec.cost_robust - 1.0;
            rec.kl = kl_divergence(e.workload, expected);
            sum_delta += rec.delta;
            sum_kl += rec.kl;
            thr_best_n = std::max(thr_best_n, 1.0 / rec.cost_nominal);
            thr_worst_n = std::min(thr_worst_n, 1.0 / rec.cost_nominal);
            thr_best_r = std::max(thr_best_r, 1.0 / rec.cost_robust);
            thr_worst_r = std::min(thr_worst_r, 1.0 / rec.cost_robust);
            recs.push_back(rec);
        }
        out.mean_delta = sum_delta / double(bench.entries.size());
        out.mean_kl = sum_kl / double(bench.entries.size());
        out.theta_nominal = thr_best_n - thr_worst_n;
        out.theta_robust = thr_best_r - thr_worst_r;
    };

    // Cells run in chunks of `jobs`; emission stays in cell order.
    for (std::size_t base = 0; base < n_cells; base += std::size_t(jobs)) {
        std::size_t end = std::min(n_cells, base + std::size_t(jobs));
        if (jobs == 1) {
            run_cell(base);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t c = base; c < end; ++c) pool.emplace_back(run_cell, c);
            for (auto& t : pool) t.join();
        }
        if (sink)
            for (std::size_t c = base; c < end; ++c)
                for (const auto& rec : records[c]) sink(rec);
        for (std::size_t c = base; c < end; ++c) records[c].clear();
    }

    SweepReport report;
    report.cells = std::move(cells);
    return report;
}

} // namespace lsmtune
