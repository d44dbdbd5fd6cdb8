#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lsmtune/evaluation.hpp"
#include "lsmtune/io.hpp"

using namespace lsmtune;

namespace {

SystemParams small_system() {
    SystemParams sys;
    sys.num_entries = 1e5;
    sys.entry_size_bits = 512;
    sys.page_entries = 64;
    sys.total_memory_bits = 16.0 * 1e5; // 16 bits per entry
    sys.rw_asymmetry = 1.0;
    sys.range_selectivity = 6.4e-4;
    return sys;
}

} // namespace

TEST_CASE("delta throughput identities") {
    auto sys = small_system();
    Workload w(0.3, 0.3, 0.2, 0.2);
    Tuning a{2.0, 1e5, Policy::leveling};
    Tuning b{8.0, 4e5, Policy::tiering};

    CHECK(delta_throughput(w, sys, a, a) == doctest::Approx(0.0));

    double ca = workload_cost(w, sys, a);
    double cb = workload_cost(w, sys, b);
    double expect = (1.0 / cb - 1.0 / ca) / (1.0 / ca);
    CHECK(delta_throughput(w, sys, a, b) == doctest::Approx(expect));
    // Algebraic identity used as an internal cross-check.
    CHECK(delta_throughput(w, sys, a, b) == doctest::Approx(ca / cb - 1.0).epsilon(1e-12));

    // Halving the cost doubles throughput; the inverse loses half.
    CHECK((1.0 / 0.5 - 1.0 / 1.0) / (1.0 / 1.0) == doctest::Approx(1.0));
    CHECK((1.0 / 1.0 - 1.0 / 0.5) / (1.0 / 0.5) == doctest::Approx(-0.5));
}

TEST_CASE("preference is antisymmetric") {
    auto sys = small_system();
    SplitMix64 rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        Workload w(rng.next_double() + 0.01, rng.next_double() + 0.01,
                   rng.next_double() + 0.01, rng.next_double() + 0.01);
        w = w.normalized();
        Tuning a{2.0 + 10.0 * rng.next_double(), 1e5 * rng.next_double() * 10.0,
                 Policy::leveling};
        Tuning b{2.0 + 10.0 * rng.next_double(), 1e5 * rng.next_double() * 10.0,
                 Policy::tiering};
        double ab = delta_throughput(w, sys, a, b);
        double ba = delta_throughput(w, sys, b, a);
        if (std::abs(ab) > 1e-12) CHECK(ab * ba < 0.0);
    }
}

TEST_CASE("throughput range over a benchmark") {
    auto sys = small_system();
    Tuning tun{4.0, 4e5, Policy::leveling};

    BenchmarkSet single;
    single.entries.push_back({0, {1, 1, 1, 1}, Workload(0.25, 0.25, 0.25, 0.25)});
    CHECK(throughput_range(single, sys, tun) == doctest::Approx(0.0));

    auto bench = sample_benchmark(300, 5);
    double theta = throughput_range(bench, sys, tun);
    // Direct recomputation.
    double best = -1e300, worst = 1e300;
    for (const auto& e : bench.entries) {
        double thr = 1.0 / workload_cost(e.workload, sys, tun);
        best = std::max(best, thr);
        worst = std::min(worst, thr);
    }
    CHECK(theta == doctest::Approx(best - worst).epsilon(1e-12));
    CHECK(theta >= 0.0);

    // Permutation invariance.
    BenchmarkSet shuffled = bench;
    std::reverse(shuffled.entries.begin(), shuffled.entries.end());
    CHECK(throughput_range(shuffled, sys, tun) == doctest::Approx(theta));

    // Union can only widen the spread.
    BenchmarkSet merged = bench;
    auto extra = sample_benchmark(300, 6);
    merged.entries.insert(merged.entries.end(), extra.entries.begin(), extra.entries.end());
    CHECK(throughput_range(merged, sys, tun) >= theta - 1e-12);

    BenchmarkSet empty;
    CHECK_THROWS_AS(throughput_range(empty, sys, tun), std::invalid_argument);
}

TEST_CASE("sweep emits one record per cell and benchmark workload") {
    auto sys = small_system();
    std::vector<CatalogEntry> catalog{expected_catalog()[0], expected_catalog()[4]};
    std::vector<double> rho_grid{0.0, 0.5};
    auto bench = sample_benchmark(50, 9);

    std::vector<ComparisonRecord> records;
    auto report = run_sweep(sys, catalog, rho_grid, bench, 1,
                            [&](const ComparisonRecord& r) { records.push_back(r); });

    REQUIRE(report.cells.size() == 4);
    REQUIRE(records.size() == 4 * 50);

    // Deterministic (workload, rho, benchmark) order.
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::size_t cell = i / 50;
        CHECK(records[i].expected_idx == int(cell / 2));
        CHECK(records[i].rho == rho_grid[cell % 2]);
    }

    for (const auto& r : records) {
        // Delta is recomputable from the two costs.
        CHECK(r.delta == doctest::Approx(r.cost_nominal / r.cost_robust - 1.0).epsilon(1e-12));
        double via_throughput =
            (1.0 / r.cost_robust - 1.0 / r.cost_nominal) / (1.0 / r.cost_nominal);
        CHECK(r.delta == doctest::Approx(via_throughput).epsilon(1e-9));
        CHECK(std::isfinite(r.kl));
    }

    // Zero radius keeps both tunings equivalent.
    for (const auto& cell : report.cells)
        if (cell.rho == 0.0) CHECK(std::abs(cell.mean_delta) <= 0.01);
}

TEST_CASE("sweep output does not depend on the parallelism degree") {
    auto sys = small_system();
    std::vector<CatalogEntry> catalog{expected_catalog()[1], expected_catalog()[11]};
    std::vector<double> rho_grid{0.0, 1.0};
    auto bench = sample_benchmark(40, 13);

    auto render = [&](int jobs) {
        std::ostringstream records, summary;
        records << kRecordsCsvHeader;
        auto report = run_sweep(sys, catalog, rho_grid, bench, jobs,
                                [&](const ComparisonRecord& r) { append_record_csv(records, r); });
        summary << kSummaryCsvHeader;
        for (const auto& cell : report.cells) append_summary_csv(summary, cell);
        return records.str() + "\n--\n" + summary.str();
    };

    auto seq = render(1);
    auto par = render(3);
    CHECK(seq == par);
    // Byte-identical on a repeated run as well.
    CHECK(seq == render(1));
}
