#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lsmtune/io.hpp"
#include "lsmtune/workloads.hpp"

using namespace lsmtune;

TEST_CASE("kl divergence on hand-evaluated pairs") {
    Workload uniform(0.25, 0.25, 0.25, 0.25);
    CHECK(kl_divergence(uniform, uniform) == doctest::Approx(0.0));

    // Direct four-term summation.
    Workload skew(0.97, 0.01, 0.01, 0.01);
    double expect = 0.97 * std::log(0.97 / 0.25) + 3.0 * 0.01 * std::log(0.01 / 0.25);
    CHECK(expect == doctest::Approx(1.2186).epsilon(1e-4));
    CHECK(kl_divergence(skew, uniform) == doctest::Approx(expect));

    // Zero components contribute nothing on the left.
    Workload half(0.5, 0.5, 0.0, 0.0);
    CHECK(kl_divergence(half, uniform) == doctest::Approx(std::log(2.0)));

    // A positive left component over a zero right component diverges.
    CHECK(std::isinf(kl_divergence(uniform, half)));

    CHECK_THROWS_AS(kl_divergence(Workload(0.5, 0.5, 0.5, 0.5), uniform),
                    std::invalid_argument);
}

TEST_CASE("kl divergence is non-negative and asymmetric") {
    SplitMix64 rng(21);
    bool saw_asymmetry = false;
    for (int trial = 0; trial < 200; ++trial) {
        Workload p(rng.next_double() + 1e-3, rng.next_double() + 1e-3,
                   rng.next_double() + 1e-3, rng.next_double() + 1e-3);
        Workload q(rng.next_double() + 1e-3, rng.next_double() + 1e-3,
                   rng.next_double() + 1e-3, rng.next_double() + 1e-3);
        p = p.normalized();
        q = q.normalized();
        double pq = kl_divergence(p, q);
        CHECK(pq >= -1e-12);
        if (std::abs(pq - kl_divergence(q, p)) > 1e-6) saw_asymmetry = true;
        CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
    }
    CHECK(saw_asymmetry);
}

TEST_CASE("region membership compares divergence to the radius") {
    Workload uniform(0.25, 0.25, 0.25, 0.25);
    Workload skew(0.97, 0.01, 0.01, 0.01);
    CHECK(in_region(uniform, {uniform, 0.0}));
    CHECK(in_region(uniform, {uniform, 5.0}));
    CHECK_FALSE(in_region(skew, {uniform, 0.0}));
    CHECK_FALSE(in_region(skew, {uniform, 1.0})); // 1.2186 > 1.0
    CHECK(in_region(skew, {uniform, 1.25}));
    CHECK_THROWS_AS(in_region(uniform, {uniform, -0.5}), std::invalid_argument);
}

TEST_CASE("expected workload catalog holds the fifteen templates") {
    const auto& cat = expected_catalog();
    REQUIRE(cat.size() == 15);
    CHECK(cat[0].workload == Workload(0.25, 0.25, 0.25, 0.25));
    CHECK(cat[0].category == WorkloadCategory::uniform);
    CHECK(cat[4].workload == Workload(0.01, 0.01, 0.01, 0.97));
    CHECK(cat[4].category == WorkloadCategory::unimodal);
    CHECK(cat[13].workload == Workload(0.33, 0.01, 0.33, 0.33));
    CHECK(cat[13].category == WorkloadCategory::trimodal);
    int unimodal = 0, bimodal = 0, trimodal = 0;
    for (const auto& e : cat) {
        CHECK(e.workload.sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (double v : e.workload.p) CHECK(v >= 0.01);
        if (e.category == WorkloadCategory::unimodal) ++unimodal;
        if (e.category == WorkloadCategory::bimodal) ++bimodal;
        if (e.category == WorkloadCategory::trimodal) ++trimodal;
    }
    CHECK(unimodal == 4);
    CHECK(bimodal == 6);
    CHECK(trimodal == 4);
}

TEST_CASE("benchmark sampling is deterministic and normalized") {
    auto a = sample_benchmark(200, 99);
    auto b = sample_benchmark(200, 99);
    REQUIRE(a.entries.size() == 200);
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].counts == b.entries[i].counts);
        CHECK(a.entries[i].workload == b.entries[i].workload);
    }
    auto c = sample_benchmark(200, 100);
    bool differs = false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (!(a.entries[i].counts == c.entries[i].counts)) differs = true;
    CHECK(differs);

    for (const auto& e : a.entries) {
        std::int64_t total = 0;
        for (auto cnt : e.counts) {
            CHECK(cnt >= 1);
            CHECK(cnt <= 10000);
            total += cnt;
        }
        CHECK(e.workload.sum() == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t k = 0; k < 4; ++k)
            CHECK(e.workload[k] == doctest::Approx(double(e.counts[k]) / double(total)));
    }

    // Count floor of one keeps divergence finite against any catalog center.
    for (const auto& e : a.entries)
        for (const auto& ce : expected_catalog())
            CHECK(std::isfinite(kl_divergence(e.workload, ce.workload)));

    CHECK_THROWS_AS(sample_benchmark(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_benchmark(10, 1, 3), std::invalid_argument);
}

TEST_CASE("equal counts normalize to the uniform workload") {
    BenchEntry e;
    e.counts = {2500, 2500, 2500, 2500};
    double total = 10000;
    for (std::size_t k = 0; k < 4; ++k) e.workload[k] = double(e.counts[k]) / total;
    CHECK(e.workload == Workload(0.25, 0.25, 0.25, 0.25));
}

TEST_CASE("rho hint averages pairwise divergences") {
    Workload u(0.25, 0.25, 0.25, 0.25);
    std::vector<Workload> same{u, u, u};
    CHECK(rho_hint(same) == doctest::Approx(0.0));

    Workload p(0.4, 0.3, 0.2, 0.1);
    std::vector<Workload> pair{u, p};
    double expect = 0.5 * (kl_divergence(u, p) + kl_divergence(p, u));
    CHECK(rho_hint(pair) == doctest::Approx(expect));

    // Brute-force pairwise oracle over three perturbed workloads.
    Workload a(0.30, 0.20, 0.25, 0.25);
    Workload b(0.20, 0.30, 0.25, 0.25);
    Workload c(0.25, 0.25, 0.30, 0.20);
    std::vector<Workload> three{a, b, c};
    double sum = 0.0;
    for (const auto& x : three)
        for (const auto& y : three)
            if (!(x == y)) sum += kl_divergence(x, y);
    CHECK(rho_hint(three) == doctest::Approx(sum / 6.0));

    std::vector<Workload> one{u};
    CHECK_THROWS_AS(rho_hint(one), std::invalid_argument);
}

TEST_CASE("system parameters load from json with derived page capacity") {
    nlohmann::json j = {{"total_memory_bytes", 125000},  {"entry_size_bytes", 1024},
                        {"page_size_bytes", 4096},       {"num_entries", 100000},
                        {"rw_asymmetry", 1.5},           {"range_selectivity", 4e-6}};
    auto sys = system_from_json(j);
    CHECK(sys.total_memory_bits == doctest::Approx(1e6));
    CHECK(sys.entry_size_bits == doctest::Approx(8192));
    CHECK(sys.page_entries == doctest::Approx(4)); // integer division of page/entry
    CHECK(sys.num_entries == doctest::Approx(100000));

    // Pages smaller than one entry are rejected.
    j["page_size_bytes"] = 512;
    CHECK_THROWS_AS(system_from_json(j), std::invalid_argument);

    CHECK(parse_memory_bits("1024") == doctest::Approx(8192));
    CHECK(parse_memory_bits("64KB") == doctest::Approx(64.0 * 1024 * 8));
    CHECK(parse_memory_bits("10MB") == doctest::Approx(10.0 * 1024 * 1024 * 8));
    CHECK(parse_memory_bits("1GB") == doctest::Approx(8.0 * 1024 * 1024 * 1024));
    CHECK_THROWS_AS(parse_memory_bits("10XB"), std::invalid_argument);
}

TEST_CASE("benchmark sets round-trip through json lines") {
    auto set = sample_benchmark(50, 7);
    std::stringstream ss;
    write_benchmark_jsonl(set, ss);
    auto back = read_benchmark_jsonl(ss);
    REQUIRE(back.entries.size() == set.entries.size());
    CHECK(back.seed == set.seed);
    CHECK(back.rng == set.rng);
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        CHECK(back.entries[i].counts == set.entries[i].counts);
        CHECK(back.entries[i].workload == set.entries[i].workload);
    }
}
