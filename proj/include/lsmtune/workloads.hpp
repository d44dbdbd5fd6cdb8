#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsmtune/rng.hpp"
#include "lsmtune/types.hpp"

namespace lsmtune {

// I(p, q) = sum p_i * ln(p_i / q_i), with 0 * ln(0/q) = 0 and +inf when p_i > 0
// while q_i = 0. Asymmetric; natural log.
inline double kl_divergence(const Workload& p, const Workload& q) {
    p.validate();
    q.validate();
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        s += p[i] * std::log(p[i] / q[i]);
    }
    return s;
}

// All workloads within KL radius `radius` of `center`.
struct UncertaintyRegion {
    Workload center;
    double radius = 0.0;

    void validate() const {
        center.validate();
        if (!(radius >= 0.0)) throw std::invalid_argument("region radius must be >= 0");
    }
};

inline bool in_region(const Workload& candidate, const UncertaintyRegion& region) {
    region.validate();
    return kl_divergence(candidate, region.center) <= region.radius;
}

enum class WorkloadCategory { uniform, unimodal, bimodal, trimodal };

inline const char* to_string(WorkloadCategory c) {
    switch (c) {
        case WorkloadCategory::uniform: return "uniform";
        case WorkloadCategory::unimodal: return "unimodal";
        case WorkloadCategory::bimodal: return "bimodal";
        default: return "trimodal";
    }
}

struct CatalogEntry {
    Workload workload;
    WorkloadCategory category;
};

// The 15 expected-workload templates used throughout the evaluation: one
// uniform mix, four single-dominant, six double-dominant, four
// triple-dominant. Every component is at least 1% so KL distances stay finite.
inline const std::array<CatalogEntry, 15>& expected_catalog() {
    static const std::array<CatalogEntry, 15> catalog = {{
        {{0.25, 0.25, 0.25, 0.25}, WorkloadCategory::uniform},
        {{0.97, 0.01, 0.01, 0.01}, WorkloadCategory::unimodal},
        {{0.01, 0.97, 0.01, 0.01}, WorkloadCategory::unimodal},
        {{0.01, 0.01, 0.97, 0.01}, WorkloadCategory::unimodal},
        {{0.01, 0.01, 0.01, 0.97}, WorkloadCategory::unimodal},
        {{0.49, 0.49, 0.01, 0.01}, WorkloadCategory::bimodal},
        {{0.49, 0.01, 0.49, 0.01}, WorkloadCategory::bimodal},
        {{0.49, 0.01, 0.01, 0.49}, WorkloadCategory::bimodal},
        {{0.01, 0.49, 0.49, 0.01}, WorkloadCategory::bimodal},
        {{0.01, 0.49, 0.01, 0.49}, WorkloadCategory::bimodal},
        {{0.01, 0.01, 0.49, 0.49}, WorkloadCategory::bimodal},
        {{0.33, 0.33, 0.33, 0.01}, WorkloadCategory::trimodal},
        {{0.33, 0.33, 0.01, 0.33}, WorkloadCategory::trimodal},
        {{0.33, 0.01, 0.33, 0.33}, WorkloadCategory::trimodal},
        {{0.01, 0.33, 0.33, 0.33}, WorkloadCategory::trimodal},
    }};
    return catalog;
}

struct BenchEntry {
    int index = 0;
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    Workload workload;
};

struct BenchmarkSet {
    std::uint64_t seed = 0;
    std::string rng = kRngName;
    std::vector<BenchEntry> entries;
};

// Draws n random workloads as 4-tuples of independent uniform query counts in
// [1, max_count], each normalized by its total. The floor of one query per
// type keeps every sampled workload strictly positive.
inline BenchmarkSet sample_benchmark(int n, std::uint64_t seed, std::int64_t max_count = 10000) {
    if (n < 1) throw std::invalid_argument("benchmark size must be >= 1");
    if (max_count < 4) throw std::invalid_argument("max count must be >= 4");
    BenchmarkSet set;
    set.seed = seed;
    set.entries.reserve(std::size_t(n));
    SplitMix64 rng(seed);
    for (int i = 0; i < n; ++i) {
        BenchEntry e;
        e.index = i;
        double total = 0.0;
        for (auto& c : e.counts) {
            c = rng.next_in(1, max_count);
            total += double(c);
        }
        for (std::size_t k = 0; k < 4; ++k) e.workload[k] = double(e.counts[k]) / total;
        set.entries.push_back(e);
    }
    return set;
}

// Mean KL divergence over all ordered pairs of historically observed
// workloads; a reasonable default radius for the uncertainty region.
inline double rho_hint(std::span<const Workload> history) {
    if (history.size() < 2)
        throw std::invalid_argument("need at least two historical workloads");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < history.size(); ++i)
        for (std::size_t j = 0; j < history.size(); ++j) {
            if (i == j) continue;
            sum += kl_divergence(history[i], history[j]);
            ++pairs;
        }
    return sum / double(pairs);
}

} // namespace lsmtune
