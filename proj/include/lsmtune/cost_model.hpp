#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lsmtune/types.hpp"

namespace lsmtune {

namespace detail {
inline constexpr double kLn2Sq = 0.4804530139182014; // ln(2)^2
// Guard against ceil(log) returning n+1 when the argument is an exact power.
inline constexpr double kLevelEps = 1e-9;
} // namespace detail

// Number of levels L = ceil(log_T(N*E/m_buf + 1)), at least 1.
inline int levels(const SystemParams& sys, const Tuning& tun) {
    tun.validate(sys);
    double ratio = sys.num_entries * sys.entry_size_bits / tun.buffer_bits(sys);
    double l = std::log(ratio + 1.0) / std::log(tun.size_ratio);
    return std::max(1, int(std::ceil(l - detail::kLevelEps)));
}

// Per-level false positive rates f_1..f_L under the memory allocation that
// assigns exponentially decreasing rates toward shallower levels, clamped
// into [0, 1].
inline std::vector<double> fp_rates(const SystemParams& sys, const Tuning& tun) {
    int depth = levels(sys, tun);
    double t = tun.size_ratio;
    double scale = std::exp(-(tun.filter_bits / sys.num_entries) * detail::kLn2Sq);
    double lead = std::pow(t, t / (t - 1.0));
    std::vector<double> f(static_cast<std::size_t>(depth));
    double denom = std::pow(t, double(depth)); // T^(L+1-i) for i = 1
    for (int i = 0; i < depth; ++i) {
        f[std::size_t(i)] = std::clamp(lead / denom * scale, 0.0, 1.0);
        denom /= t;
    }
    return f;
}

// Expected I/Os of a point lookup that misses everywhere: every run's filter
// gets a chance to fire a false positive.
inline double empty_point_cost(const SystemParams& sys, const Tuning& tun) {
    auto f = fp_rates(sys, tun);
    double s = 0.0;
    for (double v : f) s += v;
    return tun.policy == Policy::leveling ? s : (tun.size_ratio - 1.0) * s;
}

// Expected I/Os of a point lookup that finds its key, as an expectation over
// the level holding the entry (level size ~ share of a full tree) plus false
// positives on the levels probed before it.
inline double nonempty_point_cost(const SystemParams& sys, const Tuning& tun) {
    int depth = levels(sys, tun);
    double t = tun.size_ratio;
    auto f = fp_rates(sys, tun);
    // Level weights (T-1)*T^(i-1) normalized by T^L - 1; buffer size cancels.
    double norm = std::pow(t, double(depth)) - 1.0;
    double cost = 0.0;
    double prefix = 0.0; // sum of f_j for j < i
    double tpow = 1.0;   // T^(i-1)
    for (int i = 0; i < depth; ++i) {
        double weight = (t - 1.0) * tpow / norm;
        if (tun.policy == Policy::leveling) {
            cost += weight * (1.0 + prefix);
        } else {
            cost += weight * (1.0 + (t - 1.0) * prefix + 0.5 * (t - 2.0) * f[std::size_t(i)]);
        }
        prefix += f[std::size_t(i)];
        tpow *= t;
    }
    return cost;
}

// Range lookup: one seek per run plus the scanned data pages.
inline double range_cost(const SystemParams& sys, const Tuning& tun) {
    double depth = levels(sys, tun);
    double scanned = sys.range_selectivity * sys.num_entries / sys.page_entries;
    return tun.policy == Policy::leveling ? scanned + depth
                                          : scanned + depth * (tun.size_ratio - 1.0);
}

// Amortized write cost from merge participation across all levels, weighted
// by the storage read/write asymmetry.
inline double write_cost(const SystemParams& sys, const Tuning& tun) {
    double depth = levels(sys, tun);
    double t = tun.size_ratio;
    double merges = tun.policy == Policy::leveling ? (t - 1.0) / 2.0 : (t - 1.0) / t;
    return depth / sys.page_entries * merges * (1.0 + sys.rw_asymmetry);
}

inline CostVector cost_vector(const SystemParams& sys, const Tuning& tun) {
    int depth = levels(sys, tun);
    double t = tun.size_ratio;
    double scale = std::exp(-(tun.filter_bits / sys.num_entries) * detail::kLn2Sq);
    double lead = std::pow(t, t / (t - 1.0));

    double sum_f = 0.0;
    double z1 = 0.0;
    double prefix = 0.0;
    double tpow = 1.0;
    double norm = std::pow(t, double(depth)) - 1.0;
    double denom = std::pow(t, double(depth));
    for (int i = 0; i < depth; ++i) {
        double fi = std::clamp(lead / denom * scale, 0.0, 1.0);
        denom /= t;
        double weight = (t - 1.0) * tpow / norm;
        if (tun.policy == Policy::leveling) {
            z1 += weight * (1.0 + prefix);
        } else {
            z1 += weight * (1.0 + (t - 1.0) * prefix + 0.5 * (t - 2.0) * fi);
        }
        sum_f += fi;
        prefix += fi;
        tpow *= t;
    }

    CostVector c;
    c.empty_point = tun.policy == Policy::leveling ? sum_f : (t - 1.0) * sum_f;
    c.nonempty_point = z1;
    double scanned = sys.range_selectivity * sys.num_entries / sys.page_entries;
    c.range_scan = tun.policy == Policy::leveling ? scanned + depth
                                                  : scanned + depth * (t - 1.0);
    double merges = tun.policy == Policy::leveling ? (t - 1.0) / 2.0 : (t - 1.0) / t;
    c.write = depth / sys.page_entries * merges * (1.0 + sys.rw_asymmetry);
    return c;
}

// Expected I/Os per query for a workload: the workload-weighted cost vector.
inline double workload_cost(const Workload& wkl, const SystemParams& sys, const Tuning& tun) {
    wkl.validate();
    return dot(wkl, cost_vector(sys, tun));
}

// Size ratios past this point cannot reduce the level count any further even
// with the whole budget given to the buffer; the solver box stops here.
inline double size_ratio_cap(const SystemParams& sys) {
    sys.validate();
    return std::max(2.0, sys.num_entries * sys.entry_size_bits / sys.total_memory_bits);
}

// Cost at the integer size ratio actually deployed.
inline double deployed_cost(const Workload& wkl, const SystemParams& sys, Tuning tun) {
    tun.size_ratio = double(tun.deployed_size_ratio());
    return workload_cost(wkl, sys, tun);
}

} // namespace lsmtune
