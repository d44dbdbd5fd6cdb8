#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "lsmtune/rng.hpp"
#include "lsmtune/types.hpp"
#include "lsmtune/workloads.hpp"

namespace lsmtune::sim {

// Session mixes named after their dominant query type. The dominant type gets
// 80% of the queries and the rest is split at random; the expected template
// instead jitters around the tuning workload and stays within KL 0.2 of it.
enum class SessionTemplate { expected, empty_read, nonempty_read, read, range, write };

inline SessionTemplate session_template_from_string(const std::string& s) {
    if (s == "expected") return SessionTemplate::expected;
    if (s == "empty-read") return SessionTemplate::empty_read;
    if (s == "non-empty-read") return SessionTemplate::nonempty_read;
    if (s == "read") return SessionTemplate::read;
    if (s == "range") return SessionTemplate::range;
    if (s == "write") return SessionTemplate::write;
    throw std::invalid_argument("unknown session template: " + s);
}

inline const char* to_string(SessionTemplate t) {
    switch (t) {
        case SessionTemplate::expected: return "expected";
        case SessionTemplate::empty_read: return "empty-read";
        case SessionTemplate::nonempty_read: return "non-empty-read";
        case SessionTemplate::read: return "read";
        case SessionTemplate::range: return "range";
        default: return "write";
    }
}

namespace detail {

inline std::array<std::int64_t, 4> shares_to_counts(const std::array<double, 4>& share,
                                                    std::int64_t total) {
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        counts[i] = std::max<std::int64_t>(1, std::int64_t(std::llround(share[i] * double(total))));
        assigned += counts[i];
    }
    counts[3] = std::max<std::int64_t>(1, total - assigned);
    return counts;
}

} // namespace detail

inline std::array<std::int64_t, 4> session_counts(SessionTemplate tmpl, std::int64_t total,
                                                  const Workload& expected, SplitMix64& rng) {
    if (total < 4) throw std::invalid_argument("session needs at least 4 queries");

    if (tmpl == SessionTemplate::expected) {
        // Jitter the expected mix, shrinking the jitter until the realized
        // counts stay within KL 0.2 of the expected workload.
        for (double spread = 0.3; spread > 1e-3; spread *= 0.5) {
            std::array<double, 4> share;
            double sum = 0.0;
            for (std::size_t i = 0; i < 4; ++i) {
                share[i] = expected[i] * std::exp((rng.next_double() * 2.0 - 1.0) * spread);
                sum += share[i];
            }
            for (auto& s : share) s /= sum;
            auto counts = detail::shares_to_counts(share, total);
            double realized_total =
                double(counts[0] + counts[1] + counts[2] + counts[3]);
            Workload realized(double(counts[0]) / realized_total,
                              double(counts[1]) / realized_total,
                              double(counts[2]) / realized_total,
                              double(counts[3]) / realized_total);
            if (kl_divergence(realized, expected) < 0.2) return counts;
        }
        // Fall back to the expected proportions themselves.
        return detail::shares_to_counts(expected.p, total);
    }

    std::array<double, 4> share{0, 0, 0, 0};
    std::array<double, 4> rest;
    double rest_sum = 0.0;
    for (auto& r : rest) {
        r = rng.next_double() + 1e-3;
        rest_sum += r;
    }

    auto fill_rest = [&](std::initializer_list<std::size_t> minor, double budget) {
        double minor_sum = 0.0;
        for (auto i : minor) minor_sum += rest[i];
        for (auto i : minor) share[i] = budget * rest[i] / minor_sum;
    };

    switch (tmpl) {
        case SessionTemplate::empty_read:
            share[0] = 0.8;
            fill_rest({1, 2, 3}, 0.2);
            break;
        case SessionTemplate::nonempty_read:
            share[1] = 0.8;
            fill_rest({0, 2, 3}, 0.2);
            break;
        case SessionTemplate::read: {
            double split = 0.3 + 0.4 * rng.next_double();
            share[0] = 0.8 * split;
            share[1] = 0.8 * (1.0 - split);
            fill_rest({2, 3}, 0.2);
            break;
        }
        case SessionTemplate::range:
            share[2] = 0.8;
            fill_rest({0, 1, 3}, 0.2);
            break;
        default:
            share[3] = 0.8;
            fill_rest({0, 1, 2}, 0.2);
            break;
    }
    return detail::shares_to_counts(share, total);
}

} // namespace lsmtune::sim
