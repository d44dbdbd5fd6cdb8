#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsmtune {

// Raised when a configuration is structurally valid but cannot be tuned or
// simulated (e.g. the memory budget cannot hold a single page of buffer).
struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Policy { leveling, tiering };

inline const char* to_string(Policy p) {
    return p == Policy::leveling ? "leveling" : "tiering";
}

inline Policy policy_from_string(const std::string& s) {
    if (s == "leveling") return Policy::leveling;
    if (s == "tiering") return Policy::tiering;
    throw std::invalid_argument("unknown policy: " + s);
}

// Mix of the four query types: empty point lookups, non-empty point lookups,
// range lookups, writes. Components are proportions that sum to one.
struct Workload {
    std::array<double, 4> p{0, 0, 0, 0};

    Workload() = default;
    Workload(double z0, double z1, double q, double w) : p{z0, z1, q, w} {}

    double z0() const { return p[0]; }
    double z1() const { return p[1]; }
    double q() const { return p[2]; }
    double w() const { return p[3]; }

    double operator[](std::size_t i) const { return p[i]; }
    double& operator[](std::size_t i) { return p[i]; }

    double sum() const { return p[0] + p[1] + p[2] + p[3]; }

    bool is_normalized(double tol = 1e-9) const {
        for (double v : p)
            if (!(v >= 0.0) || !std::isfinite(v)) return false;
        return std::abs(sum() - 1.0) <= tol;
    }

    void validate(double tol = 1e-9) const {
        if (!is_normalized(tol))
            throw std::invalid_argument("workload must be non-negative and sum to 1");
    }

    Workload normalized() const {
        double s = sum();
        if (s <= 0.0) throw std::invalid_argument("workload has zero mass");
        return Workload(p[0] / s, p[1] / s, p[2] / s, p[3] / s);
    }

    bool operator==(const Workload& o) const { return p == o.p; }
};

// Fixed environment. All memory quantities are in bits.
struct SystemParams {
    double total_memory_bits = 0;  // m: memory shared by filters and buffer
    double entry_size_bits = 0;    // E
    double page_entries = 0;       // B: entries per disk page
    double num_entries = 0;        // N
    double rw_asymmetry = 0;       // relative cost of a page write vs a read
    double range_selectivity = 0;  // fraction of all entries a range query returns

    void validate() const {
        if (!(total_memory_bits > 0)) throw std::invalid_argument("total memory must be positive");
        if (!(entry_size_bits > 0)) throw std::invalid_argument("entry size must be positive");
        if (!(page_entries >= 1)) throw std::invalid_argument("page must hold at least one entry");
        if (!(num_entries >= 1)) throw std::invalid_argument("entry count must be at least 1");
        if (!(rw_asymmetry >= 0)) throw std::invalid_argument("rw asymmetry must be non-negative");
        if (!(range_selectivity >= 0) || !(range_selectivity <= 1))
            throw std::invalid_argument("range selectivity must lie in [0, 1]");
    }

    // Largest filter allocation that still leaves one full page of buffer.
    double max_filter_bits() const {
        return total_memory_bits - page_entries * entry_size_bits;
    }

    void require_feasible() const {
        validate();
        if (!(max_filter_bits() > 0))
            throw FeasibilityError("memory budget cannot hold one page of buffer");
    }
};

// Decision variables: size ratio, filter memory, compaction policy.
struct Tuning {
    double size_ratio = 2.0;   // T, continuous for optimization
    double filter_bits = 0.0;  // m_filt
    Policy policy = Policy::leveling;

    double buffer_bits(const SystemParams& sys) const {
        return sys.total_memory_bits - filter_bits;
    }

    void validate(const SystemParams& sys) const {
        sys.validate();
        if (!(size_ratio >= 2.0)) throw std::invalid_argument("size ratio must be >= 2");
        if (!(filter_bits >= 0.0) || !(filter_bits < sys.total_memory_bits))
            throw std::invalid_argument("filter memory must lie in [0, total memory)");
        if (!(buffer_bits(sys) >= sys.page_entries * sys.entry_size_bits))
            throw std::invalid_argument("buffer must hold at least one full page");
    }

    // Integer size ratio used when materializing a tree; rounded up.
    int deployed_size_ratio() const {
        return int(std::ceil(size_ratio - 1e-9));
    }
};

// Expected I/Os per query of each type at a given tuning.
struct CostVector {
    double empty_point = 0;     // Z0
    double nonempty_point = 0;  // Z1
    double range_scan = 0;      // Q
    double write = 0;           // W

    std::array<double, 4> as_array() const {
        return {empty_point, nonempty_point, range_scan, write};
    }
};

inline double dot(const Workload& w, const CostVector& c) {
    return w.z0() * c.empty_point + w.z1() * c.nonempty_point + w.q() * c.range_scan +
           w.w() * c.write;
}

} // namespace lsmtune
