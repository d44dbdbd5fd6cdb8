#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "lsmtune/rng.hpp"

namespace lsmtune::sim {

// Fixed-size Bloom filter over 64-bit keys with seeded double hashing. A
// filter built with zero bits degenerates to "always maybe", which is the
// correct behavior for a run that received no filter memory.
class BloomFilter {
public:
    BloomFilter() = default;

    BloomFilter(std::size_t expected_entries, double bits_per_entry, std::uint64_t seed)
        : seed_(seed) {
        if (expected_entries == 0 || bits_per_entry <= 0.0) return;
        n_bits_ = std::size_t(std::llround(bits_per_entry * double(expected_entries)));
        if (n_bits_ == 0) return;
        hashes_ = std::max(1, int(std::lround(bits_per_entry * 0.6931471805599453)));
        words_.assign((n_bits_ + 63) / 64, 0);
    }

    void insert(std::uint64_t key) {
        if (n_bits_ == 0) return;
        auto [h1, h2] = hash_pair(key);
        for (int i = 0; i < hashes_; ++i) {
            std::uint64_t bit = (h1 + std::uint64_t(i) * h2) % n_bits_;
            words_[bit >> 6] |= 1ULL << (bit & 63);
        }
    }

    // Never returns false for an inserted key.
    bool maybe_contains(std::uint64_t key) const {
        if (n_bits_ == 0) return true;
        auto [h1, h2] = hash_pair(key);
        for (int i = 0; i < hashes_; ++i) {
            std::uint64_t bit = (h1 + std::uint64_t(i) * h2) % n_bits_;
            if (!(words_[bit >> 6] & (1ULL << (bit & 63)))) return false;
        }
        return true;
    }

    std::size_t bit_count() const { return n_bits_; }
    int hash_count() const { return hashes_; }

private:
    std::pair<std::uint64_t, std::uint64_t> hash_pair(std::uint64_t key) const {
        SplitMix64 g(key ^ seed_);
        std::uint64_t h1 = g.next();
        std::uint64_t h2 = g.next() | 1ULL;
        return {h1, h2};
    }

    std::vector<std::uint64_t> words_;
    std::size_t n_bits_ = 0;
    int hashes_ = 0;
    std::uint64_t seed_ = 0;
};

} // namespace lsmtune::sim
