#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "lsmtune/cost_model.hpp"
#include "lsmtune/rng.hpp"
#include "lsmtune/sim/bloom.hpp"
#include "lsmtune/types.hpp"

namespace lsmtune::sim {

inline constexpr int kMaxLevels = 20;

struct SimConfig {
    SystemParams sys;
    Tuning tuning;                 // size ratio must be an integer >= 2
    std::uint64_t key_domain = 0;  // 0 derives 8x the entry count
    std::uint64_t seed = 1;

    int size_ratio() const { return int(std::llround(tuning.size_ratio)); }

    std::size_t buffer_capacity() const {
        return std::size_t(tuning.buffer_bits(sys) / sys.entry_size_bits);
    }

    std::uint64_t domain() const {
        return key_domain != 0 ? key_domain : std::uint64_t(8.0 * sys.num_entries);
    }

    void validate() const {
        tuning.validate(sys);
        if (std::abs(tuning.size_ratio - std::round(tuning.size_ratio)) > 1e-9 ||
            size_ratio() < 2)
            throw std::invalid_argument("simulator requires an integer size ratio >= 2");
        if (buffer_capacity() < 1)
            throw std::invalid_argument("buffer must hold at least one entry");
    }
};

// Logical page I/O attributed to a single operation.
struct IoDelta {
    long reads = 0;       // query-path page reads
    long comp_reads = 0;  // pages read by flush/merge work
    long comp_writes = 0; // pages written by flush/merge work

    IoDelta& operator+=(const IoDelta& o) {
        reads += o.reads;
        comp_reads += o.comp_reads;
        comp_writes += o.comp_writes;
        return *this;
    }
};

// Monotone session counters.
struct IoStats {
    long page_reads = 0;
    long page_writes = 0;
    long comp_page_reads = 0;
    long comp_page_writes = 0;
    std::array<long, 4> queries{0, 0, 0, 0}; // per query type
};

struct SessionResult {
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    // Mean I/O per query per type; the write column carries the amortized,
    // asymmetry-weighted compaction cost.
    std::array<double, 4> mean_io{0, 0, 0, 0};
    double amortized_write_raw = 0.0;
    IoStats totals;
};

class SimTree {
public:
    // Populates a valid tree shape without counting any I/O: levels are filled
    // greedily from the deepest one up; anything below one buffer's worth
    // stays in the buffer.
    static SimTree bulk_load(const SimConfig& cfg, std::size_t n) {
        cfg.validate();
        SimTree tree(cfg);
        std::size_t cap = cfg.buffer_capacity();
        if (n == 0) return tree;

        // Deepest level needed so that cumulative capacity covers n; checked
        // before any keys are drawn.
        int depth = 0;
        double total = 0.0;
        if (n >= cap) {
            while (depth < kMaxLevels) {
                ++depth;
                total += tree.level_capacity(depth);
                if (total >= double(n)) break;
            }
            if (total < double(n))
                throw FeasibilityError("bulk load exceeds tree capacity at the level cap");
        }

        std::vector<std::uint64_t> keys = tree.sample_fresh_keys(n);
        if (n < cap) {
            for (auto k : keys) {
                tree.buffer_.push_back(k);
                tree.buffer_set_.insert(k);
            }
            return tree;
        }

        std::size_t offset = 0;
        std::size_t remaining = n;
        for (int lvl = depth; lvl >= 1 && remaining > 0; --lvl) {
            std::size_t take =
                std::min(remaining, std::size_t(tree.level_capacity(lvl)));
            if (take == 0) continue;
            tree.place_level(lvl, keys, offset, take);
            offset += take;
            remaining -= take;
        }
        return tree;
    }

    // Buffer append; a full buffer flushes and cascades compactions.
    IoDelta put(std::uint64_t key) {
        IoDelta delta;
        if (!buffer_set_.count(key)) {
            buffer_.push_back(key);
            buffer_set_.insert(key);
        }
        if (buffer_.size() >= cfg_.buffer_capacity()) delta += flush();
        stats_.comp_page_reads += delta.comp_reads;
        stats_.comp_page_writes += delta.comp_writes;
        stats_.page_writes += delta.comp_writes; // all writes are flush/merge writes
        ++stats_.queries[3];
        return delta;
    }

    std::pair<bool, IoDelta> get(std::uint64_t key) {
        IoDelta delta;
        if (buffer_set_.count(key)) return {true, delta}; // buffer hits cost no I/O
        for (const auto& level : levels_) {
            // Most recent run first.
            for (auto it = level.runs.rbegin(); it != level.runs.rend(); ++it) {
                const Run& run = *it;
                if (run.keys.empty()) continue;
                if (!run.filter.maybe_contains(key)) continue;
                if (key < run.keys.front() || key > run.keys.back()) continue;
                // Fence pointers select exactly one candidate page.
                std::size_t page = page_of(run, key);
                delta.reads += 1;
                stats_.page_reads += 1;
                if (page_contains(run, page, key)) return {true, delta};
            }
        }
        return {false, delta};
    }

    std::pair<std::size_t, IoDelta> range(std::uint64_t lo, std::uint64_t hi) {
        if (lo > hi) throw std::invalid_argument("range bounds out of order");
        IoDelta delta;
        std::size_t matches = 0;
        for (auto k : buffer_)
            if (k >= lo && k <= hi) ++matches;
        for (const auto& level : levels_) {
            for (const auto& run : level.runs) {
                if (run.keys.empty()) continue;
                delta.reads += 1; // one seek per run
                auto first = std::lower_bound(run.keys.begin(), run.keys.end(), lo);
                auto last = std::upper_bound(run.keys.begin(), run.keys.end(), hi);
                if (first == last) continue;
                std::size_t i0 = std::size_t(first - run.keys.begin());
                std::size_t i1 = std::size_t(last - run.keys.begin()) - 1;
                delta.reads += long(i1 / page_entries_ - i0 / page_entries_ + 1);
                matches += std::size_t(last - first);
            }
        }
        stats_.page_reads += delta.reads;
        return {matches, delta};
    }

    // Executes the query mix in seeded shuffled order. Empty lookups target
    // absent keys, non-empty lookups target resident keys, writes insert fresh
    // unique keys. Compaction I/O is redistributed over the write queries.
    SessionResult run_session(const std::array<std::int64_t, 4>& counts, std::uint64_t seed) {
        SessionResult res;
        res.counts = counts;
        std::int64_t total = counts[0] + counts[1] + counts[2] + counts[3];
        if (total <= 0) return res;

        std::vector<std::uint8_t> ops;
        ops.reserve(std::size_t(total));
        for (int t = 0; t < 4; ++t)
            for (std::int64_t i = 0; i < counts[std::size_t(t)]; ++i)
                ops.push_back(std::uint8_t(t));
        SplitMix64 rng(seed);
        for (std::size_t i = ops.size(); i > 1; --i)
            std::swap(ops[i - 1], ops[std::size_t(rng.next_below(i))]);

        std::array<long, 4> reads_by_type{0, 0, 0, 0};
        long comp_reads = 0, comp_writes = 0;
        std::uint64_t span = std::uint64_t(
            std::max(1.0, cfg_.sys.range_selectivity * double(cfg_.domain())));
        for (auto op : ops) {
            switch (op) {
                case 0: {
                    auto [found, d] = get(draw_absent(rng));
                    (void)found;
                    reads_by_type[0] += d.reads;
                    ++stats_.queries[0];
                    break;
                }
                case 1: {
                    auto [found, d] = get(draw_present(rng));
                    (void)found;
                    reads_by_type[1] += d.reads;
                    ++stats_.queries[1];
                    break;
                }
                case 2: {
                    std::uint64_t lo = rng.next_below(cfg_.domain());
                    auto [cnt, d] = range(lo, lo + span - 1);
                    (void)cnt;
                    reads_by_type[2] += d.reads;
                    ++stats_.queries[2];
                    break;
                }
                default: {
                    std::uint64_t key = draw_absent(rng);
                    all_keys_.push_back(key);
                    key_set_.insert(key);
                    auto d = put(key);
                    comp_reads += d.comp_reads;
                    comp_writes += d.comp_writes;
                    break;
                }
            }
        }

        for (int t = 0; t < 3; ++t)
            res.mean_io[std::size_t(t)] =
                counts[std::size_t(t)] > 0
                    ? double(reads_by_type[std::size_t(t)]) / double(counts[std::size_t(t)])
                    : 0.0;
        if (counts[3] > 0) {
            res.amortized_write_raw = double(comp_reads + comp_writes) / double(counts[3]);
            res.mean_io[3] =
                (double(comp_reads) + cfg_.sys.rw_asymmetry * double(comp_writes)) /
                double(counts[3]);
        }
        res.totals = stats_;
        return res;
    }

    const IoStats& stats() const { return stats_; }
    const SimConfig& config() const { return cfg_; }
    std::size_t buffer_size() const { return buffer_.size(); }
    std::size_t key_count() const { return all_keys_.size(); }

    int deepest_level() const {
        for (int i = int(levels_.size()); i >= 1; --i)
            if (!levels_[std::size_t(i - 1)].runs.empty()) return i;
        return 0;
    }

    std::size_t runs_at(int level) const {
        if (level < 1 || level > int(levels_.size())) return 0;
        return levels_[std::size_t(level - 1)].runs.size();
    }

    std::size_t entries_at(int level) const {
        if (level < 1 || level > int(levels_.size())) return 0;
        std::size_t n = 0;
        for (const auto& r : levels_[std::size_t(level - 1)].runs) n += r.keys.size();
        return n;
    }

    const std::vector<std::uint64_t>& run_keys(int level, std::size_t run_idx) const {
        return levels_.at(std::size_t(level - 1)).runs.at(run_idx).keys;
    }

    bool runs_sorted_unique() const {
        for (const auto& level : levels_)
            for (const auto& run : level.runs) {
                for (std::size_t i = 1; i < run.keys.size(); ++i)
                    if (run.keys[i - 1] >= run.keys[i]) return false;
            }
        return true;
    }

    // Entry capacity of one level: (T-1) * T^(i-1) * m_buf/E. Uses the
    // real-valued buffer entry count so the structural depth matches the
    // level formula of the cost model; only the flush trigger is floored.
    double level_capacity(int level) const {
        double t = double(cfg_.size_ratio());
        double buffer_entries = cfg_.tuning.buffer_bits(cfg_.sys) / cfg_.sys.entry_size_bits;
        return (t - 1.0) * std::pow(t, double(level - 1)) * buffer_entries;
    }

private:
    struct Run {
        std::vector<std::uint64_t> keys;      // strictly sorted, unique
        std::vector<std::uint64_t> page_mins; // smallest key per page
        BloomFilter filter;
    };

    struct Level {
        std::vector<Run> runs; // oldest first; probe newest (back) first
    };

    explicit SimTree(const SimConfig& cfg) : cfg_(cfg) {
        page_entries_ = std::size_t(cfg.sys.page_entries);
        model_levels_ = levels(cfg.sys, cfg.tuning);
        fill_filter_plan();
        levels_.resize(kMaxLevels);
    }

    // Bits per entry for a run resident at `level`, inverted from the
    // per-level false positive target of the cost model.
    void fill_filter_plan() {
        double t = double(cfg_.size_ratio());
        double scale =
            std::exp(-(cfg_.tuning.filter_bits / cfg_.sys.num_entries) * detail::kLn2Sq);
        double lead = std::pow(t, t / (t - 1.0));
        filter_bits_per_entry_.assign(kMaxLevels + 1, 0.0);
        for (int i = 1; i <= kMaxLevels; ++i) {
            double f = lead / std::pow(t, double(model_levels_ + 1 - i)) * scale;
            if (f >= 1.0) {
                filter_bits_per_entry_[std::size_t(i)] = 0.0;
            } else {
                double bits = -std::log(std::max(f, 1e-12)) / detail::kLn2Sq;
                filter_bits_per_entry_[std::size_t(i)] = std::min(bits, 64.0);
            }
        }
    }

    Run make_run(std::vector<std::uint64_t> keys, int level) {
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        Run run;
        run.filter = BloomFilter(keys.size(), filter_bits_per_entry_[std::size_t(level)],
                                 cfg_.seed ^ (0x9e3779b9ULL * std::uint64_t(next_run_id_++)));
        for (auto k : keys) run.filter.insert(k);
        run.page_mins.reserve(keys.size() / page_entries_ + 1);
        for (std::size_t i = 0; i < keys.size(); i += page_entries_)
            run.page_mins.push_back(keys[i]);
        run.keys = std::move(keys);
        return run;
    }

    std::size_t page_of(const Run& run, std::uint64_t key) const {
        auto it = std::upper_bound(run.page_mins.begin(), run.page_mins.end(), key);
        return std::size_t(it - run.page_mins.begin()) - 1;
    }

    bool page_contains(const Run& run, std::size_t page, std::uint64_t key) const {
        std::size_t b = page * page_entries_;
        std::size_t e = std::min(run.keys.size(), b + page_entries_);
        return std::binary_search(run.keys.begin() + long(b), run.keys.begin() + long(e), key);
    }

    long pages(std::size_t entries) const {
        return long((entries + page_entries_ - 1) / page_entries_);
    }

    IoDelta flush() {
        IoDelta delta;
        std::vector<std::uint64_t> batch(buffer_.begin(), buffer_.end());
        buffer_.clear();
        buffer_set_.clear();
        if (cfg_.tuning.policy == Policy::leveling) {
            // Flush writes the buffer; merging with a resident run reads it.
            Run incoming = make_run(std::move(batch), 1);
            delta += merge_into_level(1, std::move(incoming), /*charge_input_read=*/false);
        } else {
            delta.comp_writes += pages(batch.size());
            levels_[0].runs.push_back(make_run(std::move(batch), 1));
            delta += maybe_merge_tiers(1);
        }
        return delta;
    }

    // Leveling: sort-merge `incoming` with the run resident at `level`, then
    // cascade while the level exceeds its capacity.
    IoDelta merge_into_level(int level, Run incoming, bool charge_input_read) {
        IoDelta delta;
        if (level > kMaxLevels) throw FeasibilityError("compaction beyond the level cap");
        Level& lvl = levels_[std::size_t(level - 1)];
        if (charge_input_read) delta.comp_reads += pages(incoming.keys.size());
        std::vector<std::uint64_t> merged = std::move(incoming.keys);
        if (!lvl.runs.empty()) {
            delta.comp_reads += pages(lvl.runs.back().keys.size());
            auto& resident = lvl.runs.back().keys;
            std::vector<std::uint64_t> out;
            out.reserve(merged.size() + resident.size());
            std::merge(merged.begin(), merged.end(), resident.begin(), resident.end(),
                       std::back_inserter(out));
            out.erase(std::unique(out.begin(), out.end()), out.end());
            merged = std::move(out);
            lvl.runs.clear();
        }
        delta.comp_writes += pages(merged.size());
        lvl.runs.push_back(make_run(std::move(merged), level));
        if (double(entries_at(level)) > level_capacity(level)) {
            Run moving = std::move(lvl.runs.back());
            lvl.runs.clear();
            delta += merge_into_level(level + 1, std::move(moving), true);
        }
        return delta;
    }

    // Tiering: once a level accumulates T runs they merge into one run that
    // moves to the next level.
    IoDelta maybe_merge_tiers(int level) {
        IoDelta delta;
        if (level > kMaxLevels) throw FeasibilityError("compaction beyond the level cap");
        Level& lvl = levels_[std::size_t(level - 1)];
        if (long(lvl.runs.size()) < long(cfg_.size_ratio())) return delta;
        std::vector<std::uint64_t> merged;
        for (auto& run : lvl.runs) {
            delta.comp_reads += pages(run.keys.size());
            merged.insert(merged.end(), run.keys.begin(), run.keys.end());
        }
        lvl.runs.clear();
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        delta.comp_writes += pages(merged.size());
        if (level + 1 > kMaxLevels) throw FeasibilityError("compaction beyond the level cap");
        levels_[std::size_t(level)].runs.push_back(make_run(std::move(merged), level + 1));
        delta += maybe_merge_tiers(level + 1);
        return delta;
    }

    void place_level(int level, const std::vector<std::uint64_t>& pool, std::size_t offset,
                     std::size_t take) {
        double t = double(cfg_.size_ratio());
        Level& lvl = levels_[std::size_t(level - 1)];
        if (cfg_.tuning.policy == Policy::leveling) {
            lvl.runs.push_back(make_run({pool.begin() + long(offset),
                                         pool.begin() + long(offset + take)},
                                        level));
            return;
        }
        // Tiering: split into runs of one level-(i-1) output each.
        std::size_t run_size = std::size_t(
            std::max(1.0, std::pow(t, double(level - 1)) * double(cfg_.buffer_capacity())));
        std::size_t done = 0;
        while (done < take) {
            std::size_t chunk = std::min(run_size, take - done);
            lvl.runs.push_back(make_run({pool.begin() + long(offset + done),
                                         pool.begin() + long(offset + done + chunk)},
                                        level));
            done += chunk;
        }
    }

    std::vector<std::uint64_t> sample_fresh_keys(std::size_t n) {
        std::uint64_t domain = cfg_.domain();
        if (n > domain) throw FeasibilityError("key domain smaller than requested entry count");
        SplitMix64 rng(cfg_.seed);
        std::vector<std::uint64_t> keys;
        keys.reserve(n);
        while (keys.size() < n) {
            std::uint64_t k = rng.next_below(domain);
            if (key_set_.insert(k).second) keys.push_back(k);
        }
        all_keys_ = keys;
        // Shuffle so runs overlap in key range like real trees.
        for (std::size_t i = keys.size(); i > 1; --i)
            std::swap(keys[i - 1], keys[std::size_t(rng.next_below(i))]);
        return keys;
    }

    std::uint64_t draw_absent(SplitMix64& rng) const {
        for (;;) {
            std::uint64_t k = rng.next_below(cfg_.domain());
            if (!key_set_.count(k)) return k;
        }
    }

    std::uint64_t draw_present(SplitMix64& rng) const {
        return all_keys_[std::size_t(rng.next_below(all_keys_.size()))];
    }

    SimConfig cfg_;
    std::size_t page_entries_ = 1;
    int model_levels_ = 1;
    std::vector<double> filter_bits_per_entry_;
    std::vector<std::uint64_t> buffer_;
    std::unordered_set<std::uint64_t> buffer_set_;
    std::vector<Level> levels_;
    std::vector<std::uint64_t> all_keys_;
    std::unordered_set<std::uint64_t> key_set_;
    IoStats stats_;
    std::uint64_t next_run_id_ = 1;
};

} // namespace lsmtune::sim
