#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lsmtune/evaluation.hpp"
#include "lsmtune/nominal_tuner.hpp"
#include "lsmtune/robust_tuner.hpp"
#include "lsmtune/types.hpp"
#include "lsmtune/workloads.hpp"

namespace lsmtune {

inline constexpr const char* kToolVersion = "0.1.0";

// Fixed-width-free, round-trip-stable formatting for CSV output.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---- system configuration -------------------------------------------------

// Keys: total_memory_bytes, entry_size_bytes, page_size_bytes, num_entries,
// rw_asymmetry, range_selectivity. Page capacity is derived as
// page_size / entry_size with integer division.
inline SystemParams system_from_json(const nlohmann::json& j) {
    SystemParams sys;
    double total_bytes = j.at("total_memory_bytes").get<double>();
    double entry_bytes = j.at("entry_size_bytes").get<double>();
    double page_bytes = j.at("page_size_bytes").get<double>();
    if (!(entry_bytes > 0)) throw std::invalid_argument("entry_size_bytes must be positive");
    sys.total_memory_bits = total_bytes * 8.0;
    sys.entry_size_bits = entry_bytes * 8.0;
    sys.page_entries = std::floor(page_bytes / entry_bytes);
    if (!(sys.page_entries >= 1))
        throw std::invalid_argument("page must hold at least one entry");
    sys.num_entries = j.at("num_entries").get<double>();
    sys.rw_asymmetry = j.at("rw_asymmetry").get<double>();
    sys.range_selectivity = j.at("range_selectivity").get<double>();
    sys.validate();
    return sys;
}

inline nlohmann::json system_to_json(const SystemParams& sys) {
    return {
        {"total_memory_bytes", sys.total_memory_bits / 8.0},
        {"entry_size_bytes", sys.entry_size_bits / 8.0},
        {"page_size_bytes", sys.page_entries * sys.entry_size_bits / 8.0},
        {"num_entries", sys.num_entries},
        {"rw_asymmetry", sys.rw_asymmetry},
        {"range_selectivity", sys.range_selectivity},
    };
}

inline SystemParams load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open system config: " + path);
    nlohmann::json j;
    in >> j;
    return system_from_json(j);
}

// Parse "1024", "64KB", "10MB", "1GB" (powers of 1024) into bits.
inline double parse_memory_bits(const std::string& text) {
    std::size_t pos = 0;
    double value = std::stod(text, &pos);
    std::string unit = text.substr(pos);
    double bytes = value;
    if (unit == "" || unit == "B") bytes = value;
    else if (unit == "KB") bytes = value * 1024.0;
    else if (unit == "MB") bytes = value * 1024.0 * 1024.0;
    else if (unit == "GB") bytes = value * 1024.0 * 1024.0 * 1024.0;
    else throw std::invalid_argument("unknown memory unit: " + unit);
    return bytes * 8.0;
}

// ---- tunings ----------------------------------------------------------------

inline nlohmann::json tuning_to_json(const SystemParams& sys, const Tuning& tun,
                                     const Workload& wkl, double objective, double rho,
                                     const SolverDiagnostics& diag) {
    return {
        {"policy", to_string(tun.policy)},
        {"T_continuous", tun.size_ratio},
        {"T_deployed", tun.deployed_size_ratio()},
        {"m_filt_bytes", tun.filter_bits / 8.0},
        {"m_buf_bytes", tun.buffer_bits(sys) / 8.0},
        {"objective", objective},
        {"objective_deployed", deployed_cost(wkl, sys, tun)},
        {"rho", rho},
        {"workload", {wkl.z0(), wkl.z1(), wkl.q(), wkl.w()}},
        {"diagnostics",
         {{"iterations", diag.iterations},
          {"restarts", diag.restarts},
          {"converged", diag.converged},
          {"grid_best", diag.grid_best},
          {"size_ratio_max", diag.size_ratio_max},
          {"filter_bits_max", diag.filter_bits_max}}},
    };
}

struct LoadedTuning {
    Tuning tuning;         // with the deployed integer size ratio
    Tuning continuous;     // as optimized
    Workload workload;     // workload the tuning was computed for
    double rho = 0.0;
};

inline LoadedTuning tuning_from_json(const nlohmann::json& j) {
    LoadedTuning lt;
    lt.continuous.policy = policy_from_string(j.at("policy").get<std::string>());
    lt.continuous.size_ratio = j.at("T_continuous").get<double>();
    lt.continuous.filter_bits = j.at("m_filt_bytes").get<double>() * 8.0;
    lt.tuning = lt.continuous;
    lt.tuning.size_ratio = j.at("T_deployed").get<double>();
    auto w = j.at("workload");
    lt.workload = Workload(w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
                           w.at(3).get<double>());
    lt.rho = j.value("rho", 0.0);
    return lt;
}

inline LoadedTuning load_tuning(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open tuning file: " + path);
    nlohmann::json j;
    in >> j;
    return tuning_from_json(j);
}

// ---- benchmark sets (JSON lines) -------------------------------------------

inline void write_benchmark_jsonl(const BenchmarkSet& set, std::ostream& out) {
    for (const auto& e : set.entries) {
        nlohmann::json j = {
            {"index", e.index},
            {"seed", set.seed},
            {"rng", set.rng},
            {"counts", e.counts},
            {"workload", {e.workload.z0(), e.workload.z1(), e.workload.q(), e.workload.w()}},
        };
        out << j.dump() << '\n';
    }
}

inline BenchmarkSet read_benchmark_jsonl(std::istream& in) {
    BenchmarkSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        BenchEntry e;
        e.index = j.at("index").get<int>();
        set.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("rng")) set.rng = j.at("rng").get<std::string>();
        for (std::size_t k = 0; k < 4; ++k) {
            e.counts[k] = j.at("counts").at(k).get<std::int64_t>();
            e.workload[k] = j.at("workload").at(k).get<double>();
        }
        set.entries.push_back(e);
    }
    return set;
}

inline BenchmarkSet load_benchmark(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open benchmark file: " + path);
    return read_benchmark_jsonl(in);
}

// ---- sweep CSV ---------------------------------------------------------------

inline const char* kRecordsCsvHeader =
    "expected_idx,rho,z0,z1,q,w,cost_nominal,cost_robust,delta,kl\n";

inline void append_record_csv(std::ostream& out, const ComparisonRecord& r) {
    out << r.expected_idx << ',' << fmt_double(r.rho) << ',' << fmt_double(r.workload.z0())
        << ',' << fmt_double(r.workload.z1()) << ',' << fmt_double(r.workload.q()) << ','
        << fmt_double(r.workload.w()) << ',' << fmt_double(r.cost_nominal) << ','
        << fmt_double(r.cost_robust) << ',' << fmt_double(r.delta) << ',' << fmt_double(r.kl)
        << '\n';
}

inline const char* kSummaryCsvHeader =
    "expected_idx,rho,category,mean_delta,theta_nominal,theta_robust,mean_kl,"
    "nominal_policy,nominal_T,nominal_mfilt_bits,robust_policy,robust_T,robust_mfilt_bits\n";

inline void append_summary_csv(std::ostream& out, const SweepCell& c) {
    out << c.expected_idx << ',' << fmt_double(c.rho) << ',' << to_string(c.category) << ','
        << fmt_double(c.mean_delta) << ',' << fmt_double(c.theta_nominal) << ','
        << fmt_double(c.theta_robust) << ',' << fmt_double(c.mean_kl) << ','
        << to_string(c.nominal_tuning.policy) << ',' << fmt_double(c.nominal_tuning.size_ratio)
        << ',' << fmt_double(c.nominal_tuning.filter_bits) << ','
        << to_string(c.robust_tuning.policy) << ',' << fmt_double(c.robust_tuning.size_ratio)
        << ',' << fmt_double(c.robust_tuning.filter_bits) << '\n';
}

} // namespace lsmtune
