// Command-line front end: nominal/robust tuning, benchmark generation, the
// model-based sweep, and the desk-scale simulator. Every command resolves its
// parameters into a manifest that `replay` can re-execute byte for byte.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsmtune/evaluation.hpp"
#include "lsmtune/io.hpp"
#include "lsmtune/manifest.hpp"
#include "lsmtune/nominal_tuner.hpp"
#include "lsmtune/robust_tuner.hpp"
#include "lsmtune/sim/lsm_tree.hpp"
#include "lsmtune/sim/session.hpp"
#include "lsmtune/workloads.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

std::vector<double> parse_rho_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw std::invalid_argument("rho grid range must be lo:hi:step");
        for (double r = lo; r <= hi + 1e-12; r += step) grid.push_back(r);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    }
    if (grid.empty()) throw std::invalid_argument("empty rho grid");
    for (double r : grid)
        if (!(r >= 0)) throw std::invalid_argument("rho values must be >= 0");
    return grid;
}

std::vector<int> parse_catalog_spec(const std::string& spec) {
    std::vector<int> idx;
    if (spec == "all") {
        for (int i = 0; i < 15; ++i) idx.push_back(i);
        return idx;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int i = std::stoi(tok);
        if (i < 0 || i > 14) throw std::invalid_argument("catalog index out of range: " + tok);
        idx.push_back(i);
    }
    if (idx.empty()) throw std::invalid_argument("empty catalog selection");
    return idx;
}

lsmtune::Workload parse_workload(const std::string& spec) {
    std::array<double, 4> v{};
    std::stringstream ss(spec);
    std::string tok;
    std::size_t i = 0;
    while (std::getline(ss, tok, ',') && i < 4) v[i++] = std::stod(tok);
    if (i != 4) throw std::invalid_argument("workload must have four components");
    lsmtune::Workload w(v[0], v[1], v[2], v[3]);
    for (double x : w.p)
        if (!(x >= 0)) throw std::invalid_argument("workload components must be >= 0");
    if (std::abs(w.sum() - 1.0) > 1e-6)
        std::cerr << "warning: workload sums to " << w.sum() << "; renormalizing\n";
    return w.normalized();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write output file: " + path);
    return out;
}

// ---- tune -------------------------------------------------------------------

int cmd_tune(const json& params) {
    lsmtune::SystemParams sys = lsmtune::system_from_json(params.at("system"));
    auto wv = params.at("workload");
    lsmtune::Workload wkl(wv.at(0).get<double>(), wv.at(1).get<double>(),
                          wv.at(2).get<double>(), wv.at(3).get<double>());

    json out_json;
    if (params.at("nominal").get<bool>()) {
        auto r = lsmtune::tune_nominal(sys, wkl);
        out_json = lsmtune::tuning_to_json(sys, r.tuning, wkl, r.objective, 0.0, r.diagnostics);
        out_json["mode"] = "nominal";
    } else {
        double rho = params.at("rho").get<double>();
        auto r = lsmtune::tune_robust(sys, wkl, rho);
        out_json = lsmtune::tuning_to_json(sys, r.tuning, wkl, r.objective, rho, r.diagnostics);
        out_json["mode"] = "robust";
        out_json["worst_case_workload"] = {r.worst_workload.z0(), r.worst_workload.z1(),
                                           r.worst_workload.q(), r.worst_workload.w()};
        out_json["dual"] = {{"lambda", r.dual.lambda}, {"eta", r.dual.eta}};
    }

    std::string out_path = params.at("out").get<std::string>();
    std::cout << out_json.dump(2) << '\n';
    if (!out_path.empty()) {
        auto f = open_output(out_path);
        f << out_json.dump(2) << '\n';
        lsmtune::RunManifest m;
        m.command = "tune";
        m.params = params;
        m.outputs = {{"tuning", out_path}, {"manifest", out_path + ".manifest.json"}};
        m.write(out_path + ".manifest.json");
    }
    return kExitOk;
}

// ---- bench-gen ----------------------------------------------------------------

int cmd_bench_gen(const json& params) {
    int n = params.at("n").get<int>();
    std::uint64_t seed = params.at("seed").get<std::uint64_t>();
    std::int64_t max_count = params.at("max_count").get<std::int64_t>();
    std::string out_path = params.at("out").get<std::string>();

    auto bench = lsmtune::sample_benchmark(n, seed, max_count);
    auto f = open_output(out_path);
    lsmtune::write_benchmark_jsonl(bench, f);

    lsmtune::Workload uniform(0.25, 0.25, 0.25, 0.25);
    double mean_kl = 0.0;
    for (const auto& e : bench.entries) mean_kl += lsmtune::kl_divergence(e.workload, uniform);
    mean_kl /= double(bench.entries.size());
    std::cout << "n=" << n << " seed=" << seed << " rng=" << bench.rng
              << " mean_kl_vs_uniform=" << lsmtune::fmt_double(mean_kl) << '\n';

    lsmtune::RunManifest m;
    m.command = "bench-gen";
    m.params = params;
    m.outputs = {{"benchmark", out_path}, {"manifest", out_path + ".manifest.json"}};
    m.write(out_path + ".manifest.json");
    return kExitOk;
}

// ---- sweep -------------------------------------------------------------------

int cmd_sweep(const json& params) {
    lsmtune::SystemParams sys = lsmtune::system_from_json(params.at("system"));
    auto bench = lsmtune::load_benchmark(params.at("bench").get<std::string>());
    std::vector<double> rho_grid = params.at("rho_grid").get<std::vector<double>>();
    std::vector<int> catalog_idx = params.at("catalog").get<std::vector<int>>();
    int jobs = params.at("jobs").get<int>();
    std::string records_path = params.at("out_records").get<std::string>();
    std::string summary_path = params.at("out_summary").get<std::string>();

    std::vector<lsmtune::CatalogEntry> catalog;
    for (int i : catalog_idx) catalog.push_back(lsmtune::expected_catalog()[std::size_t(i)]);
    // Record rows carry the original catalog index, not the selection position.
    std::vector<int> remap = catalog_idx;

    auto records = open_output(records_path);
    records << lsmtune::kRecordsCsvHeader;
    auto sink = [&](const lsmtune::ComparisonRecord& r) {
        lsmtune::ComparisonRecord fixed = r;
        fixed.expected_idx = remap[std::size_t(r.expected_idx)];
        lsmtune::append_record_csv(records, fixed);
    };
    auto report = lsmtune::run_sweep(sys, catalog, rho_grid, bench, jobs, sink);

    auto summary = open_output(summary_path);
    summary << lsmtune::kSummaryCsvHeader;
    for (auto cell : report.cells) {
        cell.expected_idx = remap[std::size_t(cell.expected_idx)];
        lsmtune::append_summary_csv(summary, cell);
    }

    lsmtune::RunManifest m;
    m.command = "sweep";
    m.params = params;
    m.outputs = {{"records", records_path},
                 {"summary", summary_path},
                 {"manifest", records_path + ".manifest.json"}};
    m.write(records_path + ".manifest.json");
    std::cout << "cells=" << report.cells.size()
              << " records=" << report.cells.size() * bench.entries.size() << '\n';
    return kExitOk;
}

// ---- simulate ------------------------------------------------------------------

int cmd_simulate(const json& params) {
    lsmtune::SystemParams sys = lsmtune::system_from_json(params.at("system"));
    lsmtune::LoadedTuning lt = lsmtune::tuning_from_json(params.at("tuning"));
    std::uint64_t seed = params.at("seed").get<std::uint64_t>();
    double entries = params.at("entries").get<double>();
    if (entries > 0) sys.num_entries = entries;
    std::string out_path = params.at("out").get<std::string>();

    lsmtune::sim::SimConfig cfg;
    cfg.sys = sys;
    cfg.tuning = lt.tuning;
    cfg.seed = seed;
    if (params.contains("key_domain"))
        cfg.key_domain = params.at("key_domain").get<std::uint64_t>();

    auto out = open_output(out_path);
    out << "session_idx,template,source,z0,z1,q,w,kl,z0_io,z1_io,q_io,w_io,mean_io\n";

    auto sessions = params.at("sessions");
    if (!sessions.empty()) {
        auto tree = lsmtune::sim::SimTree::bulk_load(cfg, std::size_t(sys.num_entries));
        lsmtune::CostVector model = lsmtune::cost_vector(sys, lt.tuning);
        lsmtune::SplitMix64 rng(seed);
        int idx = 0;
        for (const auto& s : sessions) {
            auto tmpl = lsmtune::sim::session_template_from_string(
                s.at("template").get<std::string>());
            std::int64_t queries = s.at("queries").get<std::int64_t>();
            auto session_rng = rng.split(std::uint64_t(idx) + 1);
            auto counts = lsmtune::sim::session_counts(tmpl, queries, lt.workload, session_rng);
            double total = double(counts[0] + counts[1] + counts[2] + counts[3]);
            lsmtune::Workload mix(double(counts[0]) / total, double(counts[1]) / total,
                                  double(counts[2]) / total, double(counts[3]) / total);
            double kl = lsmtune::kl_divergence(mix, lt.workload);

            auto emit = [&](const char* source, double z0io, double z1io, double qio,
                            double wio, double mean) {
                out << idx << ',' << to_string(tmpl) << ',' << source << ','
                    << lsmtune::fmt_double(mix.z0()) << ',' << lsmtune::fmt_double(mix.z1())
                    << ',' << lsmtune::fmt_double(mix.q()) << ','
                    << lsmtune::fmt_double(mix.w()) << ',' << lsmtune::fmt_double(kl) << ','
                    << lsmtune::fmt_double(z0io) << ',' << lsmtune::fmt_double(z1io) << ','
                    << lsmtune::fmt_double(qio) << ',' << lsmtune::fmt_double(wio) << ','
                    << lsmtune::fmt_double(mean) << '\n';
            };

            emit("model", model.empty_point, model.nonempty_point, model.range_scan,
                 model.write, lsmtune::dot(mix, model));
            auto r = tree.run_session(counts, session_rng.next());
            double mean_measured =
                (double(counts[0]) * r.mean_io[0] + double(counts[1]) * r.mean_io[1] +
                 double(counts[2]) * r.mean_io[2] + double(counts[3]) * r.mean_io[3]) /
                total;
            emit("simulator", r.mean_io[0], r.mean_io[1], r.mean_io[2], r.mean_io[3],
                 mean_measured);
            ++idx;
        }
    }
    out.close();

    lsmtune::RunManifest m;
    m.command = "simulate";
    m.params = params;
    m.outputs = {{"sessions_csv", out_path}, {"manifest", out_path + ".manifest.json"}};
    m.write(out_path + ".manifest.json");
    return kExitOk;
}

int dispatch(const lsmtune::RunManifest& m) {
    if (m.command == "tune") return cmd_tune(m.params);
    if (m.command == "bench-gen") return cmd_bench_gen(m.params);
    if (m.command == "sweep") return cmd_sweep(m.params);
    if (m.command == "simulate") return cmd_simulate(m.params);
    throw std::invalid_argument("unknown command in manifest: " + m.command);
}

json load_sessions_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open sessions file: " + path);
    json j;
    in >> j;
    return j.at("sessions");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSM tree tuning under workload uncertainty"};
    app.require_subcommand(1);

    // tune
    auto* tune = app.add_subcommand("tune", "Tune for a fixed or uncertain workload");
    std::string tune_system, tune_workload, tune_out;
    std::string tune_memory;
    double tune_rho = -1.0;
    bool tune_nominal_flag = false;
    tune->add_option("system", tune_system, "System configuration JSON")->required();
    tune->add_option("--workload", tune_workload, "z0,z1,q,w proportions")->required();
    tune->add_option("--rho", tune_rho, "Uncertainty radius (KL divergence)");
    tune->add_flag("--nominal", tune_nominal_flag, "Solve the fixed-workload problem");
    tune->add_option("--out", tune_out, "Write the tuning JSON here as well");
    tune->add_option("--total-memory", tune_memory,
                     "Override total memory (B/KB/MB/GB suffixes, powers of 1024)");

    // bench-gen
    auto* bench = app.add_subcommand("bench-gen", "Sample a benchmark workload set");
    int bench_n = 2000;
    std::uint64_t bench_seed = 42;
    std::int64_t bench_max = 10000;
    std::string bench_out;
    bench->add_option("--n", bench_n, "Number of workloads (default 2000)");
    bench->add_option("--seed", bench_seed, "Generator seed");
    bench->add_option("--max-count", bench_max, "Upper bound for per-type query counts");
    bench->add_option("--out", bench_out, "Output JSON-lines file")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Compare nominal vs robust tunings over a benchmark");
    std::string sweep_system, sweep_bench, sweep_rho = "0:3.75:0.25", sweep_catalog = "all";
    std::string sweep_records = "records.csv", sweep_summary = "summary.csv";
    int sweep_jobs = 1;
    sweep->add_option("system", sweep_system, "System configuration JSON")->required();
    sweep->add_option("--bench", sweep_bench, "Benchmark JSON-lines file")->required();
    sweep->add_option("--rho-grid", sweep_rho, "Comma list or lo:hi:step");
    sweep->add_option("--catalog", sweep_catalog, "'all' or comma-separated indices 0..14");
    sweep->add_option("--out-records", sweep_records, "Per-comparison CSV");
    sweep->add_option("--out-summary", sweep_summary, "Per-cell summary CSV");
    sweep->add_option("--jobs", sweep_jobs, "Parallel cells (output order is unaffected)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Measure page I/O on the in-memory tree");
    std::string sim_system, sim_tuning, sim_sessions, sim_out = "sessions.csv";
    std::uint64_t sim_seed = 1;
    double sim_entries = 0;
    std::uint64_t sim_domain = 0;
    sim->add_option("system", sim_system, "System configuration JSON")->required();
    sim->add_option("--tuning", sim_tuning, "Tuning JSON produced by `tune`")->required();
    sim->add_option("--sessions", sim_sessions, "Sessions JSON file")->required();
    sim->add_option("--seed", sim_seed, "Simulation seed");
    sim->add_option("--entries", sim_entries, "Bulk-load entry count (overrides num_entries)");
    sim->add_option("--key-domain", sim_domain, "Key domain size (default 8x entries)");
    sim->add_option("--out", sim_out, "Output CSV");

    // replay
    auto* replay = app.add_subcommand("replay", "Re-execute a recorded run");
    std::string replay_manifest;
    replay->add_option("manifest", replay_manifest, "Manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (tune->parsed()) {
            if (tune_nominal_flag == (tune_rho >= 0.0))
                throw std::invalid_argument("pass exactly one of --nominal or --rho");
            auto sys = lsmtune::load_system(tune_system);
            if (!tune_memory.empty())
                sys.total_memory_bits = lsmtune::parse_memory_bits(tune_memory);
            auto wkl = parse_workload(tune_workload);
            json params = {{"system", lsmtune::system_to_json(sys)},
                           {"workload", {wkl.z0(), wkl.z1(), wkl.q(), wkl.w()}},
                           {"nominal", tune_nominal_flag},
                           {"out", tune_out}};
            if (!tune_nominal_flag) params["rho"] = tune_rho;
            return cmd_tune(params);
        }
        if (bench->parsed()) {
            if (bench_n < 1) throw std::invalid_argument("--n must be >= 1");
            json params = {{"n", bench_n},
                           {"seed", bench_seed},
                           {"max_count", bench_max},
                           {"out", bench_out}};
            return cmd_bench_gen(params);
        }
        if (sweep->parsed()) {
            auto sys = lsmtune::load_system(sweep_system);
            json params = {{"system", lsmtune::system_to_json(sys)},
                           {"bench", sweep_bench},
                           {"rho_grid", parse_rho_grid(sweep_rho)},
                           {"catalog", parse_catalog_spec(sweep_catalog)},
                           {"jobs", sweep_jobs},
                           {"out_records", sweep_records},
                           {"out_summary", sweep_summary}};
            return cmd_sweep(params);
        }
        if (sim->parsed()) {
            auto sys = lsmtune::load_system(sim_system);
            std::ifstream tf(sim_tuning);
            if (!tf) throw std::invalid_argument("cannot open tuning file: " + sim_tuning);
            json tuning_json;
            tf >> tuning_json;
            json params = {{"system", lsmtune::system_to_json(sys)},
                           {"tuning", tuning_json},
                           {"sessions", load_sessions_file(sim_sessions)},
                           {"seed", sim_seed},
                           {"entries", sim_entries},
                           {"key_domain", sim_domain},
                           {"out", sim_out}};
            return cmd_simulate(params);
        }
        if (replay->parsed()) {
            return dispatch(lsmtune::RunManifest::load(replay_manifest));
        }
    } catch (const lsmtune::FeasibilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
