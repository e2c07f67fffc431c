#pragma once

// Subcommand implementations for the knnidx tool. Each returns a process exit
// code and writes human-readable key=value lines to `out`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "knnidx/knnidx.hpp"

namespace knnidx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerifyFailed = 2;

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Where the graph comes from: a DIMACS file, or a generated grid "RxC".
struct GraphSource {
    std::string path;
    std::string grid;
    std::uint64_t seed = 1;
    Weight max_weight = 100;

    RoadNetwork load() const {
        if (!path.empty()) return load_dimacs_gr(path);
        if (!grid.empty()) {
            const auto x = grid.find('x');
            if (x == std::string::npos) throw UsageError("--grid expects ROWSxCOLS, got '" + grid + "'");
            const auto rows = detail::parse_int<std::size_t>(std::string_view(grid).substr(0, x));
            const auto cols = detail::parse_int<std::size_t>(std::string_view(grid).substr(x + 1));
            if (!rows || !cols) throw UsageError("--grid expects ROWSxCOLS, got '" + grid + "'");
            return generate_grid(*rows, *cols, {1, max_weight}, seed);
        }
        throw UsageError("no graph given: pass --graph <path.gr> or --grid ROWSxCOLS");
    }
};

inline BuildAlgorithm parse_algorithm(const std::string& name) {
    if (name == "bidirectional") return BuildAlgorithm::bidirectional;
    if (name == "bottomup" || name == "bottom-up") return BuildAlgorithm::bottom_up;
    throw UsageError("unknown algorithm '" + name + "' (expected bottomup or bidirectional)");
}

inline const char* algorithm_name(BuildAlgorithm a) {
    return a == BuildAlgorithm::bottom_up ? "bottomup" : "bidirectional";
}

/// Minimal CSV writer; the header is written on construction.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::initializer_list<std::string_view> columns) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open CSV output: " + path);
        bool first = true;
        for (auto c : columns) {
            out_ << (first ? "" : ",") << c;
            first = false;
        }
        out_ << '\n';
    }

    template <typename... T>
    void row(const T&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cells, first = false), ...);
        out_ << '\n';
        if (!out_) throw std::runtime_error("CSV write failed");
    }

private:
    std::ofstream out_;
};

// ---------------------------------------------------------------- build

struct BuildOptions {
    GraphSource graph;
    std::string objects;
    double density = 0.005;
    std::size_t k = 20;
    std::string algorithm = "bidirectional";
    std::string bundle;
    std::string csv;
    bool eta = false;
};

inline int cmd_build(const BuildOptions& opt, std::ostream& out) {
    const auto algo = parse_algorithm(opt.algorithm);
    const auto g = opt.graph.load();
    auto objects = opt.objects.empty() ? sample_objects(g, opt.density, opt.graph.seed)
                                       : load_objects(opt.objects, g.num_vertices());
    const auto start = Clock::now();
    auto built = build_knn_index(g, objects, opt.k, algo);
    const double build_ms = elapsed_ms(start);
    if (opt.eta && algo == BuildAlgorithm::bidirectional) built.stats.eta = compute_eta(built.bn);
    auto bundle = make_bundle(g, std::move(built), std::move(objects), algo);
    if (!opt.bundle.empty()) save_bundle(opt.bundle, bundle);

    const auto& s = bundle.stats;
    const auto ibytes = index_bytes(bundle.index);
    const auto bbytes = predicted_bundle_size(bundle);
    out << "algorithm=" << algorithm_name(algo) << "\nn=" << g.num_vertices() << "\nm=" << g.num_edges()
        << "\nk=" << opt.k << "\nobjects=" << bundle.objects.size() << "\nbuild_ms=" << std::fixed
        << std::setprecision(3) << build_ms << std::defaultfloat << "\nrho=" << s.graph.rho << "\ntau=" << s.graph.tau
        << "\ntau_prime=" << s.graph.tau_prime << "\neta=" << (s.eta ? std::to_string(s.eta) : "n/a")
        << "\nbn_edges=" << bundle.bn.num_edges() << "\nsssp_invocations=" << s.sssp_invocations
        << "\nindex_entries=" << bundle.index.total_entries() << "\nindex_bytes=" << ibytes
        << "\nbundle_bytes=" << bbytes << '\n';
    if (!opt.csv.empty()) {
        CsvWriter csv(opt.csv, {"algorithm", "n", "m", "k", "objects", "build_ms", "rho", "tau", "tau_prime", "eta",
                                "sssp_invocations", "index_bytes", "bundle_bytes"});
        csv.row(algorithm_name(algo), g.num_vertices(), g.num_edges(), opt.k, bundle.objects.size(), build_ms,
                s.graph.rho, s.graph.tau, s.graph.tau_prime, s.eta, s.sssp_invocations, ibytes, bbytes);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- query

struct QueryStats {
    std::size_t queries = 0;
    double mean_ns = 0;
    double p50_ns = 0;
    double p99_ns = 0;
    double touches_per_query = 0;
};

/// Times `repeat` passes over `queries` after one untimed warmup pass. The mean
/// comes from whole-pass timing; percentiles from per-query timing.
inline QueryStats bench_queries(const KnnIndex& index, std::span<const Vertex> queries, std::size_t k,
                                std::size_t repeat, std::size_t threads = 1) {
    QueryStats st;
    if (queries.empty()) return st;
    repeat = std::max<std::size_t>(repeat, 1);
    threads = std::max<std::size_t>(threads, 1);
    std::vector<KnnEntry> sink;
    for (Vertex q : queries) knn_query_into(index, q, k, sink);

    struct Slot {
        double total_ns = 0;
        std::uint64_t touches = 0;
        std::vector<double> samples;
    };
    std::vector<Slot> slots(threads);
    auto work = [&](std::size_t t) {
        Slot& slot = slots[t];
        std::vector<KnnEntry> buf;
        TouchCounter touches;
        for (std::size_t r = 0; r < repeat; ++r) {
            const auto start = Clock::now();
            for (std::size_t i = t; i < queries.size(); i += threads) knn_query_into(index, queries[i], k, buf, &touches);
            slot.total_ns += std::chrono::duration<double, std::nano>(Clock::now() - start).count();
        }
        for (std::size_t i = t; i < queries.size(); i += threads) {
            const auto start = Clock::now();
            knn_query_into(index, queries[i], k, buf);
            slot.samples.push_back(std::chrono::duration<double, std::nano>(Clock::now() - start).count());
        }
        slot.touches = touches.entries;
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    std::vector<double> samples;
    double total = 0;
    std::uint64_t touches = 0;
    for (auto& s : slots) {
        total += s.total_ns;
        touches += s.touches;
        samples.insert(samples.end(), s.samples.begin(), s.samples.end());
    }
    std::sort(samples.begin(), samples.end());
    auto pct = [&](double p) {
        const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size()))) - 1;
        return samples[std::min(idx, samples.size() - 1)];
    };
    const double executed = static_cast<double>(queries.size() * repeat);
    st.queries = queries.size();
    st.mean_ns = total / executed;
    st.p50_ns = pct(0.50);
    st.p99_ns = pct(0.99);
    st.touches_per_query = static_cast<double>(touches) / executed;
    return st;
}

inline std::vector<Vertex> random_queries(std::size_t n, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vertex> q(count);
    for (auto& v : q) v = static_cast<Vertex>(rng.below(n));
    return q;
}

/// One 1-based vertex id per line; '#' comments and blank lines ignored.
inline std::vector<Vertex> load_vertex_list(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open query file: " + path);
    std::vector<Vertex> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        const auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        const auto id = detail::parse_int<std::int64_t>(tok[0]);
        if (tok.size() != 1 || !id || *id < 1 || *id > static_cast<std::int64_t>(n))
            throw ParseError(lineno, "bad vertex id '" + std::string(line) + "'");
        out.push_back(static_cast<Vertex>(*id - 1));
    }
    return out;
}

struct QueryOptions {
    std::string bundle;
    std::string queries;
    std::size_t count = 10000;
    std::uint64_t seed = 1;
    std::size_t k = 0;  // 0: the index's k
    std::size_t repeat = 1;
    std::size_t threads = 1;
    std::optional<std::size_t> vertex;  // 1-based; prints that vertex's answer
    std::string csv;
};

inline int cmd_query(const QueryOptions& opt, std::ostream& out) {
    const auto b = load_bundle(opt.bundle);
    const std::size_t k = opt.k ? opt.k : b.k();
    if (opt.vertex) {
        if (*opt.vertex < 1 || *opt.vertex > b.num_vertices())
            throw UsageError("unknown vertex " + std::to_string(*opt.vertex));
        TouchCounter touches;
        const auto answer = knn_query(b.index, static_cast<Vertex>(*opt.vertex - 1), k, &touches);
        out << "vertex=" << *opt.vertex << "\n";
        for (const auto& e : answer) out << "  object=" << e.object + 1 << " distance=" << e.distance << '\n';
        out << "touched=" << touches.entries << '\n';
        return kExitOk;
    }
    const auto queries = opt.queries.empty() ? random_queries(b.num_vertices(), opt.count, opt.seed)
                                             : load_vertex_list(opt.queries, b.num_vertices());
    if (queries.empty()) throw UsageError("no queries to run");
    const auto st = bench_queries(b.index, queries, k, opt.repeat, opt.threads);
    const double mu = b.objects.density();
    out << "queries=" << st.queries << "\nk=" << k << "\nn=" << b.num_vertices() << "\ndensity=" << mu
        << "\nthreads=" << opt.threads << "\nmean_ns=" << st.mean_ns << "\np50_ns=" << st.p50_ns
        << "\np99_ns=" << st.p99_ns << "\ntouches_per_query=" << st.touches_per_query << '\n';
    if (!opt.csv.empty()) {
        CsvWriter csv(opt.csv, {"k", "density", "n", "mean_ns", "p50_ns", "p99_ns", "touches"});
        csv.row(k, mu, b.num_vertices(), st.mean_ns, st.p50_ns, st.p99_ns, st.touches_per_query);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- update

struct UpdateOp {
    bool insert;
    Vertex vertex;
};

/// Lines "+<id>" or "-<id>" with 1-based ids; '#' comments and blanks ignored.
inline std::vector<UpdateOp> parse_update_script(std::istream& in, std::size_t n) {
    std::vector<UpdateOp> ops;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        const auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() != 1 || tok[0].size() < 2 || (tok[0][0] != '+' && tok[0][0] != '-'))
            throw ParseError(lineno, "expected +<id> or -<id>");
        const auto id = detail::parse_int<std::int64_t>(tok[0].substr(1));
        if (!id || *id < 1 || *id > static_cast<std::int64_t>(n))
            throw ParseError(lineno, "vertex id out of range: " + std::string(tok[0].substr(1)));
        ops.push_back({tok[0][0] == '+', static_cast<Vertex>(*id - 1)});
    }
    return ops;
}

struct UpdateOptions {
    std::string bundle;
    std::string script;
    std::string out_bundle;  // default: overwrite --bundle
    std::string objects;     // optional: write the final object list here
    std::string csv;         // one row per operation
};

inline int cmd_update(const UpdateOptions& opt, std::ostream& out) {
    auto b = load_bundle(opt.bundle);
    std::ifstream script(opt.script);
    if (!script) throw std::runtime_error("cannot open update script: " + opt.script);
    const auto ops = parse_update_script(script, b.num_vertices());

    std::optional<CsvWriter> csv;
    if (!opt.csv.empty())
        csv.emplace(opt.csv,
                    std::initializer_list<std::string_view>{"op", "vertex", "latency_ns", "affected", "frontier_visits"});
    IndexMaintainer maint(b.bn, b.partial, b.index, b.objects);
    std::vector<double> latency;
    std::vector<std::size_t> delta;
    std::size_t inserts = 0, deletes = 0;
    for (const auto& op : ops) {
        const auto start = Clock::now();
        const auto r = op.insert ? maint.insert(op.vertex) : maint.erase(op.vertex);
        const double ns = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
        latency.push_back(ns);
        delta.push_back(r.affected_count);
        (op.insert ? inserts : deletes) += 1;
        if (csv) csv->row(op.insert ? "insert" : "delete", op.vertex + 1, ns, r.affected_count, r.frontier_visits);
    }
    if (!ops.empty()) b.flags |= kFlagUpdated;
    save_bundle(opt.out_bundle.empty() ? opt.bundle : opt.out_bundle, b);
    if (!opt.objects.empty()) {
        std::ofstream o(opt.objects);
        if (!o) throw std::runtime_error("cannot write objects: " + opt.objects);
        write_objects(o, b.objects);
    }

    const double count = std::max<double>(1.0, static_cast<double>(ops.size()));
    const double mean_ns = std::accumulate(latency.begin(), latency.end(), 0.0) / count;
    const double mean_delta = static_cast<double>(std::accumulate(delta.begin(), delta.end(), std::size_t{0})) / count;
    const auto max_delta = delta.empty() ? 0 : *std::max_element(delta.begin(), delta.end());
    out << "operations=" << ops.size() << "\ninserts=" << inserts << "\ndeletes=" << deletes
        << "\nmean_latency_ns=" << mean_ns << "\nmean_affected=" << mean_delta << "\nmax_affected=" << max_delta
        << "\nobjects=" << b.objects.size() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
    std::string bundle;
    GraphSource graph;
    std::string objects;
    std::uint64_t seed = 1;
};

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
    const auto g = opt.graph.load();
    Bundle b;
    try {
        b = load_bundle(opt.bundle, g);
    } catch (const BundleError& e) {
        if (e.kind() != BundleError::Kind::fingerprint) throw;
        out << "FAIL fingerprint: " << e.what() << '\n';
        return kExitVerifyFailed;
    }
    bool ok = true;
    if (!opt.objects.empty()) {
        const auto expected = load_objects(opt.objects, g.num_vertices());
        if (!(expected == b.objects)) {
            out << "FAIL objects: bundle holds " << b.objects.size() << " objects, file lists " << expected.size()
                << " (sets differ)\n";
            ok = false;
        }
    }
    BnVerifyOptions bo;
    bo.seed = opt.seed;
    const auto bn_report = verify_bn_graph(g, b.bn, bo);
    out << (bn_report.ok() ? "PASS" : "FAIL") << " bn-graph: " << bn_report.summary() << '\n';
    ok &= bn_report.ok();

    const auto partial = compute_partial_knn(b.bn, b.objects, b.k());
    const bool partial_ok = partial == b.partial;
    out << (partial_ok ? "PASS" : "FAIL") << " partial-lists: " << (partial_ok ? "match a recomputation" : "stale")
        << '\n';
    ok &= partial_ok;

    const auto report = verify_index(g, b.objects, b.k(), b.index);
    out << (report.ok() ? "PASS" : "FAIL") << " index: " << report.summary() << '\n';
    ok &= report.ok();
    return ok ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
    std::string experiment = "all";  // all | k | density | grid | build | update
    std::string csv = "sweep";       // file for one experiment, prefix for all
    std::size_t rows = 100;
    std::size_t cols = 100;
    std::size_t cells = 10;
    std::size_t k = 20;
    double density = 0.005;
    std::uint64_t seed = 1;
    std::size_t queries = 10000;
    std::size_t updates = 1000;
    std::string algorithm = "bidirectional";
};

inline const std::vector<std::size_t>& sweep_k_values() {
    static const std::vector<std::size_t> v{10, 20, 30, 40, 60, 80, 100};
    return v;
}
inline const std::vector<double>& sweep_density_values() {
    static const std::vector<double> v{0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05, 0.1, 0.5};
    return v;
}

namespace detail {

inline std::string sweep_path(const SweepOptions& opt, const std::string& name) {
    return opt.experiment == "all" ? opt.csv + "_" + name + ".csv" : opt.csv;
}

struct Timed {
    Bundle bundle;
    double build_ms;
};

inline Timed timed_build(const RoadNetwork& g, double density, std::size_t k, std::uint64_t seed,
                         BuildAlgorithm algo) {
    auto objects = sample_objects(g, density, seed);
    const auto start = Clock::now();
    auto built = build_knn_index(g, objects, k, algo);
    const double ms = elapsed_ms(start);
    return {make_bundle(g, std::move(built), std::move(objects), algo), ms};
}

inline void sweep_k(const SweepOptions& opt, std::ostream& out) {
    const auto g = generate_grid(opt.rows, opt.cols, {1, 100}, opt.seed);
    CsvWriter csv(sweep_path(opt, "k"), {"k", "density", "n", "build_ms", "index_bytes", "mean_ns", "p50_ns",
                                         "p99_ns", "touches"});
    const auto queries = random_queries(g.num_vertices(), opt.queries, opt.seed);
    for (std::size_t k : sweep_k_values()) {
        auto t = timed_build(g, opt.density, k, opt.seed, parse_algorithm(opt.algorithm));
        const auto st = bench_queries(t.bundle.index, queries, k, 3);
        csv.row(k, opt.density, g.num_vertices(), t.build_ms, index_bytes(t.bundle.index), st.mean_ns, st.p50_ns,
                st.p99_ns, st.touches_per_query);
        out << "k=" << k << " build_ms=" << t.build_ms << " mean_ns=" << st.mean_ns << '\n';
    }
}

inline void sweep_density(const SweepOptions& opt, std::ostream& out) {
    const auto g = generate_grid(opt.rows, opt.cols, {1, 100}, opt.seed);
    CsvWriter csv(sweep_path(opt, "density"), {"k", "density", "objects", "n", "build_ms", "index_bytes", "mean_ns",
                                               "p50_ns", "p99_ns", "touches"});
    const auto queries = random_queries(g.num_vertices(), opt.queries, opt.seed);
    for (double mu : sweep_density_values()) {
        auto t = timed_build(g, mu, opt.k, opt.seed, parse_algorithm(opt.algorithm));
        const auto st = bench_queries(t.bundle.index, queries, opt.k, 3);
        csv.row(opt.k, mu, t.bundle.objects.size(), g.num_vertices(), t.build_ms, index_bytes(t.bundle.index),
                st.mean_ns, st.p50_ns, st.p99_ns, st.touches_per_query);
        out << "density=" << mu << " build_ms=" << t.build_ms << " mean_ns=" << st.mean_ns << '\n';
    }
}

inline void sweep_grid(const SweepOptions& opt, std::ostream& out) {
    if (opt.cells < 1 || opt.cells > 10) throw UsageError("--cells must be in [1, 10]");
    CsvWriter csv(sweep_path(opt, "grid"), {"cells", "n", "m", "k", "density", "build_ms", "rho", "tau",
                                            "tau_prime", "bn_edges", "index_bytes"});
    for (std::size_t c = 1; c <= opt.cells; ++c) {
        const auto g = grid_cells(opt.rows, opt.cols, c, {1, 100}, opt.seed);
        auto t = timed_build(g, opt.density, opt.k, opt.seed, parse_algorithm(opt.algorithm));
        const auto& s = t.bundle.stats.graph;
        csv.row(c, g.num_vertices(), g.num_edges(), opt.k, opt.density, t.build_ms, s.rho, s.tau, s.tau_prime,
                t.bundle.bn.num_edges(), index_bytes(t.bundle.index));
        out << "cells=" << c << " n=" << g.num_vertices() << " build_ms=" << t.build_ms << '\n';
    }
}

inline void sweep_build(const SweepOptions& opt, std::ostream& out) {
    CsvWriter csv(sweep_path(opt, "build"), {"algorithm", "n", "k", "density", "build_ms", "sssp_invocations",
                                             "eta", "max_candidate_set"});
    for (std::size_t side : {std::size_t{32}, std::size_t{64}, std::size_t{100}}) {
        if (side > std::max(opt.rows, opt.cols)) break;
        const auto g = generate_grid(side, side, {1, 100}, opt.seed);
        for (auto algo : {BuildAlgorithm::bottom_up, BuildAlgorithm::bidirectional}) {
            auto t = timed_build(g, opt.density, opt.k, opt.seed, algo);
            const auto& s = t.bundle.stats;
            csv.row(algorithm_name(algo), g.num_vertices(), opt.k, opt.density, t.build_ms, s.sssp_invocations, s.eta,
                    s.max_candidate_set);
            out << algorithm_name(algo) << " n=" << g.num_vertices() << " build_ms=" << t.build_ms << '\n';
        }
    }
}

inline void sweep_update(const SweepOptions& opt, std::ostream& out) {
    const auto g = generate_grid(opt.rows, opt.cols, {1, 100}, opt.seed);
    CsvWriter csv(sweep_path(opt, "update"), {"k", "density", "n", "updates", "insert_mean_ns", "delete_mean_ns",
                                              "mean_affected", "max_affected"});
    for (double mu : sweep_density_values()) {
        auto t = timed_build(g, mu, opt.k, opt.seed, BuildAlgorithm::bidirectional);
        auto& b = t.bundle;
        IndexMaintainer maint(b.bn, b.partial, b.index, b.objects);
        Rng rng(opt.seed + 17);
        double ins_ns = 0, del_ns = 0;
        std::size_t ins = 0, del = 0, affected = 0, max_affected = 0;
        // Alternate delete-then-insert so density stays put.
        for (std::size_t i = 0; i < opt.updates; ++i) {
            const bool remove = i % 2 == 0 && b.objects.size() > 1;
            Vertex v;
            if (remove) {
                v = b.objects.members()[rng.below(b.objects.size())];
            } else {
                do v = static_cast<Vertex>(rng.below(g.num_vertices()));
                while (b.objects.contains(v) && b.objects.size() < g.num_vertices());
                if (b.objects.contains(v)) continue;
            }
            const auto start = Clock::now();
            const auto r = remove ? maint.erase(v) : maint.insert(v);
            const double ns = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
            (remove ? del_ns : ins_ns) += ns;
            (remove ? del : ins) += 1;
            affected += r.affected_count;
            max_affected = std::max(max_affected, r.affected_count);
        }
        const auto total = std::max<std::size_t>(1, ins + del);
        csv.row(opt.k, mu, g.num_vertices(), ins + del, ins ? ins_ns / ins : 0.0, del ? del_ns / del : 0.0,
                static_cast<double>(affected) / total, max_affected);
        out << "density=" << mu << " updates=" << ins + del << '\n';
    }
}

}  // namespace detail

inline int cmd_sweep(const SweepOptions& opt, std::ostream& out) {
    const std::vector<std::string> known{"k", "density", "grid", "build", "update"};
    if (opt.experiment != "all" && std::find(known.begin(), known.end(), opt.experiment) == known.end())
        throw UsageError("unknown experiment '" + opt.experiment + "'");
    auto want = [&](const char* name) { return opt.experiment == "all" || opt.experiment == name; };
    if (want("k")) detail::sweep_k(opt, out);
    if (want("density")) detail::sweep_density(opt, out);
    if (want("grid")) detail::sweep_grid(opt, out);
    if (want("build")) detail::sweep_build(opt, out);
    if (want("update")) detail::sweep_update(opt, out);
    return kExitOk;
}

// ---------------------------------------------------------------- entry point

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"k-nearest-neighbour index for road networks"};
    app.require_subcommand(1);

    BuildOptions build;
    auto* b = app.add_subcommand("build", "build an index and save it as a bundle");
    b->add_option("--graph", build.graph.path, "DIMACS .gr file");
    b->add_option("--grid", build.graph.grid, "generate a ROWSxCOLS grid instead of reading a file");
    b->add_option("--objects", build.objects, "object list (1-based ids); default: sample by --density");
    b->add_option("--density", build.density, "object density for sampling")->check(CLI::Range(0.0, 1.0));
    b->add_option("--seed", build.graph.seed, "seed for generated graphs and sampled objects");
    b->add_option("--k", build.k, "list length")->check(CLI::Range(1, 65535));
    b->add_option("--algorithm", build.algorithm, "bottomup | bidirectional");
    b->add_option("--bundle", build.bundle, "output bundle path");
    b->add_option("--csv", build.csv, "write one CSV row of build statistics");
    b->add_flag("--eta", build.eta, "also compute eta for the bidirectional builder");

    QueryOptions query;
    auto* q = app.add_subcommand("query", "answer or benchmark kNN queries from a bundle");
    q->add_option("--bundle", query.bundle, "bundle path")->required();
    q->add_option("--queries", query.queries, "file of 1-based query vertices");
    q->add_option("--count", query.count, "random query count when no file is given");
    q->add_option("--seed", query.seed, "seed for random queries");
    q->add_option("--k", query.k, "k' (default: the bundle's k)");
    q->add_option("--repeat", query.repeat, "timed passes over the query set");
    q->add_option("--threads", query.threads, "concurrent reader threads")->check(CLI::Range(1, 256));
    q->add_option("--vertex", query.vertex, "print the answer for one 1-based vertex");
    q->add_option("--csv", query.csv, "write one CSV row (k, density, n, mean_ns, ...)");

    UpdateOptions update;
    auto* u = app.add_subcommand("update", "apply +id / -id object updates to a bundle");
    u->add_option("--bundle", update.bundle, "bundle path")->required();
    u->add_option("--script", update.script, "update script")->required();
    u->add_option("--out", update.out_bundle, "write the updated bundle here instead of in place");
    u->add_option("--objects", update.objects, "write the final object list here");
    u->add_option("--csv", update.csv, "per-operation CSV");

    VerifyOptions verify;
    auto* v = app.add_subcommand("verify", "check a bundle against brute-force shortest paths");
    v->add_option("--bundle", verify.bundle, "bundle path")->required();
    v->add_option("--graph", verify.graph.path, "DIMACS .gr file the bundle was built from");
    v->add_option("--grid", verify.graph.grid, "regenerate a ROWSxCOLS grid (with --seed)");
    v->add_option("--objects", verify.objects, "expected object list");
    v->add_option("--seed", verify.seed, "seed for the grid and for sampled distance checks");

    SweepOptions sweep;
    auto* s = app.add_subcommand("sweep", "parameter sweeps over generated grids, one CSV per experiment");
    s->add_option("--experiment", sweep.experiment, "all | k | density | grid | build | update");
    s->add_option("--csv", sweep.csv, "CSV path (one experiment) or prefix (all)");
    s->add_option("--rows", sweep.rows, "base grid rows");
    s->add_option("--cols", sweep.cols, "base grid columns");
    s->add_option("--cells", sweep.cells, "grid experiment: largest c for the c x c centre block")
        ->check(CLI::Range(1, 10));
    s->add_option("--k", sweep.k, "k for experiments that hold it fixed");
    s->add_option("--density", sweep.density, "density for experiments that hold it fixed");
    s->add_option("--seed", sweep.seed, "seed");
    s->add_option("--queries", sweep.queries, "queries per measurement");
    s->add_option("--updates", sweep.updates, "updates per density in the update experiment");
    s->add_option("--algorithm", sweep.algorithm, "builder for k/density/grid experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        if (*b) return cmd_build(build, out);
        if (*q) return cmd_query(query, out);
        if (*u) return cmd_update(update, out);
        if (*v) {
            verify.graph.seed = verify.seed;
            return cmd_verify(verify, out);
        }
        if (*s) return cmd_sweep(sweep, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace knnidx::cli
