#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bmih/bench.hpp"
#include "bmih/code_io.hpp"
#include "bmih/metrics.hpp"
#include "bmih/multi_index.hpp"
#include "bmih/oracle.hpp"
#include "bmih/synthetic.hpp"
#include "bmih/trainer.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerification = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes to `path`, or stdout when path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    fn(out);
}

// One unsigned label per line.
bmih::Labels read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open labels " + path);
    std::vector<std::uint32_t> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            labels.push_back(static_cast<std::uint32_t>(std::stoul(line)));
        } catch (const std::exception&) {
            throw UsageError("bad label line '" + line + "' in " + path);
        }
    }
    return bmih::Labels::single(std::move(labels));
}

bmih::Labels resolve_labels(const bmih::CodeDatabase& db, const std::string& labels_path) {
    bmih::Labels labels;
    if (!labels_path.empty()) {
        labels = read_label_file(labels_path);
    } else if (db.labels()) {
        labels = bmih::Labels::single(*db.labels());
    } else {
        throw UsageError("no labels: pass --labels or use a code file with embedded labels");
    }
    if (labels.size() != db.size()) throw UsageError("label count does not match code count");
    return labels;
}

// Reads '0'/'1' strings, one query per line.
bmih::CodeDatabase read_query_file(const std::string& path, std::size_t bits) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open queries " + path);
    bmih::CodeDatabase queries(bits);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.size() != bits || line.find_first_not_of("01") != std::string::npos) {
            throw UsageError("query '" + line + "' is not a " + std::to_string(bits) + "-bit 0/1 string");
        }
        queries.push_back(bmih::BinaryCode::from_string(line));
    }
    if (queries.empty()) throw UsageError("no queries in " + path);
    return queries;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
    std::vector<std::size_t> ks;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            const long long v = std::stoll(item);
            if (v <= 0) throw std::invalid_argument(item);
            ks.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError("--ks expects positive integers, got '" + item + "'");
        }
    }
    if (ks.empty()) throw UsageError("--ks is empty");
    return ks;
}

// Config file first, then any explicit flags on top.
struct TrainFlags {
    std::string config;
    std::map<std::string, std::string> overrides;

    void add(CLI::App* cmd) {
        cmd->add_option("--config", config, "key=value config file");
        for (const char* key : {"epochs", "batch_size", "learning_rate", "regroup_interval", "triplets_per_anchor",
                                "seed", "epsilon", "lambda", "beta", "k_prime"}) {
            std::string flag = std::string("--") + key;
            for (char& c : flag) {
                if (c == '_') c = '-';
            }
            cmd->add_option_function<std::string>(
                flag, [this, k = std::string(key)](const std::string& v) { overrides[k] = v; });
        }
    }

    std::map<std::string, std::string> merged() const {
        std::map<std::string, std::string> values;
        if (!config.empty()) {
            try {
                values = bmih::read_key_values(config);
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
        }
        for (const auto& [k, v] : overrides) values[k] = v;
        return values;
    }
};

int run_gen(std::size_t n, std::size_t bits, std::size_t classes, const std::string& mode, double flip_prob,
            std::size_t centers, std::uint64_t seed, const std::string& out, const std::string& csv) {
    bmih::SyntheticSpec spec;
    spec.n = n;
    spec.bits = bits;
    spec.classes = classes;
    spec.centers = centers != 0 ? centers : classes;
    spec.flip_prob = flip_prob;
    try {
        spec.mode = bmih::parse_synthetic_mode(mode);
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const bmih::CodeDatabase db = bmih::generate(spec, seed);
    bmih::write_codes(out, db);
    if (!csv.empty()) {
        with_output(csv, [&](std::ostream& os) {
            os << "id,label,code\n";
            for (std::size_t i = 0; i < db.size(); ++i) {
                os << i << ',';
                if (db.labels()) os << (*db.labels())[i];
                os << ',' << db.code(i).to_string() << '\n';
            }
        });
    }
    return kOk;
}

int run_build(const std::string& codes, std::size_t m, const std::string& out) {
    const bmih::CodeDatabase db = bmih::read_codes(codes);
    if (db.size() < 2 && m == 0) throw UsageError("need --m for fewer than two codes");
    const std::size_t tables = m != 0 ? m : bmih::suggested_table_count(db.bits(), db.size());
    if (tables > db.bits()) throw UsageError("--m exceeds the code length");
    const bmih::SubstringLayout layout(db.bits(), tables);
    const bmih::MultiIndex index = bmih::MultiIndex::build(db, layout);
    bmih::write_index_snapshot(out, index.codes(), layout);
    const auto report = bmih::bucket_entropy(index);
    std::cout << "items,bits,m,entropy\n"
              << db.size() << ',' << db.bits() << ',' << tables << ',' << report.entropy << '\n';
    return kOk;
}

int run_query(const std::string& index_path, const std::string& query_file, std::size_t k, long long radius,
              bool verify) {
    const bmih::IndexSnapshot snap = bmih::read_index_snapshot(index_path);
    const bmih::MultiIndex index = bmih::MultiIndex::build(snap.codes, snap.layout);
    const bmih::CodeDatabase queries = read_query_file(query_file, snap.codes.bits());
    bmih::Searcher searcher(index);
    std::cout << "query,rank,id,distance\n";
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const bmih::Neighbors res = radius >= 0 ? searcher.r_neighbors(queries.code(q), static_cast<std::size_t>(radius))
                                                : searcher.knn(queries.code(q), k);
        if (verify) {
            const bmih::Neighbors want =
                radius >= 0 ? bmih::linear_r_neighbors(index.codes(), queries.code(q), static_cast<std::size_t>(radius))
                            : bmih::linear_knn(index.codes(), queries.code(q), k);
            if (want.ids != res.ids || want.distances != res.distances) {
                throw bmih::VerificationError("index result disagrees with linear scan for query " + std::to_string(q));
            }
        }
        for (std::size_t r = 0; r < res.size(); ++r) {
            std::cout << q << ',' << r << ',' << res.ids[r] << ',' << res.distances[r] << '\n';
        }
    }
    return kOk;
}

int run_bench(const std::string& codes, std::size_t m, const std::string& ks_text, std::size_t reps,
              std::size_t query_count, std::uint64_t seed, bool timing, const std::string& csv) {
    const auto ks = parse_ks(ks_text);
    if (reps < 3) throw UsageError("--reps must be >= 3");
    const bmih::CodeDatabase all = bmih::read_codes(codes);
    if (query_count == 0 || query_count >= all.size()) throw UsageError("--queries must be in [1, n)");
    const bmih::HoldoutSplit split = bmih::holdout_split(all.size(), query_count, seed);
    bmih::CodeDatabase db = all.select(split.database);
    bmih::CodeDatabase queries = all.select(split.queries);
    db.clear_labels();
    const std::size_t tables = m != 0 ? m : bmih::suggested_table_count(db.bits(), db.size());
    if (tables > db.bits()) throw UsageError("--m exceeds the code length");
    const bmih::MultiIndex index = bmih::MultiIndex::build(std::move(db), bmih::SubstringLayout(all.bits(), tables));
    const auto rows = bmih::run_speed_table(index, queries, ks, reps);
    with_output(csv, [&](std::ostream& os) { bmih::write_speed_csv(os, rows, timing); });
    return kOk;
}

int run_train(const std::string& codes, const std::string& labels_path, const std::string& variant,
              const TrainFlags& flags, std::size_t m, const std::string& out, const std::string& csv) {
    const bmih::CodeDatabase input = bmih::read_codes(codes);
    const bmih::Labels labels = resolve_labels(input, labels_path);
    bmih::TrainConfig config;
    try {
        bmih::apply_key_values(flags.merged(), config);
        if (!variant.empty()) config.variant = bmih::parse_variant(variant);
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const std::size_t tables = m != 0 ? m : bmih::suggested_table_count(input.bits(), input.size());
    const bmih::SubstringLayout layout(input.bits(), tables);
    const bmih::TrainResult result = bmih::train(labels, layout, config);
    if (!out.empty()) bmih::write_codes(out, result.codes);
    with_output(csv, [&](std::ostream& os) {
        os << "epoch,loss\n";
        char buf[64];
        for (std::size_t e = 0; e < result.report.loss_curve.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%.9g", result.report.loss_curve[e]);
            os << e << ',' << buf << '\n';
        }
    });
    std::fprintf(stderr, "variant=%s m=%zu entropy=%.4f map=%.4f seconds=%.2f\n", bmih::to_string(config.variant),
                 tables, result.report.final_entropy, result.report.final_map, result.report.seconds);
    return kOk;
}

int run_entropy(const std::string& index_path) {
    const bmih::IndexSnapshot snap = bmih::read_index_snapshot(index_path);
    const bmih::MultiIndex index = bmih::MultiIndex::build(snap.codes, snap.layout);
    const auto report = bmih::bucket_entropy(index);
    std::cout << "table,entropy,occupied_buckets\n";
    for (std::size_t j = 0; j < report.per_table_entropy.size(); ++j) {
        std::cout << j << ',' << report.per_table_entropy[j] << ',' << report.occupied_buckets[j] << '\n';
    }
    std::cout << "mean," << report.entropy << ",\n";
    return kOk;
}

int run_two_stage(const std::string& codes, const std::string& labels_path, const TrainFlags& flags,
                  const std::string& csv, bool timing) {
    const bmih::CodeDatabase input = bmih::read_codes(codes);
    const bmih::Labels labels = resolve_labels(input, labels_path);
    bmih::TrainConfig config;
    bmih::ExperimentOptions options;
    try {
        bmih::apply_key_values(flags.merged(), config, &options);
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto rows = bmih::run_two_stage(labels, input.bits(), config, options);
    with_output(csv, [&](std::ostream& os) { bmih::write_comparison_csv(os, rows, timing); });
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Balanced multi-index hashing toolkit"};
    app.require_subcommand(1);

    std::size_t n = 0, bits = 0, classes = 0, centers = 0, m = 0, k = 0, reps = 3, queries = 200;
    long long radius = -1;
    std::uint64_t seed = 1;
    double flip_prob = 0.0;
    std::string mode = "uniform", out, csv, codes, labels, index_path, query_file, ks = "1,10,100", variant;
    bool no_timing = false;
    bool verify = false;

    auto* gen = app.add_subcommand("gen", "generate synthetic codes");
    gen->add_option("--n", n, "number of codes")->required();
    gen->add_option("--l", bits, "code length in bits")->required();
    gen->add_option("--classes", classes, "classes (labeled_clustered) or centers (clustered)");
    gen->add_option("--centers", centers, "centers for clustered mode (default: --classes)");
    gen->add_option("--mode", mode, "uniform | clustered | labeled_clustered");
    gen->add_option("--flip-prob", flip_prob, "per-bit flip probability");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--out", out, "output code file")->required();
    gen->add_option("--csv", csv, "optional CSV dump (id,label,code)");

    auto* build = app.add_subcommand("build", "build an index snapshot");
    build->add_option("--codes", codes, "code file")->required();
    build->add_option("--m", m, "substring tables (default: suggested)");
    build->add_option("--out", out, "output snapshot")->required();

    auto* query = app.add_subcommand("query", "query an index snapshot");
    query->add_option("--index", index_path, "index snapshot")->required();
    query->add_option("--query-file", query_file, "one 0/1 code per line")->required();
    auto* k_opt = query->add_option("--k", k, "k nearest neighbors");
    auto* r_opt = query->add_option("--radius", radius, "Hamming radius");
    k_opt->excludes(r_opt);
    query->add_flag("--verify", verify, "check every answer against a linear scan");

    auto* bench = app.add_subcommand("bench", "speedup table over held-out queries");
    bench->add_option("--codes", codes, "code file")->required();
    bench->add_option("--m", m, "substring tables (default: suggested)");
    bench->add_option("--ks", ks, "comma-separated k values");
    bench->add_option("--reps", reps, "timing repetitions (median)");
    bench->add_option("--queries", queries, "held-out query count");
    bench->add_option("--seed", seed, "split seed");
    bench->add_option("--csv", csv, "output CSV (default stdout)");
    bench->add_flag("--no-timing", no_timing, "omit timing columns");

    TrainFlags train_flags;
    auto* train = app.add_subcommand("train", "train codes on labeled items");
    train->add_option("--codes", codes, "code file giving n and l (labels may be embedded)")->required();
    train->add_option("--labels", labels, "label file, one per line");
    train->add_option("--variant", variant, "dmih | deephash | feature | instance");
    train->add_option("--m", m, "substring tables (default: suggested)");
    train->add_option("--out", out, "output code file");
    train->add_option("--csv", csv, "loss curve CSV (default stdout)");
    train_flags.add(train);

    auto* entropy = app.add_subcommand("entropy", "bucket entropy of an index snapshot");
    entropy->add_option("--index", index_path, "index snapshot")->required();

    TrainFlags two_flags;
    auto* two = app.add_subcommand("two-stage", "DMIH vs DeepHash vs two-stage rebalancing");
    two->add_option("--codes", codes, "code file giving n and l (labels may be embedded)")->required();
    two->add_option("--labels", labels, "label file, one per line");
    two->add_option("--csv", csv, "output CSV (default stdout)");
    two->add_flag("--no-timing", no_timing, "omit timing columns");
    two_flags.add(two);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) return run_gen(n, bits, classes, mode, flip_prob, centers, seed, out, csv);
        if (*build) return run_build(codes, m, out);
        if (*query) {
            if (k_opt->count() == 0 && r_opt->count() == 0) throw UsageError("query needs --k or --radius");
            if (k_opt->count() != 0 && k == 0) throw UsageError("--k must be >= 1");
            if (r_opt->count() != 0 && radius < 0) throw UsageError("--radius must be >= 0");
            return run_query(index_path, query_file, k, radius, verify);
        }
        if (*bench) return run_bench(codes, m, ks, reps, queries, seed, !no_timing, csv);
        if (*train) return run_train(codes, labels, variant, train_flags, m, out, csv);
        if (*entropy) return run_entropy(index_path);
        if (*two) return run_two_stage(codes, labels, two_flags, csv, !no_timing);
    } catch (const bmih::VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << '\n';
        return kVerification;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const bmih::CodeFileError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
