#include "bmih/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "bmih/metrics.hpp"
#include "bmih/oracle.hpp"
#include "bmih/random.hpp"

namespace bmih {

namespace {

constexpr std::uint64_t kSplitStream = 0x2545F4914F6CDD1DULL;

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Per-table entropy for a candidate bit order, reusing count buffers.
class TableEntropy {
public:
    explicit TableEntropy(const CodeDatabase& db) : n_(db.size()), columns_(db.bits(), std::vector<std::uint8_t>(db.size())) {
        for (std::size_t i = 0; i < n_; ++i) {
            const CodeView c = db.code(i);
            for (std::size_t t = 0; t < db.bits(); ++t) columns_[t][i] = c.bit(t) ? 1 : 0;
        }
        keys_.resize(n_);
    }

    double operator()(const std::vector<std::uint32_t>& order, std::size_t offset, std::size_t width) {
        std::fill(keys_.begin(), keys_.end(), 0);
        for (std::size_t s = 0; s < width; ++s) {
            const auto& col = columns_[order[offset + s]];
            for (std::size_t i = 0; i < n_; ++i) keys_[i] |= static_cast<SubcodeKey>(col[i]) << s;
        }
        sizes_.clear();
        if (width <= 22) {
            counts_.resize(std::size_t{1} << width, 0);
            for (SubcodeKey k : keys_) ++counts_[k];
            for (SubcodeKey k : keys_) {
                if (counts_[k] != 0) {
                    sizes_.push_back(counts_[k]);
                    counts_[k] = 0;
                }
            }
        } else {
            std::sort(keys_.begin(), keys_.end());
            std::size_t run = 1;
            for (std::size_t i = 1; i <= n_; ++i) {
                if (i < n_ && keys_[i] == keys_[i - 1]) {
                    ++run;
                } else {
                    sizes_.push_back(run);
                    run = 1;
                }
            }
        }
        return occupancy_entropy(sizes_);
    }

private:
    std::size_t n_;
    std::vector<std::vector<std::uint8_t>> columns_;
    std::vector<SubcodeKey> keys_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> sizes_;
};

ComparisonRow evaluate_codes(const std::string& method, const CodeDatabase& db, const CodeDatabase& queries,
                             const Labels& db_labels, const Labels& query_labels, const SubstringLayout& layout,
                             std::size_t repetitions) {
    const MultiIndex index = MultiIndex::build(db, layout);
    verify_knn(index, queries, 1);

    ComparisonRow row;
    row.method = method;
    row.entropy = bucket_entropy(index).entropy;

    std::vector<std::vector<ItemId>> rankings;
    rankings.reserve(queries.size());
    Searcher searcher(index);
    double evals = 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        rankings.push_back(hamming_ranking(db, queries.code(q)));
        evals += static_cast<double>(searcher.knn(queries.code(q), 1).stats.full_distance_evals);
    }
    row.map = mean_average_precision(rankings, query_labels, db_labels);
    row.knn_evals = evals / static_cast<double>(queries.size());

    const SpeedupMeasurement speed = speedup_factor(index, queries, 1, repetitions);
    row.speedup = speed.ratio;
    row.linear_seconds = speed.linear_seconds;
    row.index_seconds = speed.index_seconds;
    return row;
}

std::size_t to_count(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
    }
}

double to_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: '" + key + "' expects a number, got '" + value + "'");
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void verify_knn(const MultiIndex& index, const CodeDatabase& queries, std::size_t k) {
    Searcher searcher(index);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const Neighbors got = searcher.knn(queries.code(q), k);
        const Neighbors want = linear_knn(index.codes(), queries.code(q), k);
        if (got.ids != want.ids || got.distances != want.distances) {
            throw VerificationError("index kNN disagrees with linear scan for query " + std::to_string(q) +
                                    " at k = " + std::to_string(k));
        }
    }
}

std::vector<SpeedRow> run_speed_table(const MultiIndex& index, const CodeDatabase& queries,
                                      const std::vector<std::size_t>& ks, std::size_t repetitions) {
    if (queries.empty()) throw std::invalid_argument("run_speed_table: no queries");
    std::vector<SpeedRow> rows;
    Searcher searcher(index);
    for (std::size_t k : ks) {
        verify_knn(index, queries, k);
        SpeedRow row;
        row.k = k;
        row.m = index.tables();
        row.queries = queries.size();
        for (std::size_t q = 0; q < queries.size(); ++q) {
            const SearchStats s = searcher.knn(queries.code(q), k).stats;
            row.buckets_probed += static_cast<double>(s.buckets_probed);
            row.candidates_checked += static_cast<double>(s.candidates_checked);
            row.unique_candidates += static_cast<double>(s.unique_candidates);
            row.full_distance_evals += static_cast<double>(s.full_distance_evals);
            row.final_radius += static_cast<double>(s.final_radius);
        }
        const double nq = static_cast<double>(queries.size());
        row.buckets_probed /= nq;
        row.candidates_checked /= nq;
        row.unique_candidates /= nq;
        row.full_distance_evals /= nq;
        row.final_radius /= nq;
        const SpeedupMeasurement speed = speedup_factor(index, queries, k, repetitions);
        row.speedup = speed.ratio;
        row.linear_seconds = speed.linear_seconds;
        row.index_seconds = speed.index_seconds;
        rows.push_back(row);
    }
    return rows;
}

void write_speed_csv(std::ostream& out, const std::vector<SpeedRow>& rows, bool include_timing) {
    out << "k,m,queries,buckets_probed,candidates_checked,unique_candidates,full_distance_evals,final_radius";
    if (include_timing) out << ",speedup,linear_seconds,index_seconds";
    out << '\n';
    for (const auto& r : rows) {
        out << r.k << ',' << r.m << ',' << r.queries << ',' << fixed(r.buckets_probed, 3) << ','
            << fixed(r.candidates_checked, 3) << ',' << fixed(r.unique_candidates, 3) << ','
            << fixed(r.full_distance_evals, 3) << ',' << fixed(r.final_radius, 3);
        if (include_timing) {
            out << ',' << fixed(r.speedup, 3) << ',' << fixed(r.linear_seconds, 6) << ',' << fixed(r.index_seconds, 6);
        }
        out << '\n';
    }
}

std::vector<std::uint32_t> greedy_bit_permutation(const CodeDatabase& db, const SubstringLayout& layout) {
    if (db.bits() != layout.bits()) throw std::invalid_argument("greedy_bit_permutation: layout length mismatch");
    if (db.empty()) throw std::invalid_argument("greedy_bit_permutation: no codes");
    const std::size_t m = layout.tables();
    std::vector<std::uint32_t> order(db.bits());
    std::iota(order.begin(), order.end(), 0U);
    if (m < 2) return order;

    TableEntropy entropy(db);
    std::vector<double> current(m);
    for (std::size_t j = 0; j < m; ++j) current[j] = entropy(order, layout.offset(j), layout.width(j));

    constexpr double kMinGain = 1e-9;
    for (;;) {
        double best_gain = kMinGain;
        std::size_t best_p = 0;
        std::size_t best_q = 0;
        std::size_t best_a = 0;
        std::size_t best_b = 0;
        double best_ha = 0.0;
        double best_hb = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = a + 1; b < m; ++b) {
                for (std::size_t p = layout.offset(a); p < layout.offset(a) + layout.width(a); ++p) {
                    for (std::size_t q = layout.offset(b); q < layout.offset(b) + layout.width(b); ++q) {
                        std::swap(order[p], order[q]);
                        const double ha = entropy(order, layout.offset(a), layout.width(a));
                        const double hb = entropy(order, layout.offset(b), layout.width(b));
                        std::swap(order[p], order[q]);
                        const double gain = ha + hb - current[a] - current[b];
                        if (gain > best_gain) {
                            best_gain = gain;
                            best_p = p;
                            best_q = q;
                            best_a = a;
                            best_b = b;
                            best_ha = ha;
                            best_hb = hb;
                        }
                    }
                }
            }
        }
        if (best_gain <= kMinGain) break;
        std::swap(order[best_p], order[best_q]);
        current[best_a] = best_ha;
        current[best_b] = best_hb;
    }
    return order;
}

CodeDatabase permute_bits(const CodeDatabase& db, const std::vector<std::uint32_t>& order) {
    if (order.size() != db.bits()) throw std::invalid_argument("permute_bits: order length mismatch");
    std::vector<char> seen(order.size(), 0);
    for (auto o : order) {
        if (o >= order.size() || seen[o]) throw std::invalid_argument("permute_bits: not a permutation");
        seen[o] = 1;
    }
    CodeDatabase out(db.bits());
    out.reserve(db.size());
    BinaryCode scratch(db.bits());
    for (std::size_t i = 0; i < db.size(); ++i) {
        const CodeView c = db.code(i);
        for (std::size_t t = 0; t < order.size(); ++t) scratch.set(t, c.bit(order[t]));
        out.push_back(scratch);
    }
    if (db.labels()) out.set_labels(*db.labels());
    return out;
}

HoldoutSplit holdout_split(std::size_t n, std::size_t query_count, std::uint64_t seed) {
    if (query_count == 0 || query_count >= n) {
        throw std::invalid_argument("holdout_split: need 0 < queries < n");
    }
    std::vector<ItemId> ids(n);
    std::iota(ids.begin(), ids.end(), ItemId{0});
    Rng rng(seed ^ kSplitStream);
    shuffle(std::span<ItemId>(ids), rng);
    HoldoutSplit split;
    split.queries.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(query_count));
    split.database.assign(ids.begin() + static_cast<std::ptrdiff_t>(query_count), ids.end());
    std::sort(split.queries.begin(), split.queries.end());
    std::sort(split.database.begin(), split.database.end());
    return split;
}

std::vector<ComparisonRow> run_two_stage(const Labels& labels, std::size_t bits, const TrainConfig& config,
                                         const ExperimentOptions& options) {
    const HoldoutSplit split = holdout_split(labels.size(), options.query_count, config.seed);
    const Labels db_labels = labels.select(split.database);
    const Labels query_labels = labels.select(split.queries);
    const std::size_t m = options.tables != 0 ? options.tables : suggested_table_count(bits, split.database.size());
    const SubstringLayout layout(bits, m);

    std::vector<ComparisonRow> rows;
    CodeDatabase deep_db;
    CodeDatabase deep_queries;
    for (Variant v : {Variant::DMIH, Variant::DeepHash}) {
        TrainConfig cfg = config;
        cfg.variant = v;
        TrainResult trained = train(labels, layout, cfg);
        trained.codes.clear_labels();
        CodeDatabase db = trained.codes.select(split.database);
        CodeDatabase queries = trained.codes.select(split.queries);
        ComparisonRow row = evaluate_codes(to_string(v), db, queries, db_labels, query_labels, layout, options.repetitions);
        row.train_seconds = trained.report.seconds;
        rows.push_back(row);
        if (v == Variant::DeepHash) {
            deep_db = std::move(db);
            deep_queries = std::move(queries);
        }
    }

    const auto order = greedy_bit_permutation(deep_db, layout);
    ComparisonRow two_stage = evaluate_codes("TwoStage", permute_bits(deep_db, order), permute_bits(deep_queries, order),
                                             db_labels, query_labels, layout, options.repetitions);
    two_stage.note = "second stage: greedy bit permutation (stand-in)";
    two_stage.train_seconds = rows[1].train_seconds;
    rows.push_back(two_stage);
    return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows, bool include_timing) {
    out << "method,entropy,map,knn_evals,note";
    if (include_timing) out << ",speedup,linear_seconds,index_seconds,train_seconds";
    out << '\n';
    for (const auto& r : rows) {
        out << r.method << ',' << fixed(r.entropy, 6) << ',' << fixed(r.map, 6) << ',' << fixed(r.knn_evals, 3) << ','
            << r.note;
        if (include_timing) {
            out << ',' << fixed(r.speedup, 3) << ',' << fixed(r.linear_seconds, 6) << ',' << fixed(r.index_seconds, 6)
                << ',' << fixed(r.train_seconds, 3);
        }
        out << '\n';
    }
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::map<std::string, std::string> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return values;
}

void apply_key_values(const std::map<std::string, std::string>& values, TrainConfig& config,
                      ExperimentOptions* options) {
    for (const auto& [key, value] : values) {
        if (key == "epochs") {
            config.epochs = to_count(key, value);
        } else if (key == "batch_size") {
            config.batch_size = to_count(key, value);
        } else if (key == "learning_rate") {
            config.learning_rate = to_real(key, value);
        } else if (key == "regroup_interval") {
            config.regroup_interval = to_count(key, value);
        } else if (key == "triplets_per_anchor") {
            config.triplets_per_anchor = to_count(key, value);
        } else if (key == "seed") {
            config.seed = to_count(key, value);
        } else if (key == "variant") {
            config.variant = parse_variant(value);
        } else if (key == "epsilon") {
            config.params.epsilon = to_real(key, value);
        } else if (key == "lambda") {
            config.params.lambda = to_real(key, value);
        } else if (key == "beta") {
            config.params.beta = to_real(key, value);
        } else if (key == "k_prime") {
            config.params.k_prime = to_count(key, value);
        } else if (options != nullptr && key == "queries") {
            options->query_count = to_count(key, value);
        } else if (options != nullptr && (key == "tables" || key == "m")) {
            options->tables = to_count(key, value);
        } else if (options != nullptr && key == "reps") {
            options->repetitions = to_count(key, value);
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
}

}  // namespace bmih
