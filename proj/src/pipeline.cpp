#include "chainnet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "chainnet/error.hpp"
#include "chainnet/ingest.hpp"
#include "chainnet/log.hpp"
#include "chainnet/metrics.hpp"
#include "chainnet/report.hpp"
#include "chainnet/timeutil.hpp"
#include "chainnet/wealth.hpp"

namespace chainnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kQuantaPerBtc = 1e12;

double btc(Quanta q) { return static_cast<double>(q) / kQuantaPerBtc; }

}  // namespace

void RunConfig::validate() const {
    if (inputs.empty()) throw ConfigError("no input files given");
    if (out_dir.empty()) throw ConfigError("no output directory given");
    if ((year_min == 0) != (year_max == 0))
        throw ConfigError("year range needs both bounds, or neither");
    if (year_min != 0) {
        if (year_min < 2009) throw ConfigError("year range starts before 2009");
        if (year_max < year_min) throw ConfigError("empty year range");
    }
    if (dust_threshold < 0) throw ConfigError("negative dust threshold");
    if (top_k < 1) throw ConfigError("top_k must be at least 1");
    if (!(top_percent >= 0.0 && top_percent <= 1.0))
        throw ConfigError("top_percent outside [0, 1]");
    if (threads < 1 || threads > 256) throw ConfigError("threads outside [1, 256]");
}

std::string phase_of_year(int year) {
    if (year < 2009)
        throw std::invalid_argument("no phase defined before 2009");
    if (year <= 2011) return "Exploration";
    if (year <= 2014) return "Adaptation";
    return "Maturity";
}

struct YearCollector::YearState {
    SnapshotBuilder builder;
    std::unordered_map<NodeId, Quanta> fees;
    std::unordered_map<NodeId, Quanta> coinbase;

    explicit YearState(int year)
        : builder(year, [] {
              SnapshotBuilder::Options o;
              o.policy.drop_self_loops = false;
              return o;
          }()) {}
};

YearCollector::YearCollector(int year_min, int year_max)
    : year_min_(year_min), year_max_(year_max) {}

YearCollector::~YearCollector() = default;

void YearCollector::consume(const TransactionGroup& g) {
    if (finished_) throw std::logic_error("YearCollector: consume after finish");
    int year = year_of_epoch(g.timestamp);
    if (year_min_ != 0 && year < year_min_) return;
    if (year_max_ != 0 && year > year_max_) return;

    auto& state = years_[year];
    if (!state) state = std::make_unique<YearState>(year);

    if (g.coinbase) {
        for (const auto& credit : coinbase_credits(g))
            state->coinbase[credit.dst] += credit.value;
        return;
    }
    for (const auto& f : attribute_flows(g)) state->builder.add(f.src, f.dst, f.value);
    if (g.t_fee() > 0)
        for (const auto& [addr, share] : input_fee_shares(g))
            if (share > 0) state->fees[addr] += share;
}

std::map<int, YearData> YearCollector::finish() {
    if (finished_) throw std::logic_error("YearCollector: finish called twice");
    finished_ = true;
    std::map<int, YearData> out;
    for (auto& [year, state] : years_) {
        YearData yd;
        yd.year = year;
        yd.raw_loops = state->builder.finish();
        yd.fees.assign(state->fees.begin(), state->fees.end());
        yd.coinbase.assign(state->coinbase.begin(), state->coinbase.end());
        std::sort(yd.fees.begin(), yd.fees.end());
        std::sort(yd.coinbase.begin(), yd.coinbase.end());
        out.emplace(year, std::move(yd));
    }
    years_.clear();
    return out;
}

namespace {

struct YearComputed {
    std::vector<MetricRow> rows;
    double cov_volume = kNaN;
    double cov_node = kNaN;
    std::vector<AggregatedEdge> wealth_edges;
};

template <typename F>
double or_nan(F&& fn) {
    try {
        return fn();
    } catch (const std::domain_error&) {
        return kNaN;
    }
}

void degree_stat_rows(std::vector<MetricRow>& rows, int year, const char* variant,
                      const std::vector<double>& values) {
    auto add = [&](const char* metric, double v) {
        rows.push_back({year, metric, variant, v});
    };
    if (values.empty()) {
        add("degree_mean", kNaN);
        add("degree_stddev", kNaN);
        add("degree_skewness", kNaN);
        add("degree_kurtosis", kNaN);
        add("degree_gini", kNaN);
        return;
    }
    Moments m = distribution_moments(values);
    add("degree_mean", m.mean);
    add("degree_stddev", m.stddev);
    add("degree_skewness", m.skewness);
    add("degree_kurtosis", m.kurtosis);
    add("degree_gini", or_nan([&] { return gini(values); }));
}

YearComputed compute_year(const YearData& yd, const RunConfig& cfg) {
    YearComputed out;
    int year = yd.year;
    auto add = [&](const char* metric, const char* variant, double v) {
        out.rows.push_back({year, metric, variant, v});
    };

    YearSnapshot raw =
        cfg.strip_self_loops ? strip_self_loops(yd.raw_loops) : yd.raw_loops;
    YearSnapshot filtered =
        cfg.filter ? apply_dust_filter(raw, cfg.dust_threshold) : raw;
    if (cfg.filter) {
        out.wealth_edges = apply_dust_filter(yd.raw_loops, cfg.dust_threshold).edges;
        if (!raw.edges.empty()) {
            FilterCoverage cov = filter_coverage(raw, filtered);
            out.cov_volume = cov.volume_share;
            out.cov_node = cov.node_share;
        }
    } else {
        out.wealth_edges = yd.raw_loops.edges;
    }

    add("node_count", "", static_cast<double>(filtered.node_count()));
    add("edge_count", "", static_cast<double>(filtered.edge_count()));
    add("total_value_btc", "", btc(filtered.total_w1()));
    add("total_activity", "", static_cast<double>(filtered.total_w2()));
    add("filter_volume_share", "", out.cov_volume);
    add("filter_node_share", "", out.cov_node);

    if (filtered.nodes.empty()) {
        for (const char* v : {"in_activity", "out_activity", "in_value", "out_value"})
            degree_stat_rows(out.rows, year, v, {});
        add("density", "", kNaN);
        add("assortativity", "undirected", kNaN);
        add("assortativity", "directed", kNaN);
        add("clustering", "average_local", kNaN);
        for (const char* v : {"weak", "strong"}) {
            out.rows.push_back({year, "component_count", v, 0.0});
            out.rows.push_back({year, "largest_component_share", v, kNaN});
            out.rows.push_back({year, "component_size_gini", v, kNaN});
        }
        add("top_share", "in", kNaN);
        add("top_share", "out", kNaN);
        add("top_membership", "in_lscc", kNaN);
        add("top_membership", "in_lwcc", kNaN);
        add("top_membership", "out_lscc", kNaN);
        add("top_membership", "out_lwcc", kNaN);
        return out;
    }

    DegreeVectors deg = degree_vectors(filtered);
    auto as_doubles = [](const auto& v) {
        std::vector<double> d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = static_cast<double>(v[i]);
        return d;
    };
    auto as_btc = [](const std::vector<Quanta>& v) {
        std::vector<double> d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = btc(v[i]);
        return d;
    };
    degree_stat_rows(out.rows, year, "in_activity", as_doubles(deg.in_activity));
    degree_stat_rows(out.rows, year, "out_activity", as_doubles(deg.out_activity));
    degree_stat_rows(out.rows, year, "in_value", as_btc(deg.in_value));
    degree_stat_rows(out.rows, year, "out_value", as_btc(deg.out_value));

    add("density", "", or_nan([&] { return density(filtered); }));
    add("assortativity", "undirected",
        or_nan([&] { return degree_assortativity(filtered); }));
    add("assortativity", "directed",
        or_nan([&] { return directed_degree_assortativity(filtered); }));

    ClusteringOptions copt;
    copt.sample_size = cfg.clustering_sample;
    copt.sample_seed = cfg.clustering_seed;
    add("clustering", "average_local", average_local_clustering(filtered, copt));

    auto weak = connected_components(filtered, ComponentMode::weak);
    auto strong = connected_components(filtered, ComponentMode::strong);
    auto component_rows = [&](const char* variant, const ComponentPartition& p) {
        out.rows.push_back(
            {year, "component_count", variant, static_cast<double>(p.count())});
        double share = static_cast<double>(p.sizes[p.largest_label()]) /
                       static_cast<double>(p.nodes.size());
        out.rows.push_back({year, "largest_component_share", variant, share});
        out.rows.push_back({year, "component_size_gini", variant,
                            or_nan([&] { return component_size_gini(p); })});
    };
    component_rows("weak", weak);
    component_rows("strong", strong);

    TopShare share = top_percent_edge_share(filtered, cfg.top_percent);
    add("top_share", "in", share.in_share);
    add("top_share", "out", share.out_share);
    TopMembership mem = top_percent_component_membership(filtered, cfg.top_percent);
    add("top_membership", "in_lscc", mem.in_lscc);
    add("top_membership", "in_lwcc", mem.in_lwcc);
    add("top_membership", "out_lscc", mem.out_lscc);
    add("top_membership", "out_lwcc", mem.out_lwcc);
    return out;
}

std::FILE* open_out(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    return f;
}

void close_out(std::FILE* f, const std::string& path) {
    if (std::fclose(f) != 0) throw IoError("write error on " + path);
}

void write_config_echo(const RunConfig& cfg, int y_first, int y_last,
                       const std::string& path) {
    // threads and out_dir are deliberately absent: neither may influence the
    // bundle's bytes.
    std::FILE* f = open_out(path);
    std::string text;
    text += "clustering_sample=" + std::to_string(cfg.clustering_sample) + "\n";
    text += "clustering_seed=" + std::to_string(cfg.clustering_seed) + "\n";
    text += "dict=" + cfg.dict_path + "\n";
    text += "dust_threshold=" + quanta_to_string(cfg.dust_threshold) + "\n";
    text += "filter=" + std::string(cfg.filter ? "1" : "0") + "\n";
    std::string inputs;
    for (const auto& p : cfg.inputs) {
        if (!inputs.empty()) inputs += ";";
        inputs += p;
    }
    text += "inputs=" + inputs + "\n";
    text += "labels=" + cfg.labels_path + "\n";
    text += "strip_self_loops=" + std::string(cfg.strip_self_loops ? "1" : "0") + "\n";
    text += "top_k=" + std::to_string(cfg.top_k) + "\n";
    text += "top_percent=" + format_double(cfg.top_percent) + "\n";
    text += "year_max=" + std::to_string(cfg.year_max) + "\n";
    text += "year_min=" + std::to_string(cfg.year_min) + "\n";
    text += "years_observed=" + std::to_string(y_first) + "-" + std::to_string(y_last) +
            "\n";
    std::fputs(text.c_str(), f);
    close_out(f, path);
}

}  // namespace

void run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir);

    std::unordered_map<NodeId, std::string> labels;
    if (!cfg.labels_path.empty()) labels = load_label_file(cfg.labels_path);

    auto dict = cfg.dict_path.empty()
                    ? std::make_unique<AddressDictionary>()
                    : std::make_unique<AddressDictionary>(cfg.dict_path);

    YearCollector collector(cfg.year_min, cfg.year_max);
    TxAssembler assembler(*dict, [&](TransactionGroup&& g) { collector.consume(g); });
    for (const auto& path : cfg.inputs) {
        log_info("ingesting " + path);
        RecordReader reader(path);
        TransactionRecord rec;
        while (reader.next(rec)) assembler.add(rec);
    }
    assembler.finish();
    dict->flush();

    std::map<int, YearData> observed = collector.finish();
    if (observed.empty())
        throw DataError("no transactions found in the configured year range");
    if (observed.begin()->first < 2009)
        throw DataError("data contains year " +
                        std::to_string(observed.begin()->first) +
                        ", before the supported range");

    int y_first = observed.begin()->first;
    int y_last = observed.rbegin()->first;
    std::vector<YearData> years;
    years.reserve(static_cast<std::size_t>(y_last - y_first + 1));
    for (int y = y_first; y <= y_last; ++y) {
        auto it = observed.find(y);
        if (it != observed.end()) {
            years.push_back(std::move(it->second));
        } else {
            YearData empty;
            empty.year = y;
            empty.raw_loops = make_snapshot(y, {}, StripPolicy{false});
            years.push_back(std::move(empty));
        }
    }

    // Per-year snapshot metrics, parallel over years; slot order keeps the
    // merge (and so the bundle) independent of scheduling.
    std::vector<YearComputed> slots(years.size());
    std::vector<std::exception_ptr> errors(years.size());
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= years.size()) return;
            try {
                slots[i] = compute_year(years[i], cfg);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    unsigned n_workers =
        static_cast<unsigned>(std::min<std::size_t>(cfg.threads, years.size()));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    MetricsReport report;
    for (std::size_t i = 0; i < years.size(); ++i) {
        report.set_phase(years[i].year, phase_of_year(years[i].year));
        for (MetricRow& r : slots[i].rows) report.add(r.year, r.metric, r.variant, r.value);
    }

    // Sequential ledger chain plus the per-year wealth outputs.
    WealthLedgers ledgers;
    std::vector<RichSet> balance_sets, indegree_sets;
    std::string rich_csv = "year,kind,rank,address_id,address,value,label\n";
    for (std::size_t i = 0; i < years.size(); ++i) {
        const YearData& yd = years[i];
        YearWealthInput in;
        in.year = yd.year;
        in.edges = std::move(slots[i].wealth_edges);
        in.fees = yd.fees;
        in.coinbase = yd.coinbase;
        ledgers.advance_year(in);

        write_ledger_checkpoint(ledgers, cfg.out_dir + "/ledger_" +
                                             std::to_string(yd.year) + ".csv");

        bool have_ledger = !ledgers.balances().empty();
        RichSet bal, deg;
        bal.year = deg.year = yd.year;
        bal.kind = RichKind::balance;
        deg.kind = RichKind::indegree;
        if (have_ledger) {
            bal = ledgers.top_k(RichKind::balance, cfg.top_k);
            bal.year = yd.year;
            deg = ledgers.top_k(RichKind::indegree, cfg.top_k);
            deg.year = yd.year;
        }
        balance_sets.push_back(bal);
        indegree_sets.push_back(deg);

        for (const RichSet* set : {&bal, &deg}) {
            std::size_t rank = 0;
            for (const auto& m : label_rich_set(*set, labels)) {
                ++rank;
                rich_csv += std::to_string(yd.year);
                rich_csv += ",";
                rich_csv += rich_kind_name(set->kind);
                rich_csv += "," + std::to_string(rank);
                rich_csv += "," + std::to_string(m.id);
                rich_csv += "," + dict->key_of(m.id);
                rich_csv += "," + quanta_to_string(m.value);
                rich_csv += "," + m.label + "\n";
            }
        }

        auto ratio = [&](RichKind kind) {
            if (!have_ledger) return kNaN;
            return or_nan([&] { return ledgers.richness_ratio(kind, cfg.top_k); });
        };
        report.add(yd.year, "richness_ratio", "balance", ratio(RichKind::balance));
        report.add(yd.year, "richness_ratio", "indegree", ratio(RichKind::indegree));
        report.add(yd.year, "negative_balances", "",
                   static_cast<double>(ledgers.negative_balance_count()));
        Quanta gap =
            ledgers.balance_total() - (ledgers.coinbase_total() - ledgers.fees_total());
        if (gap != 0)
            log_warn("year " + std::to_string(yd.year) +
                     ": ledger conservation gap of " + quanta_to_string(gap) +
                     " quanta");
        report.add(yd.year, "conservation_gap_quanta", "", static_cast<double>(gap));
    }

    std::vector<std::size_t> x_series = union_growth(balance_sets);
    std::vector<std::size_t> y_series = union_growth(indegree_sets);
    std::string union_csv = "year,kind,size,max_bound\n";
    for (std::size_t i = 0; i < years.size(); ++i) {
        std::size_t bound = cfg.top_k * (i + 1);
        union_csv += std::to_string(years[i].year) + ",balance," +
                     std::to_string(x_series[i]) + "," + std::to_string(bound) + "\n";
        report.add(years[i].year, "union_size", "balance",
                   static_cast<double>(x_series[i]));
    }
    for (std::size_t i = 0; i < years.size(); ++i) {
        std::size_t bound = cfg.top_k * (i + 1);
        union_csv += std::to_string(years[i].year) + ",indegree," +
                     std::to_string(y_series[i]) + "," + std::to_string(bound) + "\n";
        report.add(years[i].year, "union_size", "indegree",
                   static_cast<double>(y_series[i]));
    }

    std::string cov_csv = "year,volume_share,node_share\n";
    for (std::size_t i = 0; i < years.size(); ++i)
        cov_csv += std::to_string(years[i].year) + "," +
                   format_double(slots[i].cov_volume) + "," +
                   format_double(slots[i].cov_node) + "\n";

    auto write_text = [&](const std::string& name, const std::string& text) {
        std::string path = cfg.out_dir + "/" + name;
        std::FILE* f = open_out(path);
        std::fputs(text.c_str(), f);
        close_out(f, path);
    };
    write_text("rich_sets.csv", rich_csv);
    write_text("union_growth.csv", union_csv);
    write_text("coverage.csv", cov_csv);
    report.write_csv(cfg.out_dir + "/metrics.csv");
    report.write_json(cfg.out_dir + "/metrics.json");
    write_config_echo(cfg, y_first, y_last, cfg.out_dir + "/run_config.txt");
    log_info("bundle written to " + cfg.out_dir);
}

}  // namespace chainnet
