#include <doctest.h>

#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainnet/error.hpp"
#include "chainnet/ingest.hpp"
#include "chainnet/pipeline.hpp"
#include "chainnet/synth.hpp"
#include "chainnet/timeutil.hpp"
#include "testutil.hpp"

using namespace chainnet;
namespace fs = std::filesystem;

namespace {

struct MetricsTable {
    // (year, metric, variant) -> (value text, phase)
    std::map<std::tuple<int, std::string, std::string>,
             std::pair<std::string, std::string>>
        rows;

    const std::string& value(int year, const std::string& metric,
                             const std::string& variant = "") const {
        return rows.at({year, metric, variant}).first;
    }
    const std::string& phase(int year, const std::string& metric) const {
        return rows.at({year, metric, ""}).second;
    }
    bool has_year(int year) const {
        for (const auto& [key, v] : rows)
            if (std::get<0>(key) == year) return true;
        return false;
    }
};

MetricsTable load_metrics(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE_EQ(line, "year,metric,variant,value,phase");
    MetricsTable t;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ',') {
                f.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        REQUIRE_EQ(f.size(), 5);
        t.rows[{std::stoi(f[0]), f[1], f[2]}] = {f[3], f[4]};
    }
    return t;
}

std::map<std::string, std::string> slurp_dir(const std::string& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            files[fs::relative(entry.path(), dir).string()] =
                read_file(entry.path().string());
    return files;
}

RunConfig base_config(const std::string& input, const std::string& out) {
    RunConfig cfg;
    cfg.inputs = {input};
    cfg.out_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("phases partition the supported years") {
    CHECK_EQ(phase_of_year(2009), "Exploration");
    CHECK_EQ(phase_of_year(2011), "Exploration");
    CHECK_EQ(phase_of_year(2012), "Adaptation");
    CHECK_EQ(phase_of_year(2014), "Adaptation");
    CHECK_EQ(phase_of_year(2015), "Maturity");
    CHECK_EQ(phase_of_year(2030), "Maturity");
    CHECK_THROWS_AS(phase_of_year(2008), std::invalid_argument);
}

TEST_CASE("run configs are validated") {
    RunConfig cfg = base_config("in.csv", "out");
    CHECK_NOTHROW(cfg.validate());

    cfg.inputs.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config("in.csv", "");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config("in.csv", "out");
    cfg.year_min = 2010;  // bound without its partner
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.year_max = 2009;  // empty range
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.year_min = 2008;
    cfg.year_max = 2010;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config("in.csv", "out");
    cfg.dust_threshold = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config("in.csv", "out");
    cfg.top_k = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config("in.csv", "out");
    cfg.top_percent = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config("in.csv", "out");
    cfg.threads = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.threads = 257;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("the year collector buckets transactions and margins") {
    YearCollector collector;
    TransactionGroup g;
    g.tx_id = "t1";
    g.timestamp = parse_utc_timestamp("2009-05-01 00:00:00");
    g.inputs = {{0, sats_to_quanta(100)}};
    g.outputs = {{1, sats_to_quanta(90)}};  // 10 sats fee
    collector.consume(g);

    TransactionGroup cb;
    cb.tx_id = "cb";
    cb.coinbase = true;
    cb.timestamp = parse_utc_timestamp("2010-02-01 00:00:00");
    cb.outputs = {{2, sats_to_quanta(50)}};
    collector.consume(cb);

    auto years = collector.finish();
    REQUIRE_EQ(years.size(), 2);
    const YearData& y9 = years.at(2009);
    REQUIRE_EQ(y9.raw_loops.edge_count(), 1);
    CHECK_EQ(y9.raw_loops.edges[0].w1, sats_to_quanta(90));
    REQUIRE_EQ(y9.fees.size(), 1);
    CHECK_EQ(y9.fees[0].second, sats_to_quanta(10));
    CHECK(y9.coinbase.empty());

    const YearData& y10 = years.at(2010);
    CHECK_EQ(y10.raw_loops.edge_count(), 0);
    REQUIRE_EQ(y10.coinbase.size(), 1);
    CHECK_EQ(y10.coinbase[0].second, sats_to_quanta(50));
}

TEST_CASE("the year collector honors bounds") {
    YearCollector collector(2010, 2011);
    for (int year : {2009, 2010, 2011, 2012}) {
        TransactionGroup g;
        g.tx_id = "t" + std::to_string(year);
        g.timestamp = year_start_epoch(year) + 1000;
        g.inputs = {{0, 100}};
        g.outputs = {{1, 100}};
        collector.consume(g);
    }
    auto years = collector.finish();
    CHECK_EQ(years.size(), 2);
    CHECK(years.count(2010));
    CHECK(years.count(2011));
}

TEST_CASE("a synthetic chain runs end to end") {
    TempDir tmp("chainnet_pipe");
    SynthConfig synth;
    synth.seed = 11;
    synth.years = 3;
    synth.tx_per_year = 500;
    synth.blocks_per_year = 60;
    synth.initial_pool = 120;
    synth.miner_count = 8;
    write_chain_csv(synth, tmp.file("chain.csv"));

    RunConfig cfg = base_config(tmp.file("chain.csv"), tmp.file("out"));
    run_pipeline(cfg);

    for (const char* name :
         {"metrics.csv", "metrics.json", "coverage.csv", "rich_sets.csv",
          "union_growth.csv", "run_config.txt", "ledger_2009.csv", "ledger_2010.csv",
          "ledger_2011.csv"}) {
        CHECK(fs::exists(tmp.file("out") + "/" + std::string(name)));
    }

    MetricsTable t = load_metrics(tmp.file("out") + "/metrics.csv");
    for (int year : {2009, 2010, 2011}) {
        CHECK(t.has_year(year));
        CHECK_EQ(t.phase(year, "node_count"), "Exploration");
        CHECK_EQ(t.value(year, "conservation_gap_quanta"), "0");
        CHECK(std::stod(t.value(year, "node_count")) > 0);
        CHECK(std::stod(t.value(year, "richness_ratio", "balance")) >= 1.0);
        CHECK(std::stod(t.value(year, "richness_ratio", "indegree")) >= 1.0);
    }
    CHECK_FALSE(t.has_year(2012));

    // union sizes stay within the k*t envelope and never shrink
    double prev = 0;
    for (int year : {2009, 2010, 2011}) {
        double x = std::stod(t.value(year, "union_size", "balance"));
        CHECK(x >= prev);
        CHECK(x <= 10.0 * (year - 2008));
        prev = x;
    }

    // filtered coverage retains nearly all volume on this dense chain
    std::string cov = read_file(tmp.file("out") + "/coverage.csv");
    CHECK(cov.find("year,volume_share,node_share") == 0);
    CHECK_EQ(std::count(cov.begin(), cov.end(), '\n'), 4);
}

TEST_CASE("identical runs produce identical bytes") {
    TempDir tmp("chainnet_pipe");
    SynthConfig synth;
    synth.seed = 21;
    synth.years = 2;
    synth.tx_per_year = 300;
    synth.blocks_per_year = 40;
    synth.initial_pool = 80;
    synth.miner_count = 8;
    write_chain_csv(synth, tmp.file("chain.csv"));

    run_pipeline(base_config(tmp.file("chain.csv"), tmp.file("one")));
    run_pipeline(base_config(tmp.file("chain.csv"), tmp.file("two")));
    auto one = slurp_dir(tmp.file("one"));
    auto two = slurp_dir(tmp.file("two"));
    CHECK_EQ(one.size(), two.size());
    CHECK(one == two);

    // the echoed config never mentions concurrency or the output location
    const std::string& echo = one.at("run_config.txt");
    CHECK_EQ(echo.find("threads"), std::string::npos);
    CHECK_EQ(echo.find(tmp.file("one")), std::string::npos);
    CHECK(echo.find("inputs=" + tmp.file("chain.csv")) != std::string::npos);
    CHECK(echo.find("years_observed=2009-2010") != std::string::npos);
}

TEST_CASE("gap years are carried as empty snapshots") {
    TempDir tmp("chainnet_pipe");
    std::string rows = csv_header(',') + "\n";
    rows += "1,cb1,1,,M,5.0e+09,2009-03-01 00:00:00 UTC\n";
    rows += "2,t1,0,M,A,1.0e+09,2009-03-02 00:00:00 UTC\n";
    rows += "3,t2,0,A,B,2.0e+08,2011-05-01 00:00:00 UTC\n";  // nothing in 2010
    write_file(tmp.file("gap.csv"), rows);

    RunConfig cfg = base_config(tmp.file("gap.csv"), tmp.file("out"));
    run_pipeline(cfg);

    CHECK(fs::exists(tmp.file("out") + "/ledger_2010.csv"));
    MetricsTable t = load_metrics(tmp.file("out") + "/metrics.csv");
    CHECK_EQ(t.value(2010, "node_count"), "0");
    CHECK_EQ(t.value(2010, "density"), "nan");
    CHECK_EQ(t.value(2010, "conservation_gap_quanta"), "0");
    CHECK_EQ(t.value(2009, "node_count"), "2");
    CHECK_EQ(t.value(2011, "node_count"), "2");

    // balances carry across the gap: M still holds coinbase minus the transfer
    std::string l2010 = read_file(tmp.file("out") + "/ledger_2010.csv");
    std::string l2009 = read_file(tmp.file("out") + "/ledger_2009.csv");
    CHECK_EQ(l2009, l2010);
}

TEST_CASE("a year of pure dust still completes with sentinels") {
    TempDir tmp("chainnet_pipe");
    std::string rows = csv_header(',') + "\n";
    rows += "1,cb1,1,,M,5.0e+09,2009-03-01 00:00:00 UTC\n";
    rows += "2,t1,0,M,A,1.0e+09,2009-03-02 00:00:00 UTC\n";
    // 2010 sees one tiny transfer, far under the yearly threshold
    rows += "3,t3,0,A,B,5.0e+03,2010-04-01 00:00:00 UTC\n";
    write_file(tmp.file("dust.csv"), rows);

    RunConfig cfg = base_config(tmp.file("dust.csv"), tmp.file("out"));
    run_pipeline(cfg);
    MetricsTable t = load_metrics(tmp.file("out") + "/metrics.csv");
    CHECK_EQ(t.value(2010, "node_count"), "0");  // everything filtered
    CHECK_EQ(t.value(2010, "degree_gini", "in_value"), "nan");
    CHECK_EQ(t.value(2010, "clustering", "average_local"), "nan");
    CHECK_EQ(t.phase(2010, "node_count"), "Exploration");

    std::string cov = read_file(tmp.file("out") + "/coverage.csv");
    CHECK(cov.find("2010,0,0") != std::string::npos);  // raw non-empty, all dust

    // filtered dust edges skip the ledger entirely, so no debit appears
    CHECK_EQ(t.value(2010, "negative_balances"), "0");
    std::string l2009 = read_file(tmp.file("out") + "/ledger_2009.csv");
    std::string l2010 = read_file(tmp.file("out") + "/ledger_2010.csv");
    CHECK_EQ(l2009, l2010);
}

TEST_CASE("unfiltered runs keep every edge") {
    TempDir tmp("chainnet_pipe");
    std::string rows = csv_header(',') + "\n";
    rows += "1,cb1,1,,M,5.0e+09,2009-03-01 00:00:00 UTC\n";
    rows += "2,t1,0,M,A,1.0e+04,2009-03-02 00:00:00 UTC\n";  // dust-sized
    write_file(tmp.file("tiny.csv"), rows);

    RunConfig cfg = base_config(tmp.file("tiny.csv"), tmp.file("out"));
    cfg.filter = false;
    run_pipeline(cfg);
    MetricsTable t = load_metrics(tmp.file("out") + "/metrics.csv");
    CHECK_EQ(t.value(2009, "node_count"), "2");
    // coverage shares are only meaningful when the filter actually ran
    CHECK_EQ(t.value(2009, "filter_volume_share"), "nan");
}

TEST_CASE("pipeline failures map to the documented error kinds") {
    TempDir tmp("chainnet_pipe");
    RunConfig cfg = base_config(tmp.file("absent.csv"), tmp.file("out"));
    CHECK_THROWS_AS(run_pipeline(cfg), IoError);

    std::string bad = tmp.file("bad.csv");
    write_file(bad, csv_header(',') + "\n1,t1,0,A,B,notanumber,2009-01-01 00:00:00\n");
    CHECK_THROWS_AS(run_pipeline(base_config(bad, tmp.file("out"))), DataError);

    std::string early = tmp.file("early.csv");
    write_file(early, csv_header(',') + "\n1,t1,0,A,B,5.0e+08,2008-06-01 00:00:00\n");
    CHECK(throws_with<DataError>(
        [&] { run_pipeline(base_config(early, tmp.file("out"))); }, "2008"));

    std::string header_only = tmp.file("header.csv");
    write_file(header_only, csv_header(',') + "\n");
    CHECK(throws_with<DataError>(
        [&] { run_pipeline(base_config(header_only, tmp.file("out"))); },
        "no transactions"));
}

TEST_CASE("the bounded year range drops out-of-range blocks") {
    TempDir tmp("chainnet_pipe");
    std::string rows = csv_header(',') + "\n";
    rows += "1,cb1,1,,M,5.0e+09,2009-03-01 00:00:00 UTC\n";
    rows += "2,t1,0,M,A,1.0e+09,2010-03-02 00:00:00 UTC\n";
    rows += "3,t2,0,A,B,2.0e+08,2011-05-01 00:00:00 UTC\n";
    write_file(tmp.file("span.csv"), rows);

    RunConfig cfg = base_config(tmp.file("span.csv"), tmp.file("out"));
    cfg.year_min = 2010;
    cfg.year_max = 2010;
    run_pipeline(cfg);
    MetricsTable t = load_metrics(tmp.file("out") + "/metrics.csv");
    CHECK(t.has_year(2010));
    CHECK_FALSE(t.has_year(2009));
    CHECK_FALSE(t.has_year(2011));
    CHECK(fs::exists(tmp.file("out") + "/ledger_2010.csv"));
    CHECK_FALSE(fs::exists(tmp.file("out") + "/ledger_2009.csv"));
}

TEST_CASE("labels surface in the rich set report") {
    TempDir tmp("chainnet_pipe");
    std::string rows = csv_header(',') + "\n";
    rows += "1,cb1,1,,MINER,5.0e+09,2009-03-01 00:00:00 UTC\n";
    write_file(tmp.file("one.csv"), rows);
    write_file(tmp.file("labels.tsv"), "0\tBigMiner\n");

    RunConfig cfg = base_config(tmp.file("one.csv"), tmp.file("out"));
    cfg.labels_path = tmp.file("labels.tsv");
    run_pipeline(cfg);
    std::string rich = read_file(tmp.file("out") + "/rich_sets.csv");
    CHECK(rich.find("2009,balance,1,0,MINER,50000000000000,BigMiner") !=
          std::string::npos);
}
