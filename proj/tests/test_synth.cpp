#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "chainnet/error.hpp"
#include "chainnet/ingest.hpp"
#include "chainnet/metrics.hpp"
#include "chainnet/synth.hpp"
#include "testutil.hpp"

using namespace chainnet;

namespace {

SynthConfig small_config() {
    SynthConfig cfg;
    cfg.seed = 1;
    cfg.years = 2;
    cfg.tx_per_year = 400;
    cfg.blocks_per_year = 50;
    cfg.initial_pool = 100;
    cfg.miner_count = 8;
    return cfg;
}

struct StreamFacts {
    std::map<std::string, std::uint64_t> receipts;  // per non-coinbase receiver
    Sats coinbase_sum = 0;
    std::uint64_t coinbase_rows = 0;
    std::uint64_t spend_rows = 0;
    std::uint64_t max_block = 0;
};

StreamFacts scan_csv(const std::string& path) {
    StreamFacts facts;
    RecordReader reader(path);
    TransactionRecord rec;
    while (reader.next(rec)) {
        facts.max_block = std::max(facts.max_block, rec.block_number);
        if (rec.is_coinbase) {
            facts.coinbase_sum += rec.value;
            facts.coinbase_rows += 1;
        } else {
            facts.receipts[rec.output_address] += 1;
            facts.spend_rows += 1;
        }
    }
    return facts;
}

double receipt_gini(const StreamFacts& facts) {
    std::vector<double> counts;
    for (const auto& [addr, n] : facts.receipts) counts.push_back(double(n));
    return gini(counts);
}

}  // namespace

TEST_CASE("one seed pins the whole byte stream") {
    TempDir tmp("chainnet_synth");
    SynthConfig cfg = small_config();
    auto s1 = write_chain_csv(cfg, tmp.file("a.csv"));
    auto s2 = write_chain_csv(cfg, tmp.file("b.csv"));
    CHECK_EQ(read_file(tmp.file("a.csv")), read_file(tmp.file("b.csv")));
    CHECK_EQ(s1.coinbase_issued, s2.coinbase_issued);
    CHECK_EQ(s1.fees_destroyed, s2.fees_destroyed);

    cfg.seed = 2;
    write_chain_csv(cfg, tmp.file("c.csv"));
    CHECK_NE(read_file(tmp.file("a.csv")), read_file(tmp.file("c.csv")));
}

TEST_CASE("generator books balance and the stream matches its stats") {
    TempDir tmp("chainnet_synth");
    SynthConfig cfg = small_config();
    auto stats = write_chain_csv(cfg, tmp.file("chain.csv"));

    CHECK_EQ(stats.balance_sum, stats.coinbase_issued - stats.fees_destroyed);
    CHECK_EQ(stats.blocks, cfg.years * cfg.blocks_per_year);
    CHECK_EQ(stats.transactions, cfg.years * cfg.tx_per_year);
    CHECK(stats.addresses >= cfg.initial_pool);
    CHECK(stats.fees_destroyed > 0);

    StreamFacts facts = scan_csv(tmp.file("chain.csv"));
    CHECK_EQ(facts.coinbase_sum, stats.coinbase_issued);
    CHECK_EQ(facts.coinbase_rows, stats.blocks);  // reward never lapses here
    CHECK_EQ(facts.spend_rows, stats.transactions);
    CHECK_EQ(facts.max_block + 1, stats.blocks);
}

TEST_CASE("tx_per_year zero yields a coinbase-only stream") {
    std::vector<TransactionRecord> records;
    SynthConfig cfg = small_config();
    cfg.tx_per_year = 0;
    cfg.years = 1;
    cfg.blocks_per_year = 10;
    ChainGenerator gen(cfg);
    gen.generate([&](const TransactionRecord& rec) { records.push_back(rec); });
    REQUIRE_EQ(records.size(), 10);
    for (std::size_t b = 0; b < records.size(); ++b) {
        CHECK(records[b].is_coinbase);
        CHECK_EQ(records[b].block_number, b);
        CHECK_EQ(records[b].value, cfg.initial_reward_sats);
        CHECK_EQ(records[b].output_address,
                 std::to_string(b % cfg.miner_count));  // miners rotate
    }
    CHECK_EQ(gen.stats().transactions, 0);
}

TEST_CASE("block rewards halve on schedule and lapse to zero") {
    SynthConfig cfg = small_config();
    cfg.tx_per_year = 0;
    cfg.years = 1;
    cfg.blocks_per_year = 12;
    cfg.initial_reward_sats = 8;
    cfg.halving_interval_blocks = 2;
    std::vector<Sats> rewards;
    ChainGenerator gen(cfg);
    gen.generate([&](const TransactionRecord& rec) { rewards.push_back(rec.value); });
    CHECK_EQ(rewards, std::vector<Sats>{8, 8, 4, 4, 2, 2, 1, 1});  // blocks 8+ mint nothing
    CHECK_EQ(gen.stats().coinbase_issued, 30);
    CHECK_EQ(gen.stats().blocks, 12);
}

TEST_CASE("preferential attachment concentrates receipts") {
    TempDir tmp("chainnet_synth");
    SynthConfig cfg = small_config();
    cfg.years = 2;
    cfg.tx_per_year = 3000;
    cfg.blocks_per_year = 100;
    cfg.initial_pool = 300;
    cfg.dust_fraction = 0.0;  // keep every receiver comparable

    cfg.mode = SynthConfig::Mode::preferential;
    write_chain_csv(cfg, tmp.file("pref.csv"));
    cfg.mode = SynthConfig::Mode::uniform;
    write_chain_csv(cfg, tmp.file("unif.csv"));

    double pref = receipt_gini(scan_csv(tmp.file("pref.csv")));
    double unif = receipt_gini(scan_csv(tmp.file("unif.csv")));
    CHECK(pref > unif + 0.05);  // clearly more unequal, not a statistical fluke
}

TEST_CASE("configs are validated") {
    SynthConfig cfg = small_config();
    cfg.years = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.start_year = 2008;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.dust_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.fee_per_mille = 1001;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.initial_pool = cfg.miner_count - 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.blocks_per_year = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(ChainGenerator{cfg}, ConfigError);  // ctor validates too

    CHECK_EQ(std::string(synth_mode_name(SynthConfig::Mode::uniform)), "uniform");
    CHECK_EQ(std::string(synth_mode_name(SynthConfig::Mode::preferential)),
             "preferential");
}

TEST_CASE("a chain that cannot fund its spends is detected") {
    SynthConfig cfg = small_config();
    cfg.initial_reward_sats = 0;  // nobody ever holds anything
    cfg.tx_per_year = 5;
    ChainGenerator gen(cfg);
    CHECK(throws_with<ConfigError>(
        [&] { gen.generate([](const TransactionRecord&) {}); }, "infeasible"));
}
