#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "chainnet/ingest.hpp"
#include "chainnet/money.hpp"

namespace chainnet {

// Synthetic chain parameters. The defaults produce a stream whose wealth
// dynamics are strong enough for trend tests at desk scale.
struct SynthConfig {
    enum class Mode { uniform, preferential };

    std::uint64_t seed = 1;
    int start_year = 2009;
    int years = 15;
    std::uint64_t tx_per_year = 1000;
    std::uint64_t blocks_per_year = 365;
    Mode mode = Mode::preferential;
    std::uint64_t initial_pool = 1500;   // addresses existing before block 0
    double pool_growth = 0.45;           // target yearly growth of that pool
    double dust_fraction = 0.02;         // share of txs that are one-off dust sends
    std::uint32_t fee_per_mille = 2;     // fee as 1/1000 of the spent amount
    Sats initial_reward_sats = 50 * kSatsPerBtc;
    std::uint64_t halving_interval_blocks = 4 * 365;
    std::uint64_t miner_count = 16;

    void validate() const;  // throws ConfigError
};

const char* synth_mode_name(SynthConfig::Mode mode);

// Emits a block-ordered Table-layout record stream: one coinbase row per
// block (while the reward lasts) followed by single-input single-output
// spends. Fees are destroyed, so internally
// sum(balances) = coinbase issued - fees, which the generator asserts after
// every block. Emitted row values are post-fee. Byte-deterministic per seed.
class ChainGenerator {
public:
    struct Stats {
        Sats coinbase_issued = 0;
        Sats fees_destroyed = 0;
        Sats balance_sum = 0;
        std::uint64_t addresses = 0;
        std::uint64_t transactions = 0;  // spends, excluding coinbase
        std::uint64_t blocks = 0;
    };

    explicit ChainGenerator(SynthConfig cfg);

    // Single-shot. Throws ConfigError when the config is infeasible (a spend
    // is required but nothing holds a balance).
    void generate(const std::function<void(const TransactionRecord&)>& sink);

    const Stats& stats() const { return stats_; }

private:
    struct Impl;
    SynthConfig cfg_;
    Stats stats_;
    bool used_ = false;
};

// Convenience: generate straight into a CSV file (header included).
ChainGenerator::Stats write_chain_csv(const SynthConfig& cfg, const std::string& path);

}  // namespace chainnet
