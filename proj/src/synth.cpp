#include "chainnet/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "chainnet/error.hpp"
#include "chainnet/rng.hpp"
#include "chainnet/timeutil.hpp"

namespace chainnet {

void SynthConfig::validate() const {
    if (years < 1) throw ConfigError("synth: years must be >= 1");
    if (start_year < 2009) throw ConfigError("synth: start_year must be >= 2009");
    if (blocks_per_year < 1) throw ConfigError("synth: blocks_per_year must be >= 1");
    if (halving_interval_blocks < 1)
        throw ConfigError("synth: halving_interval_blocks must be >= 1");
    if (miner_count < 1) throw ConfigError("synth: miner_count must be >= 1");
    if (initial_pool < miner_count)
        throw ConfigError("synth: initial_pool must cover the miners");
    if (pool_growth < 0.0) throw ConfigError("synth: pool_growth must be >= 0");
    if (dust_fraction < 0.0 || dust_fraction >= 1.0)
        throw ConfigError("synth: dust_fraction must lie in [0, 1)");
    if (fee_per_mille > 1000) throw ConfigError("synth: fee_per_mille must be <= 1000");
    if (initial_reward_sats < 0) throw ConfigError("synth: negative reward");
}

const char* synth_mode_name(SynthConfig::Mode mode) {
    return mode == SynthConfig::Mode::uniform ? "uniform" : "preferential";
}

namespace {

constexpr Sats kDustSats = 10000;  // matches the annual filter threshold

class GeneratorState {
public:
    GeneratorState(const SynthConfig& cfg, ChainGenerator::Stats& stats,
                   const std::function<void(const TransactionRecord&)>& sink)
        : cfg_(cfg), stats_(stats), sink_(sink), rng_(cfg.seed) {
        for (std::uint64_t i = 0; i < cfg_.initial_pool; ++i) new_address();
    }

    void run() {
        std::uint64_t block = 0;
        for (int y = 0; y < cfg_.years; ++y) {
            int year = cfg_.start_year + y;
            std::int64_t y0 = year_start_epoch(year);
            std::int64_t span = year_start_epoch(year + 1) - y0;
            // Roughly constant per-tx probability of minting a fresh receiver,
            // aimed at the configured pool growth for this year.
            double p_new = 0.0;
            if (cfg_.tx_per_year > 0)
                p_new = std::min(0.9, cfg_.pool_growth * static_cast<double>(addr_count()) /
                                          static_cast<double>(cfg_.tx_per_year));

            std::uint64_t done = 0;
            for (std::uint64_t b = 0; b < cfg_.blocks_per_year; ++b, ++block) {
                std::int64_t ts =
                    y0 + static_cast<std::int64_t>(b) * span /
                             static_cast<std::int64_t>(cfg_.blocks_per_year);
                emit_coinbase(block, ts);
                std::uint64_t until =
                    cfg_.tx_per_year * (b + 1) / cfg_.blocks_per_year;
                for (; done < until; ++done) emit_spend(block, ts, p_new);
                check_books(block);
                stats_.blocks += 1;
            }
        }
        stats_.addresses = addr_count();
    }

private:
    std::uint64_t addr_count() const { return balance_.size(); }

    std::uint64_t new_address() {
        std::uint64_t id = balance_.size();
        balance_.push_back(0);
        funded_pos_.push_back(SIZE_MAX);
        urn_.push_back(id);  // one seed entry so fresh addresses can be drawn
        return id;
    }

    void credit(std::uint64_t addr, Sats amount) {
        if (amount <= 0) return;
        if (balance_[addr] == 0) {
            funded_pos_[addr] = funded_.size();
            funded_.push_back(addr);
        }
        balance_[addr] += amount;
        stats_.balance_sum += amount;
    }

    void debit(std::uint64_t addr, Sats amount) {
        balance_[addr] -= amount;
        stats_.balance_sum -= amount;
        if (balance_[addr] == 0) {
            std::size_t pos = funded_pos_[addr];
            std::uint64_t last = funded_.back();
            funded_[pos] = last;
            funded_pos_[last] = pos;
            funded_.pop_back();
            funded_pos_[addr] = SIZE_MAX;
        }
    }

    Sats reward_for(std::uint64_t block) const {
        std::uint64_t halvings = block / cfg_.halving_interval_blocks;
        if (halvings >= 63) return 0;
        return cfg_.initial_reward_sats >> halvings;
    }

    void emit_coinbase(std::uint64_t block, std::int64_t ts) {
        Sats reward = reward_for(block);
        if (reward <= 0) return;
        std::uint64_t miner = block % cfg_.miner_count;
        TransactionRecord rec;
        rec.block_number = block;
        rec.transaction_id = std::to_string(next_tx_id_++);
        rec.is_coinbase = true;
        rec.output_address = std::to_string(miner);
        rec.value = reward;
        rec.timestamp = ts;
        sink_(rec);
        credit(miner, reward);
        stats_.coinbase_issued += reward;
    }

    std::uint64_t pick_receiver(double p_new) {
        if (rng_.next_double() < p_new) return new_address();
        if (cfg_.mode == SynthConfig::Mode::uniform)
            return rng_.next_below(addr_count());
        return urn_[rng_.next_below(urn_.size())];
    }

    void emit_spend(std::uint64_t block, std::int64_t ts, double p_new) {
        if (funded_.empty())
            throw ConfigError("synth: infeasible config, no spendable balance at block " +
                              std::to_string(block));
        std::uint64_t sender = funded_[rng_.next_below(funded_.size())];

        bool dust = rng_.next_double() < cfg_.dust_fraction;
        Sats spend;
        std::uint64_t receiver;
        if (dust) {
            spend = std::min<Sats>(balance_[sender],
                                   1 + static_cast<Sats>(rng_.next_below(kDustSats)));
            receiver = new_address();  // fresh pair keeps the yearly edge under threshold
        } else {
            Sats pct = 10 + static_cast<Sats>(rng_.next_below(81));
            spend = std::max<Sats>(1, balance_[sender] / 100 * pct);
            receiver = pick_receiver(p_new);
        }

        Sats fee = spend / 1000 * static_cast<Sats>(cfg_.fee_per_mille) +
                   spend % 1000 * static_cast<Sats>(cfg_.fee_per_mille) / 1000;
        if (spend - fee < 1) fee = spend - 1;
        Sats transfer = spend - fee;

        TransactionRecord rec;
        rec.block_number = block;
        rec.transaction_id = std::to_string(next_tx_id_++);
        rec.is_coinbase = false;
        rec.input_address = std::to_string(sender);
        rec.output_address = std::to_string(receiver);
        rec.value = transfer;
        rec.timestamp = ts;
        sink_(rec);

        debit(sender, spend);
        credit(receiver, transfer);
        urn_.push_back(receiver);
        stats_.fees_destroyed += fee;
        stats_.transactions += 1;
    }

    void check_books(std::uint64_t block) const {
        if (stats_.balance_sum != stats_.coinbase_issued - stats_.fees_destroyed)
            throw std::logic_error("synth accounting broken at block " +
                                   std::to_string(block));
    }

    const SynthConfig& cfg_;
    ChainGenerator::Stats& stats_;
    const std::function<void(const TransactionRecord&)>& sink_;
    SplitMix64 rng_;
    std::vector<Sats> balance_;
    std::vector<std::size_t> funded_pos_;
    std::vector<std::uint64_t> funded_;
    std::vector<std::uint64_t> urn_;
    std::uint64_t next_tx_id_ = 0;
};

}  // namespace

ChainGenerator::ChainGenerator(SynthConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void ChainGenerator::generate(const std::function<void(const TransactionRecord&)>& sink) {
    if (used_) throw std::logic_error("ChainGenerator::generate called twice");
    used_ = true;
    GeneratorState state(cfg_, stats_, sink);
    state.run();
}

ChainGenerator::Stats write_chain_csv(const SynthConfig& cfg, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::string header = csv_header(',') + "\n";
    std::fputs(header.c_str(), f);
    ChainGenerator gen(cfg);
    try {
        gen.generate([&](const TransactionRecord& rec) {
            std::string line = record_to_csv(rec, ',') + "\n";
            if (std::fputs(line.c_str(), f) == EOF)
                throw IoError("write error on " + path);
        });
    } catch (...) {
        std::fclose(f);
        throw;
    }
    if (std::fclose(f) != 0) throw IoError("write error on " + path);
    return gen.stats();
}

}  // namespace chainnet
