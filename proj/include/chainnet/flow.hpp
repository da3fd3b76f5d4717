#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chainnet/ingest.hpp"
#include "chainnet/money.hpp"

namespace chainnet {

using NodeId = std::uint64_t;

// One transaction, reduced to per-address input/output margins.
struct TransactionGroup {
    std::string tx_id;
    std::int64_t timestamp = 0;
    bool coinbase = false;
    std::vector<std::pair<NodeId, Quanta>> inputs;   // sorted by address, unique
    std::vector<std::pair<NodeId, Quanta>> outputs;  // sorted by address, unique

    Quanta t_in() const;
    Quanta t_out() const;
    Quanta t_fee() const { return t_in() - t_out(); }
};

// A fee-adjusted directed value flow within one transaction. value > 0 always;
// src == dst (self-pairs) are emitted here and stripped by snapshot policy.
struct FlowEdge {
    NodeId src = 0;
    NodeId dst = 0;
    Quanta value = 0;
    std::string tx_id;
    std::int64_t timestamp = 0;
};

struct CoinbaseCredit {
    NodeId dst = 0;
    Quanta value = 0;
    std::int64_t timestamp = 0;
};

// Splits total across the given non-negative weights so the parts sum to
// total exactly: floor shares first, then one extra unit each to the largest
// fractional remainders (ties broken by lower id). total <= sum of weights is
// required.
std::vector<Quanta> apportion_largest_remainder(
    Quanta total, std::span<const std::pair<NodeId, Quanta>> weights);

// Per-pair value attribution: each input's fee-adjusted amount
// v_in(i) * t_out / t_in is spread over the outputs in proportion to
// v_out(j) / t_out, largest-remainder rounded per input. The emitted flows sum
// to t_out exactly; zero-valued results are dropped. A transaction whose
// outputs are all zero emits nothing (logged). Coinbase input is a contract
// violation (std::invalid_argument).
std::vector<FlowEdge> attribute_flows(const TransactionGroup& tx);

// Fee share per input address: v_in(i) minus the fee-adjusted amount used
// above. Sums to t_fee exactly. Entries with zero share are included.
std::vector<std::pair<NodeId, Quanta>> input_fee_shares(const TransactionGroup& tx);

// One credit per positive coinbase output. Non-coinbase input is a contract
// violation.
std::vector<CoinbaseCredit> coinbase_credits(const TransactionGroup& tx);

// Rebuilds TransactionGroups from a block-ordered record stream: rows are
// bucketed by transaction id within a block and flushed, in first-seen order,
// when the block number changes. Each row's value contributes to both the
// row's input margin and its output margin, so reconstructed groups carry
// t_in == t_out (the row format cannot express a fee; see attribute_flows for
// the general case).
class TxAssembler {
public:
    using Sink = std::function<void(TransactionGroup&&)>;

    TxAssembler(AddressDictionary& dict, Sink sink);

    void add(const TransactionRecord& rec);  // throws DataError on inconsistent groups
    void finish();

private:
    struct Pending {
        std::string tx_id;
        std::int64_t timestamp = 0;
        bool coinbase = false;
        std::unordered_map<NodeId, Quanta> in;
        std::unordered_map<NodeId, Quanta> out;
    };

    void flush_block();

    AddressDictionary& dict_;
    Sink sink_;
    bool have_block_ = false;
    std::uint64_t cur_block_ = 0;
    std::vector<Pending> order_;
    std::unordered_map<std::string, size_t> index_;
    std::unordered_set<std::uint64_t> flushed_blocks_;
};

}  // namespace chainnet
