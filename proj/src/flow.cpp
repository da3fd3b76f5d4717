#include "chainnet/flow.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "chainnet/error.hpp"
#include "chainnet/log.hpp"

namespace chainnet {

namespace {

Quanta sum_amounts(const std::vector<std::pair<NodeId, Quanta>>& v) {
    Quanta s = 0;
    for (const auto& [id, a] : v) s += a;
    return s;
}

void check_non_negative(const std::vector<std::pair<NodeId, Quanta>>& v, const char* side,
                        const std::string& tx_id) {
    for (const auto& [id, a] : v)
        if (a < 0) throw DataError("tx " + tx_id + ": negative " + side + " amount");
}

// Aggregate duplicate ids and sort; keeps the module safe on hand-built
// groups that bypass the assembler.
std::vector<std::pair<NodeId, Quanta>> normalized(
    std::span<const std::pair<NodeId, Quanta>> v) {
    std::vector<std::pair<NodeId, Quanta>> out(v.begin(), v.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t w = 0;
    for (size_t i = 0; i < out.size(); ++i) {
        if (w > 0 && out[w - 1].first == out[i].first)
            out[w - 1].second += out[i].second;
        else
            out[w++] = out[i];
    }
    out.resize(w);
    return out;
}

}  // namespace

Quanta TransactionGroup::t_in() const { return sum_amounts(inputs); }
Quanta TransactionGroup::t_out() const { return sum_amounts(outputs); }

std::vector<Quanta> apportion_largest_remainder(
    Quanta total, std::span<const std::pair<NodeId, Quanta>> weights) {
    if (total < 0) throw DataError("apportion: negative total");
    std::vector<Quanta> parts(weights.size(), 0);
    if (total == 0) return parts;

    Quanta wsum = 0;
    for (const auto& [id, w] : weights) {
        if (w < 0) throw DataError("apportion: negative weight");
        wsum += w;
    }
    if (wsum == 0) throw DataError("apportion: zero weight sum with positive total");
    if (total > wsum) throw DataError("apportion: total exceeds weight sum");

    Quanta assigned = 0;
    std::vector<Quanta> rems(weights.size());
    for (size_t i = 0; i < weights.size(); ++i) {
        MulDiv md = mul_div_mod(total, weights[i].second, wsum);
        parts[i] = md.quot;
        rems[i] = md.rem;
        assigned += md.quot;
    }
    Quanta leftover = total - assigned;  // < number of weights
    if (leftover > 0) {
        std::vector<size_t> idx(weights.size());
        std::iota(idx.begin(), idx.end(), size_t(0));
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
            if (rems[a] != rems[b]) return rems[a] > rems[b];
            return weights[a].first < weights[b].first;
        });
        for (size_t k = 0; k < size_t(leftover); ++k) parts[idx[k]] += 1;
    }
    return parts;
}

std::vector<FlowEdge> attribute_flows(const TransactionGroup& tx) {
    if (tx.coinbase)
        throw std::invalid_argument("attribute_flows: coinbase transaction");
    check_non_negative(tx.inputs, "input", tx.tx_id);
    check_non_negative(tx.outputs, "output", tx.tx_id);

    auto inputs = normalized(tx.inputs);
    auto outputs = normalized(tx.outputs);
    Quanta t_in = sum_amounts(inputs);
    Quanta t_out = sum_amounts(outputs);
    if (t_in < t_out)
        throw DataError("tx " + tx.tx_id + ": outputs exceed inputs (negative fee)");
    if (t_out == 0) {
        log_debug("tx " + tx.tx_id + ": zero output total, no flows");
        return {};
    }

    // Stage 1: fee-adjusted effective amount per input, summing to t_out.
    std::vector<Quanta> effective = apportion_largest_remainder(t_out, inputs);

    // Stage 2: spread each effective amount over the outputs.
    std::vector<FlowEdge> flows;
    flows.reserve(inputs.size() * outputs.size());
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (effective[i] == 0) continue;
        std::vector<Quanta> parts = apportion_largest_remainder(effective[i], outputs);
        for (size_t j = 0; j < outputs.size(); ++j) {
            if (parts[j] == 0) continue;
            flows.push_back({inputs[i].first, outputs[j].first, parts[j], tx.tx_id,
                             tx.timestamp});
        }
    }
    return flows;
}

std::vector<std::pair<NodeId, Quanta>> input_fee_shares(const TransactionGroup& tx) {
    if (tx.coinbase)
        throw std::invalid_argument("input_fee_shares: coinbase transaction");
    auto inputs = normalized(tx.inputs);
    auto outputs = normalized(tx.outputs);
    Quanta t_in = sum_amounts(inputs);
    Quanta t_out = sum_amounts(outputs);
    if (t_in < t_out)
        throw DataError("tx " + tx.tx_id + ": outputs exceed inputs (negative fee)");

    std::vector<std::pair<NodeId, Quanta>> shares(inputs.begin(), inputs.end());
    if (t_out == 0) return shares;  // everything is fee
    std::vector<Quanta> effective = apportion_largest_remainder(t_out, inputs);
    for (size_t i = 0; i < shares.size(); ++i) shares[i].second -= effective[i];
    return shares;
}

std::vector<CoinbaseCredit> coinbase_credits(const TransactionGroup& tx) {
    if (!tx.coinbase)
        throw std::invalid_argument("coinbase_credits: non-coinbase transaction");
    check_non_negative(tx.outputs, "output", tx.tx_id);
    std::vector<CoinbaseCredit> credits;
    for (const auto& [id, a] : normalized(tx.outputs))
        if (a > 0) credits.push_back({id, a, tx.timestamp});
    return credits;
}

// --- TxAssembler ---

TxAssembler::TxAssembler(AddressDictionary& dict, Sink sink)
    : dict_(dict), sink_(std::move(sink)) {}

void TxAssembler::add(const TransactionRecord& rec) {
    if (!have_block_ || rec.block_number != cur_block_) {
        if (have_block_) flush_block();
        if (flushed_blocks_.count(rec.block_number))
            throw DataError("block " + std::to_string(rec.block_number) +
                            " reappears after being flushed; input must be block-ordered");
        cur_block_ = rec.block_number;
        have_block_ = true;
    }

    auto [it, inserted] = index_.emplace(rec.transaction_id, order_.size());
    if (inserted) {
        Pending p;
        p.tx_id = rec.transaction_id;
        p.timestamp = rec.timestamp;
        p.coinbase = rec.is_coinbase;
        order_.push_back(std::move(p));
    }
    Pending& p = order_[it->second];
    if (p.coinbase != rec.is_coinbase)
        throw DataError("tx " + rec.transaction_id + ": mixed coinbase flag");

    Quanta q = sats_to_quanta(rec.value);
    p.out[dict_.intern(rec.output_address)] += q;
    if (!rec.is_coinbase) p.in[dict_.intern(rec.input_address)] += q;
}

void TxAssembler::flush_block() {
    for (Pending& p : order_) {
        TransactionGroup g;
        g.tx_id = std::move(p.tx_id);
        g.timestamp = p.timestamp;
        g.coinbase = p.coinbase;
        g.inputs.assign(p.in.begin(), p.in.end());
        g.outputs.assign(p.out.begin(), p.out.end());
        auto by_id = [](const auto& a, const auto& b) { return a.first < b.first; };
        std::sort(g.inputs.begin(), g.inputs.end(), by_id);
        std::sort(g.outputs.begin(), g.outputs.end(), by_id);
        sink_(std::move(g));
    }
    order_.clear();
    index_.clear();
    flushed_blocks_.insert(cur_block_);
}

void TxAssembler::finish() {
    if (have_block_) flush_block();
    have_block_ = false;
}

}  // namespace chainnet
