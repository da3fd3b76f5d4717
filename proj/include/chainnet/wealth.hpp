#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chainnet/snapshot.hpp"

namespace chainnet {

enum class RichKind { balance, indegree };

const char* rich_kind_name(RichKind kind);

// Top-k addresses for one year, ordered by value descending then id
// ascending. In-degree values are carried as Quanta so both kinds share a
// shape.
struct RichSet {
    int year = 0;
    RichKind kind = RichKind::balance;
    std::vector<std::pair<NodeId, Quanta>> members;
};

// One year of inputs for the ledgers: the dust-filtered aggregated edges
// with self-loops kept, plus per-address fee debits and coinbase credits
// from the raw transactions.
struct YearWealthInput {
    int year = 0;
    std::vector<AggregatedEdge> edges;
    std::vector<std::pair<NodeId, Quanta>> fees;
    std::vector<std::pair<NodeId, Quanta>> coinbase;
};

// Cumulative balance and in-degree accounts. Balances may go negative (a
// side effect of filtering out dust edges an address funded); they are kept
// as-is and counted. Years must be applied consecutively; carryover is
// implicit in the retained maps.
class WealthLedgers {
public:
    void advance_year(const YearWealthInput& in);

    std::optional<int> year() const { return year_; }
    const std::unordered_map<NodeId, Quanta>& balances() const { return balances_; }
    const std::unordered_map<NodeId, std::uint64_t>& indegrees() const {
        return indegrees_;
    }
    const std::map<int, Quanta>& fees_by_year() const { return fees_by_year_; }
    const std::map<int, Quanta>& coinbase_by_year() const { return coinbase_by_year_; }

    Quanta fees_total() const;
    Quanta coinbase_total() const;
    Quanta balance_total() const;
    std::size_t negative_balance_count() const;

    // The ranked population is every address the ledgers have touched;
    // addresses that never received count as in-degree 0.
    RichSet top_k(RichKind kind, std::size_t k = 10) const;

    // Mean of the top-k over the mean of the whole population; >= 1 by
    // construction. Throws std::domain_error when the population total is
    // not positive.
    double richness_ratio(RichKind kind, std::size_t k = 10) const;

private:
    std::optional<int> year_;
    std::unordered_map<NodeId, Quanta> balances_;
    std::unordered_map<NodeId, std::uint64_t> indegrees_;
    std::map<int, Quanta> fees_by_year_;
    std::map<int, Quanta> coinbase_by_year_;
};

// |union of the member sets over years 1..t| for each t; nondecreasing and
// bounded by k*t.
std::vector<std::size_t> union_growth(const std::vector<RichSet>& sets);

// Optional display names, "id<TAB>name" per line. Duplicate ids and
// malformed lines are errors naming the line.
std::unordered_map<NodeId, std::string> load_label_file(const std::string& path);

struct LabeledMember {
    NodeId id = 0;
    Quanta value = 0;
    std::string label;  // empty when unlabeled
};

std::vector<LabeledMember> label_rich_set(
    const RichSet& set, const std::unordered_map<NodeId, std::string>& labels);

// Sorted "address_id,balance_quanta,indegree" rows with a header line.
void write_ledger_checkpoint(const WealthLedgers& ledgers, const std::string& path);

}  // namespace chainnet
