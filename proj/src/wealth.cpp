#include "chainnet/wealth.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include "chainnet/error.hpp"
#include "chainnet/ingest.hpp"

namespace chainnet {

const char* rich_kind_name(RichKind kind) {
    return kind == RichKind::balance ? "balance" : "indegree";
}

void WealthLedgers::advance_year(const YearWealthInput& in) {
    if (year_ && in.year != *year_ + 1)
        throw std::invalid_argument("wealth: year " + std::to_string(in.year) +
                                    " applied after " + std::to_string(*year_));
    Quanta fee_sum = 0, cb_sum = 0;
    for (const auto& e : in.edges) {
        balances_[e.dst] += e.w1;
        balances_[e.src] -= e.w1;
        indegrees_[e.dst] += e.w2;
    }
    for (const auto& [addr, q] : in.fees) {
        if (q < 0) throw std::invalid_argument("wealth: negative fee entry");
        balances_[addr] -= q;
        fee_sum += q;
    }
    for (const auto& [addr, q] : in.coinbase) {
        if (q < 0) throw std::invalid_argument("wealth: negative coinbase entry");
        balances_[addr] += q;
        cb_sum += q;
    }
    fees_by_year_[in.year] = fee_sum;
    coinbase_by_year_[in.year] = cb_sum;
    year_ = in.year;
}

Quanta WealthLedgers::fees_total() const {
    Quanta t = 0;
    for (const auto& [y, q] : fees_by_year_) t += q;
    return t;
}

Quanta WealthLedgers::coinbase_total() const {
    Quanta t = 0;
    for (const auto& [y, q] : coinbase_by_year_) t += q;
    return t;
}

Quanta WealthLedgers::balance_total() const {
    Quanta t = 0;
    for (const auto& [a, q] : balances_) t += q;
    return t;
}

std::size_t WealthLedgers::negative_balance_count() const {
    std::size_t n = 0;
    for (const auto& [a, q] : balances_)
        if (q < 0) ++n;
    return n;
}

RichSet WealthLedgers::top_k(RichKind kind, std::size_t k) const {
    if (balances_.empty()) throw std::invalid_argument("wealth: empty ledgers");
    RichSet set;
    set.year = year_.value_or(0);
    set.kind = kind;

    std::vector<std::pair<NodeId, Quanta>> entries;
    if (kind == RichKind::balance) {
        entries.assign(balances_.begin(), balances_.end());
    } else {
        entries.reserve(indegrees_.size());
        for (const auto& [a, d] : indegrees_)
            entries.emplace_back(a, static_cast<Quanta>(d));
        if (entries.size() < std::min(k, balances_.size())) {
            // Pad with never-receiving addresses at in-degree 0 so the top
            // set always covers the k largest of the whole population.
            std::vector<NodeId> zeros;
            for (const auto& [a, q] : balances_)
                if (!indegrees_.count(a)) zeros.push_back(a);
            std::sort(zeros.begin(), zeros.end());
            for (NodeId a : zeros) entries.emplace_back(a, 0);
        }
    }

    std::size_t take = std::min(k, entries.size());
    std::partial_sort(entries.begin(), entries.begin() + take, entries.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second > b.second;
                          return a.first < b.first;
                      });
    entries.resize(take);
    set.members = std::move(entries);
    return set;
}

double WealthLedgers::richness_ratio(RichKind kind, std::size_t k) const {
    RichSet top = top_k(kind, k);
    Quanta top_sum = 0;
    for (const auto& [a, v] : top.members) top_sum += v;

    Quanta total = 0;
    if (kind == RichKind::balance) {
        total = balance_total();
    } else {
        for (const auto& [a, d] : indegrees_) total += static_cast<Quanta>(d);
    }
    if (total <= 0)
        throw std::domain_error("richness ratio undefined: non-positive network total");

    auto n = static_cast<double>(balances_.size());
    auto kk = static_cast<double>(top.members.size());
    return (static_cast<double>(top_sum) / kk) / (static_cast<double>(total) / n);
}

std::vector<std::size_t> union_growth(const std::vector<RichSet>& sets) {
    std::vector<std::size_t> series;
    series.reserve(sets.size());
    std::unordered_set<NodeId> seen;
    for (const auto& s : sets) {
        for (const auto& [a, v] : s.members) seen.insert(a);
        series.push_back(seen.size());
    }
    return series;
}

std::unordered_map<NodeId, std::string> load_label_file(const std::string& path) {
    LineReader reader(path);
    std::unordered_map<NodeId, std::string> labels;
    std::string line;
    std::size_t lineno = 0;
    while (reader.next(line)) {
        ++lineno;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw DataError(path + " line " + std::to_string(lineno) +
                            ": expected id<TAB>name");
        std::string id_part = line.substr(0, tab);
        NodeId id = 0;
        for (char c : id_part) {
            if (c < '0' || c > '9')
                throw DataError(path + " line " + std::to_string(lineno) +
                                ": non-numeric id");
            id = id * 10 + static_cast<NodeId>(c - '0');
        }
        auto [it, inserted] = labels.emplace(id, std::string(line.substr(tab + 1)));
        if (!inserted)
            throw DataError(path + " line " + std::to_string(lineno) +
                            ": duplicate id " + std::to_string(id));
    }
    return labels;
}

std::vector<LabeledMember> label_rich_set(
    const RichSet& set, const std::unordered_map<NodeId, std::string>& labels) {
    std::vector<LabeledMember> out;
    out.reserve(set.members.size());
    for (const auto& [id, value] : set.members) {
        LabeledMember m;
        m.id = id;
        m.value = value;
        auto it = labels.find(id);
        if (it != labels.end()) m.label = it->second;
        out.push_back(std::move(m));
    }
    return out;
}

void write_ledger_checkpoint(const WealthLedgers& ledgers, const std::string& path) {
    std::vector<NodeId> ids;
    ids.reserve(ledgers.balances().size());
    for (const auto& [a, q] : ledgers.balances()) ids.push_back(a);
    std::sort(ids.begin(), ids.end());

    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fputs("address_id,balance_quanta,indegree\n", f);
    for (NodeId a : ids) {
        auto deg_it = ledgers.indegrees().find(a);
        std::uint64_t deg = deg_it == ledgers.indegrees().end() ? 0 : deg_it->second;
        std::string line = std::to_string(a) + "," +
                           quanta_to_string(ledgers.balances().at(a)) + "," +
                           std::to_string(deg) + "\n";
        std::fputs(line.c_str(), f);
    }
    if (std::fclose(f) != 0) throw IoError("write error on " + path);
}

}  // namespace chainnet
