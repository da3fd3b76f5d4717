#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainnet/flow.hpp"
#include "chainnet/money.hpp"

namespace chainnet {

// One aggregated directed edge of a yearly graph. w1 sums the flow values,
// w2 counts the contributing flows.
struct AggregatedEdge {
    NodeId src = 0;
    NodeId dst = 0;
    Quanta w1 = 0;
    std::uint64_t w2 = 0;

    bool operator==(const AggregatedEdge& o) const {
        return src == o.src && dst == o.dst && w1 == o.w1 && w2 == o.w2;
    }
};

struct StripPolicy {
    bool drop_self_loops = true;
};

// A calendar-year aggregated graph. edges are sorted by (src, dst) and unique;
// nodes is the sorted set of edge endpoints.
struct YearSnapshot {
    int year = 0;
    bool filtered = false;
    Quanta threshold = 0;
    bool self_loops_stripped = true;
    std::vector<AggregatedEdge> edges;
    std::vector<NodeId> nodes;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }
    Quanta total_w1() const;
    std::uint64_t total_w2() const;
};

// Streaming (src, dst) aggregator for one year. Flows are hashed into
// partitions; when the live entry count crosses the memory budget the
// partitions spill to temporary files and are re-merged at finish(), so a
// year larger than memory still aggregates correctly. The result is
// identical for any insertion order.
class SnapshotBuilder {
public:
    struct Options {
        StripPolicy policy;
        std::size_t partitions = 16;
        std::size_t max_entries_in_memory = 1u << 22;
        std::string spill_dir;  // empty: system temp dir
    };

    explicit SnapshotBuilder(int year);
    SnapshotBuilder(int year, Options opt);
    ~SnapshotBuilder();

    SnapshotBuilder(const SnapshotBuilder&) = delete;
    SnapshotBuilder& operator=(const SnapshotBuilder&) = delete;

    void add(const FlowEdge& flow);  // throws std::invalid_argument off-year
    void add(NodeId src, NodeId dst, Quanta value);
    YearSnapshot finish();

private:
    struct Partition;

    void spill_all();

    int year_;
    Options opt_;
    std::vector<Partition> parts_;
    std::size_t live_entries_ = 0;
    bool finished_ = false;
};

// Aggregates an in-memory flow list; convenience over SnapshotBuilder.
YearSnapshot build_snapshot(const std::vector<FlowEdge>& flows, int year,
                            StripPolicy policy = {});

// Builds a snapshot directly from edge data: duplicates of the same (src, dst)
// are merged, self-loops dropped per policy, edges sorted, nodes derived.
YearSnapshot make_snapshot(int year, std::vector<AggregatedEdge> edges,
                           StripPolicy policy = {}, bool filtered = false,
                           Quanta threshold = 0);

// Drops edges with w1 <= threshold and the nodes this isolates.
// The input must be unfiltered.
YearSnapshot apply_dust_filter(const YearSnapshot& s,
                               Quanta threshold = kDustThresholdQuanta);

// Removes src == dst edges (used when a year was aggregated with loops kept
// so the same aggregation can serve both graph metrics and balance ledgers).
YearSnapshot strip_self_loops(const YearSnapshot& s);

struct FilterCoverage {
    double volume_share = 0.0;
    double node_share = 0.0;
};

// Share of value and of nodes the filtered snapshot retains.
// Throws std::domain_error when raw is empty.
FilterCoverage filter_coverage(const YearSnapshot& raw, const YearSnapshot& filtered);

// Plain-text snapshot files: one metadata line, then sorted
// "src<TAB>dst<TAB>w1<TAB>w2" rows. Byte-deterministic for a fixed snapshot.
void write_snapshot(const YearSnapshot& s, const std::string& path);
YearSnapshot read_snapshot(const std::string& path);

}  // namespace chainnet
