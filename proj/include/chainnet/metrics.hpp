#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chainnet/snapshot.hpp"

namespace chainnet {

// Per-node weighted degrees, one slot per snapshot node (same order as
// snapshot.nodes); nodes without edges in a direction hold 0.
struct DegreeVectors {
    std::vector<NodeId> nodes;
    std::vector<std::uint64_t> in_activity;
    std::vector<std::uint64_t> out_activity;
    std::vector<Quanta> in_value;
    std::vector<Quanta> out_value;
};

DegreeVectors degree_vectors(const YearSnapshot& s);

// Population moments. skewness and kurtosis are NaN when the standard
// deviation is zero; kurtosis is the plain fourth standardized moment
// (normal distribution: 3).
struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

Moments distribution_moments(std::span<const double> values);

// Gini coefficient over non-negative values, sorted O(n log n) form.
// Throws std::domain_error when all values are zero.
double gini(std::span<const double> values);

// |E| / (|V| * (|V| - 1)). Throws std::domain_error when node_count < 2.
double density(std::uint64_t node_count, std::uint64_t edge_count);
double density(const YearSnapshot& s);  // self-loops excluded from |E|

// Pearson correlation of endpoint total degrees on the undirected
// simplification; each edge contributes both orientations. NaN when a degree
// margin has zero variance. Throws std::domain_error with fewer than 2
// non-loop edges.
double degree_assortativity(const YearSnapshot& s);

// Directed variant: correlation of source out-degree with target in-degree
// over directed non-loop edges.
double directed_degree_assortativity(const YearSnapshot& s);

struct ClusteringOptions {
    std::size_t sample_size = 0;  // 0: exact over all nodes
    std::uint64_t sample_seed = 0;
    bool exclude_low_degree = false;  // drop degree<2 nodes from the mean
};

// Mean local clustering coefficient on the undirected simplification.
// Degree<2 nodes contribute 0 unless excluded. NaN on an empty snapshot (or
// when exclusion leaves nothing to average).
double average_local_clustering(const YearSnapshot& s, ClusteringOptions opt = {});

enum class ComponentMode { weak, strong };

// Node partition into connected components. labels are canonical: numbered
// by first appearance over nodes in ascending order, so two partitions are
// equal iff their label vectors are equal.
struct ComponentPartition {
    ComponentMode mode = ComponentMode::weak;
    std::vector<NodeId> nodes;          // sorted
    std::vector<std::uint32_t> labels;  // one per node
    std::vector<std::uint64_t> sizes;   // one per label

    std::size_t count() const { return sizes.size(); }
    std::uint32_t largest_label() const;  // max size, ties to the lower label
};

ComponentPartition connected_components(const YearSnapshot& s, ComponentMode mode);
ComponentPartition connected_components(std::span<const NodeId> nodes,
                                        std::span<const std::pair<NodeId, NodeId>> edges,
                                        ComponentMode mode);

double component_size_gini(const ComponentPartition& p);

struct TopShare {
    double in_share = 0.0;
    double out_share = 0.0;
};

// Share of w2-weighted in-edges (out-edges) received (sent) by the
// ceil(p * |V|) nodes of highest activity-weighted in-degree (out-degree).
// weighted=false ranks and sums by plain edge counts instead.
TopShare top_percent_edge_share(const YearSnapshot& s, double p = 0.01,
                                bool weighted = true);

struct TopMembership {
    double in_lscc = 0.0;
    double in_lwcc = 0.0;
    double out_lscc = 0.0;
    double out_lwcc = 0.0;
};

// Fraction of the top-p in-degree and out-degree node sets that fall inside
// the largest strongly and weakly connected components.
TopMembership top_percent_component_membership(const YearSnapshot& s, double p = 0.01);

}  // namespace chainnet
