#include "chainnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "chainnet/rng.hpp"

namespace chainnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t node_pos(const std::vector<NodeId>& nodes, NodeId id) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    return static_cast<std::size_t>(it - nodes.begin());
}

// Unique undirected non-loop pairs (positions, lo < hi).
std::vector<std::pair<std::uint32_t, std::uint32_t>> undirected_pairs(
    const YearSnapshot& s) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(s.edges.size());
    for (const auto& e : s.edges) {
        if (e.src == e.dst) continue;
        auto a = static_cast<std::uint32_t>(node_pos(s.nodes, e.src));
        auto b = static_cast<std::uint32_t>(node_pos(s.nodes, e.dst));
        if (a > b) std::swap(a, b);
        pairs.emplace_back(a, b);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

std::vector<std::vector<std::uint32_t>> undirected_adjacency(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [a, b] : pairs) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());
    return adj;
}

template <typename V>
std::vector<std::size_t> top_k_positions(const std::vector<V>& vals,
                                         const std::vector<NodeId>& ids, std::size_t k) {
    std::vector<std::size_t> idx(vals.size());
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    k = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (vals[a] != vals[b]) return vals[a] > vals[b];
                          return ids[a] < ids[b];
                      });
    idx.resize(k);
    return idx;
}

using Wide = __int128;

double wide_ratio(Wide num, Wide den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

DegreeVectors degree_vectors(const YearSnapshot& s) {
    DegreeVectors d;
    d.nodes = s.nodes;
    std::size_t n = s.nodes.size();
    d.in_activity.assign(n, 0);
    d.out_activity.assign(n, 0);
    d.in_value.assign(n, 0);
    d.out_value.assign(n, 0);
    for (const auto& e : s.edges) {
        std::size_t ps = node_pos(s.nodes, e.src);
        std::size_t pd = node_pos(s.nodes, e.dst);
        d.out_activity[ps] += e.w2;
        d.out_value[ps] += e.w1;
        d.in_activity[pd] += e.w2;
        d.in_value[pd] += e.w1;
    }
    return d;
}

Moments distribution_moments(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("distribution_moments: empty input");
    long double n = static_cast<long double>(values.size());
    long double sum = 0;
    for (double v : values) sum += v;
    long double mean = sum / n;

    long double m2 = 0, m3 = 0, m4 = 0;
    for (double v : values) {
        long double d = v - mean;
        long double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    Moments out;
    out.mean = static_cast<double>(mean);
    long double sd = std::sqrt(m2);
    out.stddev = static_cast<double>(sd);
    if (sd == 0.0L) {
        out.skewness = kNaN;
        out.kurtosis = kNaN;
    } else {
        out.skewness = static_cast<double>(m3 / (sd * sd * sd));
        out.kurtosis = static_cast<double>(m4 / (m2 * m2));
    }
    return out;
}

double gini(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("gini: empty input");
    for (double v : values)
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("gini: values must be finite and non-negative");
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    long double total = 0, weighted = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += x[i];
        weighted += static_cast<long double>(i + 1) * x[i];
    }
    if (total == 0.0L) throw std::domain_error("gini undefined: all values are zero");
    long double n = static_cast<long double>(x.size());
    return static_cast<double>(2.0L * weighted / (n * total) - (n + 1.0L) / n);
}

double density(std::uint64_t node_count, std::uint64_t edge_count) {
    if (node_count < 2)
        throw std::domain_error("density undefined for fewer than 2 nodes");
    long double pairs = static_cast<long double>(node_count) *
                        static_cast<long double>(node_count - 1);
    return static_cast<double>(static_cast<long double>(edge_count) / pairs);
}

double density(const YearSnapshot& s) {
    std::uint64_t e = 0;
    for (const auto& edge : s.edges)
        if (edge.src != edge.dst) ++e;
    return density(s.nodes.size(), e);
}

double degree_assortativity(const YearSnapshot& s) {
    std::size_t directed = 0;
    for (const auto& e : s.edges)
        if (e.src != e.dst) ++directed;
    if (directed < 2)
        throw std::domain_error("assortativity undefined with fewer than 2 edges");
    auto pairs = undirected_pairs(s);
    std::vector<std::uint64_t> deg(s.nodes.size(), 0);
    for (const auto& [a, b] : pairs) {
        deg[a] += 1;
        deg[b] += 1;
    }
    // Each undirected edge contributes (da, db) and (db, da); with that
    // symmetry both margins share the same sums, so exact integer
    // accumulation gives r = cov/var directly.
    Wide sx = 0, sxx = 0, sxy = 0;
    for (const auto& [a, b] : pairs) {
        Wide da = deg[a], db = deg[b];
        sx += da + db;
        sxx += da * da + db * db;
        sxy += 2 * da * db;
    }
    Wide m = 2 * static_cast<Wide>(pairs.size());
    Wide var = m * sxx - sx * sx;
    if (var == 0) return kNaN;
    return wide_ratio(m * sxy - sx * sx, var);
}

double directed_degree_assortativity(const YearSnapshot& s) {
    std::vector<std::uint64_t> outd(s.nodes.size(), 0), ind(s.nodes.size(), 0);
    std::uint64_t m = 0;
    for (const auto& e : s.edges) {
        if (e.src == e.dst) continue;
        outd[node_pos(s.nodes, e.src)] += 1;
        ind[node_pos(s.nodes, e.dst)] += 1;
        ++m;
    }
    if (m < 2)
        throw std::domain_error("assortativity undefined with fewer than 2 edges");
    Wide sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& e : s.edges) {
        if (e.src == e.dst) continue;
        Wide x = outd[node_pos(s.nodes, e.src)];
        Wide y = ind[node_pos(s.nodes, e.dst)];
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    Wide wm = static_cast<Wide>(m);
    Wide vx = wm * sxx - sx * sx;
    Wide vy = wm * syy - sy * sy;
    if (vx == 0 || vy == 0) return kNaN;
    return static_cast<double>(wm * sxy - sx * sy) /
           std::sqrt(static_cast<double>(vx) * static_cast<double>(vy));
}

double average_local_clustering(const YearSnapshot& s, ClusteringOptions opt) {
    std::size_t n = s.nodes.size();
    if (n == 0) return kNaN;
    auto pairs = undirected_pairs(s);
    auto adj = undirected_adjacency(n, pairs);

    std::vector<std::uint32_t> chosen;
    if (opt.sample_size > 0 && opt.sample_size < n) {
        std::vector<std::uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        SplitMix64 rng(opt.sample_seed);
        for (std::size_t k = 0; k < opt.sample_size; ++k) {
            std::size_t j = k + static_cast<std::size_t>(rng.next_below(n - k));
            std::swap(idx[k], idx[j]);
        }
        idx.resize(opt.sample_size);
        std::sort(idx.begin(), idx.end());
        chosen = std::move(idx);
    } else {
        chosen.resize(n);
        std::iota(chosen.begin(), chosen.end(), 0u);
    }

    long double acc = 0;
    std::size_t counted = 0;
    for (std::uint32_t v : chosen) {
        const auto& nv = adj[v];
        std::size_t d = nv.size();
        if (d < 2) {
            if (!opt.exclude_low_degree) ++counted;
            continue;
        }
        std::uint64_t tri = 0;
        for (std::size_t i = 0; i + 1 < d; ++i) {
            const auto& na = adj[nv[i]];
            for (std::size_t j = i + 1; j < d; ++j)
                tri += std::binary_search(na.begin(), na.end(), nv[j]) ? 1 : 0;
        }
        acc += 2.0L * static_cast<long double>(tri) /
               (static_cast<long double>(d) * static_cast<long double>(d - 1));
        ++counted;
    }
    if (counted == 0) return kNaN;
    return static_cast<double>(acc / static_cast<long double>(counted));
}

namespace {

struct CorePartition {
    std::vector<std::uint32_t> labels;
    std::vector<std::uint64_t> sizes;
};

void canonicalize(std::vector<std::uint32_t>& raw, std::uint32_t raw_count,
                  CorePartition& out) {
    std::vector<std::uint32_t> remap(raw_count, UINT32_MAX);
    std::uint32_t next = 0;
    out.labels.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::uint32_t& r = remap[raw[i]];
        if (r == UINT32_MAX) r = next++;
        out.labels[i] = r;
    }
    out.sizes.assign(next, 0);
    for (std::uint32_t l : out.labels) out.sizes[l] += 1;
}

CorePartition weak_components(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<std::uint32_t> parent(n), rank_(n, 0);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [a, b] : edges) {
        std::uint32_t ra = find(a), rb = find(b);
        if (ra == rb) continue;
        if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
        parent[rb] = ra;
        if (rank_[ra] == rank_[rb]) rank_[ra] += 1;
    }
    std::vector<std::uint32_t> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = find(static_cast<std::uint32_t>(i));
    CorePartition out;
    canonicalize(raw, static_cast<std::uint32_t>(n), out);
    return out;
}

CorePartition strong_components(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    // CSR out-adjacency
    std::vector<std::uint32_t> head(n + 1, 0);
    for (const auto& e : edges) head[e.first + 1] += 1;
    for (std::size_t i = 0; i < n; ++i) head[i + 1] += head[i];
    std::vector<std::uint32_t> adj(edges.size());
    {
        std::vector<std::uint32_t> cursor(head.begin(), head.end() - 1);
        for (const auto& e : edges) adj[cursor[e.first]++] = e.second;
    }

    constexpr std::uint32_t kUnvisited = UINT32_MAX;
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), raw(n, 0);
    std::vector<bool> onstack(n, false);
    std::vector<std::uint32_t> stack;
    struct Frame {
        std::uint32_t v;
        std::uint32_t edge;
    };
    std::vector<Frame> frames;
    std::uint32_t counter = 0, comp_count = 0;

    for (std::uint32_t start = 0; start < n; ++start) {
        if (index[start] != kUnvisited) continue;
        frames.push_back({start, head[start]});
        index[start] = low[start] = counter++;
        stack.push_back(start);
        onstack[start] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < head[f.v + 1]) {
                std::uint32_t w = adj[f.edge++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    onstack[w] = true;
                    frames.push_back({w, head[w]});
                } else if (onstack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                std::uint32_t v = f.v;
                if (low[v] == index[v]) {
                    std::uint32_t x;
                    do {
                        x = stack.back();
                        stack.pop_back();
                        onstack[x] = false;
                        raw[x] = comp_count;
                    } while (x != v);
                    ++comp_count;
                }
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    CorePartition out;
    canonicalize(raw, comp_count, out);
    return out;
}

ComponentPartition components_core(
    std::vector<NodeId> nodes,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pos_edges,
    ComponentMode mode) {
    ComponentPartition p;
    p.mode = mode;
    p.nodes = std::move(nodes);
    CorePartition core = mode == ComponentMode::weak
                             ? weak_components(p.nodes.size(), pos_edges)
                             : strong_components(p.nodes.size(), pos_edges);
    p.labels = std::move(core.labels);
    p.sizes = std::move(core.sizes);
    return p;
}

}  // namespace

std::uint32_t ComponentPartition::largest_label() const {
    if (sizes.empty()) throw std::domain_error("empty partition has no largest component");
    std::uint32_t best = 0;
    for (std::uint32_t l = 1; l < sizes.size(); ++l)
        if (sizes[l] > sizes[best]) best = l;
    return best;
}

ComponentPartition connected_components(const YearSnapshot& s, ComponentMode mode) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pos_edges;
    pos_edges.reserve(s.edges.size());
    for (const auto& e : s.edges) {
        if (e.src == e.dst) continue;
        pos_edges.emplace_back(static_cast<std::uint32_t>(node_pos(s.nodes, e.src)),
                               static_cast<std::uint32_t>(node_pos(s.nodes, e.dst)));
    }
    return components_core(s.nodes, pos_edges, mode);
}

ComponentPartition connected_components(std::span<const NodeId> nodes,
                                        std::span<const std::pair<NodeId, NodeId>> edges,
                                        ComponentMode mode) {
    std::vector<NodeId> sorted(nodes.begin(), nodes.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pos_edges;
    pos_edges.reserve(edges.size());
    for (const auto& [u, v] : edges) {
        std::size_t a = node_pos(sorted, u);
        std::size_t b = node_pos(sorted, v);
        if (a >= sorted.size() || sorted[a] != u || b >= sorted.size() || sorted[b] != v)
            throw std::invalid_argument("connected_components: edge endpoint outside node set");
        if (a == b) continue;
        pos_edges.emplace_back(static_cast<std::uint32_t>(a),
                               static_cast<std::uint32_t>(b));
    }
    return components_core(std::move(sorted), pos_edges, mode);
}

double component_size_gini(const ComponentPartition& p) {
    std::vector<double> sizes(p.sizes.begin(), p.sizes.end());
    return gini(sizes);
}

TopShare top_percent_edge_share(const YearSnapshot& s, double p, bool weighted) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("top_percent_edge_share: p outside [0, 1]");
    std::size_t n = s.nodes.size();
    if (n == 0 || s.edges.empty()) return {kNaN, kNaN};
    DegreeVectors d = degree_vectors(s);
    std::vector<std::uint64_t> in_deg, out_deg;
    if (weighted) {
        in_deg = d.in_activity;
        out_deg = d.out_activity;
    } else {
        in_deg.assign(n, 0);
        out_deg.assign(n, 0);
        for (const auto& e : s.edges) {
            out_deg[node_pos(s.nodes, e.src)] += 1;
            in_deg[node_pos(s.nodes, e.dst)] += 1;
        }
    }
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::min(k, n);
    std::uint64_t total = 0;
    for (std::uint64_t v : in_deg) total += v;

    TopShare share;
    std::uint64_t in_sum = 0, out_sum = 0;
    for (std::size_t i : top_k_positions(in_deg, s.nodes, k)) in_sum += in_deg[i];
    for (std::size_t i : top_k_positions(out_deg, s.nodes, k)) out_sum += out_deg[i];
    share.in_share = static_cast<double>(in_sum) / static_cast<double>(total);
    share.out_share = static_cast<double>(out_sum) / static_cast<double>(total);
    return share;
}

TopMembership top_percent_component_membership(const YearSnapshot& s, double p) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("top_percent_component_membership: p outside [0, 1]");
    std::size_t n = s.nodes.size();
    if (n == 0) return {kNaN, kNaN, kNaN, kNaN};
    DegreeVectors d = degree_vectors(s);
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::min(k, n);
    if (k == 0) return {kNaN, kNaN, kNaN, kNaN};

    auto weak = connected_components(s, ComponentMode::weak);
    auto strong = connected_components(s, ComponentMode::strong);
    std::uint32_t lwcc = weak.largest_label();
    std::uint32_t lscc = strong.largest_label();

    auto frac_inside = [&](const std::vector<std::size_t>& top,
                           const ComponentPartition& part, std::uint32_t label) {
        std::size_t inside = 0;
        for (std::size_t i : top)
            if (part.labels[i] == label) ++inside;
        return static_cast<double>(inside) / static_cast<double>(top.size());
    };

    auto top_in = top_k_positions(d.in_activity, s.nodes, k);
    auto top_out = top_k_positions(d.out_activity, s.nodes, k);

    TopMembership m;
    m.in_lscc = frac_inside(top_in, strong, lscc);
    m.in_lwcc = frac_inside(top_in, weak, lwcc);
    m.out_lscc = frac_inside(top_out, strong, lscc);
    m.out_lwcc = frac_inside(top_out, weak, lwcc);
    return m;
}

}  // namespace chainnet
