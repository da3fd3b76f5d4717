#include "chainnet/snapshot.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <unordered_map>

#include "chainnet/error.hpp"
#include "chainnet/timeutil.hpp"

namespace chainnet {

namespace {

struct PairKey {
    NodeId src;
    NodeId dst;
    bool operator==(const PairKey& o) const { return src == o.src && dst == o.dst; }
};

struct PairHash {
    std::size_t operator()(const PairKey& k) const {
        std::uint64_t x = k.src * 0x9e3779b97f4a7c15ULL ^ (k.dst + 0xbf58476d1ce4e5b9ULL);
        x ^= x >> 31;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 29;
        return static_cast<std::size_t>(x);
    }
};

struct Accum {
    Quanta w1 = 0;
    std::uint64_t w2 = 0;
};

// Fixed-width binary spill record; Quanta stored as two 64-bit halves.
struct SpillRec {
    std::uint64_t src, dst, w1_hi, w1_lo, w2;
};

SpillRec pack(const PairKey& k, const Accum& a) {
    auto u = static_cast<unsigned __int128>(a.w1);
    return {k.src, k.dst, static_cast<std::uint64_t>(u >> 64),
            static_cast<std::uint64_t>(u), a.w2};
}

void derive_nodes(YearSnapshot& s) {
    s.nodes.clear();
    s.nodes.reserve(s.edges.size() * 2);
    for (const auto& e : s.edges) {
        s.nodes.push_back(e.src);
        s.nodes.push_back(e.dst);
    }
    std::sort(s.nodes.begin(), s.nodes.end());
    s.nodes.erase(std::unique(s.nodes.begin(), s.nodes.end()), s.nodes.end());
}

void sort_edges(YearSnapshot& s) {
    std::sort(s.edges.begin(), s.edges.end(), [](const auto& a, const auto& b) {
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });
}

}  // namespace

Quanta YearSnapshot::total_w1() const {
    Quanta t = 0;
    for (const auto& e : edges) t += e.w1;
    return t;
}

std::uint64_t YearSnapshot::total_w2() const {
    std::uint64_t t = 0;
    for (const auto& e : edges) t += e.w2;
    return t;
}

struct SnapshotBuilder::Partition {
    std::unordered_map<PairKey, Accum, PairHash> live;
    std::FILE* spill = nullptr;
    std::string spill_path;
};

SnapshotBuilder::SnapshotBuilder(int year) : SnapshotBuilder(year, Options()) {}

SnapshotBuilder::SnapshotBuilder(int year, Options opt)
    : year_(year), opt_(std::move(opt)), parts_(std::max<std::size_t>(opt_.partitions, 1)) {}

SnapshotBuilder::~SnapshotBuilder() {
    for (auto& p : parts_) {
        if (p.spill) {
            std::fclose(p.spill);
            std::error_code ec;
            std::filesystem::remove(p.spill_path, ec);
        }
    }
}

void SnapshotBuilder::add(const FlowEdge& flow) {
    if (year_of_epoch(flow.timestamp) != year_)
        throw std::invalid_argument("snapshot: flow outside year " + std::to_string(year_));
    add(flow.src, flow.dst, flow.value);
}

void SnapshotBuilder::add(NodeId src, NodeId dst, Quanta value) {
    if (finished_) throw std::logic_error("snapshot: add after finish");
    if (value <= 0) throw std::invalid_argument("snapshot: non-positive flow value");
    if (opt_.policy.drop_self_loops && src == dst) return;

    PairKey key{src, dst};
    auto& part = parts_[PairHash{}(key) % parts_.size()];
    auto [it, inserted] = part.live.try_emplace(key);
    it->second.w1 += value;
    it->second.w2 += 1;
    if (inserted && ++live_entries_ > opt_.max_entries_in_memory) spill_all();
}

void SnapshotBuilder::spill_all() {
    namespace fs = std::filesystem;
    fs::path dir = opt_.spill_dir.empty() ? fs::temp_directory_path()
                                          : fs::path(opt_.spill_dir);
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        auto& p = parts_[i];
        if (p.live.empty()) continue;
        if (!p.spill) {
            p.spill_path = (dir / ("chainnet_spill_" + std::to_string(year_) + "_" +
                                   std::to_string(i) + "_" +
                                   std::to_string(reinterpret_cast<std::uintptr_t>(this)) +
                                   ".bin"))
                               .string();
            p.spill = std::fopen(p.spill_path.c_str(), "wb+");
            if (!p.spill) throw IoError("cannot open spill file " + p.spill_path);
        }
        for (const auto& [k, a] : p.live) {
            SpillRec rec = pack(k, a);
            if (std::fwrite(&rec, sizeof rec, 1, p.spill) != 1)
                throw IoError("short write to spill file " + p.spill_path);
        }
        p.live.clear();
    }
    live_entries_ = 0;
}

YearSnapshot SnapshotBuilder::finish() {
    if (finished_) throw std::logic_error("snapshot: finish called twice");
    finished_ = true;

    YearSnapshot s;
    s.year = year_;
    s.filtered = false;
    s.threshold = 0;
    s.self_loops_stripped = opt_.policy.drop_self_loops;

    for (auto& p : parts_) {
        if (p.spill) {
            std::rewind(p.spill);
            SpillRec rec;
            while (std::fread(&rec, sizeof rec, 1, p.spill) == 1) {
                Quanta w1 = static_cast<Quanta>(
                    (static_cast<unsigned __int128>(rec.w1_hi) << 64) | rec.w1_lo);
                auto& a = p.live[PairKey{rec.src, rec.dst}];
                a.w1 += w1;
                a.w2 += rec.w2;
            }
            if (std::ferror(p.spill))
                throw IoError("read error on spill file " + p.spill_path);
            std::fclose(p.spill);
            p.spill = nullptr;
            std::error_code ec;
            std::filesystem::remove(p.spill_path, ec);
        }
        s.edges.reserve(s.edges.size() + p.live.size());
        for (const auto& [k, a] : p.live)
            s.edges.push_back({k.src, k.dst, a.w1, a.w2});
        p.live.clear();
    }

    sort_edges(s);
    derive_nodes(s);
    return s;
}

YearSnapshot build_snapshot(const std::vector<FlowEdge>& flows, int year,
                            StripPolicy policy) {
    SnapshotBuilder::Options opt;
    opt.policy = policy;
    SnapshotBuilder b(year, opt);
    for (const auto& f : flows) b.add(f);
    return b.finish();
}

YearSnapshot make_snapshot(int year, std::vector<AggregatedEdge> edges,
                           StripPolicy policy, bool filtered, Quanta threshold) {
    YearSnapshot s;
    s.year = year;
    s.filtered = filtered;
    s.threshold = threshold;
    s.self_loops_stripped = policy.drop_self_loops;
    s.edges = std::move(edges);
    if (policy.drop_self_loops)
        std::erase_if(s.edges, [](const auto& e) { return e.src == e.dst; });
    sort_edges(s);
    std::size_t w = 0;
    for (std::size_t i = 0; i < s.edges.size(); ++i) {
        if (w > 0 && s.edges[w - 1].src == s.edges[i].src &&
            s.edges[w - 1].dst == s.edges[i].dst) {
            s.edges[w - 1].w1 += s.edges[i].w1;
            s.edges[w - 1].w2 += s.edges[i].w2;
        } else {
            s.edges[w++] = s.edges[i];
        }
    }
    s.edges.resize(w);
    derive_nodes(s);
    return s;
}

YearSnapshot apply_dust_filter(const YearSnapshot& s, Quanta threshold) {
    if (s.filtered) throw std::invalid_argument("dust filter: snapshot already filtered");
    if (threshold < 0) throw std::invalid_argument("dust filter: negative threshold");
    YearSnapshot out;
    out.year = s.year;
    out.filtered = true;
    out.threshold = threshold;
    out.self_loops_stripped = s.self_loops_stripped;
    out.edges.reserve(s.edges.size());
    for (const auto& e : s.edges)
        if (e.w1 > threshold) out.edges.push_back(e);
    derive_nodes(out);
    return out;
}

YearSnapshot strip_self_loops(const YearSnapshot& s) {
    YearSnapshot out;
    out.year = s.year;
    out.filtered = s.filtered;
    out.threshold = s.threshold;
    out.self_loops_stripped = true;
    out.edges.reserve(s.edges.size());
    for (const auto& e : s.edges)
        if (e.src != e.dst) out.edges.push_back(e);
    derive_nodes(out);
    return out;
}

FilterCoverage filter_coverage(const YearSnapshot& raw, const YearSnapshot& filtered) {
    if (raw.edges.empty())
        throw std::domain_error("filter coverage undefined: raw snapshot is empty");
    FilterCoverage c;
    c.volume_share =
        static_cast<double>(filtered.total_w1()) / static_cast<double>(raw.total_w1());
    c.node_share = static_cast<double>(filtered.node_count()) /
                   static_cast<double>(raw.node_count());
    return c;
}

void write_snapshot(const YearSnapshot& s, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::string line = "#snapshot year=" + std::to_string(s.year) +
                       " threshold=" + quanta_to_string(s.threshold) +
                       " filtered=" + (s.filtered ? "1" : "0") +
                       " strip_self_loops=" + (s.self_loops_stripped ? "1" : "0") + "\n";
    std::fputs(line.c_str(), f);
    for (const auto& e : s.edges) {
        line = std::to_string(e.src) + "\t" + std::to_string(e.dst) + "\t" +
               quanta_to_string(e.w1) + "\t" + std::to_string(e.w2) + "\n";
        std::fputs(line.c_str(), f);
    }
    if (std::fclose(f) != 0) throw IoError("write error on " + path);
}

YearSnapshot read_snapshot(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    YearSnapshot s;
    char buf[512];
    if (!std::fgets(buf, sizeof buf, f)) {
        std::fclose(f);
        throw DataError(path + ": missing snapshot header");
    }
    int filtered = 0, strip = 0;
    char thr[64];
    if (std::sscanf(buf, "#snapshot year=%d threshold=%63s filtered=%d strip_self_loops=%d",
                    &s.year, thr, &filtered, &strip) != 4) {
        std::fclose(f);
        throw DataError(path + ": malformed snapshot header");
    }
    s.filtered = filtered != 0;
    s.self_loops_stripped = strip != 0;
    try {
        s.threshold = quanta_from_string(thr);
    } catch (const std::exception&) {
        std::fclose(f);
        throw DataError(path + ": malformed threshold in header");
    }

    std::size_t lineno = 1;
    while (std::fgets(buf, sizeof buf, f)) {
        ++lineno;
        if (buf[0] == '\n' || buf[0] == '\0') continue;
        AggregatedEdge e;
        char w1[64];
        unsigned long long src, dst, w2;
        if (std::sscanf(buf, "%llu\t%llu\t%63s\t%llu", &src, &dst, w1, &w2) != 4) {
            std::fclose(f);
            throw DataError(path + " line " + std::to_string(lineno) +
                            ": malformed edge row");
        }
        e.src = src;
        e.dst = dst;
        e.w2 = w2;
        try {
            e.w1 = quanta_from_string(w1);
        } catch (const std::exception&) {
            std::fclose(f);
            throw DataError(path + " line " + std::to_string(lineno) + ": bad w1 value");
        }
        s.edges.push_back(e);
    }
    bool rderr = std::ferror(f) != 0;
    std::fclose(f);
    if (rderr) throw IoError("read error on " + path);
    sort_edges(s);
    derive_nodes(s);
    return s;
}

}  // namespace chainnet
