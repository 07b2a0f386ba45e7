#ifndef PLANISO_WL_HPP_
#define PLANISO_WL_HPP_

#include <algorithm>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "object_graph.hpp"
#include "util.hpp"

namespace planiso {

enum class Algorithm { wl1, fwl2 };
enum class Aggregation { multiset, set };

inline const char* algorithm_name(Algorithm a) { return a == Algorithm::wl1 ? "wl1" : "fwl2"; }
inline const char* aggregation_name(Aggregation a) { return a == Aggregation::multiset ? "multiset" : "set"; }

// Sorted (color, count) pairs over vertices (1-WL) or ordered pairs (2-FWL).
// Color ids are comparable across the graphs of one wl run only.
struct ColorHistogram {
    std::vector<std::pair<uint32_t, uint64_t>> counts;

    bool operator==(const ColorHistogram& o) const { return counts == o.counts; }
    bool operator!=(const ColorHistogram& o) const { return !(*this == o); }
    bool operator<(const ColorHistogram& o) const { return counts < o.counts; }

    uint64_t total() const {
        uint64_t t = 0;
        for (const auto& [c, n] : counts)
            t += n;
        return t;
    }

    Digest128 digest() const {
        std::vector<uint8_t> bytes;
        for (const auto& [c, n] : counts) {
            append_u32(bytes, c);
            append_u32(bytes, static_cast<uint32_t>(n));
            append_u32(bytes, static_cast<uint32_t>(n >> 32));
        }
        return digest_bytes(bytes);
    }
};

inline ColorHistogram make_histogram(const std::vector<uint32_t>& colors) {
    std::unordered_map<uint32_t, uint64_t> counts;
    for (uint32_t c : colors)
        ++counts[c];
    ColorHistogram h;
    h.counts.assign(counts.begin(), counts.end());
    std::sort(h.counts.begin(), h.counts.end());
    return h;
}

// Injectively maps structured color keys ⟨old color, aggregate⟩ to dense ids.
// Shared by all graphs of one run so colors are cross-graph comparable.
class InternTable {
  public:
    uint32_t intern(const std::vector<uint32_t>& key) {
        uint64_t h = 0x2545f4914f6cdd1dull;
        for (uint32_t k : key)
            h = detail::mix64(h ^ k);
        auto& bucket = buckets_[h];
        for (uint32_t id : bucket) {
            if (keys_[id] == key)
                return id;
        }
        uint32_t id = static_cast<uint32_t>(keys_.size());
        keys_.push_back(key);
        bucket.push_back(id);
        return id;
    }

    size_t size() const { return keys_.size(); }
    const std::vector<uint32_t>& key(uint32_t id) const { return keys_[id]; }

  private:
    std::vector<std::vector<uint32_t>> keys_;
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets_;
};

constexpr uint32_t kRound0Sentinel = 0xfffffff0u;
constexpr size_t kDefaultFwl2MaxVertices = 512;

namespace detail {

inline size_t count_distinct(const std::vector<std::vector<uint32_t>>& per_graph_colors) {
    std::set<uint32_t> seen;
    for (const auto& colors : per_graph_colors)
        seen.insert(colors.begin(), colors.end());
    return seen.size();
}

} // namespace detail

// Synchronous 1-WL over a collection sharing one InternTable — semantically a
// run on the disjoint union. Iterates to the fixpoint: stops when a round no
// longer increases the number of distinct colors across the collection.
inline std::vector<ColorHistogram> wl1_histograms(const std::vector<const ObjectGraph*>& graphs,
                                                  Aggregation aggregation, InternTable* table_out = nullptr) {
    InternTable table;
    size_t n_graphs = graphs.size();
    std::vector<std::vector<uint32_t>> colors(n_graphs);
    for (size_t g = 0; g < n_graphs; ++g) {
        colors[g].reserve(graphs[g]->num_vertices());
        for (uint32_t c : graphs[g]->colors)
            colors[g].push_back(table.intern({kRound0Sentinel, c}));
    }
    size_t distinct = detail::count_distinct(colors);
    for (;;) {
        std::vector<std::vector<uint32_t>> next(n_graphs);
        for (size_t g = 0; g < n_graphs; ++g) {
            const ObjectGraph& graph = *graphs[g];
            next[g].resize(graph.num_vertices());
            std::vector<uint32_t> key;
            for (uint32_t v = 0; v < graph.num_vertices(); ++v) {
                key.clear();
                key.push_back(colors[g][v]);
                std::vector<uint32_t> agg;
                agg.reserve(graph.adj[v].size());
                for (uint32_t w : graph.adj[v])
                    agg.push_back(colors[g][w]);
                std::sort(agg.begin(), agg.end());
                if (aggregation == Aggregation::set)
                    agg.erase(std::unique(agg.begin(), agg.end()), agg.end());
                key.insert(key.end(), agg.begin(), agg.end());
                next[g][v] = table.intern(key);
            }
        }
        size_t next_distinct = detail::count_distinct(next);
        if (next_distinct == distinct)
            break;
        colors = std::move(next);
        distinct = next_distinct;
    }
    std::vector<ColorHistogram> out;
    out.reserve(n_graphs);
    for (const auto& c : colors)
        out.push_back(make_histogram(c));
    if (table_out)
        *table_out = std::move(table);
    return out;
}

// Folklore 2-FWL on ordered vertex pairs. The round-0 color of (u,v) is its
// atomic type (color(u), color(v), adjacency, equality); each round relabels
// (u,v) with its old color plus the aggregate over w of the ordered pair
// (color(w,v), color(u,w)).
inline std::vector<ColorHistogram> fwl2_histograms(const std::vector<const ObjectGraph*>& graphs,
                                                   Aggregation aggregation,
                                                   size_t max_vertices = kDefaultFwl2MaxVertices,
                                                   InternTable* table_out = nullptr) {
    for (const ObjectGraph* g : graphs) {
        if (g->num_vertices() > max_vertices)
            throw Error(ErrorKind::cap_exceeded,
                        "2-FWL vertex cap exceeded: graph has " + std::to_string(g->num_vertices()) +
                            " vertices, cap is " + std::to_string(max_vertices) + " (" +
                            std::to_string(g->num_vertices() * g->num_vertices()) + " pairs would be needed)");
    }
    InternTable table;
    size_t n_graphs = graphs.size();
    std::vector<size_t> nv(n_graphs);
    std::vector<std::vector<bool>> adj_matrix(n_graphs);
    std::vector<std::vector<uint32_t>> colors(n_graphs);
    for (size_t g = 0; g < n_graphs; ++g) {
        const ObjectGraph& graph = *graphs[g];
        size_t n = graph.num_vertices();
        nv[g] = n;
        adj_matrix[g].assign(n * n, false);
        for (const auto& [u, v] : graph.edges) {
            adj_matrix[g][u * n + v] = true;
            adj_matrix[g][v * n + u] = true;
        }
        colors[g].resize(n * n);
        for (size_t u = 0; u < n; ++u) {
            for (size_t v = 0; v < n; ++v) {
                colors[g][u * n + v] =
                    table.intern({kRound0Sentinel, graph.colors[u], graph.colors[v],
                                  adj_matrix[g][u * n + v] ? 1u : 0u, u == v ? 1u : 0u});
            }
        }
    }
    size_t distinct = detail::count_distinct(colors);
    for (;;) {
        std::vector<std::vector<uint32_t>> next(n_graphs);
        for (size_t g = 0; g < n_graphs; ++g) {
            size_t n = nv[g];
            next[g].resize(n * n);
            std::vector<uint64_t> agg(n);
            std::vector<uint32_t> key;
            for (size_t u = 0; u < n; ++u) {
                for (size_t v = 0; v < n; ++v) {
                    for (size_t w = 0; w < n; ++w) {
                        agg[w] = static_cast<uint64_t>(colors[g][w * n + v]) << 32 | colors[g][u * n + w];
                    }
                    std::sort(agg.begin(), agg.end());
                    size_t agg_len = n;
                    if (aggregation == Aggregation::set)
                        agg_len = static_cast<size_t>(std::unique(agg.begin(), agg.end()) - agg.begin());
                    key.clear();
                    key.push_back(colors[g][u * n + v]);
                    for (size_t i = 0; i < agg_len; ++i) {
                        key.push_back(static_cast<uint32_t>(agg[i] >> 32));
                        key.push_back(static_cast<uint32_t>(agg[i]));
                    }
                    next[g][u * n + v] = table.intern(key);
                }
            }
        }
        size_t next_distinct = detail::count_distinct(next);
        if (next_distinct == distinct)
            break;
        colors = std::move(next);
        distinct = next_distinct;
    }
    std::vector<ColorHistogram> out;
    out.reserve(n_graphs);
    for (const auto& c : colors)
        out.push_back(make_histogram(c));
    if (table_out)
        *table_out = std::move(table);
    return out;
}

inline std::vector<ColorHistogram> wl_histograms(const std::vector<const ObjectGraph*>& graphs, Algorithm alg,
                                                 Aggregation aggregation,
                                                 size_t fwl2_max_vertices = kDefaultFwl2MaxVertices) {
    return alg == Algorithm::wl1 ? wl1_histograms(graphs, aggregation)
                                 : fwl2_histograms(graphs, aggregation, fwl2_max_vertices);
}

inline bool wl_distinguishes_graphs(const ObjectGraph& a, const ObjectGraph& b, Algorithm alg,
                                    Aggregation aggregation,
                                    size_t fwl2_max_vertices = kDefaultFwl2MaxVertices) {
    auto hists = wl_histograms({&a, &b}, alg, aggregation, fwl2_max_vertices);
    return hists[0] != hists[1];
}

inline bool wl1_distinguishes(const State& s, const State& t, const GroundTask& task, Encoding encoding,
                              Aggregation aggregation) {
    ColorLegend legend = ColorLegend::from_domain(task.domain);
    ObjectGraph a = build_object_graph(s, task, encoding, legend);
    ObjectGraph b = build_object_graph(t, task, encoding, legend);
    return wl_distinguishes_graphs(a, b, Algorithm::wl1, aggregation);
}

inline void write_histograms(std::ostream& os, const std::vector<ColorHistogram>& hists, const InternTable* table) {
    for (size_t g = 0; g < hists.size(); ++g) {
        os << g << " :";
        for (const auto& [c, n] : hists[g].counts)
            os << " (" << c << "," << n << ")";
        os << "\n";
    }
    if (table) {
        os << "intern\n";
        for (uint32_t id = 0; id < table->size(); ++id) {
            os << id << " :";
            for (uint32_t k : table->key(id))
                os << " " << k;
            os << "\n";
        }
    }
}

} // namespace planiso

#endif // PLANISO_WL_HPP_
