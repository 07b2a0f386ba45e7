#ifndef PLANISO_CANONICAL_HPP_
#define PLANISO_CANONICAL_HPP_

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "object_graph.hpp"
#include "util.hpp"

namespace planiso {

// Isomorphism-invariant serialization of a vertex-colored graph. Equal bytes
// iff color-preserving isomorphic; the digest is a prefilter only.
struct CanonicalForm {
    std::vector<uint8_t> bytes;
    Digest128 digest;

    bool operator==(const CanonicalForm& o) const { return digest == o.digest && bytes == o.bytes; }
    bool operator!=(const CanonicalForm& o) const { return !(*this == o); }
};

// Ordered list of disjoint cells covering all vertices.
using OrderedPartition = std::vector<std::vector<uint32_t>>;

inline OrderedPartition unit_partition_by_color(const ObjectGraph& g) {
    std::map<uint32_t, std::vector<uint32_t>> by_color;
    for (uint32_t v = 0; v < g.num_vertices(); ++v)
        by_color[g.colors[v]].push_back(v);
    OrderedPartition p;
    for (auto& [color, cell] : by_color)
        p.push_back(std::move(cell));
    return p;
}

// Coarsest equitable partition refining p: every vertex in a cell ends up with
// the same number of neighbors in every cell. Split cells are ordered by
// ascending neighbor count, which keeps the cell order deterministic and
// invariant under relabeling.
inline OrderedPartition refine(const ObjectGraph& g, OrderedPartition p) {
    std::deque<std::vector<uint32_t>> work(p.begin(), p.end());
    std::vector<uint32_t> counts(g.num_vertices(), 0);
    while (!work.empty()) {
        std::vector<uint32_t> splitter = std::move(work.front());
        work.pop_front();
        std::fill(counts.begin(), counts.end(), 0);
        for (uint32_t u : splitter)
            for (uint32_t w : g.adj[u])
                ++counts[w];
        OrderedPartition next;
        next.reserve(p.size());
        for (auto& cell : p) {
            if (cell.size() == 1) {
                next.push_back(std::move(cell));
                continue;
            }
            std::map<uint32_t, std::vector<uint32_t>> groups;
            for (uint32_t v : cell)
                groups[counts[v]].push_back(v);
            if (groups.size() == 1) {
                next.push_back(std::move(cell));
                continue;
            }
            for (auto& [count, sub] : groups) {
                work.push_back(sub);
                next.push_back(std::move(sub));
            }
        }
        p = std::move(next);
    }
    return p;
}

namespace detail {

// Node invariant: a hash of isomorphism-invariant partition data (per-cell
// size and color, quotient-graph edge counts). Isomorphic search nodes hash
// equal; the induced total order on nodes is therefore label-independent.
inline uint64_t partition_invariant(const ObjectGraph& g, const OrderedPartition& p) {
    std::vector<uint32_t> cell_of(g.num_vertices());
    for (size_t c = 0; c < p.size(); ++c)
        for (uint32_t v : p[c])
            cell_of[v] = static_cast<uint32_t>(c);
    uint64_t h = 0x517cc1b727220a95ull;
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> quotient;
    for (size_t c = 0; c < p.size(); ++c) {
        h = mix64(h ^ (static_cast<uint64_t>(p[c].size()) << 32 | g.colors[p[c][0]]));
        for (uint32_t v : p[c])
            for (uint32_t w : g.adj[v])
                if (cell_of[w] >= c)
                    ++quotient[{static_cast<uint32_t>(c), cell_of[w]}];
    }
    for (const auto& [cells, count] : quotient)
        h = mix64(h ^ (static_cast<uint64_t>(cells.first) << 40 | static_cast<uint64_t>(cells.second) << 20 | count));
    return h;
}

inline std::vector<uint8_t> serialize_labeled(const ObjectGraph& g, const std::vector<uint32_t>& lab) {
    std::vector<uint32_t> pos(g.num_vertices());
    for (uint32_t i = 0; i < lab.size(); ++i)
        pos[lab[i]] = i;
    std::vector<uint8_t> bytes;
    bytes.reserve(8 + 4 * g.num_vertices() + 8 * g.edges.size());
    append_u32(bytes, static_cast<uint32_t>(g.num_vertices()));
    append_u32(bytes, static_cast<uint32_t>(g.edges.size()));
    for (uint32_t i = 0; i < lab.size(); ++i)
        append_u32(bytes, g.colors[lab[i]]);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    edges.reserve(g.edges.size());
    for (const auto& [u, v] : g.edges) {
        uint32_t a = pos[u], b = pos[v];
        edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& [a, b] : edges) {
        append_u32(bytes, a);
        append_u32(bytes, b);
    }
    return bytes;
}

struct UnionFind {
    std::vector<uint32_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    uint32_t find(uint32_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(uint32_t a, uint32_t b) { parent[find(a)] = find(b); }
};

// Individualization-refinement search for the canonical labeling. The best
// leaf minimizes (node-invariant path, serialized bytes) lexicographically.
// Discovered automorphisms prune branch vertices lying in one orbit of the
// subgroup that fixes the current individualization prefix pointwise — a
// subgroup of the true stabilizer, so the pruning is sound.
class CanonicalSearch {
  public:
    explicit CanonicalSearch(const ObjectGraph& g) : g_(g) {}

    CanonicalForm run() {
        if (g_.num_vertices() == 0) {
            CanonicalForm form;
            append_u32(form.bytes, 0);
            append_u32(form.bytes, 0);
            form.digest = digest_bytes(form.bytes);
            return form;
        }
        node(unit_partition_by_color(g_));
        CanonicalForm form;
        form.bytes = std::move(best_bytes_);
        form.digest = digest_bytes(form.bytes);
        return form;
    }

  private:
    // smaller_depth_ marks the depth at which the current path became strictly
    // smaller than the incumbent; descendants skip pruning until the first
    // leaf below adopts the path as the new incumbent and clears the mark.
    void node(OrderedPartition p) {
        p = refine(g_, p);
        size_t depth = path_.size();
        uint64_t inv = partition_invariant(g_, p);
        bool marked_here = false;
        if (smaller_depth_ == kNoMark && !best_bytes_.empty()) {
            if (depth >= best_path_.size() || inv > best_path_[depth])
                return; // cannot beat the incumbent on this path
            if (inv < best_path_[depth]) {
                smaller_depth_ = depth;
                marked_here = true;
            }
        }
        path_.push_back(inv);

        size_t target = p.size();
        for (size_t c = 0; c < p.size(); ++c) {
            if (p[c].size() > 1 && (target == p.size() || p[c].size() < p[target].size()))
                target = c;
        }
        if (target == p.size()) {
            leaf(p);
        } else {
            UnionFind orbits(g_.num_vertices());
            for (const auto& gen : generators_) {
                bool fixes_prefix = true;
                for (uint32_t v : prefix_) {
                    if (gen[v] != v) {
                        fixes_prefix = false;
                        break;
                    }
                }
                if (!fixes_prefix)
                    continue;
                for (uint32_t v = 0; v < g_.num_vertices(); ++v)
                    orbits.unite(v, gen[v]);
            }
            std::vector<uint32_t> seen_roots;
            for (uint32_t v : p[target]) {
                uint32_t root = orbits.find(v);
                if (std::find(seen_roots.begin(), seen_roots.end(), root) != seen_roots.end())
                    continue;
                seen_roots.push_back(root);
                OrderedPartition child;
                child.reserve(p.size() + 1);
                for (size_t c = 0; c < p.size(); ++c) {
                    if (c != target) {
                        child.push_back(p[c]);
                        continue;
                    }
                    child.push_back({v});
                    std::vector<uint32_t> rest;
                    for (uint32_t u : p[c])
                        if (u != v)
                            rest.push_back(u);
                    child.push_back(std::move(rest));
                }
                prefix_.push_back(v);
                node(std::move(child));
                prefix_.pop_back();
            }
        }
        path_.pop_back();
        if (marked_here && smaller_depth_ == depth)
            smaller_depth_ = kNoMark;
    }

    void leaf(const OrderedPartition& p) {
        std::vector<uint32_t> lab;
        lab.reserve(p.size());
        for (const auto& cell : p)
            lab.push_back(cell[0]);
        std::vector<uint8_t> bytes = serialize_labeled(g_, lab);
        if (best_bytes_.empty() || smaller_depth_ != kNoMark || bytes < best_bytes_) {
            best_bytes_ = std::move(bytes);
            best_path_ = path_;
            best_lab_ = std::move(lab);
            smaller_depth_ = kNoMark; // incumbent now equals the current path
            return;
        }
        if (bytes == best_bytes_)
            record_automorphism(lab);
    }

    void record_automorphism(const std::vector<uint32_t>& lab) {
        std::vector<uint32_t> sigma(g_.num_vertices());
        for (size_t i = 0; i < lab.size(); ++i)
            sigma[best_lab_[i]] = lab[i];
        for (uint32_t v = 0; v < g_.num_vertices(); ++v) {
            if (g_.colors[sigma[v]] != g_.colors[v])
                return;
            std::vector<uint32_t> mapped;
            mapped.reserve(g_.adj[v].size());
            for (uint32_t w : g_.adj[v])
                mapped.push_back(sigma[w]);
            std::sort(mapped.begin(), mapped.end());
            if (mapped != g_.adj[sigma[v]])
                return;
        }
        generators_.push_back(std::move(sigma));
    }

    static constexpr size_t kNoMark = static_cast<size_t>(-1);

    const ObjectGraph& g_;
    size_t smaller_depth_ = kNoMark;
    std::vector<uint64_t> path_, best_path_;
    std::vector<uint8_t> best_bytes_;
    std::vector<uint32_t> best_lab_;
    std::vector<uint32_t> prefix_;
    std::vector<std::vector<uint32_t>> generators_;
};

} // namespace detail

inline CanonicalForm canonical_form(const ObjectGraph& g) { return detail::CanonicalSearch(g).run(); }

// Label-independent WL-style invariant: vertices start from their colors and
// are rehashed with the sorted hashes of their neighbors until the number of
// distinct hashes stabilizes; the result digests the sorted final hashes.
// Isomorphic graphs always hash equal; collisions of non-isomorphic graphs
// only cost extra isomorphism tests downstream, never wrong answers.
inline uint64_t graph_invariant_hash(const ObjectGraph& g) {
    size_t n = g.num_vertices();
    std::vector<uint64_t> h(n), next(n), sorted;
    for (size_t v = 0; v < n; ++v)
        h[v] = detail::mix64(0x243f6a8885a308d3ull ^ g.colors[v]);
    auto distinct_count = [&](const std::vector<uint64_t>& v) {
        sorted = v;
        std::sort(sorted.begin(), sorted.end());
        return static_cast<size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    };
    size_t distinct = distinct_count(h);
    for (;;) {
        std::vector<uint64_t> nbrs;
        for (size_t v = 0; v < n; ++v) {
            nbrs.clear();
            for (uint32_t w : g.adj[v])
                nbrs.push_back(h[w]);
            std::sort(nbrs.begin(), nbrs.end());
            uint64_t x = detail::mix64(h[v] + 0x9e3779b97f4a7c15ull);
            for (uint64_t nb : nbrs)
                x = detail::mix64(x ^ nb);
            next[v] = x;
        }
        size_t next_distinct = distinct_count(next);
        if (next_distinct == distinct)
            break;
        h.swap(next);
        distinct = next_distinct;
    }
    sorted = h;
    std::sort(sorted.begin(), sorted.end());
    uint64_t out = detail::mix64(static_cast<uint64_t>(n) << 32 | g.edges.size());
    for (uint64_t x : sorted)
        out = detail::mix64(out ^ x);
    return out;
}

namespace detail {

inline bool partitions_compatible(const ObjectGraph& a, const ObjectGraph& b, const OrderedPartition& pa,
                                  const OrderedPartition& pb) {
    if (pa.size() != pb.size())
        return false;
    for (size_t c = 0; c < pa.size(); ++c) {
        if (pa[c].size() != pb[c].size() || a.colors[pa[c][0]] != b.colors[pb[c][0]])
            return false;
    }
    return true;
}

inline bool verify_isomorphism(const ObjectGraph& a, const ObjectGraph& b, const std::vector<uint32_t>& sigma) {
    for (uint32_t v = 0; v < a.num_vertices(); ++v) {
        if (b.colors[sigma[v]] != a.colors[v])
            return false;
        std::vector<uint32_t> mapped;
        mapped.reserve(a.adj[v].size());
        for (uint32_t w : a.adj[v])
            mapped.push_back(sigma[w]);
        std::sort(mapped.begin(), mapped.end());
        if (mapped != b.adj[sigma[v]])
            return false;
    }
    return true;
}

inline bool iso_search(const ObjectGraph& a, const ObjectGraph& b, const OrderedPartition& pa,
                       const OrderedPartition& pb) {
    if (!partitions_compatible(a, b, pa, pb))
        return false;
    size_t target = pa.size();
    for (size_t c = 0; c < pa.size(); ++c) {
        if (pa[c].size() > 1 && (target == pa.size() || pa[c].size() < pa[target].size()))
            target = c;
    }
    if (target == pa.size()) {
        std::vector<uint32_t> sigma(a.num_vertices());
        for (size_t c = 0; c < pa.size(); ++c)
            sigma[pa[c][0]] = pb[c][0];
        return verify_isomorphism(a, b, sigma);
    }
    auto split = [](const OrderedPartition& p, size_t cell, uint32_t v) {
        OrderedPartition out;
        out.reserve(p.size() + 1);
        for (size_t c = 0; c < p.size(); ++c) {
            if (c != cell) {
                out.push_back(p[c]);
                continue;
            }
            out.push_back({v});
            std::vector<uint32_t> rest;
            for (uint32_t u : p[c])
                if (u != v)
                    rest.push_back(u);
            out.push_back(std::move(rest));
        }
        return out;
    };
    uint32_t va = pa[target][0];
    OrderedPartition child_a = refine(a, split(pa, target, va));
    for (uint32_t vb : pb[target]) {
        if (iso_search(a, b, child_a, refine(b, split(pb, target, vb))))
            return true;
    }
    return false;
}

} // namespace detail

// Color-preserving isomorphism decision by individualization-refinement with
// explicit bijection verification at the leaves; exhaustive, hence exact.
inline bool graphs_isomorphic(const ObjectGraph& a, const ObjectGraph& b) {
    if (a.num_vertices() != b.num_vertices() || a.edges.size() != b.edges.size())
        return false;
    return detail::iso_search(a, b, refine(a, unit_partition_by_color(a)), refine(b, unit_partition_by_color(b)));
}

inline ObjectGraph relabel_graph(const ObjectGraph& g, const std::vector<uint32_t>& sigma) {
    ObjectGraph out;
    out.colors.resize(g.num_vertices());
    out.adj.resize(g.num_vertices());
    out.tags.resize(g.num_vertices());
    for (uint32_t v = 0; v < g.num_vertices(); ++v) {
        out.colors[sigma[v]] = g.colors[v];
        out.tags[sigma[v]] = g.tags[v];
    }
    for (const auto& [u, v] : g.edges)
        out.add_edge(sigma[u], sigma[v]);
    out.finish();
    return out;
}

constexpr size_t kDefaultBruteForceBound = 8;

// Exhaustive permutation search over relational structures.
inline bool brute_force_isomorphic(const RelationalStructure& a, const RelationalStructure& b,
                                   size_t bound = kDefaultBruteForceBound) {
    if (a.num_objects != b.num_objects)
        return false;
    if (a.num_objects > bound)
        throw Error(ErrorKind::cap_exceeded, "brute-force isomorphism bound exceeded: " +
                                                 std::to_string(a.num_objects) + " objects > " +
                                                 std::to_string(bound));
    auto ia = a.interpretations();
    auto ib = b.interpretations();
    if (ia.size() != ib.size())
        return false;
    for (const auto& [pred, tuples] : ia) {
        auto it = ib.find(pred);
        if (it == ib.end() || it->second.size() != tuples.size())
            return false;
    }
    std::vector<int> sigma(a.num_objects);
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        bool ok = true;
        for (const auto& [pred, tuples] : ia) {
            std::vector<std::vector<int>> mapped;
            mapped.reserve(tuples.size());
            for (const auto& t : tuples) {
                std::vector<int> m;
                m.reserve(t.size());
                for (int x : t)
                    m.push_back(sigma[static_cast<size_t>(x)]);
                mapped.push_back(std::move(m));
            }
            std::sort(mapped.begin(), mapped.end());
            if (mapped != ib[pred]) {
                ok = false;
                break;
            }
        }
        if (ok)
            return true;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return false;
}

// Canonical-form equality of plain object graphs; states may come from
// different instances of the same domain (shared legend).
inline bool states_isomorphic(const State& s, const GroundTask& task_s, const State& t, const GroundTask& task_t,
                              const ColorLegend& legend) {
    if (task_s.objects.size() != task_t.objects.size())
        return false;
    return canonical_form(build_object_graph(s, task_s, Encoding::plain, legend)) ==
           canonical_form(build_object_graph(t, task_t, Encoding::plain, legend));
}

inline bool states_isomorphic(const State& s, const State& t, const GroundTask& task, const ColorLegend& legend) {
    return states_isomorphic(s, task, t, task, legend);
}

// ---------------------------------------------------------------------------
// Content-addressed canonical-form cache: `digest bytes-length hex-bytes`
// ---------------------------------------------------------------------------

inline void write_canonical_cache(std::ostream& os, const std::vector<CanonicalForm>& forms) {
    static const char* digits = "0123456789abcdef";
    for (const auto& form : forms) {
        os << form.digest.hex() << " " << form.bytes.size() << " ";
        for (uint8_t b : form.bytes) {
            os << digits[b >> 4] << digits[b & 0xf];
        }
        os << "\n";
    }
}

inline std::vector<CanonicalForm> read_canonical_cache(std::istream& is) {
    std::vector<CanonicalForm> forms;
    std::string digest_hex, hex;
    size_t len = 0;
    while (is >> digest_hex >> len >> hex) {
        if (hex.size() != 2 * len)
            throw Error(ErrorKind::io, "corrupt canonical cache record (length mismatch)");
        CanonicalForm form;
        form.bytes.reserve(len);
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9')
                return c - '0';
            if (c >= 'a' && c <= 'f')
                return c - 'a' + 10;
            throw Error(ErrorKind::io, "corrupt canonical cache record (bad hex)");
        };
        for (size_t i = 0; i < len; ++i)
            form.bytes.push_back(static_cast<uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1])));
        form.digest = digest_bytes(form.bytes);
        if (form.digest.hex() != digest_hex)
            throw Error(ErrorKind::io, "corrupt canonical cache record (digest mismatch)");
        forms.push_back(std::move(form));
    }
    return forms;
}

} // namespace planiso

#endif // PLANISO_CANONICAL_HPP_
