#ifndef PLANISO_TESTS_HELPERS_HPP_
#define PLANISO_TESTS_HELPERS_HPP_

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <planiso/planiso.hpp>

namespace testutil {

inline std::string bench(const std::string& rel) { return std::string(PLANISO_BENCHMARK_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw planiso::Error(planiso::ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline planiso::GroundTask load_task(const std::string& domain_rel, const std::string& instance_rel) {
    planiso::DomainModel dom = planiso::parse_domain(slurp(bench(domain_rel)));
    planiso::InstanceModel inst = planiso::parse_instance(slurp(bench(instance_rel)), dom);
    return planiso::ground(dom, inst);
}

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Synthetic graphs
// ---------------------------------------------------------------------------

inline planiso::ObjectGraph make_graph(std::vector<uint32_t> colors,
                                       const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
    planiso::ObjectGraph g;
    g.colors = std::move(colors);
    g.adj.resize(g.colors.size());
    g.tags.resize(g.colors.size());
    for (const auto& [u, v] : edges)
        g.add_edge(u, v);
    g.finish();
    return g;
}

inline planiso::ObjectGraph cycle_graph(uint32_t n, uint32_t color = 0) {
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t v = 0; v < n; ++v)
        edges.emplace_back(v, (v + 1) % n);
    return make_graph(std::vector<uint32_t>(n, color), edges);
}

inline planiso::ObjectGraph path_graph(uint32_t n, uint32_t color = 0) {
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t v = 0; v + 1 < n; ++v)
        edges.emplace_back(v, v + 1);
    return make_graph(std::vector<uint32_t>(n, color), edges);
}

inline planiso::ObjectGraph disjoint_union(const planiso::ObjectGraph& a, const planiso::ObjectGraph& b) {
    std::vector<uint32_t> colors = a.colors;
    colors.insert(colors.end(), b.colors.begin(), b.colors.end());
    std::vector<std::pair<uint32_t, uint32_t>> edges = a.edges;
    uint32_t off = static_cast<uint32_t>(a.num_vertices());
    for (const auto& [u, v] : b.edges)
        edges.emplace_back(u + off, v + off);
    return make_graph(std::move(colors), edges);
}

inline std::vector<uint32_t> random_permutation(Rng& rng, size_t n) {
    std::vector<uint32_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0u);
    std::shuffle(sigma.begin(), sigma.end(), rng);
    return sigma;
}

inline planiso::ObjectGraph random_colored_graph(Rng& rng, size_t max_vertices = 8, uint32_t num_colors = 3) {
    std::uniform_int_distribution<size_t> nv(1, max_vertices);
    size_t n = nv(rng);
    std::uniform_int_distribution<uint32_t> color(0, num_colors - 1);
    std::vector<uint32_t> colors(n);
    for (auto& c : colors)
        c = color(rng);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    double p = coin(rng); // edge densities across the whole range
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    for (uint32_t u = 0; u < n; ++u)
        for (uint32_t v = u + 1; v < n; ++v)
            if (coin(rng) < p)
                edges.emplace_back(u, v);
    return make_graph(std::move(colors), edges);
}

// Flips one edge of g (adds if absent, removes if present); identity on K1.
inline planiso::ObjectGraph perturb_graph(const planiso::ObjectGraph& g, Rng& rng) {
    size_t n = g.num_vertices();
    if (n < 2)
        return g;
    std::uniform_int_distribution<uint32_t> pick(0, static_cast<uint32_t>(n) - 1);
    uint32_t u = pick(rng), v = pick(rng);
    while (v == u)
        v = pick(rng);
    auto key = std::make_pair(std::min(u, v), std::max(u, v));
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    bool removed = false;
    for (const auto& [a, b] : g.edges) {
        if (std::make_pair(std::min(a, b), std::max(a, b)) == key) {
            removed = true;
            continue;
        }
        edges.emplace_back(a, b);
    }
    if (!removed)
        edges.push_back(key);
    return make_graph(g.colors, edges);
}

// Independent oracle: exhaustive permutation search on adjacency matrices.
// Deliberately shares no code with the library's isomorphism decision.
inline bool oracle_graph_isomorphic(const planiso::ObjectGraph& a, const planiso::ObjectGraph& b) {
    size_t n = a.num_vertices();
    if (n != b.num_vertices() || a.edges.size() != b.edges.size())
        return false;
    auto matrix = [n](const planiso::ObjectGraph& g) {
        std::vector<bool> m(n * n, false);
        for (const auto& [u, v] : g.edges) {
            m[u * n + v] = true;
            m[v * n + u] = true;
        }
        return m;
    };
    std::vector<bool> ma = matrix(a), mb = matrix(b);
    std::vector<uint32_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0u);
    do {
        bool ok = true;
        for (size_t v = 0; v < n && ok; ++v)
            ok = a.colors[v] == b.colors[sigma[v]];
        for (size_t u = 0; u < n && ok; ++u)
            for (size_t v = u + 1; v < n && ok; ++v)
                ok = ma[u * n + v] == mb[sigma[u] * n + sigma[v]];
        if (ok)
            return true;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return false;
}

// ---------------------------------------------------------------------------
// Synthetic relational structures
// ---------------------------------------------------------------------------

struct RandomStructure {
    planiso::RelationalStructure rs;
    std::vector<int> arities;
};

inline RandomStructure random_structure(Rng& rng, size_t max_objects = 6) {
    RandomStructure out;
    std::uniform_int_distribution<size_t> no(1, max_objects);
    out.rs.num_objects = no(rng);
    std::uniform_int_distribution<int> na(1, 3);
    int preds = na(rng);
    std::uniform_int_distribution<int> arity(0, 2);
    for (int p = 0; p < preds; ++p)
        out.arities.push_back(arity(rng));
    std::uniform_int_distribution<int> natoms(0, 6);
    std::uniform_int_distribution<int> obj(0, static_cast<int>(out.rs.num_objects) - 1);
    int atoms = natoms(rng);
    for (int i = 0; i < atoms; ++i) {
        std::uniform_int_distribution<int> pick(0, preds - 1);
        int p = pick(rng);
        std::vector<int> args;
        for (int j = 0; j < out.arities[static_cast<size_t>(p)]; ++j)
            args.push_back(obj(rng));
        auto atom = std::make_pair(p, std::move(args));
        if (std::find(out.rs.atoms.begin(), out.rs.atoms.end(), atom) == out.rs.atoms.end())
            out.rs.atoms.push_back(std::move(atom));
    }
    return out;
}

inline planiso::RelationalStructure permute_structure(const planiso::RelationalStructure& rs,
                                                      const std::vector<uint32_t>& sigma) {
    planiso::RelationalStructure out;
    out.num_objects = rs.num_objects;
    for (const auto& [pred, args] : rs.atoms) {
        std::vector<int> mapped;
        mapped.reserve(args.size());
        for (int a : args)
            mapped.push_back(static_cast<int>(sigma[static_cast<size_t>(a)]));
        out.atoms.emplace_back(pred, std::move(mapped));
    }
    return out;
}

// Adds or removes one random atom of predicate 0 (keeps the vocabulary).
inline planiso::RelationalStructure perturb_structure(const RandomStructure& s, Rng& rng) {
    planiso::RelationalStructure out = s.rs;
    std::uniform_int_distribution<int> obj(0, static_cast<int>(out.num_objects) - 1);
    std::vector<int> args;
    for (int j = 0; j < s.arities[0]; ++j)
        args.push_back(obj(rng));
    auto atom = std::make_pair(0, std::move(args));
    auto it = std::find(out.atoms.begin(), out.atoms.end(), atom);
    if (it != out.atoms.end())
        out.atoms.erase(it);
    else
        out.atoms.push_back(std::move(atom));
    return out;
}

// ---------------------------------------------------------------------------
// Domain oracles
// ---------------------------------------------------------------------------

// Reachable states of an n-ball gripper task: robot position (2) times
// ball placements — each ball in room A, room B, or one of two grippers,
// with grippers exclusive. Closed form:
//   2 * (2^n + 2n*2^(n-1) + n(n-1)*2^(n-2))
inline uint64_t gripper_state_count(uint64_t n) {
    uint64_t p = 1ull << n;
    uint64_t both_free = p;
    uint64_t one_held = 2 * n * (p / 2);
    uint64_t two_held = n >= 2 ? n * (n - 1) * (p / 4) : 0;
    return 2 * (both_free + one_held + two_held);
}

} // namespace testutil

#endif // PLANISO_TESTS_HELPERS_HPP_
