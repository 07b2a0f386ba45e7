#ifndef PLANISO_OBJECT_GRAPH_HPP_
#define PLANISO_OBJECT_GRAPH_HPP_

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ground.hpp"
#include "state_space.hpp"
#include "util.hpp"

namespace planiso {

enum class Encoding { plain, goal_marking };

inline const char* encoding_name(Encoding e) { return e == Encoding::plain ? "plain" : "goal_marking"; }

// A planning state viewed logically: universe of objects plus the set of
// ground atoms interpreting each relation symbol.
struct RelationalStructure {
    size_t num_objects = 0;
    std::vector<std::pair<int, std::vector<int>>> atoms; // (predicate, argument tuple)

    std::map<int, std::vector<std::vector<int>>> interpretations() const {
        std::map<int, std::vector<std::vector<int>>> out;
        for (const auto& [pred, args] : atoms)
            out[pred].push_back(args);
        for (auto& [pred, tuples] : out)
            std::sort(tuples.begin(), tuples.end());
        return out;
    }
};

// Projects a state to its relational structure. Under goal marking, each goal
// atom p_g(o̅) is reinterpreted as p_g_true(o̅) if p(o̅) holds in s, else as
// p_g_false(o̅).
inline RelationalStructure relational_structure(const State& s, const GroundTask& task,
                                                Encoding encoding = Encoding::plain) {
    RelationalStructure rs;
    rs.num_objects = task.objects.size();
    s.for_each_set([&](size_t a) {
        const GroundAtom& atom = task.atoms[a];
        int pred = atom.pred;
        if (encoding == Encoding::goal_marking) {
            const Predicate& p = task.domain.predicates[static_cast<size_t>(pred)];
            if (p.is_goal_pred()) {
                // Minted goal atoms precede their base atoms in the interner,
                // so the base atom always has an id.
                bool base_true = false;
                for (size_t b = 0; b < task.atoms.size(); ++b) {
                    if (task.atoms[b].pred == p.goal_of && task.atoms[b].args == atom.args) {
                        base_true = s.test(b);
                        break;
                    }
                }
                pred = base_true ? p.marked_true : p.marked_false;
            }
        }
        rs.atoms.emplace_back(pred, atom.args);
    });
    return rs;
}

// Maps color keys — ⊥ for object vertices, (predicate, position) pairs for
// positional-argument vertices — to dense ids shared across a collection.
class ColorLegend {
  public:
    static ColorLegend from_domain(const DomainModel& dom) {
        ColorLegend legend;
        for (const auto& pred : dom.predicates) {
            int id = static_cast<int>(&pred - dom.predicates.data());
            int positions = std::max(pred.arity, 1); // zero-arity atoms get one (R,1) vertex
            for (int j = 1; j <= positions; ++j)
                legend.add_key(id, j, pred.name + "[" + std::to_string(j) + "]");
        }
        return legend;
    }

    // For synthetic structures in tests: predicate i has arity arities[i].
    static ColorLegend from_arities(const std::vector<int>& arities) {
        ColorLegend legend;
        for (size_t p = 0; p < arities.size(); ++p) {
            int positions = std::max(arities[p], 1);
            for (int j = 1; j <= positions; ++j)
                legend.add_key(static_cast<int>(p), j, "r" + std::to_string(p) + "[" + std::to_string(j) + "]");
        }
        return legend;
    }

    static constexpr uint32_t kObjectColor = 0;

    uint32_t color(int pred, int pos) const {
        auto it = keys_.find({pred, pos});
        if (it == keys_.end())
            throw Error(ErrorKind::internal, "color legend has no key for predicate " + std::to_string(pred) +
                                                 " position " + std::to_string(pos));
        return it->second;
    }

    size_t num_colors() const { return names_.size(); }
    const std::string& color_name(uint32_t c) const { return names_[c]; }

  private:
    void add_key(int pred, int pos, const std::string& name) {
        if (names_.empty())
            names_.push_back("bot"); // the ⊥ color for object vertices is id 0
        keys_[{pred, pos}] = static_cast<uint32_t>(names_.size());
        names_.push_back(name);
    }

    std::map<std::pair<int, int>, uint32_t> keys_;
    std::vector<std::string> names_;
};

struct ObjectGraph {
    std::vector<uint32_t> colors;
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    std::vector<std::vector<uint32_t>> adj;
    std::vector<std::string> tags; // provenance, for dumps and diagnostics

    size_t num_vertices() const { return colors.size(); }

    void add_edge(uint32_t u, uint32_t v) {
        edges.emplace_back(u, v);
        adj[u].push_back(v);
        adj[v].push_back(u);
    }

    void finish() {
        for (auto& row : adj)
            std::sort(row.begin(), row.end());
    }
};

inline ObjectGraph build_object_graph(const RelationalStructure& rs, const ColorLegend& legend,
                                      const std::vector<std::string>* object_names = nullptr) {
    ObjectGraph g;
    g.colors.assign(rs.num_objects, ColorLegend::kObjectColor);
    g.adj.resize(rs.num_objects);
    g.tags.resize(rs.num_objects);
    for (size_t o = 0; o < rs.num_objects; ++o)
        g.tags[o] = object_names ? (*object_names)[o] : "o" + std::to_string(o);

    for (const auto& [pred, args] : rs.atoms) {
        std::string tuple;
        for (size_t j = 0; j < args.size(); ++j)
            tuple += (j ? "," : "") + (object_names ? (*object_names)[static_cast<size_t>(args[j])]
                                                    : std::to_string(args[j]));
        size_t k = args.size();
        if (k == 0) {
            g.colors.push_back(legend.color(pred, 1));
            g.adj.emplace_back();
            g.tags.push_back("p" + std::to_string(pred) + "[1]()");
            continue;
        }
        uint32_t first = static_cast<uint32_t>(g.num_vertices());
        for (size_t j = 1; j <= k; ++j) {
            g.colors.push_back(legend.color(pred, static_cast<int>(j)));
            g.adj.emplace_back();
            g.tags.push_back("p" + std::to_string(pred) + "[" + std::to_string(j) + "](" + tuple + ")");
        }
        for (size_t j = 0; j < k; ++j) {
            g.add_edge(static_cast<uint32_t>(args[j]), first + static_cast<uint32_t>(j));
            if (j + 1 < k)
                g.add_edge(first + static_cast<uint32_t>(j), first + static_cast<uint32_t>(j) + 1);
        }
    }
    g.finish();
    return g;
}

inline ObjectGraph build_object_graph(const State& s, const GroundTask& task, Encoding encoding,
                                      const ColorLegend& legend) {
    return build_object_graph(relational_structure(s, task, encoding), legend, &task.objects);
}

inline void write_object_graph(std::ostream& os, const ObjectGraph& g, const ColorLegend& legend) {
    os << "p vcg " << g.num_vertices() << " " << g.edges.size() << " " << legend.num_colors() << "\n";
    for (size_t v = 0; v < g.num_vertices(); ++v)
        os << "n " << v << " " << g.colors[v] << "\n";
    for (const auto& [u, v] : g.edges)
        os << "e " << u << " " << v << "\n";
    os << "legend\n";
    for (uint32_t c = 0; c < legend.num_colors(); ++c)
        os << "c " << c << " " << legend.color_name(c) << "\n";
}

} // namespace planiso

#endif // PLANISO_OBJECT_GRAPH_HPP_
