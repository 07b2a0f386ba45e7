#ifndef PLANISO_ABSTRACTION_HPP_
#define PLANISO_ABSTRACTION_HPP_

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "canonical.hpp"
#include "object_graph.hpp"
#include "state_space.hpp"
#include "util.hpp"

namespace planiso {

struct EquivalenceClass {
    uint32_t id = 0;
    CanonicalForm form;
    uint32_t instance = 0;       // owning instance index (pooled models)
    uint32_t representative = 0; // state index within the owning instance
    uint64_t member_count = 0;
    uint32_t vstar = kInfiniteCost;
    bool is_goal = false;
};

struct AbstractModel {
    std::vector<EquivalenceClass> classes;
    uint32_t initial_class = 0;
    std::vector<uint32_t> goal_classes;
    std::vector<std::pair<uint32_t, uint32_t>> abstract_succ; // sorted, deduplicated
    std::vector<uint32_t> state_class;                        // concrete state index → class id
};

// Groups states by canonical form of their plain object graph. Class ids in
// order of first appearance (BFS order), so the representative is the lowest
// member index. Per-class goal-flag and V* constancy is enforced: a violation
// would falsify the isomorphism-quotient construction and indicates a bug.
inline AbstractModel quotient(const TransitionSystem& ts, const GroundTask& task, const ColorLegend& legend,
                              unsigned jobs = 1) {
    size_t n = ts.states.size();
    (void)jobs; // state order must be preserved; classification is sequential

    // States are bucketed by a cheap label-independent invariant; membership
    // in a class is decided by an exact isomorphism test against the class
    // representative. The canonical form (the cross-run class key) is
    // computed once per class, not once per state.
    AbstractModel am;
    am.state_class.resize(n);
    std::vector<ObjectGraph> rep_graphs; // one per class
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets; // invariant hash → class ids
    for (size_t i = 0; i < n; ++i) {
        ObjectGraph g = build_object_graph(ts.states[i], task, Encoding::plain, legend);
        int found = -1;
        auto& bucket = buckets[graph_invariant_hash(g)];
        for (uint32_t c : bucket) {
            if (graphs_isomorphic(g, rep_graphs[c])) {
                found = static_cast<int>(c);
                break;
            }
        }
        if (found < 0) {
            EquivalenceClass cls;
            cls.id = static_cast<uint32_t>(am.classes.size());
            cls.form = canonical_form(g);
            cls.representative = static_cast<uint32_t>(i);
            cls.member_count = 1;
            cls.vstar = ts.vstar.empty() ? kInfiniteCost : ts.vstar[i];
            cls.is_goal = ts.goal_flags[i];
            bucket.push_back(cls.id);
            am.state_class[i] = cls.id;
            am.classes.push_back(std::move(cls));
            rep_graphs.push_back(std::move(g));
        } else {
            EquivalenceClass& cls = am.classes[static_cast<size_t>(found)];
            ++cls.member_count;
            am.state_class[i] = cls.id;
            if (cls.is_goal != ts.goal_flags[i])
                throw Error(ErrorKind::internal, "class " + std::to_string(cls.id) +
                                                     " mixes goal and non-goal states (states " +
                                                     std::to_string(cls.representative) + ", " + std::to_string(i) +
                                                     ")");
            if (!ts.vstar.empty() && cls.vstar != ts.vstar[i])
                throw Error(ErrorKind::internal, "class " + std::to_string(cls.id) + " mixes V* values " +
                                                     cost_to_string(cls.vstar) + " and " +
                                                     cost_to_string(ts.vstar[i]));
        }
    }

    am.initial_class = am.state_class[ts.initial];
    for (const auto& cls : am.classes)
        if (cls.is_goal)
            am.goal_classes.push_back(cls.id);
    for (size_t i = 0; i < n; ++i)
        for (uint32_t j : ts.succ[i])
            am.abstract_succ.emplace_back(am.state_class[i], am.state_class[j]);
    std::sort(am.abstract_succ.begin(), am.abstract_succ.end());
    am.abstract_succ.erase(std::unique(am.abstract_succ.begin(), am.abstract_succ.end()), am.abstract_succ.end());
    return am;
}

struct PooledModel {
    std::vector<EquivalenceClass> classes;                    // pooled ids; representative = lexicographically
                                                              // smallest (instance, state index)
    std::vector<std::vector<uint32_t>> local_to_pooled;       // per instance: local class id → pooled id
    std::vector<std::pair<uint32_t, uint32_t>> abstract_succ; // pooled, deduplicated
    uint64_t total_states = 0;

    double reduction_factor() const {
        return classes.empty() ? 1.0 : static_cast<double>(total_states) / static_cast<double>(classes.size());
    }
};

// Merges classes across instances of one domain when their canonical forms
// match bytewise. Isomorphic full states (static and goal atoms included)
// behave identically, so merged classes must agree on V* and goal flag.
inline PooledModel pool_classes(const std::vector<AbstractModel>& models) {
    PooledModel pm;
    pm.local_to_pooled.resize(models.size());
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;
    for (size_t inst = 0; inst < models.size(); ++inst) {
        const AbstractModel& am = models[inst];
        pm.total_states += am.state_class.size();
        pm.local_to_pooled[inst].resize(am.classes.size());
        for (const auto& cls : am.classes) {
            int found = -1;
            auto& bucket = buckets[cls.form.digest.lo];
            for (uint32_t p : bucket) {
                if (pm.classes[p].form == cls.form) {
                    found = static_cast<int>(p);
                    break;
                }
            }
            if (found < 0) {
                EquivalenceClass pooled = cls;
                pooled.id = static_cast<uint32_t>(pm.classes.size());
                pooled.instance = static_cast<uint32_t>(inst);
                bucket.push_back(pooled.id);
                pm.local_to_pooled[inst][cls.id] = pooled.id;
                pm.classes.push_back(std::move(pooled));
            } else {
                EquivalenceClass& pooled = pm.classes[static_cast<size_t>(found)];
                pooled.member_count += cls.member_count;
                pm.local_to_pooled[inst][cls.id] = pooled.id;
                if (pooled.is_goal != cls.is_goal || pooled.vstar != cls.vstar)
                    throw Error(ErrorKind::internal,
                                "pooled class " + std::to_string(pooled.id) +
                                    " disagrees across instances on V* or goal flag");
            }
        }
    }
    for (size_t inst = 0; inst < models.size(); ++inst)
        for (const auto& [a, b] : models[inst].abstract_succ)
            pm.abstract_succ.emplace_back(pm.local_to_pooled[inst][a], pm.local_to_pooled[inst][b]);
    std::sort(pm.abstract_succ.begin(), pm.abstract_succ.end());
    pm.abstract_succ.erase(std::unique(pm.abstract_succ.begin(), pm.abstract_succ.end()), pm.abstract_succ.end());
    return pm;
}

struct FaithfulnessViolation {
    uint32_t state = 0;      // the t that cannot mimic
    uint32_t class_from = 0; // [s] = [t]
    uint32_t class_to = 0;   // [s']
};

struct FaithfulnessReport {
    std::vector<FaithfulnessViolation> violations;
    bool ok() const { return violations.empty(); }
};

// Exhaustive check of the bisimulation conditions: for every abstract
// transition (C, D) every state of C has a concrete successor in D, and every
// class is goal-uniform (the latter is enforced during quotienting already).
inline FaithfulnessReport verify_faithfulness(const TransitionSystem& ts, const AbstractModel& am) {
    FaithfulnessReport report;
    size_t n = ts.states.size();
    std::vector<std::vector<uint32_t>> succ_classes(n);
    for (size_t i = 0; i < n; ++i) {
        for (uint32_t j : ts.succ[i])
            succ_classes[i].push_back(am.state_class[j]);
        std::sort(succ_classes[i].begin(), succ_classes[i].end());
        succ_classes[i].erase(std::unique(succ_classes[i].begin(), succ_classes[i].end()), succ_classes[i].end());
    }
    std::vector<std::vector<uint32_t>> members(am.classes.size());
    for (size_t i = 0; i < n; ++i)
        members[am.state_class[i]].push_back(static_cast<uint32_t>(i));
    for (const auto& [c, d] : am.abstract_succ) {
        for (uint32_t t : members[c]) {
            if (!std::binary_search(succ_classes[t].begin(), succ_classes[t].end(), d))
                report.violations.push_back({t, c, d});
        }
    }
    return report;
}

// Lifts an abstract trajectory to a concrete one by the inductive
// construction: from the current state, step to any successor in the next
// class. Fails only if faithfulness is violated.
inline std::vector<uint32_t> verify_bisimulation_lift(const TransitionSystem& ts, const AbstractModel& am,
                                                      const std::vector<uint32_t>& trajectory, uint32_t start) {
    if (trajectory.empty() || am.state_class[start] != trajectory[0])
        throw Error(ErrorKind::validation, "start state is not in the first class of the trajectory");
    std::vector<uint32_t> concrete{start};
    for (size_t k = 1; k < trajectory.size(); ++k) {
        uint32_t cur = concrete.back();
        int next = -1;
        for (uint32_t j : ts.succ[cur]) {
            if (am.state_class[j] == trajectory[k]) {
                next = static_cast<int>(j);
                break;
            }
        }
        if (next < 0)
            throw Error(ErrorKind::internal, "trajectory lift failed at step " + std::to_string(k) +
                                                 ": state " + std::to_string(cur) + " has no successor in class " +
                                                 std::to_string(trajectory[k]));
        concrete.push_back(static_cast<uint32_t>(next));
    }
    return concrete;
}

// Writes one representative per class plus abstract transitions:
//   reduced-set v1 states <N> classes <K> factor <F>
//   class <id> vstar <v|inf> goal <0|1> rep <sorted atoms…>
//   asucc <i> <j>
inline void export_reduced_training_set(std::ostream& os, const PooledModel& pm,
                                        const std::vector<const GroundTask*>& tasks,
                                        const std::vector<const TransitionSystem*>& systems) {
    os << "reduced-set v1 states " << pm.total_states << " classes " << pm.classes.size() << " factor "
       << pm.reduction_factor() << "\n";
    for (const auto& cls : pm.classes) {
        os << "class " << cls.id << " vstar " << cost_to_string(cls.vstar) << " goal " << (cls.is_goal ? 1 : 0)
           << " rep";
        const State& rep = systems[cls.instance]->states[cls.representative];
        for (const auto& name : sorted_atom_names(rep, *tasks[cls.instance]))
            os << " " << name;
        os << "\n";
    }
    for (const auto& [a, b] : pm.abstract_succ)
        os << "asucc " << a << " " << b << "\n";
}

} // namespace planiso

#endif // PLANISO_ABSTRACTION_HPP_
