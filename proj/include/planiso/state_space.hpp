#ifndef PLANISO_STATE_SPACE_HPP_
#define PLANISO_STATE_SPACE_HPP_

#include <algorithm>
#include <deque>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ground.hpp"
#include "util.hpp"

namespace planiso {

using State = Bitset;

struct TransitionSystem {
    std::vector<State> states;
    size_t initial = 0;
    std::vector<std::vector<uint32_t>> succ;
    std::vector<bool> goal_flags;
    std::vector<uint32_t> vstar; // kInfiniteCost for dead ends

    size_t num_transitions() const {
        size_t m = 0;
        for (const auto& row : succ)
            m += row.size();
        return m;
    }
};

inline bool is_goal(const State& s, const GroundTask& task) { return s.contains_all(task.goal_set); }

inline bool action_applicable(const GroundAction& a, const State& s) {
    return s.contains_all(a.pre_pos) && !s.intersects(a.pre_neg);
}

inline std::vector<std::pair<uint32_t, State>> successors(const State& s, const GroundTask& task) {
    std::vector<std::pair<uint32_t, State>> out;
    for (size_t i = 0; i < task.actions.size(); ++i) {
        const GroundAction& a = task.actions[i];
        if (!action_applicable(a, s))
            continue;
        State t = s;
        t.apply(a.del, a.add);
        out.emplace_back(static_cast<uint32_t>(i), std::move(t));
    }
    return out;
}

constexpr size_t kDefaultStateCap = 10000;

// BFS from the initial state with exact-state deduplication. States are
// numbered in BFS discovery order, successors expanded in ground-action order,
// so the numbering is deterministic.
inline TransitionSystem expand(const GroundTask& task, size_t limit = kDefaultStateCap) {
    if (limit == 0)
        throw Error(ErrorKind::validation, "state cap must be positive");
    TransitionSystem ts;
    std::unordered_map<State, uint32_t, BitsetHash> index;
    ts.states.push_back(task.initial_state);
    index.emplace(task.initial_state, 0);
    ts.succ.emplace_back();

    size_t frontier = 0;
    while (frontier < ts.states.size()) {
        State s = ts.states[frontier]; // copy: ts.states may reallocate below
        for (size_t i = 0; i < task.actions.size(); ++i) {
            const GroundAction& a = task.actions[i];
            if (!action_applicable(a, s))
                continue;
            State t = s;
            t.apply(a.del, a.add);
            auto [it, fresh] = index.emplace(std::move(t), static_cast<uint32_t>(ts.states.size()));
            if (fresh) {
                if (ts.states.size() >= limit) {
                    size_t open = ts.states.size() - frontier;
                    throw Error(ErrorKind::cap_exceeded,
                                "state cap exceeded: " + std::to_string(limit) + " states expanded, " +
                                    std::to_string(open) + " still on the frontier");
                }
                ts.states.push_back(it->first);
                ts.succ.emplace_back();
            }
            uint32_t j = it->second;
            auto& row = ts.succ[frontier];
            if (std::find(row.begin(), row.end(), j) == row.end())
                row.push_back(j);
        }
        ++frontier;
    }

    ts.goal_flags.resize(ts.states.size());
    for (size_t i = 0; i < ts.states.size(); ++i)
        ts.goal_flags[i] = is_goal(ts.states[i], task);
    return ts;
}

// Backward BFS from all goal states over the reversed successor relation.
inline void compute_vstar(TransitionSystem& ts) {
    size_t n = ts.states.size();
    std::vector<std::vector<uint32_t>> pred(n);
    for (size_t i = 0; i < n; ++i)
        for (uint32_t j : ts.succ[i])
            pred[j].push_back(static_cast<uint32_t>(i));
    ts.vstar.assign(n, kInfiniteCost);
    std::deque<uint32_t> queue;
    for (size_t i = 0; i < n; ++i) {
        if (ts.goal_flags[i]) {
            ts.vstar[i] = 0;
            queue.push_back(static_cast<uint32_t>(i));
        }
    }
    while (!queue.empty()) {
        uint32_t j = queue.front();
        queue.pop_front();
        for (uint32_t i : pred[j]) {
            if (ts.vstar[i] == kInfiniteCost) {
                ts.vstar[i] = ts.vstar[j] + 1;
                queue.push_back(i);
            }
        }
    }
}

inline std::vector<std::string> sorted_atom_names(const State& s, const GroundTask& task) {
    std::vector<std::string> names;
    s.for_each_set([&](size_t a) { names.push_back(task.atoms[a].name); });
    std::sort(names.begin(), names.end());
    return names;
}

inline void write_transition_system(std::ostream& os, const TransitionSystem& ts, const GroundTask& task) {
    os << "states " << ts.states.size() << " transitions " << ts.num_transitions() << "\n";
    for (const State& s : ts.states) {
        auto names = sorted_atom_names(s, task);
        for (size_t i = 0; i < names.size(); ++i)
            os << (i ? " " : "") << names[i];
        os << "\n";
    }
    for (size_t i = 0; i < ts.succ.size(); ++i)
        for (uint32_t j : ts.succ[i])
            os << i << " " << j << "\n";
}

} // namespace planiso

#endif // PLANISO_STATE_SPACE_HPP_
