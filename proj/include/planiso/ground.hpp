#ifndef PLANISO_GROUND_HPP_
#define PLANISO_GROUND_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "pddl.hpp"
#include "util.hpp"

namespace planiso {

struct GroundAtom {
    int pred = -1;
    std::vector<int> args;
    std::string name;
};

struct GroundAction {
    std::string name;
    int schema = -1;
    std::vector<int> binding;
    Bitset pre_pos, pre_neg, add, del;
};

struct GroundTask {
    DomainModel domain;
    std::string instance_name;
    std::vector<std::string> objects;
    std::vector<GroundAtom> atoms;
    std::vector<GroundAction> actions;
    Bitset initial_state; // includes static atoms and minted p_g goal atoms
    Bitset goal_set;      // the base goal atoms p(o̅); goal test is goal_set ⊆ s
    Bitset static_atoms;  // atoms of predicates never touched by any effect
    std::vector<bool> static_pred;

    size_t num_atoms() const { return atoms.size(); }

    Bitset make_state() const { return Bitset(atoms.size()); }
};

namespace detail {

inline std::string ground_atom_name(const DomainModel& dom, const std::vector<std::string>& objects, int pred,
                                    const std::vector<int>& args) {
    std::string name = dom.predicates[static_cast<size_t>(pred)].name;
    name += "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i)
            name += ",";
        name += objects[static_cast<size_t>(args[i])];
    }
    name += ")";
    return name;
}

struct AtomInterner {
    GroundTask* task;
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;

    uint64_t key_hash(int pred, const std::vector<int>& args) const {
        uint64_t h = mix64(static_cast<uint64_t>(pred) + 0x1234567ull);
        for (int a : args)
            h = mix64(h ^ static_cast<uint64_t>(a + 1));
        return h;
    }

    uint32_t intern(int pred, const std::vector<int>& args) {
        uint64_t h = key_hash(pred, args);
        auto& bucket = buckets[h];
        for (uint32_t id : bucket) {
            const GroundAtom& atom = task->atoms[id];
            if (atom.pred == pred && atom.args == args)
                return id;
        }
        uint32_t id = static_cast<uint32_t>(task->atoms.size());
        task->atoms.push_back({pred, args, ground_atom_name(task->domain, task->objects, pred, args)});
        bucket.push_back(id);
        return id;
    }

    int find(int pred, const std::vector<int>& args) const {
        auto it = buckets.find(key_hash(pred, args));
        if (it == buckets.end())
            return -1;
        for (uint32_t id : it->second) {
            const GroundAtom& atom = task->atoms[id];
            if (atom.pred == pred && atom.args == args)
                return static_cast<int>(id);
        }
        return -1;
    }
};

} // namespace detail

struct GroundLimits {
    size_t max_actions = 1000000;
};

inline GroundTask ground(const DomainModel& dom, const InstanceModel& inst, const GroundLimits& limits = {}) {
    GroundTask task;
    task.domain = dom;
    task.instance_name = inst.name;
    task.objects = inst.objects;
    task.static_pred.assign(dom.predicates.size(), true);
    for (const auto& schema : dom.schemas) {
        for (const auto* effects : {&schema.add_effects, &schema.del_effects})
            for (const auto& atom : *effects)
                task.static_pred[static_cast<size_t>(atom.pred)] = false;
    }

    detail::AtomInterner interner{&task, {}};
    struct ActionIds {
        std::vector<uint32_t> pre_pos, pre_neg, add, del;
    };
    std::vector<ActionIds> action_ids; // bitsets are materialized once the atom universe is final

    // Dense atom ids in first-seen order: init, minted goal atoms, base goal
    // atoms, then schema bindings in ground order.
    std::vector<uint32_t> init_ids;
    for (const auto& atom : inst.init)
        init_ids.push_back(interner.intern(atom.pred, atom.args));
    std::vector<uint32_t> minted_goal_ids, base_goal_ids;
    for (const auto& atom : inst.goal) {
        int goal_pred = dom.predicates[static_cast<size_t>(atom.pred)].goal_pred;
        if (goal_pred < 0)
            throw Error(ErrorKind::internal, "base predicate without a minted goal predicate");
        minted_goal_ids.push_back(interner.intern(goal_pred, atom.args));
        base_goal_ids.push_back(interner.intern(atom.pred, atom.args));
    }

    // Per-parameter candidate filtering via static unary positive preconditions.
    size_t num_objects = inst.objects.size();
    for (const auto& schema : dom.schemas) {
        int schema_id = static_cast<int>(&schema - dom.schemas.data());
        size_t arity = schema.params.size();
        std::vector<std::vector<int>> candidates(arity);
        for (size_t p = 0; p < arity; ++p) {
            std::vector<bool> ok(num_objects, true);
            for (const auto& atom : schema.pre_pos) {
                if (atom.args.size() != 1 || atom.args[0].var != static_cast<int>(p))
                    continue;
                if (!task.static_pred[static_cast<size_t>(atom.pred)])
                    continue;
                for (size_t o = 0; o < num_objects; ++o) {
                    if (ok[o] && interner.find(atom.pred, {static_cast<int>(o)}) < 0)
                        ok[o] = false;
                }
            }
            for (size_t o = 0; o < num_objects; ++o)
                if (ok[o])
                    candidates[p].push_back(static_cast<int>(o));
        }

        auto resolve = [&](const Term& t, const std::vector<int>& binding) {
            if (t.is_var())
                return binding[static_cast<size_t>(t.var)];
            int id = -1;
            auto it = inst.object_index.find(t.constant);
            if (it != inst.object_index.end())
                id = it->second;
            if (id < 0)
                throw Error(ErrorKind::grounding, "unknown constant '" + t.constant + "' in schema '" + schema.name + "'");
            return id;
        };

        std::vector<int> binding(arity, 0);
        std::vector<size_t> cursor(arity, 0);
        bool done = false;
        while (!done) {
            bool skip_binding = false;
            for (size_t p = 0; p < arity; ++p) {
                if (candidates[p].empty()) {
                    skip_binding = true;
                    break;
                }
                binding[p] = candidates[p][cursor[p]];
            }
            if (skip_binding)
                break;

            // Static pruning happens before any effect-collision checks.
            bool pruned = false;
            for (const auto& atom : schema.pre_pos) {
                if (!task.static_pred[static_cast<size_t>(atom.pred)])
                    continue;
                std::vector<int> args;
                args.reserve(atom.args.size());
                for (const Term& t : atom.args)
                    args.push_back(resolve(t, binding));
                if (interner.find(atom.pred, args) < 0) {
                    pruned = true;
                    break;
                }
            }
            if (!pruned) {
                for (const auto& atom : schema.pre_neg) {
                    if (!task.static_pred[static_cast<size_t>(atom.pred)])
                        continue;
                    std::vector<int> args;
                    args.reserve(atom.args.size());
                    for (const Term& t : atom.args)
                        args.push_back(resolve(t, binding));
                    if (interner.find(atom.pred, args) >= 0) {
                        pruned = true;
                        break;
                    }
                }
            }

            if (!pruned) {
                GroundAction action;
                action.schema = schema_id;
                action.binding = binding;
                action.name = schema.name + "(";
                for (size_t p = 0; p < arity; ++p) {
                    if (p)
                        action.name += ",";
                    action.name += inst.objects[static_cast<size_t>(binding[p])];
                }
                action.name += ")";

                std::vector<uint32_t> pre_pos, pre_neg, add, del;
                auto intern_atoms = [&](const std::vector<SchemaAtom>& atoms, std::vector<uint32_t>& out) {
                    for (const auto& atom : atoms) {
                        std::vector<int> args;
                        args.reserve(atom.args.size());
                        for (const Term& t : atom.args)
                            args.push_back(resolve(t, binding));
                        out.push_back(interner.intern(atom.pred, args));
                    }
                };
                intern_atoms(schema.pre_pos, pre_pos);
                intern_atoms(schema.pre_neg, pre_neg);
                intern_atoms(schema.add_effects, add);
                intern_atoms(schema.del_effects, del);

                for (uint32_t a : add) {
                    for (uint32_t d : del) {
                        if (a == d)
                            throw Error(ErrorKind::grounding, "action '" + action.name +
                                                                  "' adds and deletes atom '" +
                                                                  task.atoms[a].name + "'");
                    }
                }

                task.actions.push_back(std::move(action));
                action_ids.push_back({std::move(pre_pos), std::move(pre_neg), std::move(add), std::move(del)});
                if (task.actions.size() > limits.max_actions)
                    throw Error(ErrorKind::cap_exceeded,
                                "grounding cap exceeded: more than " + std::to_string(limits.max_actions) +
                                    " ground actions (at schema '" + schema.name + "')");
            }

            // advance the binding cursor
            size_t p = 0;
            for (; p < arity; ++p) {
                if (++cursor[p] < candidates[p].size())
                    break;
                cursor[p] = 0;
            }
            if (p == arity)
                done = true;
            if (arity == 0)
                done = true;
        }
    }

    size_t n = task.atoms.size();
    for (size_t i = 0; i < task.actions.size(); ++i) {
        auto& ids = action_ids[i];
        auto to_bitset = [&](const std::vector<uint32_t>& v) {
            Bitset b(n);
            for (uint32_t id : v)
                b.set(id);
            return b;
        };
        task.actions[i].pre_pos = to_bitset(ids.pre_pos);
        task.actions[i].pre_neg = to_bitset(ids.pre_neg);
        task.actions[i].add = to_bitset(ids.add);
        task.actions[i].del = to_bitset(ids.del);
    }

    task.initial_state = Bitset(n);
    for (uint32_t id : init_ids)
        task.initial_state.set(id);
    for (uint32_t id : minted_goal_ids)
        task.initial_state.set(id);
    task.goal_set = Bitset(n);
    for (uint32_t id : base_goal_ids)
        task.goal_set.set(id);
    task.static_atoms = Bitset(n);
    for (size_t a = 0; a < n; ++a)
        if (task.static_pred[static_cast<size_t>(task.atoms[a].pred)])
            task.static_atoms.set(a);
    return task;
}

} // namespace planiso

#endif // PLANISO_GROUND_HPP_
