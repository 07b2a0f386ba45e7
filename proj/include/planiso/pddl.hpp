#ifndef PLANISO_PDDL_HPP_
#define PLANISO_PDDL_HPP_

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sexpr.hpp"
#include "util.hpp"

namespace planiso {

// ---------------------------------------------------------------------------
// Domain / instance models (STRIPS subset; types compiled away at parse time)
// ---------------------------------------------------------------------------

struct Predicate {
    std::string name;
    int arity = 0;
    bool synthetic = false; // minted predicate, not writable in input files
    int goal_of = -1;       // base predicate id if this is a minted p_g
    int goal_pred = -1;     // id of the minted p_g copy, for base predicates
    int marked_true = -1;   // goal-marking variants, for p_g predicates only
    int marked_false = -1;
    int marked_base = -1;   // the p_g id if this is a marking variant

    bool is_goal_pred() const { return goal_of >= 0; }
    bool is_marking_variant() const { return marked_base >= 0; }

    bool operator==(const Predicate& o) const {
        return name == o.name && arity == o.arity && synthetic == o.synthetic && goal_of == o.goal_of &&
               goal_pred == o.goal_pred && marked_true == o.marked_true && marked_false == o.marked_false &&
               marked_base == o.marked_base;
    }
};

// A schema argument: either a parameter index or a constant object name.
struct Term {
    int var = -1;
    std::string constant;

    bool is_var() const { return var >= 0; }
    bool operator==(const Term& o) const { return var == o.var && constant == o.constant; }
};

struct SchemaAtom {
    int pred = -1;
    std::vector<Term> args;
    bool operator==(const SchemaAtom& o) const { return pred == o.pred && args == o.args; }
};

struct ActionSchema {
    std::string name;
    std::vector<std::string> params;
    std::vector<SchemaAtom> pre_pos;
    std::vector<SchemaAtom> pre_neg;
    std::vector<SchemaAtom> add_effects;
    std::vector<SchemaAtom> del_effects;

    bool operator==(const ActionSchema& o) const {
        return name == o.name && params == o.params && pre_pos == o.pre_pos && pre_neg == o.pre_neg &&
               add_effects == o.add_effects && del_effects == o.del_effects;
    }
};

struct TypeInfo {
    std::string name;
    int pred = -1;   // the compiled static unary predicate
    int parent = -1; // parent type index, -1 for the root "object"
};

struct DomainModel {
    std::string name;
    std::vector<Predicate> predicates;
    std::map<std::string, int> predicate_index;
    std::vector<ActionSchema> schemas;
    std::vector<std::string> constants;
    std::vector<std::string> constant_types; // type name or "" per constant
    std::vector<TypeInfo> types;
    std::map<std::string, int> type_index;
    std::vector<std::string> requirements;

    int pred_id(const std::string& n) const {
        auto it = predicate_index.find(n);
        return it == predicate_index.end() ? -1 : it->second;
    }

    bool operator==(const DomainModel& o) const {
        return name == o.name && predicates == o.predicates && schemas == o.schemas && constants == o.constants;
    }
};

struct GroundAtomModel {
    int pred = -1;
    std::vector<int> args; // object ids in the instance object table
    bool operator==(const GroundAtomModel& o) const { return pred == o.pred && args == o.args; }
    bool operator<(const GroundAtomModel& o) const {
        return pred != o.pred ? pred < o.pred : args < o.args;
    }
};

struct InstanceModel {
    std::string name;
    std::string domain_name;
    std::vector<std::string> objects; // domain constants first, then instance objects
    std::map<std::string, int> object_index;
    std::vector<GroundAtomModel> init;
    std::vector<GroundAtomModel> goal;

    int object_id(const std::string& n) const {
        auto it = object_index.find(n);
        return it == object_index.end() ? -1 : it->second;
    }

    bool operator==(const InstanceModel& o) const {
        return name == o.name && domain_name == o.domain_name && objects == o.objects && init == o.init &&
               goal == o.goal;
    }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

struct TypedEntry {
    std::string name;
    std::string type; // "" when untyped or "object"
    int line = 0, col = 0;
};

// Reads a PDDL typed list "a b - t c d - u e" from `items`.
inline std::vector<TypedEntry> read_typed_list(const std::vector<SExpr>& items, size_t from = 0) {
    std::vector<TypedEntry> out;
    std::vector<size_t> pending;
    for (size_t i = from; i < items.size(); ++i) {
        const SExpr& node = items[i];
        if (node.is_list)
            throw parse_error(node.line, node.col, "expected a name in typed list");
        if (node.atom == "-") {
            if (i + 1 >= items.size() || items[i + 1].is_list)
                throw parse_error(node.line, node.col, "expected a type name after '-'");
            const std::string& type = items[i + 1].atom;
            for (size_t p : pending) {
                out.push_back({items[p].atom, type == "object" ? std::string() : type, items[p].line, items[p].col});
            }
            pending.clear();
            ++i;
        } else {
            pending.push_back(i);
        }
    }
    for (size_t p : pending)
        out.push_back({items[p].atom, std::string(), items[p].line, items[p].col});
    return out;
}

inline int require_declared_pred(const DomainModel& dom, const SExpr& node, size_t arity) {
    const std::string& name = node.at(0).atom;
    int pred = dom.pred_id(name);
    if (pred < 0)
        throw Error(ErrorKind::validation, "undeclared predicate '" + name + "' at " + std::to_string(node.line) +
                                               ":" + std::to_string(node.col));
    if (dom.predicates[pred].synthetic || dom.predicates[pred].is_goal_pred())
        throw Error(ErrorKind::validation, "predicate '" + name + "' is reserved and cannot appear in input");
    if (static_cast<size_t>(dom.predicates[pred].arity) != arity)
        throw Error(ErrorKind::validation, "predicate '" + name + "' used with arity " + std::to_string(arity) +
                                               " but declared with arity " + std::to_string(dom.predicates[pred].arity));
    return pred;
}

inline SchemaAtom read_schema_atom(const DomainModel& dom, const ActionSchema& schema, const SExpr& node) {
    if (!node.is_list || node.items.empty() || node.items[0].is_list)
        throw parse_error(node.line, node.col, "expected an atom");
    if (node.items[0].atom == "=")
        throw Error(ErrorKind::unsupported, "unsupported PDDL feature: :equality");
    SchemaAtom atom;
    atom.pred = require_declared_pred(dom, node, node.items.size() - 1);
    for (size_t i = 1; i < node.items.size(); ++i) {
        const SExpr& arg = node.items[i];
        if (arg.is_list)
            throw parse_error(arg.line, arg.col, "expected a term");
        Term term;
        if (!arg.atom.empty() && arg.atom[0] == '?') {
            auto it = std::find(schema.params.begin(), schema.params.end(), arg.atom);
            if (it == schema.params.end())
                throw Error(ErrorKind::validation,
                            "variable '" + arg.atom + "' is not a parameter of action '" + schema.name + "'");
            term.var = static_cast<int>(it - schema.params.begin());
        } else {
            term.constant = arg.atom;
        }
        atom.args.push_back(std::move(term));
    }
    return atom;
}

inline void read_literal_conjunction(const DomainModel& dom, const ActionSchema& schema, const SExpr& node,
                                     bool allow_negative, std::vector<SchemaAtom>& pos,
                                     std::vector<SchemaAtom>& neg) {
    if (!node.is_list)
        throw parse_error(node.line, node.col, "expected a formula");
    std::string head = node.head();
    if (head == "and") {
        for (size_t i = 1; i < node.items.size(); ++i)
            read_literal_conjunction(dom, schema, node.items[i], allow_negative, pos, neg);
        return;
    }
    if (head == "or" || head == "imply" || head == "forall" || head == "exists")
        throw Error(ErrorKind::unsupported, "unsupported PDDL feature: non-STRIPS formula '" + head +
                                                "' (requires :adl)");
    if (head == "when")
        throw Error(ErrorKind::unsupported, "unsupported PDDL feature: conditional effects (:conditional-effects)");
    if (head == "not") {
        if (!allow_negative)
            throw Error(ErrorKind::unsupported, "negation is not allowed here");
        if (node.items.size() != 2)
            throw parse_error(node.line, node.col, "'not' takes exactly one literal");
        neg.push_back(read_schema_atom(dom, schema, node.items[1]));
        return;
    }
    pos.push_back(read_schema_atom(dom, schema, node));
}

inline void add_predicate(DomainModel& dom, Predicate pred) {
    if (dom.predicate_index.count(pred.name))
        throw Error(ErrorKind::validation, "duplicate predicate name '" + pred.name + "'");
    dom.predicate_index[pred.name] = static_cast<int>(dom.predicates.size());
    dom.predicates.push_back(std::move(pred));
}

// Mints the p_g copy of every base predicate plus the p_g_true / p_g_false
// goal-marking variants used by the marked state encoding.
inline void mint_goal_predicates(DomainModel& dom) {
    size_t base_count = dom.predicates.size();
    for (size_t p = 0; p < base_count; ++p) {
        Predicate goal;
        goal.name = dom.predicates[p].name + "_g";
        goal.arity = dom.predicates[p].arity;
        goal.synthetic = true;
        goal.goal_of = static_cast<int>(p);
        int goal_id = static_cast<int>(dom.predicates.size());
        dom.predicates[p].goal_pred = goal_id;
        add_predicate(dom, std::move(goal));
    }
    for (size_t p = 0; p < base_count; ++p) {
        int goal_id = dom.predicates[p].goal_pred;
        for (int variant = 0; variant < 2; ++variant) {
            Predicate marked;
            marked.name = dom.predicates[goal_id].name + (variant == 0 ? "_true" : "_false");
            marked.arity = dom.predicates[p].arity;
            marked.synthetic = true;
            marked.marked_base = goal_id;
            int id = static_cast<int>(dom.predicates.size());
            (variant == 0 ? dom.predicates[goal_id].marked_true : dom.predicates[goal_id].marked_false) = id;
            add_predicate(dom, std::move(marked));
        }
    }
}

} // namespace detail

inline DomainModel parse_domain(std::string_view text) {
    SExpr root = parse_single_sexpr(text);
    if (root.head() != "define")
        throw parse_error(root.line, root.col, "expected (define (domain ...) ...)");
    DomainModel dom;
    bool saw_name = false;

    for (size_t i = 1; i < root.items.size(); ++i) {
        const SExpr& section = root.items[i];
        std::string head = section.head();
        if (head == "domain") {
            dom.name = section.at(1).atom;
            saw_name = true;
        } else if (head == ":requirements") {
            for (size_t j = 1; j < section.items.size(); ++j) {
                const std::string& req = section.items[j].atom;
                if (req != ":strips" && req != ":typing" && req != ":negative-preconditions")
                    throw Error(ErrorKind::unsupported, "unsupported PDDL requirement: " + req);
                dom.requirements.push_back(req);
            }
        } else if (head == ":types") {
            auto entries = detail::read_typed_list(section.items, 1);
            for (const auto& e : entries) {
                if (!dom.type_index.count(e.name)) {
                    dom.type_index[e.name] = static_cast<int>(dom.types.size());
                    dom.types.push_back({e.name, -1, -1});
                }
            }
            for (const auto& e : entries) {
                if (e.type.empty())
                    continue;
                if (!dom.type_index.count(e.type)) {
                    dom.type_index[e.type] = static_cast<int>(dom.types.size());
                    dom.types.push_back({e.type, -1, -1});
                }
                dom.types[dom.type_index[e.name]].parent = dom.type_index[e.type];
            }
        } else if (head == ":constants") {
            auto entries = detail::read_typed_list(section.items, 1);
            for (const auto& e : entries) {
                dom.constants.push_back(e.name);
                dom.constant_types.push_back(e.type);
            }
        } else if (head == ":predicates") {
            for (size_t j = 1; j < section.items.size(); ++j) {
                const SExpr& decl = section.items[j];
                if (!decl.is_list || decl.items.empty())
                    throw parse_error(decl.line, decl.col, "expected a predicate declaration");
                Predicate pred;
                pred.name = decl.items[0].atom;
                auto params = detail::read_typed_list(decl.items, 1);
                pred.arity = static_cast<int>(params.size());
                detail::add_predicate(dom, std::move(pred));
            }
        } else if (head == ":action") {
            // handled below, after type predicates exist
        } else if (head == ":functions" || head == ":derived" || head == ":constraints") {
            throw Error(ErrorKind::unsupported, "unsupported PDDL feature: " + head);
        } else {
            throw parse_error(section.line, section.col, "unknown domain section '" + head + "'");
        }
    }
    if (!saw_name)
        throw Error(ErrorKind::parse, "domain has no (domain NAME) declaration");

    // Each declared type becomes a static unary predicate.
    for (auto& type : dom.types) {
        if (dom.predicate_index.count(type.name)) {
            type.pred = dom.predicate_index[type.name];
            if (dom.predicates[type.pred].arity != 1)
                throw Error(ErrorKind::validation, "type '" + type.name + "' clashes with a non-unary predicate");
        } else {
            Predicate pred;
            pred.name = type.name;
            pred.arity = 1;
            type.pred = static_cast<int>(dom.predicates.size());
            detail::add_predicate(dom, std::move(pred));
        }
    }

    for (size_t i = 1; i < root.items.size(); ++i) {
        const SExpr& section = root.items[i];
        if (section.head() != ":action")
            continue;
        ActionSchema schema;
        schema.name = section.at(1).atom;
        std::vector<detail::TypedEntry> typed_params;
        size_t j = 2;
        while (j + 1 < section.items.size()) {
            const std::string& key = section.items[j].atom;
            const SExpr& value = section.items[j + 1];
            if (key == ":parameters") {
                if (!value.is_list)
                    throw parse_error(value.line, value.col, "expected a parameter list");
                typed_params = detail::read_typed_list(value.items, 0);
                for (const auto& p : typed_params) {
                    if (p.name.empty() || p.name[0] != '?')
                        throw parse_error(p.line, p.col, "parameter names must start with '?'");
                    if (std::find(schema.params.begin(), schema.params.end(), p.name) != schema.params.end())
                        throw Error(ErrorKind::validation,
                                    "duplicate parameter '" + p.name + "' in action '" + schema.name + "'");
                    schema.params.push_back(p.name);
                }
            } else if (key == ":precondition") {
                detail::read_literal_conjunction(dom, schema, value, /*allow_negative=*/true, schema.pre_pos,
                                                 schema.pre_neg);
            } else if (key == ":effect") {
                detail::read_literal_conjunction(dom, schema, value, /*allow_negative=*/true, schema.add_effects,
                                                 schema.del_effects);
            } else {
                throw parse_error(section.items[j].line, section.items[j].col,
                                  "unknown action section '" + key + "'");
            }
            j += 2;
        }
        // Typed parameters compile to positive type-predicate preconditions.
        for (size_t p = 0; p < typed_params.size(); ++p) {
            std::string type = typed_params[p].type;
            while (!type.empty()) {
                auto it = dom.type_index.find(type);
                if (it == dom.type_index.end())
                    throw Error(ErrorKind::validation, "unknown type '" + type + "' in action '" + schema.name + "'");
                SchemaAtom atom;
                atom.pred = dom.types[it->second].pred;
                Term term;
                term.var = static_cast<int>(p);
                atom.args.push_back(term);
                schema.pre_pos.insert(schema.pre_pos.begin() + static_cast<long>(p), atom);
                int parent = dom.types[it->second].parent;
                type = parent >= 0 ? dom.types[parent].name : std::string();
            }
        }
        dom.schemas.push_back(std::move(schema));
    }

    detail::mint_goal_predicates(dom);

    // No goal predicate may appear in any effect; goal atoms are static.
    for (const auto& schema : dom.schemas) {
        for (const auto* effects : {&schema.add_effects, &schema.del_effects}) {
            for (const auto& atom : *effects) {
                if (dom.predicates[atom.pred].is_goal_pred() || dom.predicates[atom.pred].is_marking_variant())
                    throw Error(ErrorKind::validation, "goal predicate '" + dom.predicates[atom.pred].name +
                                                           "' appears in an effect of action '" + schema.name + "'");
            }
        }
    }
    return dom;
}

inline InstanceModel parse_instance(std::string_view text, const DomainModel& dom) {
    SExpr root = parse_single_sexpr(text);
    if (root.head() != "define")
        throw parse_error(root.line, root.col, "expected (define (problem ...) ...)");
    InstanceModel inst;

    auto add_object = [&](const std::string& name) {
        if (inst.object_index.count(name))
            throw Error(ErrorKind::validation, "duplicate object '" + name + "'");
        inst.object_index[name] = static_cast<int>(inst.objects.size());
        inst.objects.push_back(name);
    };
    auto add_type_atoms = [&](int object, std::string type) {
        while (!type.empty()) {
            auto it = dom.type_index.find(type);
            if (it == dom.type_index.end())
                throw Error(ErrorKind::validation, "unknown type '" + type + "'");
            inst.init.push_back({dom.types[it->second].pred, {object}});
            int parent = dom.types[it->second].parent;
            type = parent >= 0 ? dom.types[parent].name : std::string();
        }
    };

    for (size_t c = 0; c < dom.constants.size(); ++c)
        add_object(dom.constants[c]);

    auto read_ground_atom = [&](const SExpr& node) {
        if (!node.is_list || node.items.empty() || node.items[0].is_list)
            throw parse_error(node.line, node.col, "expected a ground atom");
        if (node.items[0].atom == "=")
            throw Error(ErrorKind::unsupported, "unsupported PDDL feature: :equality");
        GroundAtomModel atom;
        atom.pred = detail::require_declared_pred(dom, node, node.items.size() - 1);
        for (size_t i = 1; i < node.items.size(); ++i) {
            const std::string& obj = node.items[i].atom;
            int id = inst.object_id(obj);
            if (id < 0)
                throw Error(ErrorKind::validation, "unknown object '" + obj + "' at " + std::to_string(node.line) +
                                                       ":" + std::to_string(node.col));
            atom.args.push_back(id);
        }
        return atom;
    };

    for (size_t i = 1; i < root.items.size(); ++i) {
        const SExpr& section = root.items[i];
        std::string head = section.head();
        if (head == "problem") {
            inst.name = section.at(1).atom;
        } else if (head == ":domain") {
            inst.domain_name = section.at(1).atom;
            if (inst.domain_name != dom.name)
                throw Error(ErrorKind::validation, "instance names domain '" + inst.domain_name +
                                                       "' but domain model is '" + dom.name + "'");
        } else if (head == ":objects") {
            auto entries = detail::read_typed_list(section.items, 1);
            for (const auto& e : entries) {
                add_object(e.name);
                if (!e.type.empty())
                    add_type_atoms(inst.object_id(e.name), e.type);
            }
        } else if (head == ":init") {
            for (size_t j = 1; j < section.items.size(); ++j)
                inst.init.push_back(read_ground_atom(section.items[j]));
        } else if (head == ":goal") {
            const SExpr& goal = section.at(1);
            if (goal.head() == "and") {
                for (size_t j = 1; j < goal.items.size(); ++j)
                    inst.goal.push_back(read_ground_atom(goal.items[j]));
            } else if (goal.is_list && !goal.items.empty()) {
                if (goal.head() == "not")
                    throw Error(ErrorKind::unsupported, "negative goals are not supported");
                inst.goal.push_back(read_ground_atom(goal));
            } else if (goal.is_list && goal.items.empty()) {
                // empty conjunction: every state is a goal state
            } else {
                throw parse_error(goal.line, goal.col, "expected a goal conjunction");
            }
        } else if (head == ":metric" || head == ":length") {
            throw Error(ErrorKind::unsupported, "unsupported PDDL feature: " + head);
        } else {
            throw parse_error(section.line, section.col, "unknown problem section '" + head + "'");
        }
    }

    for (size_t c = 0; c < dom.constants.size(); ++c) {
        if (!dom.constant_types[c].empty())
            add_type_atoms(static_cast<int>(c), dom.constant_types[c]);
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Pretty printing (round-trips through the parser to equal models)
// ---------------------------------------------------------------------------

namespace detail {

inline void print_schema_atom(std::ostream& os, const DomainModel& dom, const ActionSchema& schema,
                              const SchemaAtom& atom) {
    os << "(" << dom.predicates[atom.pred].name;
    for (const Term& t : atom.args)
        os << " " << (t.is_var() ? schema.params[static_cast<size_t>(t.var)] : t.constant);
    os << ")";
}

} // namespace detail

inline std::string print_domain(const DomainModel& dom) {
    std::ostringstream os;
    os << "(define (domain " << dom.name << ")\n";
    os << "  (:requirements :strips :negative-preconditions)\n";
    if (!dom.constants.empty()) {
        os << "  (:constants";
        for (const auto& c : dom.constants)
            os << " " << c;
        os << ")\n";
    }
    os << "  (:predicates";
    for (const auto& pred : dom.predicates) {
        if (pred.synthetic)
            continue;
        os << "\n    (" << pred.name;
        for (int a = 0; a < pred.arity; ++a)
            os << " ?x" << a;
        os << ")";
    }
    os << ")\n";
    for (const auto& schema : dom.schemas) {
        os << "  (:action " << schema.name << "\n    :parameters (";
        for (size_t p = 0; p < schema.params.size(); ++p)
            os << (p ? " " : "") << schema.params[p];
        os << ")\n    :precondition (and";
        for (const auto& atom : schema.pre_pos) {
            os << " ";
            detail::print_schema_atom(os, dom, schema, atom);
        }
        for (const auto& atom : schema.pre_neg) {
            os << " (not ";
            detail::print_schema_atom(os, dom, schema, atom);
            os << ")";
        }
        os << ")\n    :effect (and";
        for (const auto& atom : schema.add_effects) {
            os << " ";
            detail::print_schema_atom(os, dom, schema, atom);
        }
        for (const auto& atom : schema.del_effects) {
            os << " (not ";
            detail::print_schema_atom(os, dom, schema, atom);
            os << ")";
        }
        os << "))\n";
    }
    os << ")\n";
    return os.str();
}

inline std::string print_instance(const InstanceModel& inst, const DomainModel& dom) {
    std::ostringstream os;
    os << "(define (problem " << inst.name << ")\n  (:domain " << dom.name << ")\n  (:objects";
    for (size_t o = dom.constants.size(); o < inst.objects.size(); ++o)
        os << " " << inst.objects[o];
    os << ")\n  (:init";
    for (const auto& atom : inst.init) {
        os << " (" << dom.predicates[atom.pred].name;
        for (int arg : atom.args)
            os << " " << inst.objects[static_cast<size_t>(arg)];
        os << ")";
    }
    os << ")\n  (:goal (and";
    for (const auto& atom : inst.goal) {
        os << " (" << dom.predicates[atom.pred].name;
        for (int arg : atom.args)
            os << " " << inst.objects[static_cast<size_t>(arg)];
        os << ")";
    }
    os << ")))\n";
    return os.str();
}

} // namespace planiso

#endif // PLANISO_PDDL_HPP_
