#include <catch2/catch_amalgamated.hpp>

#include <planiso/planiso.hpp>

#include "helpers.hpp"

using namespace planiso;

namespace {

// Counts implied by the construction: one vertex per object plus one per
// atom-argument position (zero-arity atoms get exactly one), and 2k-1 edges
// per atom of arity k >= 1 (k argument edges plus k-1 chain edges).
void check_counts(const ObjectGraph& g, const RelationalStructure& rs) {
    size_t vertices = rs.num_objects, edges = 0;
    for (const auto& [pred, args] : rs.atoms) {
        size_t k = args.size();
        vertices += std::max<size_t>(k, 1);
        if (k >= 1)
            edges += 2 * k - 1;
    }
    CHECK(g.num_vertices() == vertices);
    CHECK(g.edges.size() == edges);
}

} // namespace

TEST_CASE("the held-ball gripper state encodes to 15 vertices and 12 edges") {
    // Objects: two rooms, two grippers, one ball. The robot is in the second
    // room holding the ball in the right gripper; the goal wants the ball at
    // the second room. Eight atoms over room/ball/gripper/at-robot/carry/at_g.
    ColorLegend legend = ColorLegend::from_arities({1, 1, 1, 1, 2, 2});
    RelationalStructure rs;
    rs.num_objects = 5; // 0 rooma, 1 roomb, 2 left, 3 right, 4 ball
    rs.atoms = {{0, {0}}, {0, {1}}, {1, {4}}, {2, {2}}, {2, {3}}, {3, {1}}, {4, {4, 3}}, {5, {4, 1}}};
    ObjectGraph g = build_object_graph(rs, legend);
    CHECK(g.num_vertices() == 15);
    CHECK(g.edges.size() == 12);
    check_counts(g, rs);

    // All object vertices wear the bottom color; position vertices don't.
    for (size_t v = 0; v < rs.num_objects; ++v)
        CHECK(g.colors[v] == ColorLegend::kObjectColor);
    for (size_t v = rs.num_objects; v < g.num_vertices(); ++v)
        CHECK(g.colors[v] != ColorLegend::kObjectColor);

    // A binary atom contributes a chain: arg1 vertex adjacent to both the
    // first object and the arg2 vertex.
    uint32_t carry1 = legend.color(4, 1), carry2 = legend.color(4, 2);
    bool found_chain = false;
    for (uint32_t v = 0; v < g.num_vertices(); ++v) {
        if (g.colors[v] != carry1)
            continue;
        bool to_object = false, to_second = false;
        for (uint32_t w : g.adj[v]) {
            to_object = to_object || w == 4; // the ball
            to_second = to_second || g.colors[w] == carry2;
        }
        found_chain = to_object && to_second;
    }
    CHECK(found_chain);
}

TEST_CASE("vertex and edge counts follow the arity formulas on real states") {
    for (const char* rel : {"gripper", "blocks3ops", "ferry", "logistics"}) {
        GroundTask task = testutil::load_task(std::string(rel) + "/domain.pddl", std::string(rel) + "/p01.pddl");
        ColorLegend legend = ColorLegend::from_domain(task.domain);
        TransitionSystem ts = expand(task);
        for (size_t i = 0; i < std::min<size_t>(ts.states.size(), 10); ++i) {
            for (Encoding enc : {Encoding::plain, Encoding::goal_marking}) {
                RelationalStructure rs = relational_structure(ts.states[i], task, enc);
                check_counts(build_object_graph(rs, legend, &task.objects), rs);
            }
        }
    }
}

TEST_CASE("objects mentioned in no atom stay as isolated bottom vertices") {
    ColorLegend legend = ColorLegend::from_arities({1});
    RelationalStructure rs;
    rs.num_objects = 3;
    ObjectGraph g = build_object_graph(rs, legend);
    CHECK(g.num_vertices() == 3);
    CHECK(g.edges.empty());
    for (uint32_t v = 0; v < 3; ++v) {
        CHECK(g.colors[v] == ColorLegend::kObjectColor);
        CHECK(g.adj[v].empty());
    }
}

TEST_CASE("zero-arity atoms become a single isolated position vertex") {
    GroundTask task = testutil::load_task("ferry/domain.pddl", "ferry/p01.pddl");
    int empty_ferry = task.domain.pred_id("empty-ferry");
    REQUIRE(empty_ferry >= 0);
    REQUIRE(task.domain.predicates[static_cast<size_t>(empty_ferry)].arity == 0);
    ColorLegend legend = ColorLegend::from_domain(task.domain);
    ObjectGraph g = build_object_graph(task.initial_state, task, Encoding::plain, legend);
    uint32_t color = legend.color(empty_ferry, 1);
    size_t found = 0;
    for (uint32_t v = 0; v < g.num_vertices(); ++v) {
        if (g.colors[v] != color)
            continue;
        ++found;
        CHECK(g.adj[v].empty());
    }
    CHECK(found == 1);
}

TEST_CASE("goal marking rewrites goal atoms by base-atom truth") {
    GroundTask task = testutil::load_task("gripper/domain.pddl", "gripper/p01.pddl");
    int at = task.domain.pred_id("at");
    const Predicate& at_pred = task.domain.predicates[static_cast<size_t>(at)];
    const Predicate& at_g = task.domain.predicates[static_cast<size_t>(at_pred.goal_pred)];

    TransitionSystem ts = expand(task);
    auto marking_of = [&](const State& s) {
        RelationalStructure rs = relational_structure(s, task, Encoding::goal_marking);
        std::vector<int> seen;
        for (const auto& [pred, args] : rs.atoms) {
            CHECK_FALSE(task.domain.predicates[static_cast<size_t>(pred)].is_goal_pred());
            if (pred == at_g.marked_true || pred == at_g.marked_false)
                seen.push_back(pred);
        }
        REQUIRE(seen.size() == 1); // exactly one goal atom in this instance
        return seen[0];
    };

    CHECK(marking_of(ts.states[ts.initial]) == at_g.marked_false); // ball still in room A
    compute_vstar(ts);
    bool checked_goal = false;
    for (size_t i = 0; i < ts.states.size(); ++i) {
        if (!ts.goal_flags[i])
            continue;
        CHECK(marking_of(ts.states[i]) == at_g.marked_true);
        checked_goal = true;
    }
    CHECK(checked_goal);

    // The plain encoding leaves the minted predicate untouched.
    RelationalStructure plain = relational_structure(ts.states[ts.initial], task, Encoding::plain);
    bool saw_goal_pred = false;
    for (const auto& [pred, args] : plain.atoms)
        saw_goal_pred = saw_goal_pred || pred == at_pred.goal_pred;
    CHECK(saw_goal_pred);
}

TEST_CASE("structure isomorphism coincides with object-graph isomorphism") {
    testutil::Rng rng(20240817);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = testutil::random_structure(rng);
        ColorLegend legend = ColorLegend::from_arities(a.arities);
        planiso::RelationalStructure b;
        if (trial % 2 == 0) {
            b = testutil::permute_structure(a.rs, testutil::random_permutation(rng, a.rs.num_objects));
        } else {
            b = testutil::perturb_structure(a, rng);
        }
        bool structures = brute_force_isomorphic(a.rs, b);
        bool graphs = graphs_isomorphic(build_object_graph(a.rs, legend), build_object_graph(b, legend));
        CAPTURE(trial, a.rs.num_objects, a.rs.atoms.size(), b.atoms.size());
        CHECK(structures == graphs);
    }
}

TEST_CASE("isomorphic states share round-0 color histograms") {
    GroundTask task = testutil::load_task("gripper/domain.pddl", "gripper/p01.pddl");
    ColorLegend legend = ColorLegend::from_domain(task.domain);
    TransitionSystem ts = expand(task);
    // Picking with the left or the right gripper yields symmetric states.
    State left = ts.states[ts.initial], right = left;
    for (const auto& a : task.actions) {
        if (a.name == "pick(ball1,rooma,left)")
            left.apply(a.del, a.add);
        if (a.name == "pick(ball1,rooma,right)")
            right.apply(a.del, a.add);
    }
    ObjectGraph gl = build_object_graph(left, task, Encoding::plain, legend);
    ObjectGraph gr = build_object_graph(right, task, Encoding::plain, legend);
    CHECK(make_histogram(gl.colors) == make_histogram(gr.colors));
    CHECK(graphs_isomorphic(gl, gr));
}

TEST_CASE("the goal-marking encoding refines the plain one") {
    // Each marked color determines the plain color (marked_true/false both map
    // back to the minted goal predicate), so goal marking can only split
    // classes, never merge them. Verified pointwise on expanded states.
    GroundTask task = testutil::load_task("ferry/domain.pddl", "ferry/p01.pddl");
    ColorLegend legend = ColorLegend::from_domain(task.domain);
    TransitionSystem ts = expand(task);
    for (size_t i = 0; i < ts.states.size(); ++i) {
        RelationalStructure plain = relational_structure(ts.states[i], task, Encoding::plain);
        RelationalStructure marked = relational_structure(ts.states[i], task, Encoding::goal_marking);
        REQUIRE(plain.atoms.size() == marked.atoms.size());
        for (size_t a = 0; a < plain.atoms.size(); ++a) {
            const Predicate& mp = task.domain.predicates[static_cast<size_t>(marked.atoms[a].first)];
            int back = mp.is_marking_variant() ? mp.marked_base : marked.atoms[a].first;
            CHECK(back == plain.atoms[a].first);
            CHECK(marked.atoms[a].second == plain.atoms[a].second);
        }
    }
}

TEST_CASE("graph dumps carry the header, rows and legend") {
    ColorLegend legend = ColorLegend::from_arities({1, 2});
    RelationalStructure rs;
    rs.num_objects = 2;
    rs.atoms = {{0, {0}}, {1, {0, 1}}};
    ObjectGraph g = build_object_graph(rs, legend);
    std::ostringstream os;
    write_object_graph(os, g, legend);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "p vcg 5 4 4");
    size_t n_lines = 0, e_lines = 0, c_lines = 0;
    while (std::getline(is, line)) {
        if (line.rfind("n ", 0) == 0)
            ++n_lines;
        else if (line.rfind("e ", 0) == 0)
            ++e_lines;
        else if (line.rfind("c ", 0) == 0)
            ++c_lines;
        else
            CHECK(line == "legend");
    }
    CHECK(n_lines == g.num_vertices());
    CHECK(e_lines == g.edges.size());
    CHECK(c_lines == legend.num_colors());
    CHECK(os.str().find("c 0 bot") != std::string::npos);
}

TEST_CASE("the color legend rejects unknown keys and stays stable") {
    ColorLegend legend = ColorLegend::from_arities({2});
    CHECK(legend.color(0, 1) == 1);
    CHECK(legend.color(0, 2) == 2);
    CHECK(legend.num_colors() == 3);
    CHECK_THROWS_AS(legend.color(1, 1), Error);
    CHECK_THROWS_AS(legend.color(0, 3), Error);
}
