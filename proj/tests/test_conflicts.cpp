#include <catch2/catch_amalgamated.hpp>

#include <planiso/planiso.hpp>

#include "helpers.hpp"

using namespace planiso;

namespace {

DomainAnalysis analyze(const std::string& dom, const std::vector<std::string>& instances,
                       std::vector<AnalysisConfig> configs = all_configs(), ConflictOptions options = {}) {
    static std::vector<GroundTask> keep_alive; // pointers must outlive the analysis
    std::vector<const GroundTask*> ptrs;
    size_t base = keep_alive.size();
    for (const auto& inst : instances)
        keep_alive.push_back(testutil::load_task(dom + "/domain.pddl", dom + "/" + inst + ".pddl"));
    for (size_t i = base; i < keep_alive.size(); ++i)
        ptrs.push_back(&keep_alive[i]);
    return analyze_domain(ptrs, configs, kDefaultStateCap, options);
}

std::vector<std::pair<uint64_t, uint64_t>> ev(const DomainAnalysis& da) {
    std::vector<std::pair<uint64_t, uint64_t>> out;
    for (const auto& r : da.reports)
        out.emplace_back(r.e_pairs, r.v_pairs);
    return out;
}

// V-conflict witnesses as sorted (min V*, max V*) string pairs.
std::vector<std::pair<std::string, std::string>> v_witnesses(const ConflictReport& r) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& w : r.witnesses) {
        if (!w.is_v_conflict())
            continue;
        std::string a = cost_to_string(w.vstar_a), b = cost_to_string(w.vstar_b);
        out.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("the analysis config table matches the column layout") {
    auto configs = all_configs();
    REQUIRE(configs.size() == 8);
    std::vector<std::string> labels;
    for (const auto& c : configs)
        labels.push_back(c.full_label());
    CHECK(labels == std::vector<std::string>{
                        "1-WL (multiset)", "2-FWL (multiset)", "1-WL + G (multiset)", "2-FWL + G (multiset)",
                        "1-WL (set)", "2-FWL (set)", "1-WL + G (set)", "2-FWL + G (set)"});
}

TEST_CASE("gripper shows no conflicts in any configuration") {
    DomainAnalysis da = analyze("gripper", {"p01", "p02", "p03", "p04", "p05"});
    CHECK(da.instances == 5);
    CHECK(da.states == 1084);
    CHECK(da.classes == 90);
    for (const auto& r : da.reports) {
        CAPTURE(r.config.full_label());
        CHECK(r.e_pairs == 0);
        CHECK(r.v_pairs == 0);
        CHECK(r.bucket_count == 0);
        CHECK(r.witnesses.empty());
    }
    CHECK(da.notices.empty());
}

TEST_CASE("the blocksworld pair defeats plain 1-WL and survives goal marking as an E-conflict") {
    DomainAnalysis da = analyze("blocks3ops", {"p01"});
    CHECK(da.states == 73);
    CHECK(da.classes == 39);
    CHECK(ev(da) == std::vector<std::pair<uint64_t, uint64_t>>{
                        {2, 1}, {0, 0}, {1, 0}, {0, 0}, {2, 1}, {0, 0}, {1, 0}, {0, 0}});
    // The plain 1-WL V-conflict confuses a goal state with a V* = 3 state.
    const ConflictReport& plain = da.reports[0];
    CHECK(v_witnesses(plain) == std::vector<std::pair<std::string, std::string>>{{"0", "3"}});
    // Goal marking removes the V-conflict but an E-conflict remains.
    const ConflictReport& marked = da.reports[2];
    CHECK(marked.e_pairs == 1);
    CHECK(v_witnesses(marked).empty());
}

TEST_CASE("the ferry swap pair is a plain 1-WL V-conflict only") {
    DomainAnalysis da = analyze("ferry", {"p01"});
    CHECK(da.states == 45);
    CHECK(da.classes == 24);
    CHECK(ev(da) == std::vector<std::pair<uint64_t, uint64_t>>{
                        {1, 1}, {0, 0}, {0, 0}, {0, 0}, {1, 1}, {0, 0}, {0, 0}, {0, 0}});
    const ConflictReport& plain = da.reports[0];
    REQUIRE(plain.witnesses.size() == 1);
    CHECK(plain.witnesses[0].class_a == 0);
    CHECK(plain.witnesses[0].class_b == 19);
    CHECK(v_witnesses(plain) == std::vector<std::pair<std::string, std::string>>{{"0", "7"}});
}

TEST_CASE("logistics package swaps give three plain 1-WL V-conflicts") {
    DomainAnalysis da = analyze("logistics", {"p01"});
    CHECK(da.states == 144);
    CHECK(da.classes == 47);
    CHECK(ev(da) == std::vector<std::pair<uint64_t, uint64_t>>{
                        {3, 3}, {0, 0}, {2, 2}, {0, 0}, {3, 3}, {0, 0}, {2, 2}, {0, 0}});
    CHECK(v_witnesses(da.reports[0]) == std::vector<std::pair<std::string, std::string>>{
                                            {"0", "6"}, {"2", "4"}, {"2", "8"}});
    CHECK(v_witnesses(da.reports[2]) == std::vector<std::pair<std::string, std::string>>{{"2", "4"}, {"2", "8"}});
}

TEST_CASE("grid misplaced keys defeat plain 1-WL under both aggregations") {
    std::vector<AnalysisConfig> wl1_configs;
    for (const auto& c : all_configs())
        if (c.algorithm == Algorithm::wl1)
            wl1_configs.push_back(c);
    DomainAnalysis da = analyze("grid", {"p01"}, wl1_configs);
    CHECK(da.states == 441);
    CHECK(da.classes == 107);
    CHECK(ev(da) == std::vector<std::pair<uint64_t, uint64_t>>{{2, 2}, {1, 1}, {2, 2}, {1, 1}});
    CHECK(v_witnesses(da.reports[0]) == std::vector<std::pair<std::string, std::string>>{
                                            {"0", "14"}, {"10", "12"}});
    CHECK(v_witnesses(da.reports[1]) == std::vector<std::pair<std::string, std::string>>{{"10", "12"}});
}

TEST_CASE("witness lists are truncated and sorted by class id") {
    ConflictOptions options;
    options.max_witnesses = 1;
    DomainAnalysis da = analyze("logistics", {"p01"}, all_configs(), options);
    CHECK(da.reports[0].e_pairs == 3); // counts are unaffected by truncation
    REQUIRE(da.reports[0].witnesses.size() == 1);
    options.max_witnesses = 10;
    DomainAnalysis full = analyze("logistics", {"p01"}, all_configs(), options);
    for (const auto& r : full.reports) {
        for (size_t i = 0; i + 1 < r.witnesses.size(); ++i) {
            auto a = std::make_pair(r.witnesses[i].class_a, r.witnesses[i].class_b);
            auto b = std::make_pair(r.witnesses[i + 1].class_a, r.witnesses[i + 1].class_b);
            CHECK(a < b);
        }
        for (const auto& w : r.witnesses)
            CHECK(w.class_a < w.class_b);
        CHECK(r.v_pairs <= r.e_pairs);
    }
}

TEST_CASE("classes above the 2-FWL vertex cap are skipped with a notice") {
    ConflictOptions options;
    options.fwl2_max_vertices = 8; // every representative graph is larger
    DomainAnalysis da = analyze("ferry", {"p01"}, all_configs(), options);
    bool saw_notice = false;
    for (const auto& n : da.notices)
        saw_notice = saw_notice || n.find("2-FWL vertex cap") != std::string::npos;
    CHECK(saw_notice);
    for (const auto& r : da.reports) {
        if (r.config.algorithm == Algorithm::fwl2) {
            CHECK(r.skipped_classes.size() == da.classes);
            CHECK(r.e_pairs == 0); // nothing left to compare
        } else {
            CHECK(r.skipped_classes.empty());
        }
    }
}

TEST_CASE("an empty task list produces an empty analysis") {
    DomainAnalysis da = analyze_domain({}, all_configs());
    CHECK(da.instances == 0);
    CHECK(da.states == 0);
    CHECK(da.classes == 0);
    CHECK(da.reports.empty());
}

TEST_CASE("instances that fail to expand are excluded with a notice") {
    GroundTask ok = testutil::load_task("gripper/domain.pddl", "gripper/p01.pddl");
    GroundTask too_big = testutil::load_task("gripper/domain.pddl", "gripper/p03.pddl");
    std::vector<const GroundTask*> ptrs{&ok, &too_big};
    DomainAnalysis da = analyze_domain(ptrs, all_configs(), /*state_cap=*/10);
    CHECK(da.instances == 1);
    REQUIRE(da.notices.size() == 1);
    CHECK(da.notices[0].find("excluded") != std::string::npos);
    CHECK(da.notices[0].find("state cap exceeded") != std::string::npos);
}

TEST_CASE("finer configurations distinguish at least as much") {
    // Partition-refinement form of the monotonicity guarantees: 2-FWL refines
    // 1-WL, multiset refines set, goal marking refines plain.
    for (const auto& [dom, instances] : std::vector<std::pair<std::string, std::vector<std::string>>>{
             {"ferry", {"p01", "p02"}}, {"blocks3ops", {"p01"}}, {"logistics", {"p01"}}}) {
        static std::vector<GroundTask> keep_alive;
        size_t base = keep_alive.size();
        for (const auto& inst : instances)
            keep_alive.push_back(testutil::load_task(dom + "/domain.pddl", dom + "/" + inst + ".pddl"));
        std::vector<const GroundTask*> ptrs;
        for (size_t i = base; i < keep_alive.size(); ++i)
            ptrs.push_back(&keep_alive[i]);
        DomainAnalysis da = analyze_domain(ptrs, {}, kDefaultStateCap);
        std::vector<const TransitionSystem*> systems;
        for (const auto& ts : da.systems)
            systems.push_back(&ts);
        ColorLegend legend = ColorLegend::from_domain(ptrs.front()->domain);

        std::map<std::string, HistogramPartition> parts;
        for (const auto& config : all_configs())
            parts.emplace(config.full_label(),
                          histogram_partition(da.pooled, ptrs, systems, legend, config));

        auto refines = [&](const std::string& fine, const std::string& coarse) {
            const auto& f = parts.at(fine);
            const auto& c = parts.at(coarse);
            for (const auto& group : f.members)
                for (size_t i = 1; i < group.size(); ++i) {
                    CAPTURE(dom, fine, coarse, group[0], group[i]);
                    CHECK(c.group[group[0]] == c.group[group[i]]);
                }
        };
        for (const char* agg : {"multiset", "set"}) {
            refines(std::string("2-FWL (") + agg + ")", std::string("1-WL (") + agg + ")");
            refines(std::string("2-FWL + G (") + agg + ")", std::string("1-WL + G (") + agg + ")");
            refines(std::string("1-WL + G (") + agg + ")", std::string("1-WL (") + agg + ")");
            refines(std::string("2-FWL + G (") + agg + ")", std::string("2-FWL (") + agg + ")");
        }
        for (const char* label : {"1-WL", "2-FWL", "1-WL + G", "2-FWL + G"}) {
            refines(std::string(label) + " (multiset)", std::string(label) + " (set)");
        }
    }
}

TEST_CASE("CSV and JSON reports carry the expected fields") {
    DomainAnalysis da = analyze("ferry", {"p01"});
    std::ostringstream csv;
    std::vector<DomainAnalysis> analyses;
    analyses.push_back(std::move(da));
    write_conflicts_csv(csv, analyses);
    std::istringstream is(csv.str());
    std::string header, row;
    REQUIRE(std::getline(is, header));
    REQUIRE(std::getline(is, row));
    CHECK(header.rfind("domain,instances,states,classes,", 0) == 0);
    CHECK(header.find("E[1-WL (multiset)]") != std::string::npos);
    CHECK(header.find("V[2-FWL + G (set)]") != std::string::npos);
    CHECK(row == "ferry,1,45,24,1,1,0,0,0,0,0,0,1,1,0,0,0,0,0,0");

    nlohmann::json j = conflicts_json(analyses.front());
    CHECK(j["domain"] == "ferry");
    CHECK(j["states"] == 45);
    CHECK(j["classes"] == 24);
    CHECK(j["set_variant_histograms"] == "multiset");
    REQUIRE(j["configs"].size() == 8);
    CHECK(j["configs"][0]["label"] == "1-WL");
    CHECK(j["configs"][0]["e_pairs"] == 1);
    REQUIRE(j["configs"][0]["witnesses"].size() == 1);
    CHECK(j["configs"][0]["witnesses"][0]["vstar_a"] == "7");
    CHECK(j["configs"][0]["witnesses"][0]["vstar_b"] == "0");
    CHECK(j["configs"][0]["witnesses"][0]["v_conflict"] == true);
}
