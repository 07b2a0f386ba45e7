#ifndef PLANISO_CONFLICTS_HPP_
#define PLANISO_CONFLICTS_HPP_

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "abstraction.hpp"
#include "ground.hpp"
#include "object_graph.hpp"
#include "state_space.hpp"
#include "util.hpp"
#include "wl.hpp"

namespace planiso {

struct AnalysisConfig {
    Algorithm algorithm = Algorithm::wl1;
    Aggregation aggregation = Aggregation::multiset;
    Encoding encoding = Encoding::plain;

    // Table-header labels: "1-WL", "2-FWL", "1-WL + G", "2-FWL + G".
    std::string label() const {
        std::string s = algorithm == Algorithm::wl1 ? "1-WL" : "2-FWL";
        if (encoding == Encoding::goal_marking)
            s += " + G";
        return s;
    }
    std::string full_label() const { return label() + " (" + aggregation_name(aggregation) + ")"; }
};

// Column order of the conflict table: multiset block then set block, each
// {1-WL, 2-FWL, 1-WL + G, 2-FWL + G}.
inline std::vector<AnalysisConfig> all_configs() {
    std::vector<AnalysisConfig> ordered;
    for (Aggregation agg : {Aggregation::multiset, Aggregation::set}) {
        ordered.push_back({Algorithm::wl1, agg, Encoding::plain});
        ordered.push_back({Algorithm::fwl2, agg, Encoding::plain});
        ordered.push_back({Algorithm::wl1, agg, Encoding::goal_marking});
        ordered.push_back({Algorithm::fwl2, agg, Encoding::goal_marking});
    }
    return ordered;
}

struct ConflictWitness {
    uint32_t class_a = 0, class_b = 0;
    Digest128 histogram;
    uint32_t vstar_a = kInfiniteCost, vstar_b = kInfiniteCost;

    bool is_v_conflict() const { return vstar_a != vstar_b; }
};

struct ConflictReport {
    AnalysisConfig config;
    uint64_t bucket_count = 0; // histogram values shared by ≥ 2 classes
    uint64_t e_pairs = 0;
    uint64_t v_pairs = 0;
    std::vector<ConflictWitness> witnesses;       // lowest class-id pairs first
    std::vector<uint32_t> skipped_classes;        // classes refused by the 2-FWL cap
};

struct ConflictOptions {
    size_t fwl2_max_vertices = kDefaultFwl2MaxVertices;
    size_t max_witnesses = 10;
};

struct HistogramPartition {
    std::vector<int> group;                  // per class id; -1 = skipped by the 2-FWL cap
    std::vector<std::vector<uint32_t>> members; // per group, ascending class ids
    std::vector<Digest128> digests;          // per group, fixpoint histogram digest
    std::vector<uint32_t> skipped;

    bool distinguished(uint32_t a, uint32_t b) const { return group[a] != group[b]; }
};

// Partitions the pooled classes by fixpoint histogram under one config.
// Histograms are computed on class representatives only (they are
// isomorphism-invariant). Classes are pre-bucketed by round-0 histogram: the
// fixpoint coloring refines the initial one, so classes in different buckets
// can never share a fixpoint histogram and each bucket gets its own wl run.
inline HistogramPartition histogram_partition(const PooledModel& pm, const std::vector<const GroundTask*>& tasks,
                                              const std::vector<const TransitionSystem*>& systems,
                                              const ColorLegend& legend, const AnalysisConfig& config,
                                              const ConflictOptions& options = {}) {
    HistogramPartition hp;
    hp.group.assign(pm.classes.size(), -1);

    std::vector<ObjectGraph> graphs(pm.classes.size());
    std::vector<uint32_t> usable;
    for (const auto& cls : pm.classes) {
        const State& rep = systems[cls.instance]->states[cls.representative];
        ObjectGraph g = build_object_graph(rep, *tasks[cls.instance], config.encoding, legend);
        if (config.algorithm == Algorithm::fwl2 && g.num_vertices() > options.fwl2_max_vertices) {
            hp.skipped.push_back(cls.id);
            continue;
        }
        graphs[cls.id] = std::move(g);
        usable.push_back(cls.id);
    }

    std::map<std::vector<std::pair<uint32_t, uint64_t>>, std::vector<uint32_t>> buckets;
    for (uint32_t id : usable)
        buckets[make_histogram(graphs[id].colors).counts].push_back(id);

    for (const auto& [round0, members] : buckets) {
        std::vector<const ObjectGraph*> ptrs;
        ptrs.reserve(members.size());
        for (uint32_t id : members)
            ptrs.push_back(&graphs[id]);
        auto hists = members.size() < 2
                         ? std::vector<ColorHistogram>(1)
                         : wl_histograms(ptrs, config.algorithm, config.aggregation, options.fwl2_max_vertices);
        std::map<ColorHistogram, std::vector<uint32_t>> groups;
        for (size_t i = 0; i < members.size(); ++i)
            groups[hists[i]].push_back(members[i]);
        for (const auto& [hist, ids] : groups) {
            int gid = static_cast<int>(hp.members.size());
            for (uint32_t id : ids)
                hp.group[id] = gid;
            hp.members.push_back(ids);
            hp.digests.push_back(hist.digest());
        }
    }
    return hp;
}

// Detects E-/V-conflicts over the pooled classes for one config.
inline ConflictReport find_conflicts(const PooledModel& pm, const std::vector<const GroundTask*>& tasks,
                                     const std::vector<const TransitionSystem*>& systems, const ColorLegend& legend,
                                     const AnalysisConfig& config, const ConflictOptions& options = {}) {
    ConflictReport report;
    report.config = config;
    HistogramPartition hp = histogram_partition(pm, tasks, systems, legend, config, options);
    report.skipped_classes = hp.skipped;

    std::vector<ConflictWitness> all_witnesses;
    for (size_t gid = 0; gid < hp.members.size(); ++gid) {
        const auto& ids = hp.members[gid];
        {
            size_t m = ids.size();
            if (m < 2)
                continue;
            ++report.bucket_count;
            report.e_pairs += m * (m - 1) / 2;
            Digest128 hd = hp.digests[gid];
            for (size_t i = 0; i < m; ++i) {
                for (size_t j = i + 1; j < m; ++j) {
                    ConflictWitness w;
                    w.class_a = std::min(ids[i], ids[j]);
                    w.class_b = std::max(ids[i], ids[j]);
                    w.histogram = hd;
                    w.vstar_a = pm.classes[w.class_a].vstar;
                    w.vstar_b = pm.classes[w.class_b].vstar;
                    if (w.is_v_conflict())
                        ++report.v_pairs;
                    all_witnesses.push_back(w);
                }
            }
        }
    }
    std::sort(all_witnesses.begin(), all_witnesses.end(), [](const ConflictWitness& a, const ConflictWitness& b) {
        return std::make_pair(a.class_a, a.class_b) < std::make_pair(b.class_a, b.class_b);
    });
    if (all_witnesses.size() > options.max_witnesses)
        all_witnesses.resize(options.max_witnesses);
    report.witnesses = std::move(all_witnesses);
    return report;
}

struct DomainAnalysis {
    std::string domain;
    size_t instances = 0;
    uint64_t states = 0;
    size_t classes = 0;
    std::vector<ConflictReport> reports; // one per config, table column order
    std::vector<std::string> notices;    // excluded instances, skipped classes

    std::vector<TransitionSystem> systems;
    PooledModel pooled;
};

// Expands every task, computes V*, quotients, pools classes across the
// instances and runs conflict detection per config. Tasks that fail to expand
// are excluded with a notice, never silently dropped.
inline DomainAnalysis analyze_domain(const std::vector<const GroundTask*>& tasks,
                                     const std::vector<AnalysisConfig>& configs, size_t state_cap = kDefaultStateCap,
                                     const ConflictOptions& options = {}, unsigned jobs = 1) {
    DomainAnalysis da;
    if (tasks.empty())
        return da;
    da.domain = tasks.front()->domain.name;
    ColorLegend legend = ColorLegend::from_domain(tasks.front()->domain);

    std::vector<const GroundTask*> expanded_tasks;
    std::vector<AbstractModel> models;
    for (const GroundTask* task : tasks) {
        try {
            TransitionSystem ts = expand(*task, state_cap);
            compute_vstar(ts);
            AbstractModel am = quotient(ts, *task, legend, jobs);
            da.states += ts.states.size();
            da.systems.push_back(std::move(ts));
            models.push_back(std::move(am));
            expanded_tasks.push_back(task);
            ++da.instances;
        } catch (const Error& e) {
            da.notices.push_back("instance '" + task->instance_name + "' excluded: " + e.what());
        }
    }
    da.pooled = pool_classes(models);
    da.classes = da.pooled.classes.size();

    std::vector<const TransitionSystem*> system_ptrs;
    for (const auto& ts : da.systems)
        system_ptrs.push_back(&ts);
    for (const auto& config : configs) {
        ConflictReport report = find_conflicts(da.pooled, expanded_tasks, system_ptrs, legend, config, options);
        for (uint32_t id : report.skipped_classes)
            da.notices.push_back("config " + report.config.full_label() + ": class " + std::to_string(id) +
                                 " skipped (2-FWL vertex cap)");
        da.reports.push_back(std::move(report));
    }
    return da;
}

inline void write_conflicts_csv(std::ostream& os, const std::vector<DomainAnalysis>& analyses) {
    os << "domain,instances,states,classes";
    if (!analyses.empty()) {
        for (const auto& report : analyses.front().reports) {
            std::string label = report.config.full_label();
            os << ",E[" << label << "],V[" << label << "]";
        }
    }
    os << "\n";
    for (const auto& da : analyses) {
        os << da.domain << "," << da.instances << "," << da.states << "," << da.classes;
        for (const auto& report : da.reports)
            os << "," << report.e_pairs << "," << report.v_pairs;
        os << "\n";
    }
}

inline nlohmann::json conflicts_json(const DomainAnalysis& da) {
    nlohmann::json j;
    j["domain"] = da.domain;
    j["instances"] = da.instances;
    j["states"] = da.states;
    j["classes"] = da.classes;
    j["notices"] = da.notices;
    // In the set variant only the neighbor aggregate is set-ified; the
    // histogram itself stays a multiset of colors.
    j["set_variant_histograms"] = "multiset";
    j["configs"] = nlohmann::json::array();
    for (const auto& report : da.reports) {
        nlohmann::json jc;
        jc["label"] = report.config.label();
        jc["aggregation"] = aggregation_name(report.config.aggregation);
        jc["algorithm"] = algorithm_name(report.config.algorithm);
        jc["encoding"] = encoding_name(report.config.encoding);
        jc["buckets"] = report.bucket_count;
        jc["e_pairs"] = report.e_pairs;
        jc["v_pairs"] = report.v_pairs;
        jc["skipped_classes"] = report.skipped_classes;
        jc["witnesses"] = nlohmann::json::array();
        for (const auto& w : report.witnesses) {
            jc["witnesses"].push_back({{"class_a", w.class_a},
                                       {"class_b", w.class_b},
                                       {"histogram", w.histogram.hex()},
                                       {"vstar_a", cost_to_string(w.vstar_a)},
                                       {"vstar_b", cost_to_string(w.vstar_b)},
                                       {"v_conflict", w.is_v_conflict()}});
        }
        j["configs"].push_back(std::move(jc));
    }
    return j;
}

} // namespace planiso

#endif // PLANISO_CONFLICTS_HPP_
