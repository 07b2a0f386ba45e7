// planiso — state-symmetry analysis for classical planning tasks.
//
// Subcommands:
//   expand     expand reachable state spaces and export transition systems
//   abstract   build isomorphism-quotient abstractions and reduced sets
//   conflicts  detect 1-WL / 2-FWL E- and V-conflicts over pooled classes
//   isocheck   decide isomorphism of two state dumps over one domain

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <planiso/planiso.hpp>

namespace {

using namespace planiso;

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::cap_exceeded:
        return 3;
    default:
        return 2;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunConfig {
    std::string domain_path;
    std::vector<std::string> instance_paths;
    size_t states_max = kDefaultStateCap;
    size_t fwl2_max_vertices = kDefaultFwl2MaxVertices;
    std::string encoding = "both";
    std::string agg = "both";
    std::string alg = "both";
    std::string out_dir;
    size_t witnesses = 10;
    std::string cache_path;
    bool fail_on_conflict = false;
    unsigned jobs = 1;
    std::string config_path;

    std::vector<AnalysisConfig> selected_configs() const {
        std::vector<AnalysisConfig> out;
        for (const AnalysisConfig& c : all_configs()) {
            if (alg != "both" && std::string(algorithm_name(c.algorithm)) != alg)
                continue;
            if (agg != "both" && std::string(aggregation_name(c.aggregation)) != agg)
                continue;
            if (encoding != "both" &&
                !(encoding == "plain" ? c.encoding == Encoding::plain : c.encoding == Encoding::goal_marking))
                continue;
            out.push_back(c);
        }
        if (out.empty())
            throw Error(ErrorKind::validation, "no analysis config selected");
        return out;
    }

    nlohmann::json provenance() const {
        nlohmann::json j;
        j["version"] = version();
        j["inputs"] = nlohmann::json::object();
        j["inputs"][domain_path] = digest_string(read_file(domain_path)).hex();
        for (const auto& p : instance_paths)
            j["inputs"][p] = digest_string(read_file(p)).hex();
        j["config"] = {{"states_max", states_max}, {"fwl2_max_vertices", fwl2_max_vertices},
                       {"encoding", encoding},     {"agg", agg},
                       {"alg", alg},               {"witnesses", witnesses},
                       {"jobs", jobs},             {"fail_on_conflict", fail_on_conflict}};
        return j;
    }
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--config", cfg.config_path, "config file with key=value lines (flags take precedence)");
    cmd->add_option("domain", cfg.domain_path, "domain PDDL file")->required();
    cmd->add_option("instances", cfg.instance_paths, "instance PDDL files")->required();
    cmd->add_option("--states-max", cfg.states_max, "expansion cap (states)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--fwl2-max-vertices", cfg.fwl2_max_vertices, "2-FWL per-graph vertex cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--encoding", cfg.encoding, "plain|goalmark|both")
        ->check(CLI::IsMember({"plain", "goalmark", "both"}))
        ->capture_default_str();
    cmd->add_option("--agg", cfg.agg, "multiset|set|both")
        ->check(CLI::IsMember({"multiset", "set", "both"}))
        ->capture_default_str();
    cmd->add_option("--alg", cfg.alg, "wl1|fwl2|both")
        ->check(CLI::IsMember({"wl1", "fwl2", "both"}))
        ->capture_default_str();
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--witnesses", cfg.witnesses, "max conflict witnesses per config")->capture_default_str();
    cmd->add_option("--cache", cfg.cache_path, "canonical form cache file");
    cmd->add_flag("--fail-on-conflict", cfg.fail_on_conflict, "exit 1 if any conflict is found");
    cmd->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

// Applies `key = value` lines from --config for every flag the command line
// left at its default. Sections and comments are tolerated; unknown keys are
// rejected so typos cannot pass silently.
void apply_config_file(const CLI::App* cmd, RunConfig& cfg) {
    if (cfg.config_path.empty())
        return;
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::istringstream in(read_file(cfg.config_path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[')
            continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::parse,
                        cfg.config_path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (cmd->count("--" + key) > 0)
            continue; // explicit flags win
        auto as_size = [&]() -> size_t {
            try {
                return std::stoull(value);
            } catch (const std::exception&) {
                throw Error(ErrorKind::parse, cfg.config_path + ": bad number for '" + key + "'");
            }
        };
        if (key == "states-max")
            cfg.states_max = as_size();
        else if (key == "fwl2-max-vertices")
            cfg.fwl2_max_vertices = as_size();
        else if (key == "encoding")
            cfg.encoding = value;
        else if (key == "agg")
            cfg.agg = value;
        else if (key == "alg")
            cfg.alg = value;
        else if (key == "out")
            cfg.out_dir = value;
        else if (key == "witnesses")
            cfg.witnesses = as_size();
        else if (key == "cache")
            cfg.cache_path = value;
        else if (key == "fail-on-conflict")
            cfg.fail_on_conflict = value == "true" || value == "1";
        else if (key == "jobs")
            cfg.jobs = static_cast<unsigned>(as_size());
        else
            throw Error(ErrorKind::validation, cfg.config_path + ": unknown config key '" + key + "'");
    }
}

struct LoadedTasks {
    DomainModel dom;
    std::vector<GroundTask> tasks;
};

LoadedTasks load_tasks(const RunConfig& cfg) {
    LoadedTasks lt;
    lt.dom = parse_domain(read_file(cfg.domain_path));
    for (const auto& path : cfg.instance_paths) {
        InstanceModel inst = parse_instance(read_file(path), lt.dom);
        lt.tasks.push_back(ground(lt.dom, inst));
    }
    return lt;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    std::filesystem::path dir = cfg.out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out)
        throw Error(ErrorKind::io, "cannot write '" + (dir / name).string() + "'");
    return out;
}

int cmd_expand(const RunConfig& cfg) {
    LoadedTasks lt = load_tasks(cfg);
    for (const auto& task : lt.tasks) {
        TransitionSystem ts = expand(task, cfg.states_max);
        compute_vstar(ts);
        if (!cfg.out_dir.empty()) {
            auto out = open_out(cfg, task.instance_name + ".ts");
            write_transition_system(out, ts, task);
        }
        size_t goals = 0;
        std::map<std::string, size_t> vstar_hist;
        for (size_t i = 0; i < ts.states.size(); ++i) {
            if (ts.goal_flags[i])
                ++goals;
            ++vstar_hist[cost_to_string(ts.vstar[i])];
        }
        std::cout << task.instance_name << ": states " << ts.states.size() << " transitions "
                  << ts.num_transitions() << " goals " << goals << " vstar";
        for (const auto& [v, n] : vstar_hist)
            std::cout << " " << v << ":" << n;
        std::cout << "\n";
    }
    return 0;
}

int cmd_abstract(const RunConfig& cfg) {
    LoadedTasks lt = load_tasks(cfg);
    ColorLegend legend = ColorLegend::from_domain(lt.dom);
    std::vector<TransitionSystem> systems;
    std::vector<AbstractModel> models;
    for (const auto& task : lt.tasks) {
        TransitionSystem ts = expand(task, cfg.states_max);
        compute_vstar(ts);
        models.push_back(quotient(ts, task, legend, cfg.jobs));
        systems.push_back(std::move(ts));
        std::cout << task.instance_name << ": states " << systems.back().states.size() << " classes "
                  << models.back().classes.size() << "\n";
    }
    PooledModel pm = pool_classes(models);
    std::cout << "pooled: states " << pm.total_states << " classes " << pm.classes.size() << " factor "
              << pm.reduction_factor() << "\n";
    std::vector<const GroundTask*> task_ptrs;
    std::vector<const TransitionSystem*> system_ptrs;
    for (size_t i = 0; i < lt.tasks.size(); ++i) {
        task_ptrs.push_back(&lt.tasks[i]);
        system_ptrs.push_back(&systems[i]);
    }
    if (!cfg.out_dir.empty()) {
        auto out = open_out(cfg, lt.dom.name + ".reduced");
        export_reduced_training_set(out, pm, task_ptrs, system_ptrs);
    }
    if (!cfg.cache_path.empty()) {
        std::ofstream out(cfg.cache_path);
        if (!out)
            throw Error(ErrorKind::io, "cannot write '" + cfg.cache_path + "'");
        std::vector<CanonicalForm> forms;
        for (const auto& cls : pm.classes)
            forms.push_back(cls.form);
        write_canonical_cache(out, forms);
    }
    return 0;
}

int cmd_conflicts(const RunConfig& cfg) {
    LoadedTasks lt = load_tasks(cfg);
    std::vector<const GroundTask*> task_ptrs;
    for (const auto& task : lt.tasks)
        task_ptrs.push_back(&task);
    ConflictOptions options;
    options.fwl2_max_vertices = cfg.fwl2_max_vertices;
    options.max_witnesses = cfg.witnesses;
    DomainAnalysis da = analyze_domain(task_ptrs, cfg.selected_configs(), cfg.states_max, options, cfg.jobs);

    std::vector<DomainAnalysis> analyses;
    analyses.push_back(std::move(da));
    const DomainAnalysis& a = analyses.front();
    write_conflicts_csv(std::cout, analyses);
    for (const auto& notice : a.notices)
        std::cerr << "notice: " << notice << "\n";
    if (!cfg.out_dir.empty()) {
        auto csv = open_out(cfg, a.domain + ".conflicts.csv");
        write_conflicts_csv(csv, analyses);
        auto js = open_out(cfg, a.domain + ".conflicts.json");
        nlohmann::json j = conflicts_json(a);
        j["provenance"] = cfg.provenance();
        js << j.dump(2) << "\n";
    }
    bool any_conflict = false;
    for (const auto& report : a.reports)
        any_conflict = any_conflict || report.e_pairs > 0;
    return (cfg.fail_on_conflict && any_conflict) ? 1 : 0;
}

// State dump format: first line `objects o1 o2 …`, then one atom per line,
// `pred obj1 obj2 …`. Minted predicate names (p_g and the marking variants)
// are allowed here.
RelationalStructure read_state_dump(const std::string& path, const DomainModel& dom) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::string line;
    RelationalStructure rs;
    std::map<std::string, int> object_index;
    bool have_objects = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head[0] == '#')
            continue;
        if (!have_objects) {
            if (head != "objects")
                throw Error(ErrorKind::parse, path + ": expected an 'objects' line first");
            std::string name;
            while (ls >> name) {
                object_index[name] = static_cast<int>(rs.num_objects);
                ++rs.num_objects;
            }
            have_objects = true;
            continue;
        }
        int pred = dom.pred_id(head);
        if (pred < 0)
            throw Error(ErrorKind::validation, path + ": undeclared predicate '" + head + "'");
        std::vector<int> args;
        std::string name;
        while (ls >> name) {
            auto it = object_index.find(name);
            if (it == object_index.end())
                throw Error(ErrorKind::validation, path + ": unknown object '" + name + "'");
            args.push_back(it->second);
        }
        if (static_cast<int>(args.size()) != dom.predicates[static_cast<size_t>(pred)].arity)
            throw Error(ErrorKind::validation, path + ": arity mismatch for '" + head + "'");
        rs.atoms.emplace_back(pred, std::move(args));
    }
    if (!have_objects)
        throw Error(ErrorKind::parse, path + ": empty state dump");
    return rs;
}

int cmd_isocheck(const std::string& domain_path, const std::string& path_a, const std::string& path_b) {
    DomainModel dom = parse_domain(read_file(domain_path));
    RelationalStructure a = read_state_dump(path_a, dom);
    RelationalStructure b = read_state_dump(path_b, dom);
    ColorLegend legend = ColorLegend::from_domain(dom);
    ObjectGraph ga = build_object_graph(a, legend);
    ObjectGraph gb = build_object_graph(b, legend);
    if (a.num_objects == b.num_objects && canonical_form(ga) == canonical_form(gb)) {
        std::cout << "isomorphic\n";
        return 0;
    }
    std::cout << "not isomorphic";
    if (a.num_objects == b.num_objects) {
        if (!wl_distinguishes_graphs(ga, gb, Algorithm::wl1, Aggregation::multiset))
            std::cout << "; 1-WL(plain) histograms equal";
        else
            std::cout << "; 1-WL(plain) distinguishes the states";
    } else {
        std::cout << "; object counts differ";
    }
    std::cout << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"state-symmetry analysis for classical planning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", planiso::version());

    RunConfig expand_cfg, abstract_cfg, conflicts_cfg;
    auto* expand_cmd = app.add_subcommand("expand", "expand reachable state spaces");
    add_common_flags(expand_cmd, expand_cfg);
    auto* abstract_cmd = app.add_subcommand("abstract", "build quotient abstractions and reduced sets");
    add_common_flags(abstract_cmd, abstract_cfg);
    auto* conflicts_cmd = app.add_subcommand("conflicts", "detect E-/V-conflicts");
    add_common_flags(conflicts_cmd, conflicts_cfg);

    std::string iso_domain, iso_a, iso_b;
    auto* isocheck_cmd = app.add_subcommand("isocheck", "decide isomorphism of two state dumps");
    isocheck_cmd->add_option("domain", iso_domain, "domain PDDL file")->required();
    isocheck_cmd->add_option("a", iso_a, "first state dump")->required();
    isocheck_cmd->add_option("b", iso_b, "second state dump")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (expand_cmd->parsed()) {
            apply_config_file(expand_cmd, expand_cfg);
            return cmd_expand(expand_cfg);
        }
        if (abstract_cmd->parsed()) {
            apply_config_file(abstract_cmd, abstract_cfg);
            return cmd_abstract(abstract_cfg);
        }
        if (conflicts_cmd->parsed()) {
            apply_config_file(conflicts_cmd, conflicts_cfg);
            return cmd_conflicts(conflicts_cfg);
        }
        if (isocheck_cmd->parsed())
            return cmd_isocheck(iso_domain, iso_a, iso_b);
    } catch (const planiso::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
