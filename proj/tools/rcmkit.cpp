#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include <rcmkit/fixtures.hpp>

namespace {

using namespace rcmkit;

// Flags validated by the parser before any computation runs.
struct CliConfig {
    std::string model_file;
    std::string query_file;
    std::string perspective;
    std::size_t hops = 0;
    std::string variant;
    std::string out_file;
    std::string dot_file;
    std::size_t max_items = 0;
    std::size_t workers = 1;
    std::vector<std::string> paths;
    std::vector<std::string> tuple;
    std::string fixture_name;
    std::string out_dir;
};

AggVariant variant_from_text(const std::string& t) {
    return t == "original" ? AggVariant::Original : AggVariant::Revised;
}

int cmd_validate(const CliConfig& c) {
    const auto violations = validate_model(load_model_file(c.model_file));
    if (violations.empty()) {
        std::cout << "ok\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
    return 1;
}

int cmd_agg_build(const CliConfig& c) {
    const auto agg = build_agg(load_model_file(c.model_file), c.perspective, c.hops,
                               variant_from_text(c.variant));
    const json j = agg_to_json(agg);
    if (c.out_file.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_text_file(c.out_file, j.dump(2) + "\n");
        std::cout << "wrote " << c.out_file << " (" << agg.nodes().size() << " nodes, "
                  << agg.edges().size() << " edges)\n";
    }
    if (!c.dot_file.empty()) {
        write_text_file(c.dot_file, agg_to_dot(agg));
        std::cout << "wrote " << c.dot_file << "\n";
    }
    return 0;
}

int cmd_dsep(const CliConfig& c) {
    const Rcm m = load_model_file(c.model_file);
    const CiQuery q = load_query_file(c.query_file);
    const auto agg = build_agg(m, q.perspective, c.hops, variant_from_text(c.variant));
    const auto trail = agg_d_connecting_trail(agg, q);
    std::cout << (trail ? "connected" : "separated") << "\n";
    json j;
    j["connected"] = trail.has_value();
    if (trail) {
        j["trail"] = json::array();
        for (const auto& n : *trail) j["trail"].push_back(agg_node_to_json(n));
    }
    std::cout << j.dump(2) << "\n";
    return trail ? 1 : 0;
}

int cmd_oracle(const CliConfig& c) {
    const Rcm m = load_model_file(c.model_file);
    const CiQuery q = load_query_file(c.query_file);
    const auto verdict = relational_dsep_oracle(m, q, c.max_items, c.workers);
    if (verdict.separated_within_bound) {
        std::cout << "separated within bound (" << verdict.skeletons_checked << " skeletons)\n"
                  << "note: the sweep is bounded at " << verdict.bound
                  << " items per class and cannot certify separation for larger networks\n";
    } else {
        std::cout << "connected\n";
    }
    std::cout << verdict_to_json(verdict).dump(2) << "\n";
    return verdict.separated_within_bound ? 0 : 1;
}

int cmd_intersect(const CliConfig& c) {
    const Rcm m = load_model_file(c.model_file);
    const Path p = path_from_text(c.paths[0]);
    const Path q = path_from_text(c.paths[1]);
    const bool verdict = intersectable(m.schema, p, q);
    std::cout << (verdict ? "intersectable" : "not intersectable") << "\n";
    json j;
    j["intersectable"] = verdict;
    j["llrsp"] = llrsp(m.schema, p, q);
    j["reverse_llrsp"] = llrsp(m.schema, reversed(p), reversed(q));
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_cointersect(const CliConfig& c) {
    const Rcm m = load_model_file(c.model_file);
    const auto res =
        co_intersectable(m.schema, path_from_text(c.tuple[0]), path_from_text(c.tuple[1]),
                         path_from_text(c.tuple[2]), path_from_text(c.tuple[3]));
    std::cout << (res.value ? "co-intersectable" : "not co-intersectable") << "\n";
    json j;
    j["co_intersectable"] = res.value;
    if (res.witness) j["witness"] = co_intersection_witness_to_json(*res.witness);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_fixtures_run(const CliConfig& c) {
    std::vector<Fixture> targets;
    if (c.fixture_name == "all")
        targets = all_fixtures();
    else
        targets.push_back(find_fixture(c.fixture_name));
    bool all_pass = true;
    for (const auto& f : targets) {
        std::cout << "fixture " << f.name << "\n";
        for (const auto& check : f.checks) {
            const auto out = check.run();
            all_pass = all_pass && out.passed;
            std::cout << "  " << (out.passed ? "PASS" : "FAIL") << "  " << check.label;
            if (!out.detail.empty()) std::cout << " (" << out.detail << ")";
            std::cout << "\n";
        }
        for (const auto& note : f.notes) std::cout << "  note: " << note << "\n";
        if (!c.out_dir.empty())
            for (const auto& path : export_fixture(f, c.out_dir))
                std::cout << "  wrote " << path << "\n";
    }
    std::cout << (all_pass ? "all checks passed" : "checks FAILED") << "\n";
    return all_pass ? 0 : 1;
}

int run(int argc, char** argv) {
    CliConfig cfg;
    CLI::App app{"relational causal model toolkit"};
    app.require_subcommand(1);
    const auto variant_check = CLI::IsMember({"original", "revised"});

    auto* validate = app.add_subcommand("validate", "check a model file's invariants");
    validate->add_option("model-file", cfg.model_file, "model file (json)")->required();

    auto* agg = app.add_subcommand("agg", "abstract ground graph commands");
    agg->require_subcommand(1);
    auto* agg_build = agg->add_subcommand("build", "build and export one perspective's graph");
    agg_build->add_option("model-file", cfg.model_file, "model file (json)")->required();
    agg_build->add_option("--perspective", cfg.perspective, "perspective class")->required();
    agg_build->add_option("--hops", cfg.hops, "variable path length bound")->required();
    agg_build->add_option("--variant", cfg.variant, "original or revised")
        ->required()
        ->check(variant_check);
    agg_build->add_option("--out", cfg.out_file, "write the graph export here");
    agg_build->add_option("--dot", cfg.dot_file, "write dot-language text here");

    auto* dsep = app.add_subcommand("dsep", "lifted separation query");
    dsep->add_option("model-file", cfg.model_file, "model file (json)")->required();
    dsep->add_option("query-file", cfg.query_file, "query file (json)")->required();
    dsep->add_option("--hops", cfg.hops, "variable path length bound")->required();
    dsep->add_option("--variant", cfg.variant, "original or revised")
        ->required()
        ->check(variant_check);

    auto* oracle = app.add_subcommand("oracle", "exhaustive bounded ground-graph check");
    oracle->add_option("model-file", cfg.model_file, "model file (json)")->required();
    oracle->add_option("query-file", cfg.query_file, "query file (json)")->required();
    oracle->add_option("--max-items", cfg.max_items, "items per class in the sweep")
        ->required()
        ->check(CLI::PositiveNumber);
    oracle->add_option("--workers", cfg.workers, "parallel evaluators")
        ->envname("RCMKIT_WORKERS")
        ->check(CLI::PositiveNumber);

    auto* intersect =
        app.add_subcommand("intersect", "decide whether two paths can share a terminal item");
    intersect->add_option("model-file", cfg.model_file, "model file (json)")->required();
    // Bracketed path text must reach the parser verbatim, so the option is
    // kept from re-splitting list-like values.
    intersect->add_option("--paths", cfg.paths, "two paths like \"[E1, R1, E2]\"")
        ->required()
        ->expected(2)
        ->allow_extra_args(false);

    auto* cointersect = app.add_subcommand(
        "cointersect", "decide joint realizability of an extension and an intersection");
    cointersect->add_option("model-file", cfg.model_file, "model file (json)")->required();
    cointersect
        ->add_option("--tuple", cfg.tuple, "q r p p', each like \"[E1, R1, E2]\"")
        ->required()
        ->expected(4)
        ->allow_extra_args(false);

    auto* fixtures = app.add_subcommand("fixtures", "bundled worked examples");
    fixtures->require_subcommand(1);
    auto* fixtures_run =
        fixtures->add_subcommand("run", "replay a fixture's recorded results");
    fixtures_run->add_option("name", cfg.fixture_name, "fixture name or 'all'")->required();
    fixtures_run->add_option("--out-dir", cfg.out_dir, "export model/query files here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*validate) return cmd_validate(cfg);
        if (*agg_build) return cmd_agg_build(cfg);
        if (*dsep) return cmd_dsep(cfg);
        if (*oracle) return cmd_oracle(cfg);
        if (*intersect) return cmd_intersect(cfg);
        if (*cointersect) return cmd_cointersect(cfg);
        if (*fixtures_run) return cmd_fixtures_run(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
