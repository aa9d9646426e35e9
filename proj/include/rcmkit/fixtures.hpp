#pragma once

#include <functional>
#include <string>
#include <vector>

#include <rcmkit/io.hpp>

namespace rcmkit {

struct CheckOutcome {
    bool passed = false;
    std::string detail;  // counts and witnesses on success, the reason on failure
};

// One replayable assertion about a fixture's model; run re-derives the
// result from scratch, so a drifted library turns the fixture red.
struct FixtureCheck {
    std::string label;
    std::function<CheckOutcome()> run;
};

// A frozen worked example: a model, the queries it is exercised with, and
// the expected results as self-checking records.
struct Fixture {
    std::string name;
    Rcm model;
    std::vector<CiQuery> queries;    // exported beside the model for CLI replay
    std::vector<std::string> notes;  // caveats printed with the results
    std::vector<FixtureCheck> checks;
};

namespace detail {

inline CheckOutcome outcome(bool passed, std::string detail) {
    return {passed, std::move(detail)};
}

inline std::string render_trail(const std::vector<AggNode>& trail) {
    std::string out;
    for (const auto& n : trail) {
        if (!out.empty()) out += ", ";
        out += to_string(n);
    }
    return out;
}

}  // namespace detail

// A long detour path that extends a shorter one in exactly one way: the
// detour and a prefix of the extended path intersect, yet no skeleton
// realizes the extension and the intersection jointly. The checked graph
// therefore drops the intersection edge the unchecked one keeps.
inline Fixture fixture_example1() {
    RelationalSchema s;
    for (const char* e : {"B", "E1", "E2", "E3", "Ik", "Ij"}) s.add_entity(e);
    s.add_relationship("R1", {"B", "E1"}, {Card::One, Card::One});
    s.add_relationship("R2", {"E1", "E3"}, {Card::One, Card::One});
    s.add_relationship("R3", {"E1", "E2"}, {Card::One, Card::One});
    s.add_relationship("R4", {"E2", "E3", "Ik"}, {Card::One, Card::One, Card::One});
    s.add_relationship("R5", {"Ik", "Ij"}, {Card::One, Card::One});
    s.add_attribute("Ik", "X");
    s.add_attribute("Ij", "Y");

    const Path q{"B", "R1", "E1", "R2", "E3", "R4", "Ik", "R5", "Ij"};
    const Path r{"Ij", "R5", "Ik", "R4", "E3", "R2", "E1", "R3", "E2", "R4", "Ik"};
    const Path p{"B", "R1", "E1", "R3", "E2", "R4", "Ik"};
    const Path pp{"B", "R1", "E1", "R2", "E3", "R4", "Ik"};

    Rcm model{s, {make_dependency(r, "X", "Y")}};

    Fixture f;
    f.name = "example1";
    f.model = model;
    f.checks.push_back(
        {"the detour extends the effect path at junction seven", [=]() -> CheckOutcome {
             for (const auto& ext : extend(s, q, r))
                 if (ext.path == p)
                     return detail::outcome(ext.pivot == 7,
                                            "pivot " + std::to_string(ext.pivot));
             return detail::outcome(false, "the detour is not among the extensions");
         }});
    f.checks.push_back({"the detour and the direct walk can share their terminal item",
                        [=]() -> CheckOutcome {
                            return detail::outcome(intersectable(s, p, pp), "");
                        }});
    f.checks.push_back(
        {"the direct walk is a prefix of the effect path", [=]() -> CheckOutcome {
             const bool prefix =
                 pp.size() <= q.size() && std::equal(pp.begin(), pp.end(), q.begin());
             return detail::outcome(prefix, "");
         }});
    f.checks.push_back(
        {"no skeleton realizes the extension and the intersection jointly",
         [=]() -> CheckOutcome {
             const auto res = co_intersectable(s, q, r, p, pp);
             return detail::outcome(!res.value, res.value ? "a joint witness exists" : "");
         }});
    f.checks.push_back(
        {"only the unchecked graph keeps the intersection edge", [=]() -> CheckOutcome {
             const auto original = build_agg(model, "B", 11, AggVariant::Original);
             const auto revised = build_agg(model, "B", 11, AggVariant::Revised);
             const AggNode iv = AggNode::iv({p, "X"}, {pp, "X"});
             const AggNode effect = AggNode::rv({q, "Y"});
             bool kept = false;
             for (const auto& e : original.ives)
                 if (e.from == iv && e.to == effect) kept = true;
             return detail::outcome(kept && revised.ives.empty(),
                                    "unchecked intersection edges: " +
                                        std::to_string(original.ives.size()) +
                                        ", checked: " + std::to_string(revised.ives.size()));
         }});
    return f;
}

// A lifted d-connection with no ground realization: conditioning on the
// common effect keeps the pair connected in the lifted graph, while an
// exhaustive sweep of bounded skeletons grounds no connecting trail.
inline Fixture fixture_soundness_gap() {
    RelationalSchema s;
    for (const char* e : {"E1", "E2", "E3", "E4", "E5"}) s.add_entity(e);
    s.add_relationship("R1", {"E1", "E2", "E4"}, {Card::One, Card::One, Card::One});
    s.add_relationship("R2", {"E2", "E3"}, {Card::One, Card::One});
    s.add_relationship("R3", {"E3", "E4", "E5"}, {Card::One, Card::One, Card::One});
    s.add_attribute("E2", "Y");
    s.add_attribute("E3", "X");
    s.add_attribute("E5", "Z");

    const Path d1{"E2", "R2", "E3", "R3", "E4", "R1", "E2", "R2", "E3"};
    const Path d2{"E2", "R2", "E3", "R3", "E5"};
    const Path p{"E1", "R1", "E2", "R2", "E3"};
    const Path q{"E1", "R1", "E4", "R3", "E3", "R2", "E2"};
    const Path sv{"E1", "R1", "E4", "R3", "E5"};
    const Path svp{"E1", "R1", "E2", "R2", "E3", "R3", "E5"};

    Rcm model{s, {make_dependency(d1, "X", "Y"), make_dependency(d2, "Z", "Y")}};
    const CiQuery query{"E1", {{p, "X"}}, {{svp, "Z"}}, {{q, "Y"}}};

    Fixture f;
    f.name = "soundness-gap";
    f.model = model;
    f.queries = {query};
    f.notes = {"The exhaustive ground check is bounded at two items per class; the claim for "
               "arbitrarily large networks rests on the analytic argument, not on this sweep."};
    f.checks.push_back(
        {"conditioning on the common effect leaves the lifted pair connected",
         [=]() -> CheckOutcome {
             const auto agg = build_agg(model, "E1", 9, AggVariant::Revised);
             const auto trail = agg_d_connecting_trail(agg, query);
             return detail::outcome(trail.has_value(),
                                    trail ? "trail: " + detail::render_trail(*trail)
                                          : "separated");
         }});
    f.checks.push_back(
        {"the conditioning variable's intersection edge is jointly realizable",
         [=]() -> CheckOutcome {
             const auto res = co_intersectable(s, q, d2, sv, svp);
             return detail::outcome(
                 res.value && res.witness.has_value(),
                 res.witness ? "witness base " + res.witness->base + ", junction " +
                                   res.witness->mid + ", shared item " + res.witness->item
                             : "no joint witness");
         }});
    f.checks.push_back(
        {"no two-item-per-class network grounds the dependence", [=]() -> CheckOutcome {
             const auto verdict = relational_dsep_oracle(model, query, 2);
             return detail::outcome(verdict.separated_within_bound,
                                    std::to_string(verdict.skeletons_checked) +
                                        " candidate networks checked, none connects the pair");
         }});
    return f;
}

// Two employees developing one product, and a funding extension where
// business revenue depends on the success of funded products. The funding
// extension reconstructs a display: role cardinalities were chosen so the
// displayed variables are valid, and only the separation claims the display
// makes are asserted here.
inline Fixture fixture_devorg() {
    RelationalSchema s;
    s.add_entity("Emp");
    s.add_entity("Prod");
    s.add_entity("Biz");
    s.add_relationship("Dev", {"Emp", "Prod"}, {Card::Many, Card::Many});
    s.add_relationship("Fund", {"Prod", "Biz"}, {Card::One, Card::Many});
    s.add_attribute("Emp", "competence");
    s.add_attribute("Emp", "salary");
    s.add_attribute("Prod", "success");
    s.add_attribute("Biz", "revenue");

    Rcm model{s,
              {make_dependency({"Prod", "Dev", "Emp"}, "competence", "success"),
               make_dependency({"Emp"}, "competence", "salary"),
               make_dependency({"Biz", "Fund", "Prod"}, "success", "revenue")}};

    const RelationalVariable revenue{{"Emp", "Dev", "Prod", "Fund", "Biz"}, "revenue"};
    const RelationalVariable peer_comp{{"Emp", "Dev", "Prod", "Dev", "Emp"}, "competence"};
    const RelationalVariable success{{"Emp", "Dev", "Prod"}, "success"};
    const RelationalVariable cofunded{{"Emp", "Dev", "Prod", "Fund", "Biz", "Fund", "Prod"},
                                      "success"};
    const RelationalVariable peer_succ{{"Emp", "Dev", "Prod", "Dev", "Emp", "Dev", "Prod"},
                                       "success"};

    const CiQuery q_cofunded{"Emp", {revenue}, {peer_comp}, {success, cofunded}};
    const CiQuery q_peer{"Emp", {revenue}, {peer_comp}, {success, peer_succ}};
    const CiQuery q_open{"Emp", {revenue}, {peer_comp}, {}};

    const auto lifted = [model](const CiQuery& q) {
        return agg_d_connecting_trail(build_agg(model, "Emp", 7, AggVariant::Revised), q);
    };

    Fixture f;
    f.name = "devorg";
    f.model = model;
    f.queries = {q_cofunded, q_peer, q_open};
    f.notes = {"The funding extension is a reconstruction: role cardinalities were chosen so "
               "the displayed variables are valid; only the separation claims are asserted."};
    f.checks.push_back(
        {"two developers of one product ground exactly four dependence edges",
         [=]() -> CheckOutcome {
             RelationalSkeleton sk;
             sk.add_entity_item("Emp", "quinn");
             sk.add_entity_item("Emp", "roger");
             sk.add_entity_item("Prod", "laptop");
             sk.add_relationship_item("Dev", "dev-q", {"quinn", "laptop"});
             sk.add_relationship_item("Dev", "dev-r", {"roger", "laptop"});
             const auto gg = ground_graph(model, sk);
             const bool ok = gg.edges.size() == 4 &&
                             gg.has_edge({"quinn", "competence"}, {"laptop", "success"}) &&
                             gg.has_edge({"roger", "competence"}, {"laptop", "success"}) &&
                             gg.has_edge({"quinn", "competence"}, {"quinn", "salary"}) &&
                             gg.has_edge({"roger", "competence"}, {"roger", "salary"});
             return detail::outcome(ok, std::to_string(gg.edges.size()) + " edges over " +
                                            std::to_string(gg.vertices.size()) + " vertices");
         }});
    f.checks.push_back({"holding success and co-funded success separates revenue from peer "
                        "competence",
                        [=]() -> CheckOutcome {
                            const auto trail = lifted(q_cofunded);
                            return detail::outcome(
                                !trail.has_value(),
                                trail ? "trail: " + detail::render_trail(*trail) : "");
                        }});
    f.checks.push_back({"holding success and peer success separates revenue from peer "
                        "competence",
                        [=]() -> CheckOutcome {
                            const auto trail = lifted(q_peer);
                            return detail::outcome(
                                !trail.has_value(),
                                trail ? "trail: " + detail::render_trail(*trail) : "");
                        }});
    f.checks.push_back(
        {"revenue and peer competence are connected unconditionally", [=]() -> CheckOutcome {
             const auto trail = lifted(q_open);
             return detail::outcome(trail.has_value(),
                                    trail ? "trail: " + detail::render_trail(*trail)
                                          : "separated");
         }});
    return f;
}

inline std::vector<Fixture> all_fixtures() {
    std::vector<Fixture> out;
    out.push_back(fixture_example1());
    out.push_back(fixture_soundness_gap());
    out.push_back(fixture_devorg());
    return out;
}

inline Fixture find_fixture(const std::string& name) {
    for (auto& f : all_fixtures())
        if (f.name == name) return f;
    throw std::invalid_argument("unknown fixture '" + name +
                                "'; known fixtures: example1, soundness-gap, devorg");
}

// Writes the fixture's model and numbered query files into dir so the
// command-line tool can replay them; returns the written paths.
inline std::vector<std::string> export_fixture(const Fixture& f, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> out;
    const auto model_path = (std::filesystem::path(dir) / (f.name + "-model.json")).string();
    write_text_file(model_path, model_to_json(f.model).dump(2) + "\n");
    out.push_back(model_path);
    for (std::size_t i = 0; i < f.queries.size(); ++i) {
        const auto query_path =
            (std::filesystem::path(dir) / (f.name + "-query-" + std::to_string(i + 1) + ".json"))
                .string();
        write_text_file(query_path, query_to_json(f.queries[i]).dump(2) + "\n");
        out.push_back(query_path);
    }
    return out;
}

}  // namespace rcmkit
