#include <rcmkit/agg.hpp>

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <utility>
#include <vector>

#include <rcmkit/rcm.hpp>
#include <rcmkit/skeleton.hpp>
#include <rcmkit/witness.hpp>

#include "test_schemas.hpp"

namespace {

using namespace rcmkit;
using namespace rcmkit::testing;

RelationalVariable rv(Path p, std::string attr) { return {std::move(p), std::move(attr)}; }

// Longest variable of the five-entity schema: the nine-class walk back to
// the base's neighbour entity class.
Path gap_w9() { return {"E1", "R1", "E2", "R2", "E3", "R3", "E4", "R1", "E2"}; }

// Sibling of the detour path that swaps the two middle branches.
Path contrast_q2() { return {"B", "R1", "E1", "R3", "E2", "R4", "Ik", "R5", "Ij"}; }

std::set<std::pair<AggNode, AggNode>> ive_ends(const Agg& agg) {
    std::set<std::pair<AggNode, AggNode>> out;
    for (const auto& e : agg.ives) out.insert({e.from, e.to});
    return out;
}

const Ive* find_ive(const Agg& agg, const AggNode& from, const AggNode& to) {
    for (const auto& e : agg.ives)
        if (e.from == from && e.to == to) return &e;
    return nullptr;
}

// Replays an intersection edge's stored witness from scratch: the skeleton
// must instantiate the schema and exhibit the junction and target items in
// the four terminal sets the edge's tuple quantifies over.
void expect_ive_replays(const Rcm& m, const Ive& e) {
    ASSERT_TRUE(e.witness.has_value()) << to_string(e.from) << " -> " << to_string(e.to);
    const auto& w = *e.witness;
    const auto& dep = m.dependencies[e.dep_index];
    const AggNode& iv = e.effect_side ? e.to : e.from;
    const RelationalVariable& shared = e.effect_side ? e.member_effect : e.member_cause;
    const Path& partner = iv.members[iv.members[0] == shared ? 1 : 0].path;
    const Path q = e.effect_side ? e.member_cause.path : e.member_effect.path;
    const Path r = e.effect_side ? reversed(dep.cause.path) : dep.cause.path;
    const Path p = e.effect_side ? e.member_effect.path : e.member_cause.path;
    EXPECT_TRUE(validate_skeleton(m.schema, w.skeleton).empty());
    EXPECT_TRUE(terminal_set(m.schema, w.skeleton, q, w.base).count(w.mid));
    EXPECT_TRUE(terminal_set(m.schema, w.skeleton, r, w.mid).count(w.item));
    EXPECT_TRUE(terminal_set(m.schema, w.skeleton, p, w.base).count(w.item));
    EXPECT_TRUE(terminal_set(m.schema, w.skeleton, partner, w.base).count(w.item));
}

TEST(AggNodeTest, IntersectionNodesAreUnordered) {
    const auto a = rv(gap_s(), "Z");
    const auto b = rv(gap_sp(), "Z");
    EXPECT_EQ(AggNode::iv(a, b), AggNode::iv(b, a));
    EXPECT_TRUE(AggNode::iv(a, b).is_iv());
    EXPECT_FALSE(AggNode::rv(a).is_iv());
    EXPECT_TRUE(AggNode::iv(a, b).has_member(b));
    EXPECT_FALSE(AggNode::iv(a, b).has_member(rv(gap_q(), "Y")));
}

TEST(BuildAggTest, FiveEntityRevisedInventory) {
    const auto m = make_gap_model();
    const auto agg = build_agg(m, "E1", 9, AggVariant::Revised);

    const auto G = rv(gap_g(), "Y");
    const auto Q = rv(gap_q(), "Y");
    const auto W9 = rv(gap_w9(), "Y");
    const auto P = rv(gap_p(), "X");
    const auto T = rv(gap_t(), "X");
    const auto S = rv(gap_s(), "Z");
    const auto SP = rv(gap_sp(), "Z");

    std::vector<RelationalVariable> want_rvs{G, Q, W9, P, T, S, SP};
    std::sort(want_rvs.begin(), want_rvs.end());
    EXPECT_EQ(agg.rvs, want_rvs);
    EXPECT_TRUE(agg.has_rv(W9));
    EXPECT_FALSE(agg.has_rv(rv({"E1", "R1", "E4"}, "Y")));

    std::vector<Rve> want_rves{
        {P, Q, {{0, 6}}},
        {S, Q, {{1, 4}}},
        {SP, G, {{1, 1}}},
    };
    std::sort(want_rves.begin(), want_rves.end());
    EXPECT_EQ(agg.rves, want_rves);

    std::vector<AggNode> want_ivs{AggNode::iv(G, Q), AggNode::iv(Q, W9), AggNode::iv(P, T),
                                  AggNode::iv(S, SP)};
    std::sort(want_ivs.begin(), want_ivs.end());
    EXPECT_EQ(agg.ivs, want_ivs);

    const std::set<std::pair<AggNode, AggNode>> want_ends{
        {AggNode::iv(S, SP), AggNode::rv(Q)},    {AggNode::iv(S, SP), AggNode::rv(G)},
        {AggNode::rv(S), AggNode::iv(G, Q)},     {AggNode::rv(S), AggNode::iv(Q, W9)},
        {AggNode::rv(SP), AggNode::iv(G, Q)},    {AggNode::rv(P), AggNode::iv(Q, W9)},
    };
    EXPECT_EQ(ive_ends(agg), want_ends);
    for (const auto& e : agg.ives) expect_ive_replays(m, e);
    EXPECT_TRUE(is_acyclic(agg));
}

TEST(BuildAggTest, FiveEntityOriginalAddsUncheckedEdges) {
    const auto m = make_gap_model();
    const auto revised = build_agg(m, "E1", 9, AggVariant::Revised);
    const auto original = build_agg(m, "E1", 9, AggVariant::Original);

    EXPECT_EQ(original.rvs, revised.rvs);
    EXPECT_EQ(original.ivs, revised.ivs);
    EXPECT_EQ(original.rves, revised.rves);

    auto want_ends = ive_ends(revised);
    const auto P = rv(gap_p(), "X");
    const auto T = rv(gap_t(), "X");
    const auto G = rv(gap_g(), "Y");
    const auto Q = rv(gap_q(), "Y");
    want_ends.insert({AggNode::iv(P, T), AggNode::rv(Q)});
    want_ends.insert({AggNode::rv(P), AggNode::iv(G, Q)});
    EXPECT_EQ(ive_ends(original), want_ends);
    for (const auto& e : original.ives) EXPECT_FALSE(e.witness.has_value());
    EXPECT_TRUE(is_acyclic(original));
}

TEST(BuildAggTest, TwoRuleContrastInventory) {
    const auto m = make_contrast_model();
    const auto revised = build_agg(m, "B", 11, AggVariant::Revised);

    const auto P = rv(contrast_p(), "X");
    const auto PP = rv(contrast_pp(), "X");
    const auto Q = rv(contrast_q(), "Y");
    const auto Q2 = rv(contrast_q2(), "Y");

    std::vector<RelationalVariable> want_rvs{P, PP, Q, Q2};
    std::sort(want_rvs.begin(), want_rvs.end());
    EXPECT_EQ(revised.rvs, want_rvs);

    const std::vector<Rve> want_rves{{P, Q, {{0, 7}}}};
    EXPECT_EQ(revised.rves, want_rves);

    std::vector<AggNode> want_ivs{AggNode::iv(P, PP), AggNode::iv(Q, Q2)};
    std::sort(want_ivs.begin(), want_ivs.end());
    EXPECT_EQ(revised.ivs, want_ivs);

    // The revised rule rejects both candidate intersection edges; the
    // original rule adds them from the member edge alone.
    EXPECT_TRUE(revised.ives.empty());
    const auto original = build_agg(m, "B", 11, AggVariant::Original);
    const std::set<std::pair<AggNode, AggNode>> want_ends{
        {AggNode::iv(P, PP), AggNode::rv(Q)},
        {AggNode::rv(P), AggNode::iv(Q, Q2)},
    };
    EXPECT_EQ(ive_ends(original), want_ends);
    EXPECT_EQ(original.rvs, revised.rvs);
    EXPECT_EQ(original.rves, revised.rves);
    EXPECT_EQ(original.ivs, revised.ivs);
}

TEST(BuildAggTest, DeveloperOrganizationInventories) {
    const auto m = make_devorg_model();

    const auto emp = build_agg(m, "Emp", 5, AggVariant::Revised);
    const auto ec = rv({"Emp"}, "competence");
    const auto es = rv({"Emp"}, "salary");
    const auto v = rv({"Emp", "Dev", "Prod"}, "success");
    const auto xc = rv({"Emp", "Dev", "Prod", "Dev", "Emp"}, "competence");
    const auto xs = rv({"Emp", "Dev", "Prod", "Dev", "Emp"}, "salary");
    std::vector<RelationalVariable> want_emp{ec, es, v, xc, xs};
    std::sort(want_emp.begin(), want_emp.end());
    EXPECT_EQ(emp.rvs, want_emp);
    std::vector<Rve> want_emp_rves{
        {xc, v, {{0, 1}}},
        {ec, v, {{0, 3}}},
        {ec, es, {{1, 1}}},
        {xc, xs, {{1, 1}}},
    };
    std::sort(want_emp_rves.begin(), want_emp_rves.end());
    EXPECT_EQ(emp.rves, want_emp_rves);
    EXPECT_TRUE(emp.ivs.empty());
    EXPECT_TRUE(emp.ives.empty());

    const auto prod = build_agg(m, "Prod", 5, AggVariant::Revised);
    const auto ps = rv({"Prod"}, "success");
    const auto pc = rv({"Prod", "Dev", "Emp"}, "competence");
    const auto psal = rv({"Prod", "Dev", "Emp"}, "salary");
    const auto pps = rv({"Prod", "Dev", "Emp", "Dev", "Prod"}, "success");
    std::vector<RelationalVariable> want_prod{ps, pc, psal, pps};
    std::sort(want_prod.begin(), want_prod.end());
    EXPECT_EQ(prod.rvs, want_prod);
    std::vector<Rve> want_prod_rves{
        {pc, ps, {{0, 1}}},
        {pc, pps, {{0, 3}}},
        {pc, psal, {{1, 1}}},
    };
    std::sort(want_prod_rves.begin(), want_prod_rves.end());
    EXPECT_EQ(prod.rves, want_prod_rves);
    EXPECT_TRUE(prod.ivs.empty());
    EXPECT_TRUE(prod.ives.empty());

    // Different perspectives describe disjoint variable sets.
    std::vector<RelationalVariable> shared;
    std::set_intersection(emp.rvs.begin(), emp.rvs.end(), prod.rvs.begin(), prod.rvs.end(),
                          std::back_inserter(shared));
    EXPECT_TRUE(shared.empty());
}

TEST(BuildAggTest, FundedOrganizationInventory) {
    const auto m = make_orgx_model();
    const auto agg = build_agg(m, "Emp", 7, AggVariant::Revised);

    const auto c = rv({"Emp"}, "competence");
    const auto es = rv({"Emp"}, "salary");
    const auto v = rv({"Emp", "Dev", "Prod"}, "success");
    const auto xc = rv({"Emp", "Dev", "Prod", "Dev", "Emp"}, "competence");
    const auto xs = rv({"Emp", "Dev", "Prod", "Dev", "Emp"}, "salary");
    const auto w = rv({"Emp", "Dev", "Prod", "Fund", "Biz"}, "revenue");
    const auto z = rv({"Emp", "Dev", "Prod", "Dev", "Emp", "Dev", "Prod"}, "success");
    const auto u = rv({"Emp", "Dev", "Prod", "Fund", "Biz", "Fund", "Prod"}, "success");

    std::vector<RelationalVariable> want_rvs{c, es, v, xc, xs, w, z, u};
    std::sort(want_rvs.begin(), want_rvs.end());
    EXPECT_EQ(agg.rvs, want_rvs);

    std::vector<Rve> want_rves{
        {xc, v, {{0, 1}}}, {c, v, {{0, 3}}},   {xc, z, {{0, 3}}}, {c, es, {{1, 1}}},
        {xc, xs, {{1, 1}}}, {u, w, {{2, 1}}},  {v, w, {{2, 3}}},
    };
    std::sort(want_rves.begin(), want_rves.end());
    EXPECT_EQ(agg.rves, want_rves);

    const std::vector<AggNode> want_ivs{AggNode::iv(z, u)};
    EXPECT_EQ(agg.ivs, want_ivs);

    // Both intersection edges survive the revised check, so the two
    // variants agree on this model.
    const std::set<std::pair<AggNode, AggNode>> want_ends{
        {AggNode::rv(xc), AggNode::iv(z, u)},
        {AggNode::iv(z, u), AggNode::rv(w)},
    };
    EXPECT_EQ(ive_ends(agg), want_ends);
    for (const auto& e : agg.ives) expect_ive_replays(m, e);

    const auto original = build_agg(m, "Emp", 7, AggVariant::Original);
    EXPECT_EQ(ive_ends(original), want_ends);
    EXPECT_EQ(original.rvs, agg.rvs);
    EXPECT_EQ(original.rves, agg.rves);
    EXPECT_TRUE(is_acyclic(agg));
    EXPECT_TRUE(is_acyclic(original));
}

TEST(BarTest, AddsIntersectionNodesSharingAMember) {
    const auto gap = build_agg(make_gap_model(), "E1", 9, AggVariant::Revised);
    const auto Q = rv(gap_q(), "Y");
    const auto G = rv(gap_g(), "Y");
    const auto W9v = rv(gap_w9(), "Y");
    const auto S = rv(gap_s(), "Z");
    const auto SP = rv(gap_sp(), "Z");
    const auto P = rv(gap_p(), "X");
    const auto T = rv(gap_t(), "X");

    auto sorted = [](std::vector<AggNode> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    EXPECT_EQ(bar(gap, {SP}), sorted({AggNode::rv(SP), AggNode::iv(S, SP)}));
    EXPECT_EQ(bar(gap, {P}), sorted({AggNode::rv(P), AggNode::iv(P, T)}));
    EXPECT_EQ(bar(gap, {Q}),
              sorted({AggNode::rv(Q), AggNode::iv(G, Q), AggNode::iv(Q, W9v)}));

    const auto orgx = build_agg(make_orgx_model(), "Emp", 7, AggVariant::Revised);
    const auto z = rv({"Emp", "Dev", "Prod", "Dev", "Emp", "Dev", "Prod"}, "success");
    const auto u = rv({"Emp", "Dev", "Prod", "Fund", "Biz", "Fund", "Prod"}, "success");
    const auto c = rv({"Emp"}, "competence");
    EXPECT_EQ(bar(orgx, {z}), sorted({AggNode::rv(z), AggNode::iv(z, u)}));
    EXPECT_EQ(bar(orgx, {u}), sorted({AggNode::rv(u), AggNode::iv(z, u)}));
    EXPECT_EQ(bar(orgx, {c}), std::vector<AggNode>{AggNode::rv(c)});
}

TEST(BarTest, RejectsVariablesOutsideTheGraph) {
    const auto emp = build_agg(make_devorg_model(), "Emp", 5, AggVariant::Revised);
    EXPECT_THROW(bar(emp, {rv({"Prod"}, "success")}), std::domain_error);
    EXPECT_THROW(bar(emp, {rv({"Emp"}, "success")}), std::domain_error);
}

TEST(BuildAggTest, RejectsBadArguments) {
    EXPECT_THROW(build_agg(make_gap_model(), "E9", 9, AggVariant::Revised),
                 std::invalid_argument);
    // The hop bound must admit every dependency's cause path.
    EXPECT_THROW(build_agg(make_gap_model(), "E1", 8, AggVariant::Revised),
                 std::invalid_argument);
    EXPECT_THROW(build_agg(make_devorg_model(), "Emp", 2, AggVariant::Revised),
                 std::invalid_argument);
    Rcm bad{make_devorg_schema(), {make_dependency({"Emp"}, "competence", "height")}};
    EXPECT_THROW(build_agg(bad, "Emp", 5, AggVariant::Revised), std::invalid_argument);
}

TEST(BuildAggTest, NoDependenciesMeansNoEdges) {
    Rcm m{make_gap_schema(), {}};
    const auto agg = build_agg(m, "E1", 9, AggVariant::Revised);
    EXPECT_EQ(agg.rvs.size(), 7u);
    EXPECT_EQ(agg.ivs.size(), 4u);
    EXPECT_TRUE(agg.rves.empty());
    EXPECT_TRUE(agg.ives.empty());
}

TEST(BuildAggTest, RevisedEdgesAreSubsetOfOriginal) {
    struct Config {
        Rcm model;
        std::string perspective;
        std::size_t hops;
    };
    const std::vector<Config> configs{
        {make_gap_model(), "E1", 9},       {make_contrast_model(), "B", 11},
        {make_devorg_model(), "Emp", 5},   {make_devorg_model(), "Prod", 5},
        {make_orgx_model(), "Emp", 7},
    };
    for (const auto& cfg : configs) {
        const auto revised = build_agg(cfg.model, cfg.perspective, cfg.hops, AggVariant::Revised);
        const auto original =
            build_agg(cfg.model, cfg.perspective, cfg.hops, AggVariant::Original);
        EXPECT_EQ(revised.nodes(), original.nodes());
        const auto re = revised.edges();
        const auto oe = original.edges();
        EXPECT_TRUE(std::includes(oe.begin(), oe.end(), re.begin(), re.end()))
            << cfg.perspective << " perspective";
        EXPECT_TRUE(is_acyclic(revised));
        EXPECT_TRUE(is_acyclic(original));
    }
}

// Every lifted edge must be realizable: some skeleton exhibits a ground
// edge between members of the cause and effect terminal sets, derived
// through the extension that produced the edge.
TEST(BuildAggTest, EveryVariableEdgeHasARealizingSkeleton) {
    struct Config {
        Rcm model;
        std::string perspective;
        std::size_t hops;
    };
    const std::vector<Config> configs{
        {make_gap_model(), "E1", 9},       {make_contrast_model(), "B", 11},
        {make_devorg_model(), "Emp", 5},   {make_devorg_model(), "Prod", 5},
        {make_orgx_model(), "Emp", 7},
    };
    int checked = 0;
    for (const auto& cfg : configs) {
        const auto agg = build_agg(cfg.model, cfg.perspective, cfg.hops, AggVariant::Revised);
        for (const auto& e : agg.rves) {
            std::set<std::size_t> deps;
            for (const auto& pr : e.provenance) deps.insert(pr.dep_index);
            for (std::size_t d : deps) {
                const auto& dep = cfg.model.dependencies[d];
                auto w = find_extension_witness(cfg.model.schema, e.effect.path, dep.cause.path,
                                                e.cause.path);
                ASSERT_TRUE(w.has_value())
                    << to_string(e.cause) << " -> " << to_string(e.effect);
                EXPECT_TRUE(validate_skeleton(cfg.model.schema, w->skeleton).empty());
                EXPECT_TRUE(
                    terminal_set(cfg.model.schema, w->skeleton, e.effect.path, w->base)
                        .count(w->mid));
                EXPECT_TRUE(terminal_set(cfg.model.schema, w->skeleton, e.cause.path, w->base)
                                .count(w->item));
                const auto gg = ground_graph(cfg.model, w->skeleton);
                EXPECT_TRUE(
                    gg.has_edge({w->item, e.cause.attr}, {w->mid, e.effect.attr}));
                ++checked;
            }
        }
    }
    EXPECT_EQ(checked, 18);
}

// Bounded covering property, checked exhaustively on small skeletons: a
// ground edge whose effect item lands in an abstract variable's terminal
// set is matched by a lifted edge whose cause terminal set holds the
// ground cause item. Effect variables whose extension set is clipped by
// the hop bound are skipped; their covers lie beyond the graph.
int expect_ground_edges_covered(const Rcm& m, const Agg& agg, std::size_t bound) {
    int checked = 0;
    for_each_skeleton(m.schema, bound, [&](const RelationalSkeleton& sk) {
        for (const auto& b : sk.items(agg.perspective)) {
            std::map<Path, std::set<std::string>> ts;
            auto members = [&](const Path& p) -> const std::set<std::string>& {
                auto it = ts.find(p);
                if (it == ts.end()) it = ts.emplace(p, terminal_set(m.schema, sk, p, b)).first;
                return it->second;
            };
            for (std::size_t d = 0; d < m.dependencies.size(); ++d) {
                const auto& dep = m.dependencies[d];
                for (const auto& q : agg.rvs) {
                    if (q.attr != dep.effect.attr || q.path.back() != dep.cause.path.front())
                        continue;
                    bool clipped = false;
                    for (const auto& [pivot, p] : extend(m.schema, q.path, dep.cause.path))
                        if (p.size() > agg.hop_bound) clipped = true;
                    if (clipped) continue;
                    for (const auto& y : members(q.path)) {
                        for (const auto& x : terminal_set(m.schema, sk, dep.cause.path, y)) {
                            bool covered = false;
                            for (const auto& e : agg.rves) {
                                if (e.effect != q) continue;
                                bool via_dep = false;
                                for (const auto& pr : e.provenance)
                                    if (pr.dep_index == d) via_dep = true;
                                if (via_dep && members(e.cause.path).count(x)) covered = true;
                            }
                            EXPECT_TRUE(covered) << x << " -> " << y << " under " << to_string(q);
                            ++checked;
                        }
                    }
                }
            }
        }
    });
    return checked;
}

TEST(BuildAggTest, GroundEdgesAreCoveredWithinTheHopBound) {
    const auto devorg = make_devorg_model();
    EXPECT_GT(expect_ground_edges_covered(
                  devorg, build_agg(devorg, "Emp", 5, AggVariant::Revised), 2),
              0);
    EXPECT_GT(expect_ground_edges_covered(
                  devorg, build_agg(devorg, "Prod", 5, AggVariant::Revised), 2),
              0);
    const auto orgx = make_orgx_model();
    EXPECT_GT(expect_ground_edges_covered(orgx, build_agg(orgx, "Emp", 7, AggVariant::Revised), 2),
              0);
}

TEST(BuildAggTest, IntersectionEdgeRecordsItsMemberDerivation) {
    const auto m = make_gap_model();
    const auto agg = build_agg(m, "E1", 9, AggVariant::Revised);
    const auto Q = rv(gap_q(), "Y");
    const auto S = rv(gap_s(), "Z");
    const auto SP = rv(gap_sp(), "Z");

    const Ive* e = find_ive(agg, AggNode::iv(S, SP), AggNode::rv(Q));
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->member_cause, S);
    EXPECT_EQ(e->member_effect, Q);
    EXPECT_EQ(e->dep_index, 1u);
    EXPECT_FALSE(e->effect_side);

    const Ive* f = find_ive(agg, AggNode::rv(S), AggNode::iv(rv(gap_g(), "Y"), Q));
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(f->member_cause, S);
    EXPECT_EQ(f->member_effect, Q);
    EXPECT_EQ(f->dep_index, 1u);
    EXPECT_TRUE(f->effect_side);
}

}  // namespace
