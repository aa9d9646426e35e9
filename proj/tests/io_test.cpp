#include <rcmkit/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>

#include "test_schemas.hpp"

namespace {

using namespace rcmkit;
using namespace rcmkit::testing;

TEST(SchemaFilesTest, RoundTripPreservesEveryField) {
    const json j = schema_to_json(make_gap_schema());
    EXPECT_EQ(j.at("entities"), (json{"E1", "E2", "E3", "E4", "E5"}));
    EXPECT_EQ(j.at("relationships").at("R1").at("classes"), (json{"E1", "E2", "E4"}));
    EXPECT_EQ(j.at("relationships").at("R1").at("cards"), (json{"one", "one", "one"}));
    EXPECT_EQ(j.at("attributes").at("E2"), (json{"Y"}));
    EXPECT_EQ(schema_to_json(schema_from_json(j)), j);
}

TEST(SchemaFilesTest, ParsesTheDocumentedFieldNames) {
    const auto j = json::parse(R"({
        "entities": ["Emp", "Prod"],
        "relationships": {"Dev": {"classes": ["Emp", "Prod"], "cards": ["many", "many"]}},
        "attributes": {"Emp": ["competence"]}
    })");
    const auto s = schema_from_json(j);
    EXPECT_TRUE(s.is_entity("Emp"));
    EXPECT_TRUE(s.is_relationship("Dev"));
    EXPECT_EQ(s.card("Dev", "Prod"), Card::Many);
    EXPECT_TRUE(validate_schema(s).empty());
}

TEST(SchemaFilesTest, RejectsBadCardinalityTextAndMissingFields) {
    json j = schema_to_json(make_devorg_schema());
    j["relationships"]["Dev"]["cards"][0] = "sometimes";
    EXPECT_THROW(schema_from_json(j), std::invalid_argument);
    EXPECT_THROW(schema_from_json(json::object()), json::exception);
    EXPECT_THROW(schema_from_json(json::parse(R"({"entities": []})")), json::exception);
}

TEST(ModelFilesTest, RoundTripKeepsDependencies) {
    const Rcm m = make_gap_model();
    const json j = model_to_json(m);
    ASSERT_EQ(j.at("dependencies").size(), 2u);
    EXPECT_EQ(j.at("dependencies")[0].at("cause_path"), json(gap_d1()));
    EXPECT_EQ(j.at("dependencies")[0].at("cause_attr"), "X");
    EXPECT_EQ(j.at("dependencies")[0].at("effect_attr"), "Y");
    const Rcm back = model_from_json(j);
    EXPECT_EQ(back.dependencies, m.dependencies);
    EXPECT_EQ(model_to_json(back), j);
    EXPECT_TRUE(validate_model(back).empty());
}

TEST(ModelFilesTest, RequiresTheDependencyList) {
    EXPECT_THROW(model_from_json(schema_to_json(make_gap_schema())), json::exception);
}

TEST(SkeletonFilesTest, RoundTripKeepsItemsAndLinks) {
    const auto s = make_gap_schema();
    const json j = skeleton_to_json(make_gap_witness_skeleton());
    EXPECT_EQ(j.at("items").at("E2"), (json{"e2", "iy"}));
    ASSERT_EQ(j.at("links").size(), 4u);
    EXPECT_EQ(j.at("links")[0].at("rel"), "r1");
    EXPECT_EQ(j.at("links")[0].at("entities"), (json{"b", "e2", "e4"}));
    const auto back = skeleton_from_json(s, j);
    EXPECT_TRUE(validate_skeleton(s, back).empty());
    EXPECT_EQ(skeleton_to_json(back), j);
}

TEST(SkeletonFilesTest, RejectsUnknownClassesAndBadLinkRows) {
    const auto s = make_gap_schema();
    const json good = skeleton_to_json(make_gap_witness_skeleton());
    json bad = good;
    bad["items"]["Bogus"] = {"x"};
    EXPECT_THROW(skeleton_from_json(s, bad), std::invalid_argument);
    bad = good;
    bad["links"].push_back({{"rel", "ghost"}, {"entities", {"b"}}});
    EXPECT_THROW(skeleton_from_json(s, bad), std::invalid_argument);
    bad = good;
    bad["links"].push_back(bad["links"][0]);
    EXPECT_THROW(skeleton_from_json(s, bad), std::invalid_argument);
    bad = good;
    bad["links"].erase(0);
    EXPECT_THROW(skeleton_from_json(s, bad), std::invalid_argument);
}

TEST(QueryFilesTest, RoundTripKeepsAllThreeSets) {
    const CiQuery q{"E1", {{gap_p(), "X"}}, {{gap_sp(), "Z"}}, {{gap_q(), "Y"}}};
    const json j = query_to_json(q);
    EXPECT_EQ(j.at("perspective"), "E1");
    ASSERT_EQ(j.at("u").size(), 1u);
    EXPECT_EQ(j.at("u")[0].at("attr"), "X");
    const CiQuery back = query_from_json(j);
    EXPECT_EQ(back.perspective, q.perspective);
    EXPECT_EQ(back.u, q.u);
    EXPECT_EQ(back.v, q.v);
    EXPECT_EQ(back.w, q.w);
    EXPECT_NO_THROW(check_query(make_gap_schema(), back));
}

TEST(QueryFilesTest, ParsesTheDocumentedShape) {
    const auto j = json::parse(R"({
        "perspective": "Emp",
        "u": [{"path": ["Emp"], "attr": "competence"}],
        "v": [{"path": ["Emp"], "attr": "salary"}],
        "w": []
    })");
    const auto q = query_from_json(j);
    EXPECT_EQ(q.u.front().path, (Path{"Emp"}));
    EXPECT_TRUE(q.w.empty());
    EXPECT_THROW(query_from_json(json::parse(R"({"perspective": "Emp", "u": [], "v": []})")),
                 json::exception);
}

TEST(PathTextTest, ParsesBracketedClassLists) {
    EXPECT_EQ(path_from_text("[E1, R1, E2]"), (Path{"E1", "R1", "E2"}));
    EXPECT_EQ(path_from_text("  [ E1 ,R1,E2 ]  "), (Path{"E1", "R1", "E2"}));
    EXPECT_EQ(path_from_text("[Emp]"), (Path{"Emp"}));
}

TEST(PathTextTest, RejectsMalformedText) {
    for (const char* bad : {"E1, R1", "[]", "[E1,,E2]", "", "[E1", "E1]", "[ ]"})
        EXPECT_THROW(path_from_text(bad), std::invalid_argument) << bad;
}

TEST(AggExportTest, ExportCarriesNodesEdgesAndProvenance) {
    const auto agg = build_agg(make_gap_model(), "E1", 9, AggVariant::Revised);
    const json j = agg_to_json(agg);
    EXPECT_EQ(j.at("perspective"), "E1");
    EXPECT_EQ(j.at("hop_bound"), 9u);
    EXPECT_EQ(j.at("variant"), "revised");
    EXPECT_EQ(j.at("nodes").size(), 11u);
    EXPECT_EQ(j.at("edges").size(), 9u);
    std::size_t rves = 0, ives = 0;
    bool found = false;
    for (const auto& e : j.at("edges")) {
        if (e.at("kind") == "ive") {
            ++ives;
            // Every checked intersection edge carries a reloadable witness.
            ASSERT_TRUE(e.contains("witness"));
            const auto sk =
                skeleton_from_json(make_gap_schema(), e.at("witness").at("skeleton"));
            EXPECT_TRUE(validate_skeleton(make_gap_schema(), sk).empty());
            continue;
        }
        ++rves;
        if (e.at("cause") != variable_to_json({gap_p(), "X"})) continue;
        found = true;
        EXPECT_EQ(e.at("effect"), variable_to_json({gap_q(), "Y"}));
        ASSERT_EQ(e.at("provenance").size(), 1u);
        EXPECT_EQ(e.at("provenance")[0].at("dependency"), 0u);
        EXPECT_EQ(e.at("provenance")[0].at("pivot"), 6u);
    }
    EXPECT_EQ(rves, 3u);
    EXPECT_EQ(ives, 6u);
    EXPECT_TRUE(found);
}

TEST(AggExportTest, UncheckedVariantOmitsWitnesses) {
    const auto agg = build_agg(make_contrast_model(), "B", 11, AggVariant::Original);
    const json j = agg_to_json(agg);
    std::size_t ives = 0;
    for (const auto& e : j.at("edges"))
        if (e.at("kind") == "ive") {
            ++ives;
            EXPECT_FALSE(e.contains("witness"));
        }
    EXPECT_EQ(ives, 2u);
}

TEST(AggExportTest, DotTextIsDeterministic) {
    const auto agg = build_agg(make_devorg_model(), "Emp", 5, AggVariant::Revised);
    const auto dot = agg_to_dot(agg);
    EXPECT_EQ(dot, agg_to_dot(agg));
    EXPECT_NE(dot.find("digraph agg {"), std::string::npos);
    EXPECT_NE(dot.find("\"[Emp].competence\" -> \"[Emp].salary\";"), std::string::npos);
    std::size_t arrows = 0;
    for (auto pos = dot.find(" -> "); pos != std::string::npos; pos = dot.find(" -> ", pos + 1))
        ++arrows;
    EXPECT_EQ(arrows, agg.edges().size());
}

TEST(VerdictExportTest, WitnessVerdictInlinesTheSkeleton) {
    const Rcm m = make_devorg_model();
    const CiQuery q{"Emp", {{{"Emp"}, "competence"}}, {{{"Emp"}, "salary"}}, {}};
    const auto verdict = relational_dsep_oracle(m, q, 1);
    ASSERT_FALSE(verdict.separated_within_bound);
    const json j = verdict_to_json(verdict);
    EXPECT_FALSE(j.at("separated_within_bound").get<bool>());
    EXPECT_EQ(j.at("bound"), 1u);
    ASSERT_TRUE(j.contains("witness"));
    const auto sk = skeleton_from_json(m.schema, j.at("witness").at("skeleton"));
    EXPECT_TRUE(validate_skeleton(m.schema, sk).empty());
    EXPECT_GE(j.at("witness").at("trail").size(), 2u);
}

TEST(VerdictExportTest, SeparatedVerdictOmitsTheWitness) {
    const Rcm m = make_devorg_model();
    const CiQuery q{
        "Emp", {{{"Emp"}, "competence"}}, {{{"Emp", "Dev", "Prod", "Dev", "Emp"}, "salary"}}, {}};
    const auto verdict = relational_dsep_oracle(m, q, 2);
    ASSERT_TRUE(verdict.separated_within_bound);
    const json j = verdict_to_json(verdict);
    EXPECT_TRUE(j.at("separated_within_bound").get<bool>());
    EXPECT_FALSE(j.contains("witness"));
    EXPECT_GT(j.at("skeletons_checked").get<std::size_t>(), 0u);
}

TEST(FileHelpersTest, ModelAndQueryFilesRoundTripThroughDisk) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "rcmkit_io_test";
    fs::create_directories(dir);
    const auto model_path = (dir / "model.json").string();
    const auto query_path = (dir / "query.json").string();
    write_text_file(model_path, model_to_json(make_gap_model()).dump(2));
    const CiQuery q{"E1", {{gap_p(), "X"}}, {{gap_sp(), "Z"}}, {{gap_q(), "Y"}}};
    write_text_file(query_path, query_to_json(q).dump(2));
    const Rcm m = load_model_file(model_path);
    EXPECT_TRUE(validate_model(m).empty());
    EXPECT_EQ(m.dependencies.size(), 2u);
    const CiQuery back = load_query_file(query_path);
    EXPECT_NO_THROW(check_query(m.schema, back));
    EXPECT_EQ(back.w.front().attr, "Y");
}

TEST(FileHelpersTest, MissingFileThrows) {
    EXPECT_THROW(load_model_file("/nonexistent/rcmkit.json"), std::runtime_error);
}

}  // namespace
