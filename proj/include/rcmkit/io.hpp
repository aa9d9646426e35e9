#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <rcmkit/dsep.hpp>

namespace rcmkit {

using json = nlohmann::json;

inline Card card_from_text(const std::string& t) {
    if (t == "one") return Card::One;
    if (t == "many") return Card::Many;
    throw std::invalid_argument("cardinality must be \"one\" or \"many\", got '" + t + "'");
}

// Schema file: {entities: [name], relationships: {name: {classes, cards}},
// attributes: {class: [attr]}}, with cards positionally aligned to classes.
inline json schema_to_json(const RelationalSchema& s) {
    json j;
    j["entities"] = s.entity_classes();
    j["relationships"] = json::object();
    for (const auto& [name, roles] : s.relationship_classes()) {
        json cards = json::array();
        for (const auto& role : roles) cards.push_back(to_string(s.card(name, role)));
        j["relationships"][name] = {{"classes", roles}, {"cards", std::move(cards)}};
    }
    j["attributes"] = json::object();
    for (const auto& [cls, attrs] : s.attributes()) j["attributes"][cls] = attrs;
    return j;
}

inline RelationalSchema schema_from_json(const json& j) {
    RelationalSchema s;
    for (const auto& e : j.at("entities")) s.add_entity(e.get<std::string>());
    for (const auto& [name, body] : j.at("relationships").items()) {
        std::vector<Card> cards;
        for (const auto& c : body.at("cards")) cards.push_back(card_from_text(c.get<std::string>()));
        s.add_relationship(name, body.at("classes").get<std::vector<std::string>>(),
                           std::move(cards));
    }
    for (const auto& [cls, attrs] : j.at("attributes").items())
        for (const auto& a : attrs) s.add_attribute(cls, a.get<std::string>());
    return s;
}

// Model file: the schema fields plus
// dependencies: [{cause_path, cause_attr, effect_attr}]; the effect base is
// implied by the cause path's first class.
inline json model_to_json(const Rcm& m) {
    json j = schema_to_json(m.schema);
    j["dependencies"] = json::array();
    for (const auto& d : m.dependencies)
        j["dependencies"].push_back({{"cause_path", d.cause.path},
                                     {"cause_attr", d.cause.attr},
                                     {"effect_attr", d.effect.attr}});
    return j;
}

inline Rcm model_from_json(const json& j) {
    Rcm m{schema_from_json(j), {}};
    for (const auto& d : j.at("dependencies"))
        m.dependencies.push_back(make_dependency(d.at("cause_path").get<Path>(),
                                                 d.at("cause_attr").get<std::string>(),
                                                 d.at("effect_attr").get<std::string>()));
    return m;
}

// Skeleton file: {items: {class: [id]}, links: [{rel: id, entities: [id]}]}
// with the entity list positionally matching the relationship's role order.
inline json skeleton_to_json(const RelationalSkeleton& sk) {
    json j;
    j["items"] = json::object();
    for (const auto& [cls, ids] : sk.items_by_class()) j["items"][cls] = ids;
    auto links = sk.links();
    std::sort(links.begin(), links.end(),
              [](const SkeletonLink& a, const SkeletonLink& b) { return a.rel < b.rel; });
    j["links"] = json::array();
    for (const auto& l : links) j["links"].push_back({{"rel", l.rel}, {"entities", l.entities}});
    return j;
}

inline RelationalSkeleton skeleton_from_json(const RelationalSchema& s, const json& j) {
    RelationalSkeleton sk;
    std::map<std::string, std::string> pending;  // relationship item id -> class
    for (const auto& [cls, ids] : j.at("items").items()) {
        if (s.is_entity(cls)) {
            for (const auto& id : ids) sk.add_entity_item(cls, id.get<std::string>());
        } else if (s.is_relationship(cls)) {
            for (const auto& id : ids) pending[id.get<std::string>()] = cls;
        } else {
            throw std::invalid_argument("unknown item class '" + cls + "'");
        }
    }
    for (const auto& l : j.at("links")) {
        const auto id = l.at("rel").get<std::string>();
        auto it = pending.find(id);
        if (it == pending.end())
            throw std::invalid_argument(sk.has_item(id)
                                            ? "relationship item '" + id + "' has two link rows"
                                            : "link row names undeclared item '" + id + "'");
        sk.add_relationship_item(it->second, id, l.at("entities").get<std::vector<std::string>>());
        pending.erase(it);
    }
    if (!pending.empty())
        throw std::invalid_argument("relationship item '" + pending.begin()->first +
                                    "' has no link row");
    return sk;
}

inline json variable_to_json(const RelationalVariable& v) {
    return {{"path", v.path}, {"attr", v.attr}};
}

inline RelationalVariable variable_from_json(const json& j) {
    return {j.at("path").get<Path>(), j.at("attr").get<std::string>()};
}

// Query file: {perspective, u: [variable], v: [variable], w: [variable]}.
inline json query_to_json(const CiQuery& q) {
    json j;
    j["perspective"] = q.perspective;
    for (auto [name, side] : {std::pair{"u", &q.u}, std::pair{"v", &q.v}, std::pair{"w", &q.w}}) {
        j[name] = json::array();
        for (const auto& var : *side) j[name].push_back(variable_to_json(var));
    }
    return j;
}

inline CiQuery query_from_json(const json& j) {
    CiQuery q;
    q.perspective = j.at("perspective").get<std::string>();
    for (auto [name, side] : {std::pair{"u", &q.u}, std::pair{"v", &q.v}, std::pair{"w", &q.w}})
        for (const auto& var : j.at(name)) side->push_back(variable_from_json(var));
    return q;
}

// Paths on the command line are written like "[E1, R1, E2]".
inline Path path_from_text(const std::string& text) {
    const auto fail = [&text]() -> Path {
        throw std::invalid_argument("path text must look like [E1, R1, E2], got '" + text + "'");
    };
    const auto trim = [](std::string t) {
        const auto a = t.find_first_not_of(" \t");
        const auto b = t.find_last_not_of(" \t");
        return a == std::string::npos ? std::string{} : t.substr(a, b - a + 1);
    };
    const std::string outer = trim(text);
    if (outer.size() < 2 || outer.front() != '[' || outer.back() != ']') return fail();
    Path p;
    std::istringstream inner(outer.substr(1, outer.size() - 2));
    for (std::string tok; std::getline(inner, tok, ',');) {
        tok = trim(tok);
        if (tok.empty()) return fail();
        p.push_back(tok);
    }
    if (p.empty()) return fail();
    return p;
}

inline json agg_node_to_json(const AggNode& n) {
    if (!n.is_iv())
        return {{"kind", "rv"}, {"path", n.members[0].path}, {"attr", n.members[0].attr}};
    return {{"kind", "iv"},
            {"members", json::array({variable_to_json(n.members[0]),
                                     variable_to_json(n.members[1])})}};
}

inline json co_intersection_witness_to_json(const CoIntersectionWitness& w) {
    return {{"skeleton", skeleton_to_json(w.skeleton)},
            {"base", w.base},
            {"mid", w.mid},
            {"item", w.item}};
}

// Abstract-ground-graph export: the node list, then every edge with its
// provenance (dependency and pivot for lifted edges; the joint-realization
// witness skeleton for checked intersection edges).
inline json agg_to_json(const Agg& g) {
    json j;
    j["perspective"] = g.perspective;
    j["hop_bound"] = g.hop_bound;
    j["variant"] = to_string(g.variant);
    j["nodes"] = json::array();
    for (const auto& n : g.nodes()) j["nodes"].push_back(agg_node_to_json(n));
    j["edges"] = json::array();
    for (const auto& e : g.rves) {
        json prov = json::array();
        for (const auto& pr : e.provenance)
            prov.push_back({{"dependency", pr.dep_index}, {"pivot", pr.pivot}});
        j["edges"].push_back({{"kind", "rve"},
                              {"cause", variable_to_json(e.cause)},
                              {"effect", variable_to_json(e.effect)},
                              {"provenance", std::move(prov)}});
    }
    for (const auto& e : g.ives) {
        json edge = {{"kind", "ive"},
                     {"from", agg_node_to_json(e.from)},
                     {"to", agg_node_to_json(e.to)},
                     {"member_cause", variable_to_json(e.member_cause)},
                     {"member_effect", variable_to_json(e.member_effect)},
                     {"dependency", e.dep_index},
                     {"effect_side", e.effect_side}};
        if (e.witness) edge["witness"] = co_intersection_witness_to_json(*e.witness);
        j["edges"].push_back(std::move(edge));
    }
    return j;
}

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// Plain dot-language text for visualization tooling; node and edge order is
// the graph's canonical sorted order, so the text is deterministic.
inline std::string agg_to_dot(const Agg& g) {
    std::ostringstream os;
    os << "digraph agg {\n  rankdir=LR;\n";
    for (const auto& n : g.nodes())
        os << "  " << dot_quote(to_string(n)) << " [shape=" << (n.is_iv() ? "box" : "ellipse")
           << "];\n";
    for (const auto& [from, to] : g.edges())
        os << "  " << dot_quote(to_string(from)) << " -> " << dot_quote(to_string(to)) << ";\n";
    os << "}\n";
    return os.str();
}

// Ground-oracle verdict with any connection witness inlined in the skeleton
// file format, so the witness can be reloaded and replayed.
inline json verdict_to_json(const OracleVerdict& v) {
    json j;
    j["separated_within_bound"] = v.separated_within_bound;
    j["skeletons_checked"] = v.skeletons_checked;
    j["bound"] = v.bound;
    if (v.witness) {
        json trail = json::array();
        for (const auto& gv : v.witness->trail)
            trail.push_back({{"item", gv.item}, {"attr", gv.attr}});
        j["witness"] = {{"skeleton", skeleton_to_json(v.witness->skeleton)},
                        {"base", v.witness->base},
                        {"trail", std::move(trail)}};
    }
    return j;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("cannot write file '" + path + "'");
}

inline Rcm load_model_file(const std::string& path) {
    return model_from_json(json::parse(read_text_file(path)));
}

inline CiQuery load_query_file(const std::string& path) {
    return query_from_json(json::parse(read_text_file(path)));
}

}  // namespace rcmkit
