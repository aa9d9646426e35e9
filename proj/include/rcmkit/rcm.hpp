#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <rcmkit/schema.hpp>
#include <rcmkit/skeleton.hpp>

namespace rcmkit {

struct RelationalDependency {
    RelationalVariable cause;
    RelationalVariable effect;

    auto operator<=>(const RelationalDependency&) const = default;
};

// Canonical dependency: the effect sits on the single-class path at the
// cause path's first class.
inline RelationalDependency make_dependency(Path cause_path, std::string cause_attr,
                                            std::string effect_attr) {
    if (cause_path.empty())
        throw std::invalid_argument("dependency cause path must be non-empty");
    Path effect_path{cause_path.front()};
    return {{std::move(cause_path), std::move(cause_attr)},
            {std::move(effect_path), std::move(effect_attr)}};
}

inline std::string to_string(const RelationalDependency& d) {
    return to_string(d.cause) + " -> " + to_string(d.effect);
}

struct Rcm {
    RelationalSchema schema;
    std::vector<RelationalDependency> dependencies;
};

// Collects every violated model invariant; an empty result means valid.
inline std::vector<std::string> validate_model(const Rcm& m) {
    std::vector<std::string> out = validate_schema(m.schema);
    std::set<std::pair<std::string, std::string>> attr_edges;
    for (const auto& d : m.dependencies) {
        const std::string label = to_string(d);
        if (auto v = path_violation(m.schema, d.cause.path)) {
            out.push_back("dependency " + label + ": invalid cause path: " + *v);
            continue;
        }
        if (d.effect.path.size() != 1)
            out.push_back("dependency " + label + ": effect is not canonical");
        else if (d.effect.path.front() != d.cause.path.front())
            out.push_back("dependency " + label + ": cause and effect base classes differ");
        const auto term_attrs = m.schema.attrs_of(d.cause.path.back());
        if (std::find(term_attrs.begin(), term_attrs.end(), d.cause.attr) == term_attrs.end())
            out.push_back("dependency " + label + ": class '" + d.cause.path.back() +
                          "' has no attribute '" + d.cause.attr + "'");
        if (!d.effect.path.empty()) {
            const auto base_attrs = m.schema.attrs_of(d.effect.path.front());
            if (std::find(base_attrs.begin(), base_attrs.end(), d.effect.attr) == base_attrs.end())
                out.push_back("dependency " + label + ": class '" + d.effect.path.front() +
                              "' has no attribute '" + d.effect.attr + "'");
        }
        attr_edges.emplace(d.cause.attr, d.effect.attr);
    }
    // Attribute classes must be partially orderable by the dependencies.
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [from, to] : attr_edges) succ[from].push_back(to);
    std::map<std::string, int> state;
    std::vector<std::string> cycle_at;
    auto dfs = [&](auto&& self, const std::string& a) -> bool {
        state[a] = 1;
        for (const auto& b : succ[a]) {
            if (state[b] == 1) return true;
            if (state[b] == 0 && self(self, b)) return true;
        }
        state[a] = 2;
        return false;
    };
    for (const auto& [from, tos] : succ)
        if (state[from] == 0 && dfs(dfs, from)) {
            out.push_back("attribute-class dependency cycle involving '" + from + "'");
            break;
        }
    return out;
}

inline void check_valid(const Rcm& m) {
    auto v = validate_model(m);
    if (v.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& e : v) msg += "\n  " + e;
    throw std::invalid_argument(msg);
}

inline std::size_t max_cause_path_length(const Rcm& m) {
    std::size_t n = 0;
    for (const auto& d : m.dependencies) n = std::max(n, d.cause.path.size());
    return n;
}

class ModelInstantiationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GroundVertex {
    std::string item;
    std::string attr;

    auto operator<=>(const GroundVertex&) const = default;
};

inline std::string to_string(const GroundVertex& v) { return v.item + "." + v.attr; }

struct GroundGraph {
    std::vector<GroundVertex> vertices;  // sorted
    std::vector<std::vector<std::size_t>> children;
    std::vector<std::vector<std::size_t>> parents;
    std::set<std::pair<std::size_t, std::size_t>> edges;

    std::size_t index_of(const GroundVertex& v) const {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
        if (it == vertices.end() || *it != v)
            throw std::invalid_argument("no ground vertex " + to_string(v));
        return static_cast<std::size_t>(it - vertices.begin());
    }

    bool has_vertex(const GroundVertex& v) const {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
        return it != vertices.end() && *it == v;
    }

    bool has_edge(const GroundVertex& from, const GroundVertex& to) const {
        return edges.count({index_of(from), index_of(to)}) != 0;
    }
};

// Instantiates the model on a skeleton: one vertex per item-attribute pair,
// and an edge i_c.X -> i_e.Y exactly when some dependency with cause
// attribute X and effect attribute Y puts i_c in the cause path's terminal
// set evaluated from the effect item i_e.
inline GroundGraph ground_graph(const Rcm& m, const RelationalSkeleton& sk) {
    {
        auto v = validate_skeleton(m.schema, sk);
        if (!v.empty()) {
            std::string msg = "skeleton does not instantiate the schema:";
            for (const auto& e : v) msg += "\n  " + e;
            throw std::domain_error(msg);
        }
    }
    GroundGraph g;
    for (const auto& [cls, ids] : sk.items_by_class())
        for (const auto& id : ids)
            for (const auto& attr : m.schema.attrs_of(cls)) g.vertices.push_back({id, attr});
    std::sort(g.vertices.begin(), g.vertices.end());
    g.children.resize(g.vertices.size());
    g.parents.resize(g.vertices.size());
    for (const auto& d : m.dependencies) {
        if (d.effect.path.size() != 1 || d.effect.path.front() != d.cause.path.front())
            throw std::domain_error("dependency " + to_string(d) + " is not canonical");
        const auto& base_cls = d.cause.path.front();
        const auto term_attrs = m.schema.attrs_of(d.cause.path.back());
        if (std::find(term_attrs.begin(), term_attrs.end(), d.cause.attr) == term_attrs.end())
            throw std::domain_error("dependency " + to_string(d) + ": class '" +
                                    d.cause.path.back() + "' has no attribute '" + d.cause.attr +
                                    "'");
        const auto base_attrs = m.schema.attrs_of(base_cls);
        if (std::find(base_attrs.begin(), base_attrs.end(), d.effect.attr) == base_attrs.end())
            throw std::domain_error("dependency " + to_string(d) + ": class '" + base_cls +
                                    "' has no attribute '" + d.effect.attr + "'");
        for (const auto& effect_item : sk.items(base_cls)) {
            const std::size_t to = g.index_of({effect_item, d.effect.attr});
            for (const auto& cause_item : terminal_set(m.schema, sk, d.cause.path, effect_item)) {
                const std::size_t from = g.index_of({cause_item, d.cause.attr});
                if (g.edges.emplace(from, to).second) {
                    g.children[from].push_back(to);
                    g.parents[to].push_back(from);
                }
            }
        }
    }
    for (auto& v : g.children) std::sort(v.begin(), v.end());
    for (auto& v : g.parents) std::sort(v.begin(), v.end());
    // Kahn check: the instantiation must be a DAG.
    std::vector<std::size_t> indeg(g.vertices.size(), 0);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) indeg[i] = g.parents[i].size();
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < indeg.size(); ++i)
        if (indeg[i] == 0) ready.push_back(i);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto i = ready.back();
        ready.pop_back();
        ++seen;
        for (auto c : g.children[i])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (seen != g.vertices.size())
        throw ModelInstantiationError(
            "ground graph contains a directed cycle; the model cannot be instantiated on this "
            "skeleton");
    return g;
}

}  // namespace rcmkit
