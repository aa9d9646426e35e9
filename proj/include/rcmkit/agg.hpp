#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <rcmkit/rcm.hpp>
#include <rcmkit/witness.hpp>

namespace rcmkit {

enum class AggVariant { Original, Revised };

inline std::string to_string(AggVariant v) {
    return v == AggVariant::Original ? "original" : "revised";
}

// Node of an abstract ground graph: a relational variable, or an
// intersection variable formed by an unordered pair of same-attribute
// intersectable relational variables.
struct AggNode {
    std::vector<RelationalVariable> members;

    static AggNode rv(RelationalVariable v) { return {{std::move(v)}}; }
    static AggNode iv(RelationalVariable a, RelationalVariable b) {
        if (b < a) std::swap(a, b);
        return {{std::move(a), std::move(b)}};
    }
    bool is_iv() const { return members.size() == 2; }
    bool has_member(const RelationalVariable& v) const {
        return std::find(members.begin(), members.end(), v) != members.end();
    }
    auto operator<=>(const AggNode&) const = default;
};

inline std::string to_string(const AggNode& n) {
    std::string out = to_string(n.members.front());
    for (std::size_t i = 1; i < n.members.size(); ++i) out += " ∩ " + to_string(n.members[i]);
    return out;
}

struct RveProvenance {
    std::size_t dep_index;
    std::size_t pivot;
    auto operator<=>(const RveProvenance&) const = default;
};

struct Rve {
    RelationalVariable cause;
    RelationalVariable effect;
    std::vector<RveProvenance> provenance;  // every (dependency, pivot) deriving it

    auto operator<=>(const Rve&) const = default;
};

struct Ive {
    AggNode from;
    AggNode to;
    RelationalVariable member_cause;   // cause of the member edge that induced it
    RelationalVariable member_effect;  // effect of that member edge
    std::size_t dep_index;             // dependency backing the member edge
    bool effect_side;                  // true when the intersection sits on the effect
    // Witness of the co-intersectability check; absent under ORIGINAL,
    // which adds the edge without checking.
    std::optional<CoIntersectionWitness> witness;
};

struct Agg {
    RelationalSchema schema;
    std::string perspective;
    std::size_t hop_bound = 0;
    AggVariant variant = AggVariant::Revised;
    std::vector<RelationalVariable> rvs;  // sorted
    std::vector<AggNode> ivs;             // sorted
    std::vector<Rve> rves;                // sorted by (cause, effect)
    std::vector<Ive> ives;                // sorted by (from, to)

    bool has_rv(const RelationalVariable& v) const {
        return std::binary_search(rvs.begin(), rvs.end(), v);
    }
    std::vector<AggNode> nodes() const {
        std::vector<AggNode> out;
        out.reserve(rvs.size() + ivs.size());
        for (const auto& v : rvs) out.push_back(AggNode::rv(v));
        out.insert(out.end(), ivs.begin(), ivs.end());
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<std::pair<AggNode, AggNode>> edges() const {
        std::vector<std::pair<AggNode, AggNode>> out;
        out.reserve(rves.size() + ives.size());
        for (const auto& e : rves) out.emplace_back(AggNode::rv(e.cause), AggNode::rv(e.effect));
        for (const auto& e : ives) out.emplace_back(e.from, e.to);
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Builds the per-perspective abstract ground graph: relational variables up
// to the hop bound, edges lifted from dependencies via path extension,
// intersection variables for intersectable same-attribute pairs, and
// intersection edges gated by co-intersectability under the REVISED variant.
inline Agg build_agg(const Rcm& m, const std::string& perspective, std::size_t hop_bound,
                     AggVariant variant, SearchLimits limits = {}) {
    check_valid(m);
    if (!m.schema.has_class(perspective))
        throw std::invalid_argument("unknown perspective class '" + perspective + "'");
    if (hop_bound < max_cause_path_length(m))
        throw std::invalid_argument(
            "hop bound " + std::to_string(hop_bound) +
            " is below the longest dependency path length " +
            std::to_string(max_cause_path_length(m)));

    Agg agg;
    agg.schema = m.schema;
    agg.perspective = perspective;
    agg.hop_bound = hop_bound;
    agg.variant = variant;

    for (const auto& path : enumerate_paths(m.schema, perspective, hop_bound))
        for (const auto& attr : m.schema.attrs_of(path.back()))
            agg.rvs.push_back({path, attr});
    std::sort(agg.rvs.begin(), agg.rvs.end());

    // Relational-variable edges: one per dependency extension within hops.
    std::map<std::pair<RelationalVariable, RelationalVariable>, std::vector<RveProvenance>>
        rve_prov;
    for (const auto& q : agg.rvs)
        for (std::size_t d = 0; d < m.dependencies.size(); ++d) {
            const auto& dep = m.dependencies[d];
            if (dep.effect.path.front() != q.path.back() || dep.effect.attr != q.attr) continue;
            for (const auto& [pivot, p] : extend(m.schema, q.path, dep.cause.path)) {
                if (p.size() > hop_bound) continue;
                rve_prov[{{p, dep.cause.attr}, q}].push_back({d, pivot});
            }
        }
    for (auto& [key, prov] : rve_prov) {
        std::sort(prov.begin(), prov.end());
        agg.rves.push_back({key.first, key.second, std::move(prov)});
    }

    // Intersection variables: unordered intersectable same-attribute pairs.
    for (std::size_t i = 0; i < agg.rvs.size(); ++i)
        for (std::size_t j = i + 1; j < agg.rvs.size(); ++j) {
            const auto& a = agg.rvs[i];
            const auto& b = agg.rvs[j];
            if (a.attr != b.attr || a.path == b.path) continue;
            if (intersectable(m.schema, a.path, b.path)) agg.ivs.push_back(AggNode::iv(a, b));
        }
    std::sort(agg.ivs.begin(), agg.ivs.end());

    // Intersection edges. Each member edge P.X -> Q.Y spawns candidates
    // IV(P,P') -> Q.Y and P.X -> IV(Q,Q'); REVISED keeps a candidate only if
    // some backing dependency makes the four-path tuple co-intersectable.
    std::map<std::pair<AggNode, AggNode>, Ive> ive_by_ends;
    auto consider = [&](const AggNode& from, const AggNode& to, const Rve& member,
                        bool effect_side, const RelationalVariable& partner) {
        if (ive_by_ends.count({from, to})) return;
        std::set<std::size_t> deps;
        for (const auto& pr : member.provenance) deps.insert(pr.dep_index);
        for (std::size_t d : deps) {
            const Path& cause_path = m.dependencies[d].cause.path;
            std::optional<CoIntersectionWitness> witness;
            if (variant == AggVariant::Revised) {
                auto res = effect_side
                               ? co_intersectable(m.schema, member.cause.path,
                                                  reversed(cause_path), member.effect.path,
                                                  partner.path, limits)
                               : co_intersectable(m.schema, member.effect.path, cause_path,
                                                  member.cause.path, partner.path, limits);
                if (!res.value) continue;
                witness = std::move(res.witness);
            }
            ive_by_ends.emplace(std::pair{from, to},
                                Ive{from, to, member.cause, member.effect, d, effect_side,
                                    std::move(witness)});
            return;
        }
    };
    for (const auto& member : agg.rves) {
        for (const auto& iv : agg.ivs) {
            if (iv.has_member(member.cause))
                consider(iv, AggNode::rv(member.effect), member, false,
                         iv.members[iv.members[0] == member.cause ? 1 : 0]);
            if (iv.has_member(member.effect))
                consider(AggNode::rv(member.cause), iv, member, true,
                         iv.members[iv.members[0] == member.effect ? 1 : 0]);
        }
    }
    for (auto& [ends, ive] : ive_by_ends) agg.ives.push_back(std::move(ive));
    return agg;
}

// The barred set: the variables themselves plus every intersection variable
// sharing a member with them.
inline std::vector<AggNode> bar(const Agg& agg, const std::vector<RelationalVariable>& vars) {
    std::set<AggNode> out;
    for (const auto& v : vars) {
        if (!agg.has_rv(v))
            throw std::domain_error("variable " + to_string(v) + " is not in the " +
                                    agg.perspective + "-perspective graph");
        out.insert(AggNode::rv(v));
        for (const auto& iv : agg.ivs)
            if (iv.has_member(v)) out.insert(iv);
    }
    return {out.begin(), out.end()};
}

inline bool is_acyclic(const Agg& agg) {
    auto nodes = agg.nodes();
    auto index = [&](const AggNode& n) {
        return static_cast<std::size_t>(
            std::lower_bound(nodes.begin(), nodes.end(), n) - nodes.begin());
    };
    std::vector<std::vector<std::size_t>> children(nodes.size());
    std::vector<std::size_t> indegree(nodes.size(), 0);
    for (const auto& [from, to] : agg.edges()) {
        children[index(from)].push_back(index(to));
        ++indegree[index(to)];
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (indegree[i] == 0) ready.push_back(i);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto n = ready.back();
        ready.pop_back();
        ++seen;
        for (auto c : children[n])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    return seen == nodes.size();
}

}  // namespace rcmkit
