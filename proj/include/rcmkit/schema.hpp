#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcmkit {

enum class Card { One, Many };

inline const char* to_string(Card c) { return c == Card::One ? "one" : "many"; }

// A relational path is an alternating sequence of entity and relationship
// class names; positions are 1-based in all documentation and diagnostics.
using Path = std::vector<std::string>;

inline std::string path_to_string(const Path& p) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) os << ", ";
        os << p[i];
    }
    os << ']';
    return os.str();
}

struct RelationalVariable {
    Path path;
    std::string attr;

    auto operator<=>(const RelationalVariable&) const = default;
};

inline std::string to_string(const RelationalVariable& v) {
    return path_to_string(v.path) + "." + v.attr;
}

class RelationalSchema {
public:
    void add_entity(const std::string& name) { entities_.insert(name); }

    void add_relationship(const std::string& name,
                          std::vector<std::string> roles,
                          std::vector<Card> cards) {
        if (roles.size() != cards.size())
            throw std::invalid_argument("relationship '" + name +
                                        "': one cardinality per role is required");
        relationships_[name] = std::move(roles);
        const auto& rs = relationships_[name];
        for (std::size_t i = 0; i < rs.size(); ++i) cards_[{name, rs[i]}] = cards[i];
    }

    void add_attribute(const std::string& item_class, const std::string& attr) {
        attributes_[item_class].push_back(attr);
    }

    bool is_entity(const std::string& c) const { return entities_.count(c) != 0; }
    bool is_relationship(const std::string& c) const { return relationships_.count(c) != 0; }
    bool has_class(const std::string& c) const { return is_entity(c) || is_relationship(c); }

    const std::set<std::string>& entity_classes() const { return entities_; }
    const std::map<std::string, std::vector<std::string>>& relationship_classes() const {
        return relationships_;
    }

    const std::vector<std::string>& roles(const std::string& rel) const {
        auto it = relationships_.find(rel);
        if (it == relationships_.end())
            throw std::invalid_argument("unknown relationship class '" + rel + "'");
        return it->second;
    }

    bool has_role(const std::string& rel, const std::string& entity) const {
        auto it = relationships_.find(rel);
        if (it == relationships_.end()) return false;
        const auto& rs = it->second;
        return std::find(rs.begin(), rs.end(), entity) != rs.end();
    }

    std::size_t role_index(const std::string& rel, const std::string& entity) const {
        const auto& rs = roles(rel);
        auto it = std::find(rs.begin(), rs.end(), entity);
        if (it == rs.end())
            throw std::invalid_argument("entity class '" + entity +
                                        "' has no role in relationship class '" + rel + "'");
        return static_cast<std::size_t>(it - rs.begin());
    }

    Card card(const std::string& rel, const std::string& entity) const {
        auto it = cards_.find({rel, entity});
        if (it == cards_.end())
            throw std::invalid_argument("cardinality of ('" + rel + "', '" + entity +
                                        "') is not defined");
        return it->second;
    }

    std::vector<std::string> attrs_of(const std::string& item_class) const {
        auto it = attributes_.find(item_class);
        if (it == attributes_.end()) return {};
        return it->second;
    }

    const std::map<std::string, std::vector<std::string>>& attributes() const {
        return attributes_;
    }

    // Entity and relationship class names, sorted.
    std::vector<std::string> item_classes() const {
        std::vector<std::string> out(entities_.begin(), entities_.end());
        for (const auto& [name, roles] : relationships_) out.push_back(name);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::string> relationships_with_role(const std::string& entity) const {
        std::vector<std::string> out;
        for (const auto& [name, roles] : relationships_)
            if (std::find(roles.begin(), roles.end(), entity) != roles.end())
                out.push_back(name);
        return out;
    }

private:
    std::set<std::string> entities_;
    std::map<std::string, std::vector<std::string>> relationships_;
    std::map<std::string, std::vector<std::string>> attributes_;
    std::map<std::pair<std::string, std::string>, Card> cards_;
};

// Collects every violated schema invariant; an empty result means valid.
inline std::vector<std::string> validate_schema(const RelationalSchema& s) {
    std::vector<std::string> out;
    for (const auto& [name, roles] : s.relationship_classes()) {
        if (s.is_entity(name))
            out.push_back("class '" + name + "' is declared both entity and relationship");
        if (roles.size() < 2)
            out.push_back("relationship class '" + name +
                          "' must reference at least two entity classes");
        std::set<std::string> seen;
        for (const auto& r : roles) {
            if (!s.is_entity(r))
                out.push_back("relationship class '" + name + "' references unknown entity class '" +
                              r + "'");
            if (!seen.insert(r).second)
                out.push_back("relationship class '" + name + "' references entity class '" + r +
                              "' more than once");
        }
    }
    std::map<std::string, std::string> attr_owner;
    for (const auto& [cls, attrs] : s.attributes()) {
        if (!s.has_class(cls))
            out.push_back("attributes declared for unknown item class '" + cls + "'");
        std::set<std::string> local;
        for (const auto& a : attrs) {
            if (!local.insert(a).second)
                out.push_back("attribute '" + a + "' declared twice on item class '" + cls + "'");
            auto [it, fresh] = attr_owner.emplace(a, cls);
            if (!fresh && it->second != cls)
                out.push_back("attribute name '" + a + "' is shared by item classes '" +
                              it->second + "' and '" + cls + "'");
        }
    }
    return out;
}

inline void check_valid(const RelationalSchema& s) {
    auto v = validate_schema(s);
    if (v.empty()) return;
    std::string msg = "invalid schema:";
    for (const auto& m : v) msg += "\n  " + m;
    throw std::invalid_argument(msg);
}

// Names the first violated path rule in a left-to-right sweep, or nullopt.
inline std::optional<std::string> path_violation(const RelationalSchema& s, const Path& p) {
    if (p.empty()) return "path must be non-empty";
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!s.has_class(p[i]))
            return "position " + std::to_string(i + 1) + ": unknown item class '" + p[i] + "'";
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const auto& a = p[i];
        const auto& b = p[i + 1];
        const bool ea = s.is_entity(a);
        const bool eb = s.is_entity(b);
        if (ea == eb)
            return "positions " + std::to_string(i + 1) + "-" + std::to_string(i + 2) +
                   ": '" + a + "' and '" + b + "' do not alternate between entity and relationship classes";
        const auto& rel = ea ? b : a;
        const auto& ent = ea ? a : b;
        if (!s.has_role(rel, ent))
            return "positions " + std::to_string(i + 1) + "-" + std::to_string(i + 2) +
                   ": entity class '" + ent + "' has no role in relationship class '" + rel + "'";
    }
    for (std::size_t i = 0; i + 2 < p.size(); ++i) {
        if (s.is_entity(p[i]) && p[i] == p[i + 2])
            return "positions " + std::to_string(i + 1) + "-" + std::to_string(i + 3) +
                   ": entity class '" + p[i] + "' repeats across relationship class '" + p[i + 1] +
                   "'";
        if (s.is_relationship(p[i]) && p[i] == p[i + 2] && s.card(p[i], p[i + 1]) != Card::Many)
            return "positions " + std::to_string(i + 1) + "-" + std::to_string(i + 3) +
                   ": revisiting relationship class '" + p[i] + "' requires cardinality many at '" +
                   p[i + 1] + "'";
    }
    return std::nullopt;
}

inline bool is_valid_path(const RelationalSchema& s, const Path& p) {
    return !path_violation(s, p).has_value();
}

inline void require_valid_path(const RelationalSchema& s, const Path& p) {
    if (auto v = path_violation(s, p))
        throw std::invalid_argument("invalid path " + path_to_string(p) + ": " + *v);
}

inline Path reversed(Path p) {
    std::reverse(p.begin(), p.end());
    return p;
}

namespace detail {

// Classes that may follow the last element of a partial valid path.
inline std::vector<std::string> path_successors(const RelationalSchema& s, const Path& p) {
    std::vector<std::string> out;
    const auto& cur = p.back();
    const std::string* prev = p.size() >= 2 ? &p[p.size() - 2] : nullptr;
    if (s.is_entity(cur)) {
        for (const auto& rel : s.relationships_with_role(cur)) {
            if (prev && *prev == rel && s.card(rel, cur) != Card::Many) continue;
            out.push_back(rel);
        }
    } else {
        for (const auto& ent : s.roles(cur)) {
            if (prev && *prev == ent) continue;
            out.push_back(ent);
        }
        std::sort(out.begin(), out.end());
    }
    return out;
}

}  // namespace detail

// All valid paths that start at `base`, of length at most `max_len`,
// in lexicographic order.
inline std::vector<Path> enumerate_paths(const RelationalSchema& s, const std::string& base,
                                         std::size_t max_len) {
    if (!s.has_class(base))
        throw std::invalid_argument("unknown item class '" + base + "'");
    std::vector<Path> out;
    if (max_len == 0) return out;
    Path cur{base};
    auto dfs = [&](auto&& self) -> void {
        out.push_back(cur);
        if (cur.size() == max_len) return;
        for (const auto& nxt : detail::path_successors(s, cur)) {
            cur.push_back(nxt);
            self(self);
            cur.pop_back();
        }
    };
    dfs(dfs);
    return out;
}

// 1-based positions i with a^{1:i} == b^{1:i}; empty when first classes differ.
inline std::vector<std::size_t> pivots(const Path& a, const Path& b) {
    std::vector<std::size_t> out;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n && a[i] == b[i]; ++i) out.push_back(i + 1);
    return out;
}

struct Extension {
    std::size_t pivot;
    Path path;
};

// All valid concatenations q^{1:|q|-i} ++ r^{i:} over i in pivots(reverse(q), r),
// deduplicated keeping the smallest pivot, ordered by pivot.
inline std::vector<Extension> extend(const RelationalSchema& s, const Path& q, const Path& r) {
    require_valid_path(s, q);
    require_valid_path(s, r);
    if (q.back() != r.front())
        throw std::domain_error("extend requires terminal class of " + path_to_string(q) +
                                " to equal first class of " + path_to_string(r));
    std::vector<Extension> out;
    std::set<Path> seen;
    for (std::size_t i : pivots(reversed(q), r)) {
        Path cand(q.begin(), q.end() - static_cast<std::ptrdiff_t>(i));
        cand.insert(cand.end(), r.begin() + static_cast<std::ptrdiff_t>(i - 1), r.end());
        if (!is_valid_path(s, cand)) continue;
        if (!seen.insert(cand).second) continue;
        out.push_back({i, std::move(cand)});
    }
    return out;
}

// Longest length l such that the l-prefixes coincide and every ground
// traversal of the shared prefix is forced through single items: the prefix
// may only grow through a relationship class, or through an entity class
// whose next relationship class has cardinality one at it.
inline std::size_t llrsp(const RelationalSchema& s, const Path& p, const Path& q) {
    require_valid_path(s, p);
    require_valid_path(s, q);
    if (p.front() != q.front())
        throw std::domain_error("llrsp requires a common perspective, got " +
                                path_to_string(p) + " and " + path_to_string(q));
    std::size_t l = 1;
    const std::size_t n = std::min(p.size(), q.size());
    while (l < n && p[l] == q[l]) {
        const auto& here = p[l - 1];
        if (s.is_entity(here) && s.card(p[l], here) != Card::One) break;
        ++l;
    }
    return l;
}

inline bool is_prefix_of(const Path& a, const Path& b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Decides whether two distinct paths can reach a common item from a common
// base without either containing the other: requires equal perspectives and
// terminal classes, and the forced shared prefixes of the paths and of their
// reverses must fit inside the shorter path.
inline bool intersectable(const RelationalSchema& s, const Path& p, const Path& q) {
    require_valid_path(s, p);
    require_valid_path(s, q);
    if (p == q)
        throw std::invalid_argument("intersectable requires two distinct paths, got " +
                                    path_to_string(p) + " twice");
    if (p.front() != q.front()) return false;
    if (p.back() != q.back()) return false;
    if (is_prefix_of(p, q) || is_prefix_of(q, p)) return false;
    const std::size_t sum = llrsp(s, p, q) + llrsp(s, reversed(p), reversed(q));
    return sum <= std::min(p.size(), q.size());
}

}  // namespace rcmkit
