#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <rcmkit/schema.hpp>

namespace rcmkit {

struct SkeletonLink {
    std::string rel;                    // relationship item id
    std::vector<std::string> entities;  // filler item ids, positional per role
};

class RelationalSkeleton {
public:
    void add_entity_item(const std::string& cls, const std::string& id) { add_item(cls, id); }

    void add_relationship_item(const std::string& cls, const std::string& id,
                               std::vector<std::string> fillers) {
        for (const auto& f : fillers)
            if (!has_item(f))
                throw std::invalid_argument("link '" + id + "' references unknown item '" + f +
                                            "'");
        add_item(cls, id);
        for (const auto& f : fillers) {
            adj_[id].insert(f);
            adj_[f].insert(id);
        }
        links_.push_back({id, std::move(fillers)});
    }

    bool has_item(const std::string& id) const { return class_of_.count(id) != 0; }

    const std::string& item_class(const std::string& id) const {
        auto it = class_of_.find(id);
        if (it == class_of_.end())
            throw std::invalid_argument("unknown item '" + id + "'");
        return it->second;
    }

    // Item ids of one class, sorted.
    const std::vector<std::string>& items(const std::string& cls) const {
        static const std::vector<std::string> empty;
        auto it = items_by_class_.find(cls);
        return it == items_by_class_.end() ? empty : it->second;
    }

    const std::map<std::string, std::vector<std::string>>& items_by_class() const {
        return items_by_class_;
    }

    const std::vector<SkeletonLink>& links() const { return links_; }

    const std::set<std::string>& neighbors(const std::string& id) const {
        static const std::set<std::string> empty;
        auto it = adj_.find(id);
        return it == adj_.end() ? empty : it->second;
    }

    std::size_t item_count() const { return class_of_.size(); }

private:
    void add_item(const std::string& cls, const std::string& id) {
        if (!class_of_.emplace(id, cls).second)
            throw std::invalid_argument("duplicate item id '" + id + "'");
        auto& v = items_by_class_[cls];
        v.insert(std::lower_bound(v.begin(), v.end(), id), id);
    }

    std::map<std::string, std::string> class_of_;
    std::map<std::string, std::vector<std::string>> items_by_class_;
    std::vector<SkeletonLink> links_;
    std::map<std::string, std::set<std::string>> adj_;
};

// Collects every violated instance invariant; an empty result means the
// skeleton instantiates the schema.
inline std::vector<std::string> validate_skeleton(const RelationalSchema& s,
                                                  const RelationalSkeleton& sk) {
    std::vector<std::string> out;
    for (const auto& [cls, ids] : sk.items_by_class())
        if (!s.has_class(cls))
            out.push_back("items of unknown class '" + cls + "'");
    std::set<std::string> linked;
    for (const auto& link : sk.links()) {
        linked.insert(link.rel);
        const auto& cls = sk.item_class(link.rel);
        if (!s.is_relationship(cls)) {
            out.push_back("item '" + link.rel + "' of class '" + cls +
                          "' is linked but not a relationship");
            continue;
        }
        const auto& roles = s.roles(cls);
        if (link.entities.size() != roles.size()) {
            out.push_back("link '" + link.rel + "' fills " +
                          std::to_string(link.entities.size()) + " of " +
                          std::to_string(roles.size()) + " roles");
            continue;
        }
        for (std::size_t i = 0; i < roles.size(); ++i)
            if (sk.item_class(link.entities[i]) != roles[i])
                out.push_back("link '" + link.rel + "' role " + std::to_string(i + 1) +
                              " expects class '" + roles[i] + "', got item '" + link.entities[i] +
                              "' of class '" + sk.item_class(link.entities[i]) + "'");
    }
    for (const auto& [cls, ids] : sk.items_by_class())
        if (s.is_relationship(cls))
            for (const auto& id : ids)
                if (!linked.count(id))
                    out.push_back("relationship item '" + id + "' has no link");
    // One-cardinality: an entity item joins at most one instance of the class.
    std::map<std::pair<std::string, std::string>, std::string> seen;
    for (const auto& link : sk.links()) {
        const auto& cls = sk.item_class(link.rel);
        if (!s.is_relationship(cls)) continue;
        const auto& roles = s.roles(cls);
        if (link.entities.size() != roles.size()) continue;
        for (std::size_t i = 0; i < roles.size(); ++i) {
            if (s.card(cls, roles[i]) != Card::One) continue;
            auto [it, fresh] = seen.emplace(std::make_pair(cls, link.entities[i]), link.rel);
            if (!fresh && it->second != link.rel)
                out.push_back("entity item '" + link.entities[i] + "' joins both '" + it->second +
                              "' and '" + link.rel + "' of one-cardinality class '" + cls + "'");
        }
    }
    return out;
}

inline void check_valid(const RelationalSchema& s, const RelationalSkeleton& sk) {
    auto v = validate_skeleton(s, sk);
    if (v.empty()) return;
    std::string msg = "invalid skeleton:";
    for (const auto& m : v) msg += "\n  " + m;
    throw std::invalid_argument(msg);
}

// Bridge-burning reachability ladder: position 1 holds only the base; each
// later position holds the path-class neighbors of the previous position,
// minus every item used at an earlier position.
inline std::vector<std::set<std::string>> prefix_terminal_sets(const RelationalSchema& s,
                                                               const RelationalSkeleton& sk,
                                                               const Path& p,
                                                               const std::string& base) {
    require_valid_path(s, p);
    if (!sk.has_item(base))
        throw std::domain_error("base item '" + base + "' is not in the skeleton");
    if (sk.item_class(base) != p.front())
        throw std::domain_error("base item '" + base + "' has class '" + sk.item_class(base) +
                                "', path starts at '" + p.front() + "'");
    std::vector<std::set<std::string>> ladder;
    ladder.push_back({base});
    for (std::size_t l = 1; l < p.size(); ++l) {
        std::set<std::string> next;
        for (const auto& j : ladder.back())
            for (const auto& i : sk.neighbors(j))
                if (sk.item_class(i) == p[l]) next.insert(i);
        for (const auto& prev : ladder)
            for (const auto& used : prev) next.erase(used);
        ladder.push_back(std::move(next));
    }
    return ladder;
}

inline std::set<std::string> terminal_set(const RelationalSchema& s, const RelationalSkeleton& sk,
                                          const Path& p, const std::string& base) {
    return prefix_terminal_sets(s, sk, p, base).back();
}

struct MinimalSkeleton {
    RelationalSkeleton skeleton;
    std::string base;
};

// Builds the smallest skeleton in which every given path reaches exactly one
// item from a shared base. Paths are merged along maximal common class
// prefixes; the merge tree makes class-guided traversal deterministic, and
// unfilled roles are padded with fresh entities that only dead-end walks can
// enter.
inline MinimalSkeleton minimal_skeleton(const RelationalSchema& s, const std::vector<Path>& paths) {
    if (paths.empty())
        throw std::invalid_argument("minimal_skeleton requires at least one path");
    for (const auto& p : paths) require_valid_path(s, p);
    for (const auto& p : paths)
        if (p.front() != paths.front().front())
            throw std::invalid_argument("minimal_skeleton requires a shared perspective, got " +
                                        path_to_string(paths.front()) + " and " +
                                        path_to_string(p));

    struct Node {
        std::string cls;
        int parent;
        std::map<std::string, int> children;
    };
    std::vector<Node> trie{{paths.front().front(), -1, {}}};
    for (const auto& p : paths) {
        int cur = 0;
        for (std::size_t i = 1; i < p.size(); ++i) {
            auto [it, fresh] = trie[cur].children.emplace(p[i], -1);
            if (fresh) {
                it->second = static_cast<int>(trie.size());
                trie.push_back({p[i], cur, {}});
            }
            cur = it->second;
        }
    }

    RelationalSkeleton sk;
    std::map<std::string, int> counter;
    auto fresh_id = [&](const std::string& cls) { return cls + "_" + std::to_string(counter[cls]++); };
    std::vector<std::string> node_id(trie.size());
    for (std::size_t n = 0; n < trie.size(); ++n) {
        node_id[n] = fresh_id(trie[n].cls);
        if (s.is_entity(trie[n].cls)) sk.add_entity_item(trie[n].cls, node_id[n]);
    }
    for (std::size_t n = 0; n < trie.size(); ++n) {
        if (!s.is_relationship(trie[n].cls)) continue;
        const auto& roles = s.roles(trie[n].cls);
        std::vector<std::string> fillers(roles.size());
        auto place = [&](int other) {
            fillers[s.role_index(trie[n].cls, trie[other].cls)] = node_id[other];
        };
        if (trie[n].parent >= 0) place(trie[n].parent);
        for (const auto& [cls, child] : trie[n].children) place(child);
        for (std::size_t i = 0; i < roles.size(); ++i)
            if (fillers[i].empty()) {
                fillers[i] = fresh_id(roles[i]);
                sk.add_entity_item(roles[i], fillers[i]);
            }
        sk.add_relationship_item(trie[n].cls, node_id[n], std::move(fillers));
    }

    check_valid(s, sk);
    const std::string& base = node_id[0];
    std::vector<std::set<std::string>> results;
    for (const auto& p : paths) {
        auto ts = terminal_set(s, sk, p, base);
        if (ts.size() != 1)
            throw std::runtime_error("minimal skeleton does not isolate " + path_to_string(p) +
                                     ": terminal set has " + std::to_string(ts.size()) + " items");
        results.push_back(std::move(ts));
    }
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t j = i + 1; j < paths.size(); ++j)
            if (paths[i] != paths[j] && *results[i].begin() == *results[j].begin())
                throw std::runtime_error("minimal skeleton does not separate " +
                                         path_to_string(paths[i]) + " and " +
                                         path_to_string(paths[j]));
    return {std::move(sk), base};
}

// Canonical form under item renaming: the minimum, over independent
// permutations of each entity class's items, of the per-class instance
// tuple lists. Exact at the small per-class counts used here.
inline std::string skeleton_canonical_key(const RelationalSchema& s,
                                          const RelationalSkeleton& sk) {
    std::vector<std::string> ecls(s.entity_classes().begin(), s.entity_classes().end());
    std::map<std::string, std::map<std::string, int>> index;
    std::vector<int> sizes;
    for (const auto& c : ecls) {
        const auto& ids = sk.items(c);
        sizes.push_back(static_cast<int>(ids.size()));
        for (std::size_t i = 0; i < ids.size(); ++i) index[c][ids[i]] = static_cast<int>(i);
    }
    // Instances as per-role entity indices, grouped per relationship class.
    std::map<std::string, std::vector<std::vector<std::pair<int, int>>>> inst;
    for (const auto& link : sk.links()) {
        const auto& cls = sk.item_class(link.rel);
        std::vector<std::pair<int, int>> tup;
        for (const auto& e : link.entities) {
            const auto& ec = sk.item_class(e);
            int ci = static_cast<int>(std::lower_bound(ecls.begin(), ecls.end(), ec) - ecls.begin());
            tup.emplace_back(ci, index[ec][e]);
        }
        inst[cls].push_back(std::move(tup));
    }
    std::vector<std::vector<int>> perms(ecls.size());
    for (std::size_t c = 0; c < ecls.size(); ++c) {
        perms[c].resize(static_cast<std::size_t>(sizes[c]));
        for (int i = 0; i < sizes[c]; ++i) perms[c][static_cast<std::size_t>(i)] = i;
    }
    std::string best;
    auto render = [&]() {
        std::string key;
        for (std::size_t c = 0; c < ecls.size(); ++c) key += std::to_string(sizes[c]) + ";";
        for (const auto& [cls, tuples] : inst) {
            std::vector<std::string> rows;
            for (const auto& tup : tuples) {
                std::string row;
                for (const auto& [ci, ei] : tup)
                    row += std::to_string(perms[static_cast<std::size_t>(ci)]
                                               [static_cast<std::size_t>(ei)]) +
                           ",";
                rows.push_back(std::move(row));
            }
            std::sort(rows.begin(), rows.end());
            key += cls + ":";
            for (const auto& r : rows) key += r + "|";
            key += ";";
        }
        return key;
    };
    auto sweep = [&](auto&& self, std::size_t c) -> void {
        if (c == ecls.size()) {
            auto key = render();
            if (best.empty() || key < best) best = std::move(key);
            return;
        }
        std::sort(perms[c].begin(), perms[c].end());
        do {
            self(self, c + 1);
        } while (std::next_permutation(perms[c].begin(), perms[c].end()));
    };
    sweep(sweep, 0);
    return best;
}

// Streams every skeleton with at most `bound` items per class, up to item
// renaming, deterministically; the empty skeleton comes first.
inline void for_each_skeleton(const RelationalSchema& s, std::size_t bound,
                              const std::function<void(const RelationalSkeleton&)>& fn) {
    std::vector<std::string> ecls(s.entity_classes().begin(), s.entity_classes().end());
    std::vector<std::string> rcls;
    for (const auto& [name, roles] : s.relationship_classes()) rcls.push_back(name);

    std::set<std::string> seen;
    std::vector<std::size_t> counts(ecls.size(), 0);

    auto with_counts = [&]() {
        RelationalSkeleton base_sk;
        for (std::size_t c = 0; c < ecls.size(); ++c)
            for (std::size_t i = 0; i < counts[c]; ++i)
                base_sk.add_entity_item(ecls[c], ecls[c] + "_" + std::to_string(i));
        // Admissible instance subsets per relationship class.
        std::vector<std::vector<std::vector<std::vector<std::string>>>> choices;
        for (const auto& rc : rcls) {
            const auto& roles = s.roles(rc);
            std::vector<std::vector<std::string>> tuples{{}};
            for (const auto& role : roles) {
                std::vector<std::vector<std::string>> grown;
                for (const auto& t : tuples)
                    for (const auto& id : base_sk.items(role)) {
                        auto t2 = t;
                        t2.push_back(id);
                        grown.push_back(std::move(t2));
                    }
                tuples = std::move(grown);
            }
            std::vector<std::vector<std::vector<std::string>>> subsets;
            std::vector<std::vector<std::string>> cur;
            auto pick = [&](auto&& self, std::size_t from) -> void {
                subsets.push_back(cur);
                if (cur.size() == bound) return;
                for (std::size_t t = from; t < tuples.size(); ++t) {
                    bool ok = true;
                    for (std::size_t k = 0; k < roles.size() && ok; ++k) {
                        if (s.card(rc, roles[k]) != Card::One) continue;
                        for (const auto& chosen : cur)
                            if (chosen[k] == tuples[t][k]) {
                                ok = false;
                                break;
                            }
                    }
                    if (!ok) continue;
                    cur.push_back(tuples[t]);
                    self(self, t + 1);
                    cur.pop_back();
                }
            };
            pick(pick, 0);
            choices.push_back(std::move(subsets));
        }
        std::vector<std::size_t> pick_idx(rcls.size(), 0);
        auto emit = [&]() {
            RelationalSkeleton sk = base_sk;
            for (std::size_t r = 0; r < rcls.size(); ++r) {
                const auto& subset = choices[r][pick_idx[r]];
                for (std::size_t t = 0; t < subset.size(); ++t)
                    sk.add_relationship_item(rcls[r], rcls[r] + "_" + std::to_string(t),
                                             subset[t]);
            }
            if (seen.insert(skeleton_canonical_key(s, sk)).second) fn(sk);
        };
        auto spin = [&](auto&& self, std::size_t r) -> void {
            if (r == rcls.size()) {
                emit();
                return;
            }
            for (pick_idx[r] = 0; pick_idx[r] < choices[r].size(); ++pick_idx[r]) self(self, r + 1);
        };
        spin(spin, 0);
    };

    auto odometer = [&](auto&& self, std::size_t c) -> void {
        if (c == ecls.size()) {
            with_counts();
            return;
        }
        for (counts[c] = 0; counts[c] <= bound; ++counts[c]) self(self, c + 1);
    };
    odometer(odometer, 0);
}

inline std::vector<RelationalSkeleton> enumerate_skeletons(const RelationalSchema& s,
                                                           std::size_t bound) {
    std::vector<RelationalSkeleton> out;
    for_each_skeleton(s, bound, [&](const RelationalSkeleton& sk) { out.push_back(sk); });
    return out;
}

}  // namespace rcmkit
