#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <rcmkit/schema.hpp>
#include <rcmkit/skeleton.hpp>

namespace rcmkit {

struct SearchLimits {
    std::size_t max_nodes = 5'000'000;
};

class SearchBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Exhaustive search over item-identification patterns of a fixed set of
// walks. Every position of every walk is a slot; a candidate identifies
// slots of equal class across walks (never within one walk, since
// bridge-burning keeps walk items distinct). Congruence closure propagates
// role uniqueness and one-cardinality forcing. Each complete pattern is
// turned into a candidate skeleton (walk items plus fresh padding entities
// for unfilled roles) and handed to a verifier that checks exact terminal
// sets, so accepted witnesses are sound by construction.
class PatternSearch {
public:
    PatternSearch(const RelationalSchema& s, std::vector<Path> walks, SearchLimits limits)
        : s_(s), walks_(std::move(walks)), limits_(limits) {
        for (std::size_t w = 0; w < walks_.size(); ++w)
            for (std::size_t i = 0; i < walks_[w].size(); ++i) {
                slot_walk_.push_back(w);
                slot_pos_.push_back(i);
                slot_cls_.push_back(walks_[w][i]);
            }
        root_.resize(slot_count());
        for (std::size_t i = 0; i < root_.size(); ++i) root_[i] = static_cast<int>(i);
    }

    std::size_t slot_count() const { return slot_cls_.size(); }

    std::size_t slot_index(std::size_t walk, std::size_t pos) const {
        std::size_t base = 0;
        for (std::size_t w = 0; w < walk; ++w) base += walks_[w].size();
        return base + pos;
    }

    // Pre-unifies anchor slots; returns false when the anchors themselves
    // are contradictory.
    bool anchor(const std::vector<std::vector<std::size_t>>& groups) {
        for (const auto& g : groups)
            for (std::size_t k = 1; k < g.size(); ++k)
                if (!unite(root_, g[0], g[k])) return false;
        return close(root_);
    }

    struct Candidate {
        RelationalSkeleton skeleton;
        std::vector<std::string> slot_item;  // item id per slot
    };

    // Runs the search; returns the first candidate accepted by `verify`.
    std::optional<Candidate> run(const std::function<bool(const Candidate&)>& verify) {
        nodes_ = 0;
        std::optional<Candidate> out;
        dfs(root_, 0, verify, out);
        return out;
    }

private:
    using State = std::vector<int>;

    int find(State& st, int x) const {
        while (st[static_cast<std::size_t>(x)] != x) {
            st[static_cast<std::size_t>(x)] =
                st[static_cast<std::size_t>(st[static_cast<std::size_t>(x)])];
            x = st[static_cast<std::size_t>(x)];
        }
        return x;
    }

    bool unite(State& st, std::size_t a, std::size_t b) {
        int ra = find(st, static_cast<int>(a));
        int rb = find(st, static_cast<int>(b));
        if (ra == rb) return true;
        if (slot_cls_[static_cast<std::size_t>(ra)] != slot_cls_[static_cast<std::size_t>(rb)])
            return false;
        if (rb < ra) std::swap(ra, rb);
        st[static_cast<std::size_t>(rb)] = ra;
        return true;
    }

    // Fixpoint propagation; false on contradiction.
    bool close(State& st) {
        bool changed = true;
        while (changed) {
            changed = false;
            std::map<int, std::vector<std::size_t>> groups;
            for (std::size_t i = 0; i < slot_count(); ++i)
                groups[find(st, static_cast<int>(i))].push_back(i);
            for (const auto& [root, members] : groups) {
                const auto& cls = slot_cls_[members.front()];
                std::set<std::size_t> walks_seen;
                for (auto m : members)
                    if (!walks_seen.insert(slot_walk_[m]).second) return false;
                // Classwise neighbor buckets of the unified item.
                std::map<std::string, std::vector<std::size_t>> buckets;
                for (auto m : members) {
                    const std::size_t w = slot_walk_[m];
                    const std::size_t pos = slot_pos_[m];
                    if (pos > 0) buckets[walks_[w][pos - 1]].push_back(slot_index(w, pos - 1));
                    if (pos + 1 < walks_[w].size())
                        buckets[walks_[w][pos + 1]].push_back(slot_index(w, pos + 1));
                }
                if (s_.is_relationship(cls)) {
                    // One filler per role: same-class neighbors coincide.
                    for (const auto& [ncls, slots] : buckets)
                        for (std::size_t k = 1; k < slots.size(); ++k) {
                            int before = find(st, static_cast<int>(slots[0]));
                            int other = find(st, static_cast<int>(slots[k]));
                            if (before == other) continue;
                            if (!unite(st, slots[0], slots[k])) return false;
                            changed = true;
                        }
                } else {
                    // One-cardinality: the entity joins a single instance.
                    for (const auto& [ncls, slots] : buckets) {
                        if (!s_.is_relationship(ncls)) return false;
                        if (s_.card(ncls, cls) != Card::One) continue;
                        for (std::size_t k = 1; k < slots.size(); ++k) {
                            int before = find(st, static_cast<int>(slots[0]));
                            int other = find(st, static_cast<int>(slots[k]));
                            if (before == other) continue;
                            if (!unite(st, slots[0], slots[k])) return false;
                            changed = true;
                        }
                    }
                }
            }
        }
        return true;
    }

    void dfs(State st, std::size_t slot, const std::function<bool(const Candidate&)>& verify,
             std::optional<Candidate>& out) {
        if (out) return;
        if (++nodes_ > limits_.max_nodes)
            throw SearchBudgetExceeded(
                "witness search exceeded its node budget; raise SearchLimits::max_nodes to "
                "continue");
        if (slot == slot_count()) {
            auto cand = realize(st);
            if (cand && verify(*cand)) out = std::move(cand);
            return;
        }
        int r = find(st, static_cast<int>(slot));
        bool already_decided = false;
        for (std::size_t j = 0; j < slot; ++j)
            if (find(st, static_cast<int>(j)) == r) {
                already_decided = true;
                break;
            }
        if (already_decided) {
            dfs(std::move(st), slot + 1, verify, out);
            return;
        }
        // Join an already-decided class, smallest representative first.
        std::set<int> tried;
        for (std::size_t j = 0; j < slot && !out; ++j) {
            int rj = find(st, static_cast<int>(j));
            if (!tried.insert(rj).second) continue;
            if (slot_cls_[static_cast<std::size_t>(rj)] != slot_cls_[slot]) continue;
            State next = st;
            if (!unite(next, static_cast<std::size_t>(rj), slot)) continue;
            if (!close(next)) continue;
            dfs(std::move(next), slot + 1, verify, out);
        }
        if (out) return;
        // Or stay fresh.
        dfs(std::move(st), slot + 1, verify, out);
    }

    std::optional<Candidate> realize(State& st) {
        Candidate cand;
        std::map<int, std::string> item_of;
        std::map<std::string, int> counter;
        auto fresh = [&](const std::string& cls) {
            return cls + "_" + std::to_string(counter[cls]++);
        };
        for (std::size_t i = 0; i < slot_count(); ++i) {
            int r = find(st, static_cast<int>(i));
            auto it = item_of.find(r);
            if (it == item_of.end()) {
                it = item_of.emplace(r, fresh(slot_cls_[static_cast<std::size_t>(r)])).first;
                if (s_.is_entity(slot_cls_[static_cast<std::size_t>(r)]))
                    cand.skeleton.add_entity_item(slot_cls_[static_cast<std::size_t>(r)],
                                                  it->second);
            }
            cand.slot_item.push_back(it->second);
        }
        // Role fillers per unified relationship item.
        std::map<int, std::map<std::size_t, std::string>> fillers;
        for (std::size_t i = 0; i < slot_count(); ++i) {
            const auto& cls = slot_cls_[i];
            if (!s_.is_relationship(cls)) continue;
            int r = find(st, static_cast<int>(i));
            const std::size_t w = slot_walk_[i];
            const std::size_t pos = slot_pos_[i];
            for (std::ptrdiff_t d : {-1, +1}) {
                if (d < 0 && pos == 0) continue;
                if (d > 0 && pos + 1 >= walks_[w].size()) continue;
                const std::size_t n = slot_index(w, d > 0 ? pos + 1 : pos - 1);
                const auto role = s_.role_index(cls, slot_cls_[n]);
                const auto& item = cand.slot_item[n];
                auto [it, fresh_role] = fillers[r].emplace(role, item);
                if (!fresh_role && it->second != item) return std::nullopt;
            }
        }
        for (const auto& [r, by_role] : fillers) {
            const auto& cls = slot_cls_[static_cast<std::size_t>(r)];
            const auto& roles = s_.roles(cls);
            std::vector<std::string> filled(roles.size());
            for (const auto& [role, item] : by_role) filled[role] = item;
            for (std::size_t k = 0; k < filled.size(); ++k)
                if (filled[k].empty()) {
                    filled[k] = fresh(roles[k]);
                    cand.skeleton.add_entity_item(roles[k], filled[k]);
                }
            cand.skeleton.add_relationship_item(cls, item_of.at(r), std::move(filled));
        }
        if (!validate_skeleton(s_, cand.skeleton).empty()) return std::nullopt;
        return cand;
    }

    const RelationalSchema& s_;
    std::vector<Path> walks_;
    SearchLimits limits_;
    std::vector<std::size_t> slot_walk_;
    std::vector<std::size_t> slot_pos_;
    std::vector<std::string> slot_cls_;
    State root_;
    std::size_t nodes_ = 0;
};

}  // namespace detail

struct IntersectionWitness {
    RelationalSkeleton skeleton;
    std::string base;
    std::string item;
};

// Searches for a skeleton and base where both paths reach a common item.
// Complete over witnesses built from the two walks' items plus padding (the
// space the shared-prefix/shared-suffix argument lives in); every returned
// witness is verified by exact terminal-set evaluation.
inline std::optional<IntersectionWitness> find_intersection_witness(const RelationalSchema& s,
                                                                    const Path& p, const Path& q,
                                                                    SearchLimits limits = {}) {
    require_valid_path(s, p);
    require_valid_path(s, q);
    if (p == q)
        throw std::invalid_argument("intersection witness search requires two distinct paths");
    if (p.front() != q.front() || p.back() != q.back()) return std::nullopt;
    detail::PatternSearch search(s, {p, q}, limits);
    if (!search.anchor({{search.slot_index(0, 0), search.slot_index(1, 0)},
                        {search.slot_index(0, p.size() - 1), search.slot_index(1, q.size() - 1)}}))
        return std::nullopt;
    auto cand = search.run([&](const detail::PatternSearch::Candidate& c) {
        const auto& base = c.slot_item[search.slot_index(0, 0)];
        const auto& item = c.slot_item[search.slot_index(0, p.size() - 1)];
        return terminal_set(s, c.skeleton, p, base).count(item) != 0 &&
               terminal_set(s, c.skeleton, q, base).count(item) != 0;
    });
    if (!cand) return std::nullopt;
    return IntersectionWitness{std::move(cand->skeleton),
                               cand->slot_item[search.slot_index(0, 0)],
                               cand->slot_item[search.slot_index(0, p.size() - 1)]};
}

struct CoIntersectionWitness {
    RelationalSkeleton skeleton;
    std::string base;  // b with mid in q's terminal set from b
    std::string mid;   // i_j, shared junction item
    std::string item;  // member of r's set from mid and both p-sets from b
};

struct CoIntersectResult {
    bool value = false;
    std::optional<CoIntersectionWitness> witness;
};

// Decides whether some skeleton and base realize the extension through a
// shared junction item while both intersecting paths reach a common target:
// exists b, exists i_j in q's terminal set from b, with r's set from i_j
// meeting both p's and p''s sets from b.
inline CoIntersectResult co_intersectable(const RelationalSchema& s, const Path& q, const Path& r,
                                          const Path& p, const Path& pp, SearchLimits limits = {}) {
    bool member = false;
    for (const auto& ext : extend(s, q, r))
        if (ext.path == p) member = true;
    if (!member)
        throw std::domain_error("co_intersectable requires p to extend q through r, got p = " +
                                path_to_string(p));
    if (p == pp || !intersectable(s, p, pp))
        throw std::domain_error("co_intersectable requires intersectable(p, p'), got " +
                                path_to_string(p) + " and " + path_to_string(pp));
    detail::PatternSearch search(s, {q, r, p, pp}, limits);
    const auto b0 = search.slot_index(0, 0);
    const auto mid0 = search.slot_index(0, q.size() - 1);
    const auto t0 = search.slot_index(1, r.size() - 1);
    if (!search.anchor({{b0, search.slot_index(2, 0), search.slot_index(3, 0)},
                        {mid0, search.slot_index(1, 0)},
                        {t0, search.slot_index(2, p.size() - 1),
                         search.slot_index(3, pp.size() - 1)}}))
        return {false, std::nullopt};
    auto cand = search.run([&](const detail::PatternSearch::Candidate& c) {
        const auto& base = c.slot_item[b0];
        const auto& mid = c.slot_item[mid0];
        const auto& item = c.slot_item[t0];
        return terminal_set(s, c.skeleton, q, base).count(mid) != 0 &&
               terminal_set(s, c.skeleton, r, mid).count(item) != 0 &&
               terminal_set(s, c.skeleton, p, base).count(item) != 0 &&
               terminal_set(s, c.skeleton, pp, base).count(item) != 0;
    });
    if (!cand) return {false, std::nullopt};
    return {true, CoIntersectionWitness{std::move(cand->skeleton), cand->slot_item[b0],
                                        cand->slot_item[mid0], cand->slot_item[t0]}};
}

// Searches for a skeleton realizing an extension edge end to end: a base b,
// a junction item in q's terminal set from b, and a target reached both by r
// from the junction and by p from b. This is the per-edge soundness
// condition behind lifting a dependency along p = extend(q, r).
inline std::optional<CoIntersectionWitness> find_extension_witness(const RelationalSchema& s,
                                                                   const Path& q, const Path& r,
                                                                   const Path& p,
                                                                   SearchLimits limits = {}) {
    bool member = false;
    for (const auto& ext : extend(s, q, r))
        if (ext.path == p) member = true;
    if (!member)
        throw std::domain_error("extension witness requires p to extend q through r, got p = " +
                                path_to_string(p));
    detail::PatternSearch search(s, {q, r, p}, limits);
    const auto b0 = search.slot_index(0, 0);
    const auto mid0 = search.slot_index(0, q.size() - 1);
    const auto t0 = search.slot_index(1, r.size() - 1);
    if (!search.anchor({{b0, search.slot_index(2, 0)},
                        {mid0, search.slot_index(1, 0)},
                        {t0, search.slot_index(2, p.size() - 1)}}))
        return std::nullopt;
    auto cand = search.run([&](const detail::PatternSearch::Candidate& c) {
        const auto& base = c.slot_item[b0];
        const auto& mid = c.slot_item[mid0];
        const auto& item = c.slot_item[t0];
        return terminal_set(s, c.skeleton, q, base).count(mid) != 0 &&
               terminal_set(s, c.skeleton, r, mid).count(item) != 0 &&
               terminal_set(s, c.skeleton, p, base).count(item) != 0;
    });
    if (!cand) return std::nullopt;
    return CoIntersectionWitness{std::move(cand->skeleton), cand->slot_item[b0],
                                 cand->slot_item[mid0], cand->slot_item[t0]};
}

// Brute-force cross-checks over full skeleton enumeration at a small bound.

inline std::optional<IntersectionWitness> intersection_witness_by_enumeration(
    const RelationalSchema& s, const Path& p, const Path& q, std::size_t bound) {
    if (p.front() != q.front() || p.back() != q.back()) return std::nullopt;
    std::optional<IntersectionWitness> out;
    for_each_skeleton(s, bound, [&](const RelationalSkeleton& sk) {
        if (out) return;
        for (const auto& b : sk.items(p.front())) {
            auto tp = terminal_set(s, sk, p, b);
            auto tq = terminal_set(s, sk, q, b);
            for (const auto& i : tp)
                if (tq.count(i)) {
                    out = IntersectionWitness{sk, b, i};
                    return;
                }
        }
    });
    return out;
}

inline bool co_intersectable_by_enumeration(const RelationalSchema& s, const Path& q,
                                            const Path& r, const Path& p, const Path& pp,
                                            std::size_t bound) {
    bool found = false;
    for_each_skeleton(s, bound, [&](const RelationalSkeleton& sk) {
        if (found) return;
        for (const auto& b : sk.items(q.front())) {
            auto tq = terminal_set(s, sk, q, b);
            if (tq.empty()) continue;
            auto tp = terminal_set(s, sk, p, b);
            auto tpp = terminal_set(s, sk, pp, b);
            std::set<std::string> both;
            for (const auto& i : tp)
                if (tpp.count(i)) both.insert(i);
            if (both.empty()) continue;
            for (const auto& mid : tq)
                for (const auto& i : terminal_set(s, sk, r, mid))
                    if (both.count(i)) {
                        found = true;
                        return;
                    }
        }
    });
    return found;
}

}  // namespace rcmkit
