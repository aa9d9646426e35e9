#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <rcmkit/agg.hpp>

namespace rcmkit {

// Dense-index directed graph used by the separation routines and the
// exhaustive cross-checks.
struct IndexDag {
    std::vector<std::vector<std::size_t>> children;
    std::vector<std::vector<std::size_t>> parents;

    explicit IndexDag(std::size_t n = 0) : children(n), parents(n) {}
    std::size_t size() const { return children.size(); }

    void add_edge(std::size_t from, std::size_t to) {
        if (from >= size() || to >= size())
            throw std::invalid_argument("edge endpoint out of range");
        auto ins = [](std::vector<std::size_t>& v, std::size_t x) {
            auto it = std::lower_bound(v.begin(), v.end(), x);
            if (it == v.end() || *it != x) v.insert(it, x);
        };
        ins(children[from], to);
        ins(parents[to], from);
    }
};

namespace detail {

inline std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline void check_disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                           const char* what) {
    std::vector<std::size_t> shared;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
    if (!shared.empty())
        throw std::domain_error(std::string("query sets ") + what + " share vertex " +
                                std::to_string(shared.front()));
}

// Vertices from which the conditioning set is reachable along child edges,
// including the conditioning set itself.
inline std::vector<char> ancestors_of(const std::vector<std::vector<std::size_t>>& parents,
                                      const std::vector<std::size_t>& w) {
    std::vector<char> anc(parents.size(), 0);
    std::vector<std::size_t> stack(w.begin(), w.end());
    for (auto x : w) anc[x] = 1;
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (auto p : parents[x])
            if (!anc[p]) {
                anc[p] = 1;
                stack.push_back(p);
            }
    }
    return anc;
}

}  // namespace detail

// Searches for an active trail from u to v given w by reachability over
// (vertex, arrival direction) states: a vertex passes the trail through
// unless it is conditioned, and reverses direction at a head-to-head
// meeting only when the conditioning set is reachable below it. Returns the
// first trail found by breadth-first order with neighbours taken in
// ascending index order: a shortest active trail, ties broken toward
// smaller indices hop by hop. The result is a walk whose consecutive steps
// follow edges of either direction; vertices may repeat at most once, in
// opposite directions.
inline std::optional<std::vector<std::size_t>> d_connecting_trail(
    const std::vector<std::vector<std::size_t>>& children,
    const std::vector<std::vector<std::size_t>>& parents, std::vector<std::size_t> u,
    std::vector<std::size_t> v, std::vector<std::size_t> w) {
    const std::size_t n = children.size();
    for (const auto* s : {&u, &v, &w})
        for (auto x : *s)
            if (x >= n)
                throw std::invalid_argument("query vertex " + std::to_string(x) +
                                            " is out of range");
    u = detail::sorted_unique(std::move(u));
    v = detail::sorted_unique(std::move(v));
    w = detail::sorted_unique(std::move(w));
    detail::check_disjoint(u, v, "u and v");
    detail::check_disjoint(u, w, "u and w");
    detail::check_disjoint(v, w, "v and w");

    std::vector<char> in_v(n, 0), in_w(n, 0);
    for (auto x : v) in_v[x] = 1;
    for (auto x : w) in_w[x] = 1;
    const auto anc = detail::ancestors_of(parents, w);

    // State encoding: vertex * 2 + direction; direction 0 arrives against an
    // edge (from a child, or a trail start), 1 arrives along an edge.
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pred(2 * n, kNone);
    std::vector<char> seen(2 * n, 0);
    std::deque<std::size_t> queue;
    for (auto x : u) {
        seen[2 * x] = 1;
        queue.push_back(2 * x);
    }
    std::size_t goal = kNone;
    while (!queue.empty() && goal == kNone) {
        const auto state = queue.front();
        queue.pop_front();
        const std::size_t y = state / 2;
        const bool along = state % 2;
        if (in_v[y]) {
            goal = state;
            break;
        }
        auto push = [&](std::size_t t, std::size_t dir) {
            const auto s = 2 * t + dir;
            if (!seen[s]) {
                seen[s] = 1;
                pred[s] = state;
                queue.push_back(s);
            }
        };
        if (!along) {
            if (!in_w[y]) {
                for (auto p : parents[y]) push(p, 0);
                for (auto c : children[y]) push(c, 1);
            }
        } else {
            if (!in_w[y])
                for (auto c : children[y]) push(c, 1);
            if (anc[y])
                for (auto p : parents[y]) push(p, 0);
        }
    }
    if (goal == kNone) return std::nullopt;
    std::vector<std::size_t> trail;
    for (auto s = goal; s != kNone; s = pred[s]) trail.push_back(s / 2);
    std::reverse(trail.begin(), trail.end());
    return trail;
}

inline std::optional<std::vector<std::size_t>> d_connecting_trail(const IndexDag& g,
                                                                  std::vector<std::size_t> u,
                                                                  std::vector<std::size_t> v,
                                                                  std::vector<std::size_t> w) {
    return d_connecting_trail(g.children, g.parents, std::move(u), std::move(v), std::move(w));
}

inline bool d_separated(const IndexDag& g, std::vector<std::size_t> u, std::vector<std::size_t> v,
                        std::vector<std::size_t> w) {
    return !d_connecting_trail(g, std::move(u), std::move(v), std::move(w)).has_value();
}

// Validates a claimed active trail: endpoints in u and v, every consecutive
// pair joined by an edge in some direction, head-to-head vertices able to
// reach the conditioning set, and every other interior vertex unconditioned.
inline bool is_active_trail(const std::vector<std::vector<std::size_t>>& children,
                            const std::vector<std::vector<std::size_t>>& parents,
                            const std::vector<std::size_t>& trail,
                            const std::vector<std::size_t>& u, const std::vector<std::size_t>& v,
                            const std::vector<std::size_t>& w) {
    if (trail.empty()) return false;
    auto contains = [](const std::vector<std::size_t>& s, std::size_t x) {
        return std::find(s.begin(), s.end(), x) != s.end();
    };
    if (!contains(u, trail.front()) || !contains(v, trail.back())) return false;
    auto has_edge = [&](std::size_t a, std::size_t b) {
        return std::binary_search(children[a].begin(), children[a].end(), b);
    };
    const auto anc = detail::ancestors_of(parents, detail::sorted_unique(w));
    for (std::size_t i = 0; i + 1 < trail.size(); ++i)
        if (!has_edge(trail[i], trail[i + 1]) && !has_edge(trail[i + 1], trail[i])) return false;
    if (contains(w, trail.front()) || contains(w, trail.back())) return false;
    for (std::size_t i = 1; i + 1 < trail.size(); ++i) {
        const bool collider = has_edge(trail[i - 1], trail[i]) && has_edge(trail[i + 1], trail[i]);
        if (collider ? !anc[trail[i]] : contains(w, trail[i])) return false;
    }
    return true;
}

// Independent separation oracle: u and v must be disconnected in the
// moralized ancestral closure of u, v, w with the conditioning vertices
// removed.
inline bool moral_separated(const IndexDag& g, std::vector<std::size_t> u,
                            std::vector<std::size_t> v, std::vector<std::size_t> w) {
    const std::size_t n = g.size();
    for (const auto* s : {&u, &v, &w})
        for (auto x : *s)
            if (x >= n)
                throw std::invalid_argument("query vertex " + std::to_string(x) +
                                            " is out of range");
    u = detail::sorted_unique(std::move(u));
    v = detail::sorted_unique(std::move(v));
    w = detail::sorted_unique(std::move(w));
    detail::check_disjoint(u, v, "u and v");
    detail::check_disjoint(u, w, "u and w");
    detail::check_disjoint(v, w, "v and w");

    std::vector<std::size_t> all = u;
    all.insert(all.end(), v.begin(), v.end());
    all.insert(all.end(), w.begin(), w.end());
    const auto anc = detail::ancestors_of(g.parents, detail::sorted_unique(std::move(all)));

    std::vector<std::vector<char>> link(n, std::vector<char>(n, 0));
    for (std::size_t c = 0; c < n; ++c) {
        if (!anc[c]) continue;
        for (auto p : g.parents[c]) {
            link[p][c] = link[c][p] = 1;
            for (auto p2 : g.parents[c])
                if (p != p2) link[p][p2] = link[p2][p] = 1;
        }
    }
    std::vector<char> blocked(n, 0), reached(n, 0);
    for (auto x : w) blocked[x] = 1;
    std::vector<std::size_t> stack;
    for (auto x : u) {
        reached[x] = 1;
        stack.push_back(x);
    }
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (std::size_t y = 0; y < n; ++y)
            if (link[x][y] && anc[y] && !blocked[y] && !reached[y]) {
                reached[y] = 1;
                stack.push_back(y);
            }
    }
    for (auto x : v)
        if (reached[x]) return false;
    return true;
}

// Every directed acyclic graph on n vertices, one representative per
// isomorphism class. Edges are generated against a fixed vertex order and a
// minimum-over-relabelings encoding picks the representative; the sizes
// match the published counts of unlabeled acyclic digraphs (1, 2, 6, 31,
// 302, 5984 for one through six vertices).
inline std::vector<IndexDag> enumerate_dags(std::size_t n) {
    if (n == 0 || n > 7) throw std::invalid_argument("vertex count must be within 1..7");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    std::vector<IndexDag> out;
    std::set<std::uint64_t> seen;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
        std::uint64_t canon = ~std::uint64_t{0};
        for (const auto& perm : perms) {
            std::uint64_t enc = 0;
            for (std::size_t k = 0; k < pairs.size(); ++k)
                if (mask >> k & 1)
                    enc |= std::uint64_t{1} << (perm[pairs[k].first] * n + perm[pairs[k].second]);
            canon = std::min(canon, enc);
        }
        if (!seen.insert(canon).second) continue;
        IndexDag g(n);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (mask >> k & 1) g.add_edge(pairs[k].first, pairs[k].second);
        out.push_back(std::move(g));
    }
    return out;
}

// A relational conditional-independence query: three disjoint sets of
// variables read from one perspective.
struct CiQuery {
    std::string perspective;
    std::vector<RelationalVariable> u;
    std::vector<RelationalVariable> v;
    std::vector<RelationalVariable> w;
};

inline void check_query(const RelationalSchema& s, const CiQuery& q) {
    if (q.u.empty() || q.v.empty())
        throw std::invalid_argument("query endpoint sets must be non-empty");
    for (const auto* side : {&q.u, &q.v, &q.w})
        for (const auto& var : *side) {
            require_valid_path(s, var.path);
            if (var.path.front() != q.perspective)
                throw std::invalid_argument("variable " + to_string(var) +
                                            " does not start at perspective '" + q.perspective +
                                            "'");
            const auto attrs = s.attrs_of(var.path.back());
            if (std::find(attrs.begin(), attrs.end(), var.attr) == attrs.end())
                throw std::invalid_argument("class '" + var.path.back() + "' has no attribute '" +
                                            var.attr + "'");
        }
    auto sorted = [](std::vector<RelationalVariable> vars) {
        std::sort(vars.begin(), vars.end());
        return vars;
    };
    const auto us = sorted(q.u), vs = sorted(q.v), ws = sorted(q.w);
    auto disjoint = [](const std::vector<RelationalVariable>& a,
                       const std::vector<RelationalVariable>& b, const char* what) {
        std::vector<RelationalVariable> shared;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
        if (!shared.empty())
            throw std::domain_error(std::string("query sets ") + what + " share variable " +
                                    to_string(shared.front()));
    };
    disjoint(us, vs, "u and v");
    disjoint(us, ws, "u and w");
    disjoint(vs, ws, "v and w");
}

// Ground-graph separation on item-attribute vertices.
inline std::optional<std::vector<GroundVertex>> ground_d_connecting_trail(
    const GroundGraph& g, const std::vector<GroundVertex>& u, const std::vector<GroundVertex>& v,
    const std::vector<GroundVertex>& w) {
    auto indices = [&](const std::vector<GroundVertex>& s) {
        std::vector<std::size_t> out;
        for (const auto& x : s) out.push_back(g.index_of(x));
        return out;
    };
    auto trail = d_connecting_trail(g.children, g.parents, indices(u), indices(v), indices(w));
    if (!trail) return std::nullopt;
    std::vector<GroundVertex> out;
    for (auto i : *trail) out.push_back(g.vertices[i]);
    return out;
}

inline bool ground_d_separated(const GroundGraph& g, const std::vector<GroundVertex>& u,
                               const std::vector<GroundVertex>& v,
                               const std::vector<GroundVertex>& w) {
    return !ground_d_connecting_trail(g, u, v, w).has_value();
}

// Lifted separation: bars all three sets and runs the trail search over the
// graph's nodes. Conditioned nodes are removed from the endpoint sets
// first; a node barred into both endpoint sets after that removal is
// itself a one-node active trail.
inline std::optional<std::vector<AggNode>> agg_d_connecting_trail(const Agg& agg,
                                                                  const CiQuery& q) {
    check_query(agg.schema, q);
    if (q.perspective != agg.perspective)
        throw std::invalid_argument("query perspective '" + q.perspective +
                                    "' does not match the graph perspective '" + agg.perspective +
                                    "'");
    for (const auto* side : {&q.u, &q.v, &q.w})
        for (const auto& var : *side)
            if (!agg.has_rv(var))
                throw std::out_of_range("variable " + to_string(var) +
                                        " is not in the graph at hop bound " +
                                        std::to_string(agg.hop_bound) +
                                        "; rebuild with a larger bound");
    auto ub = bar(agg, q.u), vb = bar(agg, q.v), wb = bar(agg, q.w);
    auto drop = [&](std::vector<AggNode>& s) {
        std::vector<AggNode> kept;
        std::set_difference(s.begin(), s.end(), wb.begin(), wb.end(), std::back_inserter(kept));
        s = std::move(kept);
    };
    drop(ub);
    drop(vb);
    std::vector<AggNode> shared;
    std::set_intersection(ub.begin(), ub.end(), vb.begin(), vb.end(), std::back_inserter(shared));
    if (!shared.empty()) return std::vector<AggNode>{shared.front()};
    if (ub.empty() || vb.empty()) return std::nullopt;

    const auto nodes = agg.nodes();
    auto index = [&](const AggNode& x) {
        return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), x) -
                                        nodes.begin());
    };
    IndexDag g(nodes.size());
    for (const auto& [from, to] : agg.edges()) g.add_edge(index(from), index(to));
    auto pick = [&](const std::vector<AggNode>& s) {
        std::vector<std::size_t> out;
        for (const auto& x : s) out.push_back(index(x));
        return out;
    };
    auto trail = d_connecting_trail(g, pick(ub), pick(vb), pick(wb));
    if (!trail) return std::nullopt;
    std::vector<AggNode> out;
    for (auto i : *trail) out.push_back(nodes[i]);
    return out;
}

inline bool agg_d_separated(const Agg& agg, const CiQuery& q) {
    return !agg_d_connecting_trail(agg, q).has_value();
}

struct OracleWitness {
    RelationalSkeleton skeleton;
    std::string base;
    std::vector<GroundVertex> trail;
};

struct OracleVerdict {
    bool separated_within_bound = true;
    std::optional<OracleWitness> witness;  // present iff a connection was found
    std::size_t skeletons_checked = 0;
    std::size_t bound = 0;
};

namespace detail {

// Evaluates one skeleton: per base, maps each query variable to its
// terminal items as ground vertices, removes conditioned vertices from the
// endpoint sets, and searches the ground graph for an active trail. The
// first base in item order that connects wins.
inline std::optional<OracleWitness> oracle_evaluate(const Rcm& m, const CiQuery& q,
                                                    const RelationalSkeleton& sk) {
    const auto gg = ground_graph(m, sk);
    for (const auto& b : sk.items(q.perspective)) {
        auto collect = [&](const std::vector<RelationalVariable>& vars) {
            std::vector<GroundVertex> out;
            for (const auto& var : vars)
                for (const auto& item : terminal_set(m.schema, sk, var.path, b))
                    out.push_back({item, var.attr});
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        };
        auto ug = collect(q.u), vg = collect(q.v), wg = collect(q.w);
        auto drop = [&](std::vector<GroundVertex>& s) {
            std::vector<GroundVertex> kept;
            std::set_difference(s.begin(), s.end(), wg.begin(), wg.end(),
                                std::back_inserter(kept));
            s = std::move(kept);
        };
        drop(ug);
        drop(vg);
        std::vector<GroundVertex> both;
        std::set_intersection(ug.begin(), ug.end(), vg.begin(), vg.end(),
                              std::back_inserter(both));
        if (!both.empty()) return OracleWitness{sk, b, {both.front()}};
        if (ug.empty() || vg.empty()) continue;
        if (auto trail = ground_d_connecting_trail(gg, ug, vg, wg))
            return OracleWitness{sk, b, std::move(*trail)};
    }
    return std::nullopt;
}

}  // namespace detail

// Bounded search over every skeleton with at most max_items_per_class items
// per class: reports the first ground d-connection in canonical enumeration
// order, or exhaustion. A separated verdict holds only within the bound;
// the universal claim over all skeletons is not decided here. The result is
// independent of the worker count: parallel workers race, but the witness
// with the least enumeration index is the one reported, and
// skeletons_checked counts canonical order through that witness (or the
// whole enumeration when none exists).
inline OracleVerdict relational_dsep_oracle(const Rcm& m, const CiQuery& q,
                                            std::size_t max_items_per_class,
                                            std::size_t workers = 1) {
    check_valid(m);
    check_query(m.schema, q);
    if (max_items_per_class == 0)
        throw std::invalid_argument("per-class item bound must be at least 1");

    OracleVerdict verdict;
    verdict.bound = max_items_per_class;

    if (workers <= 1) {
        std::size_t index = 0;
        std::optional<std::size_t> witness_index;
        for_each_skeleton(m.schema, max_items_per_class, [&](const RelationalSkeleton& sk) {
            if (!verdict.witness)
                if (auto w = detail::oracle_evaluate(m, q, sk)) {
                    verdict.witness = std::move(w);
                    witness_index = index;
                }
            ++index;
        });
        verdict.skeletons_checked = witness_index ? *witness_index + 1 : index;
        verdict.separated_within_bound = !verdict.witness.has_value();
        return verdict;
    }

    std::mutex mu;
    std::condition_variable cv_push, cv_pop;
    std::deque<std::pair<std::size_t, RelationalSkeleton>> pending;
    bool enqueue_done = false;
    std::size_t best = static_cast<std::size_t>(-1);
    std::optional<OracleWitness> best_witness;
    const std::size_t cap = 2 * workers + 8;

    auto worker = [&] {
        for (;;) {
            std::unique_lock<std::mutex> lk(mu);
            cv_pop.wait(lk, [&] { return !pending.empty() || enqueue_done; });
            if (pending.empty()) return;
            auto [idx, sk] = std::move(pending.front());
            pending.pop_front();
            cv_push.notify_one();
            if (idx > best) continue;
            lk.unlock();
            auto w = detail::oracle_evaluate(m, q, sk);
            if (w) {
                lk.lock();
                if (idx < best) {
                    best = idx;
                    best_witness = std::move(w);
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);

    std::size_t total = 0;
    for_each_skeleton(m.schema, max_items_per_class, [&](const RelationalSkeleton& sk) {
        std::unique_lock<std::mutex> lk(mu);
        const std::size_t idx = total++;
        if (idx > best) return;
        cv_push.wait(lk, [&] { return pending.size() < cap; });
        pending.emplace_back(idx, sk);
        cv_pop.notify_one();
    });
    {
        std::lock_guard<std::mutex> lk(mu);
        enqueue_done = true;
    }
    cv_pop.notify_all();
    for (auto& t : pool) t.join();

    verdict.witness = std::move(best_witness);
    verdict.separated_within_bound = !verdict.witness.has_value();
    verdict.skeletons_checked = verdict.witness ? best + 1 : total;
    return verdict;
}

// Outcome of a faithfulness check on a pair or unshielded triple.
// applicable is false when the requested adjacency structure is absent;
// passed reports the verdict of every sub-check, with violations in notes.
struct FaithfulnessReport {
    bool applicable = false;
    bool passed = false;
    std::vector<std::string> notes;
    RelationalSkeleton skeleton;
    std::string base;
};

namespace detail {

inline const Rve* find_rve(const Agg& agg, const RelationalVariable& cause,
                           const RelationalVariable& effect) {
    for (const auto& e : agg.rves)
        if (e.cause == cause && e.effect == effect) return &e;
    return nullptr;
}

inline void require_graph_variable(const Agg& agg, const RelationalVariable& v) {
    if (!agg.has_rv(v))
        throw std::domain_error("variable " + to_string(v) + " is not in the " + agg.perspective +
                                "-perspective graph");
}

// Terminal items of every other variable, as ground vertices; these are the
// candidate conditioning vertices the checks sweep over.
inline std::vector<GroundVertex> conditioning_pool(
    const RelationalSchema& s, const Agg& agg, const RelationalSkeleton& sk,
    const std::string& base, const std::vector<RelationalVariable>& excluded,
    const std::vector<GroundVertex>& forbidden, std::vector<std::string>& notes, bool& ok) {
    std::vector<GroundVertex> pool;
    for (const auto& t : agg.rvs) {
        if (std::find(excluded.begin(), excluded.end(), t) != excluded.end()) continue;
        for (const auto& item : terminal_set(s, sk, t.path, base)) {
            const GroundVertex vtx{item, t.attr};
            if (std::find(forbidden.begin(), forbidden.end(), vtx) != forbidden.end()) {
                notes.push_back("variable " + to_string(t) + " reaches reserved vertex " +
                                to_string(vtx));
                ok = false;
                continue;
            }
            pool.push_back(vtx);
        }
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.size() > 16) {
        notes.push_back("conditioning pool has " + std::to_string(pool.size()) +
                        " vertices; exact subset sweep refused");
        ok = false;
        pool.clear();
    }
    return pool;
}

// The unique terminal item of a variable in its minimal skeleton.
inline std::optional<std::string> singleton_terminal(const RelationalSchema& s,
                                                     const RelationalSkeleton& sk,
                                                     const RelationalVariable& v,
                                                     const std::string& base,
                                                     std::vector<std::string>& notes, bool& ok) {
    const auto items = terminal_set(s, sk, v.path, base);
    if (items.size() != 1) {
        notes.push_back("terminal set of " + to_string(v) + " has " +
                        std::to_string(items.size()) + " items, expected exactly one");
        ok = false;
        return std::nullopt;
    }
    return *items.begin();
}

}  // namespace detail

// Checks that an adjacency is faithful: on the minimal skeleton of the two
// paths, the lifted edge grounds to a single-item dependence that no
// conditioning subset drawn from the other variables' terminal items can
// block, and those candidate vertices never collide with the pair's own.
// A bounded oracle run corroborates the dependence over whole skeletons.
inline FaithfulnessReport check_adjacency_faithfulness(const Rcm& m, const Agg& agg,
                                                       const RelationalVariable& u,
                                                       const RelationalVariable& v,
                                                       std::size_t max_items_per_class) {
    detail::require_graph_variable(agg, u);
    detail::require_graph_variable(agg, v);
    if (u == v) throw std::invalid_argument("adjacency check requires two distinct variables");
    if (u.path != v.path && intersectable(m.schema, u.path, v.path))
        throw std::domain_error("variables " + to_string(u) + " and " + to_string(v) +
                                " are intersectable; an edge between them would feed back "
                                "through their shared items");

    FaithfulnessReport report;
    const Rve* forward = detail::find_rve(agg, u, v);
    const Rve* backward = forward ? nullptr : detail::find_rve(agg, v, u);
    if (!forward && !backward) {
        report.notes.push_back("variables are not adjacent; check not applicable");
        return report;
    }
    report.applicable = true;
    bool ok = true;

    const auto ms = minimal_skeleton(m.schema, {u.path, v.path});
    report.skeleton = ms.skeleton;
    report.base = ms.base;
    const auto gg = ground_graph(m, ms.skeleton);

    const auto iu = detail::singleton_terminal(m.schema, ms.skeleton, u, ms.base, report.notes, ok);
    const auto iv = detail::singleton_terminal(m.schema, ms.skeleton, v, ms.base, report.notes, ok);
    if (iu && iv) {
        const GroundVertex uv{*iu, u.attr}, vv{*iv, v.attr};
        if (uv == vv) {
            report.notes.push_back("both variables ground to vertex " + to_string(uv));
            ok = false;
        } else {
            const GroundVertex& cause = forward ? uv : vv;
            const GroundVertex& effect = forward ? vv : uv;
            if (!gg.has_edge(cause, effect)) {
                report.notes.push_back("no ground edge " + to_string(cause) + " -> " +
                                       to_string(effect));
                ok = false;
            }
            const auto pool = detail::conditioning_pool(m.schema, agg, ms.skeleton, ms.base,
                                                        {u, v}, {uv, vv}, report.notes, ok);
            for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << pool.size()); ++sel) {
                std::vector<GroundVertex> cond;
                for (std::size_t k = 0; k < pool.size(); ++k)
                    if (sel >> k & 1) cond.push_back(pool[k]);
                if (ground_d_separated(gg, {uv}, {vv}, cond)) {
                    report.notes.push_back("a conditioning subset of " +
                                           std::to_string(cond.size()) + " vertices blocks the pair");
                    ok = false;
                }
            }
        }
    }
    const auto oracle =
        relational_dsep_oracle(m, {agg.perspective, {u}, {v}, {}}, max_items_per_class);
    if (oracle.separated_within_bound) {
        report.notes.push_back("bounded oracle found no ground dependence at bound " +
                               std::to_string(max_items_per_class));
        ok = false;
    }
    report.passed = ok;
    return report;
}

// Checks that an unshielded triple is faithful to its orientation: a
// head-to-head middle keeps the endpoints dependent whenever the middle
// vertex is conditioned, any other shape whenever it is not. Conditioning
// subsets are drawn from the other variables' terminal items in the
// triple's minimal skeleton, and a bounded oracle corroborates at the
// relational level.
inline FaithfulnessReport check_orientation_faithfulness(const Rcm& m, const Agg& agg,
                                                         const RelationalVariable& u,
                                                         const RelationalVariable& v,
                                                         const RelationalVariable& w,
                                                         std::size_t max_items_per_class) {
    detail::require_graph_variable(agg, u);
    detail::require_graph_variable(agg, v);
    detail::require_graph_variable(agg, w);
    if (u == v || v == w || u == w)
        throw std::invalid_argument("orientation check requires three distinct variables");
    for (const auto* end : {&u, &w})
        if (end->path != v.path && intersectable(m.schema, end->path, v.path))
            throw std::domain_error("middle variable " + to_string(v) +
                                    " is intersectable with endpoint " + to_string(*end));
    if (detail::find_rve(agg, u, w) || detail::find_rve(agg, w, u))
        throw std::domain_error("triple is shielded: " + to_string(u) + " and " + to_string(w) +
                                " are adjacent");

    FaithfulnessReport report;
    const bool uv = detail::find_rve(agg, u, v) || detail::find_rve(agg, v, u);
    const bool vw = detail::find_rve(agg, v, w) || detail::find_rve(agg, w, v);
    if (!uv || !vw) {
        report.notes.push_back("triple is not connected through the middle; check not applicable");
        return report;
    }
    report.applicable = true;
    bool ok = true;
    const bool collider = detail::find_rve(agg, u, v) && detail::find_rve(agg, w, v);

    const auto ms = minimal_skeleton(m.schema, {u.path, v.path, w.path});
    report.skeleton = ms.skeleton;
    report.base = ms.base;
    const auto gg = ground_graph(m, ms.skeleton);

    const auto iu = detail::singleton_terminal(m.schema, ms.skeleton, u, ms.base, report.notes, ok);
    const auto iv = detail::singleton_terminal(m.schema, ms.skeleton, v, ms.base, report.notes, ok);
    const auto iw = detail::singleton_terminal(m.schema, ms.skeleton, w, ms.base, report.notes, ok);
    if (iu && iv && iw) {
        const GroundVertex uvx{*iu, u.attr}, vvx{*iv, v.attr}, wvx{*iw, w.attr};
        if (uvx == vvx || vvx == wvx || uvx == wvx) {
            report.notes.push_back("triple grounds to colliding vertices");
            ok = false;
        } else {
            const auto pool = detail::conditioning_pool(m.schema, agg, ms.skeleton, ms.base,
                                                        {u, v, w}, {uvx, vvx, wvx}, report.notes,
                                                        ok);
            for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << pool.size()); ++sel) {
                std::vector<GroundVertex> cond;
                if (collider) cond.push_back(vvx);
                for (std::size_t k = 0; k < pool.size(); ++k)
                    if (sel >> k & 1) cond.push_back(pool[k]);
                if (ground_d_separated(gg, {uvx}, {wvx}, cond)) {
                    report.notes.push_back(std::string("a conditioning subset ") +
                                           (collider ? "containing" : "omitting") +
                                           " the middle vertex blocks the endpoints");
                    ok = false;
                }
            }
        }
    }
    const CiQuery probe{agg.perspective,
                        {u},
                        {w},
                        collider ? std::vector<RelationalVariable>{v}
                                 : std::vector<RelationalVariable>{}};
    const auto oracle = relational_dsep_oracle(m, probe, max_items_per_class);
    if (oracle.separated_within_bound) {
        report.notes.push_back("bounded oracle found no ground dependence at bound " +
                               std::to_string(max_items_per_class));
        ok = false;
    }
    report.passed = ok;
    return report;
}

}  // namespace rcmkit
