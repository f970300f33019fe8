/* oracles.hh -- independent brute-force reference implementations used by the tests
 *
 * Everything here recomputes results from first principles on materialized
 * finite prefixes (or by exhaustive enumeration), deliberately avoiding the
 * library's per-copy decompositions and graph analyses.
 */

#ifndef WNWA_TESTS_ORACLES_HH_
#define WNWA_TESTS_ORACLES_HH_

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "wnwa/error.hh"
#include "wnwa/nested_word.hh"
#include "wnwa/nwa.hh"
#include "wnwa/weighted_nwa.hh"

namespace oracles {

// Direct stack matcher over a materialized letter sequence.
inline wnwa::Matching match_by_scan(const std::vector<wnwa::TaggedLetter>& letters) {
    wnwa::Matching m;
    std::vector<std::size_t> open;
    for (std::size_t i = 1; i <= letters.size(); ++i) {
        switch (letters[i - 1].tag) {
            case wnwa::Tag::Call: open.push_back(i); break;
            case wnwa::Tag::Return:
                if (open.empty()) m.pending_returns.push_back(i);
                else {
                    m.pairs.emplace_back(open.back(), i);
                    open.pop_back();
                }
                break;
            case wnwa::Tag::Internal: break;
        }
    }
    m.pending_calls = open;
    return m;
}

// Step positions by the definition: no matched pair (j,k) with j <= i < k.
// Only sound for positions whose potential partners lie inside the horizon.
inline bool is_step_by_scan(const wnwa::Matching& m, std::size_t i) {
    for (auto [j, k] : m.pairs)
        if (j <= i && i < k) return false;
    return true;
}

// Bracket-free positions by the definition: no matched pair strictly around i,
// no pending call strictly before, no pending return strictly after (within
// the horizon; pending calls of the scan that are really matched beyond the
// horizon must be handled by the caller's choice of horizon).
inline bool is_bracket_free_by_scan(const wnwa::Matching& m, std::size_t i) {
    for (auto [j, k] : m.pairs)
        if (j < i && i < k) return false;
    for (std::size_t p : m.pending_calls)
        if (p < i) return false;
    for (std::size_t p : m.pending_returns)
        if (p > i) return false;
    return true;
}

// Materialize prefix + `copies` loop copies.
inline std::vector<wnwa::TaggedLetter> materialize(const wnwa::LassoNestedWord& w,
                                                   std::size_t copies) {
    std::vector<wnwa::TaggedLetter> out = w.prefix();
    for (std::size_t c = 0; c < copies; ++c)
        out.insert(out.end(), w.loop().begin(), w.loop().end());
    return out;
}

// ---------------------------------------------------------------------------
// Naive stair Muller membership: literal run enumeration with an explicit
// stack, plus exhaustive subset analysis of the per-copy crossing relation.
// Exponential everywhere; only for tiny automata and words.
// ---------------------------------------------------------------------------

struct NaiveRun {
    wnwa::StateId end = 0;
    std::vector<wnwa::StateId> step_states; // states after step positions, in order
};

// Enumerate every run over one finite segment, starting at `from` with an
// empty stack.  `pairs`, `pending_calls`, `pending_returns` describe the
// segment-local matching (1-based).  Records the state reached after each
// position whose matched depth is zero afterwards.
inline void naive_segment_runs(const wnwa::Nwa& a, const std::vector<wnwa::TaggedLetter>& ls,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const std::vector<std::size_t>& pending_returns,
                               wnwa::StateId from, std::vector<NaiveRun>& out,
                               std::size_t run_cap = 200000) {
    std::size_t n = ls.size();
    std::vector<int> depth_after(n + 1, 0);
    for (auto [j, k] : pairs)
        for (std::size_t i = j; i < k; ++i) ++depth_after[i];
    std::vector<bool> is_pending_ret(n + 1, false);
    for (std::size_t p : pending_returns) is_pending_ret[p] = true;

    struct Node {
        std::size_t i;
        wnwa::StateId cur;
        std::vector<wnwa::StateId> stack;
        std::vector<wnwa::StateId> steps;
    };
    std::vector<Node> todo{{1, from, {}, {}}};
    while (!todo.empty()) {
        Node nd = std::move(todo.back());
        todo.pop_back();
        if (nd.i > n) {
            out.push_back(NaiveRun{nd.cur, nd.steps});
            if (out.size() > run_cap)
                throw wnwa::Error(wnwa::ErrorKind::TooManyRuns, "naive run enumeration exploded");
            continue;
        }
        const auto& l = ls[nd.i - 1];
        std::vector<std::pair<wnwa::StateId, bool>> moves; // (target, pushes?) for calls
        switch (l.tag) {
            case wnwa::Tag::Internal:
                for (wnwa::StateId t : a.delta_int(nd.cur, l)) moves.emplace_back(t, false);
                break;
            case wnwa::Tag::Call:
                for (wnwa::StateId t : a.delta_call(nd.cur, l)) moves.emplace_back(t, true);
                break;
            case wnwa::Tag::Return:
                if (is_pending_ret[nd.i]) {
                    for (wnwa::StateId qi : a.initial)
                        for (wnwa::StateId t : a.delta_ret(nd.cur, qi, l))
                            moves.emplace_back(t, false);
                } else {
                    for (wnwa::StateId t : a.delta_ret(nd.cur, nd.stack.back(), l))
                        moves.emplace_back(t, false);
                }
                break;
        }
        for (auto [t, pushes] : moves) {
            Node nx = nd;
            if (pushes) nx.stack.push_back(nd.cur);
            else if (l.tag == wnwa::Tag::Return && !is_pending_ret[nd.i]) nx.stack.pop_back();
            nx.cur = t;
            nx.i = nd.i + 1;
            if (depth_after[nd.i] == 0) nx.steps.push_back(t);
            todo.push_back(std::move(nx));
        }
    }
}

// Naive membership for lasso words: enumerate prefix runs, per-copy runs from
// every discovered boundary state, then test every subset of the resulting
// crossing edges for strong connectivity and acceptance of its step union.
inline bool naive_membership(const wnwa::Nwa& a, const wnwa::LassoNestedWord& w) {
    // prefix boundary states
    std::set<wnwa::StateId> boundary;
    {
        std::vector<NaiveRun> runs;
        for (wnwa::StateId qi : a.initial)
            naive_segment_runs(a, w.prefix(), w.prefix_pairs(), w.prefix_pending_returns(), qi,
                               runs);
        for (const auto& r : runs) boundary.insert(r.end);
    }
    if (boundary.empty()) return false;

    // per-copy crossing edges, discovered by iteration
    struct Edge {
        wnwa::StateId from, to;
        wnwa::StateSet steps;
        bool operator<(const Edge& o) const {
            return std::tie(from, to, steps) < std::tie(o.from, o.to, o.steps);
        }
    };
    std::set<Edge> edges;
    std::set<wnwa::StateId> seen;
    std::vector<wnwa::StateId> work(boundary.begin(), boundary.end());
    while (!work.empty()) {
        wnwa::StateId q = work.back();
        work.pop_back();
        if (!seen.insert(q).second) continue;
        std::vector<NaiveRun> runs;
        naive_segment_runs(a, w.loop(), w.loop_pairs(), {}, q, runs);
        for (const auto& r : runs) {
            wnwa::StateSet s(r.step_states.begin(), r.step_states.end());
            wnwa::normalize_set(s);
            edges.insert(Edge{q, r.end, s});
            if (!seen.count(r.end)) work.push_back(r.end);
        }
    }
    std::vector<Edge> ev(edges.begin(), edges.end());
    if (ev.size() > 18)
        throw wnwa::Error(wnwa::ErrorKind::LimitExceeded, "naive edge set too large");

    // subsets as bitmasks
    for (std::size_t mask = 1; mask < (std::size_t(1) << ev.size()); ++mask) {
        std::set<wnwa::StateId> nodes;
        for (std::size_t e = 0; e < ev.size(); ++e)
            if (mask >> e & 1) {
                nodes.insert(ev[e].from);
                nodes.insert(ev[e].to);
            }
        // mutual reachability using only subset edges
        bool strongly = true;
        for (wnwa::StateId s : nodes) {
            std::set<wnwa::StateId> reach{s};
            bool grew = true;
            while (grew) {
                grew = false;
                for (std::size_t e = 0; e < ev.size(); ++e)
                    if ((mask >> e & 1) && reach.count(ev[e].from) && !reach.count(ev[e].to)) {
                        reach.insert(ev[e].to);
                        grew = true;
                    }
            }
            if (reach != nodes) {
                strongly = false;
                break;
            }
        }
        if (!strongly) continue;
        wnwa::StateSet u;
        for (std::size_t e = 0; e < ev.size(); ++e)
            if (mask >> e & 1) u = wnwa::set_union(u, ev[e].steps);
        if (a.accept.member(u)) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Naive weighted behaviors: literal run enumeration plus direct cycle analysis
// (transitive closure and vertex-simple cycle listing instead of SCC + Karp).
// ---------------------------------------------------------------------------

struct NaiveWeightedRun {
    wnwa::StateId end = 0;
    std::vector<wnwa::StateId> step_states;
    double total = 0; // sum of (scaled) transition weights along the run
};

// Weighted twin of naive_segment_runs: zero-weight transitions are absent,
// weights at position i are scaled by scale[i-1] before summing.
inline void naive_weighted_segment_runs(
    const wnwa::WeightedNwa& a, const std::vector<wnwa::TaggedLetter>& ls,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    const std::vector<std::size_t>& pending_returns, const std::vector<double>& scale,
    wnwa::StateId from, std::vector<NaiveWeightedRun>& out, std::size_t run_cap = 400000) {
    std::size_t n = ls.size();
    std::vector<int> depth_after(n + 1, 0);
    for (auto [j, k] : pairs)
        for (std::size_t i = j; i < k; ++i) ++depth_after[i];
    std::vector<bool> is_pending_ret(n + 1, false);
    for (std::size_t p : pending_returns) is_pending_ret[p] = true;

    struct Node {
        std::size_t i;
        wnwa::StateId cur;
        std::vector<wnwa::StateId> stack;
        std::vector<wnwa::StateId> steps;
        double total;
    };
    std::vector<Node> todo{{1, from, {}, {}, 0.0}};
    while (!todo.empty()) {
        Node nd = std::move(todo.back());
        todo.pop_back();
        if (nd.i > n) {
            out.push_back(NaiveWeightedRun{nd.cur, nd.steps, nd.total});
            if (out.size() > run_cap)
                throw wnwa::Error(wnwa::ErrorKind::TooManyRuns, "naive run enumeration exploded");
            continue;
        }
        const auto& l = ls[nd.i - 1];
        std::vector<std::tuple<wnwa::StateId, double, bool>> moves; // (target, weight, pushes?)
        auto keep = [&](const std::vector<wnwa::WeightedTarget>& ts, bool pushes) {
            for (const auto& t : ts)
                if (!a.monoid.is_zero(t.weight)) moves.emplace_back(t.to, t.weight, pushes);
        };
        switch (l.tag) {
            case wnwa::Tag::Internal: keep(a.weight_int(nd.cur, l), false); break;
            case wnwa::Tag::Call: keep(a.weight_call(nd.cur, l), true); break;
            case wnwa::Tag::Return:
                if (is_pending_ret[nd.i]) {
                    for (wnwa::StateId qi : a.initial) keep(a.weight_ret(nd.cur, qi, l), false);
                } else {
                    keep(a.weight_ret(nd.cur, nd.stack.back(), l), false);
                }
                break;
        }
        for (auto [t, wt, pushes] : moves) {
            Node nx = nd;
            if (pushes) nx.stack.push_back(nd.cur);
            else if (l.tag == wnwa::Tag::Return && !is_pending_ret[nd.i]) nx.stack.pop_back();
            nx.cur = t;
            nx.i = nd.i + 1;
            nx.total += scale[nd.i - 1] * wt;
            if (depth_after[nd.i] == 0) nx.steps.push_back(t);
            todo.push_back(std::move(nx));
        }
    }
}

// Acceptance of a lasso word from first principles, sized for up to a dozen
// states: literal run segments give crossing edges, and the word is accepted
// iff some accepting candidate set F owns a mutually-reachable group of
// F-compatible edges whose step union is exactly F (a run can tour every edge
// of such a group forever, and conversely the tail of an accepted run is one).
inline bool naive_lasso_accepts(const wnwa::Nwa& a, const wnwa::LassoNestedWord& w,
                                std::size_t run_cap = 400000) {
    if (a.state_count > 12)
        throw wnwa::Error(wnwa::ErrorKind::LimitExceeded, "naive acceptance needs a tiny automaton");
    std::set<wnwa::StateId> boundary;
    {
        std::vector<NaiveRun> runs;
        for (wnwa::StateId qi : a.initial)
            naive_segment_runs(a, w.prefix(), w.prefix_pairs(), w.prefix_pending_returns(), qi,
                               runs, run_cap);
        for (const auto& r : runs) boundary.insert(r.end);
    }
    if (boundary.empty()) return false;

    struct Edge {
        wnwa::StateId from, to;
        wnwa::StateSet steps;
        bool operator<(const Edge& o) const {
            return std::tie(from, to, steps) < std::tie(o.from, o.to, o.steps);
        }
    };
    std::set<Edge> edge_set;
    std::set<wnwa::StateId> seen;
    std::vector<wnwa::StateId> work(boundary.begin(), boundary.end());
    while (!work.empty()) {
        wnwa::StateId q = work.back();
        work.pop_back();
        if (!seen.insert(q).second) continue;
        std::vector<NaiveRun> runs;
        naive_segment_runs(a, w.loop(), w.loop_pairs(), {}, q, runs, run_cap);
        for (const auto& r : runs) {
            wnwa::StateSet s(r.step_states.begin(), r.step_states.end());
            wnwa::normalize_set(s);
            edge_set.insert(Edge{q, r.end, s});
            if (!seen.count(r.end)) work.push_back(r.end);
        }
    }
    std::vector<Edge> ev(edge_set.begin(), edge_set.end());
    for (std::size_t mask = 1; mask < (std::size_t(1) << a.state_count); ++mask) {
        wnwa::StateSet f;
        for (std::size_t q = 0; q < a.state_count; ++q)
            if (mask >> q & 1) f.push_back(static_cast<wnwa::StateId>(q));
        if (!a.accept.member(f)) continue;
        std::vector<std::size_t> which;
        for (std::size_t e = 0; e < ev.size(); ++e)
            if (wnwa::subset_of(ev[e].steps, f)) which.push_back(e);
        if (which.empty()) continue;
        std::set<wnwa::StateId> nodes;
        for (std::size_t e : which) {
            nodes.insert(ev[e].from);
            nodes.insert(ev[e].to);
        }
        std::map<wnwa::StateId, std::set<wnwa::StateId>> reach;
        for (wnwa::StateId s : nodes) {
            std::set<wnwa::StateId>& r = reach[s];
            bool grew = true;
            while (grew) {
                grew = false;
                for (std::size_t e : which)
                    if ((ev[e].from == s || r.count(ev[e].from)) && !r.count(ev[e].to)) {
                        r.insert(ev[e].to);
                        grew = true;
                    }
            }
        }
        auto mutual = [&](wnwa::StateId x, wnwa::StateId y) {
            return (x == y || (reach[x].count(y) && reach[y].count(x)));
        };
        std::set<wnwa::StateId> grouped;
        for (wnwa::StateId s : nodes) {
            if (grouped.count(s)) continue;
            std::vector<wnwa::StateId> group;
            for (wnwa::StateId t : nodes)
                if (mutual(s, t)) group.push_back(t);
            for (wnwa::StateId t : group) grouped.insert(t);
            std::vector<std::size_t> inside;
            for (std::size_t e : which) {
                bool from_in = std::find(group.begin(), group.end(), ev[e].from) != group.end();
                bool to_in = std::find(group.begin(), group.end(), ev[e].to) != group.end();
                if (from_in && to_in && reach[ev[e].to].count(ev[e].from)) inside.push_back(e);
            }
            if (inside.empty()) continue;
            wnwa::StateSet u;
            for (std::size_t e : inside) u = wnwa::set_union(u, ev[e].steps);
            if (u == f) return true;
        }
    }
    return false;
}

// Ratio of bracket-free positions over the first >= min_n positions (rounded
// up to whole loop copies).  Banned stretches come straight from the lasso's
// edge lists via a difference array: the strict inside of every matched pair,
// everything before a pending return, everything after a pending call.
inline double bracket_free_ratio(const wnwa::LassoNestedWord& w, std::size_t min_n) {
    std::size_t P = w.prefix_length(), L = w.loop_length();
    std::size_t copies = min_n > P ? (min_n - P + L - 1) / L : 1;
    if (copies == 0) copies = 1;
    std::size_t n = P + copies * L;
    std::vector<int> diff(n + 2, 0);
    auto ban = [&](std::size_t lo, std::size_t hi) { // inclusive 1-based positions
        if (lo > hi || lo > n) return;
        diff[lo] += 1;
        diff[std::min(hi, n) + 1] -= 1;
    };
    for (auto [j, k] : w.prefix_pairs()) ban(j + 1, k - 1);
    for (std::size_t r : w.prefix_pending_returns())
        if (r >= 2) ban(1, r - 1);
    for (std::size_t p : w.prefix_pending_calls()) ban(p + 1, n);
    for (std::size_t c = 0; c < copies; ++c) {
        std::size_t off = P + c * L;
        for (auto [j, k] : w.loop_pairs()) ban(j + off + 1, k + off - 1);
        for (std::size_t p : w.loop_pending_calls()) ban(p + off + 1, n);
    }
    std::size_t free_count = 0;
    int depth = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        depth += diff[i];
        if (depth == 0) ++free_count;
    }
    return static_cast<double>(free_count) / static_cast<double>(n);
}

// Exact lim-avg behavior from first principles: literal per-copy run segments
// give weighted crossing edges; for every accepted candidate set F, mutual
// reachability (by closure iteration) groups the F-compatible edges, and the
// best value is the maximum mean over vertex-simple cycles inside a group
// whose step union is exactly F.
inline double naive_limavg_behavior(const wnwa::WeightedNwa& a, const wnwa::LassoNestedWord& w,
                                    std::size_t run_cap = 400000) {
    std::size_t L = w.loop_length();
    std::set<wnwa::StateId> boundary;
    {
        std::vector<NaiveWeightedRun> runs;
        std::vector<double> ones(w.prefix_length(), 1.0);
        for (wnwa::StateId qi : a.initial)
            naive_weighted_segment_runs(a, w.prefix(), w.prefix_pairs(),
                                        w.prefix_pending_returns(), ones, qi, runs, run_cap);
        for (const auto& r : runs) boundary.insert(r.end);
    }
    if (boundary.empty()) return a.monoid.zero();

    struct WEdge {
        wnwa::StateId from, to;
        wnwa::StateSet steps;
        double total;
    };
    // Parallel run segments with the same endpoints and step set only compete
    // on total, and a larger total never hurts a mean, so keep the max.
    std::map<std::tuple<wnwa::StateId, wnwa::StateId, wnwa::StateSet>, double> edge_map;
    std::set<wnwa::StateId> seen;
    std::vector<wnwa::StateId> work(boundary.begin(), boundary.end());
    std::vector<double> ones(L, 1.0);
    while (!work.empty()) {
        wnwa::StateId q = work.back();
        work.pop_back();
        if (!seen.insert(q).second) continue;
        std::vector<NaiveWeightedRun> runs;
        naive_weighted_segment_runs(a, w.loop(), w.loop_pairs(), {}, ones, q, runs, run_cap);
        for (const auto& r : runs) {
            wnwa::StateSet s(r.step_states.begin(), r.step_states.end());
            wnwa::normalize_set(s);
            auto key = std::make_tuple(q, r.end, s);
            auto it = edge_map.find(key);
            if (it == edge_map.end())
                edge_map.emplace(key, r.total);
            else
                it->second = std::max(it->second, r.total);
            if (!seen.count(r.end)) work.push_back(r.end);
        }
    }
    std::vector<WEdge> ev;
    for (const auto& [key, total] : edge_map)
        ev.push_back(WEdge{std::get<0>(key), std::get<1>(key), std::get<2>(key), total});
    if (a.state_count > 12)
        throw wnwa::Error(wnwa::ErrorKind::LimitExceeded, "naive behavior needs a tiny automaton");

    double best = -wnwa::val_inf;
    for (std::size_t mask = 1; mask < (std::size_t(1) << a.state_count); ++mask) {
        wnwa::StateSet f;
        for (std::size_t q = 0; q < a.state_count; ++q)
            if (mask >> q & 1) f.push_back(static_cast<wnwa::StateId>(q));
        if (!a.accept.member(f)) continue;
        std::vector<std::size_t> which;
        for (std::size_t e = 0; e < ev.size(); ++e)
            if (wnwa::subset_of(ev[e].steps, f)) which.push_back(e);
        if (which.empty()) continue;
        // transitive closure over the restricted edges
        std::set<wnwa::StateId> nodes;
        for (std::size_t e : which) {
            nodes.insert(ev[e].from);
            nodes.insert(ev[e].to);
        }
        std::map<wnwa::StateId, std::set<wnwa::StateId>> reach;
        for (wnwa::StateId s : nodes) {
            std::set<wnwa::StateId>& r = reach[s];
            bool grew = true;
            while (grew) {
                grew = false;
                for (std::size_t e : which)
                    if ((ev[e].from == s || r.count(ev[e].from)) && !r.count(ev[e].to)) {
                        r.insert(ev[e].to);
                        grew = true;
                    }
            }
        }
        auto mutual = [&](wnwa::StateId x, wnwa::StateId y) {
            return (x == y || (reach[x].count(y) && reach[y].count(x)));
        };
        // groups of mutually reachable nodes
        std::set<wnwa::StateId> grouped;
        for (wnwa::StateId s : nodes) {
            if (grouped.count(s)) continue;
            std::vector<wnwa::StateId> group;
            for (wnwa::StateId t : nodes)
                if (mutual(s, t)) group.push_back(t);
            for (wnwa::StateId t : group) grouped.insert(t);
            // edges internal to the group and on a cycle (endpoints mutually reachable)
            std::vector<std::size_t> inside;
            for (std::size_t e : which) {
                bool from_in = std::find(group.begin(), group.end(), ev[e].from) != group.end();
                bool to_in = std::find(group.begin(), group.end(), ev[e].to) != group.end();
                if (from_in && to_in && reach[ev[e].to].count(ev[e].from)) inside.push_back(e);
            }
            if (inside.empty()) continue;
            wnwa::StateSet u;
            for (std::size_t e : inside) u = wnwa::set_union(u, ev[e].steps);
            if (u != f) continue;
            // vertex-simple cycles inside the group
            for (wnwa::StateId start : group) {
                struct Path {
                    wnwa::StateId at;
                    std::set<wnwa::StateId> visited;
                    double total;
                    std::size_t len;
                };
                std::vector<Path> stack{{start, {start}, 0.0, 0}};
                while (!stack.empty()) {
                    Path p = std::move(stack.back());
                    stack.pop_back();
                    for (std::size_t e : inside) {
                        if (ev[e].from != p.at) continue;
                        if (ev[e].to == start) {
                            double mean = (p.total + ev[e].total) /
                                          static_cast<double>((p.len + 1) * L);
                            best = std::max(best, mean);
                        } else if (!p.visited.count(ev[e].to)) {
                            Path nx = p;
                            nx.at = ev[e].to;
                            nx.visited.insert(ev[e].to);
                            nx.total += ev[e].total;
                            nx.len += 1;
                            stack.push_back(std::move(nx));
                        }
                    }
                }
            }
        }
    }
    return best == -wnwa::val_inf ? a.monoid.zero() : best;
}

// Discounted behavior from first principles: enumerate every literal run over
// prefix + `copies` loop copies with per-position discounting, keep those
// whose final state still accepts the loop residual (naive membership), and
// take the best discounted partial sum.  The caller owns the tail bound.
struct NaiveDisc {
    double value = 0;
    std::size_t horizon = 0; // positions enumerated
};

inline NaiveDisc naive_disc_behavior(const wnwa::WeightedNwa& a, const wnwa::LassoNestedWord& w,
                                     std::size_t copies, std::size_t run_cap = 400000) {
    double lambda = a.monoid.discount();
    std::vector<wnwa::TaggedLetter> letters = materialize(w, copies);
    std::vector<std::pair<std::size_t, std::size_t>> pairs = w.prefix_pairs();
    for (std::size_t c = 0; c < copies; ++c) {
        std::size_t off = w.prefix_length() + c * w.loop_length();
        for (auto [j, k] : w.loop_pairs()) pairs.emplace_back(j + off, k + off);
    }
    std::vector<double> scale(letters.size());
    double pw = 1.0;
    for (auto& s : scale) {
        s = pw;
        pw *= lambda;
    }
    std::vector<NaiveWeightedRun> runs;
    for (wnwa::StateId qi : a.initial)
        naive_weighted_segment_runs(a, letters, pairs, w.prefix_pending_returns(), scale, qi,
                                    runs, run_cap);
    std::map<wnwa::StateId, bool> capable;
    wnwa::LassoNestedWord residual({}, w.loop());
    wnwa::Nwa base = wnwa::to_nwa(a);
    auto can_accept = [&](wnwa::StateId q) {
        auto it = capable.find(q);
        if (it != capable.end()) return it->second;
        wnwa::Nwa from_q = base;
        from_q.initial = {q};
        return capable.emplace(q, naive_lasso_accepts(from_q, residual)).first->second;
    };
    NaiveDisc out;
    out.horizon = letters.size();
    double best = -wnwa::val_inf;
    for (const auto& r : runs)
        if (can_accept(r.end)) best = std::max(best, r.total);
    out.value = best == -wnwa::val_inf ? a.monoid.zero() : best;
    return out;
}

} // namespace oracles

#endif // WNWA_TESTS_ORACLES_HH_
