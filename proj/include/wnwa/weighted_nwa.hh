/* weighted_nwa.hh -- weighted stair Muller nested-word automata and their behavior engines
 *
 * A weighted automaton assigns each transition a weight from an omega-valuation
 * monoid; the monoid's zero encodes absent transitions.  The behavior on a word
 * is the +-fold (sup for the quantitative monoids) over accepted runs of Val of
 * the run's weight sequence.
 *
 * Exact engines exist for the two sup-flavored monoids:
 *
 *   lim-avg   One weighted step edge (q, q', S, best total) per realizable loop
 *             copy crossing, maximizing the in-copy total per (q, q', S) --
 *             optimal segments concatenate freely because copies interact only
 *             through boundary states.  A run's value is then a mean over the
 *             edges it loops through: within any strongly connected edge set
 *             whose step union the family accepts, the supremum equals the
 *             maximum mean cycle (follow the best cycle, detour rarely to
 *             cover the remaining edges; the detours are sparse and bounded,
 *             so the liminf average is untouched).  Karp's algorithm per
 *             qualifying SCC, divided by the loop length.
 *
 *   disc      At a copy boundary the residual word is always loop^omega and
 *             open calls are never answered, so extendability to an accepted
 *             run depends on the boundary state alone.  Restrict every
 *             boundary to those accept-capable states and run a finite-horizon
 *             discounted dynamic program; the cut tail is certified by
 *             lambda^N * maxweight / (1 - lambda) <= eps.
 *
 * The boolean monoid routes through unweighted membership, and a bounded
 * enumeration oracle provides monoid-agnostic estimates for cross-checks.
 */

#ifndef WNWA_WEIGHTED_NWA_HH_
#define WNWA_WEIGHTED_NWA_HH_

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hh"
#include "nested_word.hh"
#include "nwa.hh"
#include "text_format.hh"
#include "valuation_monoid.hh"

namespace wnwa {

struct WeightedTarget {
    StateId to = 0;
    Value weight = 0;
};

struct WeightedNwa {
    explicit WeightedNwa(ValuationMonoid m) : monoid(std::move(m)) {}

    ValuationMonoid monoid;
    Alphabet alphabet;
    std::size_t state_count = 0;
    std::vector<StateId> initial;
    std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> weight_call,
        weight_int;
    // (current state, hierarchical state, letter)
    std::function<std::vector<WeightedTarget>(StateId, StateId, const TaggedLetter&)> weight_ret;
    AcceptFamily accept;
    bool deterministic = false;
    Value weight_bound = 0; // max |w| over present transition weights
    std::vector<std::string> state_names; // optional

    std::string name_of(StateId q) const {
        if (q < state_names.size()) return state_names[q];
        return "q" + std::to_string(q);
    }
};

// Present-transition support automaton (drops zero weights, keeps the family).
inline Nwa to_nwa(const WeightedNwa& a) {
    Nwa b;
    b.alphabet = a.alphabet;
    b.state_count = a.state_count;
    b.initial = a.initial;
    ValuationMonoid m = a.monoid;
    auto strip1 = [m](std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> f) {
        return [f, m](StateId q, const TaggedLetter& l) -> StateSet {
            StateSet s;
            for (const auto& t : f(q, l))
                if (!m.is_zero(t.weight)) set_insert(s, t.to);
            return s;
        };
    };
    b.delta_call = strip1(a.weight_call);
    b.delta_int = strip1(a.weight_int);
    auto fr = a.weight_ret;
    b.delta_ret = [fr, m](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        StateSet s;
        for (const auto& t : fr(q, h, l))
            if (!m.is_zero(t.weight)) set_insert(s, t.to);
        return s;
    };
    b.accept = a.accept;
    b.deterministic = a.deterministic;
    b.state_names = a.state_names;
    return b;
}

// ---------------------------------------------------------------------------
// Max-plus simulation over nesting trees (shared by both quantitative engines)
// ---------------------------------------------------------------------------

namespace detail {

// best accumulated weight per state
using BestMap = std::map<StateId, Value>;

inline void relax(BestMap& m, StateId q, Value v) {
    auto [it, fresh] = m.emplace(q, v);
    if (!fresh && v > it->second) it->second = v;
}

// Weighted analogue of SegmentRunner: propagates, per reachable state, the
// maximum accumulated weight (weights scaled by a per-position factor, so the
// discounted engine can reuse it).  Assumes a sup/+ monoid: the quantitative
// engines reject the boolean monoid up front.
class WeightedSegmentRunner {
public:
    WeightedSegmentRunner(const WeightedNwa& a, const std::vector<TaggedLetter>& letters,
                          const std::vector<SegmentItem>& items, std::vector<double> scale)
        : a_(a), letters_(letters), items_(items), scale_(std::move(scale)) {}

    BestMap run(BestMap cur) { return run_items(items_, std::move(cur)); }

    BestMap step_item(const SegmentItem& it, const BestMap& cur) {
        BestMap next;
        switch (it.kind) {
            case SegmentItem::Kind::Internal:
                for (const auto& [q, v] : cur)
                    for (const auto& t : present(a_.weight_int(q, letters_[it.pos - 1]), it.pos))
                        relax(next, t.to, v + t.weight);
                break;
            case SegmentItem::Kind::PendingCall:
                for (const auto& [q, v] : cur)
                    for (const auto& t : present(a_.weight_call(q, letters_[it.pos - 1]), it.pos))
                        relax(next, t.to, v + t.weight);
                break;
            case SegmentItem::Kind::PendingReturn:
                // each initial-state choice is a distinct run; sup folds them
                for (const auto& [q, v] : cur)
                    for (StateId qi : a_.initial)
                        for (const auto& t :
                             present(a_.weight_ret(q, qi, letters_[it.pos - 1]), it.pos))
                            relax(next, t.to, v + t.weight);
                break;
            case SegmentItem::Kind::Block:
                for (const auto& [q, v] : cur)
                    for (const auto& [to, w] : block_exits(it, q)) relax(next, to, v + w);
                break;
        }
        return next;
    }

private:
    // prune absent (zero-weight) entries, reject weights outside the finite
    // carrier, and apply the position scale
    std::vector<WeightedTarget> present(std::vector<WeightedTarget> raw, std::size_t pos) const {
        std::vector<WeightedTarget> out;
        for (auto& t : raw) {
            if (a_.monoid.is_zero(t.weight)) continue;
            if (!std::isfinite(t.weight))
                throw Error(ErrorKind::NonBoundedWeights,
                            "transition weight " + format_value(t.weight) +
                                " is outside the finite carrier");
            t.weight *= scale_[pos - 1];
            out.push_back(t);
        }
        return out;
    }

    const BestMap& block_exits(const SegmentItem& b, StateId q) {
        auto key = std::make_pair(&b, q);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        BestMap inner;
        for (const auto& c : present(a_.weight_call(q, letters_[b.pos - 1]), b.pos))
            for (const auto& [r, v] : run_items(b.children, BestMap{{c.to, c.weight}}))
                relax(inner, r, v);
        BestMap exits;
        for (const auto& [r, v] : inner)
            for (const auto& t : present(a_.weight_ret(r, q, letters_[b.end - 1]), b.end))
                relax(exits, t.to, v + t.weight);
        return memo_.emplace(key, std::move(exits)).first->second;
    }

    BestMap run_items(const std::vector<SegmentItem>& items, BestMap cur) {
        for (const auto& it : items) {
            if (cur.empty()) break;
            cur = step_item(it, cur);
        }
        return cur;
    }

    const WeightedNwa& a_;
    const std::vector<TaggedLetter>& letters_;
    const std::vector<SegmentItem>& items_;
    std::vector<double> scale_;
    std::map<std::pair<const SegmentItem*, StateId>, BestMap> memo_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Weighted step graph over one loop copy
// ---------------------------------------------------------------------------

struct WeightedStepEdge {
    StateId from = 0, to = 0;
    StateSet steps;          // states at the copy's step positions
    Value best_total = 0;    // max in-copy total among segments realizing (from, to, steps)
    std::size_t length = 0;  // positions spanned (the loop length)
};

class WeightedLoopStepGraph {
public:
    WeightedLoopStepGraph(const WeightedNwa& a, const LassoNestedWord& w,
                          std::size_t pair_cap = 2000000)
        : letters_(w.loop()),
          items_(segment_items(w.loop_length(), w.loop_pairs(), w.loop_pending_calls(), {})),
          runner_(a, letters_, items_, std::vector<double>(w.loop_length(), 1.0)),
          length_(w.loop_length()),
          cap_(pair_cap) {}

    const std::vector<WeightedStepEdge>& edges_from(StateId q) {
        auto it = cache_.find(q);
        if (it != cache_.end()) return it->second;
        std::map<std::pair<StateId, StateSet>, Value> frontier{{{q, {}}, 0.0}};
        for (const auto& item : items_) {
            std::map<std::pair<StateId, StateSet>, Value> next;
            for (const auto& [key, v] : frontier) {
                for (const auto& [t, w] :
                     runner_.step_item(item, detail::BestMap{{key.first, 0.0}})) {
                    StateSet s2 = key.second;
                    set_insert(s2, t); // every top-level item lands on a step position
                    auto [jt, fresh] = next.emplace(std::make_pair(t, std::move(s2)), v + w);
                    if (!fresh && v + w > jt->second) jt->second = v + w;
                }
                if (next.size() > cap_)
                    throw Error(ErrorKind::LimitExceeded,
                                "weighted step graph exceeded " + std::to_string(cap_) +
                                    " (state, step-set) pairs");
            }
            frontier = std::move(next);
        }
        std::vector<WeightedStepEdge> out;
        out.reserve(frontier.size());
        for (const auto& [key, v] : frontier)
            out.push_back(WeightedStepEdge{q, key.first, key.second, v, length_});
        return cache_.emplace(q, std::move(out)).first->second;
    }

private:
    const std::vector<TaggedLetter>& letters_;
    std::vector<SegmentItem> items_;
    detail::WeightedSegmentRunner runner_;
    std::size_t length_;
    std::size_t cap_;
    std::unordered_map<StateId, std::vector<WeightedStepEdge>> cache_;
};

// ---------------------------------------------------------------------------
// lim-avg engine
// ---------------------------------------------------------------------------

namespace detail {

// Karp's maximum mean cycle over a strongly connected multigraph given as
// (from, to, weight) triples on nodes 0..n-1; node 0 is the source.
inline Value karp_max_mean(std::size_t n,
                           const std::vector<std::tuple<std::size_t, std::size_t, Value>>& edges) {
    if (n == 0 || edges.empty()) return -val_inf;
    std::vector<std::vector<Value>> d(n + 1, std::vector<Value>(n, -val_inf));
    d[0][0] = 0;
    for (std::size_t k = 1; k <= n; ++k)
        for (const auto& [u, v, w] : edges)
            if (d[k - 1][u] > -val_inf && d[k - 1][u] + w > d[k][v]) d[k][v] = d[k - 1][u] + w;
    Value best = -val_inf;
    for (std::size_t v = 0; v < n; ++v) {
        if (d[n][v] == -val_inf) continue;
        Value worst = val_inf;
        for (std::size_t k = 0; k < n; ++k)
            if (d[k][v] > -val_inf)
                worst = std::min(worst, (d[n][v] - d[k][v]) / static_cast<Value>(n - k));
        best = std::max(best, worst);
    }
    return best;
}

// max mean (per edge) over cycles inside one SCC's internal edge list
inline Value scc_best_mean(const std::vector<WeightedStepEdge>& edges,
                           const std::vector<std::size_t>& inside) {
    std::map<StateId, std::size_t> id;
    for (std::size_t e : inside) {
        id.emplace(edges[e].from, id.size());
        id.emplace(edges[e].to, id.size());
    }
    std::vector<std::tuple<std::size_t, std::size_t, Value>> es;
    es.reserve(inside.size());
    for (std::size_t e : inside)
        es.emplace_back(id[edges[e].from], id[edges[e].to], edges[e].best_total);
    return karp_max_mean(id.size(), es);
}

// Maximum mean (per edge) over SCCs whose step union the family accepts.
// With an explicit family: restrict to edges inside each F and demand the SCC
// union equals F.  With a predicate: every strongly connected edge subset E'
// with accepted union arises as an SCC after repeatedly deleting the edges
// mentioning some state of a current SCC union (induction on the edge set),
// and its closure SCC has the same union with no smaller optimum, so the
// refinement below is exhaustive.
inline Value best_accepted_mean(const std::vector<WeightedStepEdge>& edges,
                                const AcceptFamily& accept, std::size_t memo_cap = 200000) {
    Value best = -val_inf;
    if (accept.explicit_sets) {
        for (const auto& f : *accept.explicit_sets) {
            std::vector<std::size_t> which;
            for (std::size_t e = 0; e < edges.size(); ++e)
                if (subset_of(edges[e].steps, f)) which.push_back(e);
            if (which.empty()) continue;
            auto g = group_by_scc(edges, which);
            for (const auto& inside : g.by_scc) {
                if (inside.empty()) continue;
                StateSet u;
                for (std::size_t e : inside) u = set_union(u, edges[e].steps);
                if (u == f) best = std::max(best, scc_best_mean(edges, inside));
            }
        }
        return best;
    }
    std::set<std::vector<std::size_t>> seen;
    std::function<void(const std::vector<std::size_t>&)> refine =
        [&](const std::vector<std::size_t>& which) {
            if (which.empty() || !seen.insert(which).second) return;
            if (seen.size() > memo_cap)
                throw Error(ErrorKind::LimitExceeded, "Muller candidate enumeration exploded");
            auto g = group_by_scc(edges, which);
            for (const auto& inside : g.by_scc) {
                if (inside.empty()) continue;
                StateSet u;
                for (std::size_t e : inside) u = set_union(u, edges[e].steps);
                if (accept.member(u)) best = std::max(best, scc_best_mean(edges, inside));
                for (StateId s : u) {
                    std::vector<std::size_t> sub;
                    for (std::size_t e : which)
                        if (!set_contains(edges[e].steps, s)) sub.push_back(e);
                    if (sub.size() < which.size()) refine(sub);
                }
            }
        };
    std::vector<std::size_t> all(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) all[e] = e;
    refine(all);
    return best;
}

inline detail::BestMap weighted_prefix_boundary(const WeightedNwa& a, const LassoNestedWord& w,
                                                const std::vector<double>& scale) {
    auto items = segment_items(w.prefix_length(), w.prefix_pairs(), w.prefix_pending_calls(),
                               w.prefix_pending_returns());
    WeightedSegmentRunner runner(a, w.prefix(), items, scale);
    BestMap start;
    for (StateId qi : a.initial) relax(start, qi, 0.0);
    return runner.run(std::move(start));
}

} // namespace detail

inline Value behavior_limavg_sup(const WeightedNwa& a, const LassoNestedWord& w) {
    if (a.monoid.kind() != ValuationMonoid::Kind::LimAvg)
        throw Error(ErrorKind::UnsupportedMonoidEngine,
                    "behavior_limavg_sup needs the limavg monoid, got " + a.monoid.name());
    check_word_alphabet(a.alphabet, w);
    // Prefix weights never move a liminf average; the weighted runner is used
    // only to reach boundary states while rejecting out-of-carrier weights.
    detail::BestMap boundary = detail::weighted_prefix_boundary(
        a, w, std::vector<double>(w.prefix_length(), 1.0));
    if (boundary.empty()) return a.monoid.zero();
    WeightedLoopStepGraph graph(a, w);
    std::vector<WeightedStepEdge> edges;
    std::set<StateId> visited;
    std::vector<StateId> todo;
    for (const auto& [q, v] : boundary) todo.push_back(q);
    while (!todo.empty()) {
        StateId q = todo.back();
        todo.pop_back();
        if (!visited.insert(q).second) continue;
        for (const auto& e : graph.edges_from(q)) {
            edges.push_back(e);
            if (!visited.count(e.to)) todo.push_back(e.to);
        }
    }
    if (edges.empty()) return a.monoid.zero();
    Value mean = detail::best_accepted_mean(edges, a.accept);
    if (mean == -val_inf) return a.monoid.zero();
    return mean / static_cast<Value>(w.loop_length());
}

// ---------------------------------------------------------------------------
// discounted engine
// ---------------------------------------------------------------------------

// Accept-capable boundary states: those from which the loop residual is
// accepted.  Valid at copy boundaries only, where the residual word is always
// loop^omega and the open-call stack is never consulted again.
inline StateSet accept_capable_states(const WeightedNwa& a, const LassoNestedWord& w) {
    Nwa base = to_nwa(a);
    LassoNestedWord residual({}, w.loop());
    StateSet capable;
    for (StateId q = 0; q < a.state_count; ++q) {
        Nwa from_q = base;
        from_q.initial = {q};
        if (membership(from_q, residual)) capable.push_back(q);
    }
    return capable;
}

inline Value behavior_disc_sup(const WeightedNwa& a, const LassoNestedWord& w, double eps,
                               Value* achieved_bound = nullptr) {
    if (a.monoid.kind() != ValuationMonoid::Kind::Disc)
        throw Error(ErrorKind::UnsupportedMonoidEngine,
                    "behavior_disc_sup needs a disc monoid, got " + a.monoid.name());
    if (!(eps > 0)) throw Error(ErrorKind::ParseError, "eps must be positive");
    check_word_alphabet(a.alphabet, w);
    if (achieved_bound) *achieved_bound = 0;
    double lambda = a.monoid.discount();
    Value wb = a.weight_bound;
    if (!std::isfinite(wb))
        throw Error(ErrorKind::NonBoundedWeights, "discounted engine needs bounded weights");

    StateSet capable = accept_capable_states(a, w);
    if (capable.empty()) return a.monoid.zero();
    if (wb == 0.0) // every present weight is 0, so every accepted run sums to 0
        return membership(to_nwa(a), w) ? 0.0 : a.monoid.zero();

    std::size_t P = w.prefix_length(), L = w.loop_length();
    double need = std::log(eps * (1.0 - lambda) / wb) / std::log(lambda);
    std::size_t copies = 1;
    if (need > static_cast<double>(P))
        copies = static_cast<std::size_t>(std::ceil((need - static_cast<double>(P)) /
                                                    static_cast<double>(L)));
    if (copies < 1) copies = 1;
    if (copies > 50000000)
        throw Error(ErrorKind::LimitExceeded, "discount horizon needs too many loop copies");

    // prefix phase, scaled by lambda^(i-1)
    std::vector<double> pscale(P);
    double pw = 1.0;
    for (std::size_t i = 0; i < P; ++i) {
        pscale[i] = pw;
        pw *= lambda;
    }
    detail::BestMap cur = detail::weighted_prefix_boundary(a, w, pscale);

    // one-copy summaries with local scale lambda^(j-1); copy k contributes
    // lambda^(P + k L) times its local total
    std::vector<double> lscale(L);
    double lw = 1.0;
    for (std::size_t j = 0; j < L; ++j) {
        lscale[j] = lw;
        lw *= lambda;
    }
    auto items = segment_items(L, w.loop_pairs(), w.loop_pending_calls(), {});
    detail::WeightedSegmentRunner runner(a, w.loop(), items, lscale);
    std::map<StateId, detail::BestMap> summary;
    auto copy_summary = [&](StateId q) -> const detail::BestMap& {
        auto it = summary.find(q);
        if (it != summary.end()) return it->second;
        return summary.emplace(q, runner.run(detail::BestMap{{q, 0.0}})).first->second;
    };

    auto filter_capable = [&](detail::BestMap& m) {
        for (auto it = m.begin(); it != m.end();)
            it = set_contains(capable, it->first) ? std::next(it) : m.erase(it);
    };
    filter_capable(cur);
    double copy_scale = std::pow(lambda, static_cast<double>(P));
    double lam_l = std::pow(lambda, static_cast<double>(L));
    for (std::size_t k = 0; k < copies && !cur.empty(); ++k) {
        detail::BestMap next;
        for (const auto& [q, v] : cur)
            for (const auto& [t, lv] : copy_summary(q)) detail::relax(next, t, v + copy_scale * lv);
        filter_capable(next);
        cur = std::move(next);
        copy_scale *= lam_l;
    }
    if (cur.empty()) return a.monoid.zero(); // no accepted run survives the boundaries
    Value best = -val_inf;
    for (const auto& [q, v] : cur) best = std::max(best, v);
    // copy_scale is lambda^(P + copies*L) here
    if (achieved_bound) *achieved_bound = copy_scale * wb / (1.0 - lambda);
    return best;
}

// ---------------------------------------------------------------------------
// bounded enumeration oracle
// ---------------------------------------------------------------------------

// Estimates the behavior from the first n positions: follows every run prefix
// of truncate(w, n), folding the monoid's prefix estimator with sup.  Run
// prefixes sharing (position, state, pending stack of still-answerable calls)
// have identical futures, so they are merged keeping the best accumulator --
// the fold over all literal prefixes is unchanged.  Stack entries of calls
// whose returns lie beyond the horizon are never consulted and are dropped.
inline Value behavior_bounded_oracle(const WeightedNwa& a, const LassoNestedWord& w,
                                     std::size_t n, std::size_t run_cap = 10000000) {
    check_word_alphabet(a.alphabet, w);
    if (n == 0) throw Error(ErrorKind::ParseError, "oracle horizon must be positive");
    FiniteNestedWord fin = w.truncate(n);
    std::vector<std::size_t> partner(n + 2, 0); // return pos -> call pos, when matched
    std::vector<char> kind(n + 2, 'i');         // i / c (answered call) / p (pending call)
                                                // r (matched ret) / s (pending ret)
    for (auto [i, j] : fin.matching.pairs) {
        kind[i] = 'c';
        kind[j] = 'r';
        partner[j] = i;
    }
    for (std::size_t i : fin.matching.pending_calls) kind[i] = 'p';
    for (std::size_t i : fin.matching.pending_returns) kind[i] = 's';

    bool avg = a.monoid.kind() == ValuationMonoid::Kind::LimAvg;
    bool boolean = a.monoid.kind() == ValuationMonoid::Kind::Boolean;
    double lambda = a.monoid.kind() == ValuationMonoid::Kind::Disc ? a.monoid.discount() : 1.0;

    // config: (state, stack of hier states for still-answerable calls) -> best
    using Config = std::pair<StateId, std::vector<StateId>>;
    std::map<Config, Value> frontier;
    for (StateId qi : a.initial) frontier[{qi, {}}] = boolean ? 1.0 : 0.0;
    std::size_t work = 0;
    double pow_l = 1.0;
    auto fold = [&](Value acc, Value weight) -> Value {
        if (boolean) return std::min(acc, weight);
        if (acc == -val_inf || weight == -val_inf) return -val_inf;
        return acc + (avg ? weight : pow_l * weight);
    };
    for (std::size_t i = 1; i <= n && !frontier.empty(); ++i) {
        const TaggedLetter& l = fin.letters[i - 1];
        std::map<Config, Value> next;
        auto push = [&](Config c, Value v) {
            auto [it, fresh] = next.emplace(std::move(c), v);
            if (!fresh && v > it->second) it->second = v;
            if (++work > run_cap)
                throw Error(ErrorKind::TooManyRuns,
                            "bounded oracle exceeded " + std::to_string(run_cap) +
                                " enumerated run prefixes");
        };
        for (const auto& [cfg, acc] : frontier) {
            const auto& [q, stack] = cfg;
            switch (kind[i]) {
                case 'i':
                    for (const auto& t : a.weight_int(q, l)) {
                        if (a.monoid.is_zero(t.weight) && !boolean) continue;
                        push({t.to, stack}, fold(acc, t.weight));
                    }
                    break;
                case 'c': {
                    for (const auto& t : a.weight_call(q, l)) {
                        if (a.monoid.is_zero(t.weight) && !boolean) continue;
                        auto s2 = stack;
                        s2.push_back(q);
                        push({t.to, std::move(s2)}, fold(acc, t.weight));
                    }
                    break;
                }
                case 'p':
                    for (const auto& t : a.weight_call(q, l)) {
                        if (a.monoid.is_zero(t.weight) && !boolean) continue;
                        push({t.to, stack}, fold(acc, t.weight)); // hier never consulted
                    }
                    break;
                case 'r': {
                    StateId h = stack.back();
                    auto s2 = stack;
                    s2.pop_back();
                    for (const auto& t : a.weight_ret(q, h, l)) {
                        if (a.monoid.is_zero(t.weight) && !boolean) continue;
                        push({t.to, s2}, fold(acc, t.weight));
                    }
                    break;
                }
                case 's':
                    for (StateId qi : a.initial)
                        for (const auto& t : a.weight_ret(q, qi, l)) {
                            if (a.monoid.is_zero(t.weight) && !boolean) continue;
                            push({t.to, stack}, fold(acc, t.weight));
                        }
                    break;
            }
        }
        frontier = std::move(next);
        pow_l *= lambda;
    }
    if (frontier.empty()) return a.monoid.zero();
    Value best = -val_inf;
    for (const auto& [cfg, acc] : frontier) best = std::max(best, acc);
    if (avg && std::isfinite(best)) best /= static_cast<Value>(n);
    if (avg && best == val_inf) return val_inf;
    return best;
}

// Exact behavior of a deterministic automaton by literal simulation: the
// unique run's boundary states must repeat within |Q|+1 copies, the weight
// sequence is then ultimately periodic and Val has a closed form, and the
// stair Muller set is the union of per-copy step states over one period.
inline Value behavior_deterministic_exact(const WeightedNwa& a, const LassoNestedWord& w) {
    if (!a.deterministic || a.initial.size() != 1)
        throw Error(ErrorKind::NotDeterministic, "exact simulation needs a deterministic automaton");
    check_word_alphabet(a.alphabet, w);
    std::size_t P = w.prefix_length(), L = w.loop_length();

    StateId q = a.initial[0];
    std::vector<StateId> stack;
    std::vector<Value> weights; // per-position weight of the unique run
    std::vector<StateSet> copy_steps;
    std::vector<StateId> boundary; // run state at the start of each loop copy
    bool dead = false;

    auto advance = [&](std::size_t i) -> bool { // absolute position
        const TaggedLetter& l = w.letter(i);
        PositionClass c = w.classify_position(i);
        std::vector<WeightedTarget> ts;
        switch (c.kind) {
            case PositionKind::Internal: ts = a.weight_int(q, l); break;
            case PositionKind::MatchedCall:
            case PositionKind::PendingCall: ts = a.weight_call(q, l); break;
            case PositionKind::MatchedReturn: {
                StateId h = stack.back();
                stack.pop_back();
                ts = a.weight_ret(q, h, l);
                break;
            }
            case PositionKind::PendingReturn: ts = a.weight_ret(q, a.initial[0], l); break;
        }
        std::vector<WeightedTarget> live;
        for (const auto& t : ts)
            if (!a.monoid.is_zero(t.weight)) live.push_back(t);
        if (live.size() > 1)
            throw Error(ErrorKind::NotDeterministic, "two present transitions from one state");
        if (live.empty()) return false;
        if (c.kind == PositionKind::MatchedCall) stack.push_back(q);
        if (c.kind == PositionKind::PendingCall) stack.push_back(q); // never popped
        q = live[0].to;
        weights.push_back(live[0].weight);
        return true;
    };

    for (std::size_t i = 1; i <= P && !dead; ++i) dead = !advance(i);
    std::size_t first_repeat = 0, repeat_of = 0;
    if (!dead) {
        boundary.push_back(q);
        for (std::size_t copy = 0;; ++copy) {
            if (copy > a.state_count) // pigeonhole: a repeat must have appeared
                throw Error(ErrorKind::LimitExceeded, "boundary repetition not found");
            StateSet steps;
            for (std::size_t j = 1; j <= L && !dead; ++j) {
                dead = !advance(P + copy * L + j);
                if (!dead && w.is_step(P + copy * L + j)) set_insert(steps, q);
            }
            if (dead) break;
            copy_steps.push_back(std::move(steps));
            auto hit = std::find(boundary.begin(), boundary.end(), q);
            bool repeated = hit != boundary.end();
            repeat_of = static_cast<std::size_t>(hit - boundary.begin());
            boundary.push_back(q);
            if (repeated) {
                first_repeat = copy + 1;
                break;
            }
        }
    }
    if (dead) return a.monoid.zero();
    // copies repeat_of .. first_repeat-1 recur forever
    StateSet inf_steps;
    for (std::size_t c = repeat_of; c < first_repeat; ++c)
        inf_steps = set_union(inf_steps, copy_steps[c]);
    if (!a.accept.member(inf_steps)) return a.monoid.zero();
    std::size_t head_len = P + repeat_of * L;
    std::vector<Value> head(weights.begin(), weights.begin() + static_cast<long>(head_len));
    std::vector<Value> cycle(weights.begin() + static_cast<long>(head_len), weights.end());
    return a.monoid.val_up(head, cycle);
}

// ---------------------------------------------------------------------------
// dispatch + report
// ---------------------------------------------------------------------------

struct BehaviorReport {
    Value value = 0;
    bool exact = true;
    Value error_bound = 0;
};

inline BehaviorReport behavior_report(const WeightedNwa& a, const LassoNestedWord& w,
                                      double eps = 1e-9) {
    BehaviorReport r;
    switch (a.monoid.kind()) {
        case ValuationMonoid::Kind::LimAvg: r.value = behavior_limavg_sup(a, w); break;
        case ValuationMonoid::Kind::Boolean:
            r.value = membership(to_nwa(a), w) ? 1.0 : 0.0;
            break;
        case ValuationMonoid::Kind::Disc: {
            r.value = behavior_disc_sup(a, w, eps, &r.error_bound);
            r.exact = r.error_bound == 0;
            break;
        }
    }
    return r;
}

inline Value behavior(const WeightedNwa& a, const LassoNestedWord& w, double eps = 1e-9) {
    return behavior_report(a, w, eps).value;
}

// ---------------------------------------------------------------------------
// closure constructions
// ---------------------------------------------------------------------------

// Lift an unweighted automaton to the characteristic series: weight 1 on every
// transition, so accepted runs evaluate to Val(1,1,...) = 1 and the behavior
// is 1 on the language and 0 off it.
inline WeightedNwa from_nwa(const Nwa& n, const ValuationMonoid& m) {
    WeightedNwa a(m);
    a.alphabet = n.alphabet;
    a.state_count = n.state_count;
    a.initial = n.initial;
    Value one = m.one();
    auto lift1 = [one](std::function<StateSet(StateId, const TaggedLetter&)> f) {
        return [f, one](StateId q, const TaggedLetter& l) {
            std::vector<WeightedTarget> out;
            for (StateId t : f(q, l)) out.push_back({t, one});
            return out;
        };
    };
    a.weight_call = lift1(n.delta_call);
    a.weight_int = lift1(n.delta_int);
    auto fr = n.delta_ret;
    a.weight_ret = [fr, one](StateId q, StateId h, const TaggedLetter& l) {
        std::vector<WeightedTarget> out;
        for (StateId t : fr(q, h, l)) out.push_back({t, one});
        return out;
    };
    a.accept = n.accept;
    a.deterministic = n.deterministic;
    a.weight_bound = std::fabs(one);
    a.state_names = n.state_names;
    return a;
}

// Constant series: a single universal state; the constant is spread per the
// monoid's strategy (every position for lim-avg-like monoids, only the first
// position -- via a second phase state -- for multiplicative ones).
inline WeightedNwa const_automaton(const ValuationMonoid& m, Alphabet al, Value d) {
    bool first = m.const_strategy() == ValuationMonoid::ConstStrategy::FirstWeight;
    WeightedNwa a(m);
    a.alphabet = std::move(al);
    a.state_count = first ? 2 : 1;
    a.initial = {0};
    Value one = m.one();
    auto step = [first, d, one](StateId q) -> std::vector<WeightedTarget> {
        if (!first) return {{0, d}};
        if (q == 0) return {{1, d}};
        return {{1, one}};
    };
    a.weight_call = [step](StateId q, const TaggedLetter&) { return step(q); };
    a.weight_int = [step](StateId q, const TaggedLetter&) { return step(q); };
    a.weight_ret = [step](StateId q, StateId, const TaggedLetter&) { return step(q); };
    if (first)
        a.accept = AcceptFamily::from_sets({{1}});
    else
        a.accept = AcceptFamily::from_sets({{0}});
    a.deterministic = true;
    a.weight_bound = std::fabs(d) + std::fabs(one);
    if (m.is_zero(d)) a.weight_bound = 0; // the zero weight encodes absence
    a.state_names = first ? std::vector<std::string>{"d", "rest"} : std::vector<std::string>{"d"};
    return a;
}

// pointwise sum via disjoint union (runs never cross components)
inline WeightedNwa plus_automata(const WeightedNwa& a, const WeightedNwa& b) {
    if (!(a.alphabet == b.alphabet))
        throw Error(ErrorKind::AlphabetMismatch, "sum needs a shared alphabet");
    if (a.monoid.name() != b.monoid.name())
        throw Error(ErrorKind::MonoidFlagMissing, "sum needs a shared monoid");
    WeightedNwa u(a.monoid);
    u.alphabet = a.alphabet;
    StateId off = static_cast<StateId>(a.state_count);
    u.state_count = a.state_count + b.state_count;
    u.initial = a.initial;
    for (StateId q : b.initial) u.initial.push_back(q + off);
    auto side1 = [off](std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> fa,
                       std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> fb) {
        return [fa, fb, off](StateId q, const TaggedLetter& l) {
            if (q < off) return fa(q, l);
            auto out = fb(q - off, l);
            for (auto& t : out) t.to += off;
            return out;
        };
    };
    u.weight_call = side1(a.weight_call, b.weight_call);
    u.weight_int = side1(a.weight_int, b.weight_int);
    auto fra = a.weight_ret;
    auto frb = b.weight_ret;
    u.weight_ret = [fra, frb, off](StateId q, StateId h, const TaggedLetter& l) {
        if (q < off && h < off) return fra(q, h, l);
        if (q >= off && h >= off) {
            auto out = frb(q - off, h - off, l);
            for (auto& t : out) t.to += off;
            return out;
        }
        return std::vector<WeightedTarget>{};
    };
    auto ma = a.accept.member;
    auto mb = b.accept.member;
    u.accept.member = [ma, mb, off](const StateSet& s) {
        if (s.empty()) return false;
        bool all_a = true, all_b = true;
        StateSet shifted;
        for (StateId q : s) {
            if (q < off) all_b = false;
            else {
                all_a = false;
                shifted.push_back(q - off);
            }
        }
        if (all_a) return ma(s);
        if (all_b) return mb(shifted);
        return false;
    };
    if (a.accept.explicit_sets && b.accept.explicit_sets) {
        std::vector<StateSet> sets = *a.accept.explicit_sets;
        for (StateSet s : *b.accept.explicit_sets) {
            for (auto& q : s) q += off;
            sets.push_back(std::move(s));
        }
        u.accept.explicit_sets = std::move(sets);
    }
    u.deterministic = false;
    u.weight_bound = std::max(a.weight_bound, b.weight_bound);
    return u;
}

// pointwise product via synchronized product with times-combined weights;
// sound exactly for cc-omega-valuation semirings, where Val distributes over
// the pointwise product of commuting sequences and times distributes over sup
inline WeightedNwa diamond_automata(const WeightedNwa& a, const WeightedNwa& b) {
    if (!(a.alphabet == b.alphabet))
        throw Error(ErrorKind::AlphabetMismatch, "product needs a shared alphabet");
    if (a.monoid.name() != b.monoid.name())
        throw Error(ErrorKind::MonoidFlagMissing, "product needs a shared monoid");
    const ValuationMonoid& m = a.monoid;
    if (!m.conditionally_commutative())
        throw Error(ErrorKind::MonoidFlagMissing,
                    "product needs the conditionally-commutative law, which " + m.name() +
                        " lacks");
    if (!(m.left_plus_distributive() && (m.left_val_distributive() || m.left_multiplicative())))
        throw Error(ErrorKind::MonoidFlagMissing,
                    "product needs a left-distributive monoid, which " + m.name() + " is not");
    WeightedNwa p(m);
    p.alphabet = a.alphabet;
    std::size_t nb = b.state_count;
    p.state_count = a.state_count * nb;
    for (StateId qa : a.initial)
        for (StateId qb : b.initial) p.initial.push_back(static_cast<StateId>(qa * nb + qb));
    ValuationMonoid mm = m;
    auto pair1 =
        [nb, mm](std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> fa,
                 std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> fb) {
            return [fa, fb, nb, mm](StateId q, const TaggedLetter& l) {
                std::vector<WeightedTarget> out;
                for (const auto& x : fa(static_cast<StateId>(q / nb), l))
                    for (const auto& y : fb(static_cast<StateId>(q % nb), l))
                        out.push_back({static_cast<StateId>(x.to * nb + y.to),
                                       mm.times(x.weight, y.weight)});
                return out;
            };
        };
    p.weight_call = pair1(a.weight_call, b.weight_call);
    p.weight_int = pair1(a.weight_int, b.weight_int);
    auto fra = a.weight_ret;
    auto frb = b.weight_ret;
    p.weight_ret = [fra, frb, nb, mm](StateId q, StateId h, const TaggedLetter& l) {
        std::vector<WeightedTarget> out;
        for (const auto& x : fra(static_cast<StateId>(q / nb), static_cast<StateId>(h / nb), l))
            for (const auto& y : frb(static_cast<StateId>(q % nb), static_cast<StateId>(h % nb), l))
                out.push_back(
                    {static_cast<StateId>(x.to * nb + y.to), mm.times(x.weight, y.weight)});
        return out;
    };
    auto ma = a.accept.member;
    auto mb = b.accept.member;
    p.accept.member = [ma, mb, nb](const StateSet& s) {
        StateSet pa, pb;
        for (StateId q : s) {
            set_insert(pa, static_cast<StateId>(q / nb));
            set_insert(pb, static_cast<StateId>(q % nb));
        }
        return ma(pa) && mb(pb);
    };
    p.deterministic = a.deterministic && b.deterministic;
    p.weight_bound = a.weight_bound + b.weight_bound;
    return p;
}

// Relabel by a letter map h (weights kept; merging becomes nondeterminism).
inline WeightedNwa project(const WeightedNwa& a, const std::map<std::string, std::string>& h,
                           Alphabet target) {
    for (const auto& s : a.alphabet.symbols) {
        auto it = h.find(s);
        if (it == h.end())
            throw Error(ErrorKind::AlphabetMismatch, "projection undefined on symbol '" + s + "'");
        if (!target.has_symbol(it->second))
            throw Error(ErrorKind::AlphabetMismatch,
                        "projection image '" + it->second + "' missing from the target alphabet");
    }
    if (target.variables != a.alphabet.variables)
        throw Error(ErrorKind::AlphabetMismatch, "projection must preserve the variable list");
    auto pre = std::make_shared<std::map<std::string, std::vector<std::string>>>();
    for (const auto& s : a.alphabet.symbols) (*pre)[h.at(s)].push_back(s);
    WeightedNwa p(a.monoid);
    p.alphabet = std::move(target);
    p.state_count = a.state_count;
    p.initial = a.initial;
    auto lift1 =
        [pre](std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> f) {
            return [f, pre](StateId q, const TaggedLetter& l) {
                std::vector<WeightedTarget> out;
                auto it = pre->find(l.symbol);
                if (it == pre->end()) return out;
                for (const auto& s : it->second) {
                    TaggedLetter src{s, l.tag, l.bits};
                    for (const auto& t : f(q, src)) out.push_back(t);
                }
                return out;
            };
        };
    p.weight_call = lift1(a.weight_call);
    p.weight_int = lift1(a.weight_int);
    auto fr = a.weight_ret;
    p.weight_ret = [fr, pre](StateId q, StateId hh, const TaggedLetter& l) {
        std::vector<WeightedTarget> out;
        auto it = pre->find(l.symbol);
        if (it == pre->end()) return out;
        for (const auto& s : it->second) {
            TaggedLetter src{s, l.tag, l.bits};
            for (const auto& t : fr(q, hh, src)) out.push_back(t);
        }
        return out;
    };
    p.accept = a.accept;
    p.deterministic = false;
    p.weight_bound = a.weight_bound;
    p.state_names = a.state_names;
    return p;
}

// Drop one marking bit: the image letter stands for both source letters, so
// transitions branch over the bit's two values (sup folds the choices).
inline WeightedNwa project_drop_bit(const WeightedNwa& a, std::size_t bit) {
    if (bit >= a.alphabet.bit_count())
        throw Error(ErrorKind::AlphabetMismatch, "no such variable bit to drop");
    Alphabet target = a.alphabet;
    target.variables.erase(target.variables.begin() + static_cast<long>(bit));
    auto widen = [bit](uint64_t b) {
        uint64_t lo = b & ((uint64_t(1) << bit) - 1);
        uint64_t hi = (b >> bit) << (bit + 1);
        return std::array<uint64_t, 2>{hi | lo, hi | lo | (uint64_t(1) << bit)};
    };
    WeightedNwa p(a.monoid);
    p.alphabet = std::move(target);
    p.state_count = a.state_count;
    p.initial = a.initial;
    auto lift1 =
        [widen](std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> f) {
            return [f, widen](StateId q, const TaggedLetter& l) {
                std::vector<WeightedTarget> out;
                for (uint64_t b : widen(l.bits))
                    for (const auto& t : f(q, TaggedLetter{l.symbol, l.tag, b})) out.push_back(t);
                return out;
            };
        };
    p.weight_call = lift1(a.weight_call);
    p.weight_int = lift1(a.weight_int);
    auto fr = a.weight_ret;
    p.weight_ret = [fr, widen](StateId q, StateId h, const TaggedLetter& l) {
        std::vector<WeightedTarget> out;
        for (uint64_t b : widen(l.bits))
            for (const auto& t : fr(q, h, TaggedLetter{l.symbol, l.tag, b})) out.push_back(t);
        return out;
    };
    p.accept = a.accept;
    p.deterministic = false;
    p.weight_bound = a.weight_bound;
    p.state_names = a.state_names;
    return p;
}

// ---------------------------------------------------------------------------
// table-backed construction and the text format
// ---------------------------------------------------------------------------

class WeightedNwaBuilder {
public:
    Alphabet alphabet;
    std::size_t states = 0;
    std::vector<StateId> initial;
    std::vector<StateSet> accept_sets;
    std::vector<std::string> state_names;

    struct Line {
        Tag tag = Tag::Internal;
        StateId q = 0, hier = 0; // hier used by returns only
        std::string sym;
        uint64_t bits = 0;
        StateId to = 0;
        std::optional<Value> weight; // absent lines weigh the monoid's one
    };

    void add_int(StateId q, const std::string& sym, StateId to,
                 std::optional<Value> w = std::nullopt, uint64_t bits = 0) {
        lines_.push_back({Tag::Internal, q, 0, sym, bits, to, w});
    }
    void add_call(StateId q, const std::string& sym, StateId to,
                  std::optional<Value> w = std::nullopt, uint64_t bits = 0) {
        lines_.push_back({Tag::Call, q, 0, sym, bits, to, w});
    }
    void add_ret(StateId q, StateId hier, const std::string& sym, StateId to,
                 std::optional<Value> w = std::nullopt, uint64_t bits = 0) {
        lines_.push_back({Tag::Return, q, hier, sym, bits, to, w});
    }
    const std::vector<Line>& lines() const { return lines_; }

    WeightedNwa build(const ValuationMonoid& m) const {
        using LinKey = std::tuple<StateId, std::string, uint64_t>;
        using RetKey = std::tuple<StateId, StateId, std::string, uint64_t>;
        auto lin_int = std::make_shared<std::map<LinKey, std::vector<WeightedTarget>>>();
        auto lin_call = std::make_shared<std::map<LinKey, std::vector<WeightedTarget>>>();
        auto ret = std::make_shared<std::map<RetKey, std::vector<WeightedTarget>>>();
        Value bound = 0;
        bool det = initial.size() == 1;
        for (const auto& ln : lines_) {
            Value w = ln.weight.value_or(m.one());
            if (!m.is_zero(w)) {
                if (std::isfinite(w)) bound = std::max(bound, std::fabs(w));
                else bound = val_inf;
            }
            WeightedTarget t{ln.to, w};
            std::vector<WeightedTarget>* bucket = nullptr;
            switch (ln.tag) {
                case Tag::Internal:
                    bucket = &(*lin_int)[std::make_tuple(ln.q, ln.sym, ln.bits)];
                    break;
                case Tag::Call:
                    bucket = &(*lin_call)[std::make_tuple(ln.q, ln.sym, ln.bits)];
                    break;
                case Tag::Return:
                    bucket = &(*ret)[std::make_tuple(ln.q, ln.hier, ln.sym, ln.bits)];
                    break;
            }
            bucket->push_back(t);
            std::size_t live = 0;
            for (const auto& x : *bucket)
                if (!m.is_zero(x.weight)) ++live;
            if (live > 1) det = false;
        }
        WeightedNwa a(m);
        a.alphabet = alphabet;
        a.state_count = states;
        a.initial = initial;
        a.state_names = state_names;
        a.weight_int = [lin_int](StateId q, const TaggedLetter& l) -> std::vector<WeightedTarget> {
            auto it = lin_int->find(std::make_tuple(q, l.symbol, l.bits));
            return it == lin_int->end() ? std::vector<WeightedTarget>{} : it->second;
        };
        a.weight_call = [lin_call](StateId q,
                                   const TaggedLetter& l) -> std::vector<WeightedTarget> {
            auto it = lin_call->find(std::make_tuple(q, l.symbol, l.bits));
            return it == lin_call->end() ? std::vector<WeightedTarget>{} : it->second;
        };
        a.weight_ret = [ret](StateId q, StateId h,
                             const TaggedLetter& l) -> std::vector<WeightedTarget> {
            auto it = ret->find(std::make_tuple(q, h, l.symbol, l.bits));
            return it == ret->end() ? std::vector<WeightedTarget>{} : it->second;
        };
        a.accept = AcceptFamily::from_sets(accept_sets);
        a.deterministic = det;
        a.weight_bound = bound;
        return a;
    }

    // unweighted view: every listed transition is present
    Nwa build_nwa() const {
        NwaBuilder b;
        b.alphabet = alphabet;
        b.states = states;
        b.initial = initial;
        b.accept_sets = accept_sets;
        b.state_names = state_names;
        for (const auto& ln : lines_) {
            switch (ln.tag) {
                case Tag::Internal: b.add_int(ln.q, ln.sym, ln.bits, ln.to); break;
                case Tag::Call: b.add_call(ln.q, ln.sym, ln.bits, ln.to); break;
                case Tag::Return: b.add_ret(ln.q, ln.hier, ln.sym, ln.bits, ln.to); break;
            }
        }
        return b.build();
    }

    std::string name_of(StateId q) const {
        if (q < state_names.size()) return state_names[q];
        return "q" + std::to_string(q);
    }

    std::string print() const {
        std::ostringstream out;
        out << "states:";
        for (std::size_t q = 0; q < states; ++q) out << ' ' << name_of(static_cast<StateId>(q));
        out << "\ninitial:";
        for (StateId q : initial) out << ' ' << name_of(q);
        out << "\naccept:";
        for (const auto& s : accept_sets) {
            out << " {";
            for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << name_of(s[i]);
            out << '}';
        }
        out << '\n';
        for (const auto& ln : lines_) {
            switch (ln.tag) {
                case Tag::Internal: out << "int " << name_of(ln.q); break;
                case Tag::Call: out << "call " << name_of(ln.q); break;
                case Tag::Return: out << "ret " << name_of(ln.q) << ' ' << name_of(ln.hier); break;
            }
            out << ' ' << ln.sym << " -> " << name_of(ln.to);
            if (ln.weight) out << " : " << format_value(*ln.weight);
            out << '\n';
        }
        return out.str();
    }

private:
    std::vector<Line> lines_;
};

// Text format: `states:`, `initial:`, `accept: {q0} {q0,q1}` headers, then one
// transition per line -- `int q a -> q'`, `call q a -> q'`, `ret q p a -> q'`
// (p the hierarchical state), each with an optional `: weight` suffix.  Blank
// lines and `#` comments are skipped.
inline WeightedNwaBuilder parse_weighted_automaton(const std::string& text) {
    WeightedNwaBuilder b;
    std::map<std::string, StateId> id;
    auto state_of = [&](const std::string& name) -> StateId {
        auto it = id.find(name);
        if (it == id.end())
            throw Error(ErrorKind::ParseError, "unknown state '" + name + "'");
        return it->second;
    };
    bool have_states = false, have_initial = false, have_accept = false;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        auto fail = [&](const std::string& why) -> Error {
            return Error(ErrorKind::ParseError,
                         "line " + std::to_string(lineno) + ": " + why);
        };
        if (head == "states:") {
            std::string name;
            while (ls >> name) {
                if (id.count(name)) throw fail("duplicate state '" + name + "'");
                id[name] = static_cast<StateId>(b.states++);
                b.state_names.push_back(name);
            }
            have_states = true;
        } else if (head == "initial:") {
            if (!have_states) throw fail("initial: before states:");
            std::string name;
            while (ls >> name) b.initial.push_back(state_of(name));
            have_initial = true;
        } else if (head == "accept:") {
            if (!have_states) throw fail("accept: before states:");
            std::string tok;
            while (ls >> tok) {
                if (tok.front() != '{' || tok.back() != '}')
                    throw fail("accept sets look like {q0,q1}");
                StateSet s;
                std::string name;
                for (char c : tok.substr(1, tok.size() - 2)) {
                    if (c == ',') {
                        if (!name.empty()) s.push_back(state_of(name));
                        name.clear();
                    } else
                        name.push_back(c);
                }
                if (!name.empty()) s.push_back(state_of(name));
                normalize_set(s);
                b.accept_sets.push_back(std::move(s));
            }
            have_accept = true;
        } else if (head == "int" || head == "call" || head == "ret") {
            if (!have_states) throw fail("transition before states:");
            std::string q, hier, sym, arrow, to;
            if (!(ls >> q)) throw fail("missing source state");
            if (head == "ret" && !(ls >> hier)) throw fail("missing hierarchical state");
            if (!(ls >> sym >> arrow >> to) || arrow != "->")
                throw fail("expected '<state> <symbol> -> <state>'");
            std::optional<Value> w;
            std::string colon;
            if (ls >> colon) {
                if (colon != ":") throw fail("expected ': <weight>'");
                std::string wtok;
                if (!(ls >> wtok)) throw fail("missing weight");
                try {
                    std::size_t used = 0;
                    double v = std::stod(wtok, &used); // accepts inf/-inf
                    if (used != wtok.size() || std::isnan(v)) throw fail("bad weight");
                    w = v;
                } catch (const std::invalid_argument&) {
                    throw fail("bad weight '" + wtok + "'");
                } catch (const std::out_of_range&) {
                    throw fail("weight '" + wtok + "' out of range");
                }
                std::string extra;
                if (ls >> extra) throw fail("trailing input '" + extra + "'");
            }
            if (!b.alphabet.has_symbol(sym)) b.alphabet.symbols.push_back(sym);
            if (head == "int") b.add_int(state_of(q), sym, state_of(to), w);
            else if (head == "call") b.add_call(state_of(q), sym, state_of(to), w);
            else b.add_ret(state_of(q), state_of(hier), sym, state_of(to), w);
        } else {
            throw fail("unrecognized line head '" + head + "'");
        }
    }
    if (!have_states) throw Error(ErrorKind::ParseError, "missing states: line");
    if (!have_initial) throw Error(ErrorKind::ParseError, "missing initial: line");
    if (!have_accept) throw Error(ErrorKind::ParseError, "missing accept: line");
    std::sort(b.alphabet.symbols.begin(), b.alphabet.symbols.end());
    return b;
}

} // namespace wnwa

#endif // WNWA_WEIGHTED_NWA_HH_
