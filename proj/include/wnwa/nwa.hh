/* nwa.hh -- unweighted stair Muller nested-word automata
 *
 * Automata are closure-backed: transition functions map (state, letter) resp.
 * (state, hierarchical state, letter) to state sets, so products and other
 * derived automata never materialize tables.  Acceptance is a predicate over
 * state sets (with an optional explicit family when finitely listed): a run is
 * accepted iff the set of states it visits infinitely often at step positions
 * belongs to the family.
 *
 * Membership on lasso words works in two phases.  The prefix phase simulates
 * reachable state sets over the prefix's nesting tree (matched blocks recurse
 * per entry state; pending returns branch over all initial states).  The loop
 * phase builds a step graph: one edge (q, q', S) per realizable way of
 * crossing a single loop copy from boundary state q to q', where S collects
 * the states observed at the copy's step positions (exactly the states after
 * each top-level item, since the loop is return-matched).  A run's infinite
 * step set is then the union of S over the edges it uses infinitely often,
 * and those edge sets are precisely the strongly connected edge subsets of
 * the step graph: acceptance reduces to Muller analysis on a finite graph.
 */

#ifndef WNWA_NWA_HH_
#define WNWA_NWA_HH_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hh"
#include "nested_word.hh"
#include "text_format.hh"

namespace wnwa {

using StateId = uint32_t;
using StateSet = std::vector<StateId>; // sorted, duplicate-free

inline void normalize_set(StateSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}
inline bool set_contains(const StateSet& s, StateId q) {
    return std::binary_search(s.begin(), s.end(), q);
}
inline StateSet set_union(const StateSet& a, const StateSet& b) {
    StateSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}
inline void set_insert(StateSet& s, StateId q) {
    auto it = std::lower_bound(s.begin(), s.end(), q);
    if (it == s.end() || *it != q) s.insert(it, q);
}
inline bool subset_of(const StateSet& a, const StateSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct Alphabet {
    std::vector<std::string> symbols;
    std::vector<std::string> variables; // bit i of a letter marks variables[i]

    std::size_t bit_count() const { return variables.size(); }
    bool has_symbol(const std::string& s) const {
        return std::find(symbols.begin(), symbols.end(), s) != symbols.end();
    }
    bool operator==(const Alphabet& o) const {
        return symbols == o.symbols && variables == o.variables;
    }
    // all (symbol, bits) combinations
    std::vector<TaggedLetter> plain_letters() const {
        std::vector<TaggedLetter> out;
        uint64_t lim = uint64_t(1) << bit_count();
        for (const auto& s : symbols)
            for (uint64_t b = 0; b < lim; ++b) out.push_back(TaggedLetter{s, Tag::Internal, b});
        return out;
    }
};

struct AcceptFamily {
    std::function<bool(const StateSet&)> member;
    std::optional<std::vector<StateSet>> explicit_sets;

    static AcceptFamily from_sets(std::vector<StateSet> sets) {
        for (auto& s : sets) normalize_set(s);
        auto shared = std::make_shared<std::vector<StateSet>>(std::move(sets));
        AcceptFamily f;
        f.member = [shared](const StateSet& s) {
            return std::find(shared->begin(), shared->end(), s) != shared->end();
        };
        f.explicit_sets = *shared;
        return f;
    }
};

struct Nwa {
    Alphabet alphabet;
    std::size_t state_count = 0;
    std::vector<StateId> initial;
    std::function<StateSet(StateId, const TaggedLetter&)> delta_call, delta_int;
    std::function<StateSet(StateId, StateId, const TaggedLetter&)> delta_ret; // (cur, hier, a)
    AcceptFamily accept;
    bool deterministic = false;
    std::vector<std::string> state_names; // optional

    std::string name_of(StateId q) const {
        if (q < state_names.size()) return state_names[q];
        return "q" + std::to_string(q);
    }
};

// ---------------------------------------------------------------------------
// Finite segments as nesting trees
// ---------------------------------------------------------------------------

struct SegmentItem {
    enum class Kind : uint8_t { Internal, PendingCall, PendingReturn, Block };
    Kind kind = Kind::Internal;
    std::size_t pos = 0, end = 0; // 1-based local positions; end used by Block
    std::vector<SegmentItem> children;
};

namespace detail {
inline std::vector<SegmentItem> build_items(std::size_t lo, std::size_t hi,
                                            const std::map<std::size_t, std::size_t>& call_of,
                                            const std::set<std::size_t>& pcall,
                                            const std::set<std::size_t>& pret) {
    std::vector<SegmentItem> items;
    for (std::size_t i = lo; i <= hi;) {
        if (auto it = call_of.find(i); it != call_of.end()) {
            SegmentItem b;
            b.kind = SegmentItem::Kind::Block;
            b.pos = i;
            b.end = it->second;
            b.children = build_items(i + 1, it->second - 1, call_of, pcall, pret);
            items.push_back(std::move(b));
            i = it->second + 1;
        } else {
            SegmentItem s;
            s.pos = i;
            s.kind = pcall.count(i)  ? SegmentItem::Kind::PendingCall
                     : pret.count(i) ? SegmentItem::Kind::PendingReturn
                                     : SegmentItem::Kind::Internal;
            items.push_back(s);
            ++i;
        }
    }
    return items;
}
} // namespace detail

inline std::vector<SegmentItem> segment_items(
    std::size_t length, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
    const std::vector<std::size_t>& pending_calls, const std::vector<std::size_t>& pending_rets) {
    std::map<std::size_t, std::size_t> call_of; // call position -> return position
    for (auto [i, j] : pairs) call_of[i] = j;
    std::set<std::size_t> pc(pending_calls.begin(), pending_calls.end());
    std::set<std::size_t> pr(pending_rets.begin(), pending_rets.end());
    return detail::build_items(1, length, call_of, pc, pr);
}

// Set-based simulation of a finite segment; matched blocks recurse per entry
// state with memoization, pending returns branch over the initial states.
class SegmentRunner {
public:
    SegmentRunner(const Nwa& a, const std::vector<TaggedLetter>& letters,
                  const std::vector<SegmentItem>& items)
        : a_(a), letters_(letters), items_(items) {}

    StateSet run(const StateSet& from) { return run_items(items_, from); }

    // states reachable after a single block, entering at q (memoized)
    const StateSet& block_exits(const SegmentItem& b, StateId q) {
        auto key = std::make_pair(&b, q);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        StateSet inner;
        for (StateId c : a_.delta_call(q, letters_[b.pos - 1]))
            for (StateId r : run_items(b.children, {c})) set_insert(inner, r);
        StateSet exits;
        for (StateId r : inner)
            for (StateId t : a_.delta_ret(r, q, letters_[b.end - 1])) set_insert(exits, t);
        return memo_.emplace(key, std::move(exits)).first->second;
    }

    StateSet step_item(const SegmentItem& it, const StateSet& cur) {
        StateSet next;
        switch (it.kind) {
            case SegmentItem::Kind::Internal:
                for (StateId q : cur)
                    for (StateId t : a_.delta_int(q, letters_[it.pos - 1])) set_insert(next, t);
                break;
            case SegmentItem::Kind::PendingCall:
                for (StateId q : cur)
                    for (StateId t : a_.delta_call(q, letters_[it.pos - 1])) set_insert(next, t);
                break;
            case SegmentItem::Kind::PendingReturn:
                for (StateId q : cur)
                    for (StateId qi : a_.initial)
                        for (StateId t : a_.delta_ret(q, qi, letters_[it.pos - 1]))
                            set_insert(next, t);
                break;
            case SegmentItem::Kind::Block:
                for (StateId q : cur)
                    for (StateId t : block_exits(it, q)) set_insert(next, t);
                break;
        }
        return next;
    }

private:
    StateSet run_items(const std::vector<SegmentItem>& items, StateSet cur) {
        for (const auto& it : items) {
            if (cur.empty()) break;
            cur = step_item(it, cur);
        }
        return cur;
    }

    const Nwa& a_;
    const std::vector<TaggedLetter>& letters_;
    const std::vector<SegmentItem>& items_;
    std::map<std::pair<const SegmentItem*, StateId>, StateSet> memo_;
};

// ---------------------------------------------------------------------------
// Step graph over one loop copy
// ---------------------------------------------------------------------------

struct StepEdge {
    StateId from = 0, to = 0;
    StateSet steps; // states at the copy's step positions (includes `to`)
};

class LoopStepGraph {
public:
    LoopStepGraph(const Nwa& a, const LassoNestedWord& w, std::size_t pair_cap = 2000000)
        : a_(a),
          letters_(w.loop()),
          items_(segment_items(w.loop_length(), w.loop_pairs(), w.loop_pending_calls(), {})),
          runner_(a, letters_, items_),
          cap_(pair_cap) {}

    const std::vector<StepEdge>& edges_from(StateId q) {
        auto it = cache_.find(q);
        if (it != cache_.end()) return it->second;
        // walk top-level items tracking (current state, step set so far)
        std::set<std::pair<StateId, StateSet>> frontier{{q, {}}};
        for (const auto& item : items_) {
            std::set<std::pair<StateId, StateSet>> next;
            for (const auto& [cur, steps] : frontier) {
                for (StateId t : runner_.step_item(item, {cur})) {
                    StateSet s2 = steps;
                    set_insert(s2, t); // every top-level item lands on a step position
                    next.emplace(t, std::move(s2));
                }
                if (next.size() > cap_)
                    throw Error(ErrorKind::LimitExceeded,
                                "step graph exploration exceeded " + std::to_string(cap_) +
                                    " (state, step-set) pairs");
            }
            frontier = std::move(next);
        }
        std::vector<StepEdge> out;
        out.reserve(frontier.size());
        for (auto& [cur, steps] : frontier) out.push_back(StepEdge{q, cur, steps});
        return cache_.emplace(q, std::move(out)).first->second;
    }

private:
    const Nwa& a_;
    const std::vector<TaggedLetter>& letters_;
    std::vector<SegmentItem> items_;
    SegmentRunner runner_;
    std::size_t cap_;
    std::unordered_map<StateId, std::vector<StepEdge>> cache_;
};

// ---------------------------------------------------------------------------
// SCC partition (iterative Tarjan over an edge list restricted to a subset)
// ---------------------------------------------------------------------------

namespace detail {
// nodes: arbitrary ids; edges given by adjacency on a node list.  Returns the
// component index per node (components in reverse topological order).
inline std::vector<std::size_t> tarjan_scc(
    std::size_t n, const std::vector<std::vector<std::size_t>>& adj, std::size_t& comp_count) {
    std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0), comp(n, SIZE_MAX);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0;
    comp_count = 0;

    struct Frame {
        std::size_t v;
        std::size_t child = 0;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != SIZE_MAX) continue;
        std::vector<Frame> call_stack{{root}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call_stack.empty()) {
            Frame& f = call_stack.back();
            if (f.child < adj[f.v].size()) {
                std::size_t w = adj[f.v][f.child++];
                if (index[w] == SIZE_MAX) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    while (true) {
                        std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if (w == f.v) break;
                    }
                    ++comp_count;
                }
                std::size_t v = f.v;
                call_stack.pop_back();
                if (!call_stack.empty())
                    low[call_stack.back().v] = std::min(low[call_stack.back().v], low[v]);
            }
        }
    }
    return comp;
}
} // namespace detail

// ---------------------------------------------------------------------------
// Muller acceptance over step edges
// ---------------------------------------------------------------------------

namespace detail {

// Map edge list to compact node indexing and SCC-internal edge groups.
struct EdgeGraph {
    std::vector<StateId> nodes;                     // compact -> state
    std::unordered_map<StateId, std::size_t> id;    // state -> compact
    std::vector<std::vector<std::size_t>> by_scc;   // edge indices per SCC
};

template <class Edge> // anything with .from / .to state ids
EdgeGraph group_by_scc(const std::vector<Edge>& edges, const std::vector<std::size_t>& which) {
    EdgeGraph g;
    for (std::size_t e : which) {
        for (StateId q : {edges[e].from, edges[e].to})
            if (!g.id.count(q)) {
                g.id[q] = g.nodes.size();
                g.nodes.push_back(q);
            }
    }
    std::vector<std::vector<std::size_t>> adj(g.nodes.size());
    for (std::size_t e : which) adj[g.id[edges[e].from]].push_back(g.id[edges[e].to]);
    std::size_t comp_count = 0;
    auto comp = tarjan_scc(g.nodes.size(), adj, comp_count);
    g.by_scc.assign(comp_count, {});
    for (std::size_t e : which) {
        std::size_t cf = comp[g.id[edges[e].from]], ct = comp[g.id[edges[e].to]];
        if (cf == ct) g.by_scc[cf].push_back(e);
    }
    return g;
}

// Explicit-family Muller check: for each F restrict to edges with S <= F and
// look for an SCC whose step union is exactly F.
inline bool muller_accepts_explicit(const std::vector<StepEdge>& edges,
                                    const std::vector<StateSet>& family) {
    for (const auto& f : family) {
        std::vector<std::size_t> which;
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (subset_of(edges[e].steps, f)) which.push_back(e);
        if (which.empty()) continue;
        auto g = group_by_scc(edges, which);
        for (const auto& inside : g.by_scc) {
            if (inside.empty()) continue;
            StateSet u;
            for (std::size_t e : inside) u = set_union(u, edges[e].steps);
            if (u == f) return true;
        }
    }
    return false;
}

// Predicate-family Muller check: enumerate candidate strongly connected edge
// subsets by SCC decomposition plus state removal, memoized on edge subsets.
inline bool muller_accepts_predicate(const std::vector<StepEdge>& edges,
                                     const std::function<bool(const StateSet&)>& member,
                                     std::size_t memo_cap = 200000) {
    std::set<std::vector<std::size_t>> seen;
    std::function<bool(const std::vector<std::size_t>&)> decide =
        [&](const std::vector<std::size_t>& which) -> bool {
        if (which.empty()) return false;
        if (!seen.insert(which).second) return false;
        if (seen.size() > memo_cap)
            throw Error(ErrorKind::LimitExceeded, "Muller candidate enumeration exploded");
        auto g = group_by_scc(edges, which);
        for (const auto& inside : g.by_scc) {
            if (inside.empty()) continue;
            StateSet u;
            for (std::size_t e : inside) u = set_union(u, edges[e].steps);
            if (member(u)) return true;
            for (StateId s : u) {
                std::vector<std::size_t> sub;
                for (std::size_t e : which)
                    if (!set_contains(edges[e].steps, s)) sub.push_back(e);
                if (sub.size() < which.size() && decide(sub)) return true;
            }
        }
        return false;
    };
    std::vector<std::size_t> all(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) all[e] = e;
    return decide(all);
}

} // namespace detail

// States reachable after the prefix (boundary states entering the first copy).
inline StateSet prefix_boundary_states(const Nwa& a, const LassoNestedWord& w) {
    auto items = segment_items(w.prefix_length(), w.prefix_pairs(), w.prefix_pending_calls(),
                               w.prefix_pending_returns());
    SegmentRunner runner(a, w.prefix(), items);
    StateSet init = a.initial;
    normalize_set(init);
    return runner.run(init);
}

// Discover all step edges reachable from the given boundary states.
inline std::vector<StepEdge> reachable_step_edges(const Nwa& a, const LassoNestedWord& w,
                                                  const StateSet& start) {
    LoopStepGraph graph(a, w);
    std::vector<StepEdge> all;
    std::set<StateId> visited;
    std::vector<StateId> todo(start.begin(), start.end());
    while (!todo.empty()) {
        StateId q = todo.back();
        todo.pop_back();
        if (!visited.insert(q).second) continue;
        for (const auto& e : graph.edges_from(q)) {
            all.push_back(e);
            if (!visited.count(e.to)) todo.push_back(e.to);
        }
    }
    return all;
}

inline void check_word_alphabet(const Alphabet& al, const LassoNestedWord& w) {
    uint64_t lim = uint64_t(1) << al.bit_count();
    for (const auto* part : {&w.prefix(), &w.loop()}) {
        for (const auto& l : *part) {
            if (!al.has_symbol(l.symbol))
                throw Error(ErrorKind::AlphabetMismatch,
                            "word symbol '" + l.symbol + "' not in the automaton alphabet");
            if (l.bits >= lim)
                throw Error(ErrorKind::AlphabetMismatch, "letter bits exceed the variable count");
        }
    }
}

inline bool membership(const Nwa& a, const LassoNestedWord& w) {
    check_word_alphabet(a.alphabet, w);
    StateSet boundary = prefix_boundary_states(a, w);
    if (boundary.empty()) return false;
    auto edges = reachable_step_edges(a, w, boundary);
    if (edges.empty()) return false;
    if (a.accept.explicit_sets)
        return detail::muller_accepts_explicit(edges, *a.accept.explicit_sets);
    return detail::muller_accepts_predicate(edges, a.accept.member);
}

// ---------------------------------------------------------------------------
// Boolean closure
// ---------------------------------------------------------------------------

// Adds a rejecting sink so every transition function is total.  Preserves the
// language: runs that previously died now live in the sink, and the family
// rejects every set containing it.
inline Nwa complete(const Nwa& a) {
    Nwa b = a;
    StateId sink = static_cast<StateId>(a.state_count);
    b.state_count = a.state_count + 1;
    auto wrap1 = [sink](std::function<StateSet(StateId, const TaggedLetter&)> f) {
        return [f, sink](StateId q, const TaggedLetter& l) -> StateSet {
            if (q == sink) return {sink};
            StateSet s = f(q, l);
            if (s.empty()) return {sink};
            return s;
        };
    };
    b.delta_call = wrap1(a.delta_call);
    b.delta_int = wrap1(a.delta_int);
    auto f = a.delta_ret;
    b.delta_ret = [f, sink](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (q == sink || h == sink) return {sink};
        StateSet s = f(q, h, l);
        if (s.empty()) return {sink};
        return s;
    };
    auto inner = a.accept.member;
    b.accept.member = [inner, sink](const StateSet& s) {
        return !set_contains(s, sink) && inner(s);
    };
    b.accept.explicit_sets = a.accept.explicit_sets; // sink never appears in them
    if (!a.state_names.empty()) b.state_names.push_back("sink");
    return b;
}

inline Nwa complement_deterministic(const Nwa& a) {
    if (!a.deterministic || a.initial.size() != 1)
        throw Error(ErrorKind::NotDeterministic, "complement needs a deterministic automaton");
    Nwa b = complete(a);
    StateId sink = static_cast<StateId>(a.state_count);
    auto inner = a.accept.member;
    b.accept.member = [inner, sink](const StateSet& s) {
        if (set_contains(s, sink)) return true; // dead original run: word was rejected
        return !inner(s);
    };
    b.accept.explicit_sets.reset();
    return b;
}

inline Nwa product(const Nwa& a, const Nwa& b) {
    if (!(a.alphabet == b.alphabet))
        throw Error(ErrorKind::AlphabetMismatch, "product needs a shared alphabet");
    Nwa p;
    p.alphabet = a.alphabet;
    std::size_t nb = b.state_count;
    p.state_count = a.state_count * nb;
    for (StateId qa : a.initial)
        for (StateId qb : b.initial) p.initial.push_back(static_cast<StateId>(qa * nb + qb));
    auto pair1 = [nb](std::function<StateSet(StateId, const TaggedLetter&)> fa,
                      std::function<StateSet(StateId, const TaggedLetter&)> fb) {
        return [fa, fb, nb](StateId q, const TaggedLetter& l) {
            StateSet out;
            for (StateId x : fa(static_cast<StateId>(q / nb), l))
                for (StateId y : fb(static_cast<StateId>(q % nb), l))
                    set_insert(out, static_cast<StateId>(x * nb + y));
            return out;
        };
    };
    p.delta_call = pair1(a.delta_call, b.delta_call);
    p.delta_int = pair1(a.delta_int, b.delta_int);
    auto fra = a.delta_ret;
    auto frb = b.delta_ret;
    p.delta_ret = [fra, frb, nb](StateId q, StateId h, const TaggedLetter& l) {
        StateSet out;
        for (StateId x : fra(static_cast<StateId>(q / nb), static_cast<StateId>(h / nb), l))
            for (StateId y : frb(static_cast<StateId>(q % nb), static_cast<StateId>(h % nb), l))
                set_insert(out, static_cast<StateId>(x * nb + y));
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
    return p;
}

// Disjoint union: nondeterministic initial choice; mixed-component return
// transitions are empty, so each run stays inside one component.
inline Nwa union_nwa(const Nwa& a, const Nwa& b) {
    if (!(a.alphabet == b.alphabet))
        throw Error(ErrorKind::AlphabetMismatch, "union needs a shared alphabet");
    Nwa u;
    u.alphabet = a.alphabet;
    StateId off = static_cast<StateId>(a.state_count);
    u.state_count = a.state_count + b.state_count;
    u.initial = a.initial;
    for (StateId q : b.initial) u.initial.push_back(q + off);
    auto side1 = [off](std::function<StateSet(StateId, const TaggedLetter&)> fa,
                       std::function<StateSet(StateId, const TaggedLetter&)> fb) {
        return [fa, fb, off](StateId q, const TaggedLetter& l) {
            StateSet out;
            if (q < off) return fa(q, l);
            for (StateId t : fb(q - off, l)) set_insert(out, t + off);
            return out;
        };
    };
    u.delta_call = side1(a.delta_call, b.delta_call);
    u.delta_int = side1(a.delta_int, b.delta_int);
    auto fra = a.delta_ret;
    auto frb = b.delta_ret;
    u.delta_ret = [fra, frb, off](StateId q, StateId h, const TaggedLetter& l) {
        StateSet out;
        if (q < off && h < off) return fra(q, h, l);
        if (q >= off && h >= off)
            for (StateId t : frb(q - off, h - off, l)) set_insert(out, t + off);
        return out;
    };
    auto ma = a.accept.member;
    auto mb = b.accept.member;
    u.accept.member = [ma, mb, off](const StateSet& s) {
        if (s.empty()) return false;
        bool in_a = s.front() < off, all_a = true, all_b = true;
        StateSet shifted;
        for (StateId q : s) {
            if (q < off) all_b = false;
            else {
                all_a = false;
                shifted.push_back(q - off);
            }
        }
        (void)in_a;
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
    return u;
}

// Reachable-state compaction.  Iterated products keep multiplying virtual
// state counts until the id arithmetic overflows; trimming rebuilds the
// automaton over its reachable part only (language unchanged).  Hierarchical
// states at returns range over every discovered state -- a superset of the
// actually pushable ones -- so nothing reachable is missed.
inline Nwa trim(const Nwa& a, std::size_t max_states = 65536) {
    std::vector<TaggedLetter> linear, returns;
    for (const auto& pl : a.alphabet.plain_letters()) {
        linear.push_back(TaggedLetter{pl.symbol, Tag::Internal, pl.bits});
        linear.push_back(TaggedLetter{pl.symbol, Tag::Call, pl.bits});
        returns.push_back(TaggedLetter{pl.symbol, Tag::Return, pl.bits});
    }
    std::vector<StateId> order; // reachable states in discovery order
    auto index = std::make_shared<std::unordered_map<StateId, StateId>>();
    auto visit = [&](StateId q) {
        if (index->count(q)) return;
        if (order.size() >= max_states)
            throw Error(ErrorKind::LimitExceeded,
                        "trim: more than " + std::to_string(max_states) + " reachable states");
        index->emplace(q, static_cast<StateId>(order.size()));
        order.push_back(q);
    };
    for (StateId q : a.initial) visit(q);
    std::size_t lin_done = 0, ret_done = 0;
    while (lin_done < order.size() || ret_done < order.size()) {
        while (lin_done < order.size()) {
            StateId q = order[lin_done++];
            for (const auto& l : linear)
                for (StateId t : (l.tag == Tag::Call ? a.delta_call : a.delta_int)(q, l))
                    visit(t);
        }
        std::size_t upto = order.size();
        for (std::size_t i = ret_done; i < upto; ++i)
            for (std::size_t j = 0; j < upto; ++j)
                for (const auto& l : returns) {
                    for (StateId t : a.delta_ret(order[i], order[j], l)) visit(t);
                    if (j < ret_done)
                        for (StateId t : a.delta_ret(order[j], order[i], l)) visit(t);
                }
        ret_done = upto;
    }

    Nwa t;
    t.alphabet = a.alphabet;
    t.state_count = order.size();
    for (StateId q : a.initial) set_insert(t.initial, index->at(q));
    auto old_of = std::make_shared<std::vector<StateId>>(std::move(order));
    auto remap = [index](const StateSet& s) {
        StateSet out;
        for (StateId q : s) {
            auto it = index->find(q);
            if (it != index->end()) set_insert(out, it->second);
        }
        return out;
    };
    auto lift1 = [old_of, remap](std::function<StateSet(StateId, const TaggedLetter&)> f) {
        return [old_of, remap, f](StateId q, const TaggedLetter& l) -> StateSet {
            if (q >= old_of->size()) return {};
            return remap(f((*old_of)[q], l));
        };
    };
    t.delta_call = lift1(a.delta_call);
    t.delta_int = lift1(a.delta_int);
    auto fr = a.delta_ret;
    t.delta_ret = [old_of, remap, fr](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (q >= old_of->size() || h >= old_of->size()) return {};
        return remap(fr((*old_of)[q], (*old_of)[h], l));
    };
    auto ma = a.accept.member;
    t.accept.member = [ma, old_of](const StateSet& s) {
        StateSet olds;
        for (StateId q : s) {
            if (q >= old_of->size()) return false;
            set_insert(olds, (*old_of)[q]);
        }
        return ma(olds);
    };
    if (a.accept.explicit_sets) {
        std::vector<StateSet> sets;
        for (const StateSet& s : *a.accept.explicit_sets) {
            StateSet mapped;
            bool live = true;
            for (StateId q : s) {
                auto it = index->find(q);
                if (it == index->end()) {
                    live = false; // an unreachable state is never visited
                    break;
                }
                set_insert(mapped, it->second);
            }
            if (live) sets.push_back(std::move(mapped));
        }
        t.accept.explicit_sets = std::move(sets);
    }
    t.deterministic = a.deterministic;
    if (a.state_names.size() == a.state_count && a.state_count > 0) {
        for (StateId q : *old_of) t.state_names.push_back(a.state_names[q]);
    }
    return t;
}

inline Nwa universal_nwa(Alphabet al) {
    Nwa a;
    a.alphabet = std::move(al);
    a.state_count = 1;
    a.initial = {0};
    a.delta_call = [](StateId, const TaggedLetter&) -> StateSet { return {0}; };
    a.delta_int = [](StateId, const TaggedLetter&) -> StateSet { return {0}; };
    a.delta_ret = [](StateId, StateId, const TaggedLetter&) -> StateSet { return {0}; };
    a.accept = AcceptFamily::from_sets({{0}});
    a.deterministic = true;
    a.state_names = {"u"};
    return a;
}

inline Nwa empty_nwa(Alphabet al) {
    Nwa a = universal_nwa(std::move(al));
    a.accept = AcceptFamily::from_sets({});
    a.state_names = {"e"};
    return a;
}

// ---------------------------------------------------------------------------
// Table-backed construction
// ---------------------------------------------------------------------------

class NwaBuilder {
public:
    Alphabet alphabet;
    std::size_t states = 0;
    std::vector<StateId> initial;
    std::vector<StateSet> accept_sets;
    std::vector<std::string> state_names;

    void add_int(StateId q, const std::string& sym, uint64_t bits, StateId to) {
        lin_[key(q, sym, bits, 0)].push_back(to);
    }
    void add_call(StateId q, const std::string& sym, uint64_t bits, StateId to) {
        lin_[key(q, sym, bits, 1)].push_back(to);
    }
    void add_ret(StateId q, StateId hier, const std::string& sym, uint64_t bits, StateId to) {
        ret_[std::make_tuple(q, hier, sym, bits)].push_back(to);
    }

    Nwa build() const {
        Nwa a;
        a.alphabet = alphabet;
        a.state_count = states;
        a.initial = initial;
        a.state_names = state_names;
        auto lin = std::make_shared<LinTable>(lin_);
        auto ret = std::make_shared<RetTable>(ret_);
        a.delta_int = [lin](StateId q, const TaggedLetter& l) -> StateSet {
            auto it = lin->find(key(q, l.symbol, l.bits, 0));
            if (it == lin->end()) return {};
            StateSet s = it->second;
            normalize_set(s);
            return s;
        };
        a.delta_call = [lin](StateId q, const TaggedLetter& l) -> StateSet {
            auto it = lin->find(key(q, l.symbol, l.bits, 1));
            if (it == lin->end()) return {};
            StateSet s = it->second;
            normalize_set(s);
            return s;
        };
        a.delta_ret = [ret](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
            auto it = ret->find(std::make_tuple(q, h, l.symbol, l.bits));
            if (it == ret->end()) return {};
            StateSet s = it->second;
            normalize_set(s);
            return s;
        };
        a.accept = AcceptFamily::from_sets(accept_sets);
        a.deterministic = is_deterministic();
        return a;
    }

    // single initial state and at most one successor per configuration
    bool is_deterministic() const {
        if (initial.size() != 1) return false;
        for (const auto& [k, v] : lin_)
            if (v.size() > 1) return false;
        for (const auto& [k, v] : ret_)
            if (v.size() > 1) return false;
        return true;
    }

private:
    using LinKey = std::tuple<StateId, std::string, uint64_t, int>;
    using LinTable = std::map<LinKey, std::vector<StateId>>;
    using RetKey = std::tuple<StateId, StateId, std::string, uint64_t>;
    using RetTable = std::map<RetKey, std::vector<StateId>>;

    static LinKey key(StateId q, const std::string& sym, uint64_t bits, int tag) {
        return std::make_tuple(q, sym, bits, tag);
    }
    LinTable lin_;
    RetTable ret_;
};

// ---------------------------------------------------------------------------
// Witness search (best effort, bounded enumeration)
// ---------------------------------------------------------------------------

inline std::optional<LassoNestedWord> nonemptiness(const Nwa& a, std::size_t budget = 60000) {
    std::vector<TaggedLetter> sigma; // all (symbol, bits, tag) combinations
    for (const auto& pl : a.alphabet.plain_letters())
        for (Tag t : {Tag::Internal, Tag::Call, Tag::Return})
            sigma.push_back(TaggedLetter{pl.symbol, t, pl.bits});
    std::size_t tried = 0;
    for (std::size_t loop_len = 1; loop_len <= 3; ++loop_len) {
        for (std::size_t pre_len = 0; pre_len <= 2; ++pre_len) {
            std::size_t total = pre_len + loop_len;
            std::vector<std::size_t> idx(total, 0);
            while (true) {
                if (tried++ > budget) return std::nullopt;
                std::vector<TaggedLetter> pre, loop;
                for (std::size_t i = 0; i < pre_len; ++i) pre.push_back(sigma[idx[i]]);
                for (std::size_t i = pre_len; i < total; ++i) loop.push_back(sigma[idx[i]]);
                try {
                    LassoNestedWord w(pre, loop);
                    if (membership(a, w)) return w;
                } catch (const Error&) {
                    // loop not return-matched: skip candidate
                }
                std::size_t k = 0;
                while (k < total && ++idx[k] == sigma.size()) idx[k++] = 0;
                if (k == total) break;
            }
        }
    }
    return std::nullopt;
}

} // namespace wnwa

#endif // WNWA_NWA_HH_
