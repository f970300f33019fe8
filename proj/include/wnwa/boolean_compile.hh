/* boolean_compile.hh -- deterministic automata for the boolean formula layer
 *
 * Compiles boolean formulas (no constants) into deterministic stair Muller
 * automata over the extended alphabet that carries one bit per free variable.
 * Conjunction maps to products, disjunction and negation to complements of
 * deterministic automata, and quantifiers are recognized against a catalog of
 * clause templates (pointwise conditions, pending-call/pending-return scopes,
 * matched-pair and successor constraints, step recurrence).  Shapes outside
 * the catalog raise UnsupportedBooleanConstruct.
 *
 * Two facts make the templates deterministic.  First, a return is pending
 * exactly when no call is open (an open call would force a crossing), so a
 * single "no open call" bit distinguishes pending from matched returns, and
 * it is restorable through the hierarchical argument.  Second, whether a call
 * is pending resolves either at its matching return or never, so obligations
 * of the form "this call must (not) be matched" can be carried in scoped bits
 * that the hierarchical argument restores, with violations detected at the
 * matching return or, for calls that must be matched but never are, by the
 * acceptance family (the sticky obligation bit is visible at step positions
 * only while violated).
 */

#ifndef WNWA_BOOLEAN_COMPILE_HH_
#define WNWA_BOOLEAN_COMPILE_HH_

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "error.hh"
#include "formula.hh"
#include "nwa.hh"

namespace wnwa {

namespace detail {

inline Nwa make_template(Alphabet al, std::size_t n, StateId init,
                         std::function<StateSet(StateId, const TaggedLetter&)> di,
                         std::function<StateSet(StateId, const TaggedLetter&)> dc,
                         std::function<StateSet(StateId, StateId, const TaggedLetter&)> dr,
                         std::function<bool(const StateSet&)> member) {
    Nwa a;
    a.alphabet = std::move(al);
    a.state_count = n;
    a.initial = {init};
    a.delta_int = std::move(di);
    a.delta_call = std::move(dc);
    a.delta_ret = std::move(dr);
    a.accept.member = std::move(member);
    a.deterministic = true;
    return a;
}

inline std::function<bool(const StateSet&)> all_good(std::function<bool(StateId)> good) {
    return [good](const StateSet& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), good);
    };
}
inline std::function<bool(const StateSet&)> some_good(std::function<bool(StateId)> good) {
    return [good](const StateSet& s) { return std::any_of(s.begin(), s.end(), good); };
}

inline bool marked(const TaggedLetter& l, std::size_t bit) { return l.bits >> bit & 1; }

// ---------------------------------------------------------------------------
// Pointwise facts decidable from the letter plus the "no open call" bit
// ---------------------------------------------------------------------------

enum class InstKind : uint8_t { Sym, IsCall, IsRet, Bit, IsPret, IsMatchedRet };

struct Instant {
    bool pos = true;
    InstKind kind = InstKind::Sym;
    std::string sym;
    std::size_t bit = 0;
};

inline bool eval_instant(const Instant& in, const TaggedLetter& l, bool pending_ret) {
    bool v = false;
    switch (in.kind) {
        case InstKind::Sym: v = l.symbol == in.sym; break;
        case InstKind::IsCall: v = l.tag == Tag::Call; break;
        case InstKind::IsRet: v = l.tag == Tag::Return; break;
        case InstKind::Bit: v = marked(l, in.bit); break;
        case InstKind::IsPret: v = l.tag == Tag::Return && pending_ret; break;
        case InstKind::IsMatchedRet: v = l.tag == Tag::Return && !pending_ret; break;
    }
    return in.pos ? v : !v;
}

inline bool eval_clause(const std::vector<Instant>& ors, const TaggedLetter& l,
                        bool pending_ret) {
    for (const auto& in : ors)
        if (eval_instant(in, l, pending_ret)) return true;
    return false;
}
inline bool eval_conj(const std::vector<Instant>& ands, const TaggedLetter& l,
                      bool pending_ret) {
    for (const auto& in : ands)
        if (!eval_instant(in, l, pending_ret)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Atom templates (free variables; the marked position is read from its bit)
// ---------------------------------------------------------------------------

// accepts iff the position marked by `bit` satisfies a pointwise fact;
// states: (phase: 0 pre / 1 sat) * 2 + g0 where g0 = "no open call"
inline Nwa local_check_automaton(Alphabet al, std::size_t bit, Instant fact) {
    auto enc = [](int phase, bool g0) { return StateId(phase * 2 + (g0 ? 1 : 0)); };
    auto phase_of = [](StateId q) { return int(q / 2); };
    auto g0_of = [](StateId q) { return q % 2 == 1; };
    auto step = [=](StateId q, const TaggedLetter& l, bool g0_next, bool pending_ret) -> StateSet {
        int ph = phase_of(q);
        if (marked(l, bit)) {
            if (ph != 0) return {};
            if (!eval_instant(fact, l, pending_ret)) return {};
            ph = 1;
        }
        return {enc(ph, g0_next)};
    };
    auto di = [=](StateId q, const TaggedLetter& l) { return step(q, l, g0_of(q), false); };
    auto dc = [=](StateId q, const TaggedLetter& l) { return step(q, l, false, false); };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) return step(q, l, true, true);       // pending return
        return step(q, l, g0_of(h), false);                // matched: restore g0
    };
    return make_template(std::move(al), 4, enc(0, true), di, dc, dr,
                         all_good([=](StateId q) { return phase_of(q) == 1; }));
}

// x <= y over the marked positions
inline Nwa leq_automaton(Alphabet al, std::size_t bx, std::size_t by) {
    // 0 = neither seen, 1 = x seen, 2 = satisfied
    auto step = [=](StateId q, const TaggedLetter& l) -> StateSet {
        bool mx = marked(l, bx), my = marked(l, by);
        if (mx && my) return q == 0 ? StateSet{2} : StateSet{};
        if (mx) return q == 0 ? StateSet{1} : StateSet{};
        if (my) return q == 1 ? StateSet{2} : StateSet{};
        return {q};
    };
    return make_template(
        std::move(al), 3, 0, step, step,
        [=](StateId q, StateId, const TaggedLetter& l) { return step(q, l); },
        all_good([](StateId q) { return q == 2; }));
}

// succ(x, y): y is the immediate successor of x
inline Nwa succ_automaton(Alphabet al, std::size_t bx, std::size_t by) {
    // 0 = before x, 1 = y due now, 2 = satisfied
    auto step = [=](StateId q, const TaggedLetter& l) -> StateSet {
        bool mx = marked(l, bx), my = marked(l, by);
        if (q == 1) {
            if (!my || mx) return {};
            return {2};
        }
        if (mx) return (q == 0 && !my) ? StateSet{1} : StateSet{};
        if (my) return {}; // y before x, or repeated
        return {q};
    };
    return make_template(
        std::move(al), 3, 0, step, step,
        [=](StateId q, StateId, const TaggedLetter& l) { return step(q, l); },
        all_good([](StateId q) { return q == 2; }));
}

// nu(x, y): the marked positions form a matched call/return pair.
// phase: 0 pre, 1 open (x's block entered), 2 satisfied; scoped through the
// hierarchical argument, so at a matched return, hier phase 0 with current
// phase 1 identifies x's own return.
inline Nwa nu_automaton(Alphabet al, std::size_t bx, std::size_t by) {
    auto enc = [](int phase, bool g0) { return StateId(phase * 2 + (g0 ? 1 : 0)); };
    auto phase_of = [](StateId q) { return int(q / 2); };
    auto g0_of = [](StateId q) { return q % 2 == 1; };
    auto linear = [=](StateId q, const TaggedLetter& l, bool g0_next, bool is_call) -> StateSet {
        bool mx = marked(l, bx), my = marked(l, by);
        if (my) return {}; // y must sit on a matched return
        int ph = phase_of(q);
        if (mx) {
            if (!is_call || ph != 0) return {};
            ph = 1;
        }
        return {enc(ph, g0_next)};
    };
    auto di = [=](StateId q, const TaggedLetter& l) { return linear(q, l, g0_of(q), false); };
    auto dc = [=](StateId q, const TaggedLetter& l) { return linear(q, l, false, true); };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        bool mx = marked(l, bx), my = marked(l, by);
        if (mx) return {};
        if (g0_of(q)) {
            // pending return
            if (my) return {};
            return {enc(phase_of(q), true)};
        }
        int cur = phase_of(q), hier = phase_of(h);
        bool own = hier == 0 && cur == 1; // this pair's call is x
        if (my) return own ? StateSet{enc(2, g0_of(h))} : StateSet{};
        if (own) return {}; // x's block closed without y
        int ph = cur == 2 ? 2 : hier;
        return {enc(ph, g0_of(h))};
    };
    return make_template(std::move(al), 6, enc(0, true), di, dc, dr,
                         all_good([=](StateId q) { return phase_of(q) == 2; }));
}

// pcall(x): the marked position is a pending call
inline Nwa pcall_automaton(Alphabet al, std::size_t bx) {
    auto enc = [](int phase, bool g0) { return StateId(phase * 2 + (g0 ? 1 : 0)); };
    auto phase_of = [](StateId q) { return int(q / 2); };
    auto g0_of = [](StateId q) { return q % 2 == 1; };
    // phase: 0 pre, 1 x seen as call (must stay pending)
    auto linear = [=](StateId q, const TaggedLetter& l, bool g0_next, bool is_call) -> StateSet {
        int ph = phase_of(q);
        if (marked(l, bx)) {
            if (!is_call || ph != 0) return {};
            ph = 1;
        }
        return {enc(ph, g0_next)};
    };
    auto di = [=](StateId q, const TaggedLetter& l) { return linear(q, l, g0_of(q), false); };
    auto dc = [=](StateId q, const TaggedLetter& l) { return linear(q, l, false, true); };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (marked(l, bx)) return {};
        if (g0_of(q)) return {enc(phase_of(q), true)};
        int cur = phase_of(q), hier = phase_of(h);
        if (hier == 0 && cur == 1) return {}; // x was matched after all
        return {enc(hier, g0_of(h))};
    };
    return make_template(std::move(al), 4, enc(0, true), di, dc, dr,
                         all_good([=](StateId q) { return phase_of(q) == 1; }));
}

// step(x): no matched pair spans the marked position
inline Nwa step_automaton(Alphabet al, std::size_t bx) {
    auto enc = [](int phase, bool g0) { return StateId(phase * 2 + (g0 ? 1 : 0)); };
    auto phase_of = [](StateId q) { return int(q / 2); };
    auto g0_of = [](StateId q) { return q % 2 == 1; };
    auto mark = [=](int ph, const TaggedLetter& l) -> std::optional<int> {
        if (!marked(l, bx)) return ph;
        if (ph != 0) return std::nullopt;
        return 1;
    };
    auto di = [=](StateId q, const TaggedLetter& l) -> StateSet {
        auto ph = mark(phase_of(q), l);
        if (!ph) return {};
        return {enc(*ph, g0_of(q))};
    };
    auto dc = [=](StateId q, const TaggedLetter& l) -> StateSet {
        auto ph = mark(phase_of(q), l);
        if (!ph) return {};
        return {enc(*ph, false)};
    };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) {
            auto ph = mark(phase_of(q), l);
            if (!ph) return {};
            return {enc(*ph, true)};
        }
        // matched return of pair (j, k): x strictly inside iff the phase
        // flipped between j-1 and k-1 (evaluated before k's own mark)
        if (phase_of(h) == 0 && phase_of(q) == 1) return {};
        auto ph = mark(phase_of(h), l);
        if (!ph) return {};
        return {enc(*ph, g0_of(h))};
    };
    return make_template(std::move(al), 4, enc(0, true), di, dc, dr,
                         all_good([=](StateId q) { return phase_of(q) == 1; }));
}

// min(x): the marked position is the first one
inline Nwa min_automaton(Alphabet al, std::size_t bx) {
    // 0 = at the first position, 1 = satisfied
    auto step = [=](StateId q, const TaggedLetter& l) -> StateSet {
        if (q == 0) return marked(l, bx) ? StateSet{1} : StateSet{};
        return marked(l, bx) ? StateSet{} : StateSet{1};
    };
    return make_template(
        std::move(al), 2, 0, step, step,
        [=](StateId q, StateId, const TaggedLetter& l) { return step(q, l); },
        all_good([](StateId q) { return q == 1; }));
}

// exactly one position carries the bit (valid first-order encoding)
inline Nwa exactly_once_automaton(Alphabet al, std::size_t bx) {
    auto step = [=](StateId q, const TaggedLetter& l) -> StateSet {
        if (!marked(l, bx)) return {q};
        return q == 0 ? StateSet{1} : StateSet{};
    };
    return make_template(
        std::move(al), 2, 0, step, step,
        [=](StateId q, StateId, const TaggedLetter& l) { return step(q, l); },
        all_good([](StateId q) { return q == 1; }));
}

// ---------------------------------------------------------------------------
// Quantified clause templates
// ---------------------------------------------------------------------------

// forall v . (instant-or over v, possibly with pcall(v) / !pcall(v) literals).
// State: (g0, mp, owe).  mp marks the innermost open call as "must stay
// pending" (checked at its matching return), owe is the sticky "some call
// that must be matched is still open or pending" flag, restored through the
// hierarchical argument and rejected by the family when it survives at steps.
inline Nwa forall_pointwise_automaton(Alphabet al, std::vector<Instant> ors, bool pos_pcall,
                                      bool neg_pcall) {
    auto enc = [](bool g0, bool mp, bool owe) {
        return StateId((g0 ? 1 : 0) + (mp ? 2 : 0) + (owe ? 4 : 0));
    };
    auto g0_of = [](StateId q) { return q & 1; };
    auto mp_of = [](StateId q) { return (q & 2) != 0; };
    auto owe_of = [](StateId q) { return (q & 4) != 0; };
    auto ok_noncall = [=](const TaggedLetter& l, bool pending_ret) {
        // pcall(v) is false here, so a negative pcall literal satisfies it
        return neg_pcall || eval_clause(ors, l, pending_ret);
    };
    auto di = [=](StateId q, const TaggedLetter& l) -> StateSet {
        if (!ok_noncall(l, false)) return {};
        return {q};
    };
    auto dc = [=](StateId q, const TaggedLetter& l) -> StateSet {
        if (eval_clause(ors, l, false) || (pos_pcall && neg_pcall))
            return {enc(false, false, owe_of(q))};
        if (pos_pcall) return {enc(false, true, owe_of(q))};  // must stay pending
        if (neg_pcall) return {enc(false, false, true)};      // must be matched
        return {};
    };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) {
            if (!ok_noncall(l, true)) return {};
            return {q};
        }
        if (mp_of(q)) return {}; // innermost call had to stay pending
        if (!ok_noncall(l, false)) return {};
        return {enc(g0_of(h), mp_of(h), owe_of(h))};
    };
    return make_template(std::move(al), 8, enc(true, false, false), di, dc, dr,
                         all_good([=](StateId q) { return !owe_of(q); }));
}

// forall x forall z . (y <= x or z <= y or !nu(x, z)):
// no matched pair strictly spans the position marked y.
inline Nwa no_spanning_pair_automaton(Alphabet al, std::size_t by) {
    // state bits: phase (y seen), ycall (innermost open call is y), g0
    auto enc = [](bool post, bool ycall, bool g0) {
        return StateId((post ? 1 : 0) + (ycall ? 2 : 0) + (g0 ? 4 : 0));
    };
    auto post_of = [](StateId q) { return (q & 1) != 0; };
    auto ycall_of = [](StateId q) { return (q & 2) != 0; };
    auto g0_of = [](StateId q) { return (q & 4) != 0; };
    auto mark = [=](bool post, const TaggedLetter& l) -> std::optional<bool> {
        if (!marked(l, by)) return post;
        if (post) return std::nullopt;
        return true;
    };
    auto di = [=](StateId q, const TaggedLetter& l) -> StateSet {
        auto p = mark(post_of(q), l);
        if (!p) return {};
        return {enc(*p, ycall_of(q), g0_of(q))};
    };
    auto dc = [=](StateId q, const TaggedLetter& l) -> StateSet {
        auto p = mark(post_of(q), l);
        if (!p) return {};
        return {enc(*p, marked(l, by), false)};
    };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) {
            auto p = mark(post_of(q), l);
            if (!p) return {};
            return {enc(*p, ycall_of(q), true)};
        }
        // pair (j,k): violation iff j < y-position < k, i.e. the phase
        // flipped strictly inside (not at j itself, not at k itself)
        if (!post_of(h) && post_of(q) && !ycall_of(q)) return {};
        auto p = mark(post_of(h) || post_of(q), l);
        if (!p) return {};
        return {enc(*p, ycall_of(h), g0_of(h))};
    };
    return make_template(std::move(al), 8, enc(false, false, true), di, dc, dr,
                         all_good([](StateId) { return true; }));
}

// forall x . (y <= x or !pcall(x)): no pending call strictly before y.
inline Nwa no_earlier_pending_call_automaton(Alphabet al, std::size_t by) {
    // state bits: post (y seen), owe ("a pre-y call is still open"), g0
    auto enc = [](bool post, bool owe, bool g0) {
        return StateId((post ? 1 : 0) + (owe ? 2 : 0) + (g0 ? 4 : 0));
    };
    auto post_of = [](StateId q) { return (q & 1) != 0; };
    auto owe_of = [](StateId q) { return (q & 2) != 0; };
    auto g0_of = [](StateId q) { return (q & 4) != 0; };
    auto mark = [=](bool post, const TaggedLetter& l) -> std::optional<bool> {
        if (!marked(l, by)) return post;
        if (post) return std::nullopt;
        return true;
    };
    auto di = [=](StateId q, const TaggedLetter& l) -> StateSet {
        auto p = mark(post_of(q), l);
        if (!p) return {};
        return {enc(*p, owe_of(q), g0_of(q))};
    };
    auto dc = [=](StateId q, const TaggedLetter& l) -> StateSet {
        bool pre_call = !post_of(q) && !marked(l, by); // strictly before y
        auto p = mark(post_of(q), l);
        if (!p) return {};
        return {enc(*p, owe_of(q) || pre_call, false)};
    };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) {
            auto p = mark(post_of(q), l);
            if (!p) return {};
            return {enc(*p, owe_of(q), true)};
        }
        auto p = mark(post_of(h) || post_of(q), l);
        if (!p) return {};
        return {enc(*p, owe_of(h), g0_of(h))};
    };
    return make_template(std::move(al), 8, enc(false, false, true), di, dc, dr,
                         all_good([=](StateId q) { return !owe_of(q); }));
}

// forall z . (z <= y or !pret(z)): no pending return strictly after y.
inline Nwa no_later_pending_return_automaton(Alphabet al, std::size_t by) {
    auto enc = [](bool post, bool g0) { return StateId((post ? 1 : 0) + (g0 ? 2 : 0)); };
    auto post_of = [](StateId q) { return (q & 1) != 0; };
    auto g0_of = [](StateId q) { return (q & 2) != 0; };
    auto mark = [=](bool post, const TaggedLetter& l) -> std::optional<bool> {
        if (!marked(l, by)) return post;
        if (post) return std::nullopt;
        return true;
    };
    auto di = [=](StateId q, const TaggedLetter& l) -> StateSet {
        auto p = mark(post_of(q), l);
        if (!p) return {};
        return {enc(*p, g0_of(q))};
    };
    auto dc = [=](StateId q, const TaggedLetter& l) -> StateSet {
        auto p = mark(post_of(q), l);
        if (!p) return {};
        return {enc(*p, false)};
    };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) {
            if (post_of(q)) return {}; // pending return strictly after y
            auto p = mark(post_of(q), l);
            if (!p) return {};
            return {enc(*p, true)};
        }
        auto p = mark(post_of(h) || post_of(q), l);
        if (!p) return {};
        return {enc(*p, g0_of(h))};
    };
    return make_template(std::move(al), 4, enc(false, true), di, dc, dr,
                         all_good([](StateId) { return true; }));
}

// forall w . !nu(x, w): the position marked x is never the call of a pair
inline Nwa never_call_of_pair_automaton(Alphabet al, std::size_t bx) {
    auto enc = [](int phase, bool g0) { return StateId(phase * 2 + (g0 ? 1 : 0)); };
    auto phase_of = [](StateId q) { return int(q / 2); };
    auto g0_of = [](StateId q) { return q % 2 == 1; };
    // phase: 0 pre, 1 x is an open call that must stay pending, 2 x was not a
    // call at all (vacuously satisfied)
    auto linear = [=](StateId q, const TaggedLetter& l, bool g0_next, bool is_call) -> StateSet {
        int ph = phase_of(q);
        if (marked(l, bx)) {
            if (ph != 0) return {};
            ph = is_call ? 1 : 2;
        }
        return {enc(ph, g0_next)};
    };
    auto di = [=](StateId q, const TaggedLetter& l) { return linear(q, l, g0_of(q), false); };
    auto dc = [=](StateId q, const TaggedLetter& l) { return linear(q, l, false, true); };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) return linear(q, l, true, false);
        int cur = phase_of(q), hier = phase_of(h);
        if (hier == 0 && cur == 1) return {}; // x's own matching return
        int ph = cur == 2 ? 2 : hier;
        if (marked(l, bx)) {
            if (ph != 0) return {};
            ph = 2; // matched return, not a call
        }
        return {enc(ph, g0_of(h))};
    };
    return make_template(std::move(al), 6, enc(0, true), di, dc, dr,
                         all_good([=](StateId q) { return phase_of(q) >= 1; }));
}

// forall x forall z . (!nu(x, z) or <pointwise condition over both ends>):
// checked at every matched return against the stored call-side facts.
struct PairSides {
    std::vector<Instant> call_side; // literals evaluated at the call position
    std::vector<Instant> ret_side;  // literals evaluated at the return position
};

inline Nwa matched_pair_condition_automaton(Alphabet al, PairSides sides) {
    std::size_t nsym = al.symbols.size();
    uint64_t nbits = uint64_t(1) << al.bit_count();
    std::size_t regs = nsym * nbits + 1; // +1 for "no enclosing call"
    auto sym_index = std::make_shared<std::vector<std::string>>(al.symbols);
    auto enc = [=](std::size_t reg, bool g0) { return StateId(reg * 2 + (g0 ? 1 : 0)); };
    auto reg_of = [](StateId q) { return std::size_t(q / 2); };
    auto g0_of = [](StateId q) { return q % 2 == 1; };
    auto snapshot = [=](const TaggedLetter& l) {
        std::size_t si =
            std::find(sym_index->begin(), sym_index->end(), l.symbol) - sym_index->begin();
        return 1 + si * nbits + l.bits;
    };
    auto restore_letter = [=](std::size_t reg) {
        std::size_t v = reg - 1;
        return TaggedLetter{(*sym_index)[v / nbits], Tag::Call, v % nbits};
    };
    auto di = [=](StateId q, const TaggedLetter&) -> StateSet { return {q}; };
    auto dc = [=](StateId q, const TaggedLetter& l) -> StateSet {
        (void)q;
        return {enc(snapshot(l), false)};
    };
    auto sides_ptr = std::make_shared<PairSides>(std::move(sides));
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        if (g0_of(q)) return {q};
        TaggedLetter call_letter = restore_letter(reg_of(q));
        bool ok = eval_clause(sides_ptr->call_side, call_letter, false) ||
                  eval_clause(sides_ptr->ret_side, l, false);
        if (!ok) return {};
        return {enc(reg_of(h), g0_of(h))};
    };
    return make_template(std::move(al), regs * 2, enc(0, true), di, dc, dr,
                         all_good([](StateId) { return true; }));
}

// forall x forall z . (!succ(x, z) or <pointwise condition over both ends>)
inline Nwa successor_condition_automaton(Alphabet al, PairSides sides) {
    std::size_t nsym = al.symbols.size();
    uint64_t nbits = uint64_t(1) << al.bit_count();
    // register: 0 = start of word, else 1 + ((sym * 2^B + bits) * 3 + tag) * 2 + pret
    std::size_t regs = 1 + nsym * nbits * 3 * 2;
    auto sym_index = std::make_shared<std::vector<std::string>>(al.symbols);
    auto enc = [=](std::size_t reg, bool g0) { return StateId(reg * 2 + (g0 ? 1 : 0)); };
    auto reg_of = [](StateId q) { return std::size_t(q / 2); };
    auto g0_of = [](StateId q) { return q % 2 == 1; };
    auto snapshot = [=](const TaggedLetter& l, bool pret) {
        std::size_t si =
            std::find(sym_index->begin(), sym_index->end(), l.symbol) - sym_index->begin();
        std::size_t tag = l.tag == Tag::Internal ? 0 : l.tag == Tag::Call ? 1 : 2;
        return 1 + ((si * nbits + l.bits) * 3 + tag) * 2 + (pret ? 1 : 0);
    };
    auto restore = [=](std::size_t reg, TaggedLetter& l, bool& pret) {
        std::size_t v = reg - 1;
        pret = v % 2 == 1;
        v /= 2;
        std::size_t tag = v % 3;
        v /= 3;
        l = TaggedLetter{(*sym_index)[v / nbits],
                         tag == 0 ? Tag::Internal : tag == 1 ? Tag::Call : Tag::Return,
                         v % nbits};
    };
    auto sides_ptr = std::make_shared<PairSides>(std::move(sides));
    auto check = [=](StateId q, const TaggedLetter& l, bool pret) {
        std::size_t reg = reg_of(q);
        if (reg == 0) return true; // no predecessor
        TaggedLetter prev;
        bool prev_pret = false;
        restore(reg, prev, prev_pret);
        return eval_clause(sides_ptr->call_side, prev, prev_pret) ||
               eval_clause(sides_ptr->ret_side, l, pret);
    };
    auto di = [=](StateId q, const TaggedLetter& l) -> StateSet {
        if (!check(q, l, false)) return {};
        return {enc(snapshot(l, false), g0_of(q))};
    };
    auto dc = [=](StateId q, const TaggedLetter& l) -> StateSet {
        if (!check(q, l, false)) return {};
        return {enc(snapshot(l, false), false)};
    };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        bool pret = g0_of(q);
        if (!check(q, l, pret)) return {};
        return {enc(snapshot(l, pret), pret ? true : g0_of(h))};
    };
    return make_template(std::move(al), regs * 2, enc(0, true), di, dc, dr,
                         all_good([](StateId) { return true; }));
}

// forall x . exists z . (x <= z and step(z) and <pointwise conjunction>):
// infinitely many step positions satisfy the condition.  The family samples
// states exactly at step positions, so a "this position qualified" bit does
// the counting.
inline Nwa recurrent_step_automaton(Alphabet al, std::vector<Instant> ands) {
    auto enc = [](bool good, bool g0) { return StateId((good ? 1 : 0) + (g0 ? 2 : 0)); };
    auto good_of = [](StateId q) { return (q & 1) != 0; };
    auto g0_of = [](StateId q) { return (q & 2) != 0; };
    auto di = [=](StateId q, const TaggedLetter& l) -> StateSet {
        return {enc(eval_conj(ands, l, false), g0_of(q))};
    };
    auto dc = [=](StateId, const TaggedLetter& l) -> StateSet {
        return {enc(eval_conj(ands, l, false), false)};
    };
    auto dr = [=](StateId q, StateId h, const TaggedLetter& l) -> StateSet {
        bool pret = g0_of(q);
        return {enc(eval_conj(ands, l, pret), pret ? true : g0_of(h))};
    };
    return make_template(std::move(al), 4, enc(false, true), di, dc, dr,
                         some_good([=](StateId q) { return good_of(q); }));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Formula dispatch
// ---------------------------------------------------------------------------

namespace detail {

struct Literal {
    bool pos = true;
    const Formula* f = nullptr;
};
using Clause = std::vector<Literal>;

inline void literal_vars(const Formula* f, std::set<std::string>& out) {
    for (const auto& v : free_variables(FPtr(std::shared_ptr<const Formula>(), f))) out.insert(v);
}

inline bool mentions(const Formula* f, const std::string& v) {
    std::set<std::string> vs;
    literal_vars(f, vs);
    return vs.count(v) != 0;
}

// conjunction of clauses; quantified subformulas stay opaque literals
inline std::vector<Clause> to_cnf(const Formula* f, bool pos) {
    switch (f->kind) {
        case FormulaKind::Not: return to_cnf(f->left.get(), !pos);
        case FormulaKind::And:
        case FormulaKind::Or: {
            bool conj = (f->kind == FormulaKind::And) == pos;
            auto l = to_cnf(f->left.get(), pos), r = to_cnf(f->right.get(), pos);
            if (conj) {
                l.insert(l.end(), r.begin(), r.end());
                return l;
            }
            std::vector<Clause> out;
            if (l.size() * r.size() > 256)
                throw Error(ErrorKind::UnsupportedBooleanConstruct,
                            "clause normal form explodes");
            for (const auto& cl : l)
                for (const auto& cr : r) {
                    Clause c = cl;
                    c.insert(c.end(), cr.begin(), cr.end());
                    out.push_back(std::move(c));
                }
            return out;
        }
        case FormulaKind::Const:
            throw Error(ErrorKind::UnsupportedBooleanConstruct,
                        "constants are not part of the boolean layer");
        default: return {Clause{Literal{pos, f}}};
    }
}

// pointwise fact over variable v, if the literal is one
inline std::optional<Instant> as_instant(const Literal& lit, const std::string& v,
                                         const Alphabet& al) {
    const Formula* f = lit.f;
    Instant in;
    in.pos = lit.pos;
    switch (f->kind) {
        case FormulaKind::Label:
            if (f->var != v) return std::nullopt;
            in.kind = InstKind::Sym;
            in.sym = f->symbol;
            return in;
        case FormulaKind::CallAtom:
            if (f->var != v) return std::nullopt;
            in.kind = InstKind::IsCall;
            return in;
        case FormulaKind::RetAtom:
            if (f->var != v) return std::nullopt;
            in.kind = InstKind::IsRet;
            return in;
        case FormulaKind::PRet:
            if (f->var != v) return std::nullopt;
            in.kind = InstKind::IsPret;
            return in;
        case FormulaKind::InSet: {
            if (f->var != v) return std::nullopt;
            auto it = std::find(al.variables.begin(), al.variables.end(), f->var2);
            if (it == al.variables.end()) return std::nullopt;
            in.kind = InstKind::Bit;
            in.bit = std::size_t(it - al.variables.begin());
            return in;
        }
        default: return std::nullopt;
    }
}

} // namespace detail

class BooleanCompiler {
public:
    explicit BooleanCompiler(Alphabet al) : al_(std::move(al)) {}

    Nwa compile(const FPtr& f) { return node(f.get()); }

    Nwa node(const Formula* f) {
        switch (f->kind) {
            case FormulaKind::Const:
                throw Error(ErrorKind::UnsupportedBooleanConstruct,
                            "constants are not part of the boolean layer");
            case FormulaKind::And: return product(node(f->left.get()), node(f->right.get()));
            case FormulaKind::Or:
                return complement_deterministic(product(
                    complement_deterministic(node(f->left.get())),
                    complement_deterministic(node(f->right.get()))));
            case FormulaKind::Not: return complement_deterministic(node(f->left.get()));
            case FormulaKind::Forall2:
            case FormulaKind::Exists2:
                throw Error(ErrorKind::UnsupportedBooleanConstruct,
                            "second-order quantification has no deterministic template");
            case FormulaKind::Forall1: return forall_node(f->var, f->left.get());
            case FormulaKind::Exists1: {
                // exists v . psi == not forall v . not psi
                FPtr negated = f_not(FPtr(std::shared_ptr<const Formula>(), f->left.get()));
                return complement_deterministic(forall_node(f->var, negated.get()));
            }
            default: return atom(detail::Literal{true, f});
        }
    }

private:
    std::size_t bit(const std::string& v) const {
        auto it = std::find(al_.variables.begin(), al_.variables.end(), v);
        if (it == al_.variables.end())
            throw Error(ErrorKind::UnsupportedBooleanConstruct,
                        "variable " + v + " is not carried by the alphabet");
        return std::size_t(it - al_.variables.begin());
    }

    Nwa atom(const detail::Literal& lit) {
        const Formula* f = lit.f;
        Nwa a = positive_atom(f);
        return lit.pos ? a : complement_deterministic(a);
    }

    Nwa positive_atom(const Formula* f) {
        using detail::Instant;
        using detail::InstKind;
        switch (f->kind) {
            case FormulaKind::Label:
                return detail::local_check_automaton(al_, bit(f->var),
                                                     Instant{true, InstKind::Sym, f->symbol, 0});
            case FormulaKind::CallAtom:
                return detail::local_check_automaton(al_, bit(f->var),
                                                     Instant{true, InstKind::IsCall, "", 0});
            case FormulaKind::RetAtom:
                return detail::local_check_automaton(al_, bit(f->var),
                                                     Instant{true, InstKind::IsRet, "", 0});
            case FormulaKind::PRet:
                return detail::local_check_automaton(al_, bit(f->var),
                                                     Instant{true, InstKind::IsPret, "", 0});
            case FormulaKind::InSet:
                return detail::local_check_automaton(
                    al_, bit(f->var), Instant{true, InstKind::Bit, "", bit(f->var2)});
            case FormulaKind::Leq: return detail::leq_automaton(al_, bit(f->var), bit(f->var2));
            case FormulaKind::Succ:
                return detail::succ_automaton(al_, bit(f->var), bit(f->var2));
            case FormulaKind::Nu: return detail::nu_automaton(al_, bit(f->var), bit(f->var2));
            case FormulaKind::PCall: return detail::pcall_automaton(al_, bit(f->var));
            case FormulaKind::StepAtom: return detail::step_automaton(al_, bit(f->var));
            case FormulaKind::Forall1: return forall_node(f->var, f->left.get());
            case FormulaKind::Exists1: {
                FPtr negated = f_not(FPtr(std::shared_ptr<const Formula>(), f->left.get()));
                return complement_deterministic(forall_node(f->var, negated.get()));
            }
            default:
                throw Error(ErrorKind::UnsupportedBooleanConstruct,
                            "no deterministic template for this construct");
        }
    }

    // forall v . body
    Nwa forall_node(const std::string& v, const Formula* body) {
        if (!detail::mentions(body, v)) return node(body); // vacuous quantifier
        if (body->kind == FormulaKind::Exists1) return recurrence(v, body->var, body->left.get());
        if (body->kind == FormulaKind::Forall1) return forall_two(v, body->var, body->left.get());
        auto cnf = detail::to_cnf(body, true);
        std::optional<Nwa> acc;
        for (const auto& clause : cnf) {
            Nwa c = forall_clause(v, clause);
            acc = acc ? product(*acc, c) : std::move(c);
        }
        return std::move(*acc);
    }

    // forall v1 . forall v2 . body
    Nwa forall_two(const std::string& v1, const std::string& v2, const Formula* body) {
        if (!detail::mentions(body, v2)) return forall_node(v1, body);
        auto cnf = detail::to_cnf(body, true);
        std::optional<Nwa> acc;
        for (const auto& clause : cnf) {
            bool m1 = false, m2 = false;
            for (const auto& lit : clause) {
                m1 |= detail::mentions(lit.f, v1);
                m2 |= detail::mentions(lit.f, v2);
            }
            Nwa c = m1 && m2 ? pair_clause(v1, v2, clause)
                    : m1     ? forall_clause(v1, clause)
                    : m2     ? forall_clause(v2, clause)
                             : clause_formula(clause);
            acc = acc ? product(*acc, c) : std::move(c);
        }
        return std::move(*acc);
    }

    // clause without the quantified variable: plain disjunction of literals
    Nwa clause_formula(const detail::Clause& clause) {
        std::optional<Nwa> acc; // conjunction of complements, then complement
        for (const auto& lit : clause) {
            Nwa a = complement_deterministic(atom(lit));
            acc = acc ? product(*acc, a) : std::move(a);
        }
        return complement_deterministic(std::move(*acc));
    }

    Nwa forall_clause(const std::string& v, const detail::Clause& clause) {
        detail::Clause own, rest;
        for (const auto& lit : clause)
            (detail::mentions(lit.f, v) ? own : rest).push_back(lit);
        Nwa core = forall_core(v, own);
        if (rest.empty()) return core;
        // forall v . (D or R(v)) == D or forall v . R(v)
        Nwa d = clause_formula(rest);
        return complement_deterministic(
            product(complement_deterministic(std::move(d)),
                    complement_deterministic(std::move(core))));
    }

    Nwa forall_core(const std::string& v, const detail::Clause& lits) {
        using detail::InstKind;
        // single-literal structural templates
        if (lits.size() == 1) {
            const auto& lit = lits[0];
            if (lit.f->kind == FormulaKind::Leq && lit.pos) {
                if (lit.f->var2 == v && lit.f->var != v)
                    return detail::min_automaton(al_, bit(lit.f->var)); // forall v . x <= v
                if (lit.f->var == v && lit.f->var2 != v)
                    return empty_nwa(al_); // forall v . v <= y fails on infinite words
            }
            if (lit.f->kind == FormulaKind::Nu && !lit.pos) {
                if (lit.f->var != v && lit.f->var2 == v)
                    return detail::never_call_of_pair_automaton(al_, bit(lit.f->var));
                if (lit.f->var == v && lit.f->var2 != v)
                    // forall u . !nu(u, z): z is not a matched return
                    return detail::local_check_automaton(
                        al_, bit(lit.f->var2),
                        detail::Instant{false, InstKind::IsMatchedRet, "", 0});
            }
        }
        // y <= v with !pcall(v) / v <= y with !pret(v)
        if (lits.size() == 2) {
            const detail::Literal *leq = nullptr, *other = nullptr;
            for (const auto& l : lits)
                if (l.f->kind == FormulaKind::Leq && l.pos) leq = &l;
                else other = &l;
            if (leq && other && !other->pos) {
                if (other->f->kind == FormulaKind::PCall && other->f->var == v &&
                    leq->f->var2 == v && leq->f->var != v)
                    return detail::no_earlier_pending_call_automaton(al_, bit(leq->f->var));
                if (other->f->kind == FormulaKind::PRet && other->f->var == v &&
                    leq->f->var == v && leq->f->var2 != v)
                    return detail::no_later_pending_return_automaton(al_, bit(leq->f->var2));
            }
        }
        // pointwise clause (instants plus pcall literals)
        std::vector<detail::Instant> ors;
        bool pos_pcall = false, neg_pcall = false, ok = true;
        for (const auto& lit : lits) {
            if (lit.f->kind == FormulaKind::PCall && lit.f->var == v) {
                (lit.pos ? pos_pcall : neg_pcall) = true;
                continue;
            }
            if (auto in = detail::as_instant(lit, v, al_)) ors.push_back(*in);
            else ok = false;
        }
        if (ok) return detail::forall_pointwise_automaton(al_, std::move(ors), pos_pcall,
                                                          neg_pcall);
        throw Error(ErrorKind::UnsupportedBooleanConstruct,
                    "universally quantified clause matches no template");
    }

    // clause mentioning both quantified variables
    Nwa pair_clause(const std::string& v1, const std::string& v2, const detail::Clause& clause) {
        const detail::Literal* nu = nullptr;
        const detail::Literal* succ = nullptr;
        detail::Clause rest;
        for (const auto& lit : clause) {
            if (lit.f->kind == FormulaKind::Nu && !lit.pos && lit.f->var == v1 &&
                lit.f->var2 == v2 && !nu)
                nu = &lit;
            else if (lit.f->kind == FormulaKind::Succ && !lit.pos && lit.f->var == v1 &&
                     lit.f->var2 == v2 && !succ)
                succ = &lit;
            else rest.push_back(lit);
        }
        if (nu) {
            // spanning-pair exclusion: y <= v1 or v2 <= y or !nu(v1, v2)
            if (rest.size() == 2) {
                const Formula *a = rest[0].f, *b = rest[1].f;
                if (rest[0].pos && rest[1].pos && a->kind == FormulaKind::Leq &&
                    b->kind == FormulaKind::Leq) {
                    const Formula *lo = nullptr, *hi = nullptr;
                    for (const Formula* f : {a, b}) {
                        if (f->var2 == v1 && f->var != v1 && f->var != v2) lo = f;
                        if (f->var == v2 && f->var2 != v1 && f->var2 != v2) hi = f;
                    }
                    if (lo && hi && lo->var == hi->var2)
                        return detail::no_spanning_pair_automaton(al_, bit(lo->var));
                }
            }
            detail::PairSides sides;
            if (split_sides(rest, v1, v2, sides))
                return detail::matched_pair_condition_automaton(al_, std::move(sides));
        }
        if (succ) {
            detail::PairSides sides;
            if (split_sides(rest, v1, v2, sides))
                return detail::successor_condition_automaton(al_, std::move(sides));
        }
        throw Error(ErrorKind::UnsupportedBooleanConstruct,
                    "two-variable clause matches no template");
    }

    bool split_sides(const detail::Clause& rest, const std::string& v1, const std::string& v2,
                     detail::PairSides& sides) {
        for (const auto& lit : rest) {
            if (auto in = detail::as_instant(lit, v1, al_)) sides.call_side.push_back(*in);
            else if (auto in2 = detail::as_instant(lit, v2, al_)) sides.ret_side.push_back(*in2);
            else return false;
        }
        return true;
    }

    // forall v . exists z . (v <= z and step(z) and pointwise(z))
    Nwa recurrence(const std::string& v, const std::string& z, const Formula* inner) {
        std::vector<const Formula*> conj;
        std::function<void(const Formula*)> flat = [&](const Formula* f) {
            if (f->kind == FormulaKind::And) {
                flat(f->left.get());
                flat(f->right.get());
            } else conj.push_back(f);
        };
        flat(inner);
        bool leq = false, step = false;
        std::vector<detail::Instant> ands;
        for (const Formula* f : conj) {
            if (f->kind == FormulaKind::Leq && f->var == v && f->var2 == z) {
                leq = true;
                continue;
            }
            if (f->kind == FormulaKind::StepAtom && f->var == z) {
                step = true;
                continue;
            }
            bool neg = f->kind == FormulaKind::Not;
            const Formula* g = neg ? f->left.get() : f;
            if (auto in = detail::as_instant(detail::Literal{!neg, g}, z, al_)) {
                ands.push_back(*in);
                continue;
            }
            throw Error(ErrorKind::UnsupportedBooleanConstruct,
                        "recurrence body matches no template");
        }
        if (!leq || !step)
            throw Error(ErrorKind::UnsupportedBooleanConstruct,
                        "recurrence template needs the ordering and step guards");
        return detail::recurrent_step_automaton(al_, std::move(ands));
    }

    Alphabet al_;
};

// Compile over a caller-fixed extended alphabet (no validity intersection).
inline Nwa compile_boolean_raw(const FPtr& f, Alphabet extended) {
    if (!is_boolean(f))
        throw Error(ErrorKind::UnsupportedBooleanConstruct,
                    "formula contains constants; only the boolean layer compiles");
    BooleanCompiler c(std::move(extended));
    return c.compile(f);
}

// Compile and intersect with the valid-encoding automaton for every free
// first-order variable (each must be marked exactly once).
inline Nwa compile_boolean(const FPtr& f, Alphabet extended) {
    Nwa a = compile_boolean_raw(f, extended);
    for (const auto& v : free_variables(f)) {
        if (!is_first_order_var(v)) continue;
        auto it = std::find(extended.variables.begin(), extended.variables.end(), v);
        std::size_t b = std::size_t(it - extended.variables.begin());
        a = product(a, detail::exactly_once_automaton(extended, b));
    }
    return a;
}

// Convenience: the extended alphabet carries exactly the free variables.
inline Nwa compile_boolean(const FPtr& f, std::vector<std::string> symbols) {
    Alphabet al;
    al.symbols = std::move(symbols);
    for (const auto& v : free_variables(f)) al.variables.push_back(v);
    return compile_boolean(f, al);
}

} // namespace wnwa

#endif // WNWA_BOOLEAN_COMPILE_HH_
