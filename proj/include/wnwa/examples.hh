/* examples.hh -- bundled example automata and formulas in text form */

#ifndef WNWA_EXAMPLES_HH
#define WNWA_EXAMPLES_HH

#include <vector>

namespace wnwa::examples {

// Ratio of bracket-free positions on words without pending edges: weight 1
// outside every matched pair (and on the pair's own call and return), weight 0
// strictly inside; the {q0} requirement rejects a tail of unmatched calls.
inline const char* ratio_text() {
    return R"(states: q0 q1
initial: q0
accept: {q0}

int  q0 a -> q0 : 1
int  q0 b -> q0 : 1
int  q0 c -> q0 : 1
call q0 a -> q1 : 1
call q0 b -> q1 : 1
call q0 c -> q1 : 1
ret  q1 q0 a -> q0 : 1
ret  q1 q0 b -> q0 : 1
ret  q1 q0 c -> q0 : 1
int  q1 a -> q1 : 0
int  q1 b -> q1 : 0
int  q1 c -> q1 : 0
call q1 a -> q1 : 0
call q1 b -> q1 : 0
call q1 c -> q1 : 0
ret  q1 q1 a -> q1 : 0
ret  q1 q1 b -> q1 : 0
ret  q1 q1 c -> q1 : 0
)";
}

// Pending-aware variant: phase qp walks the pending returns at weight 0 (q2
// absorbs well-matched blocks in between), jumps to q0 on the last one with
// weight 1 (that position is never spanned), and q0 has no return moves, so
// only the correctly timed jump survives.
inline const char* pending_ratio_text() {
    return R"(states: qp q0 q1 q2
initial: qp q0
accept: {q2} {qp} {qp,q2} {q0,q1} {q0} {q1}

int  q0 a -> q0 : 1
int  q0 b -> q0 : 1
int  q0 c -> q0 : 1
call q0 a -> q1 : 1
call q0 b -> q1 : 1
call q0 c -> q1 : 1
ret  q1 q0 a -> q0 : 1
ret  q1 q0 b -> q0 : 1
ret  q1 q0 c -> q0 : 1
int  q1 a -> q1 : 0
int  q1 b -> q1 : 0
int  q1 c -> q1 : 0
call q1 a -> q1 : 0
call q1 b -> q1 : 0
call q1 c -> q1 : 0
ret  q1 q1 a -> q1 : 0
ret  q1 q1 b -> q1 : 0
ret  q1 q1 c -> q1 : 0

int  qp a -> qp : 0
int  qp b -> qp : 0
int  qp c -> qp : 0
ret  qp qp a -> qp : 0
ret  qp qp b -> qp : 0
ret  qp qp c -> qp : 0
ret  qp qp a -> q0 : 1
ret  qp qp b -> q0 : 1
ret  qp qp c -> q0 : 1
call qp a -> q2 : 0
call qp b -> q2 : 0
call qp c -> q2 : 0
int  q2 a -> q2 : 0
int  q2 b -> q2 : 0
int  q2 c -> q2 : 0
call q2 a -> q2 : 0
call q2 b -> q2 : 0
call q2 c -> q2 : 0
ret  q2 q2 a -> q2 : 0
ret  q2 q2 b -> q2 : 0
ret  q2 q2 c -> q2 : 0
ret  q2 qp a -> qp : 0
ret  q2 qp b -> qp : 0
ret  q2 qp c -> qp : 0
)";
}

// Long-run ratio of bracket-free positions as a sentence: payoff 1 at
// positions not strictly spanned by any matched pair (pending edges
// included), payoff 0 elsewhere.  Equal to the pending-aware automaton's
// behavior under the limit-average monoid.
inline const char* bracket_free_sentence() { return "forall y. ((bfr(y) and 1.0) or 0.0)\n"; }

struct ExampleEntry {
    const char* name;
    const char* kind;   // "automaton" | "formula"
    const char* monoid; // suggested monoid
    const char* filename;
    const char* description;
    const char* text;
};

inline const std::vector<ExampleEntry>& all() {
    static const std::vector<ExampleEntry> entries = {
        {"a1", "automaton", "limavg", "a1.nwa",
         "bracket-free position ratio (no pending edges)", ratio_text()},
        {"a2", "automaton", "limavg", "a2.nwa",
         "bracket-free position ratio with pending-edge support", pending_ratio_text()},
        {"bfr", "formula", "limavg", "bfr.mso", "bracket-free position ratio as a sentence",
         bracket_free_sentence()},
    };
    return entries;
}

} // namespace wnwa::examples

#endif
