/* semantics.hh -- variable assignments, encoded words over extended
   alphabets, and the definitional semantics of weighted MSO formulas */

#ifndef WNWA_SEMANTICS_HH
#define WNWA_SEMANTICS_HH

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wnwa/error.hh"
#include "wnwa/formula.hh"
#include "wnwa/nested_word.hh"
#include "wnwa/valuation_monoid.hh"

namespace wnwa {

// ---------------------------------------------------------------------------
// Assignments
// ---------------------------------------------------------------------------

// Ultimately periodic position set aligned to a word's loop: an explicit
// subset of the prefix plus a subset of the offsets of one period, where the
// period is `period_multiple` loop copies.  The denoted set is
// prefix_positions together with every i > prefix whose period slot is in
// loop_offsets.
struct PeriodicSet {
    std::vector<std::size_t> prefix_positions; // absolute, within the prefix
    std::vector<std::size_t> loop_offsets;     // 1..period_multiple*loop_length
    std::size_t period_multiple = 1;

    bool contains(std::size_t i, std::size_t prefix_len, std::size_t loop_len) const {
        if (i <= prefix_len)
            return std::find(prefix_positions.begin(), prefix_positions.end(), i) !=
                   prefix_positions.end();
        std::size_t period = period_multiple * loop_len;
        std::size_t slot = (i - prefix_len - 1) % period + 1;
        return std::find(loop_offsets.begin(), loop_offsets.end(), slot) != loop_offsets.end();
    }
};

struct Assignment {
    std::map<std::string, std::size_t> first_order; // variable -> position (1-based)
    std::map<std::string, PeriodicSet> second_order;
};

// ---------------------------------------------------------------------------
// Encoding assignments as words over the extended alphabet
// ---------------------------------------------------------------------------

struct AssignmentEncoding {
    LassoNestedWord base_word;
    std::vector<std::string> variables; // ordered V; bit i of encoded letters
    Assignment assignment;
    LassoNestedWord encoded; // word over the extended alphabet
};

namespace detail {

inline void check_variable_list(const std::vector<std::string>& vars) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (!is_first_order_var(vars[i]) && !is_second_order_var(vars[i]))
            throw Error(ErrorKind::InvalidAssignment, "bad variable name '" + vars[i] + "'");
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j])
                throw Error(ErrorKind::InvalidAssignment,
                            "duplicate variable '" + vars[i] + "' in variable list");
    }
    if (vars.size() > 64)
        throw Error(ErrorKind::InvalidAssignment, "more than 64 variables");
}

} // namespace detail

// Encode (word, assignment) as a lasso word over Sigma_V.  First-order
// positions are forced into the prefix by unrolling whole loop copies;
// second-order sets keep their periodic part on the loop.  The letters' tags,
// and hence the matching, are unchanged.
inline AssignmentEncoding encode_assignment(const LassoNestedWord& w,
                                            const std::vector<std::string>& vars,
                                            const Assignment& asg) {
    detail::check_variable_list(vars);
    std::size_t P = w.prefix_length(), L = w.loop_length();
    if (!w.variables().empty())
        throw Error(ErrorKind::InvalidAssignment, "base word already carries variables");

    std::size_t period = L; // lcm over the sets' periods, as loop copies
    for (const auto& v : vars) {
        if (is_first_order_var(v)) {
            auto it = asg.first_order.find(v);
            if (it == asg.first_order.end())
                throw Error(ErrorKind::InvalidAssignment,
                            "first-order variable '" + v + "' has no position");
            if (it->second == 0)
                throw Error(ErrorKind::InvalidAssignment, "positions are 1-based");
        } else if (auto it = asg.second_order.find(v); it != asg.second_order.end()) {
            const PeriodicSet& s = it->second;
            if (s.period_multiple == 0)
                throw Error(ErrorKind::InvalidAssignment, "period multiple must be positive");
            for (std::size_t i : s.prefix_positions)
                if (i == 0 || i > P)
                    throw Error(ErrorKind::InvalidAssignment,
                                "prefix position " + std::to_string(i) + " of '" + v +
                                    "' outside the prefix");
            for (std::size_t t : s.loop_offsets)
                if (t == 0 || t > s.period_multiple * L)
                    throw Error(ErrorKind::InvalidAssignment,
                                "loop offset " + std::to_string(t) + " of '" + v +
                                    "' outside the period");
            period = std::lcm(period, s.period_multiple * L);
        }
    }

    std::size_t new_prefix = P;
    for (const auto& v : vars)
        if (is_first_order_var(v)) {
            std::size_t pos = asg.first_order.at(v);
            while (pos > new_prefix) new_prefix += L;
        }

    auto bits_at = [&](std::size_t i) {
        std::uint64_t bits = 0;
        for (std::size_t b = 0; b < vars.size(); ++b) {
            const std::string& v = vars[b];
            bool mark = false;
            if (is_first_order_var(v)) {
                mark = asg.first_order.at(v) == i;
            } else if (auto it = asg.second_order.find(v); it != asg.second_order.end()) {
                mark = it->second.contains(i, P, L);
            }
            if (mark) bits |= std::uint64_t(1) << b;
        }
        return bits;
    };

    std::vector<TaggedLetter> prefix, loop;
    for (std::size_t i = 1; i <= new_prefix; ++i) {
        TaggedLetter l = w.letter(i);
        l.bits = bits_at(i);
        prefix.push_back(l);
    }
    for (std::size_t t = 1; t <= period; ++t) {
        TaggedLetter l = w.letter(new_prefix + t);
        l.bits = bits_at(new_prefix + t);
        loop.push_back(l);
    }

    AssignmentEncoding out;
    out.base_word = w;
    out.variables = vars;
    out.assignment = asg;
    out.encoded = LassoNestedWord(std::move(prefix), std::move(loop), vars);
    return out;
}

// Recover the assignment carried by an encoded word.  Returns nothing when
// some first-order bit row does not mark exactly one position (the word is
// not a valid encoding).
inline std::optional<Assignment> decode_assignment(const LassoNestedWord& w) {
    Assignment out;
    std::size_t P = w.prefix_length(), L = w.loop_length();
    const auto& vars = w.variables();
    for (std::size_t b = 0; b < vars.size(); ++b) {
        std::uint64_t mask = std::uint64_t(1) << b;
        if (is_first_order_var(vars[b])) {
            std::size_t count = 0, pos = 0;
            for (std::size_t i = 1; i <= P; ++i)
                if (w.letter(i).bits & mask) {
                    ++count;
                    pos = i;
                }
            for (std::size_t t = 0; t < L; ++t)
                if (w.loop()[t].bits & mask) count += 2; // infinitely many marks
            if (count != 1) return std::nullopt;
            out.first_order[vars[b]] = pos;
        } else {
            PeriodicSet s;
            for (std::size_t i = 1; i <= P; ++i)
                if (w.letter(i).bits & mask) s.prefix_positions.push_back(i);
            for (std::size_t t = 1; t <= L; ++t)
                if (w.loop()[t - 1].bits & mask) s.loop_offsets.push_back(t);
            out.second_order[vars[b]] = std::move(s);
        }
    }
    return out;
}

// Drop one variable's bit row; the remaining rows keep their relative order.
inline LassoNestedWord project_assignment(const LassoNestedWord& w, const std::string& var) {
    const auto& vars = w.variables();
    auto it = std::find(vars.begin(), vars.end(), var);
    if (it == vars.end())
        throw Error(ErrorKind::InvalidAssignment, "word does not carry variable '" + var + "'");
    std::size_t b = static_cast<std::size_t>(it - vars.begin());
    std::vector<std::string> rest(vars.begin(), it);
    rest.insert(rest.end(), it + 1, vars.end());
    std::uint64_t low_mask = (std::uint64_t(1) << b) - 1;
    auto strip = [&](TaggedLetter l) {
        l.bits = (l.bits & low_mask) | ((l.bits >> 1) & ~low_mask);
        return l;
    };
    std::vector<TaggedLetter> prefix, loop;
    for (const auto& l : w.prefix()) prefix.push_back(strip(l));
    for (const auto& l : w.loop()) loop.push_back(strip(l));
    return LassoNestedWord(std::move(prefix), std::move(loop), rest);
}

// Relabel symbols through a total map; tags, bits and matching are unchanged.
inline LassoNestedWord project_alphabet(const LassoNestedWord& w,
                                        const std::map<std::string, std::string>& h) {
    auto relabel = [&](TaggedLetter l) {
        auto it = h.find(l.symbol);
        if (it == h.end())
            throw Error(ErrorKind::AlphabetMismatch,
                        "relabeling map does not cover symbol '" + l.symbol + "'");
        l.symbol = it->second;
        return l;
    };
    std::vector<TaggedLetter> prefix, loop;
    for (const auto& l : w.prefix()) prefix.push_back(relabel(l));
    for (const auto& l : w.loop()) loop.push_back(relabel(l));
    return LassoNestedWord(std::move(prefix), std::move(loop), w.variables());
}

// ---------------------------------------------------------------------------
// Definitional evaluation
// ---------------------------------------------------------------------------

struct DefinitionalParams {
    std::size_t max_positions = 4096; // quantifier scan cap
    std::size_t verify_windows = 3;   // loop windows that must repeat verbatim
    Value tolerance = 1e-9;           // window-equality slack for derived values
};

namespace detail {

// Literal recursion over the semantics: atoms test positions, negation flips
// the boolean layer, disjunction folds with plus, conjunction with times,
// first-order quantifiers scan the position sequence until it is visibly
// periodic and apply the infinitary valuation (universal) or the sup fold
// (existential; sums over countable index sets coincide with sup for the
// supported monoids).  Second-order quantification ranges over an uncountable
// family and has no direct evaluation; it is served by the automaton layer.
class DefinitionalEval {
public:
    DefinitionalEval(const ValuationMonoid& m, const LassoNestedWord& w, DefinitionalParams p)
        : m_(m), w_(w), p_(p) {}

    Value eval(const FPtr& f, const Assignment& asg) {
        switch (f->kind) {
            case FormulaKind::Const:
                return f->value;
            case FormulaKind::Label:
                return truth(w_.letter(pos(f->var, asg)).symbol == f->symbol);
            case FormulaKind::CallAtom:
                return truth(w_.letter(pos(f->var, asg)).tag == Tag::Call);
            case FormulaKind::RetAtom:
                return truth(w_.letter(pos(f->var, asg)).tag == Tag::Return);
            case FormulaKind::PCall:
                return truth(w_.classify_position(pos(f->var, asg)).kind ==
                             PositionKind::PendingCall);
            case FormulaKind::PRet:
                return truth(w_.classify_position(pos(f->var, asg)).kind ==
                             PositionKind::PendingReturn);
            case FormulaKind::StepAtom:
                return truth(w_.is_step(pos(f->var, asg)));
            case FormulaKind::Leq:
                return truth(pos(f->var, asg) <= pos(f->var2, asg));
            case FormulaKind::Succ:
                return truth(pos(f->var2, asg) == pos(f->var, asg) + 1);
            case FormulaKind::Nu: {
                PositionClass c = w_.classify_position(pos(f->var, asg));
                return truth(c.kind == PositionKind::MatchedCall &&
                             c.partner == pos(f->var2, asg));
            }
            case FormulaKind::InSet: {
                auto it = asg.second_order.find(f->var2);
                if (it == asg.second_order.end())
                    throw Error(ErrorKind::InvalidAssignment,
                                "set variable '" + f->var2 + "' is not assigned");
                return truth(it->second.contains(pos(f->var, asg), w_.prefix_length(),
                                                 w_.loop_length()));
            }
            case FormulaKind::Not:
                return m_.is_zero(eval(f->left, asg)) ? m_.one() : m_.zero();
            case FormulaKind::And:
                return m_.times(eval(f->left, asg), eval(f->right, asg));
            case FormulaKind::Or:
                return m_.plus(eval(f->left, asg), eval(f->right, asg));
            case FormulaKind::Forall1:
                return quantifier(f, asg, /*universal=*/true);
            case FormulaKind::Exists1:
                return quantifier(f, asg, /*universal=*/false);
            case FormulaKind::Forall2:
            case FormulaKind::Exists2:
                throw Error(ErrorKind::UnsupportedBooleanConstruct,
                            "second-order quantifiers range over all subsets of the positions "
                            "and cannot be evaluated definitionally; use the compiled series");
        }
        throw Error(ErrorKind::ParseError, "corrupt formula node");
    }

private:
    Value truth(bool b) const { return b ? m_.one() : m_.zero(); }

    std::size_t pos(const std::string& v, const Assignment& asg) const {
        auto it = asg.first_order.find(v);
        if (it == asg.first_order.end())
            throw Error(ErrorKind::InvalidAssignment, "variable '" + v + "' is not assigned");
        return it->second;
    }

    bool close(Value a, Value b) const {
        if (a == b) return true;
        return std::isfinite(a) && std::isfinite(b) && std::fabs(a - b) <= p_.tolerance;
    }

    Value quantifier(const FPtr& f, const Assignment& outer, bool universal) {
        std::size_t L = w_.loop_length();
        // The value sequence is only guaranteed periodic past every assigned
        // first-order position, with a period joining the loop length and the
        // assigned sets' periods; starting the scan earlier or with a shorter
        // window can lock onto a spurious cycle.
        std::size_t period = L;
        for (const auto& [v, s] : outer.second_order)
            period = std::lcm(period, s.period_multiple * L);
        std::size_t start = w_.prefix_length();
        for (const auto& [v, i] : outer.first_order)
            while (start < i) start += L;
        Assignment asg = outer;
        std::vector<Value> vals;
        auto ensure = [&](std::size_t n) {
            while (vals.size() < n) {
                asg.first_order[f->var] = vals.size() + 1;
                vals.push_back(eval(f->left, asg));
            }
        };
        for (std::size_t s = start;; s += period) {
            std::size_t need = s + (p_.verify_windows + 1) * period;
            if (need > p_.max_positions)
                throw Error(ErrorKind::NonPeriodicDetectionOverflow,
                            "quantifier value sequence did not become periodic within " +
                                std::to_string(p_.max_positions) + " positions");
            ensure(need);
            bool periodic = true;
            for (std::size_t i = s + 1; i <= s + p_.verify_windows * period && periodic; ++i)
                periodic = close(vals[i - 1], vals[i + period - 1]);
            if (!periodic) continue;
            if (universal) {
                std::vector<Value> head(vals.begin(), vals.begin() + s);
                std::vector<Value> cycle(vals.begin() + s, vals.begin() + s + period);
                return m_.val_up(head, cycle);
            }
            Value out = m_.zero();
            for (std::size_t i = 0; i < s + period; ++i) out = m_.plus(out, vals[i]);
            return out;
        }
    }

    const ValuationMonoid& m_;
    const LassoNestedWord& w_;
    DefinitionalParams p_;
};

} // namespace detail

// Evaluate a formula against an explicit assignment covering its free
// variables.  Extra assigned variables are permitted and do not change the
// value (the consistency property of the semantics).
inline Value definitional_value(const FPtr& f, const ValuationMonoid& m, const LassoNestedWord& w,
                                const Assignment& asg = {}, DefinitionalParams p = {}) {
    for (const auto& v : free_variables(f)) {
        if (is_first_order_var(v) && !asg.first_order.count(v))
            throw Error(ErrorKind::InvalidAssignment, "free variable '" + v + "' is not assigned");
        if (is_second_order_var(v) && !asg.second_order.count(v))
            throw Error(ErrorKind::InvalidAssignment, "free variable '" + v + "' is not assigned");
    }
    return detail::DefinitionalEval(m, w, p).eval(f, asg);
}

// Evaluate a formula on a word over an extended alphabet.  Invalid encodings
// (a first-order bit row without exactly one mark) evaluate to the monoid's
// zero for every formula.
inline Value definitional_value_encoded(const FPtr& f, const ValuationMonoid& m,
                                        const LassoNestedWord& w, DefinitionalParams p = {}) {
    const auto& vars = w.variables();
    for (const auto& v : free_variables(f))
        if (std::find(vars.begin(), vars.end(), v) == vars.end())
            throw Error(ErrorKind::InvalidAssignment,
                        "word does not carry free variable '" + v + "'");
    auto asg = decode_assignment(w);
    if (!asg) return m.zero();
    return definitional_value(f, m, w, *asg, p);
}

} // namespace wnwa

#endif
