/* step_function.hh -- regular step functions: finitely many values on a
   partition of the nested-word space into automaton-defined cells, their
   algebra, the step-function automaton, and the almost-boolean fragment */

#ifndef WNWA_STEP_FUNCTION_HH
#define WNWA_STEP_FUNCTION_HH

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wnwa/boolean_compile.hh"
#include "wnwa/error.hh"
#include "wnwa/formula.hh"
#include "wnwa/nwa.hh"
#include "wnwa/valuation_monoid.hh"
#include "wnwa/weighted_nwa.hh"

namespace wnwa {

struct StepCell {
    Value weight;
    Nwa language; // deterministic cell automaton
};

// A series taking finitely many values: weight_i on the words of cell_i,
// where the cell languages partition the space of words over the alphabet.
struct RegularStepFunction {
    ValuationMonoid monoid;
    Alphabet alphabet;
    std::vector<StepCell> cells;

    explicit RegularStepFunction(ValuationMonoid m) : monoid(std::move(m)) {}
};

inline RegularStepFunction rsf_const(const ValuationMonoid& m, Alphabet al, Value d) {
    RegularStepFunction s(m);
    s.alphabet = al;
    s.cells.push_back({d, universal_nwa(std::move(al))});
    return s;
}

// Characteristic series of a deterministic language: 1 inside, 0 outside.
inline RegularStepFunction rsf_indicator(const ValuationMonoid& m, const Nwa& language) {
    if (!language.deterministic)
        throw Error(ErrorKind::NotDeterministic, "step-function cells must be deterministic");
    RegularStepFunction s(m);
    s.alphabet = language.alphabet;
    s.cells.push_back({m.one(), language});
    s.cells.push_back({m.zero(), complement_deterministic(language)});
    return s;
}

namespace detail {

template <typename Op>
RegularStepFunction rsf_combine(const RegularStepFunction& a, const RegularStepFunction& b,
                                Op op, std::size_t max_cells) {
    if (!(a.alphabet == b.alphabet))
        throw Error(ErrorKind::AlphabetMismatch, "step functions need a shared alphabet");
    if (a.monoid.name() != b.monoid.name())
        throw Error(ErrorKind::MonoidFlagMissing, "step functions need a shared monoid");
    if (a.cells.size() * b.cells.size() > max_cells)
        throw Error(ErrorKind::LimitExceeded,
                    "step-function refinement exceeds " + std::to_string(max_cells) + " cells");
    RegularStepFunction out(a.monoid);
    out.alphabet = a.alphabet;
    for (const auto& ca : a.cells)
        for (const auto& cb : b.cells)
            out.cells.push_back({op(ca.weight, cb.weight), product(ca.language, cb.language)});
    return out;
}

} // namespace detail

// Common refinement of the partitions with cellwise sum resp. product.
inline RegularStepFunction rsf_plus(const RegularStepFunction& a, const RegularStepFunction& b,
                                    std::size_t max_cells = 512) {
    const ValuationMonoid& m = a.monoid;
    return detail::rsf_combine(a, b, [&m](Value x, Value y) { return m.plus(x, y); }, max_cells);
}

inline RegularStepFunction rsf_diamond(const RegularStepFunction& a, const RegularStepFunction& b,
                                       std::size_t max_cells = 512) {
    const ValuationMonoid& m = a.monoid;
    return detail::rsf_combine(a, b, [&m](Value x, Value y) { return m.times(x, y); }, max_cells);
}

// The value on a word: the weight of the unique cell containing it.
inline Value evaluate_rsf(const RegularStepFunction& s, const LassoNestedWord& w) {
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        if (!membership(s.cells[i].language, w)) continue;
        if (hit)
            throw Error(ErrorKind::PartitionViolation,
                        "cells " + std::to_string(*hit) + " and " + std::to_string(i) +
                            " both contain the word");
        hit = i;
    }
    if (!hit) throw Error(ErrorKind::PartitionViolation, "no cell contains the word");
    return s.cells[*hit].weight;
}

// Exhaustively look for partition violations: a word in two cells, or a word
// in none.  The search budget bounds the nonemptiness checks.
inline void verify_partition(const RegularStepFunction& s, std::size_t budget = 60000) {
    std::vector<Nwa> cells;
    cells.reserve(s.cells.size());
    for (const auto& c : s.cells) cells.push_back(trim(c.language));
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            if (nonemptiness(trim(product(cells[i], cells[j])), budget))
                throw Error(ErrorKind::PartitionViolation,
                            "cells " + std::to_string(i) + " and " + std::to_string(j) +
                                " overlap");
    std::optional<Nwa> gap;
    for (const auto& c : s.cells) {
        Nwa co = complement_deterministic(c.language);
        gap = trim(gap ? product(*gap, co) : std::move(co));
    }
    if (gap && nonemptiness(*gap, budget))
        throw Error(ErrorKind::PartitionViolation, "cells do not cover every word");
}

namespace detail {

// Product of a cell language with a weighted automaton, the cell's value
// folded in per the monoid's scaling law: a value-distributive monoid admits
// scaling every transition, a merely left-multiplicative one only the first
// (tracked by a phase bit).
inline WeightedNwa scaled_cell_product(const Nwa& cell, const WeightedNwa& a, Value d) {
    const ValuationMonoid m = a.monoid;
    bool first = !m.left_val_distributive();
    WeightedNwa p(m);
    p.alphabet = cell.alphabet;
    std::size_t na = a.state_count;
    std::size_t plane = cell.state_count * na;
    p.state_count = first ? 2 * plane : plane;
    for (StateId qc : cell.initial)
        for (StateId qa : a.initial) p.initial.push_back(static_cast<StateId>(qc * na + qa));
    auto pair1 = [=](std::function<StateSet(StateId, const TaggedLetter&)> fc,
                     std::function<std::vector<WeightedTarget>(StateId, const TaggedLetter&)> fa) {
        return [=](StateId q, const TaggedLetter& l) {
            bool scaled = first && q >= plane; // the cell value was already paid
            StateId rest = static_cast<StateId>(q % plane);
            std::vector<WeightedTarget> out;
            for (StateId tc : fc(static_cast<StateId>(rest / na), l))
                for (const auto& ta : fa(static_cast<StateId>(rest % na), l)) {
                    Value v = scaled ? ta.weight : m.times(d, ta.weight);
                    StateId to = static_cast<StateId>((first ? plane : 0) + tc * na + ta.to);
                    out.push_back({to, v});
                }
            return out;
        };
    };
    p.weight_call = pair1(cell.delta_call, a.weight_call);
    p.weight_int = pair1(cell.delta_int, a.weight_int);
    auto frc = cell.delta_ret;
    auto fra = a.weight_ret;
    ValuationMonoid mm = m;
    p.weight_ret = [=](StateId q, StateId h, const TaggedLetter& l) {
        bool scaled = first && q >= plane;
        StateId rest = static_cast<StateId>(q % plane);
        StateId hrest = static_cast<StateId>(h % plane);
        std::vector<WeightedTarget> out;
        for (StateId tc :
             frc(static_cast<StateId>(rest / na), static_cast<StateId>(hrest / na), l))
            for (const auto& ta :
                 fra(static_cast<StateId>(rest % na), static_cast<StateId>(hrest % na), l)) {
                Value v = scaled ? ta.weight : mm.times(d, ta.weight);
                StateId to = static_cast<StateId>((first ? plane : 0) + tc * na + ta.to);
                out.push_back({to, v});
            }
        return out;
    };
    auto mc = cell.accept.member;
    auto ma = a.accept.member;
    p.accept.member = [mc, ma, na, plane](const StateSet& s) {
        StateSet sc, sa;
        for (StateId q : s) {
            StateId rest = static_cast<StateId>(q % plane);
            set_insert(sc, static_cast<StateId>(rest / na));
            set_insert(sa, static_cast<StateId>(rest % na));
        }
        return mc(sc) && ma(sa);
    };
    p.deterministic = cell.deterministic && a.deterministic;
    p.weight_bound = std::fabs(d) + a.weight_bound;
    if (m.is_zero(d)) p.weight_bound = 0; // every transition weight is the zero
    return p;
}

} // namespace detail

// Pointwise product of a step function with an automaton behavior:
// behavior(w) = s(w) <> ||a||(w).  Needs a left-distributive monoid so the
// cell value factors out of the run sum and into the valuation.
inline WeightedNwa diamond_with_step_function(const RegularStepFunction& s, const WeightedNwa& a) {
    if (!(s.alphabet == a.alphabet))
        throw Error(ErrorKind::AlphabetMismatch, "step-function product needs a shared alphabet");
    if (s.monoid.name() != a.monoid.name())
        throw Error(ErrorKind::MonoidFlagMissing, "step-function product needs a shared monoid");
    const ValuationMonoid& m = a.monoid;
    if (!(m.left_plus_distributive() && (m.left_val_distributive() || m.left_multiplicative())))
        throw Error(ErrorKind::MonoidFlagMissing,
                    "step-function product needs a left-distributive monoid, which " + m.name() +
                        " is not");
    std::optional<WeightedNwa> acc;
    for (const auto& c : s.cells) {
        WeightedNwa p = detail::scaled_cell_product(c.language, a, c.weight);
        acc = acc ? plus_automata(*acc, p) : std::move(p);
    }
    if (!acc) return from_nwa(empty_nwa(s.alphabet), m);
    return std::move(*acc);
}

// Every regular step function is an automaton behavior: the union over cells
// of the cell language weighted with the cell's value.
inline WeightedNwa step_function_automaton(const RegularStepFunction& s) {
    return diamond_with_step_function(s, from_nwa(universal_nwa(s.alphabet), s.monoid));
}

namespace detail {

inline RegularStepFunction rsf_of_formula(const FPtr& f, const ValuationMonoid& m,
                                          const Alphabet& al, std::size_t max_cells) {
    if (f->kind == FormulaKind::Const) return rsf_const(m, al, f->value);
    if (is_boolean(f)) return rsf_indicator(m, compile_boolean_raw(f, al));
    if (f->kind == FormulaKind::Or)
        return rsf_plus(rsf_of_formula(f->left, m, al, max_cells),
                        rsf_of_formula(f->right, m, al, max_cells), max_cells);
    if (f->kind == FormulaKind::And)
        return rsf_diamond(rsf_of_formula(f->left, m, al, max_cells),
                           rsf_of_formula(f->right, m, al, max_cells), max_cells);
    throw Error(ErrorKind::FragmentViolation, "formula is not almost boolean");
}

} // namespace detail

// The step function denoted by an almost boolean formula over the extended
// alphabet whose bit rows are `variables`.  Words that are not valid
// encodings (a first-order row without exactly one mark) fall into a
// dedicated zero cell, so projections never pick up stray values.
inline RegularStepFunction to_regular_step_function(const FPtr& f, const ValuationMonoid& m,
                                                    Alphabet al, std::size_t max_cells = 512) {
    if (!is_almost_boolean(f))
        throw Error(ErrorKind::FragmentViolation, "formula is not almost boolean");
    RegularStepFunction raw = detail::rsf_of_formula(f, m, al, max_cells);
    std::optional<Nwa> valid;
    for (std::size_t b = 0; b < al.variables.size(); ++b) {
        if (!is_first_order_var(al.variables[b])) continue;
        Nwa once = detail::exactly_once_automaton(al, b);
        valid = valid ? product(*valid, once) : std::move(once);
    }
    if (!valid) return raw;
    RegularStepFunction out(m);
    out.alphabet = raw.alphabet;
    for (const auto& c : raw.cells)
        out.cells.push_back({c.weight, product(c.language, *valid)});
    out.cells.push_back({m.zero(), complement_deterministic(*valid)});
    return out;
}

inline RegularStepFunction to_regular_step_function(const FPtr& f, const ValuationMonoid& m,
                                                    std::vector<std::string> symbols,
                                                    std::vector<std::string> variables,
                                                    std::size_t max_cells = 512) {
    Alphabet al;
    al.symbols = std::move(symbols);
    al.variables = std::move(variables);
    return to_regular_step_function(f, m, std::move(al), max_cells);
}

} // namespace wnwa

#endif
