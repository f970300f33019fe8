/* fragments.hh -- rewriting wedge-restricted formulas into strongly restricted form */
#ifndef WNWA_FRAGMENTS_HH_
#define WNWA_FRAGMENTS_HH_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "error.hh"
#include "formula.hh"
#include "valuation_monoid.hh"

namespace wnwa {

// True when every conjunction joins only boolean formulas and constants (the
// normal form reachable over commutative cc-valuation semirings).
inline bool corollary_form(const FPtr& f) {
    if (!f) return true;
    if (f->kind == FormulaKind::And) {
        auto flat = [](const FPtr& g) { return g->kind == FormulaKind::Const || is_boolean(g); };
        if (!flat(f->left) || !flat(f->right)) return false;
    }
    return corollary_form(f->left) && corollary_form(f->right);
}

namespace detail {

// Fresh-variable supply primed with every identifier of the input formula, so
// generated binders can never capture or shadow existing ones.
class FreshVars {
  public:
    explicit FreshVars(const FPtr& f) { collect(f); }

    std::string fresh_like(const std::string& base) {
        for (;;) {
            std::string cand = base + std::to_string(++counter_);
            if (used_.insert(cand).second) return cand;
        }
    }

  private:
    void collect(const FPtr& f) {
        if (!f) return;
        if (!f->var.empty()) used_.insert(f->var);
        if (!f->var2.empty()) used_.insert(f->var2);
        collect(f->left);
        collect(f->right);
    }

    std::set<std::string> used_;
    std::size_t counter_ = 0;
};

} // namespace detail

// Renames the free occurrences of `from` to `to`.  `to` is expected to be
// globally fresh, so no capture check is needed on the way down.
inline FPtr substitute_var(const FPtr& f, const std::string& from, const std::string& to) {
    if (!f) return f;
    switch (f->kind) {
        case FormulaKind::Forall1:
        case FormulaKind::Exists1:
        case FormulaKind::Forall2:
        case FormulaKind::Exists2:
            if (f->var == from) return f; // occurrences below are bound here
            break;
        default: break;
    }
    auto g = std::make_shared<Formula>(*f);
    switch (f->kind) {
        case FormulaKind::Forall1:
        case FormulaKind::Exists1:
        case FormulaKind::Forall2:
        case FormulaKind::Exists2: break; // var is the binder, not an occurrence
        default:
            if (g->var == from) g->var = to;
            if (g->var2 == from) g->var2 = to;
            break;
    }
    g->left = substitute_var(f->left, from, to);
    g->right = substitute_var(f->right, from, to);
    return g;
}

namespace detail {

struct Unshadowed {
    std::string var;
    FPtr body;
};

// Prepares a quantifier body for a pull-out next to `other`: if the binder
// occurs free in `other`, the bound variable is renamed to a fresh one.
inline Unshadowed unshadow(const FPtr& q, const FPtr& other, FreshVars& fv) {
    if (!free_variables(other).count(q->var)) return {q->var, q->left};
    std::string nv = fv.fresh_like(q->var);
    return {nv, substitute_var(q->left, q->var, nv)};
}

// min(x) -> psi  ==  not min(x) or (min(x) and psi); almost boolean whenever
// psi is, since min(x) = forall y.(x <= y) is boolean.
inline FPtr min_implies(const std::string& x, FPtr psi, FreshVars& fv) {
    std::string y1 = fv.fresh_like("y"), y2 = fv.fresh_like("y");
    return f_or(f_not(f_min(x, y1)), f_and(f_min(x, y2), std::move(psi)));
}

inline FPtr push_conjunct(const FPtr& psi, const FPtr& theta, const ValuationMonoid& m,
                          FreshVars& fv);

// Conjunction of an almost-boolean psi with an already strongly restricted
// theta, pushing psi inward when theta carries weights of its own.
inline FPtr conj_push(const FPtr& psi, const FPtr& theta, const ValuationMonoid& m,
                      FreshVars& fv) {
    if (is_almost_boolean(theta)) return f_and(psi, theta);
    return push_conjunct(psi, theta, m, fv);
}

// Core of the conjunction rewrite: psi is almost boolean, theta is strongly
// restricted but weighted (not almost boolean), and the product distributes
// over the structure of theta.  Sums absorb psi factor-wise by
// left-+-distributivity.  A universal body absorbs psi into every entry when
// the product distributes over Val; a merely left-multiplicative product pays
// psi only on the first entry, selected by the boolean guard min(x).
// Conjunctions inside theta have a boolean side (strong restriction), and
// regrouping across a boolean factor is sound in any product valuation monoid
// because that factor is the unit 1 or the absorbing 0.
inline FPtr push_conjunct(const FPtr& psi, const FPtr& theta, const ValuationMonoid& m,
                          FreshVars& fv) {
    switch (theta->kind) {
        case FormulaKind::Or:
            return f_or(conj_push(psi, theta->left, m, fv), conj_push(psi, theta->right, m, fv));
        case FormulaKind::Exists1:
        case FormulaKind::Exists2: {
            Unshadowed u = unshadow(theta, psi, fv);
            return f_quant(theta->kind, u.var, conj_push(psi, u.body, m, fv));
        }
        case FormulaKind::Forall1: {
            Unshadowed u = unshadow(theta, psi, fv);
            if (m.left_val_distributive())
                return f_forall1(u.var, conj_push(psi, u.body, m, fv));
            if (is_almost_boolean(u.body))
                return f_forall1(u.var, f_and(min_implies(u.var, psi, fv), u.body));
            std::string y = fv.fresh_like("y");
            return f_forall1(u.var, f_or(f_and(f_not(f_min(u.var, y)), u.body),
                                         f_and(f_min(u.var, fv.fresh_like("y")),
                                               conj_push(psi, u.body, m, fv))));
        }
        case FormulaKind::And: {
            if (is_boolean(theta->left))
                return conj_push(f_and(psi, theta->left), theta->right, m, fv);
            return f_and(conj_push(psi, theta->left, m, fv), theta->right);
        }
        default:
            throw Error(ErrorKind::NotWedgeRestricted,
                        "cannot push a conjunct into: " + render_formula(theta));
    }
}

inline FPtr rewrite_strong_core(const FPtr& f, const ValuationMonoid& m, FreshVars& fv) {
    if (!f || f->kind == FormulaKind::Const || is_boolean(f)) return f;
    switch (f->kind) {
        case FormulaKind::And: {
            FPtr l = rewrite_strong_core(f->left, m, fv);
            FPtr r = rewrite_strong_core(f->right, m, fv);
            if (is_boolean(l) || is_boolean(r)) return f_and(l, r);
            if (is_almost_boolean(l)) return conj_push(l, r, m, fv);
            throw Error(ErrorKind::NotWedgeRestricted,
                        "conjunction is not wedge-restricted: " + render_formula(f));
        }
        case FormulaKind::Or:
            return f_or(rewrite_strong_core(f->left, m, fv),
                        rewrite_strong_core(f->right, m, fv));
        case FormulaKind::Forall1:
        case FormulaKind::Exists1:
        case FormulaKind::Exists2:
            return f_quant(f->kind, f->var, rewrite_strong_core(f->left, m, fv));
        default: return f;
    }
}

// Conjunction rewrite over a cc-valuation semiring.  Beyond the push-in
// machinery this may swap the conjuncts (their constant sets commute
// elementwise, which the semiring laws lift through sums and products, and
// conditional commutativity plus left-multiplicativity -- or an outright
// commutative product -- lift through Val), distribute either side over sums,
// and merge two universal quantifiers pointwise:
// Val(u) * Val(v) = Val(u_i * v_i).
inline FPtr cc_and(const FPtr& l, const FPtr& r, const ValuationMonoid& m, FreshVars& fv) {
    if (is_boolean(l) || is_boolean(r)) return f_and(l, r);
    if (is_almost_boolean(l)) return conj_push(l, r, m, fv);
    if (is_almost_boolean(r)) return conj_push(r, l, m, fv);
    if (r->kind == FormulaKind::Or)
        return f_or(cc_and(l, r->left, m, fv), cc_and(l, r->right, m, fv));
    if (l->kind == FormulaKind::Or)
        return f_or(cc_and(l->left, r, m, fv), cc_and(l->right, r, m, fv));
    if (r->kind == FormulaKind::Exists1 || r->kind == FormulaKind::Exists2) {
        Unshadowed u = unshadow(r, l, fv);
        return f_quant(r->kind, u.var, cc_and(l, u.body, m, fv));
    }
    if (l->kind == FormulaKind::Exists1 || l->kind == FormulaKind::Exists2) {
        Unshadowed u = unshadow(l, r, fv);
        return f_quant(l->kind, u.var, cc_and(u.body, r, m, fv));
    }
    if (r->kind == FormulaKind::And) {
        if (is_boolean(r->left)) return f_and(r->left, cc_and(l, r->right, m, fv));
        return f_and(cc_and(l, r->left, m, fv), r->right);
    }
    if (l->kind == FormulaKind::And) {
        if (is_boolean(l->right)) return f_and(cc_and(l->left, r, m, fv), l->right);
        return f_and(l->left, cc_and(l->right, r, m, fv));
    }
    if (l->kind == FormulaKind::Forall1 && r->kind == FormulaKind::Forall1) {
        std::string z = fv.fresh_like(l->var);
        FPtr lb = substitute_var(l->left, l->var, z);
        FPtr rb = substitute_var(r->left, r->var, z);
        return f_forall1(z, cc_and(lb, rb, m, fv));
    }
    throw Error(ErrorKind::NotCommutativelyWedgeRestricted,
                "conjunction cannot be restructured: " + render_formula(f_and(l, r)));
}

inline FPtr rewrite_cc_core(const FPtr& f, const ValuationMonoid& m, FreshVars& fv) {
    if (!f || f->kind == FormulaKind::Const || is_boolean(f)) return f;
    switch (f->kind) {
        case FormulaKind::And:
            return cc_and(rewrite_cc_core(f->left, m, fv), rewrite_cc_core(f->right, m, fv), m,
                          fv);
        case FormulaKind::Or:
            return f_or(rewrite_cc_core(f->left, m, fv), rewrite_cc_core(f->right, m, fv));
        case FormulaKind::Forall1:
        case FormulaKind::Exists1:
        case FormulaKind::Exists2:
            return f_quant(f->kind, f->var, rewrite_cc_core(f->left, m, fv));
        default: return f;
    }
}

// --- normal form under a commutative product --------------------------------

// Disjunct of an almost-boolean formula: a conjunction of boolean factors and
// one folded constant.  A commutative, associative product makes the
// reordering and the folding sound.
struct AbAtom {
    FPtr bools;             // conjunction of the boolean factors, or null
    std::optional<Value> d; // product of the constant factors
};

inline void ab_disjuncts(const FPtr& f, const ValuationMonoid& m, std::vector<AbAtom>& out,
                         std::size_t max_terms) {
    if (out.size() > max_terms)
        throw Error(ErrorKind::LimitExceeded, "normal form exceeds " +
                                                  std::to_string(max_terms) + " disjuncts");
    if (f->kind == FormulaKind::Const) {
        out.push_back({nullptr, f->value});
        return;
    }
    if (is_boolean(f)) {
        out.push_back({f, std::nullopt});
        return;
    }
    if (f->kind == FormulaKind::Or) {
        ab_disjuncts(f->left, m, out, max_terms);
        ab_disjuncts(f->right, m, out, max_terms);
        return;
    }
    if (f->kind == FormulaKind::And) {
        std::vector<AbAtom> ls, rs;
        ab_disjuncts(f->left, m, ls, max_terms);
        ab_disjuncts(f->right, m, rs, max_terms);
        if (ls.size() * rs.size() > max_terms)
            throw Error(ErrorKind::LimitExceeded, "normal form exceeds " +
                                                      std::to_string(max_terms) + " disjuncts");
        for (const AbAtom& u : ls)
            for (const AbAtom& v : rs) {
                AbAtom a;
                a.bools = u.bools && v.bools ? f_and(u.bools, v.bools)
                                             : (u.bools ? u.bools : v.bools);
                a.d = u.d && v.d ? std::optional<Value>(m.times(*u.d, *v.d)) : (u.d ? u.d : v.d);
                out.push_back(a);
            }
        return;
    }
    throw Error(ErrorKind::FragmentViolation,
                "not an almost-boolean formula: " + render_formula(f));
}

// Rewrites an almost-boolean formula so conjunctions pair one boolean formula
// with one constant.  Already conformant formulas pass through unchanged.
inline FPtr ab_normal(const FPtr& f, const ValuationMonoid& m, std::size_t max_terms = 4096) {
    if (f->kind == FormulaKind::Const || is_boolean(f) || corollary_form(f)) return f;
    std::vector<AbAtom> ds;
    ab_disjuncts(f, m, ds, max_terms);
    FPtr out;
    for (const AbAtom& a : ds) {
        FPtr term = a.bools ? (a.d ? f_and(a.bools, f_const(*a.d)) : a.bools) : f_const(*a.d);
        out = out ? f_or(out, term) : term;
    }
    return out;
}

// Conjunction of an almost-boolean factor with a weighted formula, folded all
// the way down so no conjunction with a composite side survives.
inline FPtr c17_combine(const FPtr& ab, const FPtr& t, const ValuationMonoid& m, FreshVars& fv) {
    if (is_almost_boolean(t)) return ab_normal(f_and(ab, t), m);
    switch (t->kind) {
        case FormulaKind::Or:
            return f_or(c17_combine(ab, t->left, m, fv), c17_combine(ab, t->right, m, fv));
        case FormulaKind::Exists1:
        case FormulaKind::Exists2: {
            Unshadowed u = unshadow(t, ab, fv);
            return f_quant(t->kind, u.var, c17_combine(ab, u.body, m, fv));
        }
        case FormulaKind::Forall1: {
            Unshadowed u = unshadow(t, ab, fv);
            if (m.left_val_distributive())
                return f_forall1(u.var, c17_combine(ab, u.body, m, fv));
            if (is_almost_boolean(u.body))
                return f_forall1(u.var, ab_normal(f_and(min_implies(u.var, ab, fv), u.body), m));
            FPtr head = ab_normal(f_and(f_min(u.var, fv.fresh_like("y")), ab), m);
            return f_forall1(
                u.var, f_or(c17_combine(f_not(f_min(u.var, fv.fresh_like("y"))), u.body, m, fv),
                            c17_combine(head, u.body, m, fv)));
        }
        default:
            throw Error(ErrorKind::FragmentViolation,
                        "conjunction cannot be flattened into: " + render_formula(t));
    }
}

inline FPtr c17_pass(const FPtr& f, const ValuationMonoid& m, FreshVars& fv) {
    if (!f || is_boolean(f)) return f;
    if (is_almost_boolean(f)) return ab_normal(f, m);
    switch (f->kind) {
        case FormulaKind::And: {
            FPtr l = c17_pass(f->left, m, fv);
            FPtr r = c17_pass(f->right, m, fv);
            if (is_almost_boolean(l)) return c17_combine(l, r, m, fv);
            return c17_combine(r, l, m, fv); // sound: the product is commutative
        }
        case FormulaKind::Or:
            return f_or(c17_pass(f->left, m, fv), c17_pass(f->right, m, fv));
        case FormulaKind::Forall1:
        case FormulaKind::Exists1:
        case FormulaKind::Exists2:
            return f_quant(f->kind, f->var, c17_pass(f->left, m, fv));
        default: return f;
    }
}

inline std::string first_witness(const FragmentReport& rep, const std::string& flag) {
    for (const std::string& w : rep.witnesses)
        if (w.rfind(flag, 0) == 0) return w;
    return flag;
}

} // namespace detail

// Rewrites a wedge-restricted formula into an equivalent strongly restricted
// one.  Needs a left-distributive monoid: sums distribute the almost-boolean
// factor, and universal bodies absorb it either entry-wise (Val-distributive)
// or on the first entry behind a min(x) guard (left-multiplicative).  A
// forall-restricted input yields a forall-restricted output.
inline FPtr rewrite_to_strongly_restricted(const FPtr& f, const ValuationMonoid& m) {
    if (!m.left_plus_distributive() ||
        !(m.left_val_distributive() || m.left_multiplicative()))
        throw Error(ErrorKind::MonoidFlagMissing,
                    m.name() + " is not left-distributive; the conjunction rewrite needs "
                               "left-+-distributivity and either left-Val-distributivity or "
                               "left-multiplicativity");
    FragmentReport rep = classify(f, m);
    if (!rep.wedge_restricted)
        throw Error(ErrorKind::NotWedgeRestricted,
                    detail::first_witness(rep, "wedgeRestricted"));
    detail::FreshVars fv(f);
    return detail::rewrite_strong_core(f, m, fv);
}

// Rewrites a commutatively wedge-restricted formula into an equivalent
// strongly restricted one over a cc-valuation semiring.  When the product is
// commutative outright, the result is additionally normalized so conjunctions
// occur only between boolean formulas and constants.
inline FPtr rewrite_commutative(const FPtr& f, const ValuationMonoid& m) {
    if (!m.conditionally_commutative() || !m.left_plus_distributive() ||
        !(m.left_val_distributive() || m.left_multiplicative()))
        throw Error(ErrorKind::MonoidFlagMissing,
                    m.name() + " is not a cc-valuation semiring; the commutative rewrite needs "
                               "conditional commutativity and left-distributivity");
    FragmentReport rep = classify(f, m);
    if (!rep.commutatively_wedge_restricted)
        throw Error(ErrorKind::NotCommutativelyWedgeRestricted,
                    detail::first_witness(rep, "commutativelyWedgeRestricted"));
    detail::FreshVars fv(f);
    FPtr out = detail::rewrite_cc_core(f, m, fv);
    if (m.commutative()) out = detail::c17_pass(out, m, fv);
    return out;
}

} // namespace wnwa

#endif // WNWA_FRAGMENTS_HH_
