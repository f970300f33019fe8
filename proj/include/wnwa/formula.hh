/* formula.hh -- weighted MSO abstract syntax, parser, renderer, fragment classifier
 *
 * Grammar (ASCII):
 *   phi  ::= or_expr
 *   or_expr  ::= and_expr ("or" and_expr)*
 *   and_expr ::= unary ("and" unary)*
 *   unary ::= "not" unary | ("forall"|"exists") ident "." or_expr | primary
 *   primary ::= "(" or_expr ")" | atom | constant
 * Atoms: Lab_<sym>(x), call(x), ret(x), x <= y, nu(x,y), x in X, pcall(x),
 * pret(x), step(x), succ(x,y).  Macros expanding at parse time: min(x),
 * bfr(x), x < y.  Variables starting lowercase are first order, uppercase
 * second order.  Negation and "forall X" are restricted to the boolean layer
 * (subtrees without constants).
 */

#ifndef WNWA_FORMULA_HH_
#define WNWA_FORMULA_HH_

#include <cctype>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hh"
#include "valuation_monoid.hh"

namespace wnwa {

enum class FormulaKind : uint8_t {
    Label,    // Lab_sym(var)
    CallAtom, // call(var)
    RetAtom,  // ret(var)
    Leq,      // var <= var2
    Nu,       // nu(var, var2)
    InSet,    // var in var2 (var2 second order)
    PCall,    // pcall(var)
    PRet,     // pret(var)
    StepAtom, // step(var)
    Succ,     // succ(var, var2)
    Not,
    And,
    Or,
    Forall1, // forall var (first order)
    Exists1,
    Forall2, // forall var (second order, boolean layer)
    Exists2,
    Const,
};

struct Formula;
using FPtr = std::shared_ptr<const Formula>;

struct Formula {
    FormulaKind kind;
    Value value = 0;       // Const
    std::string symbol;    // Label
    std::string var, var2; // atom arguments resp. quantifier binder
    FPtr left, right;      // children (unary/quantifier use left)
};

inline bool is_first_order_var(const std::string& v) {
    return !v.empty() && std::islower(static_cast<unsigned char>(v[0]));
}
inline bool is_second_order_var(const std::string& v) {
    return !v.empty() && std::isupper(static_cast<unsigned char>(v[0]));
}

inline bool is_atom(const Formula& f) {
    switch (f.kind) {
        case FormulaKind::Label:
        case FormulaKind::CallAtom:
        case FormulaKind::RetAtom:
        case FormulaKind::Leq:
        case FormulaKind::Nu:
        case FormulaKind::InSet:
        case FormulaKind::PCall:
        case FormulaKind::PRet:
        case FormulaKind::StepAtom:
        case FormulaKind::Succ: return true;
        default: return false;
    }
}

// Boolean layer: no constants anywhere in the subtree.
inline bool is_boolean(const FPtr& f) {
    if (!f) return true;
    if (f->kind == FormulaKind::Const) return false;
    return is_boolean(f->left) && is_boolean(f->right);
}

// Almost boolean: constants and boolean formulas closed under "and"/"or".
inline bool is_almost_boolean(const FPtr& f) {
    if (f->kind == FormulaKind::Const) return true;
    if (is_boolean(f)) return true;
    if (f->kind == FormulaKind::And || f->kind == FormulaKind::Or)
        return is_almost_boolean(f->left) && is_almost_boolean(f->right);
    return false;
}

// --- node factories -------------------------------------------------------

namespace detail {
inline FPtr node(FormulaKind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}
inline void require_fo(const std::string& v, const char* what) {
    if (!is_first_order_var(v))
        throw Error(ErrorKind::ParseError,
                    std::string(what) + " needs a first-order (lowercase) variable, got '" + v +
                        "'");
}
} // namespace detail

inline FPtr f_const(Value d) {
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Const;
    f->value = d;
    return f;
}
inline FPtr f_label(const std::string& sym, const std::string& x) {
    detail::require_fo(x, "Lab");
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Label;
    f->symbol = sym;
    f->var = x;
    return f;
}
inline FPtr f_unary_atom(FormulaKind k, const std::string& x) {
    detail::require_fo(x, "atom");
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = x;
    return f;
}
inline FPtr f_call(const std::string& x) { return f_unary_atom(FormulaKind::CallAtom, x); }
inline FPtr f_ret(const std::string& x) { return f_unary_atom(FormulaKind::RetAtom, x); }
inline FPtr f_pcall(const std::string& x) { return f_unary_atom(FormulaKind::PCall, x); }
inline FPtr f_pret(const std::string& x) { return f_unary_atom(FormulaKind::PRet, x); }
inline FPtr f_step(const std::string& x) { return f_unary_atom(FormulaKind::StepAtom, x); }
inline FPtr f_binary_atom(FormulaKind k, const std::string& x, const std::string& y) {
    detail::require_fo(x, "atom");
    detail::require_fo(y, "atom");
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = x;
    f->var2 = y;
    return f;
}
inline FPtr f_leq(const std::string& x, const std::string& y) {
    return f_binary_atom(FormulaKind::Leq, x, y);
}
inline FPtr f_nu(const std::string& x, const std::string& y) {
    return f_binary_atom(FormulaKind::Nu, x, y);
}
inline FPtr f_succ(const std::string& x, const std::string& y) {
    return f_binary_atom(FormulaKind::Succ, x, y);
}
inline FPtr f_in(const std::string& x, const std::string& X) {
    detail::require_fo(x, "'in'");
    if (!is_second_order_var(X))
        throw Error(ErrorKind::ParseError,
                    "'in' needs a second-order (uppercase) variable, got '" + X + "'");
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::InSet;
    f->var = x;
    f->var2 = X;
    return f;
}
inline FPtr f_not(FPtr child) {
    if (!is_boolean(child))
        throw Error(ErrorKind::ParseError, "negation is restricted to the boolean layer");
    auto f = std::make_shared<Formula>();
    f->kind = FormulaKind::Not;
    f->left = std::move(child);
    return f;
}
inline FPtr f_bin(FormulaKind k, FPtr a, FPtr b) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->left = std::move(a);
    f->right = std::move(b);
    return f;
}
inline FPtr f_and(FPtr a, FPtr b) { return f_bin(FormulaKind::And, std::move(a), std::move(b)); }
inline FPtr f_or(FPtr a, FPtr b) { return f_bin(FormulaKind::Or, std::move(a), std::move(b)); }
inline FPtr f_quant(FormulaKind k, const std::string& v, FPtr body) {
    if (k == FormulaKind::Forall2 && !is_boolean(body))
        throw Error(ErrorKind::ParseError,
                    "forall over a set variable is restricted to the boolean layer");
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = v;
    f->left = std::move(body);
    return f;
}
inline FPtr f_forall1(const std::string& v, FPtr body) {
    detail::require_fo(v, "forall");
    return f_quant(FormulaKind::Forall1, v, std::move(body));
}
inline FPtr f_exists1(const std::string& v, FPtr body) {
    detail::require_fo(v, "exists");
    return f_quant(FormulaKind::Exists1, v, std::move(body));
}
inline FPtr f_forall2(const std::string& v, FPtr body) {
    return f_quant(FormulaKind::Forall2, v, std::move(body));
}
inline FPtr f_exists2(const std::string& v, FPtr body) {
    return f_quant(FormulaKind::Exists2, v, std::move(body));
}

// x < y  desugars to  not (y <= x)
inline FPtr f_less(const std::string& x, const std::string& y) { return f_not(f_leq(y, x)); }

// min(x) = forall y.(x <= y)
inline FPtr f_min(const std::string& x, const std::string& fresh) {
    return f_forall1(fresh, f_leq(x, fresh));
}

// bfr(y) = forall x forall z.(not(x<y<z and nu(x,z)) and not(x<y and pcall(x))
//                             and not(y<z and pret(z)))
inline FPtr f_bfr(const std::string& y, const std::string& fx, const std::string& fz) {
    FPtr spanning = f_not(f_and(f_and(f_less(fx, y), f_less(y, fz)), f_nu(fx, fz)));
    FPtr pc = f_not(f_and(f_less(fx, y), f_pcall(fx)));
    FPtr pr = f_not(f_and(f_less(y, fz), f_pret(fz)));
    return f_forall1(fx, f_forall1(fz, f_and(f_and(spanning, pc), pr)));
}

// --- structural queries ----------------------------------------------------

inline void collect_free(const FPtr& f, std::set<std::string>& bound,
                         std::set<std::string>& out) {
    if (!f) return;
    switch (f->kind) {
        case FormulaKind::Const: return;
        case FormulaKind::Label:
        case FormulaKind::CallAtom:
        case FormulaKind::RetAtom:
        case FormulaKind::PCall:
        case FormulaKind::PRet:
        case FormulaKind::StepAtom:
            if (!bound.count(f->var)) out.insert(f->var);
            return;
        case FormulaKind::Leq:
        case FormulaKind::Nu:
        case FormulaKind::Succ:
        case FormulaKind::InSet:
            if (!bound.count(f->var)) out.insert(f->var);
            if (!bound.count(f->var2)) out.insert(f->var2);
            return;
        case FormulaKind::Forall1:
        case FormulaKind::Exists1:
        case FormulaKind::Forall2:
        case FormulaKind::Exists2: {
            bool was = bound.count(f->var) > 0;
            bound.insert(f->var);
            collect_free(f->left, bound, out);
            if (!was) bound.erase(f->var);
            return;
        }
        default:
            collect_free(f->left, bound, out);
            collect_free(f->right, bound, out);
            return;
    }
}

inline std::set<std::string> free_variables(const FPtr& f) {
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

inline void collect_consts(const FPtr& f, std::vector<Value>& out) {
    if (!f) return;
    if (f->kind == FormulaKind::Const) out.push_back(f->value);
    collect_consts(f->left, out);
    collect_consts(f->right, out);
}

inline std::vector<Value> const_set(const FPtr& f) {
    std::vector<Value> out;
    collect_consts(f, out);
    return out;
}

inline bool formula_equal(const FPtr& a, const FPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->value != b->value || a->symbol != b->symbol ||
        a->var != b->var || a->var2 != b->var2)
        return false;
    return formula_equal(a->left, b->left) && formula_equal(a->right, b->right);
}

// --- rendering --------------------------------------------------------------

inline std::string render_formula(const FPtr& f);

namespace detail {
inline std::string render_const(Value v) {
    if (v == val_inf) return "inf";
    if (v == -val_inf) return "-inf";
    std::ostringstream out;
    out << v;
    std::string s = out.str();
    if (s.find_first_of(".einf") == std::string::npos) s += ".0";
    return s;
}

// precedence: 0 or, 1 and, 2 unary/atom
inline int precedence(const Formula& f) {
    switch (f.kind) {
        case FormulaKind::Or: return 0;
        case FormulaKind::And: return 1;
        default: return 2;
    }
}

inline std::string render_prec(const FPtr& f, int min_prec) {
    std::string body;
    switch (f->kind) {
        case FormulaKind::Const: body = render_const(f->value); break;
        case FormulaKind::Label: body = "Lab_" + f->symbol + "(" + f->var + ")"; break;
        case FormulaKind::CallAtom: body = "call(" + f->var + ")"; break;
        case FormulaKind::RetAtom: body = "ret(" + f->var + ")"; break;
        case FormulaKind::PCall: body = "pcall(" + f->var + ")"; break;
        case FormulaKind::PRet: body = "pret(" + f->var + ")"; break;
        case FormulaKind::StepAtom: body = "step(" + f->var + ")"; break;
        case FormulaKind::Leq: body = f->var + " <= " + f->var2; break;
        case FormulaKind::Nu: body = "nu(" + f->var + "," + f->var2 + ")"; break;
        case FormulaKind::Succ: body = "succ(" + f->var + "," + f->var2 + ")"; break;
        case FormulaKind::InSet: body = f->var + " in " + f->var2; break;
        case FormulaKind::Not: body = "not " + render_prec(f->left, 2); break;
        case FormulaKind::And:
            body = render_prec(f->left, 1) + " and " + render_prec(f->right, 2);
            break;
        case FormulaKind::Or:
            body = render_prec(f->left, 0) + " or " + render_prec(f->right, 1);
            break;
        case FormulaKind::Forall1:
        case FormulaKind::Forall2:
            body = "forall " + f->var + ". " + render_prec(f->left, 0);
            break;
        case FormulaKind::Exists1:
        case FormulaKind::Exists2:
            body = "exists " + f->var + ". " + render_prec(f->left, 0);
            break;
    }
    bool is_quant = f->kind == FormulaKind::Forall1 || f->kind == FormulaKind::Forall2 ||
                    f->kind == FormulaKind::Exists1 || f->kind == FormulaKind::Exists2;
    int prec = is_quant ? 0 : precedence(*f); // quantifier bodies extend maximally right
    if (prec < min_prec) return "(" + body + ")";
    return body;
}
} // namespace detail

inline std::string render_formula(const FPtr& f) { return detail::render_prec(f, 0); }

// --- parsing ----------------------------------------------------------------

namespace detail {

struct Token {
    enum class Type { Ident, Number, LParen, RParen, Comma, Dot, Leq, Less, End } type;
    std::string text;
    double num = 0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }
    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        tok_.pos = i_;
        if (i_ >= text_.size()) {
            tok_.type = Token::Type::End;
            tok_.text.clear();
            return;
        }
        char c = text_[i_];
        if (c == '(') { tok_ = {Token::Type::LParen, "(", 0, i_++}; return; }
        if (c == ')') { tok_ = {Token::Type::RParen, ")", 0, i_++}; return; }
        if (c == ',') { tok_ = {Token::Type::Comma, ",", 0, i_++}; return; }
        if (c == '.') { tok_ = {Token::Type::Dot, ".", 0, i_++}; return; }
        if (c == '<') {
            if (i_ + 1 < text_.size() && text_[i_ + 1] == '=') {
                tok_ = {Token::Type::Leq, "<=", 0, i_};
                i_ += 2;
            } else {
                tok_ = {Token::Type::Less, "<", 0, i_++};
            }
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i_ + 1 < text_.size())) {
            std::size_t start = i_;
            if (c == '-') ++i_;
            if (i_ < text_.size() && text_.compare(i_, 3, "inf") == 0) {
                i_ += 3;
                tok_ = {Token::Type::Number, text_.substr(start, i_ - start),
                        c == '-' ? -val_inf : val_inf, start};
                return;
            }
            while (i_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.' ||
                    text_[i_] == 'e' || text_[i_] == 'E' ||
                    ((text_[i_] == '+' || text_[i_] == '-') &&
                     (text_[i_ - 1] == 'e' || text_[i_ - 1] == 'E'))))
                ++i_;
            std::string s = text_.substr(start, i_ - start);
            try {
                std::size_t used = 0;
                double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                tok_ = {Token::Type::Number, s, v, start};
            } catch (const std::exception&) {
                throw Error(ErrorKind::ParseError,
                            "bad numeric literal '" + s + "' at offset " + std::to_string(start));
            }
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = i_;
            while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) ||
                                         text_[i_] == '_'))
                ++i_;
            std::string s = text_.substr(start, i_ - start);
            if (s == "inf") {
                tok_ = {Token::Type::Number, s, val_inf, start};
                return;
            }
            tok_ = {Token::Type::Ident, s, 0, start};
            return;
        }
        throw Error(ErrorKind::ParseError, std::string("unexpected character '") + c +
                                               "' at offset " + std::to_string(i_));
    }

    const std::string& text_;
    std::size_t i_ = 0;
    Token tok_;
};

class FormulaParser {
public:
    explicit FormulaParser(const std::string& text) : lex_(text) {
        // reserve every identifier in the input so macro-generated variables
        // cannot capture anything
        Lexer scan(text);
        while (scan.peek().type != Token::Type::End) {
            Token t = scan.next();
            if (t.type == Token::Type::Ident) used_.insert(t.text);
        }
    }

    FPtr parse() {
        FPtr f = parse_or();
        if (lex_.peek().type != Token::Type::End)
            throw Error(ErrorKind::ParseError, "trailing input at offset " +
                                                   std::to_string(lex_.peek().pos));
        return f;
    }

private:
    std::string fresh() {
        for (std::size_t k = counter_;; ++k) {
            std::string cand = "w" + std::to_string(k);
            if (!used_.count(cand)) {
                used_.insert(cand);
                counter_ = k + 1;
                return cand;
            }
        }
    }

    [[noreturn]] void fail(const std::string& why) {
        throw Error(ErrorKind::ParseError,
                    why + " at offset " + std::to_string(lex_.peek().pos));
    }

    void expect(Token::Type t, const char* what) {
        if (lex_.peek().type != t) fail(std::string("expected ") + what);
        lex_.next();
    }

    std::string expect_ident(const char* what) {
        if (lex_.peek().type != Token::Type::Ident) fail(std::string("expected ") + what);
        return lex_.next().text;
    }

    FPtr parse_or() {
        FPtr f = parse_and();
        while (lex_.peek().type == Token::Type::Ident && lex_.peek().text == "or") {
            lex_.next();
            f = f_or(f, parse_and());
        }
        return f;
    }

    FPtr parse_and() {
        FPtr f = parse_unary();
        while (lex_.peek().type == Token::Type::Ident && lex_.peek().text == "and") {
            lex_.next();
            f = f_and(f, parse_unary());
        }
        return f;
    }

    FPtr parse_unary() {
        if (lex_.peek().type == Token::Type::Ident) {
            const std::string& kw = lex_.peek().text;
            if (kw == "not") {
                std::size_t at = lex_.peek().pos;
                lex_.next();
                FPtr child = parse_unary();
                if (!is_boolean(child))
                    throw Error(ErrorKind::ParseError,
                                "negation outside the boolean layer at offset " +
                                    std::to_string(at));
                return f_not(child);
            }
            if (kw == "forall" || kw == "exists") {
                bool univ = kw == "forall";
                lex_.next();
                std::string v = expect_ident("variable after quantifier");
                expect(Token::Type::Dot, "'.' after quantified variable");
                FPtr body = parse_or();
                std::size_t at = lex_.peek().pos;
                if (is_first_order_var(v)) return univ ? f_forall1(v, body) : f_exists1(v, body);
                if (univ && !is_boolean(body))
                    throw Error(ErrorKind::ParseError,
                                "forall over a set variable outside the boolean layer at offset " +
                                    std::to_string(at));
                return univ ? f_forall2(v, body) : f_exists2(v, body);
            }
        }
        return parse_primary();
    }

    FPtr parse_primary() {
        const Token& t = lex_.peek();
        switch (t.type) {
            case Token::Type::LParen: {
                lex_.next();
                FPtr f = parse_or();
                expect(Token::Type::RParen, "')'");
                return f;
            }
            case Token::Type::Number: {
                return f_const(lex_.next().num);
            }
            case Token::Type::Ident: return parse_atom();
            default: fail("expected a formula");
        }
    }

    FPtr parse_atom() {
        std::string id = lex_.next().text;
        if (id.rfind("Lab_", 0) == 0) {
            std::string sym = id.substr(4);
            if (sym.empty()) fail("empty symbol in label atom");
            expect(Token::Type::LParen, "'('");
            std::string x = expect_ident("variable");
            expect(Token::Type::RParen, "')'");
            return f_label(sym, x);
        }
        if (id == "call" || id == "ret" || id == "pcall" || id == "pret" || id == "step" ||
            id == "min" || id == "bfr") {
            expect(Token::Type::LParen, "'('");
            std::string x = expect_ident("variable");
            expect(Token::Type::RParen, "')'");
            if (id == "call") return f_call(x);
            if (id == "ret") return f_ret(x);
            if (id == "pcall") return f_pcall(x);
            if (id == "pret") return f_pret(x);
            if (id == "step") return f_step(x);
            if (id == "min") return f_min(x, fresh());
            return f_bfr(x, fresh(), fresh());
        }
        if (id == "nu" || id == "succ") {
            expect(Token::Type::LParen, "'('");
            std::string x = expect_ident("variable");
            expect(Token::Type::Comma, "','");
            std::string y = expect_ident("variable");
            expect(Token::Type::RParen, "')'");
            return id == "nu" ? f_nu(x, y) : f_succ(x, y);
        }
        // infix atoms: x <= y | x < y | x in X
        if (lex_.peek().type == Token::Type::Leq) {
            lex_.next();
            return f_leq(id, expect_ident("variable"));
        }
        if (lex_.peek().type == Token::Type::Less) {
            lex_.next();
            return f_less(id, expect_ident("variable"));
        }
        if (lex_.peek().type == Token::Type::Ident && lex_.peek().text == "in") {
            lex_.next();
            return f_in(id, expect_ident("set variable"));
        }
        fail("unknown atom '" + id + "'");
    }

    Lexer lex_;
    std::set<std::string> used_;
    std::size_t counter_ = 0;
};

} // namespace detail

inline FPtr parse_formula(const std::string& text) {
    return detail::FormulaParser(text).parse();
}

// --- fragment classification -------------------------------------------------

struct FragmentReport {
    bool boolean_formula = false;
    bool almost_boolean = false;
    bool strongly_wedge_restricted = true;
    bool wedge_restricted = true;
    bool commutatively_wedge_restricted = true;
    bool forall_restricted = true;
    bool syntactically_restricted = false;
    std::vector<std::string> witnesses; // "flag: offending subformula"
};

namespace detail {
inline bool consts_commute(const FPtr& a, const FPtr& b, const ValuationMonoid& m) {
    auto ca = const_set(a), cb = const_set(b);
    for (Value d : ca)
        for (Value e : cb) {
            Value de = m.times(d, e), ed = m.times(e, d);
            if (de == ed) continue;
            if (std::fabs(de - ed) > 1e-9) return false;
        }
    return true;
}

inline void classify_walk(const FPtr& f, const ValuationMonoid& m, FragmentReport& r) {
    if (!f) return;
    if (f->kind == FormulaKind::And) {
        bool la = is_almost_boolean(f->left), ra = is_almost_boolean(f->right);
        bool lb = is_boolean(f->left), rb = is_boolean(f->right);
        if (!((la && ra) || lb || rb)) {
            r.strongly_wedge_restricted = false;
            r.witnesses.push_back("stronglyWedgeRestricted: " + render_formula(f));
        }
        if (!(la || rb)) {
            r.wedge_restricted = false;
            r.witnesses.push_back("wedgeRestricted: " + render_formula(f));
        }
        if (!(la || consts_commute(f->left, f->right, m))) {
            r.commutatively_wedge_restricted = false;
            r.witnesses.push_back("commutativelyWedgeRestricted: " + render_formula(f));
        }
    }
    if (f->kind == FormulaKind::Forall1 && !is_almost_boolean(f->left)) {
        r.forall_restricted = false;
        r.witnesses.push_back("forallRestricted: " + render_formula(f));
    }
    classify_walk(f->left, m, r);
    classify_walk(f->right, m, r);
}
} // namespace detail

inline FragmentReport classify(const FPtr& f,
                               const ValuationMonoid& m = ValuationMonoid::limavg()) {
    FragmentReport r;
    r.boolean_formula = is_boolean(f);
    r.almost_boolean = is_almost_boolean(f);
    detail::classify_walk(f, m, r);
    r.syntactically_restricted = r.forall_restricted && r.strongly_wedge_restricted;
    return r;
}

} // namespace wnwa

#endif // WNWA_FORMULA_HH_
