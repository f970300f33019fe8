/* valuation_monoid.hh -- omega-valuation monoids over extended reals, plus a law checker
 *
 * Three concrete instances share the carrier double (with -inf as the monoid
 * zero except for boolean):
 *   limavg    (R u {-inf,+inf}, max, liminf-average, +, -inf, 0)
 *   disc:L    (R+ u {-inf,+inf}, max, discounted sum with factor L, +, -inf, 0)
 *   boolean   ({0,1}, or, infinite conjunction, and, 0, 1)
 *
 * Infinite products Val are evaluated exactly on ultimately periodic sequences
 * (head . cycle^omega) by closed forms.  The structural properties that the
 * translation theorems depend on are carried as flags and can be probed
 * empirically with check_laws: random trials over ultimately periodic
 * sequences plus a block-oscillation battery whose running averages genuinely
 * oscillate (ultimately periodic inputs alone cannot separate Val(a)+Val(b)
 * from Val(a+b) under liminf-average).
 */

#ifndef WNWA_VALUATION_MONOID_HH_
#define WNWA_VALUATION_MONOID_HH_

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "error.hh"

namespace wnwa {

using Value = double;

inline constexpr Value val_inf = std::numeric_limits<Value>::infinity();

class ValuationMonoid {
public:
    enum class Kind { LimAvg, Disc, Boolean };
    // How a single constant d is spread over an infinite run so that the run's
    // Val equals d: repeat it at every position (liminf-average of the constant
    // sequence) or charge it once up front (discounted sum, remaining weights
    // neutral).
    enum class ConstStrategy { EveryWeight, FirstWeight };

    static ValuationMonoid limavg() { return ValuationMonoid(Kind::LimAvg, 0.0); }
    static ValuationMonoid disc(double lambda) {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw Error(ErrorKind::ParseError, "discount factor must lie in (0,1)");
        return ValuationMonoid(Kind::Disc, lambda);
    }
    static ValuationMonoid boolean() { return ValuationMonoid(Kind::Boolean, 0.0); }

    // "limavg" | "disc:<lambda>" | "boolean"
    static ValuationMonoid parse(const std::string& name) {
        if (name == "limavg") return limavg();
        if (name == "boolean") return boolean();
        if (name.rfind("disc:", 0) == 0) {
            std::istringstream in(name.substr(5));
            double lambda = 0;
            if (!(in >> lambda) || !in.eof())
                throw Error(ErrorKind::ParseError, "bad discount factor in '" + name + "'");
            return disc(lambda);
        }
        throw Error(ErrorKind::ParseError,
                    "unknown monoid '" + name + "' (expected limavg, disc:<lambda>, boolean)");
    }

    Kind kind() const { return kind_; }
    double discount() const { return lambda_; }

    std::string name() const {
        switch (kind_) {
            case Kind::LimAvg: return "limavg";
            case Kind::Boolean: return "boolean";
            case Kind::Disc: {
                std::ostringstream out;
                out << "disc:" << lambda_;
                return out.str();
            }
        }
        return "?";
    }

    Value zero() const { return kind_ == Kind::Boolean ? 0.0 : -val_inf; }
    Value one() const { return kind_ == Kind::Boolean ? 1.0 : 0.0; }

    Value plus(Value a, Value b) const { return a > b ? a : b; }

    Value times(Value a, Value b) const {
        if (kind_ == Kind::Boolean) return a < b ? a : b;
        if (a == -val_inf || b == -val_inf) return -val_inf; // zero absorbs (avoids inf-inf)
        return a + b;
    }

    bool is_zero(Value a) const { return a == zero(); }

    // Exact Val on head . cycle^omega.
    Value val_up(const std::vector<Value>& head, const std::vector<Value>& cycle) const {
        if (cycle.empty()) throw Error(ErrorKind::UnsupportedSequence, "empty cycle");
        switch (kind_) {
            case Kind::Boolean: {
                for (Value v : head)
                    if (v < 0.5) return 0.0;
                for (Value v : cycle)
                    if (v < 0.5) return 0.0;
                return 1.0;
            }
            case Kind::LimAvg: {
                bool plus_inf = false;
                for (Value v : head) {
                    if (v == -val_inf) return -val_inf;
                    if (v == val_inf) plus_inf = true;
                }
                for (Value v : cycle) {
                    if (v == -val_inf) return -val_inf;
                    if (v == val_inf) plus_inf = true;
                }
                if (plus_inf) return val_inf;
                Value sum = 0;
                for (Value v : cycle) sum += v;
                return sum / static_cast<Value>(cycle.size());
            }
            case Kind::Disc: {
                bool plus_inf = false;
                for (Value v : head) {
                    if (v == -val_inf) return -val_inf;
                    if (v == val_inf) plus_inf = true;
                }
                for (Value v : cycle) {
                    if (v == -val_inf) return -val_inf;
                    if (v == val_inf) plus_inf = true;
                }
                if (plus_inf) return val_inf;
                Value acc = 0, pow = 1;
                for (Value v : head) {
                    acc += pow * v;
                    pow *= lambda_;
                }
                Value cyc = 0, cpow = 1;
                for (Value v : cycle) {
                    cyc += cpow * v;
                    cpow *= lambda_;
                }
                // pow == lambda^|head|, cpow == lambda^|cycle|
                return acc + pow * cyc / (1.0 - cpow);
            }
        }
        return zero();
    }

    // Val of a finite prefix (estimator used by the brute-force oracles).
    Value val_prefix(const std::vector<Value>& seq) const {
        if (seq.empty()) return one();
        switch (kind_) {
            case Kind::Boolean: {
                Value m = 1.0;
                for (Value v : seq) m = times(m, v);
                return m;
            }
            case Kind::LimAvg: {
                bool plus_inf = false;
                Value sum = 0;
                for (Value v : seq) {
                    if (v == -val_inf) return -val_inf;
                    if (v == val_inf) plus_inf = true;
                    else sum += v;
                }
                if (plus_inf) return val_inf;
                return sum / static_cast<Value>(seq.size());
            }
            case Kind::Disc: {
                Value acc = 0, pow = 1;
                for (Value v : seq) {
                    if (v == -val_inf) return -val_inf;
                    acc += pow * v;
                    pow *= lambda_;
                }
                return acc;
            }
        }
        return zero();
    }

    // Declared structural properties.
    bool left_plus_distributive() const { return true; }
    bool left_val_distributive() const { return kind_ != Kind::Disc; }
    bool left_multiplicative() const { return kind_ != Kind::LimAvg; }
    bool conditionally_commutative() const { return kind_ != Kind::LimAvg; }
    bool commutative() const { return true; } // the product is + resp. min throughout

    ConstStrategy const_strategy() const {
        return kind_ == Kind::Disc ? ConstStrategy::FirstWeight : ConstStrategy::EveryWeight;
    }

    // Sample a carrier value (finite range; D2's carrier stays nonnegative).
    Value sample_value(std::mt19937_64& rng, bool allow_zero = true) const {
        if (kind_ == Kind::Boolean) {
            std::uniform_int_distribution<int> d(0, 1);
            return static_cast<Value>(d(rng));
        }
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (allow_zero && u(rng) < 0.05) return zero();
        double lo = kind_ == Kind::Disc ? 0.0 : -8.0;
        std::uniform_real_distribution<double> v(lo, 8.0);
        return v(rng);
    }

private:
    ValuationMonoid(Kind k, double l) : kind_(k), lambda_(l) {}

    Kind kind_;
    double lambda_;
};

// ---------------------------------------------------------------------------
// Law checking
// ---------------------------------------------------------------------------

struct LawCheck {
    std::string law;
    bool declared = false;
    bool violation_found = false;
    std::string counterexample; // set when a violation was found
    bool consistent() const { return declared == !violation_found; }
};

struct LawReport {
    std::string monoid;
    std::vector<LawCheck> checks;
    bool consistent() const {
        for (const auto& c : checks)
            if (!c.consistent()) return false;
        return true;
    }
};

namespace detail {

struct UpSeq {
    std::vector<Value> head, cycle;
};

inline UpSeq sample_up(const ValuationMonoid& m, std::mt19937_64& rng, std::size_t head_max = 4,
                       std::size_t cycle_max = 4, bool allow_zero = true) {
    std::uniform_int_distribution<std::size_t> hl(0, head_max), cl(1, cycle_max);
    UpSeq s;
    s.head.resize(hl(rng));
    s.cycle.resize(cl(rng));
    for (auto& v : s.head) v = m.sample_value(rng, allow_zero);
    for (auto& v : s.cycle) v = m.sample_value(rng, allow_zero);
    return s;
}

inline std::string fmt(Value v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

inline std::string fmt_seq(const UpSeq& s) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < s.head.size(); ++i) out << (i ? "," : "") << s.head[i];
    out << ")(";
    for (std::size_t i = 0; i < s.cycle.size(); ++i) out << (i ? "," : "") << s.cycle[i];
    out << ")^w";
    return out.str();
}

inline bool law_close(Value a, Value b) {
    if (a == b) return true; // covers +-inf
    if (std::isinf(a) || std::isinf(b)) return false;
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= 1e-9 * scale;
}

// Non-ultimately-periodic probe: block k (k >= 1) has length 4^k and constant
// value x (k even) or y (k odd); the partner sequence swaps x and y.  Block
// lengths triple the history, so running averages genuinely oscillate between
// levels depending on the most recent block.  Pointwise, sequence + partner is
// the constant x+y.
struct BlockOscillation {
    Value x, y;
    Value at_block(std::size_t k, bool partner) const {
        bool even = (k % 2 == 0);
        if (partner) even = !even;
        return even ? x : y;
    }
};

// Val of the block sequence under the given monoid.  For liminf-average the
// running average dips to its lowest at the ends of min-value blocks; those
// dips converge geometrically, so the minimum over a late window of block-end
// averages pins the liminf to ~1e-9.  For disc the series converges absolutely
// and a truncation with a negligible tail bound suffices.  For boolean both
// values occur infinitely often.
inline Value block_val(const ValuationMonoid& m, const BlockOscillation& b, bool partner) {
    switch (m.kind()) {
        case ValuationMonoid::Kind::Boolean: {
            Value v = std::min(b.at_block(1, partner), b.at_block(2, partner));
            return v;
        }
        case ValuationMonoid::Kind::LimAvg: {
            double sum = 0, len = 0, best = val_inf;
            double block_len = 4;
            for (std::size_t k = 1; k <= 24; ++k) {
                sum += b.at_block(k, partner) * block_len;
                len += block_len;
                block_len *= 4;
                if (k >= 18) best = std::min(best, sum / len);
            }
            return best;
        }
        case ValuationMonoid::Kind::Disc: {
            double lambda = m.discount();
            std::size_t need =
                static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log(lambda))) + 1;
            Value acc = 0, pow = 1;
            std::size_t pos = 0, k = 1, in_block = 0, block_len = 4;
            while (pos < need) {
                acc += pow * b.at_block(k, partner);
                pow *= lambda;
                ++pos;
                if (++in_block == block_len) {
                    in_block = 0;
                    block_len *= 4;
                    ++k;
                }
            }
            return acc;
        }
    }
    return m.zero();
}

} // namespace detail

// Empirically probes the four structural properties with `trials` random
// instances each and matches the findings against the declared flags.
inline LawReport check_laws(const ValuationMonoid& m, std::size_t trials, std::mt19937_64& rng) {
    using detail::fmt;
    using detail::fmt_seq;
    using detail::law_close;

    LawReport report;
    report.monoid = m.name();

    // left-+-distributivity: d * (a + b) == (d * a) + (d * b)
    {
        LawCheck c{"left-plus-distributive", m.left_plus_distributive(), false, ""};
        for (std::size_t t = 0; t < trials && !c.violation_found; ++t) {
            Value d = m.sample_value(rng), a = m.sample_value(rng), b = m.sample_value(rng);
            Value lhs = m.times(d, m.plus(a, b));
            Value rhs = m.plus(m.times(d, a), m.times(d, b));
            if (!law_close(lhs, rhs)) {
                c.violation_found = true;
                c.counterexample = "d=" + fmt(d) + " a=" + fmt(a) + " b=" + fmt(b) + ": " +
                                   fmt(lhs) + " != " + fmt(rhs);
            }
        }
        report.checks.push_back(c);
    }

    // commutativity of the product: d * e == e * d
    {
        LawCheck c{"commutative", m.commutative(), false, ""};
        for (std::size_t t = 0; t < trials && !c.violation_found; ++t) {
            Value d = m.sample_value(rng), e = m.sample_value(rng);
            Value lhs = m.times(d, e), rhs = m.times(e, d);
            if (!law_close(lhs, rhs)) {
                c.violation_found = true;
                c.counterexample = "d=" + fmt(d) + " e=" + fmt(e) + ": " + fmt(lhs) +
                                   " != " + fmt(rhs);
            }
        }
        report.checks.push_back(c);
    }

    // left-Val-distributivity: d * Val(w_i) == Val(d * w_i)   (d into every entry)
    {
        LawCheck c{"left-val-distributive", m.left_val_distributive(), false, ""};
        for (std::size_t t = 0; t < trials && !c.violation_found; ++t) {
            Value d = m.sample_value(rng, /*allow_zero=*/false);
            auto s = detail::sample_up(m, rng);
            Value lhs = m.times(d, m.val_up(s.head, s.cycle));
            auto sh = s.head, sc = s.cycle;
            for (auto& v : sh) v = m.times(d, v);
            for (auto& v : sc) v = m.times(d, v);
            Value rhs = m.val_up(sh, sc);
            if (!law_close(lhs, rhs)) {
                c.violation_found = true;
                c.counterexample = "d=" + fmt(d) + " w=" + fmt_seq(s) + ": " + fmt(lhs) +
                                   " != " + fmt(rhs);
            }
        }
        report.checks.push_back(c);
    }

    // left-multiplicativity: d * Val(w_1, w_2, ...) == Val(d * w_1, w_2, ...)
    {
        LawCheck c{"left-multiplicative", m.left_multiplicative(), false, ""};
        for (std::size_t t = 0; t < trials && !c.violation_found; ++t) {
            Value d = m.sample_value(rng, /*allow_zero=*/false);
            auto s = detail::sample_up(m, rng);
            Value lhs = m.times(d, m.val_up(s.head, s.cycle));
            // splice d into the first entry, keeping an ultimately periodic shape
            auto sh = s.head;
            auto sc = s.cycle;
            if (sh.empty()) {
                sh.push_back(m.times(d, sc.front()));
                std::rotate(sc.begin(), sc.begin() + 1, sc.end());
            } else {
                sh.front() = m.times(d, sh.front());
            }
            Value rhs = m.val_up(sh, sc);
            if (!law_close(lhs, rhs)) {
                c.violation_found = true;
                c.counterexample = "d=" + fmt(d) + " w=" + fmt_seq(s) + ": " + fmt(lhs) +
                                   " != " + fmt(rhs);
            }
        }
        report.checks.push_back(c);
    }

    // conditional commutativity: whenever all entries of w and v commute under *,
    // Val(w) * Val(v) == Val(w_i * v_i).  Ultimately periodic pairs (aligned
    // shape) plus the block-oscillation battery.
    {
        LawCheck c{"conditionally-commutative", m.conditionally_commutative(), false, ""};
        for (std::size_t t = 0; t < trials && !c.violation_found; ++t) {
            std::uniform_int_distribution<std::size_t> hl(0, 3), cl(1, 4);
            std::size_t hm = hl(rng), cp = cl(rng);
            std::vector<Value> wh(hm), wc(cp), vh(hm), vc(cp);
            for (auto* vec : {&wh, &wc, &vh, &vc})
                for (auto& v : *vec) v = m.sample_value(rng, /*allow_zero=*/false);
            bool commute = true;
            for (Value a : wc)
                for (Value b : vc)
                    if (!law_close(m.times(a, b), m.times(b, a))) commute = false;
            if (!commute) continue;
            Value lhs = m.times(m.val_up(wh, wc), m.val_up(vh, vc));
            std::vector<Value> ph(hm), pc(cp);
            for (std::size_t i = 0; i < hm; ++i) ph[i] = m.times(wh[i], vh[i]);
            for (std::size_t i = 0; i < cp; ++i) pc[i] = m.times(wc[i], vc[i]);
            Value rhs = m.val_up(ph, pc);
            if (!law_close(lhs, rhs)) {
                c.violation_found = true;
                c.counterexample = "w=" + fmt_seq({wh, wc}) + " v=" + fmt_seq({vh, vc}) + ": " +
                                   fmt(lhs) + " != " + fmt(rhs);
            }
        }
        for (std::size_t t = 0; t < 8 && !c.violation_found; ++t) {
            detail::BlockOscillation b{m.sample_value(rng, false), m.sample_value(rng, false)};
            if (m.kind() != ValuationMonoid::Kind::Boolean && std::fabs(b.x - b.y) < 0.5)
                b.y = b.x + 1.0;
            Value va = detail::block_val(m, b, false);
            Value vb = detail::block_val(m, b, true);
            Value lhs = m.times(va, vb);
            Value rhs; // pointwise product is the constant x*y
            {
                Value xy = m.times(b.x, b.y);
                rhs = m.val_up({}, {xy});
            }
            if (std::fabs(lhs - rhs) > 1e-6 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)})) {
                c.violation_found = true;
                c.counterexample = "block oscillation x=" + fmt(b.x) + " y=" + fmt(b.y) +
                                   ": Val(w)*Val(v)=" + fmt(lhs) + " != Val(w*v)=" + fmt(rhs);
            }
        }
        report.checks.push_back(c);
    }

    return report;
}

} // namespace wnwa

#endif // WNWA_VALUATION_MONOID_HH_
