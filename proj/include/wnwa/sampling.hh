/* sampling.hh -- seeded random generators for lasso words and automata */

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wnwa/error.hh"
#include "wnwa/nested_word.hh"
#include "wnwa/weighted_nwa.hh"

namespace wnwa {

namespace detail {

// Deterministic helpers on top of mt19937_64 (std::uniform_int_distribution
// is implementation-defined, so roll our own to keep seeds portable).
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline bool chance(std::mt19937_64& rng, double p) {
    return (rng() >> 11) * 0x1.0p-53 < p;
}

} // namespace detail

// ------------------------------------------------------------------ words

struct LassoParams {
    std::vector<std::string> symbols = {"a", "b", "c"};
    std::vector<std::string> variables = {};
    std::size_t max_prefix = 4;
    std::size_t min_loop = 1;
    std::size_t max_loop = 6;
    double call_prob = 0.3;   // chance of opening a call at a position
    double ret_prob = 0.5;    // chance of closing when a call is open
    double pend_ret_prob = 0.2; // chance of a pending return at prefix depth 0
    bool well_matched_only = false;
    std::size_t max_retries = 64;
};

// Builds a random lasso word. A loop is always return-matched; pending
// returns sit at the front of the prefix (before any unmatched call), so
// every sample satisfies the nesting invariants by construction. The
// rejection loop is a safety net only.
inline LassoNestedWord sample_lasso(const LassoParams& p, std::uint64_t seed) {
    if (p.symbols.empty() || p.min_loop == 0 || p.max_loop < p.min_loop)
        throw Error(ErrorKind::GenerationExhausted,
                    "sample_lasso: unsatisfiable parameters");
    std::mt19937_64 rng(seed);
    std::size_t bits_n = std::size_t{1} << p.variables.size();
    auto symbol = [&] { return p.symbols[detail::pick(rng, p.symbols.size())]; };
    auto bits = [&] {
        return p.variables.empty()
                   ? std::uint64_t{0}
                   : static_cast<std::uint64_t>(detail::pick(rng, bits_n));
    };
    for (std::size_t attempt = 0; attempt < p.max_retries; ++attempt) {
        std::vector<TaggedLetter> prefix;
        std::size_t np = detail::pick(rng, p.max_prefix + 1);
        std::size_t depth = 0;
        bool had_call = false;
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t remaining = np - i;
            if (p.well_matched_only && remaining == depth) {
                prefix.push_back(ret(symbol(), bits()));
                --depth;
                continue;
            }
            if (!p.well_matched_only && depth == 0 && !had_call &&
                detail::chance(rng, p.pend_ret_prob)) {
                prefix.push_back(ret(symbol(), bits())); // pending return
                continue;
            }
            if (depth > 0 && detail::chance(rng, p.ret_prob)) {
                prefix.push_back(ret(symbol(), bits()));
                --depth;
                continue;
            }
            bool may_call = !p.well_matched_only || remaining > depth + 1;
            if (may_call && detail::chance(rng, p.call_prob)) {
                prefix.push_back(call(symbol(), bits()));
                ++depth;
                had_call = true;
                continue;
            }
            prefix.push_back(intl(symbol(), bits()));
        }
        // Unclosed prefix calls stay pending forever (the loop is
        // return-matched, so nothing later can answer them).
        if (p.well_matched_only && depth != 0)
            continue;

        std::vector<TaggedLetter> loop;
        std::size_t nl = p.min_loop + detail::pick(rng, p.max_loop - p.min_loop + 1);
        std::size_t ldepth = 0;
        for (std::size_t i = 0; i < nl; ++i) {
            std::size_t remaining = nl - i;
            if (p.well_matched_only && remaining == ldepth) {
                loop.push_back(ret(symbol(), bits()));
                --ldepth;
                continue;
            }
            if (ldepth > 0 && detail::chance(rng, p.ret_prob)) {
                loop.push_back(ret(symbol(), bits()));
                --ldepth;
                continue;
            }
            bool may_call = !p.well_matched_only || remaining > ldepth + 1;
            if (may_call && detail::chance(rng, p.call_prob)) {
                loop.push_back(call(symbol(), bits()));
                ++ldepth;
                continue;
            }
            loop.push_back(intl(symbol(), bits()));
        }
        if (p.well_matched_only && ldepth != 0)
            continue;
        try {
            LassoNestedWord w(prefix, loop, p.variables);
            if (p.well_matched_only &&
                (!w.prefix_pending_calls().empty() ||
                 !w.prefix_pending_returns().empty() ||
                 !w.loop_pending_calls().empty()))
                continue;
            return w;
        } catch (const Error&) {
            continue; // safety net; construction above should always be valid
        }
    }
    throw Error(ErrorKind::GenerationExhausted,
                "sample_lasso: no valid word after bounded retries");
}

// -------------------------------------------------------------- automata

struct AutomatonParams {
    std::vector<std::string> symbols = {"a", "b"};
    std::size_t states = 3;
    double density = 0.85;     // chance a (state, letter) bucket is inhabited
    double branch_prob = 0.25; // chance of a second target per bucket
    std::size_t accept_sets = 2;
    bool deterministic = false;
    std::vector<Value> weight_pool = {0.0, 0.5, 1.0, -1.0, 2.0};
};

// Builds a random weighted automaton over the given monoid. Deterministic
// automata get exactly one target per bucket and a single initial state;
// nondeterministic ones get sparse buckets with occasional branching.
inline WeightedNwa sample_weighted_nwa(const AutomatonParams& p,
                                       const ValuationMonoid& m,
                                       std::uint64_t seed) {
    if (p.states == 0 || p.symbols.empty() || p.accept_sets == 0)
        throw Error(ErrorKind::GenerationExhausted,
                    "sample_weighted_nwa: unsatisfiable parameters");
    std::mt19937_64 rng(seed);
    WeightedNwaBuilder b;
    b.alphabet.symbols = p.symbols;
    b.states = p.states;
    for (std::size_t q = 0; q < p.states; ++q)
        b.state_names.push_back("q" + std::to_string(q));
    auto any_state = [&] { return static_cast<StateId>(detail::pick(rng, p.states)); };
    auto weight = [&]() -> Value {
        if (m.kind() == ValuationMonoid::Kind::Boolean) return m.one();
        return p.weight_pool[detail::pick(rng, p.weight_pool.size())];
    };
    auto targets = [&](auto&& add) {
        if (p.deterministic || detail::chance(rng, p.density)) {
            add(any_state());
            if (!p.deterministic && detail::chance(rng, p.branch_prob))
                add(any_state());
        }
    };
    auto n_states = static_cast<StateId>(p.states);
    for (StateId q = 0; q < n_states; ++q) {
        for (const auto& s : p.symbols) {
            targets([&](StateId to) { b.add_int(q, s, to, weight()); });
            targets([&](StateId to) { b.add_call(q, s, to, weight()); });
            for (StateId h = 0; h < n_states; ++h)
                targets([&](StateId to) { b.add_ret(q, h, s, to, weight()); });
        }
    }
    b.initial.push_back(p.deterministic ? 0 : any_state());
    if (!p.deterministic && detail::chance(rng, 0.3)) {
        StateId extra = any_state();
        if (extra != b.initial[0]) b.initial.push_back(extra);
    }
    normalize_set(b.initial);
    for (std::size_t i = 0; i < p.accept_sets; ++i) {
        StateSet set;
        for (StateId q = 0; q < n_states; ++q)
            if (detail::chance(rng, 0.5)) set.push_back(q);
        if (set.empty()) set.push_back(any_state());
        normalize_set(set);
        b.accept_sets.push_back(std::move(set));
    }
    return b.build(m);
}

} // namespace wnwa
