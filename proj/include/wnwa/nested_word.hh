/* nested_word.hh -- tagged letters, matching relations, finite and lasso nested words
 *
 * Positions are 1-based.  A matching relates call positions to return positions;
 * calls without a partner are pending calls (partner at +infinity), returns without
 * a partner are pending returns (partner at -infinity).  Lasso words present an
 * infinite nested word as prefix . loop^omega; the loop must be return-matched
 * (no return inside the loop reaches across a copy boundary), which keeps every
 * cross-copy interaction trivial and configurations at copy boundaries finite.
 */

#ifndef WNWA_NESTED_WORD_HH_
#define WNWA_NESTED_WORD_HH_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hh"

namespace wnwa {

enum class Tag : uint8_t { Internal, Call, Return };

inline const char* tag_name(Tag t) {
    switch (t) {
        case Tag::Internal: return "internal";
        case Tag::Call: return "call";
        case Tag::Return: return "return";
    }
    return "?";
}

// One position of a word: base symbol, bracket tag, and (for encoded alphabets
// Sigma_V) one bit per variable of the owning word's variable list.
struct TaggedLetter {
    std::string symbol;
    Tag tag = Tag::Internal;
    uint64_t bits = 0;

    bool operator==(const TaggedLetter& o) const {
        return symbol == o.symbol && tag == o.tag && bits == o.bits;
    }
};

// Explicit matching for a finite word (also the import/export format for
// external matchings).  Pairs are (call, return); pendings are positions.
struct Matching {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> pending_calls;
    std::vector<std::size_t> pending_returns;
};

struct ValidationResult {
    bool ok = true;
    std::string violation; // human-readable clause description when !ok
};

enum class PositionKind : uint8_t {
    Internal,
    MatchedCall,
    PendingCall,
    MatchedReturn,
    PendingReturn,
};

struct PositionClass {
    PositionKind kind = PositionKind::Internal;
    std::size_t partner = 0; // matched partner position; 0 when none/at infinity
};

// Canonical (maximal) matching of a finite tag sequence: a return always pops
// the most recent still-open call; a return with no open call is pending.
inline Matching derive_matching(const std::vector<TaggedLetter>& letters) {
    Matching m;
    std::vector<std::size_t> stack;
    for (std::size_t i = 1; i <= letters.size(); ++i) {
        switch (letters[i - 1].tag) {
            case Tag::Call: stack.push_back(i); break;
            case Tag::Return:
                if (stack.empty()) {
                    m.pending_returns.push_back(i);
                } else {
                    m.pairs.emplace_back(stack.back(), i);
                    stack.pop_back();
                }
                break;
            case Tag::Internal: break;
        }
    }
    m.pending_calls = stack;
    std::sort(m.pairs.begin(), m.pairs.end());
    return m;
}

// Checks the matching axioms plus tag consistency against an explicit matching.
// (i) calls precede returns, (ii) each position matched at most once,
// (iii) no crossing (pendings act as partners at -inf / +inf), and every
// call/return position must be classified; internals must not appear.
inline ValidationResult validate_matching(const std::vector<TaggedLetter>& letters,
                                          const Matching& m) {
    const std::size_t n = letters.size();
    auto fail = [](std::string why) { return ValidationResult{false, std::move(why)}; };
    auto in_range = [&](std::size_t p) { return p >= 1 && p <= n; };

    std::vector<int> call_role(n + 1, 0), ret_role(n + 1, 0);
    for (auto [i, j] : m.pairs) {
        if (!in_range(i) || !in_range(j)) return fail("pair position out of range");
        if (i >= j) return fail("clause (i): pair (" + std::to_string(i) + "," +
                                std::to_string(j) + ") needs call < return");
        if (++call_role[i] > 1) return fail("clause (ii): position " + std::to_string(i) +
                                            " used as call twice");
        if (++ret_role[j] > 1) return fail("clause (ii): position " + std::to_string(j) +
                                           " used as return twice");
    }
    for (std::size_t p : m.pending_calls) {
        if (!in_range(p)) return fail("pending call out of range");
        if (++call_role[p] > 1) return fail("clause (ii): position " + std::to_string(p) +
                                            " used as call twice");
    }
    for (std::size_t p : m.pending_returns) {
        if (!in_range(p)) return fail("pending return out of range");
        if (++ret_role[p] > 1) return fail("clause (ii): position " + std::to_string(p) +
                                           " used as return twice");
    }
    // tag consistency and completeness
    for (std::size_t p = 1; p <= n; ++p) {
        Tag t = letters[p - 1].tag;
        if (call_role[p] && t != Tag::Call)
            return fail("position " + std::to_string(p) + " matched as call but tagged " +
                        tag_name(t));
        if (ret_role[p] && t != Tag::Return)
            return fail("position " + std::to_string(p) + " matched as return but tagged " +
                        tag_name(t));
        if (t == Tag::Call && !call_role[p])
            return fail("call position " + std::to_string(p) + " unclassified");
        if (t == Tag::Return && !ret_role[p])
            return fail("return position " + std::to_string(p) + " unclassified");
    }
    // clause (iii): no crossing, with pendings as (-inf, j) / (i, +inf).
    // Encode each edge as (lo, hi); lo = 0 for pending returns, hi = n+1 for
    // pending calls, and compare pairwise (word sizes here are test scale).
    std::vector<std::pair<long long, long long>> edges;
    for (auto [i, j] : m.pairs) edges.emplace_back((long long)i, (long long)j);
    for (std::size_t p : m.pending_calls) edges.emplace_back((long long)p, (long long)n + 1);
    for (std::size_t p : m.pending_returns) edges.emplace_back(0LL, (long long)p);
    for (std::size_t a = 0; a < edges.size(); ++a) {
        for (std::size_t b = 0; b < edges.size(); ++b) {
            auto [i1, j1] = edges[a];
            auto [i2, j2] = edges[b];
            if (i1 < i2 && i2 <= j1 && j1 < j2)
                return fail("clause (iii): edges cross");
        }
    }
    return ValidationResult{};
}

// Finite nested word: letters plus an (explicit, validated) matching.
struct FiniteNestedWord {
    std::vector<TaggedLetter> letters;
    Matching matching;
};

// Ultimately periodic nested word  prefix . loop^omega  with the canonical
// derived matching.  Construction rejects loops that are not return-matched.
class LassoNestedWord {
public:
    LassoNestedWord() = default;

    LassoNestedWord(std::vector<TaggedLetter> prefix, std::vector<TaggedLetter> loop,
                    std::vector<std::string> variables = {})
        : prefix_(std::move(prefix)), loop_(std::move(loop)), variables_(std::move(variables)) {
        if (loop_.empty())
            throw Error(ErrorKind::InvalidMatching, "lasso loop must be nonempty");
        derive();
    }

    const std::vector<TaggedLetter>& prefix() const { return prefix_; }
    const std::vector<TaggedLetter>& loop() const { return loop_; }
    const std::vector<std::string>& variables() const { return variables_; }
    std::size_t prefix_length() const { return prefix_.size(); }
    std::size_t loop_length() const { return loop_.size(); }

    const TaggedLetter& letter(std::size_t i) const {
        if (i == 0) throw Error(ErrorKind::InvalidMatching, "positions are 1-based");
        if (i <= prefix_.size()) return prefix_[i - 1];
        return loop_[(i - prefix_.size() - 1) % loop_.size()];
    }

    // 1-based loop offset of an absolute position beyond the prefix.
    std::size_t loop_offset(std::size_t i) const {
        return (i - prefix_.size() - 1) % loop_.size() + 1;
    }

    PositionClass classify_position(std::size_t i) const {
        if (i == 0) throw Error(ErrorKind::InvalidMatching, "positions are 1-based");
        if (i <= prefix_.size()) return prefix_class_[i - 1];
        std::size_t t = loop_offset(i);
        PositionClass c = loop_class_[t - 1];
        if (c.partner != 0) c.partner += i - t; // shift same-copy partner to this copy
        return c;
    }

    // Step (top-level) position: no matched pair (j,k) with j <= i < k.
    // Matched depth right after each position decides it; classification is
    // periodic with the loop immediately past the prefix.
    bool is_step(std::size_t i) const {
        if (i == 0) throw Error(ErrorKind::InvalidMatching, "positions are 1-based");
        if (i <= prefix_.size()) return prefix_depth_after_[i - 1] == 0;
        return loop_depth_after_[loop_offset(i) - 1] == 0;
    }

    // All is_step / classify_position values repeat with the loop for i beyond
    // this index.
    std::size_t stabilization_index() const { return prefix_.size(); }

    // Bracket-free position: no matched pair strictly around i, no pending call
    // strictly before i, no pending return strictly after i.
    bool bracket_free(std::size_t i) const {
        if (i == 0) throw Error(ErrorKind::InvalidMatching, "positions are 1-based");
        if (first_pending_call_ != 0 && first_pending_call_ < i) return false;
        if (!prefix_pending_returns_.empty() && prefix_pending_returns_.back() > i) return false;
        if (i <= prefix_.size()) {
            for (auto [j, k] : prefix_pairs_)
                if (j < i && i < k) return false;
            return true;
        }
        std::size_t t = loop_offset(i);
        for (auto [s, u] : loop_pairs_)
            if (s < t && t < u) return false;
        return true;
    }

    // prefix + copies full loop copies with the induced (truncated) matching.
    FiniteNestedWord truncate(std::size_t n) const {
        FiniteNestedWord w;
        w.letters.reserve(n);
        for (std::size_t i = 1; i <= n; ++i) w.letters.push_back(letter(i));
        for (std::size_t i = 1; i <= n; ++i) {
            PositionClass c = classify_position(i);
            switch (c.kind) {
                case PositionKind::MatchedCall:
                    if (c.partner <= n) w.matching.pairs.emplace_back(i, c.partner);
                    else w.matching.pending_calls.push_back(i);
                    break;
                case PositionKind::PendingCall: w.matching.pending_calls.push_back(i); break;
                case PositionKind::MatchedReturn:
                    break; // recorded from the call side
                case PositionKind::PendingReturn: w.matching.pending_returns.push_back(i); break;
                case PositionKind::Internal: break;
            }
        }
        return w;
    }

    // Structure shared by the automaton engines: matching data in prefix/loop
    // coordinates.
    const std::vector<std::pair<std::size_t, std::size_t>>& prefix_pairs() const {
        return prefix_pairs_;
    }
    const std::vector<std::size_t>& prefix_pending_calls() const { return prefix_pending_calls_; }
    const std::vector<std::size_t>& prefix_pending_returns() const {
        return prefix_pending_returns_;
    }
    const std::vector<std::pair<std::size_t, std::size_t>>& loop_pairs() const {
        return loop_pairs_;
    }
    const std::vector<std::size_t>& loop_pending_calls() const { return loop_pending_calls_; }

    bool operator==(const LassoNestedWord& o) const {
        return prefix_ == o.prefix_ && loop_ == o.loop_ && variables_ == o.variables_;
    }

private:
    void derive() {
        // loop: return-matched check + same-copy matching
        {
            std::vector<std::size_t> stack;
            for (std::size_t t = 1; t <= loop_.size(); ++t) {
                switch (loop_[t - 1].tag) {
                    case Tag::Call: stack.push_back(t); break;
                    case Tag::Return:
                        if (stack.empty())
                            throw Error(ErrorKind::LoopNotReturnMatched,
                                        "loop offset " + std::to_string(t) +
                                            " is a return with no in-copy call");
                        loop_pairs_.emplace_back(stack.back(), t);
                        stack.pop_back();
                        break;
                    case Tag::Internal: break;
                }
            }
            loop_pending_calls_ = stack;
            std::sort(loop_pairs_.begin(), loop_pairs_.end());
        }
        // prefix matching
        {
            std::vector<std::size_t> stack;
            for (std::size_t i = 1; i <= prefix_.size(); ++i) {
                switch (prefix_[i - 1].tag) {
                    case Tag::Call: stack.push_back(i); break;
                    case Tag::Return:
                        if (stack.empty()) prefix_pending_returns_.push_back(i);
                        else {
                            prefix_pairs_.emplace_back(stack.back(), i);
                            stack.pop_back();
                        }
                        break;
                    case Tag::Internal: break;
                }
            }
            prefix_pending_calls_ = stack;
            std::sort(prefix_pairs_.begin(), prefix_pairs_.end());
        }
        first_pending_call_ = 0;
        if (!prefix_pending_calls_.empty()) first_pending_call_ = prefix_pending_calls_.front();
        else if (!loop_pending_calls_.empty())
            first_pending_call_ = prefix_.size() + loop_pending_calls_.front();

        // per-position class tables and matched-depth profiles
        prefix_class_.assign(prefix_.size(), PositionClass{});
        prefix_depth_after_.assign(prefix_.size(), 0);
        {
            std::unordered_map<std::size_t, std::size_t> call_of, ret_of;
            for (auto [j, k] : prefix_pairs_) { call_of[j] = k; ret_of[k] = j; }
            std::vector<bool> pend_call(prefix_.size() + 1, false), pend_ret(prefix_.size() + 1, false);
            for (std::size_t p : prefix_pending_calls_) pend_call[p] = true;
            for (std::size_t p : prefix_pending_returns_) pend_ret[p] = true;
            int depth = 0;
            for (std::size_t i = 1; i <= prefix_.size(); ++i) {
                PositionClass c;
                if (auto it = call_of.find(i); it != call_of.end()) {
                    c = {PositionKind::MatchedCall, it->second};
                    ++depth;
                } else if (auto it2 = ret_of.find(i); it2 != ret_of.end()) {
                    c = {PositionKind::MatchedReturn, it2->second};
                    --depth;
                } else if (pend_call[i]) c = {PositionKind::PendingCall, 0};
                else if (pend_ret[i]) c = {PositionKind::PendingReturn, 0};
                prefix_class_[i - 1] = c;
                prefix_depth_after_[i - 1] = depth;
            }
        }
        loop_class_.assign(loop_.size(), PositionClass{});
        loop_depth_after_.assign(loop_.size(), 0);
        {
            std::unordered_map<std::size_t, std::size_t> call_of, ret_of;
            for (auto [s, u] : loop_pairs_) { call_of[s] = u; ret_of[u] = s; }
            std::vector<bool> pend_call(loop_.size() + 1, false);
            for (std::size_t p : loop_pending_calls_) pend_call[p] = true;
            int depth = 0;
            for (std::size_t t = 1; t <= loop_.size(); ++t) {
                PositionClass c;
                if (auto it = call_of.find(t); it != call_of.end()) {
                    c = {PositionKind::MatchedCall, it->second};
                    ++depth;
                } else if (auto it2 = ret_of.find(t); it2 != ret_of.end()) {
                    c = {PositionKind::MatchedReturn, it2->second};
                    --depth;
                } else if (pend_call[t]) c = {PositionKind::PendingCall, 0};
                loop_class_[t - 1] = c;
                loop_depth_after_[t - 1] = depth;
            }
        }
    }

    std::vector<TaggedLetter> prefix_, loop_;
    std::vector<std::string> variables_;
    std::vector<std::pair<std::size_t, std::size_t>> prefix_pairs_, loop_pairs_;
    std::vector<std::size_t> prefix_pending_calls_, prefix_pending_returns_, loop_pending_calls_;
    std::vector<PositionClass> prefix_class_, loop_class_;
    std::vector<int> prefix_depth_after_, loop_depth_after_;
    std::size_t first_pending_call_ = 0;
};

// Convenience constructors used all over the tests and fixtures.
inline TaggedLetter intl(std::string s, uint64_t bits = 0) {
    return TaggedLetter{std::move(s), Tag::Internal, bits};
}
inline TaggedLetter call(std::string s, uint64_t bits = 0) {
    return TaggedLetter{std::move(s), Tag::Call, bits};
}
inline TaggedLetter ret(std::string s, uint64_t bits = 0) {
    return TaggedLetter{std::move(s), Tag::Return, bits};
}

} // namespace wnwa

#endif // WNWA_NESTED_WORD_HH_
