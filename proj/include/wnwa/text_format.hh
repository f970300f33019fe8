/* text_format.hh -- parsing and printing of words, matchings, and values
 *
 * Word tokens are whitespace separated: `a` internal, `<a` call, `a>` return.
 * A single `|` splits prefix from loop in lasso words.  Explicit matchings
 * read as `nu: (1,2) (3,4) pendingcall: 5 pendingret: 1` (sections optional,
 * any order after `nu:`).
 */

#ifndef WNWA_TEXT_FORMAT_HH_
#define WNWA_TEXT_FORMAT_HH_

#include <cctype>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "error.hh"
#include "nested_word.hh"

namespace wnwa {

inline TaggedLetter parse_letter_token(const std::string& tok) {
    bool is_call = tok.size() > 1 && tok.front() == '<';
    bool is_ret = tok.size() > 1 && tok.back() == '>';
    if (is_call && is_ret)
        throw Error(ErrorKind::ParseError, "ambiguous letter token '" + tok + "'");
    std::string sym = tok;
    Tag tag = Tag::Internal;
    if (is_call) {
        sym = tok.substr(1);
        tag = Tag::Call;
    } else if (is_ret) {
        sym = tok.substr(0, tok.size() - 1);
        tag = Tag::Return;
    }
    if (sym.empty()) throw Error(ErrorKind::ParseError, "empty symbol in token '" + tok + "'");
    for (char c : sym)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            throw Error(ErrorKind::ParseError, "bad character in symbol '" + sym + "'");
    return TaggedLetter{sym, tag, 0};
}

inline std::string print_letter(const TaggedLetter& l) {
    switch (l.tag) {
        case Tag::Call: return "<" + l.symbol;
        case Tag::Return: return l.symbol + ">";
        case Tag::Internal: return l.symbol;
    }
    return l.symbol;
}

inline std::vector<TaggedLetter> parse_finite_word(const std::string& text) {
    std::istringstream in(text);
    std::vector<TaggedLetter> out;
    std::string tok;
    while (in >> tok) {
        if (tok == "|")
            throw Error(ErrorKind::ParseError, "unexpected '|' in finite word");
        out.push_back(parse_letter_token(tok));
    }
    return out;
}

inline LassoNestedWord parse_lasso_word(const std::string& text) {
    std::istringstream in(text);
    std::vector<TaggedLetter> prefix, loop;
    bool seen_bar = false;
    std::string tok;
    while (in >> tok) {
        if (tok == "|") {
            if (seen_bar) throw Error(ErrorKind::ParseError, "more than one '|' in lasso word");
            seen_bar = true;
            continue;
        }
        (seen_bar ? loop : prefix).push_back(parse_letter_token(tok));
    }
    if (!seen_bar)
        throw Error(ErrorKind::ParseError, "lasso word needs a '|' between prefix and loop");
    if (loop.empty()) throw Error(ErrorKind::ParseError, "lasso word needs a nonempty loop");
    return LassoNestedWord(std::move(prefix), std::move(loop));
}

inline std::string print_finite_word(const std::vector<TaggedLetter>& letters) {
    std::string out;
    for (std::size_t i = 0; i < letters.size(); ++i) {
        if (i) out += ' ';
        out += print_letter(letters[i]);
    }
    return out;
}

inline std::string print_lasso_word(const LassoNestedWord& w) {
    std::string out = print_finite_word(w.prefix());
    if (!out.empty()) out += ' ';
    out += "|";
    for (const auto& l : w.loop()) out += ' ' + print_letter(l);
    return out;
}

// `nu: (1,2) (3,4) pendingcall: 5 7 pendingret: 1`
inline Matching parse_matching(const std::string& text) {
    std::istringstream in(text);
    Matching m;
    std::string tok;
    enum class Section { None, Pairs, PendCall, PendRet } section = Section::None;
    while (in >> tok) {
        if (tok == "nu:") {
            section = Section::Pairs;
            continue;
        }
        if (tok == "pendingcall:") {
            section = Section::PendCall;
            continue;
        }
        if (tok == "pendingret:") {
            section = Section::PendRet;
            continue;
        }
        switch (section) {
            case Section::None:
                throw Error(ErrorKind::ParseError, "matching must start with a section header");
            case Section::Pairs: {
                std::size_t i = 0, j = 0;
                if (std::sscanf(tok.c_str(), "(%zu,%zu)", &i, &j) != 2)
                    throw Error(ErrorKind::ParseError, "bad pair token '" + tok + "'");
                m.pairs.emplace_back(i, j);
                break;
            }
            case Section::PendCall:
            case Section::PendRet: {
                std::size_t p = 0;
                try {
                    std::size_t used = 0;
                    p = std::stoul(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::ParseError, "bad position token '" + tok + "'");
                }
                (section == Section::PendCall ? m.pending_calls : m.pending_returns).push_back(p);
                break;
            }
        }
    }
    return m;
}

inline std::string print_matching(const Matching& m) {
    std::ostringstream out;
    out << "nu:";
    for (auto [i, j] : m.pairs) out << " (" << i << "," << j << ")";
    if (!m.pending_calls.empty()) {
        out << " pendingcall:";
        for (auto p : m.pending_calls) out << " " << p;
    }
    if (!m.pending_returns.empty()) {
        out << " pendingret:";
        for (auto p : m.pending_returns) out << " " << p;
    }
    return out.str();
}

// CLI value rendering: six significant digits, infinities spelled out.
inline std::string format_value(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace wnwa

#endif // WNWA_TEXT_FORMAT_HH_
