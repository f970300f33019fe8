/* tests-nested-word.cc -- matchings, position classes, steps, lassos */

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hh"
#include "wnwa/nested_word.hh"
#include "wnwa/text_format.hh"

using namespace wnwa;

TEST_CASE("wnwa::nested_word/derive_matching balanced pair") {
    auto m = derive_matching({call("a"), ret("b")});
    REQUIRE(m.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 2}});
    CHECK(m.pending_calls.empty());
    CHECK(m.pending_returns.empty());
}

TEST_CASE("wnwa::nested_word/derive_matching forced pendings") {
    auto m = derive_matching({ret("a"), call("b")});
    CHECK(m.pairs.empty());
    CHECK(m.pending_returns == std::vector<std::size_t>{1});
    CHECK(m.pending_calls == std::vector<std::size_t>{2});
}

TEST_CASE("wnwa::nested_word/pending-call loop satisfies the matching axioms") {
    LassoNestedWord w = parse_lasso_word("| <a");
    auto trunc = w.truncate(100);
    CHECK(trunc.matching.pairs.empty());
    REQUIRE(trunc.matching.pending_calls.size() == 100);
    // axioms checked clause by clause on the first 100 positions
    auto v = validate_matching(trunc.letters, trunc.matching);
    CHECK(v.ok);
    for (std::size_t i = 1; i <= 100; ++i) {
        CHECK(w.classify_position(i).kind == PositionKind::PendingCall);
        CHECK(w.is_step(i)); // pending pairs have no finite return: every position tops out
    }
}

TEST_CASE("wnwa::nested_word/validate_matching rejects each axiom violation") {
    auto letters = parse_finite_word("<a b> <c d>");
    SECTION("derived matching validates") {
        CHECK(validate_matching(letters, derive_matching(letters)).ok);
    }
    SECTION("clause (i): call must precede return") {
        Matching m;
        m.pairs = {{2, 1}, {3, 4}};
        CHECK_FALSE(validate_matching(letters, m).ok);
    }
    SECTION("clause (ii): positions matched at most once") {
        Matching m;
        m.pairs = {{1, 2}, {3, 4}};
        m.pending_calls = {1};
        CHECK_FALSE(validate_matching(letters, m).ok);
    }
    SECTION("clause (iii): crossing pairs") {
        auto crossing = parse_finite_word("<a <b c> d>");
        Matching m;
        m.pairs = {{1, 3}, {2, 4}};
        CHECK_FALSE(validate_matching(crossing, m).ok);
    }
    SECTION("clause (iii): pending return after pending call crosses") {
        auto w = parse_finite_word("<a b>");
        Matching m;
        m.pending_calls = {1};
        m.pending_returns = {2};
        CHECK_FALSE(validate_matching(w, m).ok);
    }
    SECTION("tag consistency") {
        Matching m;
        m.pairs = {{1, 2}, {3, 4}};
        auto wrong = parse_finite_word("a b> <c d>");
        CHECK_FALSE(validate_matching(wrong, m).ok);
    }
    SECTION("completeness: every call classified") {
        Matching m;
        m.pairs = {{1, 2}};
        m.pending_calls = {3}; // leaves return 4 unclassified
        CHECK_FALSE(validate_matching(letters, m).ok);
    }
}

TEST_CASE("wnwa::nested_word/classification on a pending-edge lasso") {
    LassoNestedWord w = parse_lasso_word("a> <b | c");
    CHECK(w.classify_position(1).kind == PositionKind::PendingReturn);
    CHECK(w.classify_position(2).kind == PositionKind::PendingCall);
    for (std::size_t i = 3; i <= 20; ++i)
        CHECK(w.classify_position(i).kind == PositionKind::Internal);
}

TEST_CASE("wnwa::nested_word/matched partners shift per loop copy") {
    LassoNestedWord w = parse_lasso_word("x | <a c b>");
    for (std::size_t copy = 0; copy < 5; ++copy) {
        std::size_t base = 1 + 3 * copy;
        auto c = w.classify_position(base + 1);
        REQUIRE(c.kind == PositionKind::MatchedCall);
        CHECK(c.partner == base + 3);
        auto r = w.classify_position(base + 3);
        REQUIRE(r.kind == PositionKind::MatchedReturn);
        CHECK(r.partner == base + 1);
    }
}

TEST_CASE("wnwa::nested_word/loop must be return-matched") {
    CHECK_THROWS_AS(parse_lasso_word("| b>"), Error);
    CHECK_THROWS_AS(parse_lasso_word("<a | b>"), Error);
    CHECK_THROWS_AS(parse_lasso_word("| <a b> b>"), Error);
    try {
        parse_lasso_word("| b>");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LoopNotReturnMatched);
    }
}

TEST_CASE("wnwa::nested_word/is_step and bracket_free match the scan oracle") {
    const char* words[] = {
        "| <a c b>", "| <a", "a> <b | c", "<a a> | <b c b> d",
        "a> a> | <a <b b> ", "c <a | <x y> z", "| <p <q q> r p> s",
    };
    for (const char* text : words) {
        LassoNestedWord w = parse_lasso_word(text);
        std::size_t horizon = w.prefix_length() + 3 * w.loop_length();
        auto letters = oracles::materialize(w, 3);
        auto m = oracles::match_by_scan(letters);
        for (std::size_t i = 1; i <= horizon; ++i) {
            INFO("word " << text << " position " << i);
            CHECK(w.is_step(i) == oracles::is_step_by_scan(m, i));
            // scan pendings agree with true pendings here: loops are
            // return-matched, so no pair crosses the horizon
            CHECK(w.bracket_free(i) == oracles::is_bracket_free_by_scan(m, i));
        }
        // stability past the prefix
        for (std::size_t i = w.prefix_length() + 1; i + w.loop_length() <= horizon; ++i)
            CHECK(w.is_step(i) == w.is_step(i + w.loop_length()));
    }
}

TEST_CASE("wnwa::nested_word/derived pendings: returns precede calls") {
    std::mt19937_64 rng(20260814);
    std::uniform_int_distribution<int> len(0, 12), tag(0, 2);
    for (int t = 0; t < 1000; ++t) {
        std::vector<TaggedLetter> letters;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            int k = tag(rng);
            letters.push_back(k == 0 ? intl("a") : k == 1 ? call("a") : ret("a"));
        }
        auto m = derive_matching(letters);
        CHECK(validate_matching(letters, m).ok);
        if (!m.pending_returns.empty() && !m.pending_calls.empty()) {
            std::size_t max_ret = *std::max_element(m.pending_returns.begin(),
                                                    m.pending_returns.end());
            std::size_t min_call = *std::min_element(m.pending_calls.begin(),
                                                     m.pending_calls.end());
            CHECK(max_ret < min_call);
        }
    }
}

TEST_CASE("wnwa::nested_word/truncate turns cut pairs into pending calls") {
    LassoNestedWord w = parse_lasso_word("| <a c b>");
    auto t = w.truncate(2);
    REQUIRE(t.letters.size() == 2);
    CHECK(print_finite_word(t.letters) == "<a c");
    CHECK(t.matching.pairs.empty());
    CHECK(t.matching.pending_calls == std::vector<std::size_t>{1});
}

TEST_CASE("wnwa::nested_word/word text round trip") {
    const char* words[] = {"| <a c b>", "a> <b | c", "x y> | <a b>"};
    for (const char* text : words) {
        LassoNestedWord w = parse_lasso_word(text);
        CHECK(parse_lasso_word(print_lasso_word(w)) == w);
    }
    CHECK_THROWS_AS(parse_lasso_word("| <a>"), Error);
    CHECK_THROWS_AS(parse_lasso_word("<a b>"), Error);
    CHECK_THROWS_AS(parse_lasso_word("|"), Error);

    auto m = parse_matching("nu: (1,2) (3,8) pendingcall: 5 7 pendingret: 1");
    CHECK(m.pairs.size() == 2);
    CHECK(m.pending_calls == std::vector<std::size_t>{5, 7});
    CHECK(m.pending_returns == std::vector<std::size_t>{1});
    CHECK(parse_matching(print_matching(m)).pairs == m.pairs);
}
