/* tests-semantics.cc -- assignments, encodings, definitional evaluation */

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hh"
#include "wnwa/boolean_compile.hh"
#include "wnwa/examples.hh"
#include "wnwa/sampling.hh"
#include "wnwa/semantics.hh"
#include "wnwa/text_format.hh"
#include "wnwa/weighted_nwa.hh"

using namespace wnwa;

namespace {

LassoNestedWord wz(const std::string& text) { return parse_lasso_word(text); }

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error to be thrown");
    return ErrorKind::ParseError; // unreachable
}

Assignment fo(std::initializer_list<std::pair<std::string, std::size_t>> xs) {
    Assignment a;
    for (const auto& [v, i] : xs) a.first_order[v] = i;
    return a;
}

const ValuationMonoid& boolean() {
    static ValuationMonoid m = ValuationMonoid::boolean();
    return m;
}

const ValuationMonoid& limavg() {
    static ValuationMonoid m = ValuationMonoid::limavg();
    return m;
}

bool holds(const FPtr& f, const LassoNestedWord& w, const Assignment& asg) {
    Value v = definitional_value(f, boolean(), w, asg);
    REQUIRE((v == 0.0 || v == 1.0));
    return v == 1.0;
}

} // namespace

TEST_CASE("assignment encoding round trip") {
    LassoNestedWord w = wz("a b | <a c b>");
    Assignment asg;
    asg.first_order["x"] = 2;
    asg.second_order["X"] = PeriodicSet{{1}, {2}, 1};

    AssignmentEncoding enc = encode_assignment(w, {"x", "X"}, asg);
    const LassoNestedWord& e = enc.encoded;
    REQUIRE(e.prefix_length() == 2);
    REQUIRE(e.loop_length() == 3);
    REQUIRE(e.variables() == std::vector<std::string>{"x", "X"});
    // bit 0 = x, bit 1 = X
    CHECK(e.letter(1).bits == 2);
    CHECK(e.letter(2).bits == 1);
    CHECK(e.loop()[0].bits == 0);
    CHECK(e.loop()[1].bits == 2);
    CHECK(e.loop()[2].bits == 0);
    for (std::size_t i = 1; i <= 8; ++i) {
        CHECK(e.letter(i).symbol == w.letter(i).symbol);
        CHECK(e.letter(i).tag == w.letter(i).tag);
    }
    // matching unchanged
    REQUIRE(e.loop_pairs() == w.loop_pairs());
    for (std::size_t i = 1; i <= 8; ++i) {
        CHECK(e.classify_position(i).kind == w.classify_position(i).kind);
        CHECK(e.is_step(i) == w.is_step(i));
    }

    auto back = decode_assignment(e);
    REQUIRE(back.has_value());
    CHECK(back->first_order.at("x") == 2);
    CHECK(back->second_order.at("X").prefix_positions == std::vector<std::size_t>{1});
    CHECK(back->second_order.at("X").loop_offsets == std::vector<std::size_t>{2});

    // dropping the x row leaves exactly the X encoding
    LassoNestedWord dropped = project_assignment(e, "x");
    Assignment only_x2;
    only_x2.second_order["X"] = asg.second_order["X"];
    CHECK(dropped == encode_assignment(w, {"X"}, only_x2).encoded);
}

TEST_CASE("first-order positions unroll the prefix") {
    LassoNestedWord w = wz("a b | <a c b>");
    AssignmentEncoding enc = encode_assignment(w, {"x"}, fo({{"x", 7}}));
    const LassoNestedWord& e = enc.encoded;
    REQUIRE(e.prefix_length() == 8);
    REQUIRE(e.loop_length() == 3);
    for (std::size_t i = 1; i <= 14; ++i) {
        CHECK(e.letter(i).symbol == w.letter(i).symbol);
        CHECK((e.letter(i).bits != 0) == (i == 7));
    }
    auto back = decode_assignment(e);
    REQUIRE(back.has_value());
    CHECK(back->first_order.at("x") == 7);
}

TEST_CASE("period multiples re-roll the loop") {
    LassoNestedWord w = wz("a | b c");
    Assignment asg;
    asg.second_order["X"] = PeriodicSet{{}, {1, 4}, 2};
    LassoNestedWord e = encode_assignment(w, {"X"}, asg).encoded;
    REQUIRE(e.loop_length() == 4);
    std::vector<int> marks;
    for (std::size_t i = 2; i <= 13; ++i) marks.push_back(e.letter(i).bits ? 1 : 0);
    CHECK(marks == std::vector<int>{1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1});
}

TEST_CASE("bad assignments are rejected") {
    LassoNestedWord w = wz("a b | <a c b>");
    CHECK(kind_of([&] { encode_assignment(w, {"x"}, Assignment{}); }) ==
          ErrorKind::InvalidAssignment);
    CHECK(kind_of([&] { encode_assignment(w, {"x"}, fo({{"x", 0}})); }) ==
          ErrorKind::InvalidAssignment);
    CHECK(kind_of([&] { encode_assignment(w, {"x", "x"}, fo({{"x", 1}})); }) ==
          ErrorKind::InvalidAssignment);
    Assignment bad_prefix;
    bad_prefix.second_order["X"] = PeriodicSet{{3}, {}, 1}; // 3 is past the prefix
    CHECK(kind_of([&] { encode_assignment(w, {"X"}, bad_prefix); }) ==
          ErrorKind::InvalidAssignment);
    Assignment bad_offset;
    bad_offset.second_order["X"] = PeriodicSet{{}, {4}, 1}; // loop has 3 offsets
    CHECK(kind_of([&] { encode_assignment(w, {"X"}, bad_offset); }) ==
          ErrorKind::InvalidAssignment);
    LassoNestedWord enc = encode_assignment(w, {"x"}, fo({{"x", 1}})).encoded;
    CHECK(kind_of([&] { encode_assignment(enc, {"y"}, fo({{"y", 1}})); }) ==
          ErrorKind::InvalidAssignment);
    CHECK(kind_of([&] { project_assignment(w, "x"); }) == ErrorKind::InvalidAssignment);
}

TEST_CASE("alphabet projection relabels and keeps the matching") {
    LassoNestedWord w = wz("a b | <a c b>");
    LassoNestedWord p = project_alphabet(w, {{"a", "c"}, {"b", "c"}, {"c", "c"}});
    for (std::size_t i = 1; i <= 8; ++i) {
        CHECK(p.letter(i).symbol == "c");
        CHECK(p.letter(i).tag == w.letter(i).tag);
        CHECK(p.classify_position(i).kind == w.classify_position(i).kind);
    }
    CHECK(kind_of([&] { project_alphabet(w, {{"a", "c"}}); }) == ErrorKind::AlphabetMismatch);
}

TEST_CASE("invalid encodings evaluate to zero") {
    using Letters = std::vector<TaggedLetter>;
    // two marks on the x row
    LassoNestedWord two(Letters{intl("a", 1), intl("a", 1)}, Letters{intl("b", 0)}, {"x"});
    // no mark at all
    LassoNestedWord none(Letters{intl("a", 0)}, Letters{intl("b", 0)}, {"x"});
    // a mark inside the loop marks infinitely many positions
    LassoNestedWord looped(Letters{}, Letters{intl("a", 1)}, {"x"});
    FPtr five = f_const(5.0);
    FPtr atom = f_label("a", "x");
    for (const auto& w : {two, none, looped}) {
        CHECK(decode_assignment(w) == std::nullopt);
        CHECK(definitional_value_encoded(five, limavg(), w) == limavg().zero());
        CHECK(definitional_value_encoded(atom, boolean(), w) == 0.0);
    }
    LassoNestedWord good(Letters{intl("a", 1)}, Letters{intl("b", 0)}, {"x"});
    CHECK(definitional_value_encoded(five, limavg(), good) == 5.0);
    CHECK(kind_of([&] { definitional_value_encoded(f_label("a", "y"), boolean(), good); }) ==
          ErrorKind::InvalidAssignment);
}

TEST_CASE("atoms follow the positional checks") {
    LassoNestedWord pret_word = wz("b> | <a c b>");
    CHECK(holds(f_pret("x"), pret_word, fo({{"x", 1}})));
    CHECK_FALSE(holds(f_pret("x"), pret_word, fo({{"x", 2}})));
    CHECK(holds(f_ret("x"), pret_word, fo({{"x", 1}})));

    LassoNestedWord pcalls = wz("| <a");
    for (std::size_t i = 1; i <= 5; ++i) {
        CHECK(holds(f_pcall("x"), pcalls, fo({{"x", i}})));
        CHECK(holds(f_step("x"), pcalls, fo({{"x", i}})));
        CHECK(holds(f_call("x"), pcalls, fo({{"x", i}})));
    }

    LassoNestedWord acb = wz("| <a c b>");
    CHECK(holds(f_nu("x", "y"), acb, fo({{"x", 1}, {"y", 3}})));
    CHECK(holds(f_nu("x", "y"), acb, fo({{"x", 4}, {"y", 6}})));
    CHECK_FALSE(holds(f_nu("x", "y"), acb, fo({{"x", 1}, {"y", 2}})));
    CHECK_FALSE(holds(f_nu("x", "y"), acb, fo({{"x", 2}, {"y", 3}})));
    CHECK_FALSE(holds(f_pcall("x"), acb, fo({{"x", 1}})));
    CHECK_FALSE(holds(f_step("x"), acb, fo({{"x", 1}})));
    CHECK_FALSE(holds(f_step("x"), acb, fo({{"x", 2}})));
    CHECK(holds(f_step("x"), acb, fo({{"x", 3}})));
    CHECK(holds(f_leq("x", "y"), acb, fo({{"x", 2}, {"y", 2}})));
    CHECK_FALSE(holds(f_leq("x", "y"), acb, fo({{"x", 3}, {"y", 2}})));
    CHECK(holds(f_succ("x", "y"), acb, fo({{"x", 2}, {"y", 3}})));
    CHECK_FALSE(holds(f_succ("x", "y"), acb, fo({{"x", 3}, {"y", 2}})));
    CHECK(holds(f_label("c", "x"), acb, fo({{"x", 2}})));
    CHECK_FALSE(holds(f_label("c", "x"), acb, fo({{"x", 3}})));

    Assignment with_set = fo({{"x", 2}});
    with_set.second_order["X"] = PeriodicSet{{}, {2}, 1};
    CHECK(holds(f_in("x", "X"), acb, with_set));
    Assignment off_set = with_set;
    off_set.first_order["x"] = 1;
    CHECK(holds(f_not(f_in("x", "X")), acb, off_set));
    CHECK(kind_of([&] { holds(f_in("x", "X"), acb, fo({{"x", 1}})); }) ==
          ErrorKind::InvalidAssignment);
}

TEST_CASE("evaluation ignores extra assigned variables") {
    std::vector<std::string> texts = {
        "exists y. nu(x,y)",
        "forall z. ((call(z) and 1.0) or 0.0)",
        "exists z. (pcall(z) and 2.0)",
        "Lab_a(x) or (exists y. (x <= y and ret(y)))",
    };
    std::vector<LassoNestedWord> words = {wz("| <a c b>"), wz("b> b> | <a c b>"), wz("a | <b c>")};
    for (const auto& t : texts) {
        FPtr f = parse_formula(t);
        for (const auto& w : words) {
            Assignment small = fo({{"x", 1}});
            Assignment big = small;
            big.first_order["u"] = 5;
            big.second_order["Z"] = PeriodicSet{{}, {1}, 1};
            Value a = definitional_value(f, limavg(), w, small);
            Value b = definitional_value(f, limavg(), w, big);
            CHECK(a == b);
        }
    }
}

TEST_CASE("consistency between plain and encoded evaluation") {
    FPtr f = parse_formula("exists y. nu(x,y)");
    LassoNestedWord w = wz("| <a c b>");
    Assignment asg = fo({{"x", 4}});
    Value direct = definitional_value(f, boolean(), w, asg);

    LassoNestedWord small = encode_assignment(w, {"x"}, asg).encoded;
    Assignment extended = asg;
    extended.first_order["u"] = 2;
    extended.second_order["Z"] = PeriodicSet{{}, {1, 3}, 1};
    LassoNestedWord big = encode_assignment(w, {"Z", "u", "x"}, extended).encoded;
    CHECK(definitional_value_encoded(f, boolean(), small) == direct);
    CHECK(definitional_value_encoded(f, boolean(), big) == direct);
    CHECK(direct == 1.0);
}

TEST_CASE("first-order quantifiers fold periodic value sequences") {
    LassoNestedWord ab = wz("| a b");
    FPtr payoff_a = parse_formula("forall x. ((Lab_a(x) and 1.0) or 0.0)");
    CHECK(definitional_value(payoff_a, limavg(), ab) == Catch::Approx(0.5));
    CHECK(definitional_value(payoff_a, limavg(), wz("a a | b")) == 0.0);
    CHECK(definitional_value(payoff_a, limavg(), wz("b | a")) == Catch::Approx(1.0));

    ValuationMonoid disc = ValuationMonoid::disc(0.5);
    CHECK(definitional_value(payoff_a, disc, wz("a | b")) == Catch::Approx(1.0));
    CHECK(definitional_value(payoff_a, disc, ab) == Catch::Approx(1.0 / 0.75));

    for (const ValuationMonoid& m :
         {ValuationMonoid::limavg(), ValuationMonoid::disc(0.25), ValuationMonoid::boolean()}) {
        Value d = m.kind() == ValuationMonoid::Kind::Boolean ? 1.0 : 2.5;
        FPtr konst = f_forall1("x", f_const(d));
        Value expect = m.kind() == ValuationMonoid::Kind::Disc ? d / (1.0 - 0.25) : d;
        CHECK(definitional_value(konst, m, ab) == Catch::Approx(expect));
    }

    FPtr find_a = parse_formula("exists x. (Lab_a(x) and 2.0)");
    CHECK(definitional_value(find_a, limavg(), ab) == 2.0);
    CHECK(definitional_value(find_a, limavg(), wz("| b c")) == limavg().zero());
    FPtr first_a = parse_formula("exists x. (min(x) and Lab_a(x))");
    CHECK(definitional_value(first_a, boolean(), ab) == 1.0);
    CHECK(definitional_value(first_a, boolean(), wz("b | a")) == 0.0);
}

TEST_CASE("second-order quantifiers have no definitional evaluation") {
    FPtr f = parse_formula("exists X. forall x. ((x in X and 1.0) or 0.0)");
    CHECK(kind_of([&] { definitional_value(f, limavg(), wz("| a")); }) ==
          ErrorKind::UnsupportedBooleanConstruct);
}

TEST_CASE("nonperiodic quantifier sequences overflow the detector") {
    // Under discounting the outer sequence is geometric, lambda^(x-1) * 2, so
    // it is never exactly periodic.  With the window tolerance the numerically
    // converged tail counts as periodic and the value comes out right; with a
    // zero tolerance the detector must give up.
    FPtr f = parse_formula("forall x. forall y. (not (x <= y) or (x <= y and 1.0))");
    ValuationMonoid disc = ValuationMonoid::disc(0.5);
    DefinitionalParams p;
    p.max_positions = 200;
    CHECK(definitional_value(f, disc, wz("| a"), {}, p) ==
          Catch::Approx(8.0 / 3.0).margin(1e-6));
    DefinitionalParams exact = p;
    exact.tolerance = 0.0;
    CHECK(kind_of([&] { definitional_value(f, disc, wz("| a"), {}, exact); }) ==
          ErrorKind::NonPeriodicDetectionOverflow);
    // the same shape is periodic under limit average and evaluates fine
    CHECK(definitional_value(f, limavg(), wz("| a"), {}, p) == Catch::Approx(1.0));
}

TEST_CASE("boolean layer agrees with the compiled automata") {
    std::vector<std::string> texts = {
        "Lab_a(x)",
        "call(x) and not ret(x)",
        "pcall(x)",
        "pret(x) or step(x)",
        "x in X",
        "not (x in X)",
        "exists y. nu(x,y)",
        "forall y. (x <= y)",
        "bfr(x)",
        "succ(x,y)",
        "min(x)",
        "step(x) and x in X",
    };
    LassoParams wp;
    wp.symbols = {"a", "b"};
    std::size_t checked = 0;
    for (const auto& t : texts) {
        INFO("formula: " << t);
        FPtr f = parse_formula(t);
        std::set<std::string> fv = free_variables(f);
        std::vector<std::string> vars(fv.begin(), fv.end());
        Nwa compiled = compile_boolean(f, std::vector<std::string>{"a", "b"});
        for (std::uint64_t seed = 0; seed < 12; ++seed) {
            LassoNestedWord w = sample_lasso(wp, 977 * seed + 13);
            std::mt19937_64 rng(seed ^ 0x51ab);
            Assignment asg;
            for (const auto& v : vars) {
                if (is_first_order_var(v)) {
                    asg.first_order[v] = 1 + rng() % (w.prefix_length() + 2 * w.loop_length());
                } else {
                    PeriodicSet s;
                    for (std::size_t i = 1; i <= w.prefix_length(); ++i)
                        if (rng() & 1) s.prefix_positions.push_back(i);
                    for (std::size_t t2 = 1; t2 <= w.loop_length(); ++t2)
                        if (rng() & 1) s.loop_offsets.push_back(t2);
                    asg.second_order[v] = std::move(s);
                }
            }
            LassoNestedWord enc = encode_assignment(w, vars, asg).encoded;
            bool direct = definitional_value(f, boolean(), w, asg) == 1.0;
            CHECK(definitional_value_encoded(f, boolean(), enc) == (direct ? 1.0 : 0.0));
            CHECK(membership(compiled, enc) == direct);
            ++checked;
        }
    }
    CHECK(checked == texts.size() * 12u);
}

TEST_CASE("bracket-free sentence evaluates to the loop ratio") {
    FPtr f = parse_formula(examples::bracket_free_sentence());
    CHECK(definitional_value(f, limavg(), wz("| <a c b>")) == Catch::Approx(2.0 / 3.0));
    CHECK(definitional_value(f, limavg(), wz("| <b c>")) == Catch::Approx(1.0));
    CHECK(definitional_value(f, limavg(), wz("| <a a b> b")) == Catch::Approx(0.75));
    CHECK(definitional_value(f, limavg(), wz("b> | <a c b>")) == Catch::Approx(2.0 / 3.0));
    CHECK(definitional_value(f, limavg(), wz("| <a b")) == 0.0);

    WeightedNwa pending =
        parse_weighted_automaton(examples::pending_ratio_text()).build(ValuationMonoid::limavg());
    LassoParams p;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        LassoNestedWord w = sample_lasso(p, 31 * seed + 5);
        Value logic = definitional_value(f, limavg(), w);
        CHECK(logic == Catch::Approx(behavior(pending, w)).margin(1e-12));
        CHECK(logic ==
              Catch::Approx(oracles::bracket_free_ratio(w, 100000)).margin(1e-2));
    }
}
