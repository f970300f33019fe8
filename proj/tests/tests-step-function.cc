/* tests-step-function.cc -- regular step functions and their automata */

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hh"
#include "wnwa/examples.hh"
#include "wnwa/sampling.hh"
#include "wnwa/semantics.hh"
#include "wnwa/step_function.hh"
#include "wnwa/text_format.hh"

using namespace wnwa;

namespace {

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

std::vector<LassoNestedWord> sample_words(std::size_t count, std::uint64_t seed0,
                                          std::vector<std::string> symbols = {"a", "b", "c"}) {
    LassoParams p;
    p.symbols = std::move(symbols);
    std::vector<LassoNestedWord> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample_lasso(p, seed0 + i));
    return out;
}

// random valid encodings of one first-order variable over {a, b}
std::vector<LassoNestedWord> sample_encodings(std::size_t count, std::uint64_t seed0) {
    std::vector<LassoNestedWord> out;
    LassoParams p;
    p.symbols = {"a", "b"};
    for (std::size_t i = 0; i < count; ++i) {
        LassoNestedWord w = sample_lasso(p, seed0 + i);
        std::mt19937_64 rng(seed0 ^ (i * 977 + 1));
        Assignment asg;
        asg.first_order["x"] = 1 + rng() % (w.prefix_length() + 2 * w.loop_length());
        out.push_back(encode_assignment(w, {"x"}, asg).encoded);
    }
    return out;
}

} // namespace

TEST_CASE("constant step functions behave as constants") {
    for (const ValuationMonoid& m :
         {ValuationMonoid::limavg(), ValuationMonoid::disc(0.5), ValuationMonoid::boolean()}) {
        Value d = m.kind() == ValuationMonoid::Kind::Boolean ? 1.0 : 5.0;
        RegularStepFunction s =
            to_regular_step_function(f_const(d), m, {"a", "b", "c"}, {});
        REQUIRE(s.cells.size() == 1);
        verify_partition(s);
        WeightedNwa a = step_function_automaton(s);
        for (const auto& w : sample_words(15, 300)) {
            CHECK(evaluate_rsf(s, w) == d);
            CHECK(behavior(a, w) == Catch::Approx(d).margin(1e-9));
        }
    }
}

TEST_CASE("boolean formulas become two-cell indicators") {
    FPtr f = parse_formula("Lab_a(x)");
    const ValuationMonoid m = ValuationMonoid::limavg();
    RegularStepFunction s = to_regular_step_function(f, m, {"a", "b"}, {"x"});
    REQUIRE(s.cells.size() == 3); // indicator split, plus the invalid-encoding cell
    verify_partition(s);
    for (const auto& w : sample_encodings(25, 4400)) {
        Value expect = definitional_value_encoded(f, m, w);
        CHECK(evaluate_rsf(s, w) == expect);
        CHECK((expect == m.one() || expect == m.zero()));
    }
}

TEST_CASE("step functions match the definitional semantics") {
    FPtr f = parse_formula("((min(x) and call(x)) and 2.0) or 1.0");
    for (const ValuationMonoid& m : {ValuationMonoid::limavg(), ValuationMonoid::disc(0.5)}) {
        RegularStepFunction s = to_regular_step_function(f, m, {"a", "b"}, {"x"});
        verify_partition(s);
        WeightedNwa a = step_function_automaton(s);
        for (const auto& w : sample_encodings(25, 8200)) {
            Value expect = definitional_value_encoded(f, m, w);
            CHECK(evaluate_rsf(s, w) == expect);
            CHECK(behavior(a, w) == Catch::Approx(expect).margin(1e-6));
        }
    }
}

TEST_CASE("invalid encodings fall into the zero cell") {
    FPtr f = parse_formula("(Lab_a(x) and 2.0) or 1.0");
    const ValuationMonoid m = ValuationMonoid::limavg();
    RegularStepFunction s = to_regular_step_function(f, m, {"a", "b"}, {"x"});
    WeightedNwa a = step_function_automaton(s);
    using Letters = std::vector<TaggedLetter>;
    std::vector<LassoNestedWord> bad = {
        LassoNestedWord(Letters{intl("a", 1), intl("b", 1)}, Letters{intl("a", 0)}, {"x"}),
        LassoNestedWord(Letters{intl("a", 0)}, Letters{intl("b", 0)}, {"x"}),
        LassoNestedWord(Letters{}, Letters{intl("a", 1)}, {"x"}),
    };
    for (const auto& w : bad) {
        CHECK(evaluate_rsf(s, w) == m.zero());
        CHECK(definitional_value_encoded(f, m, w) == m.zero());
        CHECK(behavior(a, w) == m.zero());
    }
}

TEST_CASE("the step-function algebra is pointwise") {
    const ValuationMonoid m = ValuationMonoid::limavg();
    FPtr f1 = parse_formula("(bfr(x) and 2.0) or 0.5");
    FPtr f2 = parse_formula("(call(x) and 1.5) or (step(x) and 3.0)");
    RegularStepFunction s1 = to_regular_step_function(f1, m, {"a", "b"}, {"x"});
    RegularStepFunction s2 = to_regular_step_function(f2, m, {"a", "b"}, {"x"});
    RegularStepFunction sum = rsf_plus(s1, s2);
    RegularStepFunction prod = rsf_diamond(s1, s2);
    verify_partition(sum);
    verify_partition(prod);
    for (const auto& w : sample_encodings(20, 9100)) {
        Value v1 = evaluate_rsf(s1, w), v2 = evaluate_rsf(s2, w);
        CHECK(evaluate_rsf(sum, w) == m.plus(v1, v2));
        CHECK(evaluate_rsf(prod, w) == m.times(v1, v2));
    }
    CHECK(kind_of([&] { rsf_plus(s1, s2, 4); }) == ErrorKind::LimitExceeded);
}

TEST_CASE("partition violations are reported") {
    const ValuationMonoid m = ValuationMonoid::limavg();
    Alphabet al;
    al.symbols = {"a", "b"};
    Nwa uni = universal_nwa(al);
    RegularStepFunction overlapping(m);
    overlapping.alphabet = al;
    overlapping.cells.push_back({1.0, uni});
    overlapping.cells.push_back({2.0, uni});
    LassoNestedWord w = parse_lasso_word("| a");
    CHECK(kind_of([&] { evaluate_rsf(overlapping, w); }) == ErrorKind::PartitionViolation);
    CHECK(kind_of([&] { verify_partition(overlapping); }) == ErrorKind::PartitionViolation);

    RegularStepFunction gappy(m);
    gappy.alphabet = al;
    gappy.cells.push_back({1.0, empty_nwa(al)});
    CHECK(kind_of([&] { evaluate_rsf(gappy, w); }) == ErrorKind::PartitionViolation);
    CHECK(kind_of([&] { verify_partition(gappy); }) == ErrorKind::PartitionViolation);
}

TEST_CASE("non-almost-boolean formulas are rejected") {
    FPtr f = parse_formula("forall x. ((Lab_a(x) and 1.0) or 0.0)");
    CHECK(kind_of([&] {
        to_regular_step_function(f, ValuationMonoid::limavg(), {"a", "b"}, {});
    }) == ErrorKind::FragmentViolation);
}

TEST_CASE("product with a value-one step function is the behavior") {
    WeightedNwa a1 =
        parse_weighted_automaton(examples::ratio_text()).build(ValuationMonoid::limavg());
    RegularStepFunction one =
        rsf_const(a1.monoid, a1.alphabet, a1.monoid.one());
    WeightedNwa prod = diamond_with_step_function(one, a1);
    for (const auto& w : sample_words(50, 12000)) {
        CHECK(behavior(prod, w) == Catch::Approx(behavior(a1, w)).margin(1e-12));
    }
}

TEST_CASE("the step-function product scales cellwise") {
    WeightedNwa a1 =
        parse_weighted_automaton(examples::ratio_text()).build(ValuationMonoid::limavg());
    // split on "every a is a call"
    FPtr split = parse_formula("forall y. ((not Lab_a(y)) or call(y))");
    Nwa lang = compile_boolean(split, std::vector<std::string>{"a", "b", "c"});
    RegularStepFunction s(a1.monoid);
    s.alphabet = a1.alphabet;
    s.cells.push_back({5.0, lang});
    s.cells.push_back({3.0, complement_deterministic(lang)});
    verify_partition(s);
    WeightedNwa prod = diamond_with_step_function(s, a1);
    for (const auto& w : sample_words(50, 15000)) {
        Value d = membership(lang, w) ? 5.0 : 3.0;
        Value expect = a1.monoid.times(d, behavior(a1, w)); // times is +
        CHECK(behavior(prod, w) == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("first-weight scaling pays the cell value once") {
    const ValuationMonoid m = ValuationMonoid::disc(0.5);
    AutomatonParams p;
    p.symbols = {"a", "b"};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        WeightedNwa a = sample_weighted_nwa(p, m, 600 + seed);
        RegularStepFunction s = rsf_const(m, a.alphabet, 3.0);
        WeightedNwa prod = diamond_with_step_function(s, a);
        LassoParams lp;
        lp.symbols = p.symbols;
        for (std::uint64_t t = 0; t < 5; ++t) {
            LassoNestedWord w = sample_lasso(lp, 71 * seed + t);
            Value base = behavior(a, w);
            Value expect = m.times(3.0, base);
            CHECK(behavior(prod, w) == Catch::Approx(expect).margin(1e-6));
        }
    }
}
