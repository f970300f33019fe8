/* tests-fragments.cc -- conjunction rewriting into strongly restricted form */
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include <wnwa/fragments.hh>
#include <wnwa/sampling.hh>
#include <wnwa/semantics.hh>

using namespace wnwa;

namespace {

template <typename Fn> ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::ParseError;
}

std::vector<LassoNestedWord> sample_words(std::size_t count, unsigned seed0) {
    LassoParams p;
    p.symbols = {"a", "b"};
    std::vector<LassoNestedWord> out;
    for (unsigned s = 0; s < count; ++s) out.push_back(sample_lasso(p, seed0 + s));
    return out;
}

void check_equal(const FPtr& in, const FPtr& out, const ValuationMonoid& m, double margin,
                 unsigned seed) {
    for (const auto& w : sample_words(6, seed)) {
        Value a = definitional_value(in, m, w);
        Value b = definitional_value(out, m, w);
        INFO("in:  " << render_formula(in));
        INFO("out: " << render_formula(out));
        if (std::isinf(a) || std::isinf(b)) {
            CHECK(a == b);
        } else {
            CHECK_THAT(b, Catch::Matchers::WithinAbs(a, margin));
        }
    }
}

} // namespace

TEST_CASE("wnwa::fragments/strongly restricted formulas are fixpoints") {
    for (const char* t : {
             "forall x. ((Lab_a(x) and 2.0) or 1.0)",
             "exists x. (call(x) and 0.5)",
             "forall y. ((bfr(y) and 1.0) or 0.0)",
             "(2.0 and ret(u)) or (Lab_b(u) and 0.25)",
         }) {
        FPtr f = parse_formula(t);
        CHECK(render_formula(rewrite_to_strongly_restricted(f, ValuationMonoid::limavg())) ==
              render_formula(f));
        CHECK(render_formula(rewrite_commutative(f, ValuationMonoid::disc(0.5))) ==
              render_formula(f));
    }
}

TEST_CASE("wnwa::fragments/the universal push-in follows the monoid") {
    FPtr f = parse_formula("exists y. (((Lab_a(y) and 2.0) or 0.0)"
                           " and (forall x. ((call(x) and 1.0) or 0.5)))");
    REQUIRE(classify(f).wedge_restricted);
    REQUIRE(classify(f).forall_restricted);
    REQUIRE_FALSE(classify(f).strongly_wedge_restricted);

    // A Val-distributive product pushes the factor into every entry.
    FPtr a = rewrite_to_strongly_restricted(f, ValuationMonoid::limavg());
    CHECK(classify(a).strongly_wedge_restricted);
    CHECK(classify(a).forall_restricted);
    REQUIRE(a->kind == FormulaKind::Exists1);
    REQUIRE(a->left->kind == FormulaKind::Forall1);
    CHECK(render_formula(a->left->left) ==
          "(Lab_a(y) and 2.0 or 0.0) and (call(x) and 1.0 or 0.5)");
    check_equal(f, a, ValuationMonoid::limavg(), 1e-9, 100);

    // A left-multiplicative product pays the factor once, behind a min guard.
    FPtr b = rewrite_to_strongly_restricted(f, ValuationMonoid::disc(0.5));
    CHECK(classify(b).strongly_wedge_restricted);
    CHECK(classify(b).forall_restricted);
    REQUIRE(b->left->kind == FormulaKind::Forall1);
    CHECK(render_formula(b->left).find("forall y1. x <= y1") != std::string::npos);
    check_equal(f, b, ValuationMonoid::disc(0.5), 1e-6, 200);
}

TEST_CASE("wnwa::fragments/disjunctions and existentials absorb the factor") {
    FPtr f = parse_formula("exists u. (((step(u) and 1.5) or 0.25)"
                           " and ((exists x. (call(x) and 2.0))"
                           " or (forall z. ((ret(z) and 0.5) or 1.0))))");
    REQUIRE(classify(f).wedge_restricted);
    for (auto m : {ValuationMonoid::limavg(), ValuationMonoid::disc(0.5)}) {
        FPtr out = rewrite_to_strongly_restricted(f, m);
        CHECK(classify(out, m).strongly_wedge_restricted);
        CHECK(classify(out, m).forall_restricted);
        REQUIRE(out->left->kind == FormulaKind::Or);
        CHECK(out->left->left->kind == FormulaKind::Exists1);
        CHECK(out->left->right->kind == FormulaKind::Forall1);
        check_equal(f, out, m, m.kind() == ValuationMonoid::Kind::Disc ? 1e-6 : 1e-9, 300);
    }
}

TEST_CASE("wnwa::fragments/quantifier pull-outs rename clashing binders") {
    FPtr f = parse_formula(
        "exists x. (((Lab_a(x) and 1.0) or 0.5) and (exists x. (ret(x) and 2.0)))");
    FPtr out = rewrite_to_strongly_restricted(f, ValuationMonoid::limavg());
    CHECK(classify(out).strongly_wedge_restricted);
    REQUIRE(out->kind == FormulaKind::Exists1);
    REQUIRE(out->left->kind == FormulaKind::Exists1);
    CHECK(out->left->var != "x"); // renamed: x occurs free in the pushed factor
    CHECK(free_variables(out).empty());
    check_equal(f, out, ValuationMonoid::limavg(), 1e-9, 400);
}

TEST_CASE("wnwa::fragments/universal conjunctions merge under conditional commutativity") {
    FPtr f = parse_formula("(forall x. ((call(x) and 1.0) or 0.5))"
                           " and (forall y. ((ret(y) and 2.0) or 0.25))");
    REQUIRE_FALSE(classify(f).wedge_restricted);
    REQUIRE(classify(f).commutatively_wedge_restricted);

    CHECK(kind_of([&] { rewrite_to_strongly_restricted(f, ValuationMonoid::limavg()); }) ==
          ErrorKind::NotWedgeRestricted);
    CHECK(kind_of([&] { rewrite_commutative(f, ValuationMonoid::limavg()); }) ==
          ErrorKind::MonoidFlagMissing);

    FPtr out = rewrite_commutative(f, ValuationMonoid::disc(0.5));
    CHECK(classify(out).strongly_wedge_restricted);
    CHECK(classify(out).forall_restricted);
    REQUIRE(out->kind == FormulaKind::Forall1);
    check_equal(f, out, ValuationMonoid::disc(0.5), 1e-6, 500);
}

TEST_CASE("wnwa::fragments/commuting constants let conjuncts swap") {
    FPtr f = parse_formula("(forall x. ((call(x) and 1.0) or 0.5)) and (2.0 or 1.0)");
    REQUIRE_FALSE(classify(f).wedge_restricted);
    FPtr out = rewrite_commutative(f, ValuationMonoid::disc(0.5));
    CHECK(classify(out).strongly_wedge_restricted);
    CHECK(classify(out).forall_restricted);
    REQUIRE(out->kind == FormulaKind::Forall1);
    check_equal(f, out, ValuationMonoid::disc(0.5), 1e-6, 600);
}

TEST_CASE("wnwa::fragments/the commutative rewrite flattens conjunctions") {
    FPtr f = parse_formula("exists y. (((Lab_a(y) and 2.0) or 0.5)"
                           " and (exists x. ((call(x) and 1.0) or ret(x))))");
    FPtr out = rewrite_commutative(f, ValuationMonoid::disc(0.5));
    CHECK(classify(out).strongly_wedge_restricted);
    CHECK(corollary_form(out));
    CHECK_FALSE(corollary_form(f));
    check_equal(f, out, ValuationMonoid::disc(0.5), 1e-6, 700);

    // The guarded universal forms flatten as well.
    FPtr g = parse_formula("exists y. (((Lab_a(y) and 2.0) or 0.5)"
                           " and (forall x. ((call(x) and 1.0) or 0.25)))");
    FPtr gout = rewrite_commutative(g, ValuationMonoid::disc(0.5));
    CHECK(classify(gout).strongly_wedge_restricted);
    CHECK(classify(gout).forall_restricted);
    CHECK(corollary_form(gout));
    check_equal(g, gout, ValuationMonoid::disc(0.5), 1e-6, 800);
}

TEST_CASE("wnwa::fragments/rewrites agree with the definitional semantics") {
    const std::vector<std::string> wedge = {
        "exists u. ((pcall(u) and 1.0) and (forall x. ((Lab_a(x) and 2.0) or 1.0)))",
        "exists u. ((pret(u) or (1.0 and Lab_b(u))) and (exists x. (2.0 and call(x))))",
        "forall u. (((step(u) and 2.0) or 0.5) and ((Lab_a(u) and 1.0) or 0.25))",
        "exists u. (((Lab_b(u) and 1.5) or 0.25) and (exists x. (call(x) and 2.0)))",
    };
    unsigned seed = 900;
    for (const auto& t : wedge) {
        FPtr f = parse_formula(t);
        INFO("formula: " << t);
        REQUIRE(classify(f).wedge_restricted);
        bool fr = classify(f).forall_restricted;
        for (auto m : {ValuationMonoid::limavg(), ValuationMonoid::disc(0.5)}) {
            FPtr out = rewrite_to_strongly_restricted(f, m);
            CHECK(classify(out, m).strongly_wedge_restricted);
            if (fr) CHECK(classify(out, m).forall_restricted);
            check_equal(f, out, m, m.kind() == ValuationMonoid::Kind::Disc ? 1e-6 : 1e-9,
                        seed += 10);
        }
    }

    const std::vector<std::string> commutative = {
        "(forall x. ((call(x) and 1.0) or 0.5)) and (forall y. ((Lab_a(y) and 2.0) or 0.25))",
        "(exists x. (Lab_a(x) and 2.0)) and (forall y. ((ret(y) and 1.0) or 0.5))",
        "((forall x. ((call(x) and 1.0) or 0.5)) or 2.0)"
        " and (forall y. ((Lab_b(y) and 0.25) or 1.0))",
    };
    for (const auto& t : commutative) {
        FPtr f = parse_formula(t);
        INFO("formula: " << t);
        REQUIRE(classify(f).commutatively_wedge_restricted);
        bool fr = classify(f).forall_restricted;
        auto m = ValuationMonoid::disc(0.5);
        FPtr out = rewrite_commutative(f, m);
        CHECK(classify(out, m).strongly_wedge_restricted);
        if (fr) CHECK(classify(out, m).forall_restricted);
        CHECK(corollary_form(out));
        check_equal(f, out, m, 1e-6, seed += 10);
    }
}
