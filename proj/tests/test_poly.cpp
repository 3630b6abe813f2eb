#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <random>
#include <vector>

#include "ritt/errors.hpp"
#include "ritt/field.hpp"
#include "ritt/poly.hpp"

using namespace ritt;

namespace {

Poly pp(const std::string& t) { return parse_poly(t); }

BaseElement bpow(const BaseElement& b, int n) {
    BaseElement r(1);
    for (int i = 0; i < n; ++i) r = r * b;
    return r;
}

Scalar rnd_scalar(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
    return Scalar(num(rng)) / den(rng);
}

Poly rnd_poly(std::mt19937_64& rng, int deg) {
    std::vector<BaseElement> c(static_cast<size_t>(deg) + 1);
    for (auto& b : c) b = BaseElement(rnd_scalar(rng));
    while (c.back().is_zero()) c.back() = BaseElement(rnd_scalar(rng));
    return Poly(c);
}

} // namespace

TEST_CASE("parse and print round-trip") {
    Poly p = pp("x^3 + (s+1)*x - 2/3");
    CHECK(p.degree() == 3);
    CHECK(p.coeff(3) == BaseElement(1));
    CHECK(p.coeff(2) == BaseElement(0));
    CHECK(p.coeff(1) == parse_base_element("s+1"));
    CHECK(p.coeff(0) == BaseElement(Scalar(-2) / 3));
    CHECK(poly_str(p) == "x^3 + (s + 1)*x - 2/3");
    CHECK(pp(poly_str(p)) == p);

    CHECK(poly_str(pp("-x^2 + 1/2")) == "-x^2 + 1/2");
    CHECK(poly_str(pp("2/3*x")) == "(2/3)*x");
    CHECK(poly_str(Poly()) == "0");
    CHECK(poly_str(pp("x*x*x")) == "x^3");
    CHECK(pp("(x+1)^2") == pp("x^2 + 2*x + 1"));
    CHECK(pp("x^2/2") == pp("1/2 * x^2"));

    CHECK_THROWS_AS(pp("x + "), ParseError);
    CHECK_THROWS_AS(pp("1/x"), ParseError);
    CHECK_THROWS_AS(pp("x/(x+1)"), ParseError);

    std::mt19937_64 rng(2024);
    for (int i = 0; i < 40; ++i) {
        Poly q = rnd_poly(rng, 1 + static_cast<int>(rng() % 5));
        CHECK(pp(poly_str(q)) == q);
    }
}

TEST_CASE("linear polynomials") {
    LinearPoly L(BaseElement(2), BaseElement(-3));
    CHECK(L(BaseElement(5)) == BaseElement(7));
    CHECK(L.compose(L.inverse()) == LinearPoly::identity());
    CHECK(L.inverse().compose(L) == LinearPoly::identity());
    LinearPoly M(BaseElement(Scalar(1) / 2), BaseElement(1));
    CHECK(L.compose(M) == LinearPoly(BaseElement(1), BaseElement(-1)));
    CHECK(LinearPoly::from_poly(pp("2*x - 3")) == L);
    CHECK(!LinearPoly::from_poly(pp("x^2")).has_value());
    CHECK(!LinearPoly::from_poly(pp("7")).has_value());
    CHECK_THROWS_AS(LinearPoly(BaseElement(0), BaseElement(1)), DomainError);
    CHECK(compose(L, pp("x^2")) == pp("2*x^2 - 3"));
    CHECK(compose(pp("x^2"), L) == pp("4*x^2 - 12*x + 9"));
}

TEST_CASE("composition") {
    CHECK(compose(pp("x^2 - 2"), pp("x^2 - 2")) == pp("x^4 - 4*x^2 + 2"));
    CHECK(compose(pp("x^2"), pp("x^3")) == pp("x^6"));
    Poly f = pp("x^3 + (s)*x + 1"), g = pp("2*x^2 - x");
    CHECK(compose(pp("x"), f) == f);
    CHECK(compose(f, pp("x")) == f);
    CHECK(compose(f, g).degree() == 6);
    Poly h = pp("x^2 + 3");
    CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
}

TEST_CASE("chebyshev family") {
    CHECK(chebyshev(0) == Poly(BaseElement(2)));
    CHECK(chebyshev(1) == pp("x"));
    CHECK(chebyshev(2) == pp("x^2 - 2"));
    CHECK(chebyshev(3) == pp("x^3 - 3*x"));
    CHECK(chebyshev(4) == pp("x^4 - 4*x^2 + 2"));
    CHECK(chebyshev(5) == pp("x^5 - 5*x^3 + 5*x"));
    CHECK(chebyshev(6) == pp("x^6 - 6*x^4 + 9*x^2 - 2"));

    // C_m(C_n(x)) = C_{mn}(x)
    for (unsigned m = 2; m <= 6; ++m)
        for (unsigned n = 2; n <= 6; ++n)
            CHECK(compose(chebyshev(m), chebyshev(n)) == chebyshev(m * n));

    // C_d(x^2 - 2) = C_d(x)^2 - 2
    for (unsigned d2 = 1; d2 <= 7; ++d2) {
        Poly cd = chebyshev(d2);
        CHECK(compose(cd, pp("x^2 - 2")) == cd * cd - Poly(BaseElement(2)));
    }

    // C_n(v + 1/v) = v^n + v^{-n} at sample points
    for (const Scalar& v0 : {Scalar(2), Scalar(3), Scalar(5) / 2, Scalar(-3) / 2}) {
        BaseElement v{v0};
        for (unsigned n = 1; n <= 8; ++n) {
            BaseElement lhs = chebyshev(n).eval(v + v.inverse());
            BaseElement rhs = bpow(v, static_cast<int>(n)) + bpow(v.inverse(), static_cast<int>(n));
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("centering") {
    auto [c1, t1] = center(pp("x^2 + 2*x"));
    CHECK(c1 == pp("x^2"));
    CHECK(t1 == LinearPoly(BaseElement(1), BaseElement(-1)));

    auto [c2, t2] = center(pp("2*x^2 - 4*x"));
    CHECK(c2 == pp("2*x^2 - 3"));
    CHECK(t2 == LinearPoly(BaseElement(1), BaseElement(1)));

    auto [c3, t3] = center(pp("x^3 - 3*x"));
    CHECK(c3 == pp("x^3 - 3*x"));
    CHECK(t3 == LinearPoly::identity());

    CHECK_THROWS_AS(center(pp("x + 1")), DomainError);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 30; ++i) {
        Poly p = rnd_poly(rng, 2 + static_cast<int>(rng() % 4));
        auto [pc, t] = center(p);
        CHECK(t.slope() == BaseElement(1));
        CHECK(pc.coeff(pc.degree() - 1).is_zero());
        CHECK(conjugate(p, t) == pc);
    }
}

TEST_CASE("single decomposition step") {
    auto r1 = decompose_once(pp("x^6"), 2);
    REQUIRE(r1.has_value());
    CHECK(r1->first == pp("x^3"));
    CHECK(r1->second == pp("x^2"));

    auto r2 = decompose_once(pp("x^6 - 3*x^2"), 2);
    REQUIRE(r2.has_value());
    CHECK(r2->first == pp("x^3 - 3*x"));
    CHECK(r2->second == pp("x^2"));

    CHECK(!decompose_once(pp("x^6 + x"), 2).has_value());
    CHECK(!decompose_once(pp("x^6 + x"), 3).has_value());

    // Normal form pushes inner shifts into the outer factor.
    auto r3 = decompose_once(pp("(x^2 + 1)^2"), 2);
    REQUIRE(r3.has_value());
    CHECK(r3->first == pp("x^2 + 2*x + 1"));
    CHECK(r3->second == pp("x^2"));

    auto r4 = decompose_once(pp("x^4 + 2*x^3 + x^2 + 1"), 2);
    REQUIRE(r4.has_value());
    CHECK(r4->first == pp("x^2 + 1"));
    CHECK(r4->second == pp("x^2 + x"));

    auto r5 = decompose_once(pp("2*x^4 + 4*x^2 + 1"), 2);
    REQUIRE(r5.has_value());
    CHECK(r5->first == pp("2*x^2 + 4*x + 1"));
    CHECK(r5->second == pp("x^2"));

    CHECK_THROWS_AS(decompose_once(pp("x^4"), 3), DomainError);
    CHECK_THROWS_AS(decompose_once(pp("x^4"), 4), DomainError);
    CHECK_THROWS_AS(decompose_once(pp("x^4"), 1), DomainError);
    CHECK_THROWS_AS(decompose_once(pp("x + 1"), 2), DomainError);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        Poly g = rnd_poly(rng, 2 + static_cast<int>(rng() % 3));
        Poly h = rnd_poly(rng, 2 + static_cast<int>(rng() % 3));
        Poly p = compose(g, h);
        auto r = decompose_once(p, h.degree());
        REQUIRE(r.has_value());
        CHECK(compose(r->first, r->second) == p);
        CHECK(r->second.leading() == BaseElement(1));
        CHECK(r->second.coeff(0).is_zero());
    }
}

TEST_CASE("complete decomposition") {
    auto f1 = complete_decomposition(pp("x^8"));
    REQUIRE(f1.size() == 3);
    for (const auto& f : f1) CHECK(f == pp("x^2"));

    auto f2 = complete_decomposition(chebyshev(6));
    REQUIRE(f2.size() == 2);
    CHECK(f2[0].degree() == 3);
    CHECK(f2[1].degree() == 2);
    CHECK(compose(f2[0], f2[1]) == chebyshev(6));

    auto f3 = complete_decomposition(pp("x^3 + x"));
    REQUIRE(f3.size() == 1);
    CHECK(f3[0] == pp("x^3 + x"));

    std::mt19937_64 rng(13);
    for (int i = 0; i < 25; ++i) {
        Poly g = rnd_poly(rng, 2 + static_cast<int>(rng() % 3));
        Poly h = rnd_poly(rng, 2 + static_cast<int>(rng() % 3));
        Poly p = compose(g, h);
        auto fs = complete_decomposition(p);
        REQUIRE(fs.size() >= 2);
        Poly back = fs[0];
        int degprod = fs[0].degree();
        for (size_t j = 1; j < fs.size(); ++j) {
            back = compose(back, fs[j]);
            degprod *= fs[j].degree();
        }
        CHECK(back == p);
        CHECK(degprod == p.degree());
        for (const auto& f : fs) CHECK(complete_decomposition(f).size() == 1);
    }
}

namespace {

struct BruteHit {
    Poly target;
    LinearPoly L;
};

// Independent search over the only possible rational witnesses for a monic
// centered input: slope must satisfy slope^(d-1) = ±1 and the intercept must
// vanish, so slope is ±1 and six exact checks settle it.
std::optional<BruteHit> brute_conjugacy(const Poly& P) {
    int d = P.degree();
    std::vector<Poly> targets = {Poly::monomial(d), chebyshev(static_cast<unsigned>(d)),
                                 -chebyshev(static_cast<unsigned>(d))};
    for (const auto& t : targets)
        for (int a : {1, -1}) {
            LinearPoly L(BaseElement(a), BaseElement(0));
            if (conjugate(P, L) == t) return BruteHit{t, L};
        }
    return std::nullopt;
}

Poly verdict_target(const ExceptionalityReport& rep, int d) {
    switch (rep.verdict) {
        case ExceptionalityKind::MonomialConjugate: return Poly::monomial(d);
        case ExceptionalityKind::PlusChebyshevConjugate: return chebyshev(static_cast<unsigned>(d));
        case ExceptionalityKind::MinusChebyshevConjugate:
            return -chebyshev(static_cast<unsigned>(d));
        default: return Poly();
    }
}

} // namespace

TEST_CASE("exceptionality: pinned verdicts") {
    auto expect = [](const std::string& poly, ExceptionalityKind kind) {
        Poly p = pp(poly);
        auto rep = classify_exceptional(p);
        INFO("input ", poly, " got ", kind_name(rep.verdict));
        CHECK(rep.verdict == kind);
        if (rep.witness) CHECK(conjugate(p, *rep.witness) == verdict_target(rep, p.degree()));
        return rep;
    };

    expect("3*x + 1", ExceptionalityKind::Linear);
    expect("x^2", ExceptionalityKind::MonomialConjugate);
    expect("x^2 + 2*x", ExceptionalityKind::MonomialConjugate);
    expect("x^2 + 1", ExceptionalityKind::NonExceptional);
    expect("x^2 - 2", ExceptionalityKind::PlusChebyshevConjugate);

    auto r1 = expect("2*x^2 - 4*x + 3", ExceptionalityKind::MonomialConjugate);
    CHECK(*r1.witness == LinearPoly(BaseElement(Scalar(1) / 2), BaseElement(1)));
    expect("2*x^2 - 4*x", ExceptionalityKind::NonExceptional);

    auto r2 = expect("x^3 - 3*x", ExceptionalityKind::PlusChebyshevConjugate);
    CHECK(*r2.witness == LinearPoly::identity());
    expect("-x^3 + 3*x", ExceptionalityKind::MinusChebyshevConjugate);
    expect("x^3 + x", ExceptionalityKind::NonExceptional);

    auto r3 = expect("x^3 + 3*x", ExceptionalityKind::UndecidableOverBaseField);
    CHECK(!r3.witness.has_value());
    CHECK(r3.obstruction == std::string("y^2 - (-1)"));

    expect("x^5 - 5*x^3 + 5*x", ExceptionalityKind::PlusChebyshevConjugate);
    expect("x^4 - 4*x^2 + 2", ExceptionalityKind::PlusChebyshevConjugate);
    // Even degree: the -C form folds into the +C verdict through a sign flip.
    auto r4 = expect("-x^4 + 4*x^2 - 2", ExceptionalityKind::PlusChebyshevConjugate);
    CHECK(r4.witness->slope() == BaseElement(-1));

    auto r5 = expect("(s)*x^2", ExceptionalityKind::MonomialConjugate);
    CHECK(r5.witness->slope() == BaseElement(1) / BaseElement::s());
    auto r6 = expect("(s)*x^3", ExceptionalityKind::UndecidableOverBaseField);
    CHECK(r6.obstruction == std::string("y^2 - (1/s)"));
    expect("(s^2)*x^3", ExceptionalityKind::MonomialConjugate);
}

TEST_CASE("exceptionality: conjugates of known targets are recovered") {
    std::vector<LinearPoly> ls = {
        LinearPoly(BaseElement(2), BaseElement(3)),
        LinearPoly(BaseElement(Scalar(1) / 2), BaseElement(-1)),
        LinearPoly(BaseElement::s(), BaseElement(1)),
        LinearPoly(parse_base_element("s+1"), BaseElement(Scalar(-2) / 3)),
    };
    for (const auto& L : ls) {
        for (int d = 2; d <= 5; ++d) {
            Poly pm = compose(L, compose(Poly::monomial(d), L.inverse()));
            auto rm = classify_exceptional(pm);
            CHECK(rm.verdict == ExceptionalityKind::MonomialConjugate);
            REQUIRE(rm.witness.has_value());
            CHECK(conjugate(pm, *rm.witness) == Poly::monomial(d));

            Poly pc = compose(L, compose(chebyshev(static_cast<unsigned>(d)), L.inverse()));
            auto rc = classify_exceptional(pc);
            CHECK(rc.verdict == ExceptionalityKind::PlusChebyshevConjugate);
            REQUIRE(rc.witness.has_value());
            CHECK(conjugate(pc, *rc.witness) == chebyshev(static_cast<unsigned>(d)));
        }
    }
}

TEST_CASE("exceptionality agrees with brute-force conjugacy search") {
    for (int a = -3; a <= 3; ++a) {
        for (int b = -3; b <= 3; ++b) {
            Poly p = Poly::monomial(3) + Poly::monomial(1, BaseElement(a)) + Poly(BaseElement(b));
            auto rep = classify_exceptional(p);
            auto hit = brute_conjugacy(p);
            INFO("cubic a=", a, " b=", b, " verdict ", kind_name(rep.verdict));
            CHECK(rep.witness.has_value() == hit.has_value());
            if (rep.witness) {
                CHECK(conjugate(p, *rep.witness) == verdict_target(rep, 3));
                CHECK(hit->target == verdict_target(rep, 3));
            } else {
                CHECK((rep.verdict == ExceptionalityKind::NonExceptional ||
                       rep.verdict == ExceptionalityKind::UndecidableOverBaseField));
            }
        }
    }
}

TEST_CASE("coefficientwise substitution") {
    FieldAutomorphism sh = FieldAutomorphism::shift(Scalar(1));
    Poly p = pp("(s)*x^2 + (s^2)*x + 1");
    CHECK(apply_aut(sh, p) == pp("(s+1)*x^2 + (s^2+2*s+1)*x + 1"));
    Poly q = pp("x^3 - 2*x");
    CHECK(apply_aut(sh, q) == q);
    LinearPoly L(BaseElement::s(), BaseElement(2));
    LinearPoly Ls = apply_aut(sh, L);
    CHECK(Ls.slope() == parse_base_element("s+1"));
    CHECK(Ls.intercept() == BaseElement(2));
}
