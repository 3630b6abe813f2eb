#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ritt/field.hpp"
#include "ritt/upoly.hpp"

namespace ritt {

// Univariate polynomial in x over Q(s).
using Poly = UPoly<BaseElement>;

// Invertible degree-one polynomial a*x + b.
class LinearPoly {
public:
    LinearPoly() : a_(1), b_(0) {}
    LinearPoly(BaseElement slope, BaseElement intercept);

    static LinearPoly identity() { return LinearPoly(); }
    static std::optional<LinearPoly> from_poly(const Poly& p);

    const BaseElement& slope() const { return a_; }
    const BaseElement& intercept() const { return b_; }

    bool is_identity() const { return a_ == BaseElement(1) && b_.is_zero(); }
    bool is_scaling() const { return b_.is_zero(); }
    bool is_translation() const { return a_ == BaseElement(1); }

    BaseElement operator()(const BaseElement& x) const { return a_ * x + b_; }

    LinearPoly compose(const LinearPoly& inner) const;  // this(inner(x))
    LinearPoly inverse() const;
    Poly as_poly() const;

    bool operator==(const LinearPoly& o) const { return a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const LinearPoly& o) const { return !(*this == o); }

    std::string str() const;

private:
    BaseElement a_, b_;
};

// g(h(x)).
Poly compose(const Poly& g, const Poly& h);
// L(P(x)) and P(L(x)).
Poly compose(const LinearPoly& L, const Poly& P);
Poly compose(const Poly& P, const LinearPoly& L);
// L^{-1}(P(L(x))).
Poly conjugate(const Poly& P, const LinearPoly& L);

// Coefficientwise substitution in s.
Poly apply_aut(const FieldAutomorphism& aut, const Poly& P);
LinearPoly apply_aut(const FieldAutomorphism& aut, const LinearPoly& L);

// Monic Chebyshev-like family: C_0 = 2, C_1 = x, C_{n+1} = x*C_n - C_{n-1};
// satisfies C_n(x + 1/x) = x^n + 1/x^n.
Poly chebyshev(unsigned n);

// (P_centered, T): P_centered = T^{-1}(P(T(x))) with T a translation and the
// coefficient of x^(deg-1) in P_centered equal to zero.
std::pair<Poly, LinearPoly> center(const Poly& P);

// One functional factorization P = g(h(x)) with deg h = e, in the normal
// form "h monic with zero constant term"; absent when none exists.
std::optional<std::pair<Poly, Poly>> decompose_once(const Poly& P, int e);

// Indecomposable factors, outermost first: result[0] ∘ ... ∘ result.back() = P.
std::vector<Poly> complete_decomposition(const Poly& P);

enum class ExceptionalityKind {
    Linear,
    MonomialConjugate,
    PlusChebyshevConjugate,
    MinusChebyshevConjugate,
    NonExceptional,
    UndecidableOverBaseField,
};

std::string kind_name(ExceptionalityKind k);

struct ExceptionalityReport {
    ExceptionalityKind verdict;
    // When present: conjugate(P, witness) equals x^N, C_N or -C_N exactly.
    std::optional<LinearPoly> witness;
    // Minimal polynomial of the missing scaling when undecidable over Q(s).
    std::optional<std::string> obstruction;
};

// Is P linearly conjugate (one single linear, same on both sides) to a
// monomial or to plus/minus a Chebyshev polynomial? Exact over Q(s);
// UndecidableOverBaseField when the conjugacy exists over an extension but
// the required scaling is irrational.
ExceptionalityReport classify_exceptional(const Poly& P);

Poly parse_poly(const std::string& text);
std::string poly_str(const Poly& p);

} // namespace ritt
