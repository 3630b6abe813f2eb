#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

#include "ritt/errors.hpp"
#include "ritt/upoly.hpp"

namespace ritt {

// Exact arithmetic only. Scalar is an arbitrary-precision rational kept in
// lowest terms with positive denominator (the backing type maintains this).
using Int = boost::multiprecision::cpp_int;
using Scalar = boost::multiprecision::cpp_rational;

// Polynomial in the coefficient indeterminate `s` over Q.
using QPoly = UPoly<Scalar>;

std::string to_string(const Scalar& x);
std::string to_string(const QPoly& p, const std::string& var = "s");

// Element of Q(s): quotient of polynomials in s, kept in lowest terms with
// monic denominator. Immutable value type.
class BaseElement {
public:
    BaseElement() : num_(), den_(Scalar(1)) {}
    BaseElement(int n) : num_(Scalar(n)), den_(Scalar(1)) {}            // NOLINT(google-explicit-constructor)
    BaseElement(const Scalar& x) : num_(x), den_(Scalar(1)) {}          // NOLINT(google-explicit-constructor)
    explicit BaseElement(QPoly p) : num_(std::move(p)), den_(Scalar(1)) {}
    BaseElement(QPoly numerator, QPoly denominator);

    static BaseElement s();  // the indeterminate itself

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_ == den_; }
    bool is_rational() const { return num_.degree() <= 0 && den_.degree() == 0; }
    // Requires is_rational().
    Scalar as_scalar() const;

    bool operator==(const BaseElement& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const BaseElement& o) const { return !(*this == o); }

    BaseElement operator-() const;
    friend BaseElement operator+(const BaseElement& a, const BaseElement& b);
    friend BaseElement operator-(const BaseElement& a, const BaseElement& b);
    friend BaseElement operator*(const BaseElement& a, const BaseElement& b);
    friend BaseElement operator/(const BaseElement& a, const BaseElement& b);

    BaseElement inverse() const;

    std::string str() const;

private:
    QPoly num_;
    QPoly den_;  // monic, nonzero, coprime to num_
};

// Invertible substitution s -> (a*s + b)/(c*s + d), acting coefficientwise.
class FieldAutomorphism {
public:
    FieldAutomorphism(Scalar a, Scalar b, Scalar c, Scalar d);
    static FieldAutomorphism identity();
    // Shift s -> s + t, the workhorse in tests.
    static FieldAutomorphism shift(const Scalar& t);
    static FieldAutomorphism scale(const Scalar& k);

    const Scalar& a() const { return a_; }
    const Scalar& b() const { return b_; }
    const Scalar& c() const { return c_; }
    const Scalar& d() const { return d_; }

    bool is_identity() const;
    FieldAutomorphism inverse() const;

    // Equality as maps on s (projective equality of Mobius data).
    friend bool same_map(const FieldAutomorphism& f, const FieldAutomorphism& g);

    std::string str() const;

private:
    Scalar a_, b_, c_, d_;
};

// Image of x under substitution s -> aut(s).
BaseElement apply_aut(const FieldAutomorphism& aut, const BaseElement& x);

// Function composition f after g: result(s) = f(g(s)).
FieldAutomorphism compose_auts(const FieldAutomorphism& f, const FieldAutomorphism& g);

bool check_commuting(const FieldAutomorphism& f, const FieldAutomorphism& g);

// Principal n-th roots, exact or absent. For even n the input must be a
// perfect n-th power of a field element (in particular non-negative for
// scalars); the returned root has positive sign/leading coefficient.
std::optional<Scalar> nth_root(const Scalar& x, unsigned n);
std::optional<BaseElement> nth_root(const BaseElement& x, unsigned n);

// Parsers. Accepted syntax: integers, `a/b`, `s`, `+ - * / ^ ( )`.
Scalar parse_scalar(const std::string& text);
BaseElement parse_base_element(const std::string& text);
// "a,b,c,d" -> s -> (a*s+b)/(c*s+d)
FieldAutomorphism parse_automorphism(const std::string& text);

namespace parse_detail {
// Rational expression in the main variable x over Q(s), as (num, den);
// shared between the coefficient parser and the polynomial parser.
std::pair<UPoly<BaseElement>, UPoly<BaseElement>> parse_x_rational(const std::string& text);
} // namespace parse_detail

} // namespace ritt
