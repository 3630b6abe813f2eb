#include "ritt/poly.hpp"

#include <sstream>

#include "ritt/errors.hpp"

namespace ritt {

namespace {

BaseElement bpow(const BaseElement& b, unsigned n) {
    BaseElement r(1), base = b;
    while (n) {
        if (n & 1u) r = r * base;
        base = base * base;
        n >>= 1u;
    }
    return r;
}

} // namespace

LinearPoly::LinearPoly(BaseElement slope, BaseElement intercept)
    : a_(std::move(slope)), b_(std::move(intercept)) {
    if (a_.is_zero()) throw DomainError("linear polynomial needs nonzero slope");
}

std::optional<LinearPoly> LinearPoly::from_poly(const Poly& p) {
    if (p.degree() != 1) return std::nullopt;
    return LinearPoly(p.coeff(1), p.coeff(0));
}

LinearPoly LinearPoly::compose(const LinearPoly& inner) const {
    return LinearPoly(a_ * inner.a_, a_ * inner.b_ + b_);
}

LinearPoly LinearPoly::inverse() const {
    BaseElement ai = a_.inverse();
    return LinearPoly(ai, -(b_ * ai));
}

Poly LinearPoly::as_poly() const {
    return Poly(std::vector<BaseElement>{b_, a_});
}

std::string LinearPoly::str() const { return poly_str(as_poly()); }

Poly compose(const Poly& g, const Poly& h) { return g.compose(h); }

Poly compose(const LinearPoly& L, const Poly& P) {
    Poly r = P * L.slope();
    r += Poly(L.intercept());
    return r;
}

Poly compose(const Poly& P, const LinearPoly& L) { return P.compose(L.as_poly()); }

Poly conjugate(const Poly& P, const LinearPoly& L) {
    return compose(L.inverse(), compose(P, L));
}

Poly apply_aut(const FieldAutomorphism& aut, const Poly& P) {
    std::vector<BaseElement> c;
    c.reserve(P.coeffs().size());
    for (const auto& b : P.coeffs()) c.push_back(apply_aut(aut, b));
    return Poly(std::move(c));
}

LinearPoly apply_aut(const FieldAutomorphism& aut, const LinearPoly& L) {
    return LinearPoly(apply_aut(aut, L.slope()), apply_aut(aut, L.intercept()));
}

Poly chebyshev(unsigned n) {
    Poly prev{BaseElement(2)};
    if (n == 0) return prev;
    Poly cur = Poly::monomial(1);
    Poly x = cur;
    for (unsigned i = 1; i < n; ++i) {
        Poly next = x * cur - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

std::pair<Poly, LinearPoly> center(const Poly& P) {
    int d = P.degree();
    if (d < 2) throw DomainError("centering needs degree >= 2");
    BaseElement gamma = -(P.coeff(d - 1) / (P.coeff(d) * BaseElement(d)));
    LinearPoly T(BaseElement(1), gamma);
    return {conjugate(P, T), T};
}

std::optional<std::pair<Poly, Poly>> decompose_once(const Poly& P, int e) {
    int d = P.degree();
    if (d < 2) throw DomainError("decomposition needs degree >= 2");
    if (e < 2 || e >= d || d % e != 0)
        throw DomainError("inner degree must be a proper divisor >= 2 of the degree");
    int m = d / e;

    // Normal form fixes h monic with h(0) = 0; its upper coefficients are
    // forced one by one by the top e-1 coefficients of P below the leading one.
    Poly Pm = P * P.leading().inverse();
    std::vector<BaseElement> hc(static_cast<size_t>(e) + 1, BaseElement(0));
    hc[static_cast<size_t>(e)] = BaseElement(1);
    Poly h(hc);
    BaseElement minv = BaseElement(m).inverse();
    for (int j = 1; j < e; ++j) {
        Poly hm = h.pow(static_cast<unsigned>(m));
        BaseElement delta = (Pm.coeff(d - j) - hm.coeff(d - j)) * minv;
        if (!delta.is_zero()) h += Poly::monomial(e - j, delta);
    }

    std::vector<Poly> hpow(static_cast<size_t>(m) + 1, Poly(BaseElement(1)));
    for (int j = 1; j <= m; ++j) hpow[static_cast<size_t>(j)] = hpow[static_cast<size_t>(j - 1)] * h;

    Poly R = P;
    std::vector<BaseElement> gc(static_cast<size_t>(m) + 1, BaseElement(0));
    for (int j = m; j >= 0; --j) {
        BaseElement gj = R.coeff(e * j);
        gc[static_cast<size_t>(j)] = gj;
        if (!gj.is_zero()) R -= hpow[static_cast<size_t>(j)] * gj;
    }
    if (!(R == Poly())) return std::nullopt;
    return std::make_pair(Poly(std::move(gc)), std::move(h));
}

std::vector<Poly> complete_decomposition(const Poly& P) {
    int d = P.degree();
    if (d < 2) return {P};
    for (int e = 2; e < d; ++e) {
        if (d % e != 0) continue;
        if (auto gh = decompose_once(P, e)) {
            std::vector<Poly> out = complete_decomposition(gh->first);
            out.push_back(std::move(gh->second));
            return out;
        }
    }
    return {P};
}

std::string kind_name(ExceptionalityKind k) {
    switch (k) {
        case ExceptionalityKind::Linear: return "Linear";
        case ExceptionalityKind::MonomialConjugate: return "MonomialConjugate";
        case ExceptionalityKind::PlusChebyshevConjugate: return "PlusChebyshevConjugate";
        case ExceptionalityKind::MinusChebyshevConjugate: return "MinusChebyshevConjugate";
        case ExceptionalityKind::NonExceptional: return "NonExceptional";
        case ExceptionalityKind::UndecidableOverBaseField: return "UndecidableOverBaseField";
    }
    return "?";
}

ExceptionalityReport classify_exceptional(const Poly& P) {
    int d = P.degree();
    if (d <= 1) return {ExceptionalityKind::Linear, std::nullopt, std::nullopt};

    auto [Pt, T] = center(P);
    BaseElement gamma = T.intercept();
    BaseElement lead = Pt.coeff(d);

    bool pure_monomial = true;
    for (int j = 0; j < d; ++j)
        if (!Pt.coeff(j).is_zero()) { pure_monomial = false; break; }

    if (pure_monomial) {
        // Need P~(a*x) = a*x^d, i.e. a^(d-1) = 1/lead.
        BaseElement want = lead.inverse();
        if (auto a = nth_root(want, static_cast<unsigned>(d - 1)))
            return {ExceptionalityKind::MonomialConjugate, LinearPoly(*a, gamma), std::nullopt};
        std::ostringstream ob;
        ob << "y^" << (d - 1) << " - (" << want.str() << ")";
        return {ExceptionalityKind::UndecidableOverBaseField, std::nullopt, ob.str()};
    }

    // Chebyshev shape: support of P~ must match C_d exactly (every second
    // slot from the top, all nonzero there).
    Poly C = chebyshev(static_cast<unsigned>(d));
    bool shape_ok = true;
    for (int j = 0; j <= d; ++j)
        if (Pt.coeff(j).is_zero() != C.coeff(j).is_zero()) { shape_ok = false; break; }
    if (!shape_ok) return {ExceptionalityKind::NonExceptional, std::nullopt, std::nullopt};

    // Any a with P~(a*x) = e*a*C_d(x) forces a^2 = q from the top two
    // occupied slots; checking the remaining slots only needs q when d is
    // odd, and pins a itself when d is even.
    BaseElement q = Pt.coeff(d - 2) / (lead * C.coeff(d - 2));
    if (d % 2 == 1) {
        BaseElement eps = lead * bpow(q, static_cast<unsigned>((d - 1) / 2));
        bool plus = (eps == BaseElement(1));
        if (!plus && !(eps == BaseElement(-1)))
            return {ExceptionalityKind::NonExceptional, std::nullopt, std::nullopt};
        for (int j = 1; j <= d; j += 2) {
            if (!(Pt.coeff(j) * bpow(q, static_cast<unsigned>((j - 1) / 2)) == eps * C.coeff(j)))
                return {ExceptionalityKind::NonExceptional, std::nullopt, std::nullopt};
        }
        ExceptionalityKind kind = plus ? ExceptionalityKind::PlusChebyshevConjugate
                                       : ExceptionalityKind::MinusChebyshevConjugate;
        if (auto a = nth_root(q, 2))
            return {kind, LinearPoly(*a, gamma), std::nullopt};
        return {ExceptionalityKind::UndecidableOverBaseField, std::nullopt,
                "y^2 - (" + q.str() + ")"};
    }

    // Even degree: a = 1/(lead * q^((d-2)/2)) is forced rationally, so the
    // answer is always decided; the sign of a flips between the +C and -C
    // normal forms, report the + one.
    BaseElement a = (lead * bpow(q, static_cast<unsigned>((d - 2) / 2))).inverse();
    if (!(a * a == q)) return {ExceptionalityKind::NonExceptional, std::nullopt, std::nullopt};
    for (int j = 0; j <= d; j += 2) {
        if (!(Pt.coeff(j) * bpow(a, static_cast<unsigned>(j)) == a * C.coeff(j)))
            return {ExceptionalityKind::NonExceptional, std::nullopt, std::nullopt};
    }
    return {ExceptionalityKind::PlusChebyshevConjugate, LinearPoly(a, gamma), std::nullopt};
}

Poly parse_poly(const std::string& text) {
    auto [num, den] = parse_detail::parse_x_rational(text);
    if (den.degree() > 0)
        throw ParseError("not a polynomial in x: division by x-dependent expression");
    BaseElement d0 = den.coeff(0);
    if (d0.is_zero()) throw ParseError("division by zero");
    return num * d0.inverse();
}

namespace {

// Coefficients that are plain rationals get their sign folded into the
// chain of +/- between terms; anything involving s is wrapped in parens.
void append_term(std::ostringstream& out, bool first, const BaseElement& b, int k) {
    bool neg = false;
    std::string body;
    if (b.is_rational()) {
        Scalar v = b.as_scalar();
        if (v < 0) { neg = true; v = -v; }
        std::string cs = to_string(v);
        bool fraction = cs.find('/') != std::string::npos;
        if (k == 0) {
            body = cs;
        } else if (v == 1) {
            body.clear();
        } else {
            body = fraction ? "(" + cs + ")" : cs;
        }
    } else {
        body = "(" + b.str() + ")";
    }
    if (first) {
        if (neg) out << "-";
    } else {
        out << (neg ? " - " : " + ");
    }
    if (k == 0) {
        out << body;
        return;
    }
    if (!body.empty()) out << body << "*";
    out << "x";
    if (k > 1) out << "^" << k;
}

} // namespace

std::string poly_str(const Poly& p) {
    if (p.degree() < 0) return "0";
    std::ostringstream out;
    bool first = true;
    for (int k = p.degree(); k >= 0; --k) {
        const BaseElement& b = p.coeff(k);
        if (b.is_zero()) continue;
        append_term(out, first, b, k);
        first = false;
    }
    return out.str();
}

} // namespace ritt
