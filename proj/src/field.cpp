#include "ritt/field.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cctype>
#include <sstream>

namespace ritt {

// ---------------------------------------------------------------------------
// printing

std::string to_string(const Scalar& x) { return x.str(); }

namespace {

bool is_simple_atom(const std::string& s) {
    // a bare non-negative integer, or s, or s^k
    if (s.empty()) return false;
    std::size_t i = 0;
    if (s[0] == 's') {
        if (s.size() == 1) return true;
        if (s[1] != '^') return false;
        i = 2;
        if (i == s.size()) return false;
    }
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::string term_string(const Scalar& coeff, int deg, const std::string& var) {
    std::ostringstream out;
    const Scalar one(1);
    if (deg == 0) {
        out << coeff.str();
        return out.str();
    }
    if (coeff == one) {
        // nothing
    } else if (coeff == Scalar(-1)) {
        out << "-";
    } else {
        out << coeff.str() << "*";
    }
    out << var;
    if (deg > 1) out << "^" << deg;
    return out.str();
}

} // namespace

std::string to_string(const QPoly& p, const std::string& var) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (int d = p.degree(); d >= 0; --d) {
        Scalar c = p.coeff(d);
        if (c == Scalar(0)) continue;
        if (first) {
            out << term_string(c, d, var);
            first = false;
        } else if (c > 0) {
            out << " + " << term_string(c, d, var);
        } else {
            out << " - " << term_string(Scalar(-c), d, var);
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// BaseElement

BaseElement::BaseElement(QPoly numerator, QPoly denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (den_.is_zero()) throw DomainError("division by zero in Q(s)");
    if (num_.is_zero()) {
        den_ = QPoly(Scalar(1));
        return;
    }
    QPoly g = poly_gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = QPoly::divmod(num_, g).first;
        den_ = QPoly::divmod(den_, g).first;
    }
    Scalar lc = den_.leading();
    if (lc != Scalar(1)) {
        den_ = den_ / lc;
        num_ = num_ / lc;
    }
}

BaseElement BaseElement::s() {
    return BaseElement(QPoly(std::vector<Scalar>{Scalar(0), Scalar(1)}));
}

Scalar BaseElement::as_scalar() const {
    if (!is_rational()) throw DomainError("element of Q(s) is not a rational constant: " + str());
    return num_.coeff(0);
}

BaseElement BaseElement::operator-() const {
    BaseElement r = *this;
    r.num_ = -r.num_;
    return r;
}

BaseElement operator+(const BaseElement& a, const BaseElement& b) {
    if (a.den_ == b.den_) return BaseElement(a.num_ + b.num_, a.den_);
    return BaseElement(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

BaseElement operator-(const BaseElement& a, const BaseElement& b) {
    if (a.den_ == b.den_) return BaseElement(a.num_ - b.num_, a.den_);
    return BaseElement(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

BaseElement operator*(const BaseElement& a, const BaseElement& b) {
    return BaseElement(a.num_ * b.num_, a.den_ * b.den_);
}

BaseElement operator/(const BaseElement& a, const BaseElement& b) {
    if (b.is_zero()) throw DomainError("division by zero in Q(s)");
    return BaseElement(a.num_ * b.den_, a.den_ * b.num_);
}

BaseElement BaseElement::inverse() const {
    if (is_zero()) throw DomainError("inverse of zero in Q(s)");
    return BaseElement(den_, num_);
}

std::string BaseElement::str() const {
    std::string n = to_string(num_);
    if (den_ == QPoly(Scalar(1))) return n;
    std::string d = to_string(den_);
    if (!is_simple_atom(n)) n = "(" + n + ")";
    if (!is_simple_atom(d)) d = "(" + d + ")";
    return n + "/" + d;
}

// ---------------------------------------------------------------------------
// FieldAutomorphism

FieldAutomorphism::FieldAutomorphism(Scalar a, Scalar b, Scalar c, Scalar d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    if (a_ * d_ - b_ * c_ == Scalar(0))
        throw DomainError("degenerate substitution: determinant a*d - b*c is zero");
}

FieldAutomorphism FieldAutomorphism::identity() {
    return FieldAutomorphism(Scalar(1), Scalar(0), Scalar(0), Scalar(1));
}

FieldAutomorphism FieldAutomorphism::shift(const Scalar& t) {
    return FieldAutomorphism(Scalar(1), t, Scalar(0), Scalar(1));
}

FieldAutomorphism FieldAutomorphism::scale(const Scalar& k) {
    return FieldAutomorphism(k, Scalar(0), Scalar(0), Scalar(1));
}

bool FieldAutomorphism::is_identity() const {
    return same_map(*this, identity());
}

FieldAutomorphism FieldAutomorphism::inverse() const {
    return FieldAutomorphism(d_, -b_, -c_, a_);
}

bool same_map(const FieldAutomorphism& f, const FieldAutomorphism& g) {
    const Scalar vf[4] = {f.a_, f.b_, f.c_, f.d_};
    const Scalar vg[4] = {g.a_, g.b_, g.c_, g.d_};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (vf[i] * vg[j] != vf[j] * vg[i]) return false;
    return true;
}

std::string FieldAutomorphism::str() const {
    QPoly top(std::vector<Scalar>{b_, a_});
    QPoly bot(std::vector<Scalar>{d_, c_});
    BaseElement img(top, bot);
    return "s -> " + img.str();
}

namespace {

// p((a*s+b)/(c*s+d)) as an element of Q(s).
BaseElement apply_to_qpoly(const FieldAutomorphism& aut, const QPoly& p) {
    const int m = p.degree();
    if (m <= 0) return p.is_zero() ? BaseElement() : BaseElement(p.coeff(0));
    QPoly top(std::vector<Scalar>{aut.b(), aut.a()});
    QPoly bot(std::vector<Scalar>{aut.d(), aut.c()});
    QPoly num;  // sum p_i * top^i * bot^(m-i)
    for (int i = 0; i <= m; ++i) {
        Scalar ci = p.coeff(i);
        if (ci == Scalar(0)) continue;
        num += (top.pow(static_cast<unsigned>(i)) * bot.pow(static_cast<unsigned>(m - i))) * ci;
    }
    return BaseElement(std::move(num), bot.pow(static_cast<unsigned>(m)));
}

} // namespace

BaseElement apply_aut(const FieldAutomorphism& aut, const BaseElement& x) {
    return apply_to_qpoly(aut, x.num()) / apply_to_qpoly(aut, x.den());
}

FieldAutomorphism compose_auts(const FieldAutomorphism& f, const FieldAutomorphism& g) {
    return FieldAutomorphism(f.a() * g.a() + f.b() * g.c(),
                             f.a() * g.b() + f.b() * g.d(),
                             f.c() * g.a() + f.d() * g.c(),
                             f.c() * g.b() + f.d() * g.d());
}

bool check_commuting(const FieldAutomorphism& f, const FieldAutomorphism& g) {
    return same_map(compose_auts(f, g), compose_auts(g, f));
}

// ---------------------------------------------------------------------------
// roots

namespace {

// Floor n-th root of v >= 0, exact-checked by the caller.
Int int_nth_root_floor(const Int& v, unsigned n) {
    if (v == 0 || v == 1) return v;
    const unsigned bits = boost::multiprecision::msb(v) + 1;
    Int hi = Int(1) << (bits / n + 1);
    Int lo = 0;
    while (lo < hi - 1) {
        Int mid = (lo + hi) / 2;
        if (boost::multiprecision::pow(mid, n) <= v)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::optional<Int> int_nth_root(const Int& v, unsigned n) {
    if (v < 0) return std::nullopt;
    Int r = int_nth_root_floor(v, n);
    if (boost::multiprecision::pow(r, n) == v) return r;
    return std::nullopt;
}

} // namespace

std::optional<Scalar> nth_root(const Scalar& x, unsigned n) {
    if (n == 0) throw DomainError("0th root");
    if (n == 1) return x;
    if (x < 0) {
        if (n % 2 == 0) return std::nullopt;
        auto r = nth_root(Scalar(-x), n);
        if (!r) return std::nullopt;
        return Scalar(-*r);
    }
    auto rn = int_nth_root(boost::multiprecision::numerator(x), n);
    auto rd = int_nth_root(boost::multiprecision::denominator(x), n);
    if (!rn || !rd) return std::nullopt;
    return Scalar(Scalar(*rn) / Scalar(*rd));
}

std::optional<BaseElement> nth_root(const BaseElement& x, unsigned n) {
    if (n == 0) throw DomainError("0th root");
    if (n == 1) return x;
    if (x.is_zero()) return BaseElement();
    Scalar lead = x.num().leading();
    auto rl = nth_root(lead, n);
    if (!rl) return std::nullopt;
    QPoly num_monic = x.num() / lead;
    auto rn = monic_nth_root(num_monic, n);
    auto rd = monic_nth_root(x.den(), n);
    if (!rn || !rd) return std::nullopt;
    return BaseElement(*rn * *rl, *rd);
}

// ---------------------------------------------------------------------------
// parsing

namespace parse_detail {

struct Lexer {
    explicit Lexer(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool done() {
        skip_ws();
        return pos >= s.size();
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    char take() {
        skip_ws();
        if (pos >= s.size()) throw ParseError("unexpected end of expression: " + s);
        return s[pos++];
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    Int integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer at position " + std::to_string(start) + " in: " + s);
        return Int(s.substr(start, pos - start));
    }

    const std::string& s;
    std::size_t pos = 0;
};

} // namespace parse_detail

namespace {

using XP = UPoly<BaseElement>;

// Rational expression in x over Q(s); denominators are carried along
// unreduced and validated at the end.
struct XRat {
    XP num{BaseElement(1)};
    XP den{BaseElement(1)};
};

XRat xr_const(BaseElement v) { return {XP(std::move(v)), XP(BaseElement(1))}; }

XRat operator+(const XRat& a, const XRat& b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
}
XRat operator-(const XRat& a, const XRat& b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
}
XRat operator*(const XRat& a, const XRat& b) { return {a.num * b.num, a.den * b.den}; }
XRat operator/(const XRat& a, const XRat& b) {
    if (b.num.is_zero()) throw ParseError("division by zero in expression");
    return {a.num * b.den, a.den * b.num};
}
XRat neg(const XRat& a) { return {-a.num, a.den}; }
XRat xr_pow(const XRat& a, unsigned e) { return {a.num.pow(e), a.den.pow(e)}; }

class ExprParser {
public:
    ExprParser(const std::string& text, bool allow_x) : lex_(text), allow_x_(allow_x) {}

    XRat parse() {
        XRat v = expr();
        if (!lex_.done()) throw ParseError("trailing input at position " + std::to_string(lex_.pos) + " in: " + lex_.s);
        return v;
    }

private:
    XRat expr() {
        XRat v = lex_.accept('-') ? neg(term()) : term();
        for (;;) {
            if (lex_.accept('+'))
                v = v + term();
            else if (lex_.accept('-'))
                v = v - term();
            else
                return v;
        }
    }

    XRat term() {
        XRat v = factor();
        for (;;) {
            if (lex_.accept('*'))
                v = v * factor();
            else if (lex_.accept('/'))
                v = v / factor();
            else
                return v;
        }
    }

    XRat factor() {
        if (lex_.accept('-')) return neg(factor());
        XRat base = atom();
        if (lex_.accept('^')) {
            Int e = lex_.integer();
            if (e < 0 || e > 4096) throw ParseError("exponent out of range in: " + lex_.s);
            return xr_pow(base, static_cast<unsigned>(e));
        }
        return base;
    }

    XRat atom() {
        char c = lex_.peek();
        if (c == '(') {
            lex_.take();
            XRat v = expr();
            if (!lex_.accept(')')) throw ParseError("missing ')' in: " + lex_.s);
            return v;
        }
        if (c == 's') {
            lex_.take();
            return xr_const(BaseElement::s());
        }
        if (c == 'x') {
            if (!allow_x_) throw ParseError("the variable x is not allowed here: " + lex_.s);
            lex_.take();
            return {XP::monomial(1), XP(BaseElement(1))};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return xr_const(BaseElement(Scalar(lex_.integer())));
        }
        throw ParseError(std::string("unexpected character '") + c + "' in: " + lex_.s);
    }

    parse_detail::Lexer lex_;
    bool allow_x_;
};

} // namespace

namespace parse_detail {

// Shared with the polynomial parser: full rational expression in x.
std::pair<UPoly<BaseElement>, UPoly<BaseElement>> parse_x_rational(const std::string& text) {
    ExprParser p(text, /*allow_x=*/true);
    XRat v = p.parse();
    return {std::move(v.num), std::move(v.den)};
}

} // namespace parse_detail

Scalar parse_scalar(const std::string& text) {
    BaseElement v = parse_base_element(text);
    if (!v.is_rational()) throw ParseError("expected a rational constant: " + text);
    return v.as_scalar();
}

BaseElement parse_base_element(const std::string& text) {
    ExprParser p(text, /*allow_x=*/false);
    XRat v = p.parse();
    // x was disallowed, so both parts are constants in x.
    BaseElement n = v.num.coeff(0);
    BaseElement d = v.den.coeff(0);
    if (d.is_zero()) throw ParseError("division by zero in expression: " + text);
    return n / d;
}

FieldAutomorphism parse_automorphism(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4)
        throw ParseError("substitution must be four comma-separated rationals a,b,c,d: " + text);
    return FieldAutomorphism(parse_scalar(parts[0]), parse_scalar(parts[1]),
                             parse_scalar(parts[2]), parse_scalar(parts[3]));
}

} // namespace ritt
