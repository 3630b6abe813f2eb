#pragma once

#include <cassert>
#include <optional>
#include <utility>
#include <vector>

#include "ritt/errors.hpp"

namespace ritt {

// Dense univariate polynomial over an exact field F. F must be
// constructible from int, equality-comparable, and support + - * /.
// Invariant: coefficient vector has no trailing zeros; empty means the
// zero polynomial. degree() of the zero polynomial is -1.
template <class F>
class UPoly {
public:
    UPoly() = default;

    explicit UPoly(F constant) {
        if (!(constant == F(0))) c_.push_back(std::move(constant));
    }

    explicit UPoly(std::vector<F> coeffs) : c_(std::move(coeffs)) { trim(); }

    static UPoly monomial(int deg, F coeff = F(1)) {
        assert(deg >= 0);
        if (coeff == F(0)) return UPoly{};
        std::vector<F> v(static_cast<std::size_t>(deg) + 1, F(0));
        v.back() = std::move(coeff);
        return UPoly(std::move(v));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    F coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c_.size())) return F(0);
        return c_[static_cast<std::size_t>(i)];
    }

    F leading() const { return c_.empty() ? F(0) : c_.back(); }
    const std::vector<F>& coeffs() const { return c_; }

    bool operator==(const UPoly& o) const { return c_ == o.c_; }
    bool operator!=(const UPoly& o) const { return !(*this == o); }

    UPoly operator-() const {
        UPoly r = *this;
        for (auto& x : r.c_) x = F(0) - x;
        return r;
    }

    UPoly& operator+=(const UPoly& o) {
        if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), F(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
        trim();
        return *this;
    }

    UPoly& operator-=(const UPoly& o) {
        if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), F(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
        trim();
        return *this;
    }

    friend UPoly operator+(UPoly a, const UPoly& b) { a += b; return a; }
    friend UPoly operator-(UPoly a, const UPoly& b) { a -= b; return a; }

    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return UPoly{};
        std::vector<F> r(a.c_.size() + b.c_.size() - 1, F(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == F(0)) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
        }
        return UPoly(std::move(r));
    }

    UPoly& operator*=(const UPoly& o) { *this = *this * o; return *this; }

    // Multiplication / exact division by a field element.
    friend UPoly operator*(UPoly a, const F& k) {
        if (k == F(0)) return UPoly{};
        for (auto& x : a.c_) x = x * k;
        return a;
    }
    friend UPoly operator*(const F& k, UPoly a) { return std::move(a) * k; }

    friend UPoly operator/(UPoly a, const F& k) {
        for (auto& x : a.c_) x = x / k;
        return a;
    }

    // Euclidean division: a = q*b + r with deg r < deg b.
    static std::pair<UPoly, UPoly> divmod(UPoly a, const UPoly& b) {
        if (b.is_zero()) throw DomainError("polynomial division by zero");
        UPoly q;
        const int db = b.degree();
        const F lb = b.leading();
        while (!a.is_zero() && a.degree() >= db) {
            const int shift = a.degree() - db;
            F factor = a.leading() / lb;
            // a -= factor * x^shift * b, in place.
            for (std::size_t i = 0; i < b.c_.size(); ++i) {
                auto& dst = a.c_[i + static_cast<std::size_t>(shift)];
                dst = dst - factor * b.c_[i];
            }
            a.trim_top_only();
            if (q.c_.size() < static_cast<std::size_t>(shift) + 1)
                q.c_.resize(static_cast<std::size_t>(shift) + 1, F(0));
            q.c_[static_cast<std::size_t>(shift)] = std::move(factor);
        }
        a.trim();
        q.trim();
        return {std::move(q), std::move(a)};
    }

    UPoly pow(unsigned n) const {
        UPoly base = *this;
        UPoly r(F(1));
        while (n != 0) {
            if (n & 1u) r *= base;
            n >>= 1u;
            if (n != 0) base *= base;
        }
        return r;
    }

    F eval(const F& x) const {
        F r(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
        return r;
    }

    // Functional composition this(inner), via Horner on polynomials.
    UPoly compose(const UPoly& inner) const {
        UPoly r;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            r = r * inner;
            r += UPoly(*it);
        }
        return r;
    }

    UPoly derivative() const {
        if (c_.size() <= 1) return UPoly{};
        std::vector<F> r(c_.size() - 1, F(0));
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * F(static_cast<int>(i));
        return UPoly(std::move(r));
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == F(0)) c_.pop_back();
    }
    // After in-place subtraction the top coefficient is known to cancel.
    void trim_top_only() { trim(); }

    std::vector<F> c_;
};

// Monic gcd over a field.
template <class F>
UPoly<F> poly_gcd(UPoly<F> a, UPoly<F> b) {
    while (!b.is_zero()) {
        auto [q, r] = UPoly<F>::divmod(std::move(a), b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero()) a = a / a.leading();
    return a;
}

// Monic n-th root of a monic polynomial, by triangular coefficient matching;
// empty when no such root exists over F.
template <class F>
std::optional<UPoly<F>> monic_nth_root(const UPoly<F>& q, unsigned n) {
    if (n == 0) throw DomainError("0th root of polynomial");
    if (q.is_zero() || !(q.leading() == F(1))) return std::nullopt;
    if (n == 1) return q;
    const int deg = q.degree();
    if (deg % static_cast<int>(n) != 0) return std::nullopt;
    const int m = deg / static_cast<int>(n);
    if (m == 0) return UPoly<F>(F(1));
    std::vector<F> r(static_cast<std::size_t>(m) + 1, F(0));
    r[static_cast<std::size_t>(m)] = F(1);
    for (int j = 1; j <= m; ++j) {
        UPoly<F> cur{std::vector<F>(r)};
        UPoly<F> p = cur.pow(n);
        F got = p.coeff(deg - j);
        F want = q.coeff(deg - j);
        r[static_cast<std::size_t>(m - j)] = (want - got) / F(static_cast<int>(n));
    }
    UPoly<F> root(std::move(r));
    if (root.pow(n) == q) return root;
    return std::nullopt;
}

} // namespace ritt
