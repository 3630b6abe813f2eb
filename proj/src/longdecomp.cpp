#include "ritt/longdecomp.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace ritt {

namespace {

long long floordiv(long long a, long long b) {
    long long q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

bool is_prime_int(int n) {
    if (n < 2) return false;
    for (int d = 2; 1LL * d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Poly xpow(int n) { return Poly::monomial(n); }

Poly sigma_pow(const FieldAutomorphism& sigma, long long m, Poly P) {
    if (m == 0) return P;
    const FieldAutomorphism step = m > 0 ? sigma : sigma.inverse();
    for (long long t = m > 0 ? m : -m; t > 0; --t) P = apply_aut(step, P);
    return P;
}

LinearPoly sigma_pow(const FieldAutomorphism& sigma, long long m, LinearPoly L) {
    if (m == 0) return L;
    const FieldAutomorphism step = m > 0 ? sigma : sigma.inverse();
    for (long long t = m > 0 ? m : -m; t > 0; --t) L = apply_aut(step, L);
    return L;
}

// P / x^r, assuming the low coefficients vanish.
Poly shift_down(const Poly& P, int r) {
    std::vector<BaseElement> c;
    c.reserve(static_cast<std::size_t>(P.degree() - r) + 1);
    for (int j = r; j <= P.degree(); ++j) c.push_back(P.coeff(j));
    return Poly(std::move(c));
}

// v(y^l): coefficients of v spread out with gap l.
Poly spaced_lift(const Poly& v, int l) {
    if (v.is_zero()) return Poly{};
    std::vector<BaseElement> c(static_cast<std::size_t>(v.degree()) * l + 1, BaseElement(0));
    for (int j = 0; j <= v.degree(); ++j) c[static_cast<std::size_t>(j) * l] = v.coeff(j);
    return Poly(std::move(c));
}

// Inner translation making the subleading coefficient vanish.
LinearPoly centering_translation(const Poly& P) { return center(P).second; }

}  // namespace

// ---------------------------------------------------------------------------
// Shared helpers.

bool is_indecomposable(const Poly& P) {
    return complete_decomposition(P).size() == 1;
}

int low_exponent(const Poly& P) {
    if (P.is_zero()) return -1;
    for (int j = 0; j <= P.degree(); ++j)
        if (!(P.coeff(j) == BaseElement(0))) return j;
    return -1;
}

// ---------------------------------------------------------------------------
// Ritt forms.

Poly RittForm::represented() const {
    Poly u_spread = spaced_lift(core, inner_period);
    return xpow(k_exp) * u_spread.pow(static_cast<unsigned>(outer_power));
}

std::string RittForm::str() const {
    std::ostringstream o;
    o << "k=" << k_exp << " l=" << inner_period << " n=" << outer_power
      << " u=" << poly_str(core);
    return o.str();
}

std::string verdict_name(SwapVerdict v) {
    switch (v) {
        case SwapVerdict::Unswappable: return "Unswappable";
        case SwapVerdict::CFreeSwappable: return "CFreeSwappable";
        case SwapVerdict::TypeC: return "TypeC";
    }
    return "?";
}

std::string reason_name(WallReason r) {
    switch (r) {
        case WallReason::UnswappableFactor: return "UnswappableFactor";
        case WallReason::GatelessBoundary: return "GatelessBoundary";
        case WallReason::CFreePrewall: return "CFreePrewall";
        case WallReason::UnownedGate: return "UnownedGate";
    }
    return "?";
}

std::optional<std::pair<LinearPoly, LinearPoly>> power_normalizers(const Poly& P) {
    const int d = P.degree();
    if (d < 2) return std::nullopt;
    LinearPoly B = centering_translation(P);
    Poly P1 = compose(P, B);
    const BaseElement lead = P1.leading();
    Poly probe = Poly::monomial(d, lead) + Poly(P1.coeff(0));
    if (P1 != probe) return std::nullopt;
    LinearPoly A(BaseElement(1) / lead, (BaseElement(0) - P1.coeff(0)) / lead);
    return std::make_pair(A, B);
}

std::optional<std::pair<LinearPoly, LinearPoly>> chebyshev_normalizers(const Poly& P) {
    const int d = P.degree();
    if (d < 3 || d % 2 == 0) return std::nullopt;
    LinearPoly T = centering_translation(P);
    Poly P1 = compose(P, T);
    for (int j = 2; j < d; j += 2)
        if (!(P1.coeff(j) == BaseElement(0))) return std::nullopt;
    const Poly target = chebyshev(static_cast<unsigned>(d));
    // a * P1(beta x) + a0 == C_d; ratio of the top two odd terms pins beta^2.
    if (P1.coeff(d - 2) == BaseElement(0)) return std::nullopt;
    BaseElement w = (BaseElement(0) - P1.coeff(d - 2)) / (BaseElement(d) * P1.coeff(d));
    auto beta = nth_root(w, 2);
    if (!beta || beta->is_zero()) return std::nullopt;
    BaseElement bd = *beta;
    BaseElement bpow(1);
    std::vector<BaseElement> beta_pows(static_cast<std::size_t>(d) + 1);
    for (int j = 0; j <= d; ++j) {
        beta_pows[static_cast<std::size_t>(j)] = bpow;
        bpow = bpow * bd;
    }
    BaseElement a = BaseElement(1) / (P1.coeff(d) * beta_pows[static_cast<std::size_t>(d)]);
    for (int j = 1; j <= d; j += 2) {
        if (!(a * P1.coeff(j) * beta_pows[static_cast<std::size_t>(j)] == target.coeff(j)))
            return std::nullopt;
    }
    BaseElement a0 = BaseElement(0) - a * P1.coeff(0);
    LinearPoly A(a, a0);
    LinearPoly B(bd, T.intercept());
    if (compose(A, compose(P, B)) != target) return std::nullopt;
    return std::make_pair(A, B);
}

namespace {

// Spacing/power detection at one fixed inner translation.
std::optional<RittFormResult> ritt_form_at(const Poly& P, const BaseElement& beta0) {
    const LinearPoly B(BaseElement(1), beta0);
    Poly P1 = compose(P, B);
    Poly V = P1 - Poly(P1.coeff(0));
    if (V.is_zero()) return std::nullopt;
    const int r = low_exponent(V);
    int D = 0;
    for (int j = r; j <= V.degree(); ++j)
        if (!(V.coeff(j) == BaseElement(0))) D = std::gcd(D, j - r);
    if (D == 0) return std::nullopt;  // bare monomial: handled by the power branch
    std::vector<BaseElement> vc(static_cast<std::size_t>((V.degree() - r) / D) + 1,
                                BaseElement(0));
    for (int j = r; j <= V.degree(); ++j)
        if (!(V.coeff(j) == BaseElement(0)))
            vc[static_cast<std::size_t>((j - r) / D)] = V.coeff(j);
    Poly v{std::move(vc)};
    const BaseElement c = v.leading();
    Poly w = v / c;
    int n = 1;
    for (bool again = true; again && w.degree() >= 2;) {
        again = false;
        for (int q = 2; q <= w.degree(); ++q) {
            if (!is_prime_int(q) || w.degree() % q != 0) continue;
            if (auto root = monic_nth_root(w, static_cast<unsigned>(q))) {
                w = *root;
                n *= q;
                again = true;
                break;
            }
        }
    }
    int m = 0;
    for (int j = 1; j <= w.degree(); ++j)
        if (!(w.coeff(j) == BaseElement(0))) m = std::gcd(m, j);
    Poly u = w;
    if (m >= 2) {
        std::vector<BaseElement> uc(static_cast<std::size_t>(w.degree() / m) + 1,
                                    BaseElement(0));
        for (int j = 0; j <= w.degree(); ++j)
            if (!(w.coeff(j) == BaseElement(0)))
                uc[static_cast<std::size_t>(j / m)] = w.coeff(j);
        u = Poly{std::move(uc)};
    } else {
        m = 1;
    }
    const int ell = D * m;
    if (ell == 1 && n == 1) return std::nullopt;
    RittForm form;
    form.k_exp = r;
    form.inner_period = ell;
    form.outer_power = n;
    form.core = std::move(u);
    LinearPoly A(BaseElement(1) / c, (BaseElement(0) - P1.coeff(0)) / c);
    return RittFormResult{std::move(form), A, B};
}

}  // namespace

std::optional<RittFormResult> to_ritt_form(const Poly& P) {
    const int d = P.degree();
    if (d < 2) throw DomainError("to_ritt_form: degree must be >= 2");
    if (chebyshev_normalizers(P)) return std::nullopt;
    if (auto pn = power_normalizers(P)) {
        RittForm form;
        form.k_exp = d;
        form.inner_period = 1;
        form.outer_power = 1;
        form.core = Poly(BaseElement(1));
        return RittFormResult{std::move(form), pn->first, pn->second};
    }
    // Inner translation candidates: none, then the centering one. A shape
    // x^k u(x)^n hidden behind some other translation is not recovered here.
    if (auto rf = ritt_form_at(P, BaseElement(0))) return rf;
    const BaseElement t = centering_translation(P).intercept();
    if (!t.is_zero())
        if (auto rf = ritt_form_at(P, t)) return rf;
    return std::nullopt;
}

SwapClass classify_swappable(const Poly& P) {
    SwapClass out;
    if (auto cn = chebyshev_normalizers(P)) {
        out.verdict = SwapVerdict::TypeC;
        out.normalizers = *cn;
        return out;
    }
    if (auto rf = to_ritt_form(P)) {
        out.verdict = SwapVerdict::CFreeSwappable;
        out.normalizers = std::make_pair(rf->outer, rf->inner);
        out.ritt_witness = rf->form;
        return out;
    }
    out.verdict = SwapVerdict::Unswappable;
    return out;
}

// ---------------------------------------------------------------------------
// LongDecomposition / SkewPeriodicLinears.

LongDecomposition::LongDecomposition(std::vector<Poly> factors, FieldAutomorphism sigma)
    : f_(std::move(factors)), sigma_(std::move(sigma)) {
    if (f_.empty()) throw DomainError("long decomposition needs at least one factor");
    for (std::size_t j = 0; j < f_.size(); ++j) {
        if (f_[j].degree() < 2)
            throw DomainError("factor " + std::to_string(j + 1) + " has degree < 2");
        if (!is_indecomposable(f_[j]))
            throw DomainError("factor " + std::to_string(j + 1) + " is decomposable");
    }
}

Poly LongDecomposition::factor(long long i) const {
    const long long k = period();
    const long long m = floordiv(i - 1, k);
    const long long j0 = (i - 1) - m * k;
    return sigma_pow(sigma_, m, f_[static_cast<std::size_t>(j0)]);
}

Poly LongDecomposition::compose_period() const {
    Poly r = f_.front();
    for (std::size_t j = 1; j < f_.size(); ++j) r = compose(f_[j], r);
    return r;
}

bool LongDecomposition::operator==(const LongDecomposition& o) const {
    return f_ == o.f_ && same_map(sigma_, o.sigma_);
}

std::string LongDecomposition::str() const {
    std::ostringstream o;
    o << "period " << period() << "; sigma " << sigma_.a() << "," << sigma_.b() << ","
      << sigma_.c() << "," << sigma_.d();
    for (int j = period(); j >= 1; --j)
        o << "; f" << j << " = " << poly_str(f_[static_cast<std::size_t>(j - 1)]);
    return o.str();
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

LongDecomposition parse_decomposition(const std::string& text) {
    std::optional<int> period;
    FieldAutomorphism sigma = FieldAutomorphism::identity();
    std::vector<std::pair<int, Poly>> factors;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(';', pos);
        std::string field = trimmed(text.substr(pos, next == std::string::npos
                                                          ? std::string::npos
                                                          : next - pos));
        pos = next == std::string::npos ? text.size() + 1 : next + 1;
        if (field.empty()) continue;
        if (field.rfind("period", 0) == 0) {
            period = std::stoi(trimmed(field.substr(6)));
        } else if (field.rfind("sigma", 0) == 0) {
            sigma = parse_automorphism(trimmed(field.substr(5)));
        } else if (field.size() > 1 && field[0] == 'f') {
            std::size_t eq = field.find('=');
            if (eq == std::string::npos)
                throw ParseError("factor field without '=': " + field);
            int idx = std::stoi(trimmed(field.substr(1, eq - 1)));
            factors.emplace_back(idx, parse_poly(trimmed(field.substr(eq + 1))));
        } else {
            throw ParseError("unrecognized decomposition field: " + field);
        }
    }
    if (factors.empty()) throw ParseError("decomposition has no factors");
    const int k = static_cast<int>(factors.size());
    if (period && *period != k)
        throw ParseError("declared period does not match the factor count");
    std::vector<Poly> slots(static_cast<std::size_t>(k), Poly{});
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (auto& [idx, p] : factors) {
        if (idx < 1 || idx > k || seen[static_cast<std::size_t>(idx - 1)])
            throw ParseError("factor indices must cover 1..k exactly once");
        seen[static_cast<std::size_t>(idx - 1)] = true;
        slots[static_cast<std::size_t>(idx - 1)] = std::move(p);
    }
    return LongDecomposition(std::move(slots), std::move(sigma));
}

SkewPeriodicLinears::SkewPeriodicLinears(std::vector<LinearPoly> entries,
                                         FieldAutomorphism sigma)
    : L_(std::move(entries)), sigma_(std::move(sigma)) {
    if (L_.empty()) throw DomainError("skew-periodic linears need at least one entry");
}

LinearPoly SkewPeriodicLinears::entry(long long i) const {
    const long long k = period();
    const long long m = floordiv(i - 1, k);
    const long long j0 = (i - 1) - m * k;
    return sigma_pow(sigma_, m, L_[static_cast<std::size_t>(j0)]);
}

LongDecomposition SkewPeriodicLinears::apply(const LongDecomposition& f) const {
    if (f.period() != period() || !same_map(f.sigma(), sigma_))
        throw DomainError("gauge action needs matching period and twist");
    std::vector<Poly> h;
    h.reserve(L_.size());
    for (int j = 1; j <= period(); ++j)
        h.push_back(compose(entry(j + 1).inverse(),
                            compose(f.factors()[static_cast<std::size_t>(j - 1)], entry(j))));
    return LongDecomposition(std::move(h), sigma_);
}

std::string SkewPeriodicLinears::str() const {
    std::ostringstream o;
    o << "period " << period() << "; sigma " << sigma_.a() << "," << sigma_.b() << ","
      << sigma_.c() << "," << sigma_.d();
    for (int j = period(); j >= 1; --j)
        o << "; L" << j << " = " << L_[static_cast<std::size_t>(j - 1)].str();
    return o.str();
}

// ---------------------------------------------------------------------------
// Swap matchers. Each returns the witness data for
//   (L^{-1} f_{i+1} M) o (M^{-1} f_i N) = R1 o S1  ->  R2 o S2
// with R1 o S1 == R2 o S2 an exact identity instance.

namespace {

struct PairMatch {
    LinearPoly L, M, N;
    Poly R1, S1, R2, S2;
};

// One two-sided representative A(P(B(x))) == x^k * v(x^p), v(0) != 0.
struct SpacedRep {
    int k = 0;
    Poly v;
    LinearPoly A, B;
};

// Candidate spaced representatives: constant kept (k = 0) first, then the
// constant-killing one. The inner translation is forced to center P.
std::vector<SpacedRep> spaced_reps(const Poly& P, int p) {
    std::vector<SpacedRep> reps;
    LinearPoly B = centering_translation(P);
    Poly P1 = compose(P, B);
    const bool const_nonzero = !(P1.coeff(0) == BaseElement(0));
    if (const_nonzero) {
        bool ok = true;
        for (int j = 1; j <= P1.degree() && ok; ++j)
            if (!(P1.coeff(j) == BaseElement(0)) && j % p != 0) ok = false;
        if (ok) {
            std::vector<BaseElement> vc(static_cast<std::size_t>(P1.degree() / p) + 1,
                                        BaseElement(0));
            for (int j = 0; j <= P1.degree(); ++j)
                if (!(P1.coeff(j) == BaseElement(0)))
                    vc[static_cast<std::size_t>(j / p)] = P1.coeff(j);
            reps.push_back(SpacedRep{0, Poly{std::move(vc)}, LinearPoly::identity(), B});
        }
    }
    Poly V = P1 - Poly(P1.coeff(0));
    if (!V.is_zero()) {
        const int k = low_exponent(V);
        bool ok = true;
        for (int j = k; j <= V.degree() && ok; ++j)
            if (!(V.coeff(j) == BaseElement(0)) && (j - k) % p != 0) ok = false;
        if (ok) {
            std::vector<BaseElement> vc(static_cast<std::size_t>((V.degree() - k) / p) + 1,
                                        BaseElement(0));
            for (int j = k; j <= V.degree(); ++j)
                if (!(V.coeff(j) == BaseElement(0)))
                    vc[static_cast<std::size_t>((j - k) / p)] = V.coeff(j);
            LinearPoly A(BaseElement(1), BaseElement(0) - P1.coeff(0));
            reps.push_back(SpacedRep{k, Poly{std::move(vc)}, A, B});
        }
    }
    return reps;
}

// x^p o x^q = x^q o x^p.
std::optional<PairMatch> match_monomial_pair(const Poly& P, const Poly& Q) {
    auto pn = power_normalizers(P);
    auto qn = power_normalizers(Q);
    if (!pn || !qn) return std::nullopt;
    const int p = P.degree(), q = Q.degree();
    if (p == q) return std::nullopt;
    const LinearPoly AQinv = qn->first.inverse();
    if (!(pn->second.intercept() == AQinv.intercept())) return std::nullopt;
    PairMatch m;
    m.M = AQinv;
    m.N = qn->second;
    const BaseElement b = m.M.slope() / pn->second.slope();
    BaseElement bp(1);
    for (int t = 0; t < p; ++t) bp = bp * b;
    m.L = pn->first.inverse().compose(LinearPoly(bp, BaseElement(0)));
    m.R1 = xpow(p);
    m.S1 = xpow(q);
    m.R2 = xpow(q);
    m.S2 = xpow(p);
    return m;
}

// C_p o C_q = C_q o C_p, p and q odd.
std::optional<PairMatch> match_chebyshev_pair(const Poly& P, const Poly& Q) {
    auto pn = chebyshev_normalizers(P);
    auto qn = chebyshev_normalizers(Q);
    if (!pn || !qn) return std::nullopt;
    const int p = P.degree(), q = Q.degree();
    if (p == q) return std::nullopt;
    const LinearPoly AQinv = qn->first.inverse();
    if (!(pn->second.intercept() == AQinv.intercept())) return std::nullopt;
    const BaseElement ratio = pn->second.slope() / AQinv.slope();
    const BaseElement minus1 = BaseElement(0) - BaseElement(1);
    if (!(ratio == BaseElement(1)) && !(ratio == minus1)) return std::nullopt;
    PairMatch m;
    m.M = pn->second;  // eta = +1
    m.L = pn->first.inverse();
    const BaseElement delta = ratio;  // slope(M)/slope(AQinv)
    m.N = qn->second.compose(LinearPoly(delta, BaseElement(0)));
    m.R1 = chebyshev(static_cast<unsigned>(p));
    m.S1 = chebyshev(static_cast<unsigned>(q));
    m.R2 = m.S1;
    m.S2 = m.R1;
    return m;
}

// x^k u(x)^p o x^p = x^p o x^k u(x^p), matched with the composite on the
// outer side (P) and the monomial on the inner side (Q).
std::optional<PairMatch> match_third_outer_composite(const Poly& P, const Poly& Q) {
    auto qn = power_normalizers(Q);
    if (!qn) return std::nullopt;
    const int p = Q.degree();
    if (!is_prime_int(p)) return std::nullopt;
    const LinearPoly M = qn->first.inverse();
    const LinearPoly N = qn->second;
    const Poly W = compose(P, M);

    // Constant-killing shape: W = a * x^r * u(x)^p + b with u monic nonconstant.
    {
        const BaseElement b = W.coeff(0);
        Poly V = W - Poly(b);
        const int r = low_exponent(V);
        if (r >= 1) {
            Poly U = shift_down(V, r);
            const BaseElement a = U.leading();
            if (auto root = monic_nth_root(U / a, static_cast<unsigned>(p))) {
                const Poly& u = *root;
                if (u.degree() >= 1) {
                    Poly S2 = xpow(r) * spaced_lift(u, p);
                    if (is_indecomposable(S2)) {
                        PairMatch m;
                        m.M = M;
                        m.N = N;
                        m.L = LinearPoly(a, b);
                        m.R1 = xpow(r) * u.pow(static_cast<unsigned>(p));
                        m.S1 = xpow(p);
                        m.R2 = xpow(p);
                        m.S2 = std::move(S2);
                        return m;
                    }
                }
            }
        }
    }

    // Constant-kept shape (degree p, u linear): W = A_P^{-1}(E(x)^p), E linear.
    {
        auto pn = power_normalizers(P);
        if (!pn || P.degree() != p) return std::nullopt;
        const LinearPoly E = pn->second.inverse().compose(M);
        if (E.intercept() == BaseElement(0)) return std::nullopt;
        PairMatch m;
        m.M = M;
        m.N = N;
        m.L = pn->first.inverse();
        m.R1 = E.as_poly().pow(static_cast<unsigned>(p));
        m.S1 = xpow(p);
        m.R2 = xpow(p);
        m.S2 = Poly::monomial(p, E.slope()) + Poly(E.intercept());
        return m;
    }
}

// x^p o x^k u(x^p) = x^k u(x)^p o x^p, matched with the monomial on the
// outer side (P) and the composite on the inner side (Q).
std::optional<PairMatch> match_third_outer_monomial(const Poly& P, const Poly& Q) {
    auto pn = power_normalizers(P);
    if (!pn) return std::nullopt;
    const int p = P.degree();
    if (!is_prime_int(p)) return std::nullopt;
    for (const SpacedRep& rep : spaced_reps(Q, p)) {
        if (rep.v.degree() < 1) continue;  // scaled monomial: not a swap, only a reshuffle
        const LinearPoly M = rep.A.inverse();
        if (!(M.intercept() == pn->second.intercept())) continue;
        Poly R2 = xpow(rep.k) * rep.v.pow(static_cast<unsigned>(p));
        if (!is_indecomposable(R2)) continue;
        PairMatch m;
        m.M = M;
        m.N = rep.B;
        const BaseElement b = M.slope() / pn->second.slope();
        BaseElement bp(1);
        for (int t = 0; t < p; ++t) bp = bp * b;
        m.L = pn->first.inverse().compose(LinearPoly(bp, BaseElement(0)));
        m.R1 = xpow(p);
        m.S1 = xpow(rep.k) * spaced_lift(rep.v, p);
        m.R2 = std::move(R2);
        m.S2 = xpow(p);
        if (m.R1 == m.R2 && m.S1 == m.S2) continue;  // tautological instance
        return m;
    }
    return std::nullopt;
}

std::optional<PairMatch> match_pair(const Poly& P, const Poly& Q) {
    if (auto m = match_monomial_pair(P, Q)) return m;
    if (auto m = match_chebyshev_pair(P, Q)) return m;
    if (auto m = match_third_outer_composite(P, Q)) return m;
    if (auto m = match_third_outer_monomial(P, Q)) return m;
    return std::nullopt;
}

// Write into the 1-based skew-periodic slot j, twisting back into 1..k.
template <class T>
void put_slot(std::vector<T>& slots, const FieldAutomorphism& sigma, long long j, T val) {
    const long long k = static_cast<long long>(slots.size());
    const long long m = floordiv(j - 1, k);
    const long long j0 = (j - 1) - m * k;
    slots[static_cast<std::size_t>(j0)] = sigma_pow(sigma, -m, std::move(val));
}

}  // namespace

std::optional<RittSwapResult> ritt_swap(const LongDecomposition& f, int i) {
    const int k = f.period();
    if (k < 2) throw DomainError("ritt_swap needs period >= 2");
    const Poly P = f.factor(i + 1);
    const Poly Q = f.factor(i);
    auto m = match_pair(P, Q);
    if (!m) return std::nullopt;
    if (m->R1 == m->R2 && m->S1 == m->S2) return std::nullopt;
    if (m->R1 != compose(m->L.inverse(), compose(P, m->M)) ||
        m->S1 != compose(m->M.inverse(), compose(Q, m->N)) ||
        compose(m->R1, m->S1) != compose(m->R2, m->S2))
        throw DomainError("matched identity instance is not exact");

    std::vector<Poly> slots = f.factors();
    put_slot(slots, f.sigma(), i + 1, compose(m->L, m->R2));
    put_slot(slots, f.sigma(), i, compose(m->S2, m->N.inverse()));
    LongDecomposition result(std::move(slots), f.sigma());
    if (compose(result.factor(i + 1), result.factor(i)) != compose(P, Q))
        throw DomainError("swap failed to preserve the composite pair");

    // Entries: N at slot i, M at slot i+1, L at slot i+2 (dropped when k == 2).
    std::vector<LinearPoly> lam(static_cast<std::size_t>(k), LinearPoly::identity());
    put_slot(lam, f.sigma(), i, m->N);
    put_slot(lam, f.sigma(), i + 1, m->M);
    if (k >= 3) put_slot(lam, f.sigma(), i + 2, m->L);
    SkewPeriodicLinears equivalence(std::move(lam), f.sigma());

    std::vector<Poly> from_slots;
    std::vector<Poly> to_slots;
    if (k >= 3) {
        from_slots = equivalence.apply(f).factors();
    } else {
        from_slots = f.factors();
        put_slot(from_slots, f.sigma(), i, m->S1);
        put_slot(from_slots, f.sigma(), i + 1, m->R1);
    }
    to_slots = from_slots;
    put_slot(to_slots, f.sigma(), i, m->S2);
    put_slot(to_slots, f.sigma(), i + 1, m->R2);
    LongDecomposition strict_from(std::move(from_slots), f.sigma());
    LongDecomposition strict_to(std::move(to_slots), f.sigma());

    return RittSwapResult{std::move(result), std::move(equivalence),
                          std::move(strict_from), std::move(strict_to)};
}

LongDecomposition phi_shift(const LongDecomposition& f, int n) {
    std::vector<Poly> g;
    g.reserve(static_cast<std::size_t>(f.period()));
    for (int j = 1; j <= f.period(); ++j) g.push_back(f.factor(j + n));
    return LongDecomposition(std::move(g), f.sigma());
}

// ---------------------------------------------------------------------------
// epsilon action.

namespace {

struct EpsilonOutcome {
    std::optional<LongDecomposition> value;
    int first_failure = 0;
};

EpsilonOutcome epsilon_forward(const LongDecomposition& f, int p) {
    const int k = f.period();
    std::vector<BaseElement> t(static_cast<std::size_t>(k) + 1);
    for (int j = 1; j <= k; ++j)
        t[static_cast<std::size_t>(j - 1)] =
            centering_translation(f.factors()[static_cast<std::size_t>(j - 1)]).intercept();
    t[static_cast<std::size_t>(k)] = apply_aut(f.sigma(), t[0]);

    std::vector<Poly> images;
    images.reserve(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
        const Poly& fj = f.factors()[static_cast<std::size_t>(j - 1)];
        Poly W = compose(fj, LinearPoly(BaseElement(1), t[static_cast<std::size_t>(j - 1)]));
        Poly V = W - Poly(t[static_cast<std::size_t>(j)]);
        if (V.is_zero()) return {std::nullopt, j};
        const int r = low_exponent(V);
        Poly image;
        if (r >= 1) {
            bool spaced = true;
            for (int e = r; e <= V.degree() && spaced; ++e)
                if (!(V.coeff(e) == BaseElement(0)) && (e - r) % p != 0) spaced = false;
            if (!spaced) return {std::nullopt, j};
            std::vector<BaseElement> uc(static_cast<std::size_t>((V.degree() - r) / p) + 1,
                                        BaseElement(0));
            for (int e = r; e <= V.degree(); ++e)
                if (!(V.coeff(e) == BaseElement(0)))
                    uc[static_cast<std::size_t>((e - r) / p)] = V.coeff(e);
            Poly u{std::move(uc)};
            if (u.degree() == 0 && r == p) return {std::nullopt, j};
            image = xpow(r) * u.pow(static_cast<unsigned>(p));
        } else {
            // Constant survives: only the linear-in-x^p shape is eligible.
            if (fj.degree() != p) return {std::nullopt, j};
            Poly V1 = V - Poly(V.coeff(0));
            if (V1 != Poly::monomial(p, V.leading())) return {std::nullopt, j};
            Poly u = Poly::monomial(1, V.leading()) + Poly(V.coeff(0));
            image = u.pow(static_cast<unsigned>(p));
        }
        if (!is_indecomposable(image)) return {std::nullopt, j};
        images.push_back(std::move(image));
    }
    return {LongDecomposition(std::move(images), f.sigma()), 0};
}

// Preimage candidates for one slot of the inverse direction.
std::vector<Poly> epsilon_preimage_candidates(const Poly& g, int p) {
    std::vector<Poly> out;
    auto push_unique = [&out](Poly cand) {
        for (const Poly& q : out)
            if (q == cand) return;
        out.push_back(std::move(cand));
    };
    auto validate = [&](const Poly& cand) -> bool {
        if (!is_indecomposable(cand)) return false;
        if (cand.coeff(0) == BaseElement(0)) {
            const int r = low_exponent(cand);
            bool spaced = true;
            int top = 0;
            for (int e = r; e <= cand.degree(); ++e)
                if (!(cand.coeff(e) == BaseElement(0))) {
                    if ((e - r) % p != 0) spaced = false;
                    top = e;
                }
            if (!spaced) return false;
            const bool uconst = top == r;
            return !uconst || r != p;
        }
        if (cand.degree() != p) return false;
        Poly V = cand - Poly(cand.coeff(0));
        return V == Poly::monomial(p, cand.leading());
    };
    // Alongside each shape, emit the sibling with the core constant rescaled
    // to 1; scaling gauges on the image move that constant around.
    auto push_with_variants = [&](Poly cand) {
        if (!validate(cand)) return;
        if (cand.coeff(0) == BaseElement(0)) {
            const int r = low_exponent(cand);
            Poly U = shift_down(cand, r);
            const int d = U.degree() / p;
            if (d > 0) {
                std::vector<BaseElement> wc(static_cast<std::size_t>(d) + 1, BaseElement(0));
                for (int j = 0; j <= d; ++j) wc[static_cast<std::size_t>(j)] = U.coeff(j * p);
                Poly w{std::move(wc)};
                const BaseElement c0 = w.coeff(0);
                if (!(c0 == BaseElement(1))) {
                    if (auto lam = nth_root(c0, static_cast<unsigned>(d))) {
                        std::vector<BaseElement> sc(static_cast<std::size_t>(d) + 1);
                        BaseElement pw(1);
                        for (int j = 0; j <= d; ++j) {
                            sc[static_cast<std::size_t>(j)] = w.coeff(j) * pw / c0;
                            pw = pw * *lam;
                        }
                        Poly cand2 = xpow(r) * spaced_lift(Poly{std::move(sc)}, p);
                        if (validate(cand2)) push_unique(std::move(cand2));
                    }
                }
            }
        } else {
            const BaseElement e1 = cand.leading(), e0 = cand.coeff(0);
            Poly monic = Poly::monomial(p) + Poly(e0 / e1);
            if (validate(monic)) push_unique(std::move(monic));
            Poly unit = Poly::monomial(p) + Poly(BaseElement(1));
            if (validate(unit)) push_unique(std::move(unit));
        }
        push_unique(std::move(cand));
    };

    // Exact shape x^r * (scaled p-th power).
    if (g.coeff(0) == BaseElement(0)) {
        const int r = low_exponent(g);
        Poly U = shift_down(g, r);
        if (U.degree() == 0) {
            if (r != p) push_with_variants(xpow(r));
        } else if (auto root = monic_nth_root(U / U.leading(), static_cast<unsigned>(p))) {
            push_with_variants(xpow(r) * spaced_lift(*root, p));
        }
    }
    // Degree-p slots: inner power normalizer supplies the linear core.
    if (g.degree() == p) {
        if (auto pn = power_normalizers(g)) {
            const LinearPoly E = pn->second.inverse();
            if (!(E.intercept() == BaseElement(0)))
                push_with_variants(Poly::monomial(p, E.slope()) + Poly(E.intercept()));
        }
    }
    // General slots through the outer-power decomposition of g(x^p).
    {
        Poly H = compose(g, xpow(p));
        if (auto dec = decompose_once(H, g.degree())) {
            if (auto on = power_normalizers(dec->first))
                push_with_variants(compose(on->second.inverse(), dec->second));
        }
    }
    return out;
}

EpsilonOutcome epsilon_backward(const LongDecomposition& g, int p) {
    const int k = g.period();
    std::vector<std::vector<Poly>> cands(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) {
        cands[static_cast<std::size_t>(j - 1)] =
            epsilon_preimage_candidates(g.factors()[static_cast<std::size_t>(j - 1)], p);
        if (cands[static_cast<std::size_t>(j - 1)].empty()) return {std::nullopt, j};
    }
    std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
    int combos = 1;
    for (auto& c : cands) {
        combos *= static_cast<int>(c.size());
        if (combos > 1024) {
            combos = 1024;
            break;
        }
    }
    for (int trial = 0; trial < combos; ++trial) {
        std::vector<Poly> slots;
        slots.reserve(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j)
            slots.push_back(cands[static_cast<std::size_t>(j)][pick[static_cast<std::size_t>(j)]]);
        LongDecomposition cand(std::move(slots), g.sigma());
        EpsilonOutcome fwd = epsilon_forward(cand, p);
        if (fwd.value && linear_equivalence(*fwd.value, g)) return {std::move(cand), 0};
        // next combination
        int j = 0;
        while (j < k) {
            auto& pj = pick[static_cast<std::size_t>(j)];
            if (++pj < cands[static_cast<std::size_t>(j)].size()) break;
            pj = 0;
            ++j;
        }
        if (j == k) break;
    }
    return {std::nullopt, k + 1};
}

EpsilonOutcome epsilon_impl(const LongDecomposition& f, int p, int direction) {
    if (!is_prime_int(p)) throw DomainError("epsilon index must be prime");
    if (direction == 1) return epsilon_forward(f, p);
    if (direction == -1) return epsilon_backward(f, p);
    throw DomainError("epsilon direction must be +1 or -1");
}

}  // namespace

std::optional<LongDecomposition> epsilon_action(const LongDecomposition& f, int p,
                                                int direction) {
    return epsilon_impl(f, p, direction).value;
}

int epsilon_first_failure(const LongDecomposition& f, int p, int direction) {
    return epsilon_impl(f, p, direction).first_failure;
}

// ---------------------------------------------------------------------------
// Linear equivalence search.

namespace {

// Polynomials in the unknown slot-1 slope over the base field.
using SymScalar = UPoly<BaseElement>;
using SymPoly = UPoly<SymScalar>;

struct SymLinear {
    SymScalar slope, intercept;
};

SymPoly lift(const Poly& P) {
    std::vector<SymScalar> c;
    c.reserve(static_cast<std::size_t>(P.degree()) + 1);
    for (int j = 0; j <= P.degree(); ++j) c.push_back(SymScalar(P.coeff(j)));
    return SymPoly(std::move(c));
}

SymScalar sym_apply_aut(const FieldAutomorphism& aut, const SymScalar& q) {
    std::vector<BaseElement> c;
    c.reserve(static_cast<std::size_t>(q.degree()) + 1);
    for (int j = 0; j <= q.degree(); ++j) c.push_back(apply_aut(aut, q.coeff(j)));
    return SymScalar(std::move(c));
}

// Rational roots of one constraint polynomial; `solved` reports whether the
// root list is exhaustive.
std::vector<BaseElement> constraint_roots(SymScalar G, bool& solved) {
    solved = true;
    std::vector<BaseElement> roots;
    if (G.is_zero()) return roots;
    // a == 0 never yields an invertible witness; strip powers of a.
    int low = 0;
    while (G.coeff(low) == BaseElement(0)) ++low;
    if (low > 0) {
        std::vector<BaseElement> c;
        for (int j = low; j <= G.degree(); ++j) c.push_back(G.coeff(j));
        G = SymScalar(std::move(c));
    }
    if (G.degree() <= 0) return roots;
    SymScalar d = G.derivative();
    SymScalar g = poly_gcd(G, d);
    if (g.degree() >= 1) {
        auto [q, r] = SymScalar::divmod(G, g);
        if (r.is_zero()) G = q;
    }
    const int n = G.degree();
    if (n == 1) {
        roots.push_back((BaseElement(0) - G.coeff(0)) / G.coeff(1));
        return roots;
    }
    if (n == 2) {
        const BaseElement a = G.coeff(2), b = G.coeff(1), c = G.coeff(0);
        const BaseElement disc = b * b - BaseElement(4) * a * c;
        if (auto s = nth_root(disc, 2)) {
            const BaseElement twoa = BaseElement(2) * a;
            roots.push_back(((BaseElement(0) - b) + *s) / twoa);
            roots.push_back(((BaseElement(0) - b) - *s) / twoa);
        }
        return roots;
    }
    bool binomial = true;
    for (int j = 1; j < n && binomial; ++j)
        if (!(G.coeff(j) == BaseElement(0))) binomial = false;
    if (binomial) {
        const BaseElement w = (BaseElement(0) - G.coeff(0)) / G.coeff(n);
        if (auto r = nth_root(w, static_cast<unsigned>(n))) {
            roots.push_back(*r);
            roots.push_back(BaseElement(0) - *r);
        }
        return roots;
    }
    solved = false;
    return roots;
}

}  // namespace

std::optional<SkewPeriodicLinears> linear_equivalence(const LongDecomposition& f,
                                                      const LongDecomposition& g) {
    const int k = f.period();
    if (g.period() != k || !same_map(f.sigma(), g.sigma())) return std::nullopt;
    for (int j = 0; j < k; ++j)
        if (f.factors()[static_cast<std::size_t>(j)].degree() !=
            g.factors()[static_cast<std::size_t>(j)].degree())
            return std::nullopt;

    // Symbolic pass: Lambda_1 = (a, b(a)) with b pinned by the slot-1
    // subleading coefficient; everything downstream is polynomial in a.
    const Poly& f1 = f.factors()[0];
    const Poly& g1 = g.factors()[0];
    const int d1 = f1.degree();
    const BaseElement fl = f1.leading(), gl = g1.leading();
    const SymScalar a_sym = SymScalar::monomial(1);
    const SymScalar b_sym =
        (a_sym * (fl * g1.coeff(d1 - 1) / gl) - SymScalar(f1.coeff(d1 - 1))) /
        (fl * BaseElement(d1));

    std::vector<SymScalar> constraints;
    SymLinear lam{a_sym, b_sym};
    for (int j = 1; j <= k; ++j) {
        const Poly& fj = f.factors()[static_cast<std::size_t>(j - 1)];
        const Poly& gj = g.factors()[static_cast<std::size_t>(j - 1)];
        SymPoly inner{std::vector<SymScalar>{lam.intercept, lam.slope}};
        SymPoly W = lift(fj).compose(inner);
        SymScalar alpha = W.leading() / gj.leading();
        SymScalar beta = W.coeff(0) - alpha * gj.coeff(0);
        for (int t = 1; t < fj.degree(); ++t) {
            SymScalar eq = W.coeff(t) - alpha * gj.coeff(t);
            if (!eq.is_zero()) constraints.push_back(std::move(eq));
        }
        lam = SymLinear{std::move(alpha), std::move(beta)};
    }

    const bool twisted = !f.sigma().is_identity();
    if (!twisted) {
        SymScalar eq1 = lam.slope - a_sym;
        SymScalar eq2 = lam.intercept - b_sym;
        if (!eq1.is_zero()) constraints.push_back(std::move(eq1));
        if (!eq2.is_zero()) constraints.push_back(std::move(eq2));
    }

    std::vector<BaseElement> candidates;
    bool solved_all = true;
    if (!constraints.empty()) {
        SymScalar G = constraints.front();
        for (std::size_t t = 1; t < constraints.size() && G.degree() != 0; ++t)
            G = poly_gcd(G, constraints[t]);
        bool solved = true;
        candidates = constraint_roots(std::move(G), solved);
        solved_all = solved;
    } else if (twisted) {
        // No interior constraints: pin the wrap with a constant-slope ansatz.
        std::vector<SymScalar> closing;
        SymScalar eq1 = lam.slope - a_sym;
        SymScalar eq2 = lam.intercept - sym_apply_aut(f.sigma(), b_sym);
        if (!eq1.is_zero()) closing.push_back(std::move(eq1));
        if (!eq2.is_zero()) closing.push_back(std::move(eq2));
        if (closing.empty()) {
            candidates.push_back(BaseElement(1));
        } else {
            SymScalar G = closing.front();
            for (std::size_t t = 1; t < closing.size() && G.degree() != 0; ++t)
                G = poly_gcd(G, closing[t]);
            bool solved = true;
            candidates = constraint_roots(std::move(G), solved);
            solved_all = false;  // the ansatz is not exhaustive
        }
    } else {
        candidates.push_back(BaseElement(1));
    }
    if (!solved_all) {
        candidates.push_back(BaseElement(1));
        candidates.push_back(BaseElement(0) - BaseElement(1));
    }

    // Exact verification pass per candidate.
    for (const BaseElement& a0 : candidates) {
        if (a0.is_zero()) continue;
        std::vector<LinearPoly> entries;
        entries.reserve(static_cast<std::size_t>(k));
        LinearPoly cur(a0, b_sym.eval(a0));
        bool ok = true;
        for (int j = 1; j <= k && ok; ++j) {
            entries.push_back(cur);
            const Poly& fj = f.factors()[static_cast<std::size_t>(j - 1)];
            const Poly& gj = g.factors()[static_cast<std::size_t>(j - 1)];
            Poly W = compose(fj, cur);
            const BaseElement alpha = W.leading() / gj.leading();
            if (alpha.is_zero()) {
                ok = false;
                break;
            }
            const BaseElement beta = W.coeff(0) - alpha * gj.coeff(0);
            Poly rhs = gj * alpha + Poly(beta);
            if (W != rhs) {
                ok = false;
                break;
            }
            cur = LinearPoly(alpha, beta);
        }
        if (!ok) continue;
        if (cur != apply_aut(f.sigma(), entries.front())) continue;
        return SkewPeriodicLinears(std::move(entries), f.sigma());
    }
    return std::nullopt;
}

}  // namespace ritt
