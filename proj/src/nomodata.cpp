#include "ritt/nomodata.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <variant>

#include "ritt/errors.hpp"

namespace ritt {
namespace {

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long long floor_mod(long long a, long long b) { return a - floor_div(a, b) * b; }

// Slot residue in 1..k.
int slot_residue(long long x, int k) {
    long long r = floor_mod(x, k);
    return r == 0 ? k : static_cast<int>(r);
}

long long valuation(long long n, int p) {
    long long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

std::vector<int> prime_divisors(long long n) {
    std::vector<int> ps;
    for (long long d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            ps.push_back(static_cast<int>(d));
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) ps.push_back(static_cast<int>(n));
    return ps;
}

bool is_scaled_monomial(const Poly& P) {
    const int d = P.degree();
    if (d < 1) return false;
    for (int i = 0; i < d; ++i)
        if (!(P.coeff(i) == BaseElement(0))) return false;
    return true;
}

// P with the factor x^r divided out; requires coeff(0..r-1) = 0.
Poly shift_down(const Poly& P, int r) {
    std::vector<BaseElement> c;
    for (int i = r; i <= P.degree(); ++i) c.push_back(P.coeff(i));
    return Poly(std::move(c));
}

// V with V(x^l) = Q; requires every nonzero exponent of Q divisible by l.
Poly compress(const Poly& Q, long long l) {
    std::vector<BaseElement> c(static_cast<std::size_t>(Q.degree() / l) + 1,
                               BaseElement(0));
    for (int i = 0; i <= Q.degree(); ++i) {
        if (Q.coeff(i) == BaseElement(0)) continue;
        c[static_cast<std::size_t>(i / l)] = Q.coeff(i);
    }
    return Poly(std::move(c));
}

// Monic q-th root of a monic polynomial, coefficient by coefficient from
// the top, q >= 2 and q | deg W.
std::optional<Poly> monic_nth_root(const Poly& W, int q) {
    const int D = W.degree();
    if (D < 0 || D % q != 0) return std::nullopt;
    if (!(W.leading() == BaseElement(1))) return std::nullopt;
    const int d = D / q;
    Poly u = Poly::monomial(d);
    for (int t = 1; t <= d; ++t) {
        const Poly P = u.pow(static_cast<unsigned>(q));
        const BaseElement want = W.coeff(D - t);
        const BaseElement have = P.coeff(D - t);
        const BaseElement a = (want - have) / BaseElement(q);
        u += Poly::monomial(d - t, a);
    }
    if (u.pow(static_cast<unsigned>(q)) != W) return std::nullopt;
    return u;
}

// Literal shape of a clean factor: either a scaled monomial c*x^d, or a
// Ritt polynomial written literally as c * x^r * u(x^l)^n with u monic,
// u(0) != 0, u not a proper power, deg u >= 1 and (l > 1 or n > 1).
struct FactorShape {
    bool monomial = false;
    int mono_degree = 0;
    long long inner = 1;  // l
    long long outer = 1;  // n
};

std::optional<FactorShape> literal_shape(const Poly& P) {
    const int deg = P.degree();
    if (deg < 2) return std::nullopt;
    if (is_scaled_monomial(P)) {
        FactorShape s;
        s.monomial = true;
        s.mono_degree = deg;
        return s;
    }
    const int r = low_exponent(P);
    const Poly Q = shift_down(P, r);
    long long l = 0;
    for (int i = 1; i <= Q.degree(); ++i)
        if (!(Q.coeff(i) == BaseElement(0))) l = std::gcd(l, (long long)i);
    if (l == 0) return std::nullopt;  // Q constant: handled as monomial above
    const Poly V = compress(Q, l);
    Poly W = V / V.leading();
    long long n = 1;
    bool again = true;
    while (again) {
        again = false;
        for (int q : prime_divisors(W.degree())) {
            if (auto root = monic_nth_root(W, q)) {
                W = *root;
                n *= q;
                again = true;
                break;
            }
        }
    }
    if (W.degree() < 1) return std::nullopt;
    if (l == 1 && n == 1) return std::nullopt;  // not a Ritt polynomial shape
    FactorShape s;
    s.inner = l;
    s.outer = n;
    return s;
}

// Shape of a factor inside a decomposition the bookkeeping layer walks
// across; violations are pipeline bugs, not user errors.
FactorShape shape_or_trap(const Poly& P, const char* stage) {
    auto s = literal_shape(P);
    if (s) {
        if (!s->monomial) {
            const auto cls = classify_swappable(P);
            if (cls.verdict != SwapVerdict::CFreeSwappable)
                throw PipelineFailure(std::string(stage) +
                                      ": a factor left the C-free class");
        }
        return *s;
    }
    throw PipelineFailure(std::string(stage) +
                          ": a factor lost its clean literal shape");
}

std::string table_key(long long j, int p) {
    std::ostringstream os;
    os << "(j=" << j << ", p=" << p << ")";
    return os.str();
}

// Aligned table: one row per j in 0..m-1, one column per prime.
std::string format_table(const std::string& name, long long m,
                         const std::vector<int>& primes,
                         const std::function<long long(long long, int)>& at) {
    std::ostringstream os;
    os << name << ":";
    if (primes.empty()) {
        os << " (all zero)\n";
        return os.str();
    }
    os << "\n  j\\p";
    for (int p : primes) os << std::setw(5) << p;
    os << "\n";
    for (long long j = 0; j < m; ++j) {
        os << std::setw(5) << j;
        for (int p : primes) os << std::setw(5) << at(j, p);
        os << "\n";
    }
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Nomodata.

Nomodata::Nomodata(int period_k, std::vector<long long> alpha_window, Table in,
                   Table out, Table pud)
    : k_(period_k),
      alpha_(std::move(alpha_window)),
      in_(std::move(in)),
      out_(std::move(out)),
      pud_(std::move(pud)) {
    if (k_ < 1) throw DomainError("nomodata needs a positive period");
    if (alpha_.empty())
        throw DomainError("nomodata needs at least one non-monomial per period");
    const long long m = count();
    if (alpha_.front() < 1 || alpha_.front() > k_)
        throw DomainError("alpha(0) must be the least positive non-monomial index");
    for (long long j = 0; j + 1 < m; ++j)
        if (alpha_[j] >= alpha_[j + 1])
            throw DomainError("the non-monomial listing must be increasing");
    if (alpha_.back() > k_)
        throw DomainError("one period of the listing must fit inside 1..k");
    for (auto* t : {&in_, &out_, &pud_}) {
        for (auto it = t->begin(); it != t->end();) {
            const auto [j, p] = it->first;
            if (j < 0 || j >= m)
                throw DomainError("table keyed outside 0..m-1 at " + table_key(j, p));
            if (p < 2) throw DomainError("table keyed by a non-prime at " + table_key(j, p));
            if (it->second < 0)
                throw DomainError("negative table entry at " + table_key(j, p));
            it = it->second == 0 ? t->erase(it) : std::next(it);
        }
    }
    // Puddle counts must fill the gaps between consecutive non-monomials.
    for (long long j = 0; j < m; ++j) {
        const long long lo = (j == 0) ? alpha_.back() - k_ : alpha_[j - 1];
        long long total = 0;
        for (const auto& [key, v] : pud_)
            if (key.first == j) total += v;
        if (total != alpha_[j] - lo - 1)
            throw DomainError("puddle counts do not fill the gap before alpha(" +
                              std::to_string(j) + ")");
    }
}

long long Nomodata::alpha(long long j) const {
    const long long m = count();
    const long long r = floor_mod(j, m);
    return alpha_[static_cast<std::size_t>(r)] + k_ * floor_div(j, m);
}

long long Nomodata::table_at(const Table& t, long long j, int p) const {
    const auto it = t.find({floor_mod(j, count()), p});
    return it == t.end() ? 0 : it->second;
}

std::vector<int> Nomodata::primes() const {
    std::vector<int> ps;
    for (const auto* t : {&in_, &out_, &pud_})
        for (const auto& [key, v] : *t) ps.push_back(key.second);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

bool Nomodata::is_position_periodic(long long N) const {
    if (N < 1) throw DomainError("the position period must be positive");
    if (k_ % N != 0) return false;
    const long long m = count();
    if ((m * N) % k_ != 0) return false;
    const long long s = m * N / k_;
    for (long long j = 0; j < m; ++j)
        if (alpha(j + s) != alpha(j) + N) return false;
    for (int p : primes())
        for (long long j = 0; j < m; ++j)
            if (in(j + s, p) != in(j, p) || out(j + s, p) != out(j, p) ||
                pud(j + s, p) != pud(j, p))
                return false;
    return true;
}

bool Nomodata::operator==(const Nomodata& o) const {
    return k_ == o.k_ && alpha_ == o.alpha_ && in_ == o.in_ && out_ == o.out_ &&
           pud_ == o.pud_;
}

std::string Nomodata::str() const {
    std::ostringstream os;
    os << "period " << k_ << "; non-monomials per period " << count()
       << "; alpha:";
    for (long long a : alpha_) os << " " << a;
    os << "\n";
    const auto ps = primes();
    os << format_table("in", count(), ps,
                       [this](long long j, int p) { return in(j, p); });
    os << format_table("out", count(), ps,
                       [this](long long j, int p) { return out(j, p); });
    os << format_table("pud", count(), ps,
                       [this](long long j, int p) { return pud(j, p); });
    return os.str();
}

// ---------------------------------------------------------------------------
// TraceFn.

long long TraceFn::at(long long j, int p) const {
    const auto it = values.find({floor_mod(j, count), p});
    return it == values.end() ? 0 : it->second;
}

void TraceFn::add(long long j, int p, long long delta) {
    if (delta == 0) return;
    const auto key = std::make_pair(floor_mod(j, count), p);
    const long long v = (values[key] += delta);
    if (v == 0) values.erase(key);
}

std::vector<int> TraceFn::primes() const {
    std::vector<int> ps;
    for (const auto& [key, v] : values) ps.push_back(key.second);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

std::string TraceFn::str() const {
    std::ostringstream os;
    os << "trace on j mod " << count << "\n";
    os << format_table("lambda", count, primes(),
                       [this](long long j, int p) { return at(j, p); });
    return os.str();
}

std::string classification_str(MahlerClassification c) {
    switch (c) {
        case MahlerClassification::SkewTwist: return "skew-twist";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// compute_nomodata.

Nomodata compute_nomodata(const LongDecomposition& f) {
    const int k = f.period();
    std::vector<long long> alpha;
    std::vector<FactorShape> shapes;
    shapes.reserve(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        const Poly P = f.factor(i);
        auto s = literal_shape(P);
        if (!s)
            throw NotCleanCFree("factor " + std::to_string(i) +
                                " is neither a scaled monomial nor a literal "
                                "Ritt polynomial x^r * u(x^l)^n");
        if (!s->monomial) {
            const auto cls = classify_swappable(P);
            if (cls.verdict == SwapVerdict::TypeC)
                throw NotCleanCFree("factor " + std::to_string(i) +
                                    " is Chebyshev-related, not C-free");
            if (cls.verdict != SwapVerdict::CFreeSwappable)
                throw NotCleanCFree("factor " + std::to_string(i) +
                                    " carries no swap-eligible C-free shape");
            alpha.push_back(i);
        }
        shapes.push_back(*s);
    }
    if (alpha.empty())
        throw NotCleanCFree("every factor is a scaled monomial; the listing "
                            "of non-monomials is empty");
    const long long m = static_cast<long long>(alpha.size());
    Nomodata::Table in, out, pud;
    for (long long j = 0; j < m; ++j) {
        const FactorShape& s = shapes[static_cast<std::size_t>(alpha[j] - 1)];
        for (int p : prime_divisors(s.inner)) in[{j, p}] = valuation(s.inner, p);
        for (int p : prime_divisors(s.outer)) out[{j, p}] = valuation(s.outer, p);
        const long long lo = (j == 0) ? alpha.back() - k : alpha[j - 1];
        for (long long i = lo + 1; i < alpha[j]; ++i) {
            const Poly M = f.factor(i);
            if (!is_scaled_monomial(M))
                throw PipelineFailure("nomodata listing missed a non-monomial");
            pud[{j, M.degree()}] += 1;
        }
    }
    return Nomodata(k, std::move(alpha), std::move(in), std::move(out),
                    std::move(pud));
}

// ---------------------------------------------------------------------------
// Trace of a word.

namespace {

// Walks the letters of a swap word (rightmost first) along its action,
// reporting each swap that moves a monomial across a non-monomial to the
// callback as (lineage j, prime p, +1/-1). Returns the final decomposition.
LongDecomposition walk_swaps(
    const std::vector<Generator>& letters, const LongDecomposition& start,
    std::vector<long long> alphas,
    const std::function<void(long long, int, int)>& report) {
    const int k = start.period();
    const long long m = static_cast<long long>(alphas.size());
    LongDecomposition g = start;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
        if (it->kind != Generator::Kind::T)
            throw DomainError("the trace is defined for swap words only");
        const int i = it->index;
        std::optional<long long> at_i, at_i1;
        for (long long j = 0; j < m; ++j) {
            if (floor_mod(alphas[j] - i, k) == 0) at_i = j;
            if (floor_mod(alphas[j] - (i + 1), k) == 0) at_i1 = j;
        }
        if (at_i && at_i1)
            throw UndefinedAction("adjacent non-monomials cannot swap (slot " +
                                  std::to_string(i) + ")");
        if (at_i) {
            const Poly M = g.factor(alphas[*at_i] + 1);
            if (!is_scaled_monomial(M))
                throw PipelineFailure("trace walk: listing out of sync");
            report(*at_i, M.degree(), +1);
            alphas[*at_i] += 1;
        } else if (at_i1) {
            const Poly M = g.factor(alphas[*at_i1] - 1);
            if (!is_scaled_monomial(M))
                throw PipelineFailure("trace walk: listing out of sync");
            report(*at_i1, M.degree(), -1);
            alphas[*at_i1] -= 1;
        }
        auto sw = ritt_swap(g, i);
        if (!sw)
            throw UndefinedAction("letter t" + std::to_string(i) +
                                  " is undefined along the walk");
        g = sw->result;
        shape_or_trap(g.factor(i), "trace walk");
        shape_or_trap(g.factor(i + 1), "trace walk");
    }
    return g;
}

std::vector<long long> checked_window(const LongDecomposition& f,
                                      const Nomodata& nd) {
    if (nd.period() != f.period())
        throw DomainError("nomodata period does not match the decomposition");
    long long nonmono = 0;
    for (int i = 1; i <= f.period(); ++i)
        if (!is_scaled_monomial(f.factor(i))) ++nonmono;
    if (nonmono != nd.count())
        throw DomainError("the listing does not match the decomposition");
    for (long long a : nd.alpha_window())
        if (is_scaled_monomial(f.factor(a)))
            throw DomainError("the listing does not match the decomposition");
    return nd.alpha_window();
}

}  // namespace

TraceFn trace_of_word(const Word& w, const LongDecomposition& f,
                      const Nomodata& nd) {
    if (w.period() != f.period())
        throw DomainError("word and decomposition periods differ");
    for (const Generator& g : w.letters())
        if (g.kind != Generator::Kind::T)
            throw DomainError("the trace is defined for swap words only");
    const auto alphas = checked_window(f, nd);
    auto out = act(w, f);
    if (!out)
        throw UndefinedAction("the word does not act on the decomposition: " +
                              out.failure->reason);
    TraceFn lam(nd.count());
    walk_swaps(out.evaluated->letters(), f, alphas,
               [&lam](long long j, int p, int sign) { lam.add(j, p, sign); });
    return lam;
}

// ---------------------------------------------------------------------------
// apply_trace / check_admissible.

Nomodata apply_trace(const Nomodata& nd, const TraceFn& lambda) {
    const long long m = nd.count();
    if (lambda.count != m)
        throw DomainError("trace and nomodata have different j-periods");
    std::vector<int> ps = nd.primes();
    {
        auto lp = lambda.primes();
        ps.insert(ps.end(), lp.begin(), lp.end());
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    }
    Nomodata::Table in, out, pud;
    for (long long j = 0; j < m; ++j) {
        for (int p : ps) {
            const long long l = lambda.at(j, p);
            const long long vin = nd.in(j, p) - l;
            if (vin < 0)
                throw NegativeEntry("updated in-degree at " + table_key(j, p) +
                                    " would be " + std::to_string(vin));
            const long long vout = nd.out(j, p) + l;
            if (vout < 0)
                throw NegativeEntry("updated out-degree at " + table_key(j, p) +
                                    " would be " + std::to_string(vout));
            const long long vpud =
                nd.pud(j, p) + l - lambda.at(j - 1, p);
            if (vpud < 0)
                throw NegativeEntry("updated puddle count at " + table_key(j, p) +
                                    " would be " + std::to_string(vpud));
            if (vin != 0) in[{j, p}] = vin;
            if (vout != 0) out[{j, p}] = vout;
            if (vpud != 0) pud[{j, p}] = vpud;
        }
    }
    // Moved listing, renormalised so the base entry is again in 1..k.
    std::vector<std::pair<long long, long long>> moved;  // (position, old j)
    for (long long j = 0; j < m; ++j) {
        long long b = nd.alpha(j);
        for (int p : ps) b += lambda.at(j, p);
        moved.push_back({floor_mod(b - 1, nd.period()) + 1, j});
    }
    std::sort(moved.begin(), moved.end());
    for (std::size_t r = 0; r + 1 < moved.size(); ++r)
        if (moved[r].first == moved[r + 1].first)
            throw PipelineFailure("trace application collided two "
                                  "non-monomials at slot " +
                                  std::to_string(moved[r].first));
    std::vector<long long> window;
    Nomodata::Table rin, rout, rpud;
    for (long long r = 0; r < m; ++r) {
        window.push_back(moved[static_cast<std::size_t>(r)].first);
        const long long j = moved[static_cast<std::size_t>(r)].second;
        for (int p : ps) {
            if (auto it = in.find({j, p}); it != in.end()) rin[{r, p}] = it->second;
            if (auto it = out.find({j, p}); it != out.end()) rout[{r, p}] = it->second;
            if (auto it = pud.find({j, p}); it != pud.end()) rpud[{r, p}] = it->second;
        }
    }
    return Nomodata(nd.period(), std::move(window), std::move(rin),
                    std::move(rout), std::move(rpud));
}

AdmissibilityReport check_admissible(const TraceFn& lambda, const Nomodata& nd) {
    const long long m = nd.count();
    if (lambda.count != m)
        throw DomainError("trace and nomodata have different j-periods");
    std::vector<int> ps = nd.primes();
    {
        auto lp = lambda.primes();
        ps.insert(ps.end(), lp.begin(), lp.end());
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    }
    for (long long j = 0; j < m; ++j) {
        for (int p : ps) {
            const long long l = lambda.at(j, p);
            if (l > nd.in(j, p))
                return {false, "condition 1 violated at " + table_key(j, p) +
                                   ": lambda = " + std::to_string(l) +
                                   " exceeds in = " + std::to_string(nd.in(j, p))};
            if (l < -nd.out(j, p))
                return {false, "condition 1 violated at " + table_key(j, p) +
                                   ": lambda = " + std::to_string(l) +
                                   " is below -out = " +
                                   std::to_string(-nd.out(j, p))};
        }
    }
    for (long long j = 0; j < m; ++j) {
        for (int p : ps) {
            const long long v = nd.pud(j, p) + lambda.at(j, p) - lambda.at(j - 1, p);
            if (v < 0)
                return {false, "condition 2 violated at " + table_key(j, p) +
                                   ": pud + lambda(j) - lambda(j-1) = " +
                                   std::to_string(v)};
        }
    }
    for (int p : ps) {
        bool pud_all_zero = true;
        for (long long j = 0; j < m && pud_all_zero; ++j)
            if (nd.pud(j, p) != 0) pud_all_zero = false;
        if (!pud_all_zero) continue;
        for (long long j = 0; j < m; ++j)
            if (lambda.at(j, p) != 0)
                return {false, "condition 3 violated at " + table_key(j, p) +
                                   ": no degree-" + std::to_string(p) +
                                   " puddles, but lambda = " +
                                   std::to_string(lambda.at(j, p))};
    }
    return {true, ""};
}

// ---------------------------------------------------------------------------
// synthesize_word.

namespace {

// Live state for word synthesis: the decomposition moves as long-swaps are
// emitted, and the listing follows the same lineages as the starting
// nomodata (its entries drift out of 1..k instead of renormalising).
struct Synthesis {
    LongDecomposition g;
    std::vector<long long> alphas;
    int k;
    long long m;
    std::vector<Generator> acc;

    long long prev_of(long long j) const {
        return j == 0 ? alphas.back() - k : alphas[static_cast<std::size_t>(j - 1)];
    }
    long long next_of(long long j) const {
        return j == m - 1 ? alphas.front() + k : alphas[static_cast<std::size_t>(j + 1)];
    }

    long long pud_cur(long long j, int p) const {
        long long c = 0;
        for (long long i = prev_of(j) + 1; i < alphas[static_cast<std::size_t>(j)]; ++i) {
            const Poly M = g.factor(i);
            if (is_scaled_monomial(M) && M.degree() == p) ++c;
        }
        return c;
    }

    void apply_step(int slot) {
        auto sw = ritt_swap(g, slot);
        if (!sw) throw PipelineFailure("synthesis emitted an undefined swap");
        g = sw->result;
    }

    // Long-swap absorbing the nearest degree-p monomial on the right of the
    // j-th non-monomial into it (trace +1 at (j, p)).
    void emit_absorb(long long j, int p) {
        const long long A = alphas[static_cast<std::size_t>(j)];
        const long long hi = next_of(j);
        std::optional<long long> i;
        for (long long t = A + 1; t < hi && !i; ++t) {
            const Poly M = g.factor(t);
            if (is_scaled_monomial(M) && M.degree() == p) i = t;
        }
        if (!i)
            throw PipelineFailure("synthesis found no monomial to absorb");
        std::vector<Generator> u;
        for (long long t = A; t < *i; ++t) u.push_back(Generator::t(slot_residue(t, k)));
        for (long long t = *i - 1; t >= A; --t) apply_step(slot_residue(t, k));
        alphas[static_cast<std::size_t>(j)] += 1;
        acc.insert(acc.begin(), u.begin(), u.end());
    }

    // Long-swap emitting a degree-p monomial out of the j-th non-monomial to
    // the nearest free slot on the left (trace -1 at (j, p)).
    void emit_expel(long long j, int p) {
        const long long A = alphas[static_cast<std::size_t>(j)];
        const long long lo = prev_of(j);
        std::optional<long long> i;
        for (long long t = A - 1; t > lo && !i; --t) {
            const Poly M = g.factor(t);
            if (is_scaled_monomial(M) && M.degree() == p) i = t;
        }
        if (!i)
            throw PipelineFailure("synthesis found no slot to expel into");
        std::vector<Generator> u;
        for (long long t = A - 1; t >= *i; --t) u.push_back(Generator::t(slot_residue(t, k)));
        for (long long t = *i; t <= A - 1; ++t) apply_step(slot_residue(t, k));
        alphas[static_cast<std::size_t>(j)] -= 1;
        acc.insert(acc.begin(), u.begin(), u.end());
    }
};

}  // namespace

Word synthesize_word(const TraceFn& lambda, const LongDecomposition& f,
                     const Nomodata& nd) {
    const auto rep = check_admissible(lambda, nd);
    if (!rep.admissible)
        throw DomainError("the trace is not admissible: " + rep.violation);
    Synthesis st{f, checked_window(f, nd), f.period(), nd.count(), {}};
    TraceFn res = lambda;
    for (int p : lambda.primes()) {
        for (;;) {
            bool all_zero = true, all_pos = true, all_neg = true;
            for (long long j = 0; j < st.m; ++j) {
                const long long v = res.at(j, p);
                if (v != 0) all_zero = false;
                if (v <= 0) all_pos = false;
                if (v >= 0) all_neg = false;
            }
            if (all_zero) break;
            bool emitted = false;
            if (!all_pos && !all_neg) {
                // A sign change exists: move one unit at the earliest place
                // where the residual steps down.
                for (long long j = 0; j < st.m && !emitted; ++j) {
                    const long long here = res.at(j, p);
                    const long long left = res.at(j - 1, p);
                    if (here > 0 || left < 0 || (here == 0 && left == 0)) continue;
                    if (here < 0) {
                        st.emit_expel(j, p);
                        res.add(j, p, +1);
                    } else {
                        st.emit_absorb(floor_mod(j - 1, st.m), p);
                        res.add(j - 1, p, -1);
                    }
                    emitted = true;
                }
            } else if (all_pos) {
                for (long long j = 0; j < st.m && !emitted; ++j) {
                    if (st.pud_cur(floor_mod(j + 1, st.m), p) == 0) continue;
                    st.emit_absorb(j, p);
                    res.add(j, p, -1);
                    emitted = true;
                }
            } else {
                for (long long j = 0; j < st.m && !emitted; ++j) {
                    if (st.pud_cur(j, p) == 0) continue;
                    st.emit_expel(j, p);
                    res.add(j, p, +1);
                    emitted = true;
                }
            }
            if (!emitted)
                throw PipelineFailure("synthesis found no eligible long-swap");
        }
    }
    return Word(WordSystem::ASymK, st.k, std::move(st.acc));
}

// ---------------------------------------------------------------------------
// echo_of_encoding.

EchoData echo_of_encoding(const Word& w, const LongDecomposition& f) {
    const Nomodata nd = compute_nomodata(f);
    EchoData ed;
    ed.n_f = nd.count();
    Word rep = w;
    if (!evaluate_letters(w, f)) {
        auto out = act(w, f);
        if (!out)
            throw UndefinedAction("the word does not act on the decomposition: " +
                                  out.failure->reason);
        rep = *out.evaluated;
    }
    // Wrap swaps are rewritten through shift conjugation, so the
    // representative must live in a shift-capable system first.
    if (rep.system() == WordSystem::SymK || rep.system() == WordSystem::ASymK)
        rep = Word(WordSystem::STK, rep.period(), rep.letters());
    const Word wrap_free = phi_conjugate_wrap_swaps(rep);
    auto ev = evaluate_letters(wrap_free, f);
    if (!ev)
        throw PipelineFailure("echo: the wrap-free representative failed to "
                              "evaluate (" + ev.failure->reason + ")");
    const CurvePresentation pres = encoded_correspondence(*ev.witness, wrap_free);
    for (const CurvePiece& piece : pres.pieces) {
        if (const auto* fg = std::get_if<FactorGraph>(&piece)) {
            if (is_scaled_monomial(fg->factor)) continue;
            (fg->forward ? ed.n_B : ed.n_A) += 1;
        }
    }
    ed.echo = std::gcd(ed.n_f, std::llabs(ed.n_B - ed.n_A));
    return ed;
}

// ---------------------------------------------------------------------------
// column_adjust.

std::vector<long long> column_adjust(const std::vector<long long>& varpi, int e) {
    const long long M = static_cast<long long>(varpi.size());
    if (M < 1) throw DomainError("column adjustment needs a nonempty column");
    if (e < 1 || M % e != 0)
        throw DomainError("the short period must divide the column length");
    for (long long v : varpi)
        if (v < 0) throw DomainError("column adjustment needs nonnegative entries");
    const long long Z = M / e;
    auto at = [&](long long i) { return varpi[static_cast<std::size_t>(floor_mod(i, M))]; };
    long long s = 0;
    for (long long i = 1; i < M; ++i)
        if (varpi[static_cast<std::size_t>(i)] < varpi[static_cast<std::size_t>(s)]) s = i;
    // zeta on the residue classes of s, s-1, ..., s-e+1, in that order.
    std::vector<long long> zclass(static_cast<std::size_t>(e), 0);
    auto zeta_of = [&](long long i) {
        return zclass[static_cast<std::size_t>(floor_mod(s - i, e))];
    };
    for (long long x = 0; x + 1 < e; ++x) {
        const long long zc = zeta_of(s - x);
        bool ok = false;
        long long best = 0;
        for (long long z = 0; z < Z; ++z) {
            const long long gap = at(s - x + z * e) - at(s - x + z * e - 1);
            if (gap + zc >= 0) ok = true;
            const long long cand = gap + zc;
            if (z == 0 || cand > best) best = cand;
        }
        zclass[static_cast<std::size_t>(x + 1)] = ok ? 0 : best;
    }
    std::vector<long long> zeta(static_cast<std::size_t>(M), 0);
    for (long long i = 0; i < M; ++i) zeta[static_cast<std::size_t>(i)] = zeta_of(i);
    // Postconditions: the adjusted column is nonnegative and every index has
    // a representative of its class where it steps up.
    auto lam = [&](long long i) { return at(i) + zeta_of(i); };
    for (long long i = 0; i < M; ++i) {
        if (zeta[static_cast<std::size_t>(i)] > 0 || lam(i) < 0)
            throw PipelineFailure("column adjustment produced a bad correction");
        bool has = false;
        for (long long z = 0; z < Z && !has; ++z)
            if (lam(i + z * e) >= lam(i + z * e - 1)) has = true;
        if (!has)
            throw PipelineFailure("column adjustment postcondition failed");
    }
    return zeta;
}

// ---------------------------------------------------------------------------
// build_periodic_lambda.

TraceFn build_periodic_lambda(const LongDecomposition& f, const Nomodata& nd,
                              long long e) {
    const long long m = nd.count();
    if (e < 1 || m % e != 0)
        throw DomainError("the echo must divide the number of non-monomials "
                          "per period");
    (void)checked_window(f, nd);
    TraceFn lam(m);
    for (int p : nd.primes()) {
        bool pud_all_zero = true;
        for (long long j = 0; j < m && pud_all_zero; ++j)
            if (nd.pud(j, p) != 0) pud_all_zero = false;
        if (pud_all_zero) {
            // Frozen prime: nothing can move, so the tables must already
            // repeat with period e.
            for (long long j = 0; j < m; ++j)
                if (nd.in(j, p) != nd.in(j + e, p) || nd.out(j, p) != nd.out(j + e, p))
                    throw DomainError(
                        "the degree tables for p = " + std::to_string(p) +
                        " are not e-periodic and no puddle can adjust them; "
                        "e is not the echo of a genuine encoding");
            continue;
        }
        // Movable prime: in + out must repeat with period e (it is invariant
        // under every swap, so no trace could fix a mismatch).
        for (long long j = 0; j < m; ++j)
            if (nd.in(j, p) + nd.out(j, p) != nd.in(j + e, p) + nd.out(j + e, p))
                throw DomainError(
                    "the total degree table for p = " + std::to_string(p) +
                    " is not e-periodic; e is not the echo of a genuine "
                    "encoding");
        // Moving monomials changes in(j) by -lambda(j) and pud(j) by
        // lambda(j) - lambda(j-1), so pud(j) + in(j) - in(j-1) is preserved;
        // it must already repeat with period e or no trace can help.
        for (long long j = 0; j < m; ++j)
            if (nd.pud(j, p) + nd.in(j, p) - nd.in(j - 1, p) !=
                nd.pud(j + e, p) + nd.in(j + e, p) - nd.in(j + e - 1, p))
                throw DomainError(
                    "the puddle pattern for p = " + std::to_string(p) +
                    " is not e-periodic; e is not the echo of a genuine "
                    "encoding");
        bool already = true;
        for (long long j = 0; j < m && already; ++j)
            if (nd.in(j, p) != nd.in(j + e, p) || nd.pud(j, p) != nd.pud(j + e, p))
                already = false;
        if (already) continue;  // nothing to fix for this prime
        std::vector<long long> varpi;
        for (long long j = 0; j < m; ++j) varpi.push_back(nd.in(j, p));
        const auto zeta = column_adjust(varpi, static_cast<int>(e));
        for (long long j = 0; j < m; ++j)
            lam.add(j, p, varpi[static_cast<std::size_t>(j)] +
                              zeta[static_cast<std::size_t>(j)]);
    }
    const auto rep = check_admissible(lam, nd);
    if (!rep.admissible)
        throw DomainError("the periodic adjustment is not admissible (" +
                          rep.violation + "); e is not the echo of a genuine "
                          "encoding");
    return lam;
}

// ---------------------------------------------------------------------------
// expunge_tk.

namespace {

std::vector<Generator> reversed_letters(const std::vector<Generator>& ls) {
    return std::vector<Generator>(ls.rbegin(), ls.rend());
}

// v0 * t_k rewritten as v_r * v_l * t_k * v2 with v2 supported on
// t_2..t_{k-2}; returns the pieces of the replacement word
// u3 * u2' * u1' * v2 whose action keeps the N-periodic nomodata while
// dropping the wrap letter.
std::vector<Generator> expunge_one_wrap(const std::vector<Generator>& prefix,
                                        int k, long long N) {
    const Word v0(WordSystem::SymK, k, prefix);
    const auto pi0 = permutation_image(v0);
    const long long b = pi0.window[0] - 1;
    std::vector<Generator> vr;  // [t_b .. t_1]
    for (long long t = b; t >= 1; --t) vr.push_back(Generator::t(static_cast<int>(t)));
    const Word vr_inv(WordSystem::SymK, k, reversed_letters(vr));
    const auto pi1 = permutation_image(concat(vr_inv, v0));
    const long long a = pi1.window[static_cast<std::size_t>(k - 1)];
    std::vector<Generator> vl;  // [t_a .. t_{k-1}]
    for (long long t = a; t <= k - 1; ++t) vl.push_back(Generator::t(static_cast<int>(t)));
    if (b + 1 > N)
        throw PipelineFailure("expunge: the transited factor crossed out of "
                              "the first short period");
    if (a < k - N + 1)
        throw PipelineFailure("expunge: the boundary factor came from outside "
                              "the last short period");
    std::vector<Generator> v2_letters = reversed_letters(vl);
    {
        auto t = vr_inv.letters();
        v2_letters.insert(v2_letters.end(), t.begin(), t.end());
        v2_letters.insert(v2_letters.end(), prefix.begin(), prefix.end());
    }
    const Word v2 = reduce(Word(WordSystem::SymK, k, std::move(v2_letters)));
    for (const Generator& g : v2.letters())
        if (g.index <= 1 || g.index >= k - 1)
            throw PipelineFailure("expunge: the inner remainder touches a "
                                  "boundary slot");

    const long long blocks = static_cast<long long>(k) / N;
    // u_j = [t_{1+(j-1)N} .. t_{b+(j-1)N}], the transit copied into period j.
    auto block_u = [&](long long j) {
        std::vector<Generator> u;
        for (long long t = 1; t <= b; ++t)
            u.push_back(Generator::t(static_cast<int>(t + (j - 1) * N)));
        return u;
    };
    const Word X = concat(Word(WordSystem::SymK, k, block_u(blocks)),
                          Word(WordSystem::SymK, k, vl));
    const long long a2 = permutation_image(X).window[static_cast<std::size_t>(k - 1)];
    std::vector<Generator> wl;  // [t_{a2} .. t_{k-1}]
    for (long long t = a2; t <= k - 1; ++t) wl.push_back(Generator::t(static_cast<int>(t)));
    const Word u0 = reduce(concat(Word(WordSystem::SymK, k, reversed_letters(wl)), X));
    for (const Generator& g : u0.letters())
        if (g.index < k - N + 1 || g.index > k - 2)
            throw PipelineFailure("expunge: the folded transit left the last "
                                  "short period");
    std::vector<Generator> u1p = u0.letters();  // u0 * u_{blocks-1} * ... * u_2
    for (long long j = blocks - 1; j >= 2; --j) {
        const auto uj = block_u(j);
        u1p.insert(u1p.end(), uj.begin(), uj.end());
    }
    std::vector<Generator> u2p;  // shifted copies of wl^{-1}, leftmost first
    if (!wl.empty()) {
        if (a2 < k - N + 2)
            throw PipelineFailure("expunge: the folded boundary word cannot "
                                  "clear the wrap slot");
        for (long long j = 1; j <= blocks - 1; ++j) {
            const long long shift = -(blocks - j) * N;
            for (long long t = k - 1; t >= a2; --t)
                u2p.push_back(Generator::t(static_cast<int>(t + shift)));
        }
    }
    std::vector<Generator> u3;  // [t_N, t_{2N}, .., t_{k-N}]
    for (long long t = N; t <= k - N; t += N)
        u3.push_back(Generator::t(static_cast<int>(t)));

    std::vector<Generator> result = std::move(u3);
    result.insert(result.end(), u2p.begin(), u2p.end());
    result.insert(result.end(), u1p.begin(), u1p.end());
    const auto& v2l = v2.letters();
    result.insert(result.end(), v2l.begin(), v2l.end());
    return result;
}

}  // namespace

Word expunge_tk(const Word& v, const LongDecomposition& f, long long N) {
    const int k = f.period();
    if (v.period() != k)
        throw DomainError("word and decomposition periods differ");
    for (const Generator& g : v.letters())
        if (g.kind != Generator::Kind::T)
            throw DomainError("expunging is defined for swap words only");
    if (N < 1 || k % N != 0)
        throw DomainError("the position period must divide the period");
    const bool has_wrap = std::any_of(
        v.letters().begin(), v.letters().end(),
        [k](const Generator& g) { return g.index == k; });
    if (!has_wrap) return Word(WordSystem::SymK, k, v.letters());
    if (N == k) return Word(WordSystem::SymK, k);

    auto out = act(v, f);
    if (!out)
        throw UndefinedAction("the word does not act on the decomposition: " +
                              out.failure->reason);
    std::vector<Generator> cur = out.evaluated->letters();
    for (;;) {
        std::size_t q = cur.size();
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i].index == k) {
                q = i;
                break;
            }
        }
        if (q == cur.size()) break;
        const std::vector<Generator> prefix(cur.begin(),
                                            cur.begin() + static_cast<long>(q));
        const std::vector<Generator> tail(cur.begin() + static_cast<long>(q) + 1,
                                          cur.end());
        auto ev = evaluate_letters(Word(WordSystem::ASymK, k, tail), f);
        if (!ev)
            throw PipelineFailure("expunge: a tail of the evaluated word "
                                  "stopped evaluating");
        const auto hat = expunge_one_wrap(prefix, k, N);
        cur.assign(hat.begin(), hat.end());
        cur.insert(cur.end(), tail.begin(), tail.end());
    }
    const Word u(WordSystem::SymK, k, std::move(cur));
    auto res = act(u, f);
    if (!res)
        throw PipelineFailure("expunge: the wrap-free word lost its action (" +
                              res.failure->reason + ")");
    if (!compute_nomodata(*res.result).is_position_periodic(N))
        throw PipelineFailure("expunge: the wrap-free word lost the position "
                              "periodicity");
    return u;
}

// ---------------------------------------------------------------------------
// cfree_mahler_reduce.

namespace {

LongDecomposition twist_factors(const LongDecomposition& f,
                                const FieldAutomorphism& tau) {
    std::vector<Poly> fs;
    fs.reserve(f.factors().size());
    for (const Poly& P : f.factors()) fs.push_back(apply_aut(tau, P));
    return LongDecomposition(std::move(fs), f.sigma());
}

Word lift_letters(const Word& w, WordSystem sys) {
    return Word(sys, w.period(), w.letters());
}

}  // namespace

CfreeMahlerReduction cfree_mahler_reduce(const Word& w,
                                         const LongDecomposition& f,
                                         const FieldAutomorphism& tau) {
    const int k = f.period();
    if (w.period() != k)
        throw DomainError("word and decomposition periods differ");
    auto outw = act(w, f);
    if (!outw)
        throw UndefinedAction("the word does not act on the decomposition: " +
                              outw.failure->reason);
    if (!linear_equivalence(*outw.result, twist_factors(f, tau)))
        throw DomainError("the encoding equation does not hold: the word does "
                          "not send the decomposition to its twist");

    const Nomodata nd = compute_nomodata(f);
    const EchoData ed = echo_of_encoding(w, f);
    const long long m = nd.count();
    if ((k * ed.echo) % m != 0)
        throw DomainError("the echo is incompatible with the listing; the "
                          "encoding is not genuine");
    const long long N = k * ed.echo / m;

    Word mixer(WordSystem::SymK, k);
    std::optional<LongDecomposition> base;
    if (nd.is_position_periodic(N)) {
        base = f;
    } else {
        const TraceFn lam = build_periodic_lambda(f, nd, ed.echo);
        const Word v = synthesize_word(lam, f, nd);
        auto outv = act(v, f);
        if (!outv)
            throw PipelineFailure("reduction: the synthesized word lost its "
                                  "action");
        if (!compute_nomodata(*outv.result).is_position_periodic(N))
            throw PipelineFailure("reduction: the synthesized word missed the "
                                  "periodic nomodata");
        mixer = expunge_tk(v, f, N);
        auto outu = act(mixer, f);
        if (!outu)
            throw PipelineFailure("reduction: the mixing word lost its action");
        base = *outu.result;
    }
    const Nomodata ndg = compute_nomodata(*base);
    if (!ndg.is_position_periodic(N))
        throw PipelineFailure("reduction: the base decomposition is not "
                              "position-periodic");

    const Word u_w = lift_letters(mixer, w.system());
    const Word u_w_inv =
        Word(w.system(), k, reversed_letters(mixer.letters()));
    const Word w2 = reduce(concat(u_w, concat(w, u_w_inv)));

    auto outg = act(w2, *base);
    if (!outg)
        throw DomainError("the re-encoded word does not act on the base "
                          "decomposition");
    if (!linear_equivalence(*outg.result, twist_factors(*base, tau)))
        throw DomainError("the re-encoded word does not send the base to its "
                          "twist");

    // Diagnostics pinning the skew-twist shape.
    for (const Generator& g : w2.letters())
        if (g.kind == Generator::Kind::Eps || g.kind == Generator::Kind::EpsInv)
            throw DomainError("diagnostic spread-free failed: the re-encoded "
                              "word keeps spread letters");
    std::vector<Generator> swaps;
    for (const Generator& g : w2.letters())
        if (g.kind == Generator::Kind::T) swaps.push_back(g);
    const Word tail(WordSystem::ASymK, k, swaps);
    const TraceFn tr = trace_of_word(tail, *base, ndg);
    if (!tr.is_zero())
        throw DomainError("diagnostic traceless failed: the swap part of the "
                          "re-encoded word moves monomials across "
                          "non-monomials\n" + tr.str());
    auto outt = act(tail, *base);
    if (!outt)
        throw PipelineFailure("reduction: the swap tail lost its action");
    bool puddle_only = true;
    walk_swaps(outt.evaluated->letters(), *base, ndg.alpha_window(),
               [&puddle_only](long long, int, int) { puddle_only = false; });
    if (!puddle_only)
        throw DomainError("diagnostic puddle-swaps failed: some swap of the "
                          "re-encoded word touches a non-monomial");

    CfreeMahlerReduction red{*base, mixer, w2, ed,
                             MahlerClassification::SkewTwist};
    return red;
}

} // namespace ritt
