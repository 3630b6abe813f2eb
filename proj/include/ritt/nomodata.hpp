#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ritt/longdecomp.hpp"
#include "ritt/words.hpp"

namespace ritt {

// ---------------------------------------------------------------------------
// Bookkeeping invariants of clean C-free decompositions.
//
// A decomposition is clean C-free when every factor is either a scaled
// monomial c*x^q (q prime) or a C-free Ritt polynomial c * x^r * u(x^l)^n
// written literally in that shape with deg u >= 1 and (l > 1 or n > 1),
// and at least one factor per period is a non-monomial.
//
// The nomodata of such a decomposition records, per period:
//   alpha  - the increasing listing of non-monomial slot indices, with
//            alpha(0) the least positive one and alpha(j+m) = alpha(j) + k;
//   in     - in(j, p) = v_p(l) for the j-th non-monomial, its inner degree
//            prime valuation;
//   out    - out(j, p) = v_p(n), the outer degree valuation;
//   pud    - pud(j, p) = number of scaled monomials of degree p strictly
//            between the (j-1)-st and j-th non-monomials ("puddle" counts).
// All tables are m-periodic in j and supported on finitely many primes.

class Nomodata {
public:
    using Table = std::map<std::pair<long long, int>, long long>;

    Nomodata(int period_k, std::vector<long long> alpha_window,
             Table in, Table out, Table pud);

    int period() const { return k_; }
    // Number of non-monomials per period.
    long long count() const { return static_cast<long long>(alpha_.size()); }

    // alpha(j) for any integer j, extended by alpha(j+m) = alpha(j) + k.
    long long alpha(long long j) const;

    long long in(long long j, int p) const { return table_at(in_, j, p); }
    long long out(long long j, int p) const { return table_at(out_, j, p); }
    long long pud(long long j, int p) const { return table_at(pud_, j, p); }

    // Sorted union of the primes appearing in any table.
    std::vector<int> primes() const;

    const std::vector<long long>& alpha_window() const { return alpha_; }
    const Table& in_table() const { return in_; }
    const Table& out_table() const { return out_; }
    const Table& pud_table() const { return pud_; }

    // Does the nomodata repeat with position period N? Requires N | k;
    // checks alpha(j + s) = alpha(j) + N with s = m*N/k (so the listing is
    // s-periodic up to the shift) and that all three tables are s-periodic.
    bool is_position_periodic(long long N) const;

    bool operator==(const Nomodata& o) const;
    bool operator!=(const Nomodata& o) const { return !(*this == o); }

    // Aligned tables: one row per j, one column per supported prime.
    std::string str() const;

private:
    long long table_at(const Table& t, long long j, int p) const;

    int k_ = 1;
    std::vector<long long> alpha_;  // increasing window alpha(0..m-1)
    Table in_, out_, pud_;          // keyed by (j mod m, prime); zeros elided
};

// Trace function: a finitely supported integer table lambda(j, p) with
// j mod m, recording how many degree-p monomials a word's swaps moved into
// (positive) or out of (negative) the j-th non-monomial.
struct TraceFn {
    long long count = 1;  // m, the j-period
    std::map<std::pair<long long, int>, long long> values;

    TraceFn() = default;
    explicit TraceFn(long long m) : count(m) {}

    long long at(long long j, int p) const;
    void add(long long j, int p, long long delta);
    bool is_zero() const { return values.empty(); }

    std::vector<int> primes() const;

    bool operator==(const TraceFn& o) const {
        return count == o.count && values == o.values;
    }
    bool operator!=(const TraceFn& o) const { return !(*this == o); }

    std::string str() const;
};

// Echo of an encoding w * f ~ f^tau: n_f counts non-monomials per period of
// f, n_B / n_A count forward / backward non-monomial factor pieces in the
// encoded correspondence of a wrap-free representative, and
// echo = gcd(n_f, |n_B - n_A|) with gcd(x, 0) = x.
struct EchoData {
    long long n_f = 0;
    long long n_A = 0;
    long long n_B = 0;
    long long echo = 0;

    bool operator==(const EchoData& o) const {
        return n_f == o.n_f && n_A == o.n_A && n_B == o.n_B && echo == o.echo;
    }
};

// check_admissible: result plus the first violated condition, if any.
struct AdmissibilityReport {
    bool admissible = true;
    std::string violation;  // empty when admissible
};

enum class MahlerClassification { SkewTwist };

std::string classification_str(MahlerClassification c);

// Result of the full reduction pipeline: the adjusted base decomposition g,
// the mixing word u with g = u * f, the re-encoding word w' with
// w' * g ~ g^tau, and the echo data of the original encoding.
struct CfreeMahlerReduction {
    LongDecomposition base;
    Word mixer;
    Word re_encoding;
    EchoData echo;
    MahlerClassification classification = MahlerClassification::SkewTwist;
};

// ---------------------------------------------------------------------------
// Operations.

// Computes the nomodata of a clean C-free decomposition. Throws
// NotCleanCFree when some factor fails the shape test or every factor is a
// scaled monomial.
Nomodata compute_nomodata(const LongDecomposition& f);

// Trace of a swap word along its action on f, relative to the listing of
// nd. Letters act rightmost first; each defined swap of a non-monomial with
// an adjacent degree-p monomial contributes +1 (monomial absorbed from the
// right) or -1 (emitted to the left) at the lineage index of that
// non-monomial. Swaps of two monomials contribute nothing. Throws
// UndefinedAction when the word does not act on f.
TraceFn trace_of_word(const Word& w, const LongDecomposition& f,
                      const Nomodata& nd);

// Formal update of nomodata by a trace:
//   alpha'(j) = alpha(j) + sum_p lambda(j, p)
//   in'  = in  - lambda,   out' = out + lambda,
//   pud'(j, p) = pud(j, p) + lambda(j, p) - lambda(j - 1, p),
// renormalised so alpha'(0) is again the least positive entry. Throws
// NegativeEntry when any updated table entry would be negative.
Nomodata apply_trace(const Nomodata& nd, const TraceFn& lambda);

// Is lambda admissible for nd? Checks, in order:
//   1. -out(j, p) <= lambda(j, p) <= in(j, p) for all j, p;
//   2. pud(j, p) + lambda(j, p) - lambda(j - 1, p) >= 0 for all j, p;
//   3. lambda(., p) = 0 whenever pud(., p) = 0.
AdmissibilityReport check_admissible(const TraceFn& lambda, const Nomodata& nd);

// Builds a swap word (no shifts, no spreads) whose action on f is defined
// and whose trace relative to nd equals lambda. Requires lambda admissible.
Word synthesize_word(const TraceFn& lambda, const LongDecomposition& f,
                     const Nomodata& nd);

// Echo data of the encoding given by w acting on f. Requires act(w, f)
// defined; wrap swaps are rewritten through shifts before counting.
EchoData echo_of_encoding(const Word& w, const LongDecomposition& f);

// Column adjustment: given a nonnegative integer column varpi of size M and
// a divisor e of M, returns the e-periodic nonpositive correction zeta such
// that lambda = varpi + zeta is nonnegative and every j admits some z with
// lambda(j + z*e) >= lambda(j + z*e - 1), indices mod M.
std::vector<long long> column_adjust(const std::vector<long long>& varpi, int e);

// Builds an admissible trace lambda, e-periodic in j, with in - lambda
// e-periodic, by column-adjusting the in-table column of each supported
// prime. Requires e | m; throws DomainError when the tables are incompatible
// with period e (then e is not the echo of any genuine encoding).
TraceFn build_periodic_lambda(const LongDecomposition& f, const Nomodata& nd,
                              long long e);

// Rewrites a swap word v (wrap letters allowed) into a wrap-free word u such
// that u * f is defined and has N-position-periodic nomodata, given that
// v * f does. Requires N | k. Returns v unchanged when it is already
// wrap-free; internal contract violations throw PipelineFailure.
Word expunge_tk(const Word& v, const LongDecomposition& f, long long N);

// Full reduction of an encoding w * f ~ f^tau over a clean C-free
// decomposition: computes the echo, moves f by a mixing word u to a base g
// whose nomodata is (k*echo/m)-position-periodic, conjugates w to a
// re-encoding w' with w' * g ~ g^tau, and checks the shape diagnostics
// ("spread-free", "traceless", "puddle-swaps") that pin the skew-twist
// classification. Throws DomainError when the encoding equation fails or a
// diagnostic is violated.
CfreeMahlerReduction cfree_mahler_reduce(const Word& w,
                                         const LongDecomposition& f,
                                         const FieldAutomorphism& tau);

} // namespace ritt
