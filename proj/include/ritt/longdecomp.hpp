#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ritt/field.hpp"
#include "ritt/poly.hpp"

namespace ritt {

// ---------------------------------------------------------------------------
// Swap-eligibility data for a single indecomposable factor.

// Canonical shape x^k * u(x^l)^n with u monic, u(0) != 0, u not a proper
// power, and u not a polynomial in y^j for any j >= 2.
struct RittForm {
    int k_exp = 0;
    int inner_period = 1;
    int outer_power = 1;
    Poly core = Poly(BaseElement(1));

    Poly represented() const;  // x^k * u(x^l)^n rebuilt exactly
    std::string str() const;
};

enum class SwapVerdict { Unswappable, CFreeSwappable, TypeC };
std::string verdict_name(SwapVerdict v);

struct SwapClass {
    SwapVerdict verdict = SwapVerdict::Unswappable;
    // (A, B) with A(P(B(x))) equal to the canonical target: x^deg P for
    // power-related factors, form.represented() for other C-free swappables,
    // or the monic Chebyshev of matching degree for type C.
    std::optional<std::pair<LinearPoly, LinearPoly>> normalizers;
    std::optional<RittForm> ritt_witness;
};

// (A, B) with A(P(B(x))) == x^deg(P), when P is linearly related to a power.
std::optional<std::pair<LinearPoly, LinearPoly>> power_normalizers(const Poly& P);

// (A, B) with A(P(B(x))) equal to the monic Chebyshev of degree deg(P)
// (odd, >= 3), solvable over the base field.
std::optional<std::pair<LinearPoly, LinearPoly>> chebyshev_normalizers(const Poly& P);

struct RittFormResult {
    RittForm form;
    LinearPoly outer;  // A
    LinearPoly inner;  // B; A(P(B(x))) == form.represented()
};

// Canonical swap form of an indecomposable polynomial of degree >= 2; absent
// when P is Chebyshev-related (type C) or carries no swap-eligible shape.
std::optional<RittFormResult> to_ritt_form(const Poly& P);

SwapClass classify_swappable(const Poly& P);

// ---------------------------------------------------------------------------
// Skew-periodic long decompositions.

// Factors f_1 .. f_k (inner to outer), extended to all integer indices by
// f_{i+k} = sigma(f_i) coefficientwise. Every factor must be indecomposable
// of degree >= 2.
class LongDecomposition {
public:
    LongDecomposition(std::vector<Poly> factors, FieldAutomorphism sigma);

    int period() const { return static_cast<int>(f_.size()); }
    const FieldAutomorphism& sigma() const { return sigma_; }
    const std::vector<Poly>& factors() const { return f_; }

    // 1-based skew-periodic access for any integer index.
    Poly factor(long long i) const;

    // f_k(f_{k-1}(...f_1(x)...)), one full period.
    Poly compose_period() const;

    bool operator==(const LongDecomposition& o) const;
    bool operator!=(const LongDecomposition& o) const { return !(*this == o); }

    // "period k; sigma a,b,c,d; fk = ...; ...; f1 = ..."
    std::string str() const;

private:
    std::vector<Poly> f_;
    FieldAutomorphism sigma_;
};

LongDecomposition parse_decomposition(const std::string& text);

// Skew-periodic sequence of linear polynomials L_1 .. L_k with the same
// extension rule L_{i+k} = sigma(L_i).
class SkewPeriodicLinears {
public:
    SkewPeriodicLinears(std::vector<LinearPoly> entries, FieldAutomorphism sigma);

    int period() const { return static_cast<int>(L_.size()); }
    const FieldAutomorphism& sigma() const { return sigma_; }
    const std::vector<LinearPoly>& entries() const { return L_; }

    LinearPoly entry(long long i) const;

    // Gauge action: h_i = entry(i+1)^{-1} ( f_i ( entry(i)(x) ) ).
    LongDecomposition apply(const LongDecomposition& f) const;

    std::string str() const;

private:
    std::vector<LinearPoly> L_;
    FieldAutomorphism sigma_;
};

// ---------------------------------------------------------------------------
// Partial actions.

struct RittSwapResult {
    LongDecomposition result;          // t_i * f, composition preserved exactly
    SkewPeriodicLinears equivalence;   // Lambda with Lambda.apply(f) == strict_from (period >= 3)
    LongDecomposition strict_from;     // ~ f, adjacent pair literally in an identity
    LongDecomposition strict_to;       // strict_from with the pair replaced
};

// Partial action of the i-th swap letter; absent when no two-sided identity
// match exists at (f_{i+1}, f_i) or the match is the tautological one.
// Requires period >= 2.
std::optional<RittSwapResult> ritt_swap(const LongDecomposition& f, int i);

// Shift action: factor j of the result is factor j+n of f.
LongDecomposition phi_shift(const LongDecomposition& f, int n);

// Spread/merge action for a prime p: direction +1 sends a representative
// with every factor of shape x^r * u(x^p) to the one with factors
// x^r * u(x)^p; direction -1 is the inverse. Absent when no linearly
// equivalent representative is eligible (e.g. some factor is a scaled
// monomial of degree exactly p).
std::optional<LongDecomposition> epsilon_action(const LongDecomposition& f, int p,
                                                int direction);

// 1-based index of the first slot that blocks epsilon_action; 0 when the
// action is defined. For direction -1, period+1 reports that every slot had a
// candidate shape but no assembled preimage mapped back onto f.
int epsilon_first_failure(const LongDecomposition& f, int p, int direction);

// Witness Lambda with Lambda.apply(f) == g, when f and g are linearly
// equivalent as skew-periodic decompositions (same period and sigma).
std::optional<SkewPeriodicLinears> linear_equivalence(const LongDecomposition& f,
                                                      const LongDecomposition& g);

// ---------------------------------------------------------------------------
// Wall certificates (produced by the clustering machinery).

enum class WallReason { UnswappableFactor, GatelessBoundary, CFreePrewall, UnownedGate };
std::string reason_name(WallReason r);

struct WallCertificate {
    int index = 0;  // boundary between f_index and f_{index+1}
    WallReason reason = WallReason::UnswappableFactor;
    std::string evidence;
};

// Certified permanent boundaries of f (sound, not complete).
std::vector<WallCertificate> wall_certificates(const LongDecomposition& f);

// ---------------------------------------------------------------------------
// Shared helpers.

bool is_indecomposable(const Poly& P);

// Exponent of the lowest nonzero term; -1 for the zero polynomial.
int low_exponent(const Poly& P);

}  // namespace ritt
