#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ritt/longdecomp.hpp"

namespace ritt {

// ---------------------------------------------------------------------------
// Words over the swap/shift/spread generator alphabet.
//
// A word is a string of letters; the RIGHTMOST letter acts first. Four
// systems share the alphabet with different letters admitted:
//   SymK    -- t_1 .. t_{k-1}
//   ASymK   -- t_1 .. t_k             (indices mod k, wrap swap allowed)
//   STK     -- ASymK plus phi, phi^-1
//   STKPlus -- STK plus eps_p, eps_p^-1 for primes p

enum class WordSystem { SymK, ASymK, STK, STKPlus };

std::string word_system_name(WordSystem s);

struct Generator {
    enum class Kind { T, Phi, PhiInv, Eps, EpsInv };

    Kind kind = Kind::T;
    int index = 1;  // T: slot index 1..k; Eps/EpsInv: the prime p; else unused.

    static Generator t(int i) { return {Kind::T, i}; }
    static Generator phi() { return {Kind::Phi, 0}; }
    static Generator phi_inv() { return {Kind::PhiInv, 0}; }
    static Generator eps(int p) { return {Kind::Eps, p}; }
    static Generator eps_inv(int p) { return {Kind::EpsInv, p}; }

    bool operator==(const Generator& o) const {
        return kind == o.kind && index == o.index;
    }
    bool operator!=(const Generator& o) const { return !(*this == o); }

    std::string str() const;  // "t3", "phi", "phi-", "e2", "e2-"
};

class Word {
public:
    // Validates every letter against the system; T indices are reduced mod
    // period into 1..period. Throws DomainError on alphabet violations.
    Word(WordSystem system, int period, std::vector<Generator> letters = {});

    WordSystem system() const { return system_; }
    int period() const { return k_; }
    const std::vector<Generator>& letters() const { return letters_; }
    int size() const { return static_cast<int>(letters_.size()); }
    bool empty() const { return letters_.empty(); }

    // Whitespace-separated letters, e.g. "t3 phi phi- e2 e2-".
    std::string str() const;
    static Word parse(WordSystem system, int period, const std::string& text);

    bool operator==(const Word& o) const {
        return system_ == o.system_ && k_ == o.k_ && letters_ == o.letters_;
    }
    bool operator!=(const Word& o) const { return !(*this == o); }

private:
    WordSystem system_;
    int k_;
    std::vector<Generator> letters_;
};

// Concatenation (v acts after u, i.e. the product v*u). Systems and periods
// must agree.
Word concat(const Word& v, const Word& u);

// ---------------------------------------------------------------------------
// Permutation images.

// A permutation of the integers commuting with x -> x+k, described by the
// images of one window 1..k. The net shift contributed by phi-letters is
// offset() = (sum window - sum 1..k) / k.
struct PermutationImage {
    int period = 1;
    std::vector<long long> window;  // window[i-1] = image of i, for i = 1..k

    long long apply(long long x) const;
    long long apply_inverse(long long x) const;
    long long offset() const;
    bool is_identity() const;

    bool operator==(const PermutationImage& o) const {
        return period == o.period && window == o.window;
    }
    bool operator!=(const PermutationImage& o) const { return !(*this == o); }

    std::string str() const;
};

// Image of an eps-free word: t_i switches i+rk with i+1+rk, phi subtracts 1
// (so that conjugation matches phi t_i phi^-1 = t_{i-1}).
// Throws DomainError when the word contains eps-letters.
PermutationImage permutation_image(const Word& w);

// Number of letters in any reduced expression of a shift-free element
// (offset must be 0).
long long inversion_count(const PermutationImage& pi);

// ---------------------------------------------------------------------------
// Reduction and canonical forms.

// Canonical representative of the same group element. Length-reducing rules
// (t_i t_i, phi phi^-1, eps_p eps_p^-1) are applied to fixpoint; ties between
// equal-length representatives break to a deterministic normal form:
// eps-letters (primes ascending), then the net phi-power, then the swap
// letters as the lexicographically least reduced word. Idempotent; for
// SymK/ASymK the output length is the inversion count of the image.
Word reduce(const Word& w);

// Insert-sort transit form: the unique factorization into right-to-left
// transits, one per slot, inserting the top factors first. Accepts SymK
// words, or ASymK words avoiding at least one swap index (the avoided index
// plays the role of the excluded wrap swap). Reduced.
Word first_canonical_form(const Word& w);

// Form v . w_r ... w_1 for interior cut-points 0 < c_1 < ... < c_{r-1} < k:
// each w_j permutes only the slots of chunk j = (c_{j-1}, c_j], and v moves
// whole positions between chunks without reordering within any chunk. SymK
// only.
Word second_canonical_form(const Word& w, const std::vector<int>& cuts);

// Rewrites each wrap swap t_k as phi t_1 phi^-1 (same group element).
// Requires a system containing phi when a wrap swap is present.
Word phi_conjugate_wrap_swaps(const Word& w);

// For a transit s (a run of mod-k consecutive swap indices, descending or
// ascending) and a swap word w supported strictly inside the dragged range,
// returns w-hat with s.w == w-hat.s: every index shifts by -1 when s
// descends, +1 when s ascends. The group identity is verified via
// permutation images; DomainError when it fails.
Word commute_transit(const Word& s, const Word& w);

// Five-part refactoring of a swap word avoiding residue i: words
// (upper_post, lower_post, block, upper_pre, lower_pre) whose concatenation
// equals w as a group element, where the pre/post parts permute only within
// the chunk below slot k (letters strictly between i and k) or only within
// the chunk above (letters strictly between k and i+k), and block swaps the
// top m slots of the lower chunk with the bottom m of the upper as whole
// blocks. Input must avoid residue i; verified by permutation images.
struct BlockSwapFactorization {
    Word upper_post;
    Word lower_post;
    Word block;
    Word upper_pre;
    Word lower_pre;
    int block_size = 0;  // m

    Word concatenated() const;
};
BlockSwapFactorization block_swap_factorization(const Word& w, int i);

// ---------------------------------------------------------------------------
// Evaluation with witnesses.

// Chain f^0 .. f^n with gauges L^1 .. L^n: at step j the letter w_j sends
// the gauged decomposition L^j.apply(f^{j-1}) to f^j on the nose (strict
// swap pair, literal rotation, or exact spread/merge of every slot).
struct WitnessSequence {
    std::vector<LongDecomposition> decompositions;
    std::vector<SkewPeriodicLinears> linears;
};

struct ActionFailure {
    int step = 0;         // 1-based position counted from the rightmost letter
    Generator letter;
    std::string reason;
};

struct ActOutcome {
    std::optional<LongDecomposition> result;
    std::optional<WitnessSequence> witness;
    std::optional<Word> evaluated;  // representative the witness refers to
    std::optional<ActionFailure> failure;

    explicit operator bool() const { return result.has_value(); }
};

// Evaluates the letters of w exactly as written, rightmost first, recording
// the witness chain. No reduction, no retries.
ActOutcome evaluate_letters(const Word& w, const LongDecomposition& f);

// Partial action of the group element of w: evaluates a reduced
// representative; when a letter is undefined there, retries representatives
// reachable by the symmetric rules (commutations and, for period >= 3,
// braid moves) within the given rewrite budget. The reported failure is the
// first blocking letter of the canonical representative.
ActOutcome act(const Word& w, const LongDecomposition& f, int rewrite_budget = 10000);

// Exact per-step check of a witness chain against the letters of w.
bool verify_witness_chain(const WitnessSequence& ws, const Word& w);

// ---------------------------------------------------------------------------
// Encoded correspondences.

// Basic correspondence pieces between a parameter x1 (before a step) and x2
// (after it):
//   LinearGraph:          x1 = map(x2)
//   PowerGraph, forward:  x2 = (gauge^{-1}(x1))^p
//   PowerGraph, backward: x1 = gauge^{-1}(x2^p)
//   FactorGraph, forward: x2 = factor(x1)
//   FactorGraph, backward: x1 = factor(x2)
struct LinearGraph {
    LinearPoly map;
};
struct PowerGraph {
    int prime = 2;
    LinearPoly gauge;
    bool forward = true;
};
struct FactorGraph {
    Poly factor;
    bool forward = true;
};
using CurvePiece = std::variant<LinearGraph, PowerGraph, FactorGraph>;

std::string piece_str(const CurvePiece& piece);

struct CurvePresentation {
    std::vector<CurvePiece> pieces;  // in action order: pieces[0] acts first

    std::string str() const;
};

// One piece per letter of w (rightmost letter first): swap letters give the
// graph of the first gauge entry, spread/merge letters give power graphs,
// shift letters give the graph of the rotated factor. Wrap swaps t_k are
// rejected; rewrite them via phi_conjugate_wrap_swaps before evaluating.
CurvePresentation encoded_correspondence(const WitnessSequence& ws, const Word& w);

}  // namespace ritt
