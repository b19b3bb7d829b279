#pragma once
// Search for simultaneous isogeny correspondences between pairs of the
// family's elliptic-curve orbits: a third-order differential invariant
// constant on isogeny classes, the first-order combination F, the derived
// companion G, their resultant R(s,t) by evaluation-interpolation, the
// algebraic companion H, known-factor stripping, and specialization checks
// by point counting over small prime fields.

#include <map>
#include <string>

#include "d6lab/curves.hpp"

namespace d6lab {

/// Fatal: the second/third-derivative terms failed to cancel in the
/// first-order combination (a theorem; indicates an implementation bug).
struct CancellationFailure : std::runtime_error {
    explicit CancellationFailure(const std::string& m) : std::runtime_error(m) {}
};

/// The combination F vanishes identically (diagonal case), so no derivative
/// formulas can be extracted from it.
struct DegenerateF : std::runtime_error {
    explicit DegenerateF(const std::string& m) : std::runtime_error(m) {}
};

/// Univariate rational function in lowest terms with monic denominator.
struct RatFunc {
    UniPoly num, den;
    bool is_zero() const { return num.is_zero(); }
};

RatFunc rat_make(const UniPoly& n, const UniPoly& d);
RatFunc rat_add(const RatFunc& a, const RatFunc& b);
RatFunc rat_sub(const RatFunc& a, const RatFunc& b);
RatFunc rat_mul(const RatFunc& a, const RatFunc& b);
RatFunc rat_div(const RatFunc& a, const RatFunc& b);
RatFunc rat_deriv(const RatFunc& a);
FqElem rat_eval(const RatFunc& a, const FqElem& x);  // BadParameter at a pole

/// The five one-variable lambda-invariant families: the Legendre parameter of
/// the base elliptic factor and of the four double-cover orbit curves.
enum class LambdaKind { Base, O6, O3a, O3b, O3c };
RatFunc lambda_function(const ExtField& F, LambdaKind k);

// third-order isogeny-class invariant of a nonconstant function:
// (2y'y''' - 3y''^2)/(4y'^2) + y'^2 (y^2-y+1)/(4y^2(y-1)^2)
RatFunc chi_plain(const RatFunc& lam);  // BadParameter on constant input

/// Sparse polynomial in (t, s, s1, s2, s3) over F_p, where s1, s2, s3 stand
/// for the first three derivatives of s as an unknown function of t.
struct DiffPoly {
    const ExtField* F = nullptr;
    std::map<std::array<int, 5>, FqElem> terms;  // exponents -> nonzero coeff
    bool is_zero() const { return terms.empty(); }
};
struct DiffRational {
    DiffPoly num, den;
};

DiffPoly diff_embed(const UniPoly& u, int var);  // univariate in variable var
DiffPoly diff_add(const DiffPoly& a, const DiffPoly& b);
DiffPoly diff_sub(const DiffPoly& a, const DiffPoly& b);
DiffPoly diff_mul(const DiffPoly& a, const DiffPoly& b);
FqElem diff_eval(const DiffPoly& a, const std::array<FqElem, 5>& point);
bool diff_rat_equal(const DiffRational& a, const DiffRational& b);

// chi of lam(s) with s an unknown function of t, expanded by the chain rule
DiffRational chi_composed(const RatFunc& lam);

/// One search case: the first orbit's curve at s isogenous to the same orbit
/// at t, simultaneously with the second orbit's curve at s and t.
struct CorrespondenceCase {
    LambdaKind first, second;
};

/// The first-order combination F(t,s,s') = s'^2 a(s) - b(t), where a and b
/// are the same rational function (difference of the two orbit invariants)
/// in the two variables.  Cancellation of s'' and s''' is re-verified from
/// the chain-rule expansion before the reduced form is returned.
struct FirstOrder {
    RatFunc a;  // in s; b is the same function of t
};
FirstOrder build_F(const ExtField& F, const CorrespondenceCase& c);

// numerator of the companion first-order equation G(t,s,s') obtained by
// substituting the s'' and s''' formulas implied by F = 0 into the first
// orbit's invariant equation; coefficients of s'^0..s'^10 at a point (s,t)
std::vector<u64> g_coeffs_at(const ExtField& F, const CorrespondenceCase& c, u64 s, u64 t);

/// Dense bivariate polynomial over F_p: coefficient of s^i t^j at c[i*(dt+1)+j].
struct Bivar {
    const PrimeField* K = nullptr;
    int ds = -1, dt = -1;
    std::vector<u64> c;
    u64 at(int i, int j) const { return c[(size_t)i * (size_t)(dt + 1) + (size_t)j]; }
};

// Res_{s'}(F, G) by grid evaluation and Newton interpolation; degree bounds
// grown until two consecutive sizes agree.  Throws DegenerateF for diagonal
// cases and UnluckyPrime if stabilization fails.
struct UnluckyPrime : std::runtime_error {
    explicit UnluckyPrime(const std::string& m) : std::runtime_error(m) {}
};
Bivar resultant_R(const ExtField& F, const CorrespondenceCase& c);

/// Stripping report: R with known two-variable factors and all one-variable
/// content removed, plus what was removed.
struct StripResult {
    Bivar rtilde;
    std::map<std::string, int> known;  // factor name -> multiplicity removed
    int content_s_deg = 0;             // degree of the removed s-only content
    int content_t_deg = 0;
};
StripResult strip_known(const Bivar& R);

// H(s0, t) = U(s0,t) R_t(s0,t)^2 - V(s0,t) R_s(s0,t)^2: the companion
// equation with s' := -R_t/R_s substituted into F, specialized at s = s0
UniPoly h_specialized(const ExtField& F, const CorrespondenceCase& c, const Bivar& R, u64 s0);

/// One candidate common factor of H(s0,t) and Rtilde(s0,t) and its verdict.
struct Candidate {
    int degree = 0;
    std::string verdict;  // "confirmed", "spurious", or "unresolved"
};

/// Everything the pipeline produces for one case at one prime.
struct CaseReport {
    u64 p = 0;
    int r_deg_s = -1, r_deg_t = -1;
    int content_s_deg = 0, content_t_deg = 0;
    std::map<std::string, int> known;  // known factors found, with multiplicity
    u64 s0 = 0;
    int h_deg_t = -1;
    std::vector<Candidate> candidates;
    std::map<std::string, std::string> known_verdicts;  // verify runs only
};

// Full pipeline at one prime.  verify = true additionally point-counts each
// candidate (requires p small enough for group-order computations, ~2^22)
// and each known factor.
CaseReport run_case_at(const CorrespondenceCase& c, u64 p, bool verify);

// Orchestrated run: degree pinning at a fixed 62-bit prime, candidate
// verification at the first two ~20-bit primes where every candidate reaches
// a definite verdict (small enough that degree-3 extensions stay countable).
struct PipelineReport {
    CaseReport pin;
    std::vector<CaseReport> verify;
};
PipelineReport run_case(const CorrespondenceCase& c);

}  // namespace d6lab
