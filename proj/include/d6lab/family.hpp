#pragma once
// The two-parameter genus-2 family over F_p: parameters (u, c-class), the
// derived r, Weierstrass points, the 12-fold isomorphism equivalence, the
// coarse invariant, the base elliptic curve, the 15 double-cover Prym curves,
// and the 16-trace signature.

#include "d6lab/curves.hpp"

namespace d6lab {

// sorted list of excluded u-values (singular / extra-automorphism locus)
std::vector<u64> u_bad_set(u64 p);

// u_bad_set plus the u-values whose derived r is excluded (0, +-27,
// 23 +- 10 sqrt(-2)); this is the full invalid-parameter locus
std::vector<u64> u_excluded_set(u64 p);

// r = -u^2 (u^2-9)^2 / (u^2-1)^2
u64 r_from_u(const PrimeField& K, u64 u);

/// Validated parameter pair: u good, c-class a bit (0 -> c=1, 1 -> smallest
/// nonresidue); r derived and checked against the excluded r-values.
struct D6Params {
    ExtField F;  // degree-1 field wrapper for curve construction
    u64 u = 0;
    int cbit = 0;
    u64 r = 0;
    u64 c_rep = 1;  // concrete twist representative
    const PrimeField& K() const { return F.base(); }
    u64 p() const { return F.p(); }
};

D6Params make_params(const PrimeField& K, u64 u, int cbit);
// skips the U_bad / excluded-r validation (test and oracle plumbing)
D6Params make_params_unchecked(const PrimeField& K, u64 u, int cbit);

/// The six Weierstrass x-coordinates in fixed order:
/// u, -u, (u+3)/(u-1), -(u+3)/(u-1), (u-3)/(u+1), -(u-3)/(u+1).
struct WeierstrassSet {
    std::array<u64, 6> w;
};
WeierstrassSet weierstrass_points(const PrimeField& K, u64 u);

// the <=12 isomorphic parameter pairs (u', cClass'), deduplicated
std::vector<std::pair<u64, int>> equivalence_orbit(const PrimeField& K, u64 u, int cbit);

struct CurveClass {
    u64 u;        // canonical representative (lex-min over the orbit)
    int cbit;
    u64 coarse;   // r + 729/r
    auto operator<=>(const CurveClass&) const = default;
};
CurveClass canonical_class(const PrimeField& K, u64 u, int cbit);

u64 coarse_invariant(const PrimeField& K, u64 u);

// E_{r,c}: c y^2 = x^3 + (r-18) x^2 + (81-2r) x + r
EllipticCurve base_curve(const D6Params& P);

enum class Orbit { O6, O3a, O3b, O3c };

/// One of the 15 double-cover Prym curves e y^2 = x(x-1)(x-lambda), indexed
/// by the removed Weierstrass pair (i, j).
struct OrbitEntry {
    Orbit orbit;
    int i, j;       // 1-based indices into the WeierstrassSet order
    u64 lambda, e;
};
std::vector<OrbitEntry> orbit_prym_curves(const D6Params& P);

/// tBase plus the four per-orbit sorted trace multisets.
struct TraceSignature {
    i64 tBase = 0;
    std::array<i64, 6> traces6{};
    std::array<i64, 3> traces3a{}, traces3b{}, traces3c{};
    bool operator==(const TraceSignature&) const = default;
    // the doubly-isogenous comparison key: tBase plus the flattened sorted
    // multiset of all 15 orbit traces
    std::array<i64, 16> flattened() const;
};

// T(lambda): trace of y^2 = x(x-1)(x-lambda)
i64 legendre_lambda_trace(const PrimeField& K, u64 lambda);

// Per-prime bulk table of T(lambda) for all lambda, via character sums; entry
// at lambda in {0,1} is 0 (unused).
std::vector<std::int16_t> build_trace_table(const PrimeField& K);

// lambda_base: Legendre invariant of the base cubic from its ordered roots
// (u1^2, u3^2, u5^2); trace_signature uses tBase = chi(c (B-A)) T(lambda_base).
u64 lambda_base(const D6Params& P);

TraceSignature trace_signature(const D6Params& P,
                               const std::vector<std::int16_t>* lambda_table = nullptr);

// The cover constant d (1 or the canonical nonsquare) normalized so the
// Weierstrass point P1 = (u, 0) splits in the double cover
// d z^2 = (x - u_i)(x - u_j).
u64 cover_d_class(const D6Params& P, int i, int j);

// Oracle path: trace of the Prym of the {i,j} double cover, built directly as
// the quartic model c d y^2 = prod_{k not in {i,j}} (x - u_k).
i64 prym_quartic_trace(const D6Params& P, int i, int j, u64 d);

// genus-1 quartic point count helper: y^2 = quartic(x), smooth model
u64 genus1_quartic_count(const ExtField& F, const std::array<FqElem, 5>& coeffs);

}  // namespace d6lab
