#pragma once
// The 120 unramified cyclic degree-4 covers of a family curve: explicit
// descriptors (two-torsion pair, normalized model, sign class, pinned twists),
// the degree-480 Weil polynomial of the resulting Prym aggregate, and a
// direct point-counting oracle for the intermediate genus-5 curve.

#include "d6lab/tricover.hpp"

namespace d6lab {

/// One cyclic degree-4 cover: the two-torsion pair {i, j} removed, the
/// Mobius-normalized quintic model y^2 = c' x (x-a1)..(x-a4), the z-layer
/// twist dtilde with alpha_k = dtilde a_k, the D1 relation
/// c1 w^2 = prod(z^2 - alpha_k), a sign class choosing btilde_k = +-sqrt(alpha_k)
/// (global negation quotiented away by sign[0] = +1), and the v-layer twist
/// e' pinned so the base Weierstrass point splits completely.
struct FourCoverDescriptor {
    int i = 1, j = 2;             // 1-based indices into the Weierstrass order
    std::array<u64, 4> a{};       // images of the remaining points, index order
    int m = -1;                   // position of Weierstrass index 1 in a, or -1
    u64 cprime = 1;               // quintic model constant
    u64 dtilde = 1;               // z-layer twist (1 or the canonical nonsquare)
    std::array<u64, 4> alpha{};   // dtilde * a_k
    u64 c1 = 1;                   // D1 twist constant
    bool rational = true;         // all alpha_k squares in F_p
    int field_e = 1;              // 1 or 2: field of definition of the betas
    std::array<int, 4> sign{1, 1, 1, 1};
    std::array<FqElem, 4> beta{}; // sign-adjusted square roots of alpha_k
    FqElem eprime;                // v-layer twist over F_{p^field_e}
};

// perturb is a testing knob: bit 0 swaps which point of each two-torsion pair
// maps to 0 vs infinity, bit 1 flips the canonical-square-root convention.
// The aggregate factor multiset must not depend on it.
std::vector<FourCoverDescriptor> enumerate_four_covers(const D6Params& P, int perturb = 0);

// trace of the genus-1 curve e v^2 = prod (z - rho_k) with the four rational
// branch points rho_k, via the cubic model obtained by sending rho_1 to
// infinity (BSGS-backed, so large fields are fine)
i64 branched_quartic_trace(const ExtField& F, const FqElem& e,
                           const std::array<FqElem, 4>& rho);

// the Weil factors contributed by one descriptor: two degree-2 factors over
// F_p when rational, otherwise one degree-4 restriction-of-scalars factor
std::vector<WeilFactor> four_cover_factors(const D6Params& P,
                                           const FourCoverDescriptor& d);

// aggregate over all 120 descriptors; total degree 480
WeilPolynomial four_prym_weil(const D6Params& P);

// number of distinct j-invariants among the 240 elliptic slots, computed over
// F_{p^2}; at most 26 (the geometric orbit count)
int four_cover_distinct_j(const D6Params& P);

// Counts the genus-5 curve D2 attached to the descriptor over extensions of
// its field of definition (F_p if rational, else F_{p^2}) of degree
// 1..kmax, and checks the counts against Jac(C) x Prym(D1/C) x Prym(D2/D1).
// Oracle scale: p <= 23 and p^(field_e * kmax) <= ~7e6.
bool d2_direct_count_oracle(const D6Params& P, const FourCoverDescriptor& d, int kmax);

}  // namespace d6lab
