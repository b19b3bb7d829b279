#pragma once
// Pryms of unramified cyclic 3-covers of the family curves: the special
// triple cover (with its twist), the general triple covers attached to the
// Galois orbits of a cubic, and the combined degree-16 Weil-factor signature.

#include "d6lab/family.hpp"

namespace d6lab {

struct OracleMismatch : std::runtime_error {
    explicit OracleMismatch(const std::string& m) : std::runtime_error(m) {}
};

// The partner parameters (3/u, -c) giving the second cover direction; its
// derived r is 729/r.
D6Params triple_partner_params(const D6Params& P);

/// Traces of the special triple-cover Prym: per direction, the elliptic curve
/// F: s^2 = w^3 + 81 w^2 + 72 r w + 16 r^2 and its twist by (81 - 3r) c.
struct SpecialPrym {
    std::array<std::pair<i64, i64>, 2> dir;  // (tF, tFtwist), directions 1 and 2
    // canonical comparison key: each pair sorted, then the two pairs sorted
    std::array<i64, 4> key() const;
    bool operator==(const SpecialPrym&) const = default;
};

SpecialPrym special_prym(const D6Params& P);

/// One Galois orbit of roots of the cubic 3(x-9)^3 + 4r(x^2 - 6x + 21):
/// extension degree e, the chosen (lex-least) root v, and the traces over
/// F_{p^e} of the two attached curves -3(v+3) y^2 = g and 3(v-9) c y^2 = g,
/// g = x^3 + k (x+1)^2, k = 27(v^2-6v+21) / (4(v-9)(v+3)).
struct GeneralTripleOrbit {
    int e = 1;
    FqElem v;
    i64 tA = 0, tB = 0;
};

std::vector<GeneralTripleOrbit> general_triple_orbits(const D6Params& P);

// The res-scalars Weil factors of all general triple covers for one cover
// direction: per orbit, x^{2e} - t x^e + p^e for each of the two curves.
// Total degree is always 12.
std::vector<WeilFactor> general_triple_weil(const D6Params& P, int direction);

/// Per direction, the Weil polynomial of the full multiplication-by-3
/// pullback Prym: the special pair plus all general res-scalars factors
/// (degree 16 each direction).
struct Mult3Signature {
    std::array<WeilPolynomial, 2> dir;
    // directions compared as an unordered pair (the cover swap r <-> 729/r
    // relabels them)
    bool matches(const Mult3Signature& o) const;
};

Mult3Signature mult3_signature(const D6Params& P);

// Counts the genus-2 intermediate quotient
//   c y^2 = (w^3 + (r+81) w^2 + 144 r w + 64 r^2)(w^3 + 81 w^2 + 72 r w + 16 r^2)
// over F_p and F_{p^2} and checks the counts against the product of the
// predicted elliptic factors.  Oracle scale: p <= 200.  Throws OracleMismatch
// on disagreement; returns true on success.
bool special_genus2_oracle(const D6Params& P, int direction);

}  // namespace d6lab
