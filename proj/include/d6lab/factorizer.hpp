#pragma once
// Deterministic factoring of totally split squarefree polynomials over F_p:
// Schoof's algorithm run over the etale algebra F_p[v]/(f) with the
// fifteen-curve family (five curves at each shift v, v-22, v-30), where any
// arithmetic failure exposes a zero divisor and hence a factor of f.

#include <variant>

#include "d6lab/family.hpp"

namespace d6lab {

struct NotTotallySplit : std::runtime_error {
    explicit NotTotallySplit(const std::string& m) : std::runtime_error(m) {}
};

/// Raised when a part of degree >= 2 survives all fifteen curves with a
/// uniform trace at every level; carries the unsplit part's coefficients.
struct ConjectureViolation : std::runtime_error {
    std::vector<u64> part;  // monic, constant term first
    ConjectureViolation(const std::string& m, std::vector<u64> coeffs)
        : std::runtime_error(m), part(std::move(coeffs)) {}
};

/// F_p[v]/(f) with f monic of degree >= 1; elements are reduced residues.
struct EtaleAlgebra {
    ExtField F;  // degree-1 wrapper around the prime field
    UniPoly f;
    EtaleAlgebra(const PrimeField& K, UniPoly modulus);
    int d() const { return f.deg(); }
};

using EtaleElem = UniPoly;  // residue of degree < d, reduced mod f

/// A discovered monic factor g of f with 0 < deg g < deg f.
struct ZeroDivisorSignal {
    UniPoly g;
};

// Inverse by extended Euclid when gcd(a, f) = 1; the proper gcd otherwise.
// a = 0 signals f itself ("zero in every component"; the caller decides).
std::variant<EtaleElem, ZeroDivisorSignal> algebra_invert(const EtaleElem& a,
                                                          const EtaleAlgebra& A);

/// Short-Weierstrass curve y^2 = x^3 + Ax + B over the algebra.
struct AlgebraCurve {
    EtaleElem A, B;
};

// The u-values excluded before building curves: every existing element of
// {0, +-1, +-3, +-sqrt(-3)} shifted by 0, 22, 30; sorted, <= 21 values.
std::vector<u64> curve_bad_values(const PrimeField& K);

// The fifteen curves over the algebra in fixed order
// (base, orbit6, orbit3a, orbit3b, orbit3c) x (shift 0, 22, 30), after the
// bad-value prescreen; any root hit or denominator failure signals.
std::variant<std::array<AlgebraCurve, 15>, ZeroDivisorSignal> fifteen_curves(
    const EtaleAlgebra& A);

// Frobenius trace residue mod ell, uniform across all components of the
// algebra, or a zero-divisor signal when components disagree or any
// inversion fails.  ell must be an odd prime distinct from p.
std::variant<int, ZeroDivisorSignal> schoof_trace_mod_l(const EtaleAlgebra& A,
                                                        const AlgebraCurve& E, int ell);

// Complete sorted root list of a monic polynomial that splits into distinct
// linear factors, computed with no randomness.  Throws NotTotallySplit when
// v^p != v mod f, and ConjectureViolation if a part of degree >= 2 survives
// every curve with uniform traces.
std::vector<u64> factor_totally_split(const PrimeField& K, const UniPoly& f);

/// Traces of the fifteen curves at a single generic u, in the fixed order.
struct FifteenTuple {
    u64 u = 0;
    std::array<i64, 15> t{};
};

// Tuple of one u (u, u-22, u-30 all outside the bad set); table is the bulk
// lambda-trace table for the prime (built on demand when null).
FifteenTuple fifteen_tuple(const PrimeField& K, u64 u,
                           const std::vector<std::int16_t>* table = nullptr);

// Tuples of all generic u ascending.
std::vector<FifteenTuple> fifteen_tuples(const PrimeField& K);

// Empty list = all tuples pairwise distinct; otherwise the colliding pairs.
std::vector<std::pair<u64, u64>> distinct_tuples_check(const PrimeField& K);

}  // namespace d6lab
