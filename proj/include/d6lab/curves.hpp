#pragma once
// Elliptic curves over F_q (q = p^e, e <= 3): models, twists, point counting,
// traces, Weil polynomial factors, and the trace-equality isogeny test.

#include "d6lab/fields.hpp"

namespace d6lab {

struct SingularCurve : std::runtime_error {
    explicit SingularCurve(const std::string& m) : std::runtime_error(m) {}
};
struct HasseViolation : std::runtime_error {
    explicit HasseViolation(const std::string& m) : std::runtime_error(m) {}
};
struct InternalInconsistency : std::runtime_error {
    explicit InternalInconsistency(const std::string& m) : std::runtime_error(m) {}
};

/// c*y^2 = x^3 + a2 x^2 + a4 x + a6, or Legendre e*y^2 = x(x-1)(x-lambda).
struct EllipticCurve {
    enum class Model { GeneralCubic, Legendre };
    const ExtField* F = nullptr;
    Model model = Model::GeneralCubic;
    FqElem c;            // twist constant (Legendre: e)
    FqElem a2, a4, a6;   // GeneralCubic coefficients
    FqElem lambda;       // Legendre parameter
};

EllipticCurve make_cubic(const ExtField& F, const FqElem& c, const FqElem& a2,
                         const FqElem& a4, const FqElem& a6);
EllipticCurve make_legendre(const ExtField& F, const FqElem& e, const FqElem& lambda);

// Twist constant folded in: equivalent monic model y^2 = x^3 + A2 x^2 + A4 x + A6.
struct MonicCubic {
    const ExtField* F;
    FqElem A2, A4, A6;
    FqElem rhs(const FqElem& x) const {
        const ExtField& E = *F;
        return E.add(E.mul(E.add(E.mul(E.add(x, A2), x), A4), x), A6);
    }
};
MonicCubic monic_model(const EllipticCurve& E);

FqElem cubic_discriminant(const MonicCubic& m);
bool is_nonsingular(const EllipticCurve& E);

u64 group_order(const EllipticCurve& E);  // exact #E(F_q); throws SingularCurve
i64 trace(const EllipticCurve& E);        // q + 1 - #E, Hasse-asserted
EllipticCurve quadratic_twist(const EllipticCurve& E, const FqElem& d);
FqElem j_invariant(const EllipticCurve& E);
bool is_supersingular(const EllipticCurve& E);  // base field prime, p > 3
bool isogenous(const EllipticCurve& E1, const EllipticCurve& E2);

// character-sum count, any q; used as the oracle path for small fields
u64 curve_count_exhaustive(const EllipticCurve& E);
// BSGS path regardless of field size (group_order switches to it above 2^12)
u64 group_order_bsgs(const EllipticCurve& E);

/// One factor of a Weil polynomial: x^{2e} - t x^e + q^e (e = 1: x^2 - tx + q).
struct WeilFactor {
    i64 t = 0;
    u64 q = 0;
    int e = 1;
    auto operator<=>(const WeilFactor&) const = default;
};

/// Product of factors, compared as a sorted multiset.
struct WeilPolynomial {
    std::vector<WeilFactor> factors;  // kept sorted
    void add(const WeilFactor& f);
    int degree() const;
    bool operator==(const WeilPolynomial&) const = default;
    auto operator<=>(const WeilPolynomial&) const = default;
    // sum of k-th powers of all inverse-root scalars (Frobenius eigenvalues);
    // #C(F_{q^k}) checks use q^k + 1 - power_sum(k) per abelian-surface factor pair
    i128 power_sum(int k) const;
};

WeilFactor res_scalars_weil(i64 t, u64 q, int e);  // HasseViolation if t^2 > 4 q^e

// Irreducible integer factors of the product polynomial, each as an ascending
// coefficient vector, sorted.  A restriction-of-scalars factor splits off an
// elliptic quadratic x^2 - ax + p for every integer a with the matching
// descended trace, so two aggregates compare equal here exactly when their
// product polynomials are equal (isogenous abelian varieties), even when the
// factor multisets differ.
std::vector<std::vector<i64>> weil_canonical(const WeilPolynomial& w);
bool weil_product_equal(const WeilPolynomial& a, const WeilPolynomial& b);

// t_k over F_{q^k} from t_1 over F_q: t_k = t1 t_{k-1} - q t_{k-2}, t_0 = 2.
i64 extension_trace(i64 t1, u64 q, int k);

// ---------------------------------------------------------------------------
// affine point arithmetic on a monic cubic (used by BSGS and by covers code)
// ---------------------------------------------------------------------------
struct AffPoint {
    FqElem x, y;
    bool inf = true;
};
AffPoint pt_add(const MonicCubic& m, const AffPoint& P, const AffPoint& Q);
AffPoint pt_neg(const MonicCubic& m, const AffPoint& P);
AffPoint pt_mul(const MonicCubic& m, u64 n, const AffPoint& P);

}  // namespace d6lab
