#pragma once
// Exact arithmetic in F_p (p an odd prime, 5 <= p < 2^62), in the small
// extensions F_{p^2} and F_{p^3} with canonical (lex-least) moduli, and
// univariate polynomial algebra over those fields.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace d6lab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

struct BadParameter : std::runtime_error {
    explicit BadParameter(const std::string& m) : std::runtime_error(m) {}
};
struct FieldMismatch : std::runtime_error {
    explicit FieldMismatch(const std::string& m) : std::runtime_error(m) {}
};
struct ResourceLimit : std::runtime_error {
    explicit ResourceLimit(const std::string& m) : std::runtime_error(m) {}
};

bool is_prime_u64(u64 n);
// Pollard-rho based factorization of a 64-bit integer (deterministic seed walk).
std::vector<u64> factor_u64(u64 n);

/// Prime field F_p.  All element values are reduced representatives in [0, p).
class PrimeField {
public:
    explicit PrimeField(u64 p);

    u64 p() const { return p_; }

    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        if (s >= p_ || s < a) s -= p_;
        return s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
    u64 neg(u64 a) const { return a ? p_ - a : 0; }
    u64 mul(u64 a, u64 b) const { return (u64)((u128)a * b % p_); }
    u64 pow(u64 a, u64 e) const;
    u64 inv(u64 a) const;
    // Reduce a signed integer into [0, p).
    u64 from_int(i64 v) const {
        i64 r = v % (i64)p_;
        return r < 0 ? (u64)(r + (i64)p_) : (u64)r;
    }

    int legendre(u64 a) const;
    std::optional<u64> sqrt(u64 a) const;  // canonical: min(r, p-r)
    u64 smallest_nonresidue() const;

    bool operator==(const PrimeField& o) const { return p_ == o.p_; }

private:
    u64 p_;
    mutable u64 nonres_ = 0;  // cached smallest quadratic nonresidue
};

/// Element of F_{p^e}, e <= 3: coefficient vector c[0] + c[1] v + c[2] v^2.
struct FqElem {
    std::array<u64, 3> c{0, 0, 0};
    bool operator==(const FqElem& o) const { return c == o.c; }
    bool operator!=(const FqElem& o) const { return c != o.c; }
};

/// F_{p^e} with the lexicographically least monic irreducible modulus
/// (coefficients compared high-degree-first; degree-1 convention: modulus x).
class ExtField {
public:
    ExtField(const PrimeField& K, int e);

    const PrimeField& base() const { return K_; }
    u64 p() const { return K_.p(); }
    int e() const { return e_; }
    // Modulus is x^e + m[e-1] x^{e-1} + ... + m[0].
    const std::array<u64, 3>& modulus() const { return m_; }
    // q = p^e; only valid when it fits in 64 bits.
    u64 q_u64() const;
    u128 q_u128() const;

    FqElem zero() const { return FqElem{}; }
    FqElem one() const { return embed(1); }
    FqElem embed(u64 a) const {
        FqElem r;
        r.c[0] = a % K_.p();
        return r;
    }
    bool is_zero(const FqElem& a) const { return a.c[0] == 0 && a.c[1] == 0 && a.c[2] == 0; }
    bool in_base(const FqElem& a) const { return a.c[1] == 0 && a.c[2] == 0; }

    FqElem add(const FqElem& a, const FqElem& b) const;
    FqElem sub(const FqElem& a, const FqElem& b) const;
    FqElem neg(const FqElem& a) const;
    FqElem mul(const FqElem& a, const FqElem& b) const;
    FqElem scal(u64 s, const FqElem& a) const;
    FqElem inv(const FqElem& a) const;
    FqElem pow(const FqElem& a, u64 n) const;
    // a^n with a multi-limb exponent (little-endian 64-bit limbs).
    FqElem pow_big(const FqElem& a, const std::vector<u64>& limbs) const;
    FqElem frobenius(const FqElem& a) const;  // a^p
    u64 norm(const FqElem& a) const;          // N_{F_q/F_p}(a)
    int chi(const FqElem& a) const;           // quadratic character of F_q
    std::optional<FqElem> sqrt(const FqElem& a) const;  // canonical (lex-least of +-r)
    FqElem nonresidue() const;                // lex-least nonsquare of F_q

    // Lexicographic comparison, high coefficient first (consistent with the
    // modulus ordering); used for all canonical choices.
    bool lex_less(const FqElem& a, const FqElem& b) const;

    bool same(const ExtField& o) const {
        return K_ == o.K_ && e_ == o.e_;
    }

private:
    PrimeField K_;
    int e_;
    std::array<u64, 3> m_{0, 0, 0};
    FqElem vp_;  // v^p mod modulus (Frobenius action on the generator)
    mutable FqElem nonres_;
    mutable bool have_nonres_ = false;

    FqElem reduce_prod(const std::array<u64, 5>& prod) const;
};

/// Dense univariate polynomial over an ExtField; coefficients ascending.
struct UniPoly {
    const ExtField* F = nullptr;
    std::vector<FqElem> c;

    UniPoly() = default;
    explicit UniPoly(const ExtField& field) : F(&field) {}
    UniPoly(const ExtField& field, std::vector<FqElem> cs) : F(&field), c(std::move(cs)) {
        normalize();
    }

    int deg() const { return (int)c.size() - 1; }  // -1 for zero polynomial
    bool is_zero() const { return c.empty(); }
    void normalize();
    FqElem coeff(int i) const { return i >= 0 && i < (int)c.size() ? c[i] : FqElem{}; }
};

UniPoly poly_from_u64(const ExtField& F, const std::vector<u64>& coeffs);
UniPoly poly_add(const UniPoly& a, const UniPoly& b);
UniPoly poly_sub(const UniPoly& a, const UniPoly& b);
UniPoly poly_mul(const UniPoly& a, const UniPoly& b);
UniPoly poly_scal(const FqElem& s, const UniPoly& a);
// Division with remainder; divisor must have invertible leading coefficient.
void poly_divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r);
UniPoly poly_mod(const UniPoly& a, const UniPoly& b);
UniPoly poly_monic(const UniPoly& a);
UniPoly poly_gcd(const UniPoly& a, const UniPoly& b);
FqElem poly_eval(const UniPoly& a, const FqElem& x);
UniPoly poly_deriv(const UniPoly& a);
// g(h) mod f (modular composition, schoolbook).
UniPoly poly_compose_mod(const UniPoly& g, const UniPoly& h, const UniPoly& f);
// x^n mod f for n given as little-endian limbs.
UniPoly poly_xpow_mod(const std::vector<u64>& limbs, const UniPoly& f);
// a^n mod f.
UniPoly poly_powmod(const UniPoly& a, const std::vector<u64>& limbs, const UniPoly& f);

// All roots of f in its coefficient field, with multiplicity, sorted
// canonically (lex order).  Equal-degree splitting uses a deterministic
// shift sequence offset by `seed` (reproducible; never used by the
// deterministic factoring path).
std::vector<FqElem> poly_roots(const UniPoly& f, u64 seed = 0);

// Little-endian limb helpers for big exponents.
std::vector<u64> limbs_from_u128(u128 v);
// (p^e - 1) / 2 as limbs.
std::vector<u64> half_group_order_limbs(u64 p, int e);

}  // namespace d6lab
