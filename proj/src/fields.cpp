#include "d6lab/fields.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace d6lab {

// ---------------------------------------------------------------------------
// primality / factoring
// ---------------------------------------------------------------------------

static u64 mulmod_u64(u64 a, u64 b, u64 m) { return (u64)((u128)a * b % m); }

static u64 powmod_u64(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod_u64(a % n, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

static u64 pollard_brent(u64 n) {
    // Brent's cycle variant with a deterministic seed walk; n composite, odd.
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, d = 1;
        u64 q = 1;
        int lam = 1;
        while (d == 1) {
            x = y;
            for (int i = 0; i < lam; ++i) y = (mulmod_u64(y, y, n) + c) % n;
            int k = 0;
            while (k < lam && d == 1) {
                u64 ys = y;
                int lim = std::min(128, lam - k);
                for (int i = 0; i < lim; ++i) {
                    y = (mulmod_u64(y, y, n) + c) % n;
                    q = mulmod_u64(q, x > y ? x - y : y - x, n);
                }
                d = std::gcd(q, n);
                if (d == n) {
                    // backtrack
                    d = 1;
                    y = ys;
                    do {
                        y = (mulmod_u64(y, y, n) + c) % n;
                        d = std::gcd(n, x > y ? x - y : y - x);
                    } while (d == 1);
                    break;
                }
                k += lim;
            }
            lam *= 2;
        }
        if (d != n) return d;
    }
}

std::vector<u64> factor_u64(u64 n) {
    std::vector<u64> out;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        while (n % q == 0) {
            out.push_back(q);
            n /= q;
        }
    }
    std::vector<u64> stack;
    if (n > 1) stack.push_back(n);
    while (!stack.empty()) {
        u64 m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (is_prime_u64(m)) {
            out.push_back(m);
            continue;
        }
        u64 d = pollard_brent(m);
        stack.push_back(d);
        stack.push_back(m / d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// PrimeField
// ---------------------------------------------------------------------------

PrimeField::PrimeField(u64 p) : p_(p) {
    if (p < 5 || p >= (1ull << 62)) throw BadParameter("prime out of supported range");
    if (!is_prime_u64(p)) throw BadParameter("modulus is not prime");
}

u64 PrimeField::pow(u64 a, u64 e) const { return powmod_u64(a % p_, e, p_); }

u64 PrimeField::inv(u64 a) const {
    a %= p_;
    if (a == 0) throw BadParameter("inverse of zero");
    return powmod_u64(a, p_ - 2, p_);
}

int PrimeField::legendre(u64 a) const {
    a %= p_;
    if (a == 0) return 0;
    u64 t = powmod_u64(a, (p_ - 1) / 2, p_);
    return t == 1 ? 1 : -1;
}

u64 PrimeField::smallest_nonresidue() const {
    if (nonres_) return nonres_;
    for (u64 a = 2;; ++a) {
        if (legendre(a) == -1) {
            nonres_ = a;
            return a;
        }
    }
}

std::optional<u64> PrimeField::sqrt(u64 a) const {
    a %= p_;
    if (a == 0) return 0;
    if (legendre(a) != 1) return std::nullopt;
    u64 r;
    if (p_ % 4 == 3) {
        r = powmod_u64(a, (p_ + 1) / 4, p_);
    } else {
        // Tonelli-Shanks with the smallest nonresidue as generator.
        u64 q = p_ - 1;
        int s = 0;
        while ((q & 1) == 0) q >>= 1, ++s;
        u64 z = smallest_nonresidue();
        u64 m = s;
        u64 c = powmod_u64(z, q, p_);
        u64 t = powmod_u64(a, q, p_);
        r = powmod_u64(a, (q + 1) / 2, p_);
        while (t != 1) {
            u64 i = 0, tt = t;
            while (tt != 1) {
                tt = mulmod_u64(tt, tt, p_);
                ++i;
            }
            u64 b = c;
            for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod_u64(b, b, p_);
            m = i;
            c = mulmod_u64(b, b, p_);
            t = mulmod_u64(t, c, p_);
            r = mulmod_u64(r, b, p_);
        }
    }
    return std::min(r, p_ - r);
}

// ---------------------------------------------------------------------------
// small F_p[x] helpers used for modulus search / ExtField internals
// ---------------------------------------------------------------------------

namespace {

using FpPoly = std::vector<u64>;  // ascending coefficients, normalized

void fp_norm(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly fp_mul(const PrimeField& K, const FpPoly& a, const FpPoly& b) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = K.add(r[i + j], K.mul(a[i], b[j]));
    fp_norm(r);
    return r;
}

FpPoly fp_mod(const PrimeField& K, FpPoly a, const FpPoly& b) {
    fp_norm(a);
    u64 invl = K.inv(b.back());
    while (a.size() >= b.size()) {
        u64 f = K.mul(a.back(), invl);
        size_t off = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[off + i] = K.sub(a[off + i], K.mul(f, b[i]));
        fp_norm(a);
        if (a.empty()) break;
    }
    return a;
}

FpPoly fp_gcd(const PrimeField& K, FpPoly a, FpPoly b) {
    fp_norm(a);
    fp_norm(b);
    while (!b.empty()) {
        FpPoly r = fp_mod(K, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() != 1) {
        u64 il = K.inv(a.back());
        for (auto& c : a) c = K.mul(c, il);
    }
    return a;
}

FpPoly fp_powmod_x(const PrimeField& K, u64 e, const FpPoly& f) {
    // x^e mod f
    FpPoly r{1};
    FpPoly base = fp_mod(K, FpPoly{0, 1}, f);
    while (e) {
        if (e & 1) r = fp_mod(K, fp_mul(K, r, base), f);
        base = fp_mod(K, fp_mul(K, base, base), f);
        e >>= 1;
    }
    return r;
}

bool fp_irreducible_small(const PrimeField& K, const FpPoly& f) {
    // deg f in {2,3}: irreducible iff no roots in F_p (degree <= 3).
    FpPoly xp = fp_powmod_x(K, K.p(), f);
    // gcd(x^p - x, f)
    FpPoly d = xp;
    if (d.size() < 2) d.resize(2, 0);
    d[1] = K.sub(d[1], 1);
    fp_norm(d);
    FpPoly g = fp_gcd(K, f, d);
    return g.size() <= 1;
}

// extended gcd over F_p[x]: returns g and s with s*a = g (mod m); used for
// inversion in F_p[x]/(m)
FpPoly fp_invmod(const PrimeField& K, FpPoly a, FpPoly m) {
    FpPoly r0 = m, r1 = fp_mod(K, a, m);
    FpPoly s0{}, s1{1};
    while (!r1.empty()) {
        // q = r0 / r1
        FpPoly q;
        {
            FpPoly rem = r0;
            u64 invl = K.inv(r1.back());
            q.assign(rem.size() >= r1.size() ? rem.size() - r1.size() + 1 : 0, 0);
            while (rem.size() >= r1.size() && !rem.empty()) {
                u64 f = K.mul(rem.back(), invl);
                size_t off = rem.size() - r1.size();
                q[off] = f;
                for (size_t i = 0; i < r1.size(); ++i)
                    rem[off + i] = K.sub(rem[off + i], K.mul(f, r1[i]));
                fp_norm(rem);
                if (rem.empty()) break;
            }
            fp_norm(q);
            r0.swap(rem);
        }
        r0.swap(r1);  // now r0 = old r1, r1 = remainder
        FpPoly t = fp_mul(K, q, s1);
        // s0 - q*s1
        FpPoly s2 = s0;
        if (s2.size() < t.size()) s2.resize(t.size(), 0);
        for (size_t i = 0; i < t.size(); ++i) s2[i] = K.sub(s2[i], t[i]);
        fp_norm(s2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (r0.size() != 1) throw BadParameter("element not invertible in extension");
    u64 il = K.inv(r0[0]);
    for (auto& c : s0) c = K.mul(c, il);
    fp_norm(s0);
    return s0;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExtField
// ---------------------------------------------------------------------------

ExtField::ExtField(const PrimeField& K, int e) : K_(K), e_(e) {
    if (e < 1 || e > 3) throw BadParameter("extension degree must be 1, 2 or 3");
    if (e_ == 1) {
        vp_ = FqElem{};  // unused
        return;
    }
    // Lex-least monic irreducible: scan coefficient tuples high-degree-first.
    bool found = false;
    if (e_ == 2) {
        for (u64 a1 = 0; a1 < K_.p() && !found; ++a1)
            for (u64 a0 = 0; a0 < K_.p(); ++a0) {
                u64 disc = K_.sub(K_.mul(a1, a1), K_.mul(4, a0));
                if (K_.legendre(disc) == -1) {
                    m_ = {a0, a1, 0};
                    found = true;
                    break;
                }
            }
    } else {
        for (u64 a2 = 0; a2 < K_.p() && !found; ++a2)
            for (u64 a1 = 0; a1 < K_.p() && !found; ++a1)
                for (u64 a0 = 0; a0 < K_.p(); ++a0) {
                    FpPoly f{a0, a1, a2, 1};
                    if (fp_irreducible_small(K_, f)) {
                        m_ = {a0, a1, a2};
                        found = true;
                        break;
                    }
                }
    }
    assert(found);
    // v^p mod modulus
    FpPoly mod(e_ + 1, 0);
    for (int i = 0; i < e_; ++i) mod[i] = m_[i];
    mod[e_] = 1;
    FpPoly vp = fp_powmod_x(K_, K_.p(), mod);
    vp_ = FqElem{};
    for (size_t i = 0; i < vp.size(); ++i) vp_.c[i] = vp[i];
}

u64 ExtField::q_u64() const {
    u128 q = q_u128();
    if (q > (u128)UINT64_MAX) throw BadParameter("q does not fit in 64 bits");
    return (u64)q;
}

u128 ExtField::q_u128() const {
    u128 q = 1;
    for (int i = 0; i < e_; ++i) q *= K_.p();
    return q;
}

FqElem ExtField::add(const FqElem& a, const FqElem& b) const {
    FqElem r;
    for (int i = 0; i < 3; ++i) r.c[i] = K_.add(a.c[i], b.c[i]);
    return r;
}
FqElem ExtField::sub(const FqElem& a, const FqElem& b) const {
    FqElem r;
    for (int i = 0; i < 3; ++i) r.c[i] = K_.sub(a.c[i], b.c[i]);
    return r;
}
FqElem ExtField::neg(const FqElem& a) const {
    FqElem r;
    for (int i = 0; i < 3; ++i) r.c[i] = K_.neg(a.c[i]);
    return r;
}
FqElem ExtField::scal(u64 s, const FqElem& a) const {
    FqElem r;
    for (int i = 0; i < 3; ++i) r.c[i] = K_.mul(s, a.c[i]);
    return r;
}

FqElem ExtField::reduce_prod(const std::array<u64, 5>& prod) const {
    // reduce degree-4 product modulo x^e + m
    std::array<u64, 5> w = prod;
    for (int d = 4; d >= e_; --d) {
        u64 lead = w[d];
        if (!lead) continue;
        w[d] = 0;
        for (int i = 0; i < e_; ++i) w[d - e_ + i] = K_.sub(w[d - e_ + i], K_.mul(lead, m_[i]));
    }
    FqElem r;
    for (int i = 0; i < e_; ++i) r.c[i] = w[i];
    return r;
}

FqElem ExtField::mul(const FqElem& a, const FqElem& b) const {
    if (e_ == 1) {
        FqElem r;
        r.c[0] = K_.mul(a.c[0], b.c[0]);
        return r;
    }
    std::array<u64, 5> prod{0, 0, 0, 0, 0};
    for (int i = 0; i < e_; ++i) {
        if (!a.c[i]) continue;
        for (int j = 0; j < e_; ++j) {
            if (!b.c[j]) continue;
            u128 t = (u128)a.c[i] * b.c[j] % K_.p();
            prod[i + j] = K_.add(prod[i + j], (u64)t);
        }
    }
    return reduce_prod(prod);
}

FqElem ExtField::inv(const FqElem& a) const {
    if (is_zero(a)) throw BadParameter("inverse of zero");
    if (e_ == 1) return embed(K_.inv(a.c[0]));
    FpPoly ap;
    for (int i = 0; i < e_; ++i) ap.push_back(a.c[i]);
    fp_norm(ap);
    FpPoly mod(e_ + 1, 0);
    for (int i = 0; i < e_; ++i) mod[i] = m_[i];
    mod[e_] = 1;
    FpPoly s = fp_invmod(K_, ap, mod);
    FqElem r;
    for (size_t i = 0; i < s.size(); ++i) r.c[i] = s[i];
    return r;
}

FqElem ExtField::pow(const FqElem& a, u64 n) const {
    FqElem r = one(), base = a;
    while (n) {
        if (n & 1) r = mul(r, base);
        base = mul(base, base);
        n >>= 1;
    }
    return r;
}

FqElem ExtField::pow_big(const FqElem& a, const std::vector<u64>& limbs) const {
    // MSB-first square and multiply
    int top = (int)limbs.size() - 1;
    while (top >= 0 && limbs[top] == 0) --top;
    if (top < 0) return one();
    FqElem r = one();
    bool started = false;
    for (int li = top; li >= 0; --li) {
        for (int bit = 63; bit >= 0; --bit) {
            if (started) r = mul(r, r);
            if ((limbs[li] >> bit) & 1) {
                if (!started) {
                    r = a;
                    started = true;
                } else {
                    r = mul(r, a);
                }
            }
        }
    }
    return r;
}

FqElem ExtField::frobenius(const FqElem& a) const {
    if (e_ == 1) return a;
    // a(v)^p = a(v^p); evaluate the coefficient polynomial at vp_.
    FqElem r = embed(a.c[0]);
    FqElem pw = vp_;
    r = add(r, scal(a.c[1], pw));
    if (e_ == 3) {
        pw = mul(pw, vp_);
        r = add(r, scal(a.c[2], pw));
    }
    return r;
}

u64 ExtField::norm(const FqElem& a) const {
    if (e_ == 1) return a.c[0];
    FqElem n = a;
    FqElem f = a;
    for (int i = 1; i < e_; ++i) {
        f = frobenius(f);
        n = mul(n, f);
    }
    assert(n.c[1] == 0 && n.c[2] == 0);
    return n.c[0];
}

int ExtField::chi(const FqElem& a) const {
    if (is_zero(a)) return 0;
    return K_.legendre(norm(a));
}

bool ExtField::lex_less(const FqElem& a, const FqElem& b) const {
    for (int i = 2; i >= 0; --i) {
        if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    }
    return false;
}

FqElem ExtField::nonresidue() const {
    if (have_nonres_) return nonres_;
    // enumerate in lex order (high coefficient first within the active window)
    for (u64 c1 = 0;; ++c1) {
        for (u64 c0 = 0; c0 < K_.p(); ++c0) {
            FqElem a;
            a.c[0] = c0;
            a.c[1] = e_ >= 2 ? c1 % K_.p() : 0;
            if (e_ < 2 && c1 > 0) throw BadParameter("no nonresidue found");  // unreachable
            if (chi(a) == -1) {
                nonres_ = a;
                have_nonres_ = true;
                return a;
            }
        }
    }
}

std::optional<FqElem> ExtField::sqrt(const FqElem& a) const {
    if (is_zero(a)) return zero();
    if (e_ == 1) {
        auto r = K_.sqrt(a.c[0]);
        if (!r) return std::nullopt;
        return embed(*r);
    }
    if (chi(a) != 1) return std::nullopt;
    // Tonelli-Shanks over F_q with big odd part.
    // q - 1 = 2^s * m
    std::vector<u64> qm1 = half_group_order_limbs(K_.p(), e_);  // (q-1)/2
    // multiply back: q-1 = 2*(q-1)/2; we need odd part of q-1.
    // compute q-1 as limbs:
    std::vector<u64> n = qm1;
    u64 carry = 0;
    for (auto& l : n) {
        u64 nl = (l << 1) | carry;
        carry = l >> 63;
        l = nl;
    }
    if (carry) n.push_back(carry);
    int s = 0;
    auto is_even = [&]() { return (n[0] & 1) == 0; };
    auto shr1 = [&]() {
        for (size_t i = 0; i < n.size(); ++i) {
            u64 lo = n[i] >> 1;
            if (i + 1 < n.size()) lo |= (n[i + 1] & 1) << 63;
            n[i] = lo;
        }
    };
    while (is_even()) {
        shr1();
        ++s;
    }
    std::vector<u64> m = n;  // odd part
    FqElem z = nonresidue();
    FqElem c = pow_big(z, m);
    FqElem t = pow_big(a, m);
    // r = a^((m+1)/2)
    std::vector<u64> mp1 = m;
    {
        u64 cy = 1;
        for (auto& l : mp1) {
            u64 nl = l + cy;
            cy = nl < l ? 1 : 0;
            l = nl;
            if (!cy) break;
        }
        if (cy) mp1.push_back(1);
        // shift right 1
        for (size_t i = 0; i < mp1.size(); ++i) {
            u64 lo = mp1[i] >> 1;
            if (i + 1 < mp1.size()) lo |= (mp1[i + 1] & 1) << 63;
            mp1[i] = lo;
        }
    }
    FqElem r = pow_big(a, mp1);
    int mm = s;
    while (!(t == one())) {
        int i = 0;
        FqElem tt = t;
        while (!(tt == one())) {
            tt = mul(tt, tt);
            ++i;
        }
        FqElem b = c;
        for (int j = 0; j + i + 1 < mm; ++j) b = mul(b, b);
        mm = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    FqElem nr = neg(r);
    return lex_less(r, nr) ? r : nr;
}

std::vector<u64> limbs_from_u128(u128 v) {
    std::vector<u64> l;
    l.push_back((u64)v);
    l.push_back((u64)(v >> 64));
    while (l.size() > 1 && l.back() == 0) l.pop_back();
    return l;
}

std::vector<u64> half_group_order_limbs(u64 p, int e) {
    // (p^e - 1)/2 as little-endian limbs
    std::vector<u64> n{1};
    for (int i = 0; i < e; ++i) {
        u64 carry = 0;
        for (auto& l : n) {
            u128 t = (u128)l * p + carry;
            l = (u64)t;
            carry = (u64)(t >> 64);
        }
        if (carry) n.push_back(carry);
    }
    // subtract 1
    for (auto& l : n) {
        if (l) {
            --l;
            break;
        }
        l = UINT64_MAX;
    }
    // shift right 1
    for (size_t i = 0; i < n.size(); ++i) {
        u64 lo = n[i] >> 1;
        if (i + 1 < n.size()) lo |= (n[i + 1] & 1) << 63;
        n[i] = lo;
    }
    while (n.size() > 1 && n.back() == 0) n.pop_back();
    return n;
}

// ---------------------------------------------------------------------------
// UniPoly
// ---------------------------------------------------------------------------

void UniPoly::normalize() {
    while (!c.empty() && F->is_zero(c.back())) c.pop_back();
}

UniPoly poly_from_u64(const ExtField& F, const std::vector<u64>& coeffs) {
    UniPoly r(F);
    for (u64 v : coeffs) r.c.push_back(F.embed(v));
    r.normalize();
    return r;
}

UniPoly poly_add(const UniPoly& a, const UniPoly& b) {
    const ExtField& F = *a.F;
    UniPoly r(F);
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = F.add(a.coeff((int)i), b.coeff((int)i));
    r.normalize();
    return r;
}

UniPoly poly_sub(const UniPoly& a, const UniPoly& b) {
    const ExtField& F = *a.F;
    UniPoly r(F);
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] = F.sub(a.coeff((int)i), b.coeff((int)i));
    r.normalize();
    return r;
}

UniPoly poly_mul(const UniPoly& a, const UniPoly& b) {
    const ExtField& F = *a.F;
    UniPoly r(F);
    if (a.is_zero() || b.is_zero()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, FqElem{});
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (F.is_zero(a.c[i])) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            r.c[i + j] = F.add(r.c[i + j], F.mul(a.c[i], b.c[j]));
    }
    r.normalize();
    return r;
}

UniPoly poly_scal(const FqElem& s, const UniPoly& a) {
    const ExtField& F = *a.F;
    UniPoly r(F);
    r.c.resize(a.c.size());
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] = F.mul(s, a.c[i]);
    r.normalize();
    return r;
}

void poly_divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r) {
    const ExtField& F = *a.F;
    if (b.is_zero()) throw BadParameter("division by zero polynomial");
    q = UniPoly(F);
    r = a;
    FqElem invl = F.inv(b.c.back());
    if (r.deg() >= b.deg()) q.c.assign(r.deg() - b.deg() + 1, FqElem{});
    while (r.deg() >= b.deg() && !r.is_zero()) {
        FqElem f = F.mul(r.c.back(), invl);
        int off = r.deg() - b.deg();
        q.c[off] = f;
        for (int i = 0; i <= b.deg(); ++i)
            r.c[off + i] = F.sub(r.c[off + i], F.mul(f, b.c[i]));
        r.normalize();
    }
    q.normalize();
}

UniPoly poly_mod(const UniPoly& a, const UniPoly& b) {
    UniPoly q, r;
    poly_divmod(a, b, q, r);
    return r;
}

UniPoly poly_monic(const UniPoly& a) {
    if (a.is_zero()) return a;
    return poly_scal(a.F->inv(a.c.back()), a);
}

UniPoly poly_gcd(const UniPoly& a, const UniPoly& b) {
    UniPoly x = a, y = b;
    while (!y.is_zero()) {
        UniPoly r = poly_mod(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return poly_monic(x);
}

FqElem poly_eval(const UniPoly& a, const FqElem& x) {
    const ExtField& F = *a.F;
    FqElem r{};
    for (int i = a.deg(); i >= 0; --i) r = F.add(F.mul(r, x), a.c[i]);
    return r;
}

UniPoly poly_deriv(const UniPoly& a) {
    const ExtField& F = *a.F;
    UniPoly r(F);
    for (int i = 1; i <= a.deg(); ++i) r.c.push_back(F.scal(i % F.p(), a.c[i]));
    r.normalize();
    return r;
}

UniPoly poly_compose_mod(const UniPoly& g, const UniPoly& h, const UniPoly& f) {
    const ExtField& F = *g.F;
    UniPoly r(F);
    for (int i = g.deg(); i >= 0; --i) {
        r = poly_mul(r, h);
        r = poly_mod(r, f);
        UniPoly cterm(F);
        cterm.c.push_back(g.c[i]);
        cterm.normalize();
        r = poly_add(r, cterm);
    }
    return r;
}

UniPoly poly_powmod(const UniPoly& a, const std::vector<u64>& limbs, const UniPoly& f) {
    const ExtField& F = *a.F;
    int top = (int)limbs.size() - 1;
    while (top >= 0 && limbs[top] == 0) --top;
    UniPoly r(F);
    r.c.push_back(F.one());
    if (top < 0) return poly_mod(r, f);
    UniPoly base = poly_mod(a, f);
    for (int li = 0; li <= top; ++li) {
        u64 word = limbs[li];
        int bits = li == top ? 64 - __builtin_clzll(word ? word : 1) : 64;
        (void)bits;
    }
    // LSB-first square and multiply (simpler with limb vectors)
    for (int li = 0; li <= top; ++li) {
        u64 word = limbs[li];
        int nbits = li == top ? (word ? 64 - __builtin_clzll(word) : 0) : 64;
        for (int b = 0; b < nbits; ++b) {
            if ((word >> b) & 1) r = poly_mod(poly_mul(r, base), f);
            base = poly_mod(poly_mul(base, base), f);
        }
    }
    return r;
}

UniPoly poly_xpow_mod(const std::vector<u64>& limbs, const UniPoly& f) {
    const ExtField& F = *f.F;
    UniPoly x(F);
    x.c = {FqElem{}, F.one()};
    return poly_powmod(x, limbs, f);
}

// ---------------------------------------------------------------------------
// root finding
// ---------------------------------------------------------------------------

namespace {

// deterministic element sequence for equal-degree splitting shifts; the top
// coefficient varies fastest because base-field shifts act identically on a
// set of conjugate roots (chi is Frobenius-invariant) and can never split it
// hashed so every coordinate varies from the first trial on: structured
// sequences (e.g. pure multiples of the extension generator) can leave the
// quadratic character of root+delta constant and the split never succeeds
FqElem shift_elem(const ExtField& F, u64 k) {
    FqElem r;
    u64 z = k;
    for (int i = 0; i < F.e(); ++i) {
        z += 0x9e3779b97f4a7c15ull;
        u64 x = z;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        x ^= x >> 31;
        r.c[(size_t)i] = x % F.p();
    }
    return r;
}

void split_linears(const ExtField& F, const UniPoly& g, u64 seed, std::vector<FqElem>& out) {
    if (g.deg() <= 0) return;
    if (g.deg() == 1) {
        // monic: root = -c0
        out.push_back(F.neg(F.mul(g.c[0], F.inv(g.c[1]))));
        return;
    }
    std::vector<u64> half = half_group_order_limbs(F.p(), F.e());
    for (u64 k = 0;; ++k) {
        FqElem delta = shift_elem(F, seed + k);
        UniPoly shifted(F);
        shifted.c = {delta, F.one()};  // x + delta
        UniPoly t = poly_powmod(shifted, half, g);
        // t - 1
        UniPoly tm1 = t;
        if (tm1.c.empty()) tm1.c.push_back(FqElem{});
        tm1.c[0] = F.sub(tm1.c[0], F.one());
        tm1.normalize();
        UniPoly h = poly_gcd(g, tm1);
        if (h.deg() > 0 && h.deg() < g.deg()) {
            UniPoly q, r;
            poly_divmod(g, h, q, r);
            split_linears(F, h, seed, out);
            split_linears(F, poly_monic(q), seed, out);
            return;
        }
    }
}

}  // namespace

std::vector<FqElem> poly_roots(const UniPoly& f, u64 seed) {
    const ExtField& F = *f.F;
    if (f.deg() < 1) throw BadParameter("poly_roots needs degree >= 1");
    UniPoly mf = poly_monic(f);
    // squarefree part
    UniPoly d = poly_deriv(mf);
    UniPoly sf = mf;
    if (!d.is_zero()) {
        UniPoly g = poly_gcd(mf, d);
        if (g.deg() > 0) {
            UniPoly q, r;
            poly_divmod(mf, g, q, r);
            sf = poly_monic(q);
        }
    } else {
        // p-th power; its roots are the roots of the p-th root, but for our
        // use cases this does not occur -- fall back to the radical via gcd
        // chain is unnecessary, just note sf stays mf (roots still found below
        // because x^q - x captures all roots of the radical).
        sf = mf;
    }
    // linear-factor part: gcd(sf, x^q - x)
    std::vector<u64> qlimbs{1};
    {
        // q = p^e
        for (int i = 0; i < F.e(); ++i) {
            u64 carry = 0;
            for (auto& l : qlimbs) {
                u128 t = (u128)l * F.p() + carry;
                l = (u64)t;
                carry = (u64)(t >> 64);
            }
            if (carry) qlimbs.push_back(carry);
        }
    }
    UniPoly xq = poly_xpow_mod(qlimbs, sf);
    UniPoly xqmx = xq;
    {
        if (xqmx.c.size() < 2) xqmx.c.resize(2, FqElem{});
        xqmx.c[1] = F.sub(xqmx.c[1], F.one());
        xqmx.normalize();
    }
    UniPoly lin = poly_gcd(sf, xqmx);
    std::vector<FqElem> roots;
    split_linears(F, lin, seed, roots);
    // multiplicities via trial division of the original polynomial
    std::vector<FqElem> out;
    for (const FqElem& r : roots) {
        UniPoly cur = mf;
        UniPoly linp(F);
        linp.c = {F.neg(r), F.one()};
        while (true) {
            UniPoly q, rem;
            if (cur.deg() < 1) break;
            poly_divmod(cur, linp, q, rem);
            if (!rem.is_zero()) break;
            out.push_back(r);
            cur = q;
        }
    }
    std::sort(out.begin(), out.end(), [&](const FqElem& a, const FqElem& b) { return F.lex_less(a, b); });
    return out;
}

}  // namespace d6lab
