#include "d6lab/curves.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

namespace d6lab {

EllipticCurve make_cubic(const ExtField& F, const FqElem& c, const FqElem& a2,
                         const FqElem& a4, const FqElem& a6) {
    EllipticCurve E;
    E.F = &F;
    E.model = EllipticCurve::Model::GeneralCubic;
    E.c = c;
    E.a2 = a2;
    E.a4 = a4;
    E.a6 = a6;
    if (F.is_zero(c)) throw BadParameter("zero twist constant");
    if (!is_nonsingular(E)) throw SingularCurve("singular cubic");
    return E;
}

EllipticCurve make_legendre(const ExtField& F, const FqElem& e, const FqElem& lambda) {
    EllipticCurve E;
    E.F = &F;
    E.model = EllipticCurve::Model::Legendre;
    E.c = e;
    E.lambda = lambda;
    if (F.is_zero(e)) throw BadParameter("zero twist constant");
    if (F.is_zero(lambda) || lambda == F.one()) throw SingularCurve("lambda in {0,1}");
    return E;
}

MonicCubic monic_model(const EllipticCurve& E) {
    const ExtField& F = *E.F;
    FqElem c = E.c, a2, a4, a6;
    if (E.model == EllipticCurve::Model::Legendre) {
        // x(x-1)(x-lambda) = x^3 - (1+lambda)x^2 + lambda x
        a2 = F.neg(F.add(F.one(), E.lambda));
        a4 = E.lambda;
        a6 = F.zero();
    } else {
        a2 = E.a2;
        a4 = E.a4;
        a6 = E.a6;
    }
    // c y^2 = x^3 + a2 x^2 + a4 x + a6  --(x,y)->(cx, c^2 y)-->  monic
    MonicCubic m;
    m.F = &F;
    FqElem c2 = F.mul(c, c);
    m.A2 = F.mul(a2, c);
    m.A4 = F.mul(a4, c2);
    m.A6 = F.mul(a6, F.mul(c2, c));
    return m;
}

FqElem cubic_discriminant(const MonicCubic& m) {
    const ExtField& F = *m.F;
    const FqElem &p = m.A2, &q = m.A4, &r = m.A6;
    // disc(x^3 + p x^2 + q x + r) = 18pqr - 4p^3 r + p^2 q^2 - 4 q^3 - 27 r^2
    FqElem t1 = F.scal(18, F.mul(p, F.mul(q, r)));
    FqElem t2 = F.scal(4, F.mul(F.mul(p, F.mul(p, p)), r));
    FqElem t3 = F.mul(F.mul(p, p), F.mul(q, q));
    FqElem t4 = F.scal(4, F.mul(q, F.mul(q, q)));
    FqElem t5 = F.scal(27, F.mul(r, r));
    return F.sub(F.sub(F.add(F.add(t1, t3), F.neg(t2)), t4), t5);
}

bool is_nonsingular(const EllipticCurve& E) {
    const ExtField& F = *E.F;
    if (F.is_zero(E.c)) return false;
    if (E.model == EllipticCurve::Model::Legendre)
        return !F.is_zero(E.lambda) && E.lambda != F.one();
    return !F.is_zero(cubic_discriminant(monic_model(E)));
}

// ---------------------------------------------------------------------------
// point arithmetic
// ---------------------------------------------------------------------------

AffPoint pt_neg(const MonicCubic& m, const AffPoint& P) {
    if (P.inf) return P;
    AffPoint r = P;
    r.y = m.F->neg(P.y);
    return r;
}

AffPoint pt_add(const MonicCubic& m, const AffPoint& P, const AffPoint& Q) {
    const ExtField& F = *m.F;
    if (P.inf) return Q;
    if (Q.inf) return P;
    FqElem s;
    if (P.x == Q.x) {
        if (P.y != Q.y || F.is_zero(P.y)) return AffPoint{};  // P + (-P) = O
        // tangent: s = (3x^2 + 2 A2 x + A4) / 2y
        FqElem num = F.add(F.add(F.scal(3, F.mul(P.x, P.x)), F.scal(2, F.mul(m.A2, P.x))), m.A4);
        s = F.mul(num, F.inv(F.scal(2, P.y)));
    } else {
        s = F.mul(F.sub(Q.y, P.y), F.inv(F.sub(Q.x, P.x)));
    }
    FqElem x3 = F.sub(F.sub(F.sub(F.mul(s, s), m.A2), P.x), Q.x);
    FqElem y3 = F.sub(F.mul(s, F.sub(P.x, x3)), P.y);
    AffPoint R;
    R.inf = false;
    R.x = x3;
    R.y = y3;
    return R;
}

AffPoint pt_mul(const MonicCubic& m, u64 n, const AffPoint& P) {
    AffPoint r{};  // infinity
    AffPoint base = P;
    while (n) {
        if (n & 1) r = pt_add(m, r, base);
        base = pt_add(m, base, base);
        n >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// counting
// ---------------------------------------------------------------------------

namespace {

// deterministic enumeration of F_q elements by index
FqElem elem_by_index(const ExtField& F, u64 k) {
    FqElem r;
    r.c[0] = k % F.p();
    k /= F.p();
    if (F.e() >= 2) r.c[1] = k % F.p();
    k /= F.p();
    if (F.e() >= 3) r.c[2] = k % F.p();
    return r;
}

u64 isqrt_u128(u128 n) {
    u64 r = (u64)std::min<u128>(n, UINT64_MAX);
    u64 x = 1;
    while ((u128)x * x <= n && x < (1ull << 32) * 2) x <<= 1;
    // binary search
    u64 lo = 0, hi = x;
    while (lo < hi) {
        u64 mid = lo + (hi - lo + 1) / 2;
        if ((u128)mid * mid <= n)
            lo = mid;
        else
            hi = mid - 1;
    }
    (void)r;
    return lo;
}

struct MemoKey {
    u64 p;
    int e;
    std::array<u64, 9> coeffs;
    auto operator<=>(const MemoKey&) const = default;
};

std::mutex memo_mutex;
std::map<MemoKey, u64> order_memo;

MemoKey memo_key(const MonicCubic& m) {
    MemoKey k;
    k.p = m.F->p();
    k.e = m.F->e();
    for (int i = 0; i < 3; ++i) {
        k.coeffs[i] = m.A2.c[i];
        k.coeffs[3 + i] = m.A4.c[i];
        k.coeffs[6 + i] = m.A6.c[i];
    }
    return k;
}

// all N in [lo, hi] with N*P = O, via baby-step/giant-step
std::vector<u64> annihilators_in_interval(const MonicCubic& m, const AffPoint& P, u64 lo, u64 hi) {
    const ExtField& F = *m.F;
    u64 span = hi - lo + 1;
    u64 step = isqrt_u128(span) + 1;
    // baby table: j*P for j in [0, step)
    std::map<std::array<u64, 6>, std::vector<u64>> baby;
    AffPoint B{};
    for (u64 j = 0; j < step; ++j) {
        if (!B.inf) {
            std::array<u64, 6> key{B.x.c[0], B.x.c[1], B.x.c[2], B.y.c[0], B.y.c[1], B.y.c[2]};
            baby[key].push_back(j);
        } else {
            baby[std::array<u64, 6>{0, 0, 0, 0, 0, 0}];  // handled separately below
        }
        B = pt_add(m, B, P);
    }
    AffPoint stepP = pt_mul(m, step, P);
    AffPoint G = pt_mul(m, lo, P);
    std::vector<u64> out;
    for (u64 i = 0; lo + i * step <= hi; ++i) {
        // want lo + i*step + j == N with N*P = O, i.e. G + j*P = O, i.e. G = -j*P
        if (G.inf) {
            // j = 0 works; also any baby j with j*P = O (impossible for j<ord unless P small order)
            u64 n = lo + i * step;
            if (n <= hi) out.push_back(n);
        } else {
            AffPoint nG = pt_neg(m, G);
            std::array<u64, 6> key{nG.x.c[0], nG.x.c[1], nG.x.c[2], nG.y.c[0], nG.y.c[1], nG.y.c[2]};
            auto it = baby.find(key);
            if (it != baby.end()) {
                for (u64 j : it->second) {
                    u64 n = lo + i * step + j;
                    if (n >= lo && n <= hi) out.push_back(n);
                }
            }
        }
        G = pt_add(m, G, stepP);
        (void)F;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

u64 point_order(const MonicCubic& m, const AffPoint& P, u64 multiple) {
    u64 ord = multiple;
    for (u64 f : factor_u64(multiple)) {
        while (ord % f == 0 && pt_mul(m, ord / f, P).inf) ord /= f;
    }
    return ord;
}

// deterministic point stream on the monic model; the top coordinate is filled
// first so that over an extension field the stream leaves the base subfield
// immediately (subfield points have small order and never pin the group order)
AffPoint next_point(const MonicCubic& m, u64& cursor) {
    const ExtField& F = *m.F;
    for (;; ++cursor) {
        u64 k = cursor;
        FqElem x;
        if (F.e() == 3) {
            x.c[2] = 1 + k % (F.p() - 1);
            k /= F.p() - 1;
        } else if (F.e() == 2) {
            x.c[1] = 1 + k % (F.p() - 1);
            k /= F.p() - 1;
        }
        x.c[0] = k % F.p();
        k /= F.p();
        if (F.e() == 3) x.c[1] = k % F.p();
        FqElem rhs = m.rhs(x);
        if (F.is_zero(rhs)) {
            AffPoint P;
            P.inf = false;
            P.x = x;
            P.y = F.zero();
            ++cursor;
            return P;
        }
        auto y = F.sqrt(rhs);
        if (y) {
            AffPoint P;
            P.inf = false;
            P.x = x;
            P.y = *y;
            ++cursor;
            return P;
        }
    }
}

u64 count_exhaustive(const MonicCubic& m) {
    const ExtField& F = *m.F;
    u64 q = F.q_u64(), p = F.p();
    // chi via a base-field square table (chi(x) = legendre(norm(x)))
    std::vector<std::int8_t> leg(p, -1);
    leg[0] = 0;
    for (u64 x = 1; x < p; ++x) leg[(u64)((u128)x * x % p)] = 1;
    i64 s = 0;
    for (u64 k = 0; k < q; ++k) s += leg[F.norm(m.rhs(elem_by_index(F, k)))];
    return (u64)((i64)q + 1 + s);
}

u64 count_bsgs(const MonicCubic& m) {
    const ExtField& F = *m.F;
    u128 q = F.q_u128();
    u64 B = 2 * isqrt_u128(q) + 1;  // covers the open Hasse interval
    u64 lo = (u64)(q + 1 - B), hi = (u64)(q + 1 + B);
    // twist model by the canonical nonresidue
    FqElem d = F.nonresidue();
    MonicCubic tw;
    tw.F = &F;
    tw.A2 = F.mul(m.A2, d);
    tw.A4 = F.mul(m.A4, F.mul(d, d));
    tw.A6 = F.mul(m.A6, F.mul(d, F.mul(d, d)));
    u64 L = 1, Lt = 1;  // lcm of point orders on E resp. twist
    u64 cur = 0, curt = 0;
    for (int round = 0; round < 40; ++round) {
        const MonicCubic& side = (round % 2 == 0) ? m : tw;
        u64& cursor = (round % 2 == 0) ? cur : curt;
        u64& lcm = (round % 2 == 0) ? L : Lt;
        AffPoint P = next_point(side, cursor);
        auto hits = annihilators_in_interval(side, P, lo, hi);
        if (hits.empty()) throw InternalInconsistency("no annihilator in Hasse interval");
        u64 ord = point_order(side, P, hits.front());
        lcm = std::lcm(lcm, ord);
        // candidates: N multiple of L in [lo,hi] with 2(q+1)-N multiple of Lt
        std::vector<u64> cands;
        for (u64 n = lo + (L - lo % L) % L; n <= hi; n += L) {
            u64 ntw = (u64)(2 * (q + 1)) - n;
            if (ntw % Lt == 0) cands.push_back(n);
        }
        if (cands.size() == 1) return cands.front();
        if (cands.empty()) throw InternalInconsistency("order constraints inconsistent");
    }
    // small groups can have an exponent too small to pin the order; fall back
    if (q <= 4096) return count_exhaustive(m);
    throw InternalInconsistency("group order ambiguous after 40 rounds");
}

}  // namespace

u64 curve_count_exhaustive(const EllipticCurve& E) {
    if (!is_nonsingular(E)) throw SingularCurve("singular curve");
    return count_exhaustive(monic_model(E));
}

u64 group_order_bsgs(const EllipticCurve& E) {
    if (!is_nonsingular(E)) throw SingularCurve("singular curve");
    return count_bsgs(monic_model(E));
}

u64 group_order(const EllipticCurve& E) {
    if (!is_nonsingular(E)) throw SingularCurve("singular curve");
    MonicCubic m = monic_model(E);
    const ExtField& F = *m.F;
    u128 q = F.q_u128();
    if (q >= ((u128)1 << 62)) throw BadParameter("field too large for point counting");
    MemoKey key = memo_key(m);
    {
        std::lock_guard<std::mutex> lk(memo_mutex);
        auto it = order_memo.find(key);
        if (it != order_memo.end()) return it->second;
    }
    u64 n = q <= 4096 ? count_exhaustive(m) : count_bsgs(m);
    // Hasse assert
    i128 t = (i128)(u128)(q + 1) - (i128)n;
    if (t * t > 4 * (i128)q) throw HasseViolation("computed order violates Hasse bound");
    {
        std::lock_guard<std::mutex> lk(memo_mutex);
        order_memo[key] = n;
    }
    return n;
}

i64 trace(const EllipticCurve& E) {
    u128 q = E.F->q_u128();
    return (i64)((i128)(u128)(q + 1) - (i128)group_order(E));
}

EllipticCurve quadratic_twist(const EllipticCurve& E, const FqElem& d) {
    if (E.F->is_zero(d)) throw BadParameter("twist by zero");
    EllipticCurve T = E;
    T.c = E.F->mul(E.c, d);
    return T;
}

FqElem j_invariant(const EllipticCurve& E) {
    const ExtField& F = *E.F;
    if (!is_nonsingular(E)) throw SingularCurve("singular curve");
    MonicCubic m = monic_model(E);
    // b-invariants for y^2 = x^3 + A2 x^2 + A4 x + A6
    FqElem b2 = F.scal(4, m.A2);
    FqElem b4 = F.scal(2, m.A4);
    FqElem b6 = F.scal(4, m.A6);
    FqElem c4 = F.sub(F.mul(b2, b2), F.scal(24, b4));
    FqElem c6 = F.add(F.sub(F.scal(36, F.mul(b2, b4)), F.mul(b2, F.mul(b2, b2))), F.neg(F.scal(216, b6)));
    FqElem c4c = F.mul(c4, F.mul(c4, c4));
    FqElem delta1728 = F.sub(c4c, F.mul(c6, c6));  // 1728 * discriminant
    return F.mul(F.scal(1728, c4c), F.inv(delta1728));
}

bool is_supersingular(const EllipticCurve& E) {
    if (E.F->e() != 1) throw BadParameter("supersingularity test expects a prime base field");
    if (E.F->p() <= 3) throw BadParameter("p must exceed 3");
    return trace(E) == 0;
}

bool isogenous(const EllipticCurve& E1, const EllipticCurve& E2) {
    if (!E1.F->same(*E2.F)) throw FieldMismatch("curves over different fields");
    return trace(E1) == trace(E2);
}

// ---------------------------------------------------------------------------
// Weil polynomials
// ---------------------------------------------------------------------------

void WeilPolynomial::add(const WeilFactor& f) {
    factors.insert(std::upper_bound(factors.begin(), factors.end(), f), f);
}

int WeilPolynomial::degree() const {
    int d = 0;
    for (const auto& f : factors) d += 2 * f.e;
    return d;
}

i128 WeilPolynomial::power_sum(int k) const {
    i128 total = 0;
    for (const auto& f : factors) {
        if (k % f.e != 0) continue;
        int mdeg = k / f.e;
        u128 qe = 1;
        for (int i = 0; i < f.e; ++i) qe *= f.q;
        // tau_j over F_{q^e}: tau_0 = 2, tau_1 = t, tau_j = t tau_{j-1} - q^e tau_{j-2}
        i128 t0 = 2, t1 = f.t;
        if (mdeg == 0) {
            total += (i128)f.e * 2;
            continue;
        }
        for (int j = 2; j <= mdeg; ++j) {
            i128 t2 = (i128)f.t * t1 - (i128)qe * t0;
            t0 = t1;
            t1 = t2;
        }
        total += (i128)f.e * t1;
    }
    return total;
}

std::vector<std::vector<i64>> weil_canonical(const WeilPolynomial& w) {
    std::vector<std::vector<i64>> out;
    auto isqrt = [](i64 n) -> i64 {  // floor sqrt, n >= 0
        i64 s = (i64)std::llround(std::sqrt((double)n));
        while (s > 0 && s * s > n) --s;
        while ((s + 1) * (s + 1) <= n) ++s;
        return s;
    };
    auto quad = [&](i64 a, i64 p) { out.push_back({p, -a, 1}); };
    for (const WeilFactor& f : w.factors) {
        i64 p = (i64)f.q;
        if (f.e == 1) {
            // x^2 - tx + p: negative discriminant for prime p, irreducible
            quad(f.t, p);
        } else if (f.e == 2) {
            // x^4 - tx^2 + p^2 = (x^2 - sx + p)(x^2 + sx + p) iff s^2 = 2p + t
            i64 d = 2 * p + f.t;
            i64 s = isqrt(d);
            if (s * s == d) {
                quad(s, p);
                quad(-s, p);
            } else if (f.t == 2 * p) {
                out.push_back({-p, 0, 1});  // (x^2 - p)^2
                out.push_back({-p, 0, 1});
            } else {
                out.push_back({p * p, 0, -f.t, 0, 1});
            }
        } else {
            // e = 3: x^6 - tx^3 + p^3 gains a factor x^2 - ax + p for every
            // integer a with a^3 - 3pa = t; no other integer factors exist
            // (any factor's roots have absolute value sqrt(p))
            std::vector<i64> sext = {p * p * p, 0, 0, -f.t, 0, 0, 1};
            i64 bound = isqrt(4 * p);
            for (i64 a = -bound; a <= bound; ++a) {
                if (a * a * a - 3 * p * a != f.t) continue;
                quad(a, p);
                // exact division by x^2 - ax + p
                std::vector<i64> quo(sext.size() - 2, 0);
                std::vector<i64> rem = sext;
                for (int i = (int)rem.size() - 1; i >= 2; --i) {
                    i64 c = rem[(size_t)i];
                    quo[(size_t)(i - 2)] = c;
                    rem[(size_t)i] = 0;
                    rem[(size_t)(i - 1)] += c * a;
                    rem[(size_t)(i - 2)] -= c * p;
                }
                if (rem[0] != 0 || rem[1] != 0)
                    throw InternalInconsistency("descent quadratic does not divide");
                sext = std::move(quo);
            }
            if (sext.size() > 1) out.push_back(std::move(sext));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool weil_product_equal(const WeilPolynomial& a, const WeilPolynomial& b) {
    return a == b || weil_canonical(a) == weil_canonical(b);
}

WeilFactor res_scalars_weil(i64 t, u64 q, int e) {
    u128 qe = 1;
    for (int i = 0; i < e; ++i) qe *= q;
    if ((i128)t * t > 4 * (i128)qe) throw HasseViolation("trace outside Hasse bound");
    WeilFactor f;
    f.t = t;
    f.q = q;
    f.e = e;
    return f;
}

i64 extension_trace(i64 t1, u64 q, int k) {
    if ((i128)t1 * t1 > 4 * (i128)q) throw HasseViolation("trace outside Hasse bound");
    i128 t0 = 2, t = t1;
    if (k == 0) return 2;
    for (int j = 2; j <= k; ++j) {
        i128 tn = (i128)t1 * t - (i128)q * t0;
        t0 = t;
        t = tn;
    }
    return (i64)t;
}

}  // namespace d6lab
