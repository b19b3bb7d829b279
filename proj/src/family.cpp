#include "d6lab/family.hpp"

#include <algorithm>
#include <set>

namespace d6lab {

std::vector<u64> u_bad_set(u64 p) {
    PrimeField K(p);
    std::set<u64> bad;
    auto put = [&](u64 v) {
        bad.insert(v);
        bad.insert(K.neg(v));
    };
    put(1);
    put(3);
    auto s3 = K.sqrt(3);
    if (s3) {
        put(*s3);
        put(K.add(3, K.mul(2, *s3)));  // 3 + 2*sqrt3 (and negation)
        put(K.sub(3, K.mul(2, *s3)));  // 3 - 2*sqrt3
    }
    auto si = K.sqrt(K.neg(1));
    auto s2 = K.sqrt(2);
    if (si && s2) {
        put(K.add(*si, *s2));
        put(K.sub(*si, *s2));
    }
    auto sm2 = K.sqrt(K.neg(2));
    if (sm2 && s2) {
        // (1 +- sqrt(-2))(1 +- sqrt(2)), signs independent
        for (u64 a : {K.add(1, *sm2), K.sub(1, *sm2)})
            for (u64 b : {K.add(1, *s2), K.sub(1, *s2)}) put(K.mul(a, b));
    }
    bad.erase(0);
    return std::vector<u64>(bad.begin(), bad.end());
}

u64 r_from_u(const PrimeField& K, u64 u) {
    u %= K.p();
    u64 u2 = K.mul(u, u);
    u64 num = K.mul(u2, K.pow(K.sub(u2, 9 % K.p()), 2));
    u64 den = K.pow(K.sub(u2, 1), 2);
    if (den == 0 || u == 0) throw BadParameter("degenerate u");
    return K.neg(K.mul(num, K.inv(den)));
}

std::vector<u64> u_excluded_set(u64 p) {
    PrimeField K(p);
    auto bad = u_bad_set(p);
    std::set<u64> out(bad.begin(), bad.end());
    // also exclude u giving r in {0, +-27, 23 +- 10 sqrt(-2)}: coincident
    // Weierstrass points (r = 27 is u^2 = -3) or extra automorphisms
    std::set<u64> badr{0, 27 % p, K.from_int(-27)};
    auto sm2 = K.sqrt(K.neg(2));
    if (sm2) {
        badr.insert(K.add(K.from_int(23), K.mul(10 % p, *sm2)));
        badr.insert(K.sub(K.from_int(23), K.mul(10 % p, *sm2)));
    }
    for (u64 u = 1; u < p; ++u) {
        if (out.count(u)) continue;
        if (badr.count(r_from_u(K, u))) out.insert(u);
    }
    return std::vector<u64>(out.begin(), out.end());
}

static void validate_u(const PrimeField& K, u64 u) {
    u %= K.p();
    if (u == 0) throw BadParameter("u = 0");
    auto bad = u_bad_set(K.p());
    if (std::binary_search(bad.begin(), bad.end(), u)) throw BadParameter("u in excluded set");
    // excluded r values: 0, +-27 and 23 +- 10 sqrt(-2) when they exist
    u64 r = r_from_u(K, u);
    if (r == 0 || r == 27 % K.p() || r == K.from_int(-27)) throw BadParameter("excluded r value");
    auto sm2 = K.sqrt(K.neg(2));
    if (sm2) {
        u64 a = K.add(K.from_int(23), K.mul(10 % K.p(), *sm2));
        u64 b = K.sub(K.from_int(23), K.mul(10 % K.p(), *sm2));
        if (r == a || r == b) throw BadParameter("excluded r value (extra automorphisms)");
    }
}

static D6Params build_params(const PrimeField& K, u64 u, int cbit) {
    D6Params P{ExtField(K, 1), u % K.p(), cbit & 1, r_from_u(K, u), 1};
    if (P.cbit) P.c_rep = K.smallest_nonresidue();
    return P;
}

D6Params make_params(const PrimeField& K, u64 u, int cbit) {
    validate_u(K, u);
    return build_params(K, u, cbit);
}

D6Params make_params_unchecked(const PrimeField& K, u64 u, int cbit) {
    if (u % K.p() == 0) throw BadParameter("u = 0");
    return build_params(K, u, cbit);
}

WeierstrassSet weierstrass_points(const PrimeField& K, u64 u) {
    u %= K.p();
    if (u == 0 || u == 1 || u == K.p() - 1) throw BadParameter("degenerate u");
    u64 u3 = K.mul(K.add(u, 3), K.inv(K.sub(u, 1)));
    u64 u5 = K.mul(K.sub(u, 3), K.inv(K.add(u, 1)));
    WeierstrassSet W{{u, K.neg(u), u3, K.neg(u3), u5, K.neg(u5)}};
    // distinctness + sextic identity: prod (x - u_k) = x^6 + (r-18)x^4 + (81-2r)x^2 + r
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            if (W.w[a] == W.w[b]) throw BadParameter("coincident Weierstrass points");
    u64 r = r_from_u(K, u);
    u64 A = K.add(K.add(K.mul(u, u), K.mul(u3, u3)), K.mul(u5, u5));  // sum of squares
    u64 e2 = K.neg(A);                                                // x^4 coefficient
    u64 prodsq = K.mul(K.mul(K.mul(u, u), K.mul(u3, u3)), K.mul(u5, u5));
    u64 e6 = K.neg(prodsq);  // constant term times (-1)^3... see below
    // prod(x - u_k) = (x^2-u1^2)(x^2-u3^2)(x^2-u5^2): coeffs from elementary sym
    u64 s1 = A;
    u64 s2 = K.add(K.add(K.mul(K.mul(u, u), K.mul(u3, u3)), K.mul(K.mul(u, u), K.mul(u5, u5))),
                   K.mul(K.mul(u3, u3), K.mul(u5, u5)));
    u64 s3 = prodsq;
    (void)e2;
    (void)e6;
    if (K.neg(s1) != K.sub(r, 18 % K.p()) || s2 != K.sub(K.from_int(81), K.mul(2, r)) ||
        K.neg(s3) != r)
        throw InternalInconsistency("sextic identity failed");
    return W;
}

std::vector<std::pair<u64, int>> equivalence_orbit(const PrimeField& K, u64 u, int cbit) {
    u %= K.p();
    WeierstrassSet W = weierstrass_points(K, u);  // validates denominators
    int negbit = K.legendre(K.neg(1)) == -1 ? 1 : 0;
    u64 i_u = K.inv(u);
    u64 i_up3 = K.inv(K.add(u, 3));
    u64 i_um3 = K.inv(K.sub(u, 3));
    std::array<std::pair<u64, int>, 6> gens = {{
        {u, cbit},
        {W.w[2], cbit},
        {W.w[4], cbit},
        {K.mul(3, i_u), cbit ^ negbit},
        {K.mul(K.mul(3, K.sub(u, 1)), i_up3), cbit ^ negbit},
        {K.mul(K.mul(3, K.add(u, 1)), i_um3), cbit ^ negbit},
    }};
    std::set<std::pair<u64, int>> out;
    for (auto [v, cb] : gens) {
        out.insert({v, cb});
        out.insert({K.neg(v), cb});
    }
    return std::vector<std::pair<u64, int>>(out.begin(), out.end());
}

u64 coarse_invariant(const PrimeField& K, u64 u) {
    u64 r = r_from_u(K, u);
    if (r == 0) throw BadParameter("r = 0");
    return K.add(r, K.mul(729 % K.p(), K.inv(r)));
}

CurveClass canonical_class(const PrimeField& K, u64 u, int cbit) {
    auto orbit = equivalence_orbit(K, u, cbit);
    auto rep = orbit.front();  // set order = lexicographic (u, cbit)
    return CurveClass{rep.first, rep.second, coarse_invariant(K, u)};
}

EllipticCurve base_curve(const D6Params& P) {
    const PrimeField& K = P.K();
    const ExtField& F = P.F;
    return make_cubic(F, F.embed(P.c_rep), F.embed(K.sub(P.r, 18 % K.p())),
                      F.embed(K.sub(K.from_int(81), K.mul(2, P.r))), F.embed(P.r));
}

std::vector<OrbitEntry> orbit_prym_curves(const D6Params& P) {
    const PrimeField& K = P.K();
    u64 u = P.u, c = P.c_rep;
    u64 um1 = K.sub(u, 1), up1 = K.add(u, 1), um3 = K.sub(u, 3), up3 = K.add(u, 3);
    u64 u2p3 = K.add(K.mul(u, u), 3);
    u64 q = K.mul(u2p3, u2p3);
    if (K.mul(um1, up3) == 0 || q == 0) throw BadParameter("degenerate u");
    u64 lam6 = K.mul(K.mul(4, u), K.inv(K.mul(um1, up3)));
    u64 lam3a = K.mul(K.mul(16 % K.p(), K.mul(u, u)), K.inv(q));
    u64 lam3b = K.mul(K.pow(K.mul(um3, up1), 2), K.inv(q));
    u64 lam3c = K.mul(K.pow(K.mul(um1, up3), 2), K.inv(q));
    auto m = [&](std::initializer_list<u64> fs) {
        u64 r = 1;
        for (u64 f : fs) r = K.mul(r, f);
        return r;
    };
    std::vector<OrbitEntry> out;
    out.push_back({Orbit::O6, 1, 4, lam6, K.neg(m({u, um3, up1}))});
    out.push_back({Orbit::O6, 1, 5, lam6, m({u, um3, up1})});
    out.push_back({Orbit::O6, 2, 3, lam6, K.neg(m({c, u, um3, um1, up1, up3, u2p3}))});
    out.push_back({Orbit::O6, 2, 6, lam6, m({c, u, u2p3})});
    out.push_back({Orbit::O6, 3, 6, lam6, m({c, um3, up1, u2p3})});
    out.push_back({Orbit::O6, 4, 5, lam6, m({c, um1, up3, u2p3})});
    out.push_back({Orbit::O3a, 1, 2, lam3a, K.neg(m({um1, up1, up3, um3}))});
    out.push_back({Orbit::O3a, 3, 5, lam3a, m({c, um3, up1, u2p3})});
    out.push_back({Orbit::O3a, 4, 6, lam3a, m({c, um1, up3, u2p3})});
    out.push_back({Orbit::O3b, 1, 3, lam3b, K.neg(m({u, um1, up3}))});
    out.push_back({Orbit::O3b, 2, 4, lam3b, K.neg(m({c, u, u2p3}))});
    out.push_back({Orbit::O3b, 5, 6, lam3b, K.neg(m({c, um1, up3, u2p3}))});
    out.push_back({Orbit::O3c, 1, 6, lam3c, m({u, um3, up1})});
    out.push_back({Orbit::O3c, 2, 5, lam3c, m({c, u, u2p3})});
    out.push_back({Orbit::O3c, 3, 4, lam3c, K.neg(m({c, um3, up1, u2p3}))});
    for (const auto& oe : out) {
        if (oe.lambda == 0 || oe.lambda == 1 || oe.e == 0)
            throw BadParameter("degenerate double-cover parameters");
    }
    return out;
}

i64 legendre_lambda_trace(const PrimeField& K, u64 lambda) {
    ExtField F(K, 1);
    return trace(make_legendre(F, F.one(), F.embed(lambda)));
}

std::vector<std::int16_t> build_trace_table(const PrimeField& K) {
    u64 p = K.p();
    if (p > (1ull << 22)) throw ResourceLimit("build_trace_table: p exceeds 2^22");
    std::vector<std::int16_t> T(p, 0);
    std::vector<std::int8_t> chi(p, 0);
    for (u64 x = 1; x < p; ++x) chi[K.mul(x, x)] = 1;
    for (u64 x = 1; x < p; ++x)
        if (!chi[x]) chi[x] = -1;
    // T(lambda) = -sum_x chi(x(x-1)) chi(x - lambda)
    std::vector<std::int8_t> g(p);
    for (u64 x = 0; x < p; ++x) g[x] = chi[K.mul(x, K.sub(x, 1))];
    for (u64 lam = 0; lam < p; ++lam) {
        if (lam == 0 || lam == 1) continue;
        i64 s = 0;
        for (u64 x = 0; x < p; ++x)
            if (g[x]) s += g[x] * chi[K.sub(x, lam)];
        T[lam] = (std::int16_t)(-s);
    }
    return T;
}

u64 lambda_base(const D6Params& P) {
    const PrimeField& K = P.K();
    WeierstrassSet W = weierstrass_points(K, P.u);
    u64 A = K.mul(W.w[0], W.w[0]);
    u64 B = K.mul(W.w[2], W.w[2]);
    u64 C = K.mul(W.w[4], W.w[4]);
    return K.mul(K.sub(C, A), K.inv(K.sub(B, A)));
}

static void hasse_check(i64 t, u64 p) {
    if ((i128)t * t > (i128)4 * p) throw HasseViolation("signature trace outside Hasse bound");
}

TraceSignature trace_signature(const D6Params& P, const std::vector<std::int16_t>* table) {
    const PrimeField& K = P.K();
    auto T = [&](u64 lam) -> i64 {
        if (table) return (*table)[lam];
        return legendre_lambda_trace(K, lam);
    };
    TraceSignature S;
    if (table) {
        u64 lb = lambda_base(P);
        WeierstrassSet W = weierstrass_points(K, P.u);
        u64 BmA = K.sub(K.mul(W.w[2], W.w[2]), K.mul(W.w[0], W.w[0]));
        S.tBase = K.legendre(K.mul(P.c_rep, BmA)) * T(lb);
    } else {
        S.tBase = trace(base_curve(P));
    }
    hasse_check(S.tBase, K.p());
    auto entries = orbit_prym_curves(P);
    int i6 = 0, i3a = 0, i3b = 0, i3c = 0;
    for (const auto& oe : entries) {
        i64 t = K.legendre(oe.e) * T(oe.lambda);
        hasse_check(t, K.p());
        switch (oe.orbit) {
            case Orbit::O6: S.traces6[i6++] = t; break;
            case Orbit::O3a: S.traces3a[i3a++] = t; break;
            case Orbit::O3b: S.traces3b[i3b++] = t; break;
            case Orbit::O3c: S.traces3c[i3c++] = t; break;
        }
    }
    std::sort(S.traces6.begin(), S.traces6.end());
    std::sort(S.traces3a.begin(), S.traces3a.end());
    std::sort(S.traces3b.begin(), S.traces3b.end());
    std::sort(S.traces3c.begin(), S.traces3c.end());
    return S;
}

std::array<i64, 16> TraceSignature::flattened() const {
    std::array<i64, 16> f;
    f[0] = tBase;
    std::array<i64, 15> rest;
    int k = 0;
    for (i64 t : traces6) rest[k++] = t;
    for (i64 t : traces3a) rest[k++] = t;
    for (i64 t : traces3b) rest[k++] = t;
    for (i64 t : traces3c) rest[k++] = t;
    std::sort(rest.begin(), rest.end());
    std::copy(rest.begin(), rest.end(), f.begin() + 1);
    return f;
}

u64 genus1_quartic_count(const ExtField& F, const std::array<FqElem, 5>& coeffs) {
    u64 q = F.q_u64();
    i64 s = 0;
    for (u64 k = 0; k < q; ++k) {
        FqElem x;
        u64 t = k;
        x.c[0] = t % F.p();
        t /= F.p();
        if (F.e() >= 2) x.c[1] = t % F.p();
        t /= F.p();
        if (F.e() >= 3) x.c[2] = t % F.p();
        FqElem v = coeffs[4];
        for (int d = 3; d >= 0; --d) v = F.add(F.mul(v, x), coeffs[d]);
        s += F.chi(v);
    }
    return (u64)((i64)q + s) + 1 + F.chi(coeffs[4]);
}

u64 cover_d_class(const D6Params& P, int i, int j) {
    const PrimeField& K = P.K();
    WeierstrassSet W = weierstrass_points(K, P.u);
    u64 u1 = W.w[0];
    u64 cls;
    if (i == 1) {
        // P1 lies on the branch pair; the split condition reads off
        // c * prod_{k not in {1,j}} (u1 - u_k)
        cls = P.c_rep;
        for (int k = 2; k <= 6; ++k) {
            if (k == j) continue;
            cls = K.mul(cls, K.sub(u1, W.w[k - 1]));
        }
    } else {
        cls = K.mul(K.sub(u1, W.w[i - 1]), K.sub(u1, W.w[j - 1]));
    }
    return K.legendre(cls) == 1 ? 1 : K.smallest_nonresidue();
}

i64 prym_quartic_trace(const D6Params& P, int i, int j, u64 d) {
    const PrimeField& K = P.K();
    const ExtField& F = P.F;
    WeierstrassSet W = weierstrass_points(K, P.u);
    u64 lead = K.mul(P.c_rep, d);
    // c d y^2 = prod_{k not in {i,j}} (x - u_k); fold the constant into a
    // monic quartic via y -> y/(cd), x unchanged:  y^2 = cd * prod(...)
    std::array<FqElem, 5> q{};
    q[0] = F.embed(lead);
    int deg = 0;
    for (int k = 1; k <= 6; ++k) {
        if (k == i || k == j) continue;
        // multiply by (x - u_k)
        std::array<FqElem, 5> nq{};
        for (int t = 0; t <= deg; ++t) {
            nq[t + 1] = F.add(nq[t + 1], q[t]);
            nq[t] = F.sub(nq[t], F.mul(q[t], F.embed(W.w[k - 1])));
        }
        q = nq;
        ++deg;
    }
    u64 n = genus1_quartic_count(F, q);
    return (i64)(K.p() + 1) - (i64)n;
}

}  // namespace d6lab
