#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <set>

#include "d6lab/family.hpp"

using namespace d6lab;

TEST_CASE("u_bad_set goldens") {
    // p = 11: every unit is bad
    auto b11 = u_bad_set(11);
    CHECK(b11.size() == 10);
    // p = 13: everything except {6, 7}
    auto b13 = u_bad_set(13);
    CHECK(b13 == std::vector<u64>{1, 2, 3, 4, 5, 8, 9, 10, 11, 12});
    // p = 3 mod 8: sqrt(-1) and sqrt(2) both absent, so the last two
    // families contribute nothing
    PrimeField K(43);
    CHECK(K.legendre(2) == -1);
    CHECK(K.legendre(42) == -1);
    auto b43 = u_bad_set(43);
    // only +-1, +-3, +-sqrt3, +-3+-2sqrt3 can contribute
    CHECK(b43.size() <= 10);
}

TEST_CASE("r and coarse invariant goldens") {
    PrimeField K(13);
    CHECK(r_from_u(K, 2) == 12);
    CHECK(r_from_u(K, 11) == 12);  // even in u
    CHECK(coarse_invariant(K, 2) == 11);
    // equivalence partners share r on the first line and coarse overall
    u64 u3 = K.mul(K.add(2, 3), K.inv(K.sub(2, 1)));
    CHECK(r_from_u(K, u3) == 12);
    for (auto [v, cb] : equivalence_orbit(K, 2, 0)) {
        (void)cb;
        CHECK(coarse_invariant(K, v) == 11);
    }
}

TEST_CASE("weierstrass points golden and sextic identity") {
    PrimeField K(13);
    WeierstrassSet W = weierstrass_points(K, 2);
    CHECK(W.w == std::array<u64, 6>{2, 11, 5, 8, 4, 9});
    // symmetric under u -> -u as a set
    WeierstrassSet W2 = weierstrass_points(K, 11);
    std::set<u64> s1(W.w.begin(), W.w.end()), s2(W2.w.begin(), W2.w.end());
    CHECK(s1 == s2);
    // property across a larger prime
    PrimeField K2(1009);
    auto bad = u_bad_set(1009);
    int n = 0;
    auto excl = u_excluded_set(1009);
    for (u64 u = 2; u < 1009 && n < 40; ++u) {
        if (std::binary_search(excl.begin(), excl.end(), u)) continue;
        CHECK_NOTHROW(weierstrass_points(K2, u));  // asserts the identity inside
        ++n;
    }
}

TEST_CASE("base cubic roots are the squared odd-index points") {
    PrimeField K(1009);
    auto bad = u_bad_set(1009);
    int n = 0;
    for (u64 u = 2; u < 1009 && n < 25; ++u) {
        if (std::binary_search(bad.begin(), bad.end(), u)) continue;
        std::optional<D6Params> P;
        try {
            P = make_params(K, u, 0);
        } catch (const BadParameter&) {
            continue;
        }
        WeierstrassSet W = weierstrass_points(K, u);
        u64 r = P->r;
        for (int idx : {0, 2, 4}) {
            u64 s = K.mul(W.w[idx], W.w[idx]);
            u64 v = K.add(K.mul(K.add(K.mul(K.add(s, K.sub(r, 18)), s), K.sub(81, K.mul(2, r))), s), r);
            CHECK(v == 0);
        }
        ++n;
    }
}

TEST_CASE("p=13 supports no valid classes") {
    // the only u-values outside U_bad are 6 and 7, but both satisfy u^2 = -3,
    // i.e. r = 27: coincident Weierstrass points
    PrimeField K(13);
    CHECK(r_from_u(K, 6) == 27 % 13);
    CHECK(r_from_u(K, 7) == 27 % 13);
    CHECK_THROWS_AS(make_params(K, 6, 0), BadParameter);
    CHECK_THROWS_AS(weierstrass_points(K, 6), BadParameter);
    CHECK(u_excluded_set(13).size() == 12);
    // p = 11 is fully excluded already at the U_bad level
    CHECK(u_excluded_set(11).size() == 10);
}

TEST_CASE("equivalence orbit at a workable prime") {
    PrimeField K(53);
    auto excl = u_excluded_set(53);
    u64 u = 2;
    while (std::binary_search(excl.begin(), excl.end(), u)) ++u;
    auto orb = equivalence_orbit(K, u, 0);
    CHECK(orb.size() <= 12);
    CHECK(12 % orb.size() == 0);
    // every member reports the same canonical class
    CurveClass c1 = canonical_class(K, u, 0);
    for (auto [v, cb] : orb) CHECK(canonical_class(K, v, cb) == c1);
    // canonical representative is the lexicographic minimum
    CHECK(std::make_pair(c1.u, c1.cbit) == orb.front());
}

TEST_CASE("orbit sizes partition the good parameter pairs") {
    for (u64 p : {17ull, 53ull, 101ull}) {
        PrimeField K(p);
        auto bad = u_excluded_set(p);
        std::set<std::pair<u64, int>> seen;
        u64 total = 0;
        for (u64 u = 1; u < p; ++u) {
            if (std::binary_search(bad.begin(), bad.end(), u)) continue;
            for (int cb : {0, 1}) {
                if (seen.count({u, cb})) continue;
                auto orb = equivalence_orbit(K, u, cb);
                CHECK(12 % orb.size() == 0);
                for (auto& m : orb) {
                    CHECK(!seen.count(m));
                    seen.insert(m);
                    // orbit membership is symmetric
                    auto back = equivalence_orbit(K, m.first, m.second);
                    CHECK(std::set<std::pair<u64, int>>(back.begin(), back.end()) ==
                          std::set<std::pair<u64, int>>(orb.begin(), orb.end()));
                }
                total += orb.size();
            }
        }
        CHECK(total == 2 * (p - 1 - bad.size()));
    }
}

TEST_CASE("base curve and orbit lambdas at the golden point") {
    PrimeField K(13);
    D6Params P = make_params_unchecked(K, 2, 0);
    EllipticCurve E = base_curve(P);
    CHECK(trace(E) == -2);
    auto entries = orbit_prym_curves(P);
    REQUIRE(entries.size() == 15);
    CHECK(entries[0].lambda == 12);   // orbit 6: 8/(1*5) = 8*8 = 64 = 12
    CHECK(entries[6].lambda == 9);    // 3a
    CHECK(entries[9].lambda == 10);   // 3b
    CHECK(entries[12].lambda == 9);   // 3c
    // j of orbit-6 curve is -16 (r-27)^2 / r
    PrimeField K2(1009);
    ExtField F2(K2, 1);
    auto bad = u_bad_set(1009);
    int n = 0;
    for (u64 u = 2; u < 1009 && n < 50; ++u) {
        if (std::binary_search(bad.begin(), bad.end(), u)) continue;
        std::optional<D6Params> Q;
        try {
            Q = make_params(K2, u, (int)(u % 2));
        } catch (const BadParameter&) {
            continue;
        }
        auto oe = orbit_prym_curves(*Q)[0];
        EllipticCurve L = make_legendre(Q->F, Q->F.embed(oe.e), Q->F.embed(oe.lambda));
        u64 expect = K2.mul(K2.neg(K2.mul(16, K2.pow(K2.sub(Q->r, 27), 2))), K2.inv(Q->r));
        CHECK(j_invariant(L) == Q->F.embed(expect));
        ++n;
    }
    CHECK(n == 50);
}

TEST_CASE("trace signature golden at (u=2, c=1, p=13)") {
    PrimeField K(13);
    D6Params P = make_params_unchecked(K, 2, 0);
    TraceSignature S = trace_signature(P);
    CHECK(S.tBase == -2);
    CHECK(S.traces6 == std::array<i64, 6>{-6, -6, -6, -6, 6, 6});
    CHECK(S.traces3a == std::array<i64, 3>{-2, 2, 2});
    CHECK(S.traces3b == std::array<i64, 3>{-2, -2, -2});
    CHECK(S.traces3c == std::array<i64, 3>{-2, 2, 2});
    // bulk-table path agrees
    auto T = build_trace_table(K);
    CHECK(trace_signature(P, &T) == S);
    // nonsquare twist flips tBase
    D6Params Pn = make_params_unchecked(K, 2, 1);
    CHECK(trace_signature(Pn, &T).tBase == 2);
}

TEST_CASE("table path equals BSGS path on many parameters") {
    for (u64 p : {53ull, 149ull}) {
        PrimeField K(p);
        auto T = build_trace_table(K);
        auto bad = u_bad_set(p);
        for (u64 u = 2; u < p; ++u) {
            if (std::binary_search(bad.begin(), bad.end(), u)) continue;
            for (int cb : {0, 1}) {
                std::optional<D6Params> P;
                try {
                    P = make_params(K, u, cb);
                } catch (const BadParameter&) {
                    continue;
                }
                CHECK(trace_signature(*P, &T) == trace_signature(*P));
            }
        }
    }
}

TEST_CASE("signature invariant on the canonical-class members") {
    PrimeField K(149);
    auto T = build_trace_table(K);
    auto bad = u_bad_set(149);
    int n = 0;
    for (u64 u = 2; u < 149 && n < 10; ++u) {
        if (std::binary_search(bad.begin(), bad.end(), u)) continue;
        std::optional<D6Params> P;
        try {
            P = make_params(K, u, 0);
        } catch (const BadParameter&) {
            continue;
        }
        auto key = trace_signature(*P, &T).flattened();
        for (auto [v, cb] : equivalence_orbit(K, u, 0)) {
            D6Params Q = make_params_unchecked(K, v, cb);
            CHECK(trace_signature(Q, &T).flattened() == key);
        }
        ++n;
    }
}

TEST_CASE("sextic model count matches 2 tBase") {
    // #C(F_p) = p + 1 - 2 tBase on c y^2 = sextic
    for (u64 p : {17ull, 53ull, 101ull}) {
        PrimeField K(p);
        auto T = build_trace_table(K);
        auto bad = u_excluded_set(p);
        int n = 0;
        for (u64 u = 2; u < p && n < 15; ++u) {
            if (std::binary_search(bad.begin(), bad.end(), u)) continue;
            for (int cb : {0, 1}) {
                D6Params P = make_params_unchecked(K, u, cb);
                i64 tb = trace_signature(P, &T).tBase;
                // count c y^2 = x^6 + (r-18)x^4 + (81-2r)x^2 + r
                i64 cnt = 0;
                for (u64 x = 0; x < p; ++x) {
                    u64 x2 = K.mul(x, x);
                    u64 f = K.add(K.mul(K.add(K.mul(K.add(x2, K.sub(P.r, 18)), x2),
                                              K.sub(81 % p, K.mul(2, P.r))), x2), P.r);
                    int ch = K.legendre(K.mul(f, P.c_rep));
                    cnt += f == 0 ? 1 : 1 + ch;
                }
                cnt += 1 + K.legendre(P.c_rep);  // two points at infinity iff c square
                CHECK(cnt == (i64)p + 1 - 2 * tb);
            }
            ++n;
        }
    }
}

TEST_CASE("prym quartic oracle matches the table traces") {
    // chi(e) T(lambda) = trace of the quartic model c d y^2 = prod (x - u_k)
    // with d the split-normalized cover constant
    int done = 0;
    for (u64 p : {17ull, 29ull, 53ull, 101ull, 197ull}) {
        PrimeField K(p);
        auto T = build_trace_table(K);
        auto bad = u_excluded_set(p);
        int n = 0;
        for (u64 u = 2; u < p && n < 8; ++u) {
            if (std::binary_search(bad.begin(), bad.end(), u)) continue;
            for (int cb : {0, 1}) {
                D6Params P = make_params_unchecked(K, u, cb);
                for (const auto& oe : orbit_prym_curves(P)) {
                    i64 expect = K.legendre(oe.e) * (i64)T[oe.lambda];
                    u64 d = cover_d_class(P, oe.i, oe.j);
                    CHECK(prym_quartic_trace(P, oe.i, oe.j, d) == expect);
                    ++done;
                }
            }
            ++n;
        }
    }
    CHECK(done >= 50 * 15);
}
