#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "d6lab/quadcover.hpp"

using namespace d6lab;

TEST_CASE("branched quartic trace agrees with the direct quartic count") {
    PrimeField K(53);
    ExtField F(K, 1);
    // e v^2 = (z-2)(z-5)(z-11)(z-30) and assorted twists
    std::array<FqElem, 4> rho{F.embed(2), F.embed(5), F.embed(11), F.embed(30)};
    for (u64 e : {1ull, 2ull, 7ull}) {
        i64 t = branched_quartic_trace(F, F.embed(e), rho);
        // expand inv(e) * prod(z - rho_k)
        std::array<FqElem, 5> q{};
        q[0] = F.embed(K.inv(e));
        int deg = 0;
        for (auto& r : rho) {
            std::array<FqElem, 5> nq{};
            for (int d = 0; d <= deg; ++d) {
                nq[d + 1] = F.add(nq[d + 1], q[d]);
                nq[d] = F.sub(nq[d], F.mul(q[d], r));
            }
            q = nq;
            ++deg;
        }
        CHECK(t == (i64)(53 + 1) - (i64)genus1_quartic_count(F, q));
    }
}

TEST_CASE("descriptor enumeration shape at (u=2, c=1, p=13)") {
    PrimeField K(13);
    D6Params P = make_params_unchecked(K, 2, 0);
    auto ds = enumerate_four_covers(P);
    REQUIRE(ds.size() == 120);
    int nrat = 0;
    for (auto& d : ds) {
        if (d.rational) ++nrat;
        CHECK(d.sign[0] == 1);
        // branch values distinct and nonzero
        for (int a = 0; a < 4; ++a) {
            CHECK(d.alpha[a] != 0);
            for (int b = a + 1; b < 4; ++b) CHECK(d.alpha[a] != d.alpha[b]);
        }
    }
    CHECK(nrat == 24);  // frozen pre-build
    // each two-torsion pair appears exactly 8 times
    for (int i = 1; i <= 6; ++i)
        for (int j = i + 1; j <= 6; ++j)
            CHECK(std::count_if(ds.begin(), ds.end(), [&](const FourCoverDescriptor& d) {
                      return d.i == i && d.j == j;
                  }) == 8);
}

TEST_CASE("halfway prym matches the double-cover table trace") {
    // the D1-level prym c1 w^2 = prod(x - alpha_k) is the same curve as the
    // {i,j} entry of the double-cover table
    for (u64 p : {53ull, 149ull}) {
        PrimeField K(p);
        ExtField F(K, 1);
        auto T = build_trace_table(K);
        auto excl = u_excluded_set(p);
        int n = 0;
        for (u64 u = 2; u < p && n < 4; ++u) {
            if (std::binary_search(excl.begin(), excl.end(), u)) continue;
            D6Params P = make_params_unchecked(K, u, (int)(u % 2));
            auto entries = orbit_prym_curves(P);
            for (const auto& d : enumerate_four_covers(P)) {
                if (d.sign != std::array<int, 4>{1, 1, 1, 1}) continue;
                std::array<FqElem, 4> al;
                for (int k = 0; k < 4; ++k) al[k] = F.embed(d.alpha[k]);
                i64 tD1 = branched_quartic_trace(F, F.embed(d.c1), al);
                for (const auto& oe : entries)
                    if (oe.i == d.i && oe.j == d.j)
                        CHECK(tD1 == K.legendre(oe.e) * (i64)T[oe.lambda]);
            }
            ++n;
        }
        CHECK(n == 4);
    }
}

TEST_CASE("aggregate weil golden at (u=2, c=1, p=13)") {
    PrimeField K(13);
    D6Params P = make_params_unchecked(K, 2, 0);
    WeilPolynomial W = four_prym_weil(P);
    CHECK(W.degree() == 480);
    int e1 = 0, e2 = 0;
    for (auto& f : W.factors) (f.e == 1 ? e1 : e2)++;
    CHECK(e1 == 48);   // 24 rational descriptors, two factors each
    CHECK(e2 == 96);   // 96 conjugate-pair descriptors, one factor each
    // power sums frozen from the pre-build oracle-certified run
    CHECK((long long)W.power_sum(1) == -96);
    CHECK((long long)W.power_sum(2) == -160);
    CHECK((long long)W.power_sum(3) == 288);
    CHECK((long long)W.power_sum(4) == -20256);
}

TEST_CASE("aggregate invariance under construction choices") {
    PrimeField K(53);
    auto excl = u_excluded_set(53);
    u64 u = 2;
    while (std::binary_search(excl.begin(), excl.end(), u)) ++u;
    D6Params P = make_params(K, u, 0);
    WeilPolynomial ref = four_prym_weil(P);
    // Mobius swap and sqrt-convention flip
    ExtField F1(K, 1), F2(K, 2);
    for (int perturb : {1, 2, 3}) {
        WeilPolynomial W;
        for (const auto& d : enumerate_four_covers(P, perturb))
            for (const auto& f : four_cover_factors(P, d)) W.add(f);
        CHECK(W == ref);
    }
    // orbit-representative invariance
    for (auto [v, cb] : equivalence_orbit(K, u, 0)) {
        D6Params Q = make_params_unchecked(K, v, cb);
        CHECK(four_prym_weil(Q) == ref);
    }
}

TEST_CASE("distinct geometric factors bounded by the orbit count") {
    PrimeField K13(13);
    CHECK(four_cover_distinct_j(make_params_unchecked(K13, 2, 0)) == 7);
    PrimeField K(4093);
    CHECK(four_cover_distinct_j(make_params(K, 10, 1)) == 26);  // generic value
    PrimeField K2(1009);
    int dj = four_cover_distinct_j(make_params(K2, 5, 0));
    CHECK(dj <= 26);
}

TEST_CASE("d2 direct count oracle samples") {
    // >= 10 sampled descriptors across p in {13, 17, 19}
    int done = 0;
    for (u64 p : {13ull, 17ull, 19ull}) {
        PrimeField K(p);
        u64 u = p == 19 ? 5 : 2;
        D6Params P = make_params_unchecked(K, u, p == 17 ? 1 : 0);
        auto ds = enumerate_four_covers(P);
        for (size_t t = 0; t < ds.size(); t += 29) {
            CHECK(d2_direct_count_oracle(P, ds[t], 2));
            ++done;
        }
    }
    CHECK(done >= 10);
    // deeper extensions at the golden point, rational and non-rational
    PrimeField K(13);
    D6Params P = make_params_unchecked(K, 2, 0);
    auto ds = enumerate_four_covers(P);
    int deep = 0;
    for (auto& d : ds) {
        if (d.rational && deep < 2) {
            CHECK(d2_direct_count_oracle(P, d, 5));
            ++deep;
        }
    }
    CHECK(deep == 2);
    PrimeField Kbig(29);
    CHECK_THROWS_AS(
        d2_direct_count_oracle(make_params_unchecked(Kbig, 2, 0),
                               enumerate_four_covers(make_params_unchecked(Kbig, 2, 0))[0], 1),
        BadParameter);
}
