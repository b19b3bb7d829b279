#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "d6lab/survey.hpp"

using namespace d6lab;

TEST_CASE("prime windows around 2^n") {
    CHECK_THROWS_AS(primes_near(3, 1), BadParameter);
    CHECK_THROWS_AS(primes_near(12, 0), BadParameter);
    // 4093 and 4099 are both at distance 3; the tie goes to the smaller
    CHECK(primes_near(12, 1).primes == std::vector<u64>{4093});
    CHECK(primes_near(12, 2).primes == std::vector<u64>{4093, 4099});
    // third-closest is 4091 at distance 5 (4111 is at distance 15)
    CHECK(primes_near(12, 3).primes == std::vector<u64>{4091, 4093, 4099});
    PrimeWindow w = primes_near(12, 1024);
    CHECK(w.primes.size() == 1024);
    CHECK(std::is_sorted(w.primes.begin(), w.primes.end()));
    CHECK(w.primes.front() > 3);
    for (u64 p : w.primes) CHECK(is_prime_u64(p));
    // small primes enter the window once the radius exceeds 2^12
    CHECK(w.primes.front() == 7);
    CHECK(w.primes.back() == 8179);
}

TEST_CASE("bulk trace table: bounds, cross-engine check, lambda-line symmetry") {
    // guard for the memory bound
    u64 big = (1ull << 22) + 1;
    while (!is_prime_u64(big)) ++big;
    CHECK_THROWS_AS(build_trace_table(PrimeField(big)), ResourceLimit);

    PrimeField K(4093);
    auto T = build_trace_table(K);
    REQUIRE(T.size() == 4093);
    for (u64 lam = 2; lam < 4093; ++lam) CHECK((i64)T[lam] * T[lam] <= 4 * 4093);
    u64 s = 12345;
    ExtField F(K, 1);
    for (int i = 0; i < 100; ++i) {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        u64 lam = 2 + (s >> 33) % (4093 - 2);
        CHECK((i64)T[lam] == legendre_lambda_trace(K, lam));
        // the lambda-line 6-symmetry: same j-invariant, same |trace|
        u64 inv = K.inv(lam), om = K.sub(1, lam);
        u64 orbit[6] = {lam,        om,
                        inv,        K.inv(om),
                        K.mul(lam, K.inv(K.sub(lam, 1))), K.mul(K.sub(lam, 1), inv)};
        FqElem j0 = j_invariant(make_legendre(F, F.one(), F.embed(lam)));
        for (u64 mu : orbit) {
            if (mu == 0 || mu == 1) continue;  // excluded by the orbit structure anyway
            CHECK(j_invariant(make_legendre(F, F.one(), F.embed(mu))) == j0);
            CHECK(std::abs((int)T[mu]) == std::abs((int)T[lam]));
        }
    }
}

TEST_CASE("class enumeration and the class-count identity") {
    // primes whose whole unit group is excluded give no classes
    CHECK(enumerate_classes(PrimeField(11)).empty());
    CHECK(enumerate_classes(PrimeField(13)).empty());

    for (u64 p : {53ull, 101ull, 149ull}) {
        PrimeField K(p);
        auto T = build_trace_table(K);
        auto cls = enumerate_classes(K, &T);
        if (p == 53) CHECK(cls.size() == 8);
        if (p == 101) CHECK(cls.size() == 16);
        u64 covered = 0;
        std::set<CurveClass> seen;
        for (const auto& c : cls) {
            CHECK(seen.insert(c.cls).second);  // classes distinct
            covered += equivalence_orbit(K, c.cls.u, c.cls.cbit).size();
            // signature recomputed from a non-canonical orbit member agrees
            auto orb = equivalence_orbit(K, c.cls.u, c.cls.cbit);
            auto [v, cb] = orb.back();
            CHECK(trace_signature(make_params(K, v, cb), &T).flattened() == c.sig.flattened());
        }
        CHECK(covered == 2 * (p - 1 - u_excluded_set(p).size()));
    }
}

TEST_CASE("pair detection, twist classification, and no false merges") {
    {
        PrimeField K(53);
        auto T = build_trace_table(K);
        auto cls = enumerate_classes(K, &T);
        auto prs = find_pairs(K, cls);
        REQUIRE(prs.size() == 1);
        CHECK(prs[0].a.u == 2);
        CHECK(prs[0].a.cbit == 0);
        CHECK(prs[0].b.u == 4);
        CHECK(prs[0].b.cbit == 1);
        CHECK_FALSE(prs[0].isTwist);

        // perturbing one trace breaks the membership
        auto broken = cls;
        for (auto& c : broken)
            if (c.cls.u == 2 && c.cls.cbit == 0) c.sig.traces6[0] += 2;
        CHECK(find_pairs(K, broken).empty());
    }
    {
        PrimeField K(1019);
        auto T = build_trace_table(K);
        auto cls = enumerate_classes(K, &T);
        auto prs = find_pairs(K, cls);
        REQUIRE(prs.size() == 2);
        for (const auto& r : prs) {
            CHECK(r.isTwist);
            CHECK(!(r.a == r.b));
            CHECK(r.a.coarse == r.b.coarse);
            CHECK(r.easyTwistTheorem);
            // twist <=> same u-orbit with flipped c-class, cross-checked
            auto orb = equivalence_orbit(K, r.a.u, r.a.cbit ^ 1);
            CHECK(std::count(orb.begin(), orb.end(), std::pair<u64, int>{r.b.u, r.b.cbit}) == 1);
        }
        CHECK(prs[0].a.u == 13);
        CHECK(prs[1].a.u == 35);
    }
}

TEST_CASE("refinements fill lazily and discriminate") {
    PrimeField K(1019);
    auto T = build_trace_table(K);
        auto cls = enumerate_classes(K, &T);
    auto prs = find_pairs(K, cls);
    REQUIRE(prs.size() == 2);
    RefineCache cache;
    for (auto& r : prs) {
        CHECK(!r.special3.has_value());
        refine_pair(K, r, kRefineSpecial3 | kRefineMult3 | kRefineFour, &cache);
        REQUIRE(r.special3.has_value());
        REQUIRE(r.mult3.has_value());
        REQUIRE(r.four.has_value());
        // frozen: these two twist pairs agree under mult-by-4 but not the
        // triple-cover refinements
        CHECK(*r.four);
        CHECK_FALSE(*r.special3);
        CHECK_FALSE(*r.mult3);
    }
    CHECK(cache.four.size() == 4);
    // partial mask leaves the others unset
    auto prs2 = find_pairs(K, cls);
    refine_pair(K, prs2[0], kRefineSpecial3);
    CHECK(prs2[0].special3.has_value());
    CHECK_FALSE(prs2[0].mult3.has_value());
    CHECK_FALSE(prs2[0].four.has_value());
}

TEST_CASE("supersingular-twist predicate and the quartic-root construction") {
    CHECK_THROWS_AS(easytwist_predicate(PrimeField(101), 2), BadParameter);  // p = 1 mod 4
    CHECK_THROWS_AS(easytwist_predicate(PrimeField(59), 1), BadParameter);   // u bad

    // p = 11 or 59 mod 120: every valid root of u^4 - 9u^2 + 9 qualifies,
    // and the curve is doubly isogenous to its quadratic twist
    struct Case {
        u64 p;
        std::vector<u64> roots;
    };
    for (const Case& cs : {Case{59, {9, 20, 39, 50}}, Case{131, {25, 63, 68, 106}},
                           Case{179, {7, 26, 153, 172}}, Case{251, {68, 107, 144, 183}}}) {
        PrimeField K(cs.p);
        ExtField F(K, 1);
        auto roots = poly_roots(poly_from_u64(F, {9, 0, cs.p - 9, 0, 1}));
        REQUIRE(roots.size() == cs.roots.size());
        for (size_t i = 0; i < roots.size(); ++i) CHECK(roots[i].c[0] == cs.roots[i]);
        auto T = build_trace_table(K);
        for (u64 u : cs.roots) {
            CHECK(easytwist_predicate(K, u));
            TraceSignature s0 = trace_signature(make_params(K, u, 0), &T);
            TraceSignature s1 = trace_signature(make_params(K, u, 1), &T);
            CHECK(s0.flattened() == s1.flattened());
            // the first lambda's j-invariant lies on the discriminant -60
            // Hilbert class polynomial
            u64 um1 = K.sub(u, 1), up1 = K.add(u, 1);
            u64 lam = K.mul(K.mul(K.mul(K.mul(um1, um1), um1), K.add(u, 3)),
                            K.inv(K.mul(K.mul(K.mul(up1, up1), up1), K.sub(u, 3))));
            u64 j = j_invariant(make_legendre(F, F.one(), F.embed(lam))).c[0];
            u64 b = (cs.p - 37018076625ull % cs.p) % cs.p;
            u64 h = K.add(K.mul(j, j), K.add(K.mul(b, j), 153173312762625ull % cs.p));
            CHECK(h == 0);
        }
    }
}

TEST_CASE("split-field criterion and the extraordinary flag") {
    // two criteria for splitting completely: three small polynomials vs the
    // single degree-12 polynomial
    for (u64 p = 5; p < 10000; ++p) {
        if (!is_prime_u64(p)) continue;
        PrimeField K(p);
        ExtField F(K, 1);
        auto m = [&](i64 v) { return (u64)(((v % (i64)p) + (i64)p) % (i64)p); };
        auto roots = poly_roots(
            poly_from_u64(F, {1, 0, m(5), 0, m(-6), 0, m(29), 0, m(-6), 0, m(5), 0, 1}));
        bool deg12 = roots.size() == 12;
        for (size_t i = 1; i < roots.size() && deg12; ++i)
            if (roots[i] == roots[i - 1]) deg12 = false;
        CHECK(split_completely_in_L(p) == deg12);
    }
    // frozen prefix of the split primes (density ~ 1/12)
    std::vector<u64> first;
    for (u64 p = 5; first.size() < 6; ++p)
        if (is_prime_u64(p) && split_completely_in_L(p)) first.push_back(p);
    CHECK(first == std::vector<u64>{173, 197, 277, 353, 457, 557});

    // at every split prime, the x^2 - 27x + 1 classes give a doubly
    // isogenous nontwist pair, flagged, with matching special-triple Pryms
    for (u64 p : first) {
        PrimeField K(p);
        auto T = build_trace_table(K);
        auto cls = enumerate_classes(K, &T);
        auto prs = find_pairs(K, cls);
        ExtField F(K, 1);
        auto rr = poly_roots(poly_from_u64(F, {1, p - 27, 1}));
        REQUIRE(rr.size() == 2);
        // not every flagged pair has matching special Pryms (the wrong twist
        // combination is still doubly isogenous), but at least one must
        bool found = false;
        for (auto& r : prs) {
            if (!r.extraordinary) continue;
            CHECK_FALSE(r.isTwist);
            refine_pair(K, r, kRefineSpecial3);
            if (*r.special3) found = true;
            std::set<u64> rs{r_from_u(K, r.a.u), r_from_u(K, r.b.u)};
            // each class carries one of the two roots, up to r <-> 729/r
            for (u64 x : rs)
                CHECK((x == rr[0].c[0] || x == rr[1].c[0] ||
                       K.mul(729 % p, K.inv(x)) == rr[0].c[0] ||
                       K.mul(729 % p, K.inv(x)) == rr[1].c[0]));
        }
        CHECK(found);
    }
    // inert prime: flag never set
    PrimeField K101(101);
    auto T101 = build_trace_table(K101);
    auto cls = enumerate_classes(K101, &T101);
    ExtField F101(K101, 1);
    if (poly_roots(poly_from_u64(F101, {1, 101 - 27, 1})).empty())
        for (const auto& r : find_pairs(K101, cls)) CHECK_FALSE(r.extraordinary);
}

TEST_CASE("survey report: determinism, schemas, aggregates") {
    PrimeWindow w = primes_near(10, 12);
    SurveyOptions opt;
    opt.refineMask = kRefineSpecial3 | kRefineMult3 | kRefineFour;
    opt.jobs = 1;
    SurveyReport r1 = run_survey(w, opt);
    opt.jobs = 4;
    SurveyReport r4 = run_survey(w, opt);
    setenv("D6LAB_THREADS", "3", 1);
    SurveyReport r3 = run_survey(w, SurveyOptions{opt.refineMask, 1});
    unsetenv("D6LAB_THREADS");
    CHECK(perprime_csv(r1) == perprime_csv(r4));
    CHECK(perprime_csv(r1) == perprime_csv(r3));
    CHECK(aggregate_csv(r1) == aggregate_csv(r4));
    CHECK(pairs_json(r1) == pairs_json(r4));

    std::string csv = perprime_csv(r1);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "p,classes,twist_pairs,nontwist_pairs,twist_3a,twist_3b,twist_4,"
          "nontwist_3a,nontwist_3b,nontwist_4,easytwist_yes,easytwist_no,"
          "extraordinary_yes,extraordinary_no");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);  // header + 12 rows
    CHECK(csv.find('\r') == std::string::npos);

    PrimeRow agg = r1.aggregate();
    u64 cls = 0, tw = 0, ntw = 0;
    for (const auto& row : r1.rows) {
        cls += row.classes;
        tw += row.twist_pairs;
        ntw += row.nontwist_pairs;
    }
    CHECK(agg.classes == cls);
    CHECK(agg.twist_pairs == tw);
    CHECK(agg.nontwist_pairs == ntw);
    CHECK(agg.twist_pairs + agg.nontwist_pairs == r1.pairs.size());
    CHECK(agg.easytwist_yes + agg.easytwist_no == agg.twist_pairs);
    CHECK(agg.extraordinary_yes + agg.extraordinary_no == agg.nontwist_pairs);

    // pair dump fields
    std::string js = pairs_json(r1);
    if (!r1.pairs.empty())
        for (const char* key : {"\"p\"", "\"u1\"", "\"c1\"", "\"u2\"", "\"c2\"", "\"isTwist\"",
                                "\"special3\"", "\"mult3\"", "\"four\"", "\"easyTwistTheorem\"",
                                "\"extraordinary\""})
            CHECK(js.find(key) != std::string::npos);

    // emitted files round-trip byte-identically
    std::string dir = "/tmp/d6lab_report_test";
    emit_report(r1, dir);
    auto slurp = [&](const char* name) {
        FILE* f = fopen((dir + "/" + name).c_str(), "rb");
        REQUIRE(f);
        std::string s;
        char buf[4096];
        size_t n;
        while ((n = fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, n);
        fclose(f);
        return s;
    };
    CHECK(slurp("perprime.csv") == perprime_csv(r1));
    CHECK(slurp("aggregate.csv") == aggregate_csv(r1));
    CHECK(slurp("pairs.json") == pairs_json(r1));
}

TEST_CASE("decay diagnostic plumbing on small windows") {
    SurveyOptions opt;
    auto pts = decay_diagnostic(8, 10, 16, opt);
    REQUIRE(pts.size() == 3);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].n == 8 + (int)i);
        CHECK(pts[i].weight_sum > 0.0);
    }
    // heavier windows carry smaller q^{-1/2} weight per prime
    CHECK(pts[0].weight_sum > pts[2].weight_sum);
}
