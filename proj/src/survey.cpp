#include "d6lab/survey.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

namespace d6lab {

PrimeWindow primes_near(int n, int count) {
    if (n < 4 || count < 1) throw BadParameter("primes_near: need n >= 4, count >= 1");
    u64 center = 1ull << n;
    std::vector<u64> primes;
    for (u64 d = 0; (int)primes.size() < count; ++d) {
        if (d > 0 && d < center - 3 && is_prime_u64(center - d)) primes.push_back(center - d);
        if ((int)primes.size() < count && is_prime_u64(center + d)) primes.push_back(center + d);
    }
    std::sort(primes.begin(), primes.end());
    return PrimeWindow{n, count, std::move(primes)};
}

std::vector<ClassRecord> enumerate_classes(const PrimeField& K,
                                           const std::vector<std::int16_t>* table) {
    u64 p = K.p();
    auto excl = u_excluded_set(p);
    std::vector<ClassRecord> out;
    u64 covered = 0;
    for (u64 u = 1; u < p; ++u) {
        if (std::binary_search(excl.begin(), excl.end(), u)) continue;
        for (int cbit = 0; cbit < 2; ++cbit) {
            CurveClass c = canonical_class(K, u, cbit);
            if (c.u != u || c.cbit != cbit) continue;  // not the orbit representative
            D6Params P = make_params(K, u, cbit);
            out.push_back(ClassRecord{c, trace_signature(P, table)});
            covered += equivalence_orbit(K, u, cbit).size();
        }
    }
    if (covered != 2 * (p - 1 - excl.size()))
        throw InternalInconsistency("enumerate_classes: orbit sizes do not cover the parameter set");
    std::sort(out.begin(), out.end(),
              [](const ClassRecord& a, const ClassRecord& b) { return a.cls < b.cls; });
    return out;
}

std::vector<PairRecord> find_pairs(const PrimeField& K, const std::vector<ClassRecord>& classes) {
    std::map<std::array<i64, 16>, std::vector<size_t>> groups;
    for (size_t i = 0; i < classes.size(); ++i)
        groups[classes[i].sig.flattened()].push_back(i);
    std::vector<PairRecord> out;
    for (const auto& [sig, members] : groups)
        for (size_t i = 0; i < members.size(); ++i)
            for (size_t j = i + 1; j < members.size(); ++j) {
                PairRecord r;
                r.p = K.p();
                r.a = classes[members[i]].cls;
                r.b = classes[members[j]].cls;
                r.isTwist = (r.a.coarse == r.b.coarse);
                if (r.isTwist)
                    r.easyTwistTheorem = easytwist_flag(K, r);
                else
                    r.extraordinary = extraordinary_detect(K, r);
                out.push_back(std::move(r));
            }
    std::sort(out.begin(), out.end(), [](const PairRecord& x, const PairRecord& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

void refine_pair(const PrimeField& K, PairRecord& rec, int mask, RefineCache* cache) {
    RefineCache local;
    RefineCache& C = cache ? *cache : local;
    auto key = [](const CurveClass& c) { return std::pair<u64, int>(c.u, c.cbit); };
    auto params = [&](const CurveClass& c) { return make_params(K, c.u, c.cbit); };
    if (mask & kRefineSpecial3) {
        auto get = [&](const CurveClass& c) -> const std::array<i64, 4>& {
            auto it = C.special3.find(key(c));
            if (it == C.special3.end())
                it = C.special3.emplace(key(c), special_prym(params(c)).key()).first;
            return it->second;
        };
        rec.special3 = (get(rec.a) == get(rec.b));
    }
    if (mask & kRefineMult3) {
        auto get = [&](const CurveClass& c) -> const Mult3Signature& {
            auto it = C.mult3.find(key(c));
            if (it == C.mult3.end()) it = C.mult3.emplace(key(c), mult3_signature(params(c))).first;
            return it->second;
        };
        rec.mult3 = get(rec.a).matches(get(rec.b));
    }
    if (mask & kRefineFour) {
        auto get = [&](const CurveClass& c) -> const WeilPolynomial& {
            auto it = C.four.find(key(c));
            if (it == C.four.end()) it = C.four.emplace(key(c), four_prym_weil(params(c))).first;
            return it->second;
        };
        rec.four = weil_product_equal(get(rec.a), get(rec.b));
    }
}

bool easytwist_predicate(const PrimeField& K, u64 u) {
    u64 p = K.p();
    if (p % 4 != 3) throw BadParameter("easytwist_predicate: requires p = 3 mod 4");
    auto bad = u_bad_set(p);
    if (u == 0 || u >= p || std::binary_search(bad.begin(), bad.end(), u))
        throw BadParameter("easytwist_predicate: u invalid");
    u64 um1 = K.sub(u, 1), up1 = K.add(u, 1), um3 = K.sub(u, 3 % p), up3 = K.add(u, 3 % p);
    if (K.legendre(K.mul(K.mul(u, um1), up3)) != -1) return false;
    if (K.legendre(K.sub(0, K.mul(K.mul(u, up1), um3))) != -1) return false;
    u64 lam1 = K.mul(K.mul(K.mul(K.mul(um1, um1), um1), up3),
                     K.inv(K.mul(K.mul(K.mul(up1, up1), up1), um3)));
    u64 lam2 = K.mul(K.mul(4 % p, u), K.inv(K.mul(um1, up3)));
    return legendre_lambda_trace(K, lam1) == 0 && legendre_lambda_trace(K, lam2) == 0;
}

bool easytwist_flag(const PrimeField& K, const PairRecord& rec) {
    if (!rec.isTwist || K.p() % 4 != 3) return false;
    std::set<u64> us;
    for (auto [v, cb] : equivalence_orbit(K, rec.a.u, rec.a.cbit)) {
        (void)cb;
        us.insert(v);
    }
    for (u64 v : us)
        if (easytwist_predicate(K, v)) return true;
    return false;
}

bool extraordinary_detect(const PrimeField& K, const PairRecord& rec) {
    if (rec.isTwist) return false;
    u64 p = K.p();
    ExtField F(K, 1);
    auto roots = poly_roots(poly_from_u64(F, {1, p - 27 % p, 1}));
    if (roots.size() != 2 || roots[0] == roots[1]) return false;
    u64 r1 = roots[0].c[0], r2 = roots[1].c[0];
    auto rset = [&](const CurveClass& c) {
        u64 r = r_from_u(K, c.u);
        return std::pair<u64, u64>(r, K.mul(729 % p, K.inv(r)));
    };
    auto [a1, a2] = rset(rec.a);
    auto [b1, b2] = rset(rec.b);
    auto in = [](u64 x, u64 s, u64 t) { return x == s || x == t; };
    return (in(r1, a1, a2) && in(r2, b1, b2)) || (in(r2, a1, a2) && in(r1, b1, b2));
}

bool split_completely_in_L(u64 p) {
    if (p <= 3) throw BadParameter("split_completely_in_L: requires p > 3");
    PrimeField K(p);
    ExtField F(K, 1);
    auto splits = [&](std::vector<u64> coeffs, size_t deg) {
        auto roots = poly_roots(poly_from_u64(F, std::move(coeffs)));
        if (roots.size() != deg) return false;
        for (size_t i = 1; i < roots.size(); ++i)
            if (roots[i] == roots[i - 1]) return false;
        return true;
    };
    u64 m29 = (p - 29 % p) % p;
    return splits({m29, 0, 1}, 2) && splits({1, 0, 1}, 2) && splits({2 % p, 0, 1, 1}, 3);
}

PrimeRow& PrimeRow::operator+=(const PrimeRow& o) {
    classes += o.classes;
    twist_pairs += o.twist_pairs;
    nontwist_pairs += o.nontwist_pairs;
    twist_3a += o.twist_3a;
    twist_3b += o.twist_3b;
    twist_4 += o.twist_4;
    nontwist_3a += o.nontwist_3a;
    nontwist_3b += o.nontwist_3b;
    nontwist_4 += o.nontwist_4;
    easytwist_yes += o.easytwist_yes;
    easytwist_no += o.easytwist_no;
    extraordinary_yes += o.extraordinary_yes;
    extraordinary_no += o.extraordinary_no;
    heuristic_weight += o.heuristic_weight;
    return *this;
}

PrimeRow SurveyReport::aggregate() const {
    PrimeRow a;
    for (const auto& r : rows) a += r;
    return a;
}

namespace {

struct PrimeResult {
    PrimeRow row;
    std::vector<PairRecord> pairs;
};

PrimeResult survey_one_prime(u64 p, int refineMask) {
    PrimeField K(p);
    auto T = build_trace_table(K);
    auto classes = enumerate_classes(K, &T);
    auto pairs = find_pairs(K, classes);
    RefineCache cache;
    PrimeResult res;
    res.row.p = p;
    res.row.classes = classes.size();
    res.row.heuristic_weight = 1.0 / std::sqrt((double)p);
    for (auto& r : pairs) {
        refine_pair(K, r, refineMask, &cache);
        if (r.isTwist) {
            ++res.row.twist_pairs;
            if (r.special3.value_or(false)) ++res.row.twist_3a;
            if (r.mult3.value_or(false)) ++res.row.twist_3b;
            if (r.four.value_or(false)) ++res.row.twist_4;
            ++(r.easyTwistTheorem ? res.row.easytwist_yes : res.row.easytwist_no);
        } else {
            ++res.row.nontwist_pairs;
            if (r.special3.value_or(false)) ++res.row.nontwist_3a;
            if (r.mult3.value_or(false)) ++res.row.nontwist_3b;
            if (r.four.value_or(false)) ++res.row.nontwist_4;
            ++(r.extraordinary ? res.row.extraordinary_yes : res.row.extraordinary_no);
        }
    }
    res.pairs = std::move(pairs);
    return res;
}

}  // namespace

SurveyReport run_survey(const PrimeWindow& w, const SurveyOptions& opt) {
    int jobs = opt.jobs > 0 ? opt.jobs : 1;
    if (const char* env = std::getenv("D6LAB_THREADS")) {
        int j = std::atoi(env);
        if (j > 0) jobs = j;
    }
    jobs = std::max(1, std::min<int>(jobs, (int)w.primes.size()));

    std::vector<PrimeResult> slots(w.primes.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i; (i = next.fetch_add(1)) < w.primes.size();)
            slots[i] = survey_one_prime(w.primes[i], opt.refineMask);
    };
    if (jobs == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    SurveyReport rep;
    rep.window = w;
    rep.refineMask = opt.refineMask;
    for (auto& s : slots) {
        rep.rows.push_back(s.row);
        for (auto& pr : s.pairs) rep.pairs.push_back(std::move(pr));
    }
    return rep;
}

std::string perprime_csv(const SurveyReport& rep) {
    std::string s =
        "p,classes,twist_pairs,nontwist_pairs,twist_3a,twist_3b,twist_4,"
        "nontwist_3a,nontwist_3b,nontwist_4,easytwist_yes,easytwist_no,"
        "extraordinary_yes,extraordinary_no\n";
    for (const auto& r : rep.rows) {
        u64 cols[] = {r.p,          r.classes,     r.twist_pairs,      r.nontwist_pairs,
                      r.twist_3a,   r.twist_3b,    r.twist_4,          r.nontwist_3a,
                      r.nontwist_3b, r.nontwist_4, r.easytwist_yes,    r.easytwist_no,
                      r.extraordinary_yes, r.extraordinary_no};
        for (int i = 0; i < 14; ++i) s += std::to_string(cols[i]) + (i == 13 ? "\n" : ",");
    }
    return s;
}

std::string aggregate_csv(const SurveyReport& rep) {
    PrimeRow a = rep.aggregate();
    std::string s =
        "n,count,classes,twist_pairs,nontwist_pairs,twist_3a,twist_3b,twist_4,"
        "nontwist_3a,nontwist_3b,nontwist_4,easytwist_yes,easytwist_no,"
        "extraordinary_yes,extraordinary_no,heuristic_weight_sum\n";
    u64 cols[] = {(u64)rep.window.n, (u64)rep.window.count,
                  a.classes,      a.twist_pairs, a.nontwist_pairs, a.twist_3a,
                  a.twist_3b,     a.twist_4,     a.nontwist_3a,    a.nontwist_3b,
                  a.nontwist_4,   a.easytwist_yes, a.easytwist_no, a.extraordinary_yes,
                  a.extraordinary_no};
    for (u64 c : cols) s += std::to_string(c) + ",";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", a.heuristic_weight);
    s += buf;
    s += "\n";
    return s;
}

std::string pairs_json(const SurveyReport& rep) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rep.pairs) {
        nlohmann::ordered_json o;
        o["p"] = r.p;
        o["u1"] = r.a.u;
        o["c1"] = r.a.cbit ? "ns" : "1";
        o["u2"] = r.b.u;
        o["c2"] = r.b.cbit ? "ns" : "1";
        o["isTwist"] = r.isTwist;
        o["special3"] = r.special3 ? nlohmann::ordered_json(*r.special3) : nullptr;
        o["mult3"] = r.mult3 ? nlohmann::ordered_json(*r.mult3) : nullptr;
        o["four"] = r.four ? nlohmann::ordered_json(*r.four) : nullptr;
        o["easyTwistTheorem"] = r.easyTwistTheorem;
        o["extraordinary"] = r.extraordinary;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

void emit_report(const SurveyReport& rep, const std::string& outDir) {
    std::filesystem::create_directories(outDir);
    auto writeFile = [&](const char* name, const std::string& body) {
        std::ofstream f(std::filesystem::path(outDir) / name, std::ios::binary);
        if (!f) throw std::runtime_error(std::string("emit_report: cannot open ") + name);
        f << body;
    };
    writeFile("perprime.csv", perprime_csv(rep));
    writeFile("aggregate.csv", aggregate_csv(rep));
    writeFile("pairs.json", pairs_json(rep));
}

std::vector<DecayPoint> decay_diagnostic(int nLo, int nHi, int count, const SurveyOptions& opt) {
    std::vector<DecayPoint> out;
    for (int n = nLo; n <= nHi; ++n) {
        SurveyOptions o = opt;
        o.refineMask = 0;
        SurveyReport rep = run_survey(primes_near(n, count), o);
        DecayPoint pt;
        pt.n = n;
        for (const auto& r : rep.pairs)
            if (!r.isTwist && !r.extraordinary) ++pt.adjusted_nontwist;
        pt.weight_sum = rep.aggregate().heuristic_weight;
        out.push_back(pt);
    }
    return out;
}

}  // namespace d6lab
