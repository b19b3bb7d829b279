#include "d6lab/tricover.hpp"

#include <algorithm>

namespace d6lab {

D6Params triple_partner_params(const D6Params& P) {
    const PrimeField& K = P.K();
    u64 u2 = K.mul(3 % K.p(), K.inv(P.u));
    int negbit = K.legendre(K.neg(1)) == -1 ? 1 : 0;
    D6Params Q = make_params_unchecked(K, u2, P.cbit ^ negbit);
    if (Q.r != K.mul(729 % K.p(), K.inv(P.r)))
        throw InternalInconsistency("partner r is not 729/r");
    return Q;
}

// direction-1 special pair for the given parameters: F and its (81-3r)c twist
static std::pair<i64, i64> special_pair(const D6Params& P) {
    const PrimeField& K = P.K();
    const ExtField& F = P.F;
    u64 p = K.p(), r = P.r;
    u64 tc = K.mul(K.sub(81 % p, K.mul(3, r)), P.c_rep);
    if (tc == 0) throw BadParameter("r = 27 has no special cover");
    FqElem a2 = F.embed(81 % p);
    FqElem a4 = F.embed(K.mul(72 % p, r));
    FqElem a6 = F.embed(K.mul(16 % p, K.mul(r, r)));
    i64 tF = trace(make_cubic(F, F.one(), a2, a4, a6));
    i64 tTw = trace(make_cubic(F, F.embed(tc), a2, a4, a6));
    return {tF, tTw};
}

SpecialPrym special_prym(const D6Params& P) {
    SpecialPrym S;
    S.dir[0] = special_pair(P);
    S.dir[1] = special_pair(triple_partner_params(P));
    return S;
}

std::array<i64, 4> SpecialPrym::key() const {
    auto a = dir[0], b = dir[1];
    if (a.second < a.first) std::swap(a.first, a.second);
    if (b.second < b.first) std::swap(b.first, b.second);
    if (b < a) std::swap(a, b);
    return {a.first, a.second, b.first, b.second};
}

// traces of the two curves attached to one cubic root v over its field
static void orbit_traces(const ExtField& F, const FqElem& v, u64 c_rep, i64& tA, i64& tB) {
    const PrimeField& K = F.base();
    u64 p = K.p();
    FqElem v2 = F.mul(v, v);
    FqElem num = F.scal(27 % p, F.add(F.sub(v2, F.scal(6 % p, v)), F.embed(21 % p)));
    FqElem den = F.scal(4 % p, F.mul(F.sub(v, F.embed(9 % p)), F.add(v, F.embed(3 % p))));
    if (F.is_zero(den)) throw InternalInconsistency("cubic root at v = 9 or v = -3");
    FqElem k = F.mul(num, F.inv(den));
    // g = x^3 + k (x+1)^2
    FqElem cA = F.neg(F.scal(3, F.add(v, F.embed(3 % p))));
    FqElem cB = F.scal(K.mul(3 % p, c_rep), F.sub(v, F.embed(9 % p)));
    tA = trace(make_cubic(F, cA, k, F.add(k, k), k));
    tB = trace(make_cubic(F, cB, k, F.add(k, k), k));
}

std::vector<GeneralTripleOrbit> general_triple_orbits(const D6Params& P) {
    const PrimeField& K = P.K();
    u64 p = K.p(), r = P.r;
    // cubic 3(x-9)^3 + 4r(x^2 - 6x + 21), made monic
    u64 i3 = K.inv(3 % p);
    u64 a2 = K.mul(K.sub(K.mul(4, r), 81 % p), i3);
    u64 a1 = K.sub(243 % p, K.mul(8 % p, r));
    u64 a0 = K.sub(K.mul(28 % p, r), 729 % p);
    // the special root -3 never collides: value there is 192 (r - 27) != 0
    if (K.mul(192 % p, K.sub(r, 27 % p)) == 0)
        throw InternalInconsistency("cubic vanishes at the special root");
    ExtField F1(K, 1);
    UniPoly f = poly_from_u64(F1, {a0, a1, a2, 1});
    auto base_roots = poly_roots(f);
    auto has_dup = [](const std::vector<FqElem>& rs) {
        for (size_t i = 1; i < rs.size(); ++i)
            if (rs[i] == rs[i - 1]) return true;
        return false;
    };
    if (has_dup(base_roots)) throw InternalInconsistency("repeated cubic root");
    std::vector<GeneralTripleOrbit> out;
    for (const FqElem& v : base_roots) {
        GeneralTripleOrbit o;
        o.e = 1;
        o.v = v;
        orbit_traces(F1, v, P.c_rep, o.tA, o.tB);
        out.push_back(o);
    }
    if (base_roots.size() == 2 || base_roots.size() > 3)
        throw InternalInconsistency("impossible cubic root pattern");
    if (base_roots.size() < 3) {
        int e = base_roots.size() == 1 ? 2 : 3;
        ExtField Fe(K, e);
        UniPoly fe = poly_from_u64(Fe, {a0, a1, a2, 1});
        auto roots = poly_roots(fe);
        if (has_dup(roots)) throw InternalInconsistency("repeated cubic root");
        // the non-base roots form a single Galois orbit; take the lex-least
        GeneralTripleOrbit o;
        o.e = e;
        bool found = false;
        for (const FqElem& v : roots) {
            if (Fe.in_base(v)) continue;
            o.v = v;
            found = true;
            break;  // poly_roots output is lex-sorted
        }
        if (!found || (int)roots.size() != 3)
            throw InternalInconsistency("cubic failed to split over its splitting field");
        orbit_traces(Fe, o.v, P.c_rep, o.tA, o.tB);
        out.push_back(o);
    }
    return out;
}

static const D6Params& pick_direction(const D6Params& P, const D6Params& partner, int direction) {
    if (direction == 1) return P;
    if (direction == 2) return partner;
    throw BadParameter("direction must be 1 or 2");
}

std::vector<WeilFactor> general_triple_weil(const D6Params& P, int direction) {
    D6Params partner = triple_partner_params(P);
    const D6Params& Pd = pick_direction(P, partner, direction);
    std::vector<WeilFactor> out;
    int degree = 0;
    for (const auto& o : general_triple_orbits(Pd)) {
        out.push_back(res_scalars_weil(o.tA, Pd.p(), o.e));
        out.push_back(res_scalars_weil(o.tB, Pd.p(), o.e));
        degree += 4 * o.e;
    }
    if (degree != 12) throw InternalInconsistency("general triple factors have degree != 12");
    return out;
}

static WeilPolynomial one_direction_weil(const D6Params& Pd) {
    WeilPolynomial W;
    auto [tF, tTw] = special_pair(Pd);
    W.add(res_scalars_weil(tF, Pd.p(), 1));
    W.add(res_scalars_weil(tTw, Pd.p(), 1));
    for (const auto& o : general_triple_orbits(Pd)) {
        W.add(res_scalars_weil(o.tA, Pd.p(), o.e));
        W.add(res_scalars_weil(o.tB, Pd.p(), o.e));
    }
    if (W.degree() != 16) throw InternalInconsistency("direction signature degree != 16");
    return W;
}

Mult3Signature mult3_signature(const D6Params& P) {
    Mult3Signature S;
    S.dir[0] = one_direction_weil(P);
    S.dir[1] = one_direction_weil(triple_partner_params(P));
    return S;
}

bool Mult3Signature::matches(const Mult3Signature& o) const {
    if (weil_product_equal(dir[0], o.dir[0]) && weil_product_equal(dir[1], o.dir[1])) return true;
    return weil_product_equal(dir[0], o.dir[1]) && weil_product_equal(dir[1], o.dir[0]);
}

bool special_genus2_oracle(const D6Params& P, int direction) {
    if (P.p() > 200) throw BadParameter("oracle restricted to p <= 200");
    D6Params partner = triple_partner_params(P);
    const D6Params& Pd = pick_direction(P, partner, direction);
    const PrimeField& K = Pd.K();
    u64 p = K.p(), r = Pd.r, c = Pd.c_rep;
    // predicted factors: the E2 model and the (81 - 3r)c twist of F
    const ExtField& F1 = Pd.F;
    i64 tE2 = trace(make_cubic(F1, F1.embed(c), F1.embed(K.add(r, 81 % p)),
                               F1.embed(K.mul(144 % p, r)),
                               F1.embed(K.mul(64 % p, K.mul(r, r)))));
    i64 tFw = special_pair(Pd).second;
    for (int k = 1; k <= 2; ++k) {
        ExtField F(K, k);
        FqElem b1_2 = F.embed(K.add(r, 81 % p)), b1_1 = F.embed(K.mul(144 % p, r)),
               b1_0 = F.embed(K.mul(64 % p, K.mul(r, r)));
        FqElem b2_2 = F.embed(81 % p), b2_1 = F.embed(K.mul(72 % p, r)),
               b2_0 = F.embed(K.mul(16 % p, K.mul(r, r)));
        FqElem cc = F.embed(c);
        u64 q = F.q_u64();
        i64 cnt = 0;
        for (u64 idx = 0; idx < q; ++idx) {
            FqElem w;
            u64 t = idx;
            w.c[0] = t % p;
            t /= p;
            if (k >= 2) w.c[1] = t % p;
            FqElem f1 = F.add(F.mul(F.add(F.mul(F.add(w, b1_2), w), b1_1), w), b1_0);
            FqElem f2 = F.add(F.mul(F.add(F.mul(F.add(w, b2_2), w), b2_1), w), b2_0);
            FqElem v = F.mul(f1, f2);
            cnt += F.is_zero(v) ? 1 : 1 + F.chi(F.mul(cc, v));
        }
        cnt += 1 + F.chi(cc);  // sextic model: two points at infinity iff c square
        i64 s = k == 1 ? tE2 + tFw
                       : extension_trace(tE2, p, 2) + extension_trace(tFw, p, 2);
        i128 qk = k == 1 ? (i128)p : (i128)p * p;
        if ((i128)cnt != qk + 1 - s)
            throw OracleMismatch("genus-2 quotient count disagrees with factor product");
    }
    return true;
}

}  // namespace d6lab
