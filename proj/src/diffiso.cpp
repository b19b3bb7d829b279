#include "d6lab/diffiso.hpp"

#include <algorithm>
#include <climits>

namespace d6lab {

namespace {

UniPoly upi(const ExtField& F, const std::vector<i64>& cs) {
    std::vector<u64> u(cs.size());
    for (size_t i = 0; i < cs.size(); ++i) u[i] = F.base().from_int(cs[i]);
    return poly_from_u64(F, u);
}

UniPoly up_one(const ExtField& F) { return upi(F, {1}); }

RatFunc rat_scal(const ExtField& F, u64 k, const RatFunc& a) {
    return {poly_scal(F.embed(k % F.p()), a.num), a.den};
}

}  // namespace

// ---------------------------------------------------------------------------
// rational functions in lowest terms
// ---------------------------------------------------------------------------

RatFunc rat_make(const UniPoly& n, const UniPoly& d) {
    if (d.is_zero()) throw BadParameter("rational function with zero denominator");
    const ExtField& F = *d.F;
    if (n.is_zero()) return {UniPoly(F), up_one(F)};
    UniPoly g = poly_gcd(n, d);
    UniPoly nn(F), nr(F), dd(F), dr(F);
    poly_divmod(n, g, nn, nr);
    poly_divmod(d, g, dd, dr);
    if (!nr.is_zero() || !dr.is_zero()) throw InternalInconsistency("gcd does not divide");
    FqElem li = F.inv(dd.c.back());
    return {poly_scal(li, nn), poly_scal(li, dd)};
}

RatFunc rat_add(const RatFunc& a, const RatFunc& b) {
    return rat_make(poly_add(poly_mul(a.num, b.den), poly_mul(b.num, a.den)),
                    poly_mul(a.den, b.den));
}

RatFunc rat_sub(const RatFunc& a, const RatFunc& b) {
    return rat_make(poly_sub(poly_mul(a.num, b.den), poly_mul(b.num, a.den)),
                    poly_mul(a.den, b.den));
}

RatFunc rat_mul(const RatFunc& a, const RatFunc& b) {
    return rat_make(poly_mul(a.num, b.num), poly_mul(a.den, b.den));
}

RatFunc rat_div(const RatFunc& a, const RatFunc& b) {
    if (b.is_zero()) throw BadParameter("division by the zero function");
    return rat_make(poly_mul(a.num, b.den), poly_mul(a.den, b.num));
}

RatFunc rat_deriv(const RatFunc& a) {
    return rat_make(poly_sub(poly_mul(poly_deriv(a.num), a.den),
                             poly_mul(a.num, poly_deriv(a.den))),
                    poly_mul(a.den, a.den));
}

FqElem rat_eval(const RatFunc& a, const FqElem& x) {
    const ExtField& F = *a.den.F;
    FqElem d = poly_eval(a.den, x);
    if (F.is_zero(d)) throw BadParameter("evaluation at a pole");
    return F.mul(poly_eval(a.num, x), F.inv(d));
}

// ---------------------------------------------------------------------------
// the five lambda families
// ---------------------------------------------------------------------------

RatFunc lambda_function(const ExtField& F, LambdaKind k) {
    switch (k) {
        case LambdaKind::O6:  // 4u / ((u-1)(u+3))
            return rat_make(upi(F, {0, 4}), upi(F, {-3, 2, 1}));
        case LambdaKind::O3a:  // 16u^2 / (u^2+3)^2
            return rat_make(upi(F, {0, 0, 16}), upi(F, {9, 0, 6, 0, 1}));
        case LambdaKind::O3b:  // (u-3)^2 (u+1)^2 / (u^2+3)^2
            return rat_make(upi(F, {9, 12, -2, -4, 1}), upi(F, {9, 0, 6, 0, 1}));
        case LambdaKind::O3c:  // (u-1)^2 (u+3)^2 / (u^2+3)^2
            return rat_make(upi(F, {9, -12, -2, 4, 1}), upi(F, {9, 0, 6, 0, 1}));
        case LambdaKind::Base: {
            // cross-ratio of the ordered branch values u^2, ((u+3)/(u-1))^2,
            // ((u-3)/(u+1))^2: (C - A) / (B - A)
            RatFunc A = rat_make(upi(F, {0, 0, 1}), up_one(F));
            RatFunc B = rat_make(upi(F, {9, 6, 1}), upi(F, {1, -2, 1}));
            RatFunc C = rat_make(upi(F, {9, -6, 1}), upi(F, {1, 2, 1}));
            return rat_div(rat_sub(C, A), rat_sub(B, A));
        }
    }
    throw BadParameter("unknown lambda kind");
}

// ---------------------------------------------------------------------------
// the third-order invariant
// ---------------------------------------------------------------------------

RatFunc chi_plain(const RatFunc& lam) {
    const ExtField& F = *lam.den.F;
    RatFunc y1 = rat_deriv(lam);
    if (y1.is_zero()) throw BadParameter("constant function has no invariant");
    RatFunc y2 = rat_deriv(y1);
    RatFunc y3 = rat_deriv(y2);
    RatFunc t1 = rat_div(rat_sub(rat_scal(F, 2, rat_mul(y1, y3)),
                                 rat_scal(F, 3, rat_mul(y2, y2))),
                         rat_scal(F, 4, rat_mul(y1, y1)));
    RatFunc one = rat_make(up_one(F), up_one(F));
    RatFunc ymo = rat_sub(lam, one);
    RatFunc q = rat_add(rat_sub(rat_mul(lam, lam), lam), one);
    RatFunc t2 = rat_div(rat_mul(rat_mul(y1, y1), q),
                         rat_scal(F, 4, rat_mul(rat_mul(lam, lam), rat_mul(ymo, ymo))));
    return rat_add(t1, t2);
}

// ---------------------------------------------------------------------------
// sparse polynomials in (t, s, s1, s2, s3) and the chain-rule expansion
// ---------------------------------------------------------------------------

namespace {

DiffPoly dp_mono(const ExtField& F, int var, int e) {
    DiffPoly d;
    d.F = &F;
    std::array<int, 5> k{0, 0, 0, 0, 0};
    k[var] = e;
    d.terms[k] = F.one();
    return d;
}

DiffPoly dp_scal(u64 s, const DiffPoly& a) {
    DiffPoly r;
    r.F = a.F;
    FqElem e = a.F->embed(s % a.F->p());
    if (a.F->is_zero(e)) return r;
    for (const auto& [k, c] : a.terms) r.terms[k] = a.F->mul(e, c);
    return r;
}

struct DR {
    DiffPoly num, den;
};

DR dr_of(const RatFunc& r, int var) { return {diff_embed(r.num, var), diff_embed(r.den, var)}; }

DR dr_add(const DR& a, const DR& b) {
    return {diff_add(diff_mul(a.num, b.den), diff_mul(b.num, a.den)),
            diff_mul(a.den, b.den)};
}

DR dr_sub(const DR& a, const DR& b) {
    return {diff_sub(diff_mul(a.num, b.den), diff_mul(b.num, a.den)),
            diff_mul(a.den, b.den)};
}

DR dr_mul(const DR& a, const DR& b) { return {diff_mul(a.num, b.num), diff_mul(a.den, b.den)}; }

DR dr_div(const DR& a, const DR& b) {
    if (b.num.is_zero()) throw BadParameter("division by zero");
    return {diff_mul(a.num, b.den), diff_mul(a.den, b.num)};
}

DR dr_scal(u64 s, const DR& a) { return {dp_scal(s, a.num), a.den}; }

}  // namespace

DiffPoly diff_embed(const UniPoly& u, int var) {
    if (var < 0 || var > 4) throw BadParameter("variable index out of range");
    DiffPoly d;
    d.F = u.F;
    for (int i = 0; i <= u.deg(); ++i) {
        if (u.F->is_zero(u.c[(size_t)i])) continue;
        std::array<int, 5> k{0, 0, 0, 0, 0};
        k[var] = i;
        d.terms[k] = u.c[(size_t)i];
    }
    return d;
}

DiffPoly diff_add(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r = a;
    if (!r.F) r.F = b.F;
    const ExtField& F = *r.F;
    for (const auto& [k, c] : b.terms) {
        auto it = r.terms.find(k);
        if (it == r.terms.end()) {
            r.terms[k] = c;
        } else {
            it->second = F.add(it->second, c);
            if (F.is_zero(it->second)) r.terms.erase(it);
        }
    }
    return r;
}

DiffPoly diff_sub(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly nb;
    nb.F = b.F ? b.F : a.F;
    for (const auto& [k, c] : b.terms) nb.terms[k] = nb.F->neg(c);
    return diff_add(a, nb);
}

DiffPoly diff_mul(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r;
    r.F = a.F ? a.F : b.F;
    const ExtField& F = *r.F;
    for (const auto& [ka, ca] : a.terms)
        for (const auto& [kb, cb] : b.terms) {
            std::array<int, 5> k;
            for (int i = 0; i < 5; ++i) k[(size_t)i] = ka[(size_t)i] + kb[(size_t)i];
            auto it = r.terms.find(k);
            FqElem v = F.mul(ca, cb);
            if (it == r.terms.end()) {
                if (!F.is_zero(v)) r.terms[k] = v;
            } else {
                it->second = F.add(it->second, v);
                if (F.is_zero(it->second)) r.terms.erase(it);
            }
        }
    return r;
}

FqElem diff_eval(const DiffPoly& a, const std::array<FqElem, 5>& point) {
    const ExtField& F = *a.F;
    FqElem acc = F.zero();
    for (const auto& [k, c] : a.terms) {
        FqElem t = c;
        for (int i = 0; i < 5; ++i)
            if (k[(size_t)i]) t = F.mul(t, F.pow(point[(size_t)i], (u64)k[(size_t)i]));
        acc = F.add(acc, t);
    }
    return acc;
}

bool diff_rat_equal(const DiffRational& a, const DiffRational& b) {
    return diff_mul(a.num, b.den).terms == diff_mul(b.num, a.den).terms;
}

DiffRational chi_composed(const RatFunc& lam) {
    const ExtField& F = *lam.den.F;
    RatFunc f1 = rat_deriv(lam);
    if (f1.is_zero()) throw BadParameter("constant function has no invariant");
    RatFunc f2 = rat_deriv(f1);
    RatFunc f3 = rat_deriv(f2);
    DR s1{dp_mono(F, 2, 1), dp_mono(F, 2, 0)};
    DR s2{dp_mono(F, 3, 1), dp_mono(F, 2, 0)};
    DR s3{dp_mono(F, 4, 1), dp_mono(F, 2, 0)};
    DR y = dr_of(lam, 1);
    DR y1 = dr_mul(dr_of(f1, 1), s1);
    DR y2 = dr_add(dr_mul(dr_of(f2, 1), dr_mul(s1, s1)), dr_mul(dr_of(f1, 1), s2));
    DR y3 = dr_add(dr_add(dr_mul(dr_of(f3, 1), dr_mul(s1, dr_mul(s1, s1))),
                          dr_scal(3, dr_mul(dr_of(f2, 1), dr_mul(s1, s2)))),
                   dr_mul(dr_of(f1, 1), s3));
    DR one{dp_mono(F, 2, 0), dp_mono(F, 2, 0)};
    DR t1 = dr_div(dr_sub(dr_scal(2, dr_mul(y1, y3)), dr_scal(3, dr_mul(y2, y2))),
                   dr_scal(4, dr_mul(y1, y1)));
    DR ymo = dr_sub(y, one);
    DR q = dr_add(dr_sub(dr_mul(y, y), y), one);
    DR t2 = dr_div(dr_mul(dr_mul(y1, y1), q),
                   dr_scal(4, dr_mul(dr_mul(y, y), dr_mul(ymo, ymo))));
    DR r = dr_add(t1, t2);
    return {r.num, r.den};
}

// ---------------------------------------------------------------------------
// F and its cancellation certificate
// ---------------------------------------------------------------------------

FirstOrder build_F(const ExtField& F, const CorrespondenceCase& c) {
    RatFunc lamA = lambda_function(F, c.first);
    RatFunc lamB = lambda_function(F, c.second);
    auto check = [&](const RatFunc& lam) {
        DiffRational lhs = chi_composed(lam);
        RatFunc cp = chi_plain(lam);
        DiffPoly Ncp = diff_embed(cp.num, 1);
        DiffPoly Dcp = diff_embed(cp.den, 1);
        // chi(lam(s(t))) == s3/(2 s1) - (3/4)(s2/s1)^2 + s1^2 chi(lam)(s):
        // over the common denominator 4 s1^2 Dcp
        DiffPoly num = diff_add(
            diff_sub(dp_scal(2, diff_mul(diff_mul(dp_mono(F, 2, 1), dp_mono(F, 4, 1)), Dcp)),
                     dp_scal(3, diff_mul(dp_mono(F, 3, 2), Dcp))),
            dp_scal(4, diff_mul(dp_mono(F, 2, 4), Ncp)));
        DiffPoly den = dp_scal(4, diff_mul(dp_mono(F, 2, 2), Dcp));
        if (!diff_rat_equal(lhs, DiffRational{num, den}))
            throw CancellationFailure("higher-derivative terms did not cancel");
    };
    check(lamA);
    if (c.second != c.first) check(lamB);
    return {rat_sub(chi_plain(lamA), chi_plain(lamB))};
}

// ---------------------------------------------------------------------------
// per-point evaluation of G's s'-coefficients and of Res_{s'}(F, G)
// ---------------------------------------------------------------------------

namespace {

/// Numerator data of one case.  F's numerator is s'^2 U - V with
/// U = Nu(s) Du(t), V = Nu(t) Du(s), where Nu/Du is the cross-multiplied
/// (unreduced) difference of the two orbit invariants N1/D1 - N2/D2:
/// Nu = N1 D2 - N2 D1, Du = D1 D2.  P holds the coefficient vectors of
/// {Nu, Nu', Nu'', Du, Du', Du'', N1, D1} for fast evaluation.
struct CaseCtx {
    RatFunc a;  // reduced difference, kept for degeneracy checks
    std::array<std::vector<u64>, 8> P;
};

std::vector<u64> uvec(const UniPoly& u) {
    std::vector<u64> v((size_t)(u.deg() + 1));
    for (int i = 0; i <= u.deg(); ++i) v[(size_t)i] = u.c[(size_t)i].c[0];
    return v;
}

CaseCtx build_ctx(const ExtField& F, const CorrespondenceCase& cc) {
    if (F.e() != 1) throw BadParameter("resultant pipeline requires a prime field");
    RatFunc c1 = chi_plain(lambda_function(F, cc.first));
    RatFunc c2 = chi_plain(lambda_function(F, cc.second));
    CaseCtx ctx;
    ctx.a = rat_sub(c1, c2);
    if (ctx.a.is_zero()) throw DegenerateF("the two invariants coincide; F vanishes identically");
    UniPoly Nu = poly_sub(poly_mul(c1.num, c2.den), poly_mul(c2.num, c1.den));
    UniPoly Du = poly_mul(c1.den, c2.den);
    UniPoly nup = poly_deriv(Nu), dup = poly_deriv(Du);
    ctx.P = {uvec(Nu), uvec(nup), uvec(poly_deriv(nup)),
             uvec(Du), uvec(dup), uvec(poly_deriv(dup)),
             uvec(c1.num), uvec(c1.den)};
    return ctx;
}

u64 vec_eval(const PrimeField& K, const std::vector<u64>& v, u64 x) {
    u64 r = 0;
    for (size_t i = v.size(); i-- > 0;) r = K.add(K.mul(r, x), v[i]);
    return r;
}

/// Modular value with operator arithmetic, so the companion-equation formula
/// can be written once and reused for degree bounding.
struct ModNum {
    const PrimeField* K = nullptr;
    u64 v = 0;
    friend ModNum operator+(ModNum a, ModNum b) { return {a.K, a.K->add(a.v, b.v)}; }
    friend ModNum operator-(ModNum a, ModNum b) { return {a.K, a.K->sub(a.v, b.v)}; }
    friend ModNum operator*(ModNum a, ModNum b) { return {a.K, a.K->mul(a.v, b.v)}; }
};

/// Degree semiring: + and - take max, * adds; NEG marks the zero polynomial.
struct DegNum {
    int d = 0;
    static constexpr int NEG = INT_MIN / 4;
    friend DegNum operator+(DegNum a, DegNum b) { return {std::max(a.d, b.d)}; }
    friend DegNum operator-(DegNum a, DegNum b) { return {std::max(a.d, b.d)}; }
    friend DegNum operator*(DegNum a, DegNum b) {
        return {(a.d <= NEG || b.d <= NEG) ? NEG : a.d + b.d};
    }
};

// s'-polynomial helpers over an abstract coefficient type
template <class Num>
std::vector<Num> spv_add(const std::vector<Num>& a, const std::vector<Num>& b, Num z) {
    std::vector<Num> r(std::max(a.size(), b.size()), z);
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = r[i] + b[i];
    return r;
}

template <class Num>
std::vector<Num> spv_sub(const std::vector<Num>& a, const std::vector<Num>& b, Num z) {
    std::vector<Num> r(std::max(a.size(), b.size()), z);
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = (i < a.size() ? a[i] : z) - b[i];
    return r;
}

template <class Num>
std::vector<Num> spv_mul(const std::vector<Num>& a, const std::vector<Num>& b, Num z) {
    std::vector<Num> r(a.size() + b.size() - 1, z);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    return r;
}

template <class Num>
struct ResOut {
    std::vector<Num> g;  // G's s'^0..s'^10 coefficients, content factor U removed
    Num U, V, res;
};

// G's s'-coefficients and Res_{s'}(F, G) from the eight polynomial values at
// s (S) and at t (T).  F = U s'^2 - V implies s'' = A/B and (differentiating
// dF/dt = 0 once more) a third-derivative formula -(C2 B^2 + C1 A B + C0 A^2)/B^3
// with
//   A = V_t + V_s s' - U_t s'^2 - U_s s'^3,  B = 2 U s',
//   C2 = F_tt + 2 F_ts s' + F_ss s'^2,  C1 = 2 F_ts1 + 2 F_ss1 s' + F_s,
//   C0 = F_s1s1   (s1 denoting the s'-slot).
// Substituting both into the first orbit's invariant equation
//   s3/(2 s') - (3/4)(s''/s')^2 + s'^2 N1(s)/D1(s) - N1(t)/D1(t) = 0
// and clearing denominators pairwise (numerator arithmetic, no reduction)
// yields a degree-10 polynomial in s' whose coefficients all carry the
// content factor U; G is the quotient.  The resultant over the two roots
// s'^2 = V/U of F collapses to  U^{dG-2K} E^2 - U^{dG-2L-1} V O^2  with
// E = sum g_{2k} U^{K-k} V^k, O = sum g_{2k+1} U^{L-k} V^k, K = dG/2,
// L = (dG-1)/2.
template <class Num, class CF, class DIVU>
ResOut<Num> res_point(const std::array<Num, 8>& S, const std::array<Num, 8>& T, CF cst,
                      DIVU div_u, int dG) {
    const Num &nus = S[0], &nups = S[1], &nupps = S[2], &dus = S[3], &dups = S[4],
              &dupps = S[5], &n1s = S[6], &d1s = S[7];
    const Num &nut = T[0], &nupt = T[1], &nuppt = T[2], &dut = T[3], &dupt = T[4],
              &duppt = T[5], &n1t = T[6], &d1t = T[7];
    Num U = nus * dut, Us = nups * dut, Ut = nus * dupt;
    Num Uss = nupps * dut, Ust = nups * dupt, Utt = nus * duppt;
    Num V = nut * dus, Vs = nut * dups, Vt = nupt * dus;
    Num Vss = nut * dupps, Vst = nupt * dups, Vtt = nuppt * dus;
    Num z = cst(0);
    std::vector<Num> A{Vt, Vs, z - Ut, z - Us};
    std::vector<Num> B{z, U + U};
    std::vector<Num> B2 = spv_mul(B, B, z), B3 = spv_mul(B2, B, z);
    std::vector<Num> C2{z - Vtt, z - (Vst + Vst), Utt - Vss, Ust + Ust, Uss};
    std::vector<Num> C1{z - Vs, cst(4) * Ut, cst(5) * Us};
    std::vector<Num> s3n = spv_sub(
        {z},
        spv_add(spv_add(spv_mul(C2, B2, z), spv_mul(spv_mul(C1, A, z), B, z), z),
                spv_mul({U + U}, spv_mul(A, A, z), z), z),
        z);
    // t1 = s3n / (2 s' B^3);  t2 = 3 A^2 / (4 s'^2 B^2);  pairwise numerators
    std::vector<Num> t1d = spv_mul(B3, {z, cst(2)}, z);
    std::vector<Num> t2n = spv_mul({cst(3)}, spv_mul(A, A, z), z);
    std::vector<Num> t2d = spv_mul({z, z, cst(4)}, B2, z);
    std::vector<Num> n12 = spv_sub(spv_mul(s3n, t2d, z), spv_mul(t2n, t1d, z), z);
    std::vector<Num> d12 = spv_mul(t1d, t2d, z);
    std::vector<Num> n3 = spv_add(spv_mul(n12, {d1s}, z), spv_mul({z, z, n1s}, d12, z), z);
    std::vector<Num> d3 = spv_mul({d1s}, d12, z);
    std::vector<Num> G = spv_sub(spv_mul(n3, {d1t}, z), spv_mul({n1t}, d3, z), z);
    ResOut<Num> out;
    out.g.resize(G.size(), z);
    for (size_t j = 0; j < G.size(); ++j) out.g[j] = div_u(G[j], U);
    int K = dG / 2, L = (dG - 1) / 2;
    std::vector<Num> pu((size_t)std::max(K, L) + 1, z), pv((size_t)std::max(K, L) + 1, z);
    pu[0] = cst(1);
    pv[0] = cst(1);
    for (size_t i = 1; i < pu.size(); ++i) {
        pu[i] = pu[i - 1] * U;
        pv[i] = pv[i - 1] * V;
    }
    Num E = z, O = z;
    for (int k = 0; 2 * k <= dG; ++k)
        if (2 * k < (int)out.g.size())
            E = E + out.g[(size_t)(2 * k)] * (pu[(size_t)(K - k)] * pv[(size_t)k]);
    for (int k = 0; 2 * k + 1 <= dG; ++k)
        if (2 * k + 1 < (int)out.g.size())
            O = O + out.g[(size_t)(2 * k + 1)] * (pu[(size_t)(L - k)] * pv[(size_t)k]);
    Num e2 = E * E;
    for (int i = 0; i < dG - 2 * K; ++i) e2 = e2 * U;
    Num o2 = V * (O * O);
    for (int i = 0; i < dG - 2 * L - 1; ++i) o2 = o2 * U;
    out.U = U;
    out.V = V;
    out.res = e2 - o2;
    return out;
}

std::array<ModNum, 8> eval8(const PrimeField& K, const CaseCtx& ctx, u64 x) {
    std::array<ModNum, 8> r;
    for (int i = 0; i < 8; ++i) r[(size_t)i] = {&K, vec_eval(K, ctx.P[(size_t)i], x)};
    return r;
}

ModNum mod_divu(ModNum g, ModNum U) { return {g.K, g.K->mul(g.v, g.K->inv(U.v))}; }

DegNum deg_divu(DegNum g, DegNum U) {
    return {(g.d <= DegNum::NEG || U.d <= DegNum::NEG) ? DegNum::NEG : g.d - U.d};
}

int deg_of_vec(const std::vector<u64>& v) {
    for (size_t i = v.size(); i-- > 0;)
        if (v[i]) return (int)i;
    return DegNum::NEG;
}

// formal s'-degree of G: the largest coefficient index that is not
// identically zero, read off from a few deterministic sample points
int g_formal_degree(const PrimeField& K, const CaseCtx& ctx) {
    auto cst = [&](int v) { return ModNum{&K, K.from_int(v)}; };
    u64 seed = 0xc0ffee1234567ull;
    int top = -1;
    for (int k = 0; k < 5; ++k) {
        u64 s = 0, t = 0;
        do {
            seed = seed * 6364136223846793005ull + 1442695040888963407ull;
            s = 2 + seed % (K.p() - 2);
            seed = seed * 6364136223846793005ull + 1442695040888963407ull;
            t = 2 + seed % (K.p() - 2);
        } while (!vec_eval(K, ctx.P[0], s) || !vec_eval(K, ctx.P[3], t));
        ResOut<ModNum> out =
            res_point<ModNum>(eval8(K, ctx, s), eval8(K, ctx, t), cst, mod_divu, 2);
        for (size_t j = 0; j < out.g.size(); ++j)
            if (out.g[j].v) top = std::max(top, (int)j);
    }
    if (top < 0) throw DegenerateF("companion equation vanishes identically");
    return top;
}

// proven upper bound for deg_s (swap = false) or deg_t (swap = true) of Res
int res_degree_bound(const CaseCtx& ctx, bool swap, int dG) {
    std::array<DegNum, 8> S, T;
    for (int i = 0; i < 8; ++i) {
        S[(size_t)i] = {deg_of_vec(ctx.P[(size_t)i])};
        T[(size_t)i] = {0};  // evaluated side: generic nonzero constants
    }
    if (swap) std::swap(S, T);
    auto cst = [](int c) { return DegNum{c ? 0 : DegNum::NEG}; };
    int d = res_point<DegNum>(S, T, cst, deg_divu, dG).res.d;
    return d <= DegNum::NEG ? -1 : d;
}

// values at nodes off+1..off+n -> monomial coefficients, in place
void newton_to_coeffs(const PrimeField& K, std::vector<u64>& y, const std::vector<u64>& invtab,
                      u64 off) {
    int n = (int)y.size();
    for (int j = 1; j < n; ++j) {
        u64 iv = invtab[(size_t)j];
        for (int i = n - 1; i >= j; --i)
            y[(size_t)i] = K.mul(K.sub(y[(size_t)i], y[(size_t)(i - 1)]), iv);
    }
    std::vector<u64> c((size_t)n, 0);
    c[0] = y[(size_t)(n - 1)];
    int deg = 0;
    for (int i = n - 2; i >= 0; --i) {
        u64 xi = (off + (u64)(i + 1)) % K.p();
        for (int k = deg + 1; k >= 1; --k)
            c[(size_t)k] = K.sub(c[(size_t)(k - 1)], K.mul(xi, c[(size_t)k]));
        c[0] = K.sub(y[(size_t)i], K.mul(xi, c[0]));
        ++deg;
    }
    y = std::move(c);
}

// first window offset (a multiple of m) such that poly has no root in
// off+1..off+m, so the content factor U stays invertible on the grid
u64 clear_window(const PrimeField& K, const std::vector<u64>& poly, int m) {
    for (u64 off = 0;; off += (u64)m) {
        if (off + (u64)m >= K.p()) throw UnluckyPrime("field too small for a clear grid window");
        bool ok = true;
        for (int i = 1; i <= m && ok; ++i)
            if (!vec_eval(K, poly, off + (u64)i)) ok = false;
        if (ok) return off;
    }
}

u64 bivar_eval(const Bivar& B, u64 s, u64 t) {
    const PrimeField& K = *B.K;
    u64 acc = 0;
    for (int i = B.ds; i >= 0; --i) {
        u64 row = 0;
        for (int j = B.dt; j >= 0; --j) row = K.add(K.mul(row, t), B.at(i, j));
        acc = K.add(K.mul(acc, s), row);
    }
    return acc;
}

Bivar bv_from_rows(const PrimeField& K, const std::vector<std::vector<u64>>& rows) {
    int ds = -1, dt = -1;
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            if (rows[i][j]) {
                ds = std::max(ds, (int)i);
                dt = std::max(dt, (int)j);
            }
    Bivar B;
    B.K = &K;
    B.ds = ds;
    B.dt = dt;
    if (ds < 0) return B;
    B.c.assign((size_t)(ds + 1) * (size_t)(dt + 1), 0);
    for (int i = 0; i <= ds; ++i)
        for (int j = 0; j <= dt && j < (int)rows[(size_t)i].size(); ++j)
            B.c[(size_t)i * (size_t)(dt + 1) + (size_t)j] = rows[(size_t)i][(size_t)j];
    return B;
}

}  // namespace

std::vector<u64> g_coeffs_at(const ExtField& F, const CorrespondenceCase& c, u64 s, u64 t) {
    const PrimeField& K = F.base();
    CaseCtx ctx = build_ctx(F, c);
    if (!vec_eval(K, ctx.P[0], s % K.p()) || !vec_eval(K, ctx.P[3], t % K.p()))
        throw BadParameter("the content factor U vanishes at this point");
    auto cst = [&](int v) { return ModNum{&K, K.from_int(v)}; };
    ResOut<ModNum> out =
        res_point<ModNum>(eval8(K, ctx, s % K.p()), eval8(K, ctx, t % K.p()), cst, mod_divu, 2);
    std::vector<u64> g(out.g.size());
    for (size_t j = 0; j < out.g.size(); ++j) g[j] = out.g[j].v;
    return g;
}

Bivar resultant_R(const ExtField& F, const CorrespondenceCase& c) {
    const PrimeField& K = F.base();
    CaseCtx ctx = build_ctx(F, c);
    auto cst = [&](int v) { return ModNum{&K, K.from_int(v)}; };
    int dG = g_formal_degree(K, ctx);
    int bs = res_degree_bound(ctx, false, dG);
    int bt = res_degree_bound(ctx, true, dG);
    if (bs < 0 || bt < 0) throw DegenerateF("resultant is identically zero");
    int Ms = bs + 1, Mt = bt + 1;
    for (int attempt = 0; attempt < 2; ++attempt) {
        int Mx = std::max(Ms, Mt);
        std::vector<u64> invtab((size_t)Mx, 0);
        for (int j = 1; j < Mx; ++j) {
            if ((u64)j >= K.p()) throw UnluckyPrime("field too small for the interpolation grid");
            invtab[(size_t)j] = K.inv((u64)j);
        }
        u64 soff = clear_window(K, ctx.P[0], Ms);  // keep Nu(s) != 0 on s-nodes
        u64 toff = clear_window(K, ctx.P[3], Mt);  // keep Du(t) != 0 on t-nodes
        std::vector<std::array<ModNum, 8>> sev((size_t)Ms), tev((size_t)Mt);
        for (int i = 0; i < Ms; ++i) sev[(size_t)i] = eval8(K, ctx, soff + (u64)(i + 1));
        for (int j = 0; j < Mt; ++j) tev[(size_t)j] = eval8(K, ctx, toff + (u64)(j + 1));
        std::vector<std::vector<u64>> rows((size_t)Ms);
        for (int i = 0; i < Ms; ++i) {
            std::vector<u64> y((size_t)Mt);
            for (int j = 0; j < Mt; ++j)
                y[(size_t)j] =
                    res_point<ModNum>(sev[(size_t)i], tev[(size_t)j], cst, mod_divu, dG).res.v;
            newton_to_coeffs(K, y, invtab, toff);
            rows[(size_t)i] = std::move(y);
        }
        std::vector<std::vector<u64>> C((size_t)Ms, std::vector<u64>((size_t)Mt, 0));
        std::vector<u64> col((size_t)Ms);
        for (int j = 0; j < Mt; ++j) {
            for (int i = 0; i < Ms; ++i) col[(size_t)i] = rows[(size_t)i][(size_t)j];
            std::vector<u64> cc = col;
            newton_to_coeffs(K, cc, invtab, soff);
            for (int i = 0; i < Ms; ++i) C[(size_t)i][(size_t)j] = cc[(size_t)i];
        }
        Bivar B = bv_from_rows(K, C);
        // confirm against direct evaluation at off-grid points
        bool ok = true;
        u64 seed = 0x9e3779b97f4a7c15ull;
        for (int k = 0; k < 8 && ok; ++k) {
            u64 s = 0, t = 0;
            do {
                seed = seed * 6364136223846793005ull + 1442695040888963407ull;
                s = 1 + seed % (K.p() - 1);
                seed = seed * 6364136223846793005ull + 1442695040888963407ull;
                t = 1 + seed % (K.p() - 1);
            } while (!vec_eval(K, ctx.P[0], s) || !vec_eval(K, ctx.P[3], t));
            u64 direct =
                res_point<ModNum>(eval8(K, ctx, s), eval8(K, ctx, t), cst, mod_divu, dG).res.v;
            if (bivar_eval(B, s, t) != direct) ok = false;
        }
        if (ok) {
            if (B.ds < 0) throw UnluckyPrime("resultant vanished at this prime");
            return B;
        }
        Ms += Ms / 4 + 1;
        Mt += Mt / 4 + 1;
    }
    throw UnluckyPrime("interpolation failed to stabilize");
}

// ---------------------------------------------------------------------------
// factor stripping
// ---------------------------------------------------------------------------

namespace {

// exact division by s - sgn*t; returns false (W untouched) if not divisible
bool bv_div_linear(Bivar& W, int sgn) {
    const PrimeField& K = *W.K;
    if (W.ds < 1) return false;
    int ds = W.ds, dt = W.dt;
    int w = dt + ds + 2;
    u64 sg = sgn > 0 ? 1 : K.p() - 1;
    std::vector<std::vector<u64>> Q((size_t)ds, std::vector<u64>((size_t)w, 0));
    for (int j = 0; j <= dt; ++j) Q[(size_t)(ds - 1)][(size_t)j] = W.at(ds, j);
    for (int k = ds - 1; k >= 1; --k) {
        auto& q = Q[(size_t)(k - 1)];
        for (int j = 0; j <= dt; ++j) q[(size_t)j] = W.at(k, j);
        const auto& up = Q[(size_t)k];
        for (int j = 0; j + 1 < w; ++j)
            q[(size_t)(j + 1)] = K.add(q[(size_t)(j + 1)], K.mul(sg, up[(size_t)j]));
    }
    std::vector<u64> rem((size_t)w, 0);
    for (int j = 0; j <= dt; ++j) rem[(size_t)j] = W.at(0, j);
    for (int j = 0; j + 1 < w; ++j)
        rem[(size_t)(j + 1)] = K.add(rem[(size_t)(j + 1)], K.mul(sg, Q[0][(size_t)j]));
    for (u64 v : rem)
        if (v) return false;
    W = bv_from_rows(K, Q);
    return true;
}

// exact division by t*s + e; returns false (W untouched) if not divisible
bool bv_div_st(Bivar& W, u64 e) {
    const PrimeField& K = *W.K;
    if (W.ds < 1 || W.dt < 1) return false;
    int ds = W.ds, dt = W.dt;
    std::vector<std::vector<u64>> Q((size_t)ds, std::vector<u64>((size_t)(dt + 1), 0));
    std::vector<u64> tmp((size_t)(dt + 1));
    for (int k = ds; k >= 1; --k) {
        for (int j = 0; j <= dt; ++j) {
            u64 qk = k == ds ? 0 : Q[(size_t)k][(size_t)j];
            tmp[(size_t)j] = K.sub(W.at(k, j), K.mul(e, qk));
        }
        if (tmp[0]) return false;
        for (int j = 0; j < dt; ++j) Q[(size_t)(k - 1)][(size_t)j] = tmp[(size_t)(j + 1)];
        Q[(size_t)(k - 1)][(size_t)dt] = 0;
    }
    for (int j = 0; j <= dt; ++j)
        if (W.at(0, j) != K.mul(e, Q[0][(size_t)j])) return false;
    W = bv_from_rows(K, Q);
    return true;
}

UniPoly bv_col(const ExtField& F, const Bivar& W, int j) {
    std::vector<u64> v((size_t)(W.ds + 1));
    for (int i = 0; i <= W.ds; ++i) v[(size_t)i] = W.at(i, j);
    return poly_from_u64(F, v);
}

UniPoly bv_row(const ExtField& F, const Bivar& W, int i) {
    std::vector<u64> v((size_t)(W.dt + 1));
    for (int j = 0; j <= W.dt; ++j) v[(size_t)j] = W.at(i, j);
    return poly_from_u64(F, v);
}

}  // namespace

StripResult strip_known(const Bivar& R) {
    const PrimeField& K = *R.K;
    ExtField F(K, 1);
    StripResult out;
    Bivar W = R;
    const std::pair<const char*, int> lin[] = {{"s-t", +1}, {"s+t", -1}};
    for (auto [name, sgn] : lin)
        while (bv_div_linear(W, sgn)) ++out.known[name];
    const std::pair<const char*, i64> quad[] = {{"st-3", -3}, {"st+3", 3}};
    for (auto [name, e] : quad)
        while (bv_div_st(W, K.from_int(e))) ++out.known[name];
    // one-variable content in s: gcd of the coefficient polynomials of t^j
    if (W.ds >= 0) {
        UniPoly g(F);
        for (int j = 0; j <= W.dt; ++j) {
            UniPoly cj = bv_col(F, W, j);
            g = g.is_zero() ? cj : poly_gcd(g, cj);
            if (g.deg() == 0) break;
        }
        if (g.deg() >= 1) {
            out.content_s_deg = g.deg();
            std::vector<std::vector<u64>> rows((size_t)(W.ds - g.deg() + 1),
                                               std::vector<u64>((size_t)(W.dt + 1), 0));
            for (int j = 0; j <= W.dt; ++j) {
                UniPoly q(F), r(F);
                poly_divmod(bv_col(F, W, j), g, q, r);
                if (!r.is_zero()) throw InternalInconsistency("content does not divide");
                for (int i = 0; i <= q.deg(); ++i) rows[(size_t)i][(size_t)j] = q.c[(size_t)i].c[0];
            }
            W = bv_from_rows(K, rows);
        }
    }
    // one-variable content in t
    if (W.ds >= 0) {
        UniPoly g(F);
        for (int i = 0; i <= W.ds; ++i) {
            UniPoly ri = bv_row(F, W, i);
            g = g.is_zero() ? ri : poly_gcd(g, ri);
            if (g.deg() == 0) break;
        }
        if (g.deg() >= 1) {
            out.content_t_deg = g.deg();
            std::vector<std::vector<u64>> rows((size_t)(W.ds + 1),
                                               std::vector<u64>((size_t)(W.dt - g.deg() + 1), 0));
            for (int i = 0; i <= W.ds; ++i) {
                UniPoly q(F), r(F);
                poly_divmod(bv_row(F, W, i), g, q, r);
                if (!r.is_zero()) throw InternalInconsistency("content does not divide");
                for (int j = 0; j <= q.deg(); ++j) rows[(size_t)i][(size_t)j] = q.c[(size_t)j].c[0];
            }
            W = bv_from_rows(K, rows);
        }
    }
    out.rtilde = std::move(W);
    return out;
}

// ---------------------------------------------------------------------------
// the companion H and candidate verification
// ---------------------------------------------------------------------------

namespace {

Bivar bv_deriv_s(const Bivar& B) {
    const PrimeField& K = *B.K;
    std::vector<std::vector<u64>> rows((size_t)std::max(B.ds, 1),
                                       std::vector<u64>((size_t)(B.dt + 1), 0));
    for (int i = 1; i <= B.ds; ++i)
        for (int j = 0; j <= B.dt; ++j)
            rows[(size_t)(i - 1)][(size_t)j] = K.mul((u64)i % K.p(), B.at(i, j));
    return bv_from_rows(K, rows);
}

Bivar bv_deriv_t(const Bivar& B) {
    const PrimeField& K = *B.K;
    std::vector<std::vector<u64>> rows((size_t)(B.ds + 1),
                                       std::vector<u64>((size_t)std::max(B.dt, 1), 0));
    for (int i = 0; i <= B.ds; ++i)
        for (int j = 1; j <= B.dt; ++j)
            rows[(size_t)i][(size_t)(j - 1)] = K.mul((u64)j % K.p(), B.at(i, j));
    return bv_from_rows(K, rows);
}

// specialize s := s0; result is a polynomial in t
UniPoly bv_spec_s(const ExtField& F, const Bivar& B, u64 s0) {
    const PrimeField& K = F.base();
    std::vector<u64> v((size_t)(B.dt + 1), 0);
    for (int j = 0; j <= B.dt; ++j) {
        u64 acc = 0;
        for (int i = B.ds; i >= 0; --i) acc = K.add(K.mul(acc, s0), B.at(i, j));
        v[(size_t)j] = acc;
    }
    return poly_from_u64(F, v);
}

UniPoly poly_from_vec(const ExtField& F, const std::vector<u64>& v) {
    return poly_from_u64(F, v);
}

}  // namespace

UniPoly h_specialized(const ExtField& F, const CorrespondenceCase& c, const Bivar& R, u64 s0) {
    const PrimeField& K = F.base();
    CaseCtx ctx = build_ctx(F, c);
    UniPoly rt = bv_spec_s(F, bv_deriv_t(R), s0);
    UniPoly rs = bv_spec_s(F, bv_deriv_s(R), s0);
    u64 nas = vec_eval(K, ctx.P[0], s0 % K.p());
    u64 das = vec_eval(K, ctx.P[3], s0 % K.p());
    UniPoly U = poly_scal(F.embed(nas), poly_from_vec(F, ctx.P[3]));
    UniPoly V = poly_scal(F.embed(das), poly_from_vec(F, ctx.P[0]));
    return poly_sub(poly_mul(U, poly_mul(rt, rt)), poly_mul(V, poly_mul(rs, rs)));
}

// ---------------------------------------------------------------------------
// the full pipeline at one prime
// ---------------------------------------------------------------------------

namespace {

// distinct-degree parts of the squarefree part of g
std::vector<std::pair<int, UniPoly>> distinct_degree_parts(const UniPoly& g0, u64 p) {
    const ExtField& F = *g0.F;
    UniPoly g = poly_monic(g0);
    UniPoly d = poly_gcd(g, poly_deriv(g));
    if (d.deg() > 0) {
        UniPoly q(F), r(F);
        poly_divmod(g, d, q, r);
        g = poly_monic(q);
    }
    std::vector<std::pair<int, UniPoly>> parts;
    UniPoly x = poly_from_u64(F, {0, 1});
    UniPoly h = poly_mod(x, g);
    auto limbs = limbs_from_u128(p);
    for (int dd = 1; g.deg() > 0 && 2 * dd <= g.deg(); ++dd) {
        h = poly_powmod(h, limbs, g);
        UniPoly f = poly_gcd(poly_sub(h, x), g);
        if (f.deg() > 0) {
            parts.push_back({dd, f});
            UniPoly q(F), r(F);
            poly_divmod(g, f, q, r);
            g = poly_monic(q);
            h = poly_mod(h, g);
        }
    }
    if (g.deg() > 0) parts.push_back({g.deg(), g});
    return parts;
}

// 1 = both isogenies hold, 0 = at least one fails, -1 = untestable root
int check_point(const PrimeField& K, const CorrespondenceCase& cc, u64 s0, const ExtField& Fe,
                const FqElem& t0, int d) {
    ExtField F1(K, 1);
    for (LambdaKind kind : {cc.first, cc.second}) {
        RatFunc l1 = lambda_function(F1, kind);
        RatFunc le = lambda_function(Fe, kind);
        FqElem ls, lt;
        try {
            ls = rat_eval(l1, F1.embed(s0));
            lt = rat_eval(le, t0);
        } catch (const BadParameter&) {
            return -1;
        }
        if (F1.is_zero(ls) || ls == F1.one() || Fe.is_zero(lt) || lt == Fe.one()) return -1;
        i64 ts = trace(make_legendre(F1, F1.one(), ls));
        i64 tt = trace(make_legendre(Fe, Fe.one(), lt));
        if (extension_trace(ts, K.p(), d) != tt) return 0;
    }
    return 1;
}

}  // namespace

CaseReport run_case_at(const CorrespondenceCase& c, u64 p, bool verify) {
    PrimeField K(p);
    ExtField F(K, 1);
    build_F(F, c);  // cancellation certificate (CancellationFailure if broken)
    CaseCtx ctx = build_ctx(F, c);
    Bivar R = resultant_R(F, c);
    CaseReport rep;
    rep.p = p;
    rep.r_deg_s = R.ds;
    rep.r_deg_t = R.dt;
    StripResult st = strip_known(R);
    rep.known = st.known;
    rep.content_s_deg = st.content_s_deg;
    rep.content_t_deg = st.content_t_deg;
    // pick a specialization point: no poles, a(s0) != 0, both lambdas generic,
    // then keep the s0 giving the largest deg_t H among the first few valid
    RatFunc lamA = lambda_function(F, c.first);
    RatFunc lamB = lambda_function(F, c.second);
    UniPoly bestH(F);
    int tried = 0;
    for (u64 s0 = 2; s0 < p && tried < 6; ++s0) {
        if (!vec_eval(K, ctx.P[0], s0) || !vec_eval(K, ctx.P[3], s0) ||
            !vec_eval(K, ctx.P[7], s0))
            continue;
        FqElem la, lb;
        try {
            la = rat_eval(lamA, F.embed(s0));
            lb = rat_eval(lamB, F.embed(s0));
        } catch (const BadParameter&) {
            continue;
        }
        if (F.is_zero(la) || la == F.one() || F.is_zero(lb) || lb == F.one()) continue;
        UniPoly H = h_specialized(F, c, R, s0);
        if (H.deg() > bestH.deg()) {
            bestH = H;
            rep.s0 = s0;
        }
        ++tried;
    }
    rep.h_deg_t = bestH.deg();
    // candidate: the squarefree part of the common factor of H(s0, t) and the
    // stripped resultant.  A genuine correspondence holds on every root, so a
    // single failing testable root proves the whole factor spurious; roots are
    // drawn from the distinct-degree pieces that fit inside point counting.
    if (st.rtilde.ds >= 0 && bestH.deg() >= 0) {
        UniPoly rt0 = bv_spec_s(F, st.rtilde, rep.s0);
        UniPoly g = rt0.is_zero() || bestH.is_zero() ? UniPoly(F) : poly_gcd(bestH, rt0);
        if (g.deg() >= 1) {
            UniPoly sf = poly_monic(g);
            UniPoly sq = poly_gcd(sf, poly_deriv(sf));
            if (sq.deg() > 0) {
                UniPoly q(F), r(F);
                poly_divmod(sf, sq, q, r);
                sf = poly_monic(q);
            }
            Candidate cand;
            cand.degree = sf.deg();
            cand.verdict = "unresolved";
            if (verify) {
                int good = 0, bad = 0;
                for (auto& [d, f] : distinct_degree_parts(sf, p)) {
                    if (d > 3) continue;
                    u128 qd = 1;
                    for (int i = 0; i < d; ++i) qd *= p;
                    if (qd >= ((u128)1 << 62)) continue;  // beyond point counting
                    ExtField Fe(K, d);
                    UniPoly fe(Fe);
                    fe.c.resize(f.c.size());
                    for (size_t i = 0; i < f.c.size(); ++i) fe.c[i] = Fe.embed(f.c[i].c[0]);
                    fe.normalize();
                    int tested = 0;
                    for (const FqElem& r : poly_roots(fe, 1)) {
                        if (tested >= 4) break;
                        int v = check_point(K, c, rep.s0, Fe, r, d);
                        if (v < 0) continue;
                        ++tested;
                        (v ? good : bad) += 1;
                    }
                }
                if (bad) cand.verdict = "spurious";
                else if (good) cand.verdict = "confirmed";
            }
            rep.candidates.push_back(cand);
        }
    }
    if (verify) {
        ExtField F1(K, 1);
        u64 s0 = rep.s0;
        const std::pair<const char*, u64> pts[] = {
            {"s-t", s0},
            {"s+t", K.neg(s0)},
            {"st-3", K.mul(3 % p, K.inv(s0))},
            {"st+3", K.neg(K.mul(3 % p, K.inv(s0)))}};
        for (auto& [name, t0] : pts) {
            if (!rep.known.count(name)) continue;
            int v = check_point(K, c, s0, F1, F1.embed(t0), 1);
            rep.known_verdicts[name] = v < 0 ? "unresolved" : (v ? "confirmed" : "spurious");
        }
    }
    return rep;
}

PipelineReport run_case(const CorrespondenceCase& c) {
    u64 pin = (1ull << 62) - 1;
    while (!is_prime_u64(pin)) pin -= 2;
    PipelineReport rep;
    rep.pin = run_case_at(c, pin, false);
    int accepted = 0, tried = 0;
    CaseReport last;
    bool have_last = false;
    for (u64 q = (1ull << 20) + 1; accepted < 2 && tried < 12; q += 2) {
        if (!is_prime_u64(q)) continue;
        ++tried;
        CaseReport r;
        try {
            r = run_case_at(c, q, true);
        } catch (const UnluckyPrime&) {
            continue;
        }
        bool resolved = true;
        for (const Candidate& cand : r.candidates)
            if (cand.verdict == "unresolved") resolved = false;
        if (resolved) {
            rep.verify.push_back(r);
            ++accepted;
        } else {
            last = r;
            have_last = true;
        }
    }
    if (rep.verify.empty() && have_last) rep.verify.push_back(last);
    return rep;
}

}  // namespace d6lab
