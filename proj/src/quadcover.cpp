#include "d6lab/quadcover.hpp"

#include <algorithm>
#include <set>

namespace d6lab {

i64 branched_quartic_trace(const ExtField& F, const FqElem& e,
                           const std::array<FqElem, 4>& rho) {
    // send rho_1 to infinity: with delta_k = rho_1 - rho_k the curve becomes
    // e V^2 = S^3 + e2 S^2 + e1 e3 S + e3^2 (S = e3 s, z = rho_1 + 1/s)
    FqElem d2 = F.sub(rho[0], rho[1]);
    FqElem d3 = F.sub(rho[0], rho[2]);
    FqElem d4 = F.sub(rho[0], rho[3]);
    FqElem e1 = F.add(F.add(d2, d3), d4);
    FqElem e2 = F.add(F.add(F.mul(d2, d3), F.mul(d2, d4)), F.mul(d3, d4));
    FqElem e3 = F.mul(F.mul(d2, d3), d4);
    return trace(make_cubic(F, e, e2, F.mul(e1, e3), F.mul(e3, e3)));
}

std::vector<FourCoverDescriptor> enumerate_four_covers(const D6Params& P, int perturb) {
    const PrimeField& K = P.K();
    u64 ns = K.smallest_nonresidue();
    WeierstrassSet W = weierstrass_points(K, P.u);
    ExtField F1(K, 1), F2(K, 2);
    std::vector<FourCoverDescriptor> out;
    out.reserve(120);
    for (int i0 = 1; i0 <= 6; ++i0) {
        for (int j0 = i0 + 1; j0 <= 6; ++j0) {
            int i = i0, j = j0;
            if (perturb & 1) std::swap(i, j);
            FourCoverDescriptor base;
            base.i = i;
            base.j = j;
            u64 ui = W.w[i - 1], uj = W.w[j - 1];
            u64 A = K.mul(K.sub(ui, uj), K.sub(ui, uj));
            int t = 0;
            for (int k = 1; k <= 6; ++k) {
                if (k == i || k == j) continue;
                u64 uk = W.w[k - 1];
                base.a[t] = K.mul(K.sub(ui, uk), K.inv(K.sub(uj, uk)));
                A = K.mul(A, K.sub(uj, uk));
                if (k == 1) base.m = t;
                ++t;
            }
            base.cprime = K.mul(A, K.inv(P.c_rep));
            // pin the z-layer twist so the base point W = (u1, 0) splits in D1
            int s;
            if (base.m >= 0) {
                s = K.legendre(base.a[base.m]);
            } else if (i == 1) {
                u64 pr = base.cprime;
                for (u64 ak : base.a) pr = K.mul(pr, ak);
                s = K.legendre(pr);
            } else {  // j == 1: the base point sits above z = infinity
                s = K.legendre(base.cprime);
            }
            base.dtilde = s == 1 ? 1 : ns;
            base.rational = true;
            for (int k = 0; k < 4; ++k) {
                base.alpha[k] = K.mul(base.dtilde, base.a[k]);
                if (K.legendre(base.alpha[k]) != 1) base.rational = false;
            }
            base.c1 = K.mul(base.dtilde, K.inv(base.cprime));
            base.field_e = base.rational ? 1 : 2;
            const ExtField& F = base.rational ? F1 : F2;
            std::array<FqElem, 4> b0;
            for (int k = 0; k < 4; ++k) {
                auto r = F.sqrt(F.embed(base.alpha[k]));
                if (!r) throw InternalInconsistency("branch value not a square over F_p^2");
                b0[k] = (perturb & 2) ? F.neg(*r) : *r;
            }
            for (int mask = 0; mask < 8; ++mask) {
                FourCoverDescriptor d = base;
                d.sign = {1, (mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1, (mask & 4) ? -1 : 1};
                for (int k = 0; k < 4; ++k)
                    d.beta[k] = d.sign[k] == 1 ? b0[k] : F.neg(b0[k]);
                // pin the v-layer twist by the same splitting rule
                if (i == 1) {
                    FqElem pr = F.one();
                    for (int k = 0; k < 4; ++k) pr = F.mul(pr, d.beta[k]);
                    d.eprime = pr;
                } else if (j == 1) {
                    d.eprime = F.one();
                } else {
                    FqElem z0 = b0[d.m];
                    FqElem val = F.one();
                    for (int k = 0; k < 4; ++k) val = F.mul(val, F.sub(z0, d.beta[k]));
                    if (!F.is_zero(val)) {
                        d.eprime = val;
                    } else {
                        // z0 is a branch point of the chosen quartic; pin via
                        // the complementary quartic, whose twist is c1 e'
                        FqElem valc = F.embed(d.c1);
                        for (int k = 0; k < 4; ++k) valc = F.mul(valc, F.add(z0, d.beta[k]));
                        d.eprime = valc;
                    }
                }
                if (F.is_zero(d.eprime))
                    throw InternalInconsistency("degenerate v-layer twist");
                out.push_back(d);
            }
        }
    }
    if (out.size() != 120) throw InternalInconsistency("descriptor count != 120");
    return out;
}

static std::vector<WeilFactor> factors_in_field(const ExtField& F,
                                                const FourCoverDescriptor& d, u64 p) {
    std::vector<WeilFactor> out;
    i64 t1 = branched_quartic_trace(F, d.eprime, d.beta);
    if (d.rational) {
        std::array<FqElem, 4> nb;
        for (int k = 0; k < 4; ++k) nb[k] = F.neg(d.beta[k]);
        i64 t2 = branched_quartic_trace(F, F.scal(d.c1, d.eprime), nb);
        out.push_back(res_scalars_weil(t1, p, 1));
        out.push_back(res_scalars_weil(t2, p, 1));
    } else {
        // the companion curve is the Galois conjugate: one restriction-of-
        // scalars factor for the pair
        out.push_back(res_scalars_weil(t1, p, 2));
    }
    return out;
}

std::vector<WeilFactor> four_cover_factors(const D6Params& P, const FourCoverDescriptor& d) {
    ExtField F(P.K(), d.field_e);
    return factors_in_field(F, d, P.p());
}

WeilPolynomial four_prym_weil(const D6Params& P) {
    const PrimeField& K = P.K();
    ExtField F1(K, 1), F2(K, 2);
    WeilPolynomial Wp;
    for (const auto& d : enumerate_four_covers(P)) {
        for (const auto& f : factors_in_field(d.rational ? F1 : F2, d, K.p())) Wp.add(f);
    }
    if (Wp.degree() != 480) throw InternalInconsistency("aggregate degree != 480");
    return Wp;
}

int four_cover_distinct_j(const D6Params& P) {
    const PrimeField& K = P.K();
    ExtField F2(K, 2);
    // the companion quartic is z -> -z of the first, so each descriptor has a
    // single geometric j; compare all of them over F_{p^2}
    std::set<std::array<u64, 3>> js;
    for (const auto& d : enumerate_four_covers(P)) {
        std::array<FqElem, 4> rho;
        if (d.rational) {
            for (int k = 0; k < 4; ++k) rho[k] = F2.embed(d.beta[k].c[0]);
        } else {
            rho = d.beta;
        }
        FqElem d2 = F2.sub(rho[0], rho[1]);
        FqElem d3 = F2.sub(rho[0], rho[2]);
        FqElem d4 = F2.sub(rho[0], rho[3]);
        FqElem e1 = F2.add(F2.add(d2, d3), d4);
        FqElem e2 = F2.add(F2.add(F2.mul(d2, d3), F2.mul(d2, d4)), F2.mul(d3, d4));
        FqElem e3 = F2.mul(F2.mul(d2, d3), d4);
        EllipticCurve E = make_cubic(F2, F2.one(), e2, F2.mul(e1, e3), F2.mul(e3, e3));
        js.insert(j_invariant(E).c);
    }
    return (int)js.size();
}

// ---------------------------------------------------------------------------
// generic small extension field F_{p^k}, k <= 5, with a full quadratic-
// character table (oracle plumbing only)
// ---------------------------------------------------------------------------
namespace {

struct SmallExt {
    const PrimeField& K;
    int k;
    u64 p, q;
    std::array<u64, 5> mod{};  // x^k + mod[k-1] x^{k-1} + ... + mod[0]
    std::vector<std::int8_t> chi_tbl;
    using El = std::array<u64, 5>;

    SmallExt(const PrimeField& base, int deg) : K(base), k(deg), p(base.p()) {
        q = 1;
        for (int i = 0; i < k; ++i) q *= p;
        find_modulus();
        build_chi();
    }

    El zero() const { return El{}; }
    El embed(u64 a) const {
        El r{};
        r[0] = a % p;
        return r;
    }
    bool is_zero(const El& a) const {
        for (int i = 0; i < k; ++i)
            if (a[i]) return false;
        return true;
    }
    El add(const El& a, const El& b) const {
        El r{};
        for (int i = 0; i < k; ++i) r[i] = K.add(a[i], b[i]);
        return r;
    }
    El sub(const El& a, const El& b) const {
        El r{};
        for (int i = 0; i < k; ++i) r[i] = K.sub(a[i], b[i]);
        return r;
    }
    El neg(const El& a) const {
        El r{};
        for (int i = 0; i < k; ++i) r[i] = K.neg(a[i]);
        return r;
    }
    El mul(const El& a, const El& b) const {
        std::array<u64, 9> acc{};
        for (int i = 0; i < k; ++i) {
            if (!a[i]) continue;
            for (int j = 0; j < k; ++j) acc[i + j] = K.add(acc[i + j], K.mul(a[i], b[j]));
        }
        for (int d = 2 * k - 2; d >= k; --d) {
            u64 c = acc[d];
            if (!c) continue;
            acc[d] = 0;
            for (int i = 0; i < k; ++i)
                acc[d - k + i] = K.sub(acc[d - k + i], K.mul(c, mod[i]));
        }
        El r{};
        for (int i = 0; i < k; ++i) r[i] = acc[i];
        return r;
    }
    El pow(El a, u64 n) const {
        El r = embed(1);
        while (n) {
            if (n & 1) r = mul(r, a);
            a = mul(a, a);
            n >>= 1;
        }
        return r;
    }
    u64 idx(const El& a) const {
        u64 v = 0;
        for (int i = k - 1; i >= 0; --i) v = v * p + a[i];
        return v;
    }
    int chi(const El& a) const { return chi_tbl[idx(a)]; }

    // deterministic lexicographic search; a degree <= 2 divisor test suffices
    // for irreducibility when k <= 5
    void find_modulus() {
        if (k == 1) {
            mod = {0, 0, 0, 0, 0};
            return;
        }
        for (u64 code = 1;; ++code) {
            std::array<u64, 5> m{};
            u64 t = code;
            for (int i = 0; i < k; ++i) {
                m[i] = t % p;
                t /= p;
            }
            if (t) throw InternalInconsistency("no irreducible modulus found");
            if (m[0] == 0) continue;  // divisible by x
            bool ok = true;
            // no roots
            for (u64 x = 0; x < p && ok; ++x) {
                u64 v = 1;
                for (int i = k - 1; i >= 0; --i) v = K.add(K.mul(v, x), m[i]);
                if (v == 0) ok = false;
            }
            // no monic quadratic divisor (relevant for k >= 4)
            if (ok && k >= 4) {
                for (u64 b = 0; b < p && ok; ++b) {
                    for (u64 c = 0; c < p && ok; ++c) {
                        // remainder of f mod x^2 + b x + c via linear recurrence
                        // x^2 = -b x - c
                        u64 r1 = 0, r0 = 1;  // x^i mod divisor, start i=0
                        u64 s1 = 0, s0 = m[0];
                        // accumulate sum m[i] x^i (+ x^k) mod divisor
                        for (int i = 1; i <= k; ++i) {
                            u64 n1 = K.sub(r0, K.mul(b, r1));
                            u64 n0 = K.neg(K.mul(c, r1));
                            r1 = n1;
                            r0 = n0;
                            u64 coef = i == k ? 1 : m[i];
                            s1 = K.add(s1, K.mul(coef, r1));
                            s0 = K.add(s0, K.mul(coef, r0));
                        }
                        if (s1 == 0 && s0 == 0) ok = false;
                    }
                }
            }
            if (ok) {
                mod = m;
                return;
            }
        }
    }

    void build_chi() {
        chi_tbl.assign(q, 0);
        // find a multiplicative generator, then mark even powers as squares
        std::vector<u64> pf = factor_u64(q - 1);
        std::sort(pf.begin(), pf.end());
        pf.erase(std::unique(pf.begin(), pf.end()), pf.end());
        El g{};
        bool found = false;
        for (u64 code = 2; code < q && !found; ++code) {
            u64 t = code;
            g = zero();
            for (int i = 0; i < k; ++i) {
                g[i] = t % p;
                t /= p;
            }
            found = true;
            for (u64 f : pf) {
                if (idx(pow(g, (q - 1) / f)) == idx(embed(1))) {
                    found = false;
                    break;
                }
            }
        }
        if (!found) throw InternalInconsistency("no generator found");
        El cur = embed(1);
        for (u64 m2 = 0; m2 < q - 1; ++m2) {
            chi_tbl[idx(cur)] = (m2 & 1) ? -1 : 1;
            cur = mul(cur, g);
        }
        gen_ = g;
    }

    // sqrt of a nonzero square via the generator (discrete-log walk; oracle
    // scale only)
    El sqrt_of(const El& a) const {
        El cur = embed(1);
        for (u64 m2 = 0; m2 < q - 1; ++m2) {
            if (idx(cur) == idx(a)) {
                if (m2 & 1) throw InternalInconsistency("sqrt of nonsquare");
                return pow(gen_, m2 / 2);
            }
            cur = mul(cur, gen_);
        }
        throw InternalInconsistency("element not in multiplicative group");
    }

    El gen_{};
};

}  // namespace

bool d2_direct_count_oracle(const D6Params& P, const FourCoverDescriptor& d, int kmax) {
    const PrimeField& K = P.K();
    u64 p = K.p();
    if (p > 23) throw BadParameter("oracle restricted to p <= 23");
    int fe = d.field_e;
    if (kmax < 1) throw BadParameter("kmax < 1");
    if (!d.rational && kmax > 2) kmax = 2;  // stay within degree 4 over F_p
    if (d.rational && kmax > 5) kmax = 5;
    ExtField F0(K, fe);
    u64 q0 = F0.q_u64();

    // predicted Weil data over the field of definition:
    // Jac(C) ~ (base curve)^2, Prym(D1/C) = the quartic c1 w^2 = prod(x-alpha),
    // Prym(D2/D1) = the two pinned quartic curves
    i64 tb = trace(base_curve(P));
    if (fe == 2) tb = extension_trace(tb, p, 2);
    std::array<FqElem, 4> al;
    for (int k2 = 0; k2 < 4; ++k2) al[k2] = F0.embed(d.alpha[k2]);
    i64 tD1 = branched_quartic_trace(F0, F0.embed(d.c1), al);
    i64 t1 = branched_quartic_trace(F0, d.eprime, d.beta);
    std::array<FqElem, 4> nb;
    for (int k2 = 0; k2 < 4; ++k2) nb[k2] = F0.neg(d.beta[k2]);
    i64 t2 = branched_quartic_trace(F0, F0.scal(d.c1, d.eprime), nb);
    WeilPolynomial Wp;
    Wp.add(res_scalars_weil(tb, q0, 1));
    Wp.add(res_scalars_weil(tb, q0, 1));
    Wp.add(res_scalars_weil(tD1, q0, 1));
    Wp.add(res_scalars_weil(t1, q0, 1));
    Wp.add(res_scalars_weil(t2, q0, 1));

    for (int m = 1; m <= kmax; ++m) {
        int deg = fe * m;
        SmallExt E(K, deg);
        // embed the betas and eprime: trivial when they live in F_p, otherwise
        // map the F_{p^2} generator to a root of its modulus
        SmallExt::El vimg = E.zero();
        if (fe == 2) {
            const auto& mm = F0.modulus();
            // root of x^2 + mm[1] x + mm[0]
            u64 disc = K.sub(K.mul(mm[1], mm[1]), K.mul(4, mm[0]));
            SmallExt::El sq = E.sqrt_of(E.embed(disc));
            u64 i2 = K.inv(2);
            vimg = E.sub(sq, E.embed(mm[1]));
            for (int t = 0; t < deg; ++t) vimg[t] = K.mul(vimg[t], i2);
        }
        auto emb = [&](const FqElem& x) {
            SmallExt::El r = E.embed(x.c[0]);
            if (fe == 2 && x.c[1]) r = E.add(r, E.mul(E.embed(x.c[1]), vimg));
            return r;
        };
        std::array<SmallExt::El, 4> be, alE;
        for (int k2 = 0; k2 < 4; ++k2) {
            be[k2] = emb(d.beta[k2]);
            alE[k2] = E.embed(d.alpha[k2]);
        }
        int chi_c1 = E.chi(E.embed(d.c1));
        int chi_e = E.chi(emb(d.eprime));
        u64 q = E.q;
        i64 cnt = 0;
        SmallExt::El z{};
        for (u64 iz = 0; iz < q; ++iz) {
            // decode iz into z
            u64 t = iz;
            for (int c = 0; c < deg; ++c) {
                z[c] = t % p;
                t /= p;
            }
            SmallExt::El z2 = E.mul(z, z);
            SmallExt::El f = E.embed(1);
            bool fz = false;
            for (int k2 = 0; k2 < 4; ++k2) {
                SmallExt::El term = E.sub(z2, alE[k2]);
                if (E.is_zero(term)) {
                    fz = true;
                    break;
                }
                f = E.mul(f, term);
            }
            if (!fz) {
                int cw = 1 + E.chi(f) * chi_c1;
                if (!cw) continue;
                SmallExt::El g = E.embed(1);
                for (int k2 = 0; k2 < 4; ++k2) g = E.mul(g, E.sub(z, be[k2]));
                cnt += cw * (1 + E.chi(g) * chi_e);
            } else {
                // z^2 = alpha_k for some k: the D1 point has w = 0
                SmallExt::El g = E.embed(1);
                int hit = -1;
                for (int k2 = 0; k2 < 4; ++k2) {
                    SmallExt::El term = E.sub(z, be[k2]);
                    if (E.is_zero(term)) {
                        hit = k2;
                        continue;
                    }
                    g = E.mul(g, term);
                }
                if (hit < 0) {
                    cnt += 1 + E.chi(g) * chi_e;
                } else {
                    // branch point of the chosen quartic: the local unit of
                    // sqrt(g) on D1 is e' c1 h(z) f'(z) with h = g above
                    SmallExt::El fp = E.add(z, z);
                    for (int k2 = 0; k2 < 4; ++k2) {
                        if (k2 == hit) continue;
                        fp = E.mul(fp, E.sub(z2, alE[k2]));
                    }
                    cnt += 1 + chi_e * chi_c1 * E.chi(g) * E.chi(fp);
                }
            }
        }
        cnt += (1 + chi_c1) * (1 + chi_e);  // points above z = infinity
        i128 qk = 1;
        for (int t = 0; t < m; ++t) qk *= q0;
        if ((i128)cnt != qk + 1 - Wp.power_sum(m))
            throw OracleMismatch("D2 count disagrees with the predicted factors at degree " +
                                 std::to_string(m));
    }
    return true;
}

}  // namespace d6lab
