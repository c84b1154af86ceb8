#include "phigamma/charp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace phigamma {

namespace {

using GS = TruncSeries<GFRing>;
using ES = TruncSeries<ExtRing>;

long long ipow_ll(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

NormFieldDesc make_norm_field(const FieldDesc& kK, int rs, const LTData& lt, int uprec) {
    if (kK.m != rs) throw Error("norm field: residue degree must equal rs");
    NormFieldDesc nf;
    nf.residue = kK;
    nf.rs = rs;
    const LocalRingPtr& OF = lt.ring.ctx;
    // Teichmüller generator of k_F^x, when nontrivial
    FieldDesc kF = ring_residue(OF);
    if (!(kF.p == 2 && kF.m == 1)) {
        LocalInt c = LocalInt::teichmuller(OF, multiplicative_generator(kF));
        GS act = embed_series(reduce_series(lt_mul(lt, c)).truncated(uprec), kK);
        nf.gamma.push_back({c, act, "teich"});
    }
    {
        LocalInt c = LocalInt::one(OF) + LocalInt::uniformizer(OF);
        GS act = embed_series(reduce_series(lt_mul(lt, c)).truncated(uprec), kK);
        nf.gamma.push_back({c, act, "1+pi"});
    }
    for (const auto& g : nf.gamma)
        if (!g.action.ring().is_unit(g.action.coeff(1)))
            throw Error("norm field: gamma action is not an automorphism");
    return nf;
}

TruncSeries<GFRing> gamma_action(const LocalInt& c, const TruncSeries<GFRing>& x,
                                 const LTData& lt) {
    if (!c.is_unit()) throw Error("gamma_action: chi-value must be a unit");
    GS s = reduce_series(lt_mul(lt, c));
    if (!(x.ring().desc == s.ring().desc)) s = embed_series(s, x.ring().desc);
    return substitute_laurent(x, s);
}

TruncSeries<GFRing> frobenius_q(const TruncSeries<GFRing>& x, int e) {
    GS out(x.ring(), x.lo() * static_cast<int>(ipow_ll(x.ring().desc.p, e)),
           x.prec() * static_cast<int>(ipow_ll(x.ring().desc.p, e)));
    const int q = static_cast<int>(ipow_ll(x.ring().desc.p, e));
    for (const auto& [k, v] : x.coeffs()) out.set(k * q, v.frobenius(e));
    return out;
}

TruncSeries<ExtRing> frobenius_q(const TruncSeries<ExtRing>& x, int e) {
    const int p = ext_base(x.ring().ext).p;
    const int q = static_cast<int>(ipow_ll(p, e));
    ES out(x.ring(), x.lo() * q, x.prec() * q);
    for (const auto& [k, v] : x.coeffs()) out.set(k * q, v.frobenius(e));
    return out;
}

TruncSeries<GFRing> embed_series(const TruncSeries<GFRing>& s, const FieldDesc& target) {
    if (s.ring().desc == target) return s;
    GFRing r{target};
    GS out(r, s.lo(), s.prec());
    for (const auto& [e, c] : s.coeffs()) out.set(e, embed(c, target));
    return out;
}

// ---- modules -------------------------------------------------------------------

PhiGammaP make_const_module(const FieldDesc& k, int rs, const Mat<FieldElem>& A, int uprec) {
    PhiGammaP M;
    M.base = GFRing{k};
    M.rank = static_cast<int>(A.size());
    M.rs = rs;
    for (const auto& row : A) {
        std::vector<GS> out;
        for (const auto& a : row) out.push_back(GS::constant(M.base, a, uprec));
        M.phi.push_back(std::move(out));
    }
    return M;
}

bool const_mode(const PhiGammaP& M) {
    for (const auto& row : M.phi)
        for (const auto& s : row)
            for (const auto& [e, c] : s.coeffs())
                if (e != 0) return false;
    for (const auto& G : M.gam)
        for (const auto& row : G)
            for (const auto& s : row)
                for (const auto& [e, c] : s.coeffs())
                    if (e != 0) return false;
    return true;
}

Mat<FieldElem> const_phi_matrix(const PhiGammaP& M) {
    if (!const_mode(M)) throw UnsupportedModeError("module is not in constant mode");
    Mat<FieldElem> A;
    for (const auto& row : M.phi) {
        std::vector<FieldElem> out;
        for (const auto& s : row) out.push_back(s.coeff(0));
        A.push_back(std::move(out));
    }
    return A;
}

namespace {

GS gamma_on_series(const GS& x, const GammaGen& g) {
    GS act = g.action;
    if (!(act.ring().desc == x.ring().desc)) act = embed_series(act, x.ring().desc);
    return substitute_laurent(x, act);
}

Mat<GS> apply_entrywise(const Mat<GS>& m, const std::function<GS(const GS&)>& f) {
    Mat<GS> out;
    for (const auto& row : m) {
        std::vector<GS> r;
        for (const auto& s : row) r.push_back(f(s));
        out.push_back(std::move(r));
    }
    return out;
}

bool mat_series_eq(const Mat<GS>& a, const Mat<GS>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j)
            if (!a[i][j].eq_at_shared_precision(b[i][j])) return false;
    return true;
}

Mat<GS> mat_series_mul(const Mat<GS>& a, const Mat<GS>& b) {
    const size_t n = a.size(), k = b.size(), m = b[0].size();
    Mat<GS> r(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) {
            GS acc = a[i][0] * b[0][j];
            for (size_t t = 1; t < k; ++t) acc = acc + a[i][t] * b[t][j];
            r[i].push_back(acc);
        }
    return r;
}

}  // namespace

EtaleReport check_etale_phigamma(const PhiGammaP& M, const NormFieldDesc& nf) {
    EtaleReport rep;
    // étale: det is a nonzero Laurent series (invertible over the fraction field)
    Mat<GS> A = M.phi;
    GS det = mat_det_field(A);
    if (det.is_zero()) {
        rep.ok = false;
        rep.violation = "not étale: det(matPhi) = 0 at precision";
        return rep;
    }
    if (M.gam.size() > nf.gamma.size()) {
        rep.ok = false;
        rep.violation = "module carries more gamma matrices than the field has generators";
        return rep;
    }
    // compatibility per generator: G * gamma(A) = A * phi(G)
    for (size_t gi = 0; gi < M.gam.size(); ++gi) {
        const auto& G = M.gam[gi];
        const GammaGen& gen = nf.gamma[gi];
        auto gammaA = apply_entrywise(M.phi, [&](const GS& s) { return gamma_on_series(s, gen); });
        auto phiG = apply_entrywise(G, [&](const GS& s) { return frobenius_q(s, M.rs); });
        if (!mat_series_eq(mat_series_mul(G, gammaA), mat_series_mul(M.phi, phiG))) {
            rep.ok = false;
            rep.violation = "phi/gamma compatibility fails for generator " + gen.label;
            return rep;
        }
    }
    // pairwise commutation of the gamma matrices
    for (size_t i = 0; i < M.gam.size(); ++i)
        for (size_t j = i + 1; j < M.gam.size(); ++j) {
            auto gj_of_Gi =
                apply_entrywise(M.gam[i], [&](const GS& s) { return gamma_on_series(s, nf.gamma[j]); });
            auto gi_of_Gj =
                apply_entrywise(M.gam[j], [&](const GS& s) { return gamma_on_series(s, nf.gamma[i]); });
            if (!mat_series_eq(mat_series_mul(M.gam[i], gj_of_Gi), mat_series_mul(M.gam[j], gi_of_Gj))) {
                rep.ok = false;
                rep.violation = "gamma generators " + nf.gamma[i].label + "," + nf.gamma[j].label +
                                " do not commute";
                return rep;
            }
        }
    return rep;
}

// ---- functor V -------------------------------------------------------------------

VResultP functor_V(const PhiGammaP& M) {
    VResultP out;
    const int d = M.rank;
    if (const_mode(M)) {
        auto A = const_phi_matrix(M);
        auto sol = solve_semilinear_const(A, M.rs);
        out.ext = sol.ext;
        out.constant_mode = true;
        out.count = sol.count;
        ExtRing er{sol.ext};
        const int uprec = M.phi[0][0].prec();
        for (const auto& vec : sol.basis) {
            std::vector<ES> v;
            for (const auto& x : vec) v.push_back(ES::constant(er, x, uprec));
            out.basis.push_back(std::move(v));
        }
        out.raw = sol;
        return out;
    }
    // series mode: matPhi over k[[u]]; solve u-degree by u-degree
    const int uprec = M.phi[0][0].prec();
    for (const auto& row : M.phi)
        for (const auto& s : row)
            if (s.lo() < 0) throw UnsupportedModeError("series mode requires entries in k[[u]]");
    Mat<FieldElem> A0;
    for (const auto& row : M.phi) {
        std::vector<FieldElem> r;
        for (const auto& s : row) r.push_back(s.coeff(0));
        A0.push_back(std::move(r));
    }
    if (mat_det_field(A0).is_zero())
        throw Error("series mode: solution obstructed at u-degree 0 (constant matrix singular)");
    auto sol0 = solve_semilinear_const(A0, M.rs);
    ExtPtr ext = sol0.ext;
    ExtRing er{ext};
    const int Q = static_cast<int>(ipow_ll(ext_base(ext).p, M.rs));
    // embed A_k into ext
    auto embed_mat = [&](int k) {
        Mat<ExtElem> Ak(static_cast<size_t>(d), std::vector<ExtElem>(static_cast<size_t>(d), ExtElem::zero(ext)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                Ak[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    ExtElem::from_base(ext, M.phi[static_cast<size_t>(i)][static_cast<size_t>(j)].coeff(k));
        return Ak;
    };
    Mat<ExtElem> A0e = embed_mat(0);
    Mat<ExtElem> A0inv = mat_inv_field(A0e, ExtElem::one(ext));
    out.ext = ext;
    out.constant_mode = false;
    out.count = sol0.count;
    for (const auto& x0 : sol0.basis) {
        // x[j] vectors over ext, j = 0..uprec-1
        std::vector<std::vector<ExtElem>> xs(static_cast<size_t>(uprec),
                                             std::vector<ExtElem>(static_cast<size_t>(d), ExtElem::zero(ext)));
        xs[0] = x0;
        for (int j = 1; j < uprec; ++j) {
            std::vector<ExtElem> rhs(static_cast<size_t>(d), ExtElem::zero(ext));
            // LHS term x_{j/Q}^(Q) when Q | j
            if (j % Q == 0) {
                for (int i = 0; i < d; ++i)
                    rhs[static_cast<size_t>(i)] = xs[static_cast<size_t>(j / Q)][static_cast<size_t>(i)].frobenius(M.rs);
            }
            // minus sum_{k>=1} A_k x_{j-k}
            for (int k = 1; k <= j; ++k) {
                Mat<ExtElem> Ak = embed_mat(k);
                for (int i = 0; i < d; ++i) {
                    ExtElem acc = ExtElem::zero(ext);
                    for (int t = 0; t < d; ++t)
                        acc = acc + Ak[static_cast<size_t>(i)][static_cast<size_t>(t)] * xs[static_cast<size_t>(j - k)][static_cast<size_t>(t)];
                    rhs[static_cast<size_t>(i)] = rhs[static_cast<size_t>(i)] - acc;
                }
            }
            xs[static_cast<size_t>(j)] = mat_vec(A0inv, rhs);
        }
        std::vector<ES> v;
        for (int i = 0; i < d; ++i) {
            ES s(er, 0, uprec);
            for (int j = 0; j < uprec; ++j) s.set(j, xs[static_cast<size_t>(j)][static_cast<size_t>(i)]);
            v.push_back(std::move(s));
        }
        out.basis.push_back(std::move(v));
    }
    return out;
}

bool verify_V(const PhiGammaP& M, const VResultP& v) {
    const int d = M.rank;
    ExtRing er{v.ext};
    for (const auto& vec : v.basis) {
        for (int i = 0; i < d; ++i) {
            ES lhs = frobenius_q(vec[static_cast<size_t>(i)], M.rs);
            ES rhs = ES::zero(er, lhs.prec());
            for (int j = 0; j < d; ++j) {
                const GS& aij = M.phi[static_cast<size_t>(i)][static_cast<size_t>(j)];
                ES a(er, aij.lo(), aij.prec());
                for (const auto& [e, c] : aij.coeffs()) a.set(e, ExtElem::from_base(v.ext, c));
                rhs = rhs + a * vec[static_cast<size_t>(j)];
            }
            if (!lhs.eq_at_shared_precision(rhs)) return false;
        }
    }
    return true;
}

// ---- functor D -------------------------------------------------------------------

namespace {

Mat<FieldElem> mat_frob(const Mat<FieldElem>& m, int e) {
    Mat<FieldElem> out = m;
    for (auto& row : out)
        for (auto& x : row) x = x.frobenius(e);
    return out;
}

Mat<FieldElem> mat_embed(const Mat<FieldElem>& m, const FieldDesc& target) {
    Mat<FieldElem> out = m;
    for (auto& row : out)
        for (auto& x : row) x = embed(x, target);
    return out;
}

bool mat_eq(const Mat<FieldElem>& a, const Mat<FieldElem>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j)
            if (!(a[i][j] == b[i][j])) return false;
    return true;
}

}  // namespace

Mat<FieldElem> hilbert90_solve(const Mat<FieldElem>& C0, const FieldDesc& k, int n, int rs) {
    const int d = static_cast<int>(C0.size());
    FieldDesc kp = make_field(k.p, k.m * n);
    Mat<FieldElem> C = mat_embed(C0, kp);
    const FieldElem one = FieldElem::one(kp);
    const FieldElem zero = FieldElem::zero(kp);
    // ascending closure: C sigma(C) ... sigma^(n-1)(C) = I
    Mat<FieldElem> closure = C;
    for (int i = 1; i < n; ++i) closure = mat_mul(closure, mat_frob(C, rs * i));
    if (!mat_eq(closure, mat_identity(d, one, zero)))
        throw Error("not a representation: cocycle closure fails");
    // Poincaré sum B = sum_i C_i sigma^i(T) over deterministic T until invertible
    std::vector<Mat<FieldElem>> Ci{mat_identity(d, one, zero)};
    for (int i = 1; i < n; ++i) Ci.push_back(mat_mul(Ci.back(), mat_frob(C, rs * (i - 1))));
    const long long qp = [&] {
        long long r = 1;
        for (int i = 0; i < kp.m; ++i) r *= kp.p;
        return r;
    }();
    const long long cap = 200000;
    for (long long code = 1; code < cap; ++code) {
        // T from code digits in base qp
        Mat<FieldElem> T(static_cast<size_t>(d), std::vector<FieldElem>(static_cast<size_t>(d), zero));
        long long c = code;
        for (int i = 0; i < d && c > 0; ++i)
            for (int j = 0; j < d && c > 0; ++j) {
                T[static_cast<size_t>(i)][static_cast<size_t>(j)] = FieldElem::from_code(kp, c % qp);
                c /= qp;
            }
        Mat<FieldElem> B(static_cast<size_t>(d), std::vector<FieldElem>(static_cast<size_t>(d), zero));
        for (int i = 0; i < n; ++i) {
            Mat<FieldElem> term = mat_mul(Ci[static_cast<size_t>(i)], mat_frob(T, rs * i));
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    B[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                        B[static_cast<size_t>(a)][static_cast<size_t>(b)] + term[static_cast<size_t>(a)][static_cast<size_t>(b)];
        }
        if (!mat_det_field(B).is_zero()) {
            // invariant check: C sigma(B) = B
            if (!mat_eq(mat_mul(C, mat_frob(B, rs)), B))
                throw Error("hilbert90: construction failed (unexpected)");
            return B;
        }
    }
    throw Error("hilbert90: no invertible trivialization found (unexpected)");
}

DResult functor_D_unramified(const FieldDesc& k, int n, const Mat<FieldElem>& C, int rs,
                             int uprec) {
    if (k.m != rs) throw Error("functor_D: residue field must be F_(p^rs)");
    const int d = static_cast<int>(C.size());
    FieldDesc kp = make_field(k.p, k.m * n);
    Mat<FieldElem> B = hilbert90_solve(C, k, n, rs);
    Mat<FieldElem> Ckp = mat_embed(C, kp);
    Mat<FieldElem> Binv = mat_inv_field(B, FieldElem::one(kp));
    Mat<FieldElem> A = mat_mul(Binv, mat_mul(Ckp, B));  // matPhi = B^-1 C B
    // descend entries to k when they lie in its image
    auto in_k = [&](const FieldElem& x) -> bool {
        for (const auto& y : all_elements(k))
            if (embed(y, kp) == x) return true;
        return false;
    };
    bool rational = true;
    for (const auto& row : A)
        for (const auto& x : row)
            if (!in_k(x)) rational = false;
    DResult res;
    res.level = n;
    res.B = B;
    res.descended_to_k = rational;
    if (rational) {
        Mat<FieldElem> Ak(static_cast<size_t>(d), std::vector<FieldElem>(static_cast<size_t>(d), FieldElem::zero(k)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (const auto& y : all_elements(k))
                    if (embed(y, kp) == A[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                        Ak[static_cast<size_t>(i)][static_cast<size_t>(j)] = y;
                        break;
                    }
        res.module = make_const_module(k, rs, Ak, uprec);
    } else {
        res.module = make_const_module(kp, rs, A, uprec);
    }
    // trivial Gamma matrices
    res.module.gam.clear();
    return res;
}

Mat<FieldElem> recovered_galois_matrix(const PhiGammaP& M) {
    auto v = functor_V(M);
    if (!v.constant_mode || !v.raw) throw UnsupportedModeError("recovery requires constant mode");
    return semilinear_sigma_matrix(*v.raw, M.rs);
}

namespace {

Mat<ExtElem> ext_mat_frob(const Mat<ExtElem>& m, int e) {
    Mat<ExtElem> out = m;
    for (auto& row : out)
        for (auto& x : row) x = x.frobenius(e);
    return out;
}

bool ext_mat_eq(const Mat<ExtElem>& a, const Mat<ExtElem>& b) {
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j)
            if (!(a[i][j] == b[i][j])) return false;
    return true;
}

}  // namespace

Mat<ExtElem> hilbert90_solve_ext(const Mat<ExtElem>& C, int rs, int n) {
    const int d = static_cast<int>(C.size());
    const ExtPtr ext = C[0][0].ctx();
    const ExtElem one = ExtElem::one(ext);
    const ExtElem zero = ExtElem::zero(ext);
    // sigma^i(C) computed incrementally
    std::vector<Mat<ExtElem>> sigC{C};
    for (int i = 1; i < n; ++i) sigC.push_back(ext_mat_frob(sigC.back(), rs));
    Mat<ExtElem> closure = C;
    for (int i = 1; i < n; ++i) closure = mat_mul(closure, sigC[static_cast<size_t>(i)]);
    if (!ext_mat_eq(closure, mat_identity(d, one, zero)))
        throw Error("not a representation: cocycle closure fails");
    std::vector<Mat<ExtElem>> Ci{mat_identity(d, one, zero)};
    for (int i = 1; i < n; ++i) Ci.push_back(mat_mul(Ci.back(), sigC[static_cast<size_t>(i - 1)]));
    const int p = ext_base(ext).p;
    const int dim = ext_fp_dim(ext);
    // deterministic full-coordinate candidates: identity first, then a
    // seeded sweep of the whole matrix space
    for (long long code = 0; code < 4096; ++code) {
        Mat<ExtElem> T(static_cast<size_t>(d), std::vector<ExtElem>(static_cast<size_t>(d), zero));
        if (code == 0) {
            T = mat_identity(d, one, zero);
        } else {
            unsigned long long st = 0x9e3779b97f4a7c15ULL * static_cast<unsigned long long>(code);
            auto next = [&st]() {
                st += 0x9e3779b97f4a7c15ULL;
                unsigned long long z = st;
                z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
                z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
                return z ^ (z >> 31);
            };
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    std::vector<int> v(static_cast<size_t>(dim), 0);
                    for (int t = 0; t < dim; ++t)
                        v[static_cast<size_t>(t)] = static_cast<int>(next() % static_cast<unsigned long long>(p));
                    T[static_cast<size_t>(i)][static_cast<size_t>(j)] = ExtElem::from_fp_coords(ext, v);
                }
        }
        Mat<ExtElem> B(static_cast<size_t>(d), std::vector<ExtElem>(static_cast<size_t>(d), zero));
        Mat<ExtElem> sigT = T;
        for (int i = 0; i < n; ++i) {
            Mat<ExtElem> term = mat_mul(Ci[static_cast<size_t>(i)], sigT);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    B[static_cast<size_t>(a)][static_cast<size_t>(b)] =
                        B[static_cast<size_t>(a)][static_cast<size_t>(b)] + term[static_cast<size_t>(a)][static_cast<size_t>(b)];
            if (i + 1 < n) sigT = ext_mat_frob(sigT, rs);
        }
        if (!mat_det_field(B).is_zero()) {
            if (!ext_mat_eq(mat_mul(C, ext_mat_frob(B, rs)), B))
                throw Error("hilbert90_ext: construction failed (unexpected)");
            return B;
        }
    }
    throw Error("hilbert90_ext: no invertible trivialization found (unexpected)");
}

std::optional<Mat<ExtElem>> twisted_coboundary_solve(const Mat<ExtElem>& R,
                                                     const Mat<ExtElem>& rhs, int rs) {
    const int d = static_cast<int>(R.size());
    const ExtPtr ext = R[0][0].ctx();
    const int p = ext_base(ext).p;
    const int dim = ext_fp_dim(ext);
    const int n = d * d * dim;
    // unknowns: Z entries flattened; equation R sigma(Z) - Z = rhs
    FpMat big = FpMat::zero(p, n, n);
    // column basis vectors
    for (int col = 0; col < n; ++col) {
        int entry = col / dim;
        int coord = col % dim;
        std::vector<int> v(static_cast<size_t>(dim), 0);
        v[static_cast<size_t>(coord)] = 1;
        ExtElem e = ExtElem::from_fp_coords(ext, v);
        // Z with only that entry
        int zi = entry / d, zj = entry % d;
        ExtElem se = e.frobenius(rs);
        // (R sigma(Z))_{i, zj} = R_{i, zi} * sigma(e)
        for (int i = 0; i < d; ++i) {
            ExtElem val = R[static_cast<size_t>(i)][static_cast<size_t>(zi)] * se;
            if (i == zi) {
                // subtract Z itself: -e at (zi, zj) handled below
            }
            auto fc = val.fp_coords();
            int rowbase = (i * d + zj) * dim;
            for (int t = 0; t < dim; ++t)
                big.at(rowbase + t, col) = (big.at(rowbase + t, col) + fc[static_cast<size_t>(t)]) % p;
        }
        auto ec = e.fp_coords();
        int rowbase = (zi * d + zj) * dim;
        for (int t = 0; t < dim; ++t)
            big.at(rowbase + t, col) =
                ((big.at(rowbase + t, col) - ec[static_cast<size_t>(t)]) % p + p) % p;
    }
    std::vector<int> flat;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto v = rhs[static_cast<size_t>(i)][static_cast<size_t>(j)].fp_coords();
            flat.insert(flat.end(), v.begin(), v.end());
        }
    auto sol = fp_solve(big, flat);
    if (!sol) return std::nullopt;
    Mat<ExtElem> Z(static_cast<size_t>(d), std::vector<ExtElem>(static_cast<size_t>(d), ExtElem::zero(ext)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            int col = (i * d + j) * dim;
            std::vector<int> part(sol->begin() + col, sol->begin() + col + dim);
            Z[static_cast<size_t>(i)][static_cast<size_t>(j)] = ExtElem::from_fp_coords(ext, part);
        }
    return Z;
}

bool conjugate_over(const Mat<FieldElem>& A, const Mat<FieldElem>& B, const FieldDesc& k) {
    const int d = static_cast<int>(A.size());
    long long q = 1;
    for (int i = 0; i < k.m; ++i) q *= k.p;
    long long total = 1;
    for (int i = 0; i < d * d; ++i) total *= q;
    if (total > 2000000) throw UnsupportedModeError("conjugacy search too large");
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        Mat<FieldElem> U(static_cast<size_t>(d), std::vector<FieldElem>(static_cast<size_t>(d), FieldElem::zero(k)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                U[static_cast<size_t>(i)][static_cast<size_t>(j)] = FieldElem::from_code(k, c % q);
                c /= q;
            }
        if (mat_det_field(U).is_zero()) continue;
        if (mat_eq(mat_mul(A, U), mat_mul(U, B))) return true;  // U^-1 A U = B
    }
    return false;
}

}  // namespace phigamma
