#include "phigamma/lift0.hpp"

#include <algorithm>

namespace phigamma {

namespace {

long long ipow_ll(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

CoeffRingDesc make_coeff_ring(LocalRing base, LTData lt, int s, int N) {
    CoeffRingDesc A;
    A.base = std::move(base);
    A.lt = std::move(lt);
    A.r = ring_residue(A.lt.ring.ctx).m;
    A.s = s;
    A.N = N;
    if (ring_residue(A.base.ctx).m != A.r * s)
        throw Error("coeff ring: residue degree must be r*s");
    return A;
}

LocalInt embed_coeff(const CoeffRingDesc& A, const LocalInt& x) {
    const LocalRingPtr& OF = A.lt.ring.ctx;
    const LocalRingPtr& OK = A.base.ctx;
    const FieldDesc& kF = ring_residue(OF);
    const FieldDesc& kK = ring_residue(OK);
    auto ds = x.digits();
    const int n = std::min<int>(static_cast<int>(ds.size()), ring_precision(OK));
    if (kF == kK && ring_eisenstein(OF) == ring_eisenstein(OK)) {
        LocalInt out = LocalInt::zero(OK);
        LocalInt w = LocalInt::uniformizer(OK);
        LocalInt pw = LocalInt::one(OK);
        for (int i = 0; i < n; ++i) {
            out = out + LocalInt::teichmuller(OK, ds[static_cast<size_t>(i)]) * pw;
            pw = pw * w;
        }
        return out;
    }
    if (ring_ramification(OF) != 1)
        throw UnsupportedModeError("embed_coeff: ramified O_F into a different ring");
    // pi_F = p
    LocalInt out = LocalInt::zero(OK);
    LocalInt p = LocalInt::from_int(OK, ring_p(OK));
    LocalInt pw = LocalInt::one(OK);
    for (int i = 0; i < n; ++i) {
        out = out + LocalInt::teichmuller(OK, embed(ds[static_cast<size_t>(i)], kK)) * pw;
        pw = pw * p;
    }
    return out;
}

ASeries lt_series_in_base(const CoeffRingDesc& A, const LocalInt& a) {
    TruncSeries<LocalRing> s = lt_mul(A.lt, a);
    ASeries out(A.base, s.lo(), std::min(s.prec(), A.N));
    for (const auto& [e, c] : s.coeffs()) out.set(e, embed_coeff(A, c));
    return out;
}

// Inverse of a unit of the coefficient ring whose reduction mod pi has
// u-valuation vbar (e.g. [pi](u), reduction u^q): Newton iteration from the
// lifted residue inverse. The support reaches down to -vbar*(M+1).
ASeries aseries_unit_inverse(const CoeffRingDesc& A, const ASeries& s) {
    const LocalRingPtr& OK = A.base.ctx;
    const int M = ring_precision(OK);
    auto sbar = reduce_series(s);
    if (sbar.is_zero()) throw Error("coefficient-ring inverse: not a unit at precision");
    auto ibar = sbar.inverse();
    const int lo = ibar.valuation() * (1 + M) - 1;
    const int hi = A.N;
    ASeries y(A.base, -std::abs(lo), hi);
    for (const auto& [e, c] : ibar.coeffs())
        y.set(e, LocalInt::teichmuller(OK, c));
    ASeries two = ASeries::constant(A.base, LocalInt::from_int(OK, 2), hi);
    int steps = 1;
    while ((1 << steps) < M + 1) ++steps;
    for (int i = 0; i <= steps; ++i) {
        ASeries t = two - s * y;
        y = (y * t).with_window(-std::abs(lo), hi);
    }
    return y;
}

ASeries phi_lift(const CoeffRingDesc& A, const ASeries& x) {
    // relative Frobenius on the constants (p^r-power lift, trivial on W(k_F))
    ASeries y(x.ring(), x.lo(), x.prec());
    for (const auto& [e, c] : x.coeffs()) y.set(e, c.frobenius(A.r));
    ASeries pi_u = lt_series_in_base(A, A.lt.pi);
    if (!x.coeffs().empty() && x.coeffs().begin()->first < 0) {
        ASeries inv = aseries_unit_inverse(A, pi_u);
        return substitute_laurent(y, pi_u, &inv);
    }
    return substitute_laurent(y, pi_u);
}

ASeries phi_rs(const CoeffRingDesc& A, const ASeries& x) {
    ASeries y = x;
    for (int i = 0; i < A.s; ++i) y = phi_lift(A, y);
    return y;
}

ASeries gamma_lift(const CoeffRingDesc& A, const LocalInt& c, const ASeries& x) {
    if (!c.is_unit()) throw Error("gamma_lift: chi-value must be a unit");
    ASeries cu = lt_series_in_base(A, c);
    return substitute_laurent(x, cu);
}

// ---- LiftedConstants ------------------------------------------------------------

LiftedConstants::Level LiftedConstants::flatten(const ExtPtr& ext) {
    Level lv;
    lv.ext = ext;
    const FieldDesc& base = ext_base(ext);
    const int n = ext_fp_dim(ext);
    const long long q = ipow_ll(base.p, base.m);
    // primitive element w = z + lambda*theta, lambda scanning the base field
    ExtElem z = ExtElem::gen(ext);
    std::vector<int> theta_coeffs(static_cast<size_t>(base.m), 0);
    if (base.m >= 2) theta_coeffs[1] = 1;
    ExtElem theta = ExtElem::from_base(ext, FieldElem::from_coeffs(base, theta_coeffs));
    bool found = false;
    for (long long lam = 0; lam < q && !found; ++lam) {
        ExtElem w = z + ExtElem::from_base(ext, FieldElem::from_code(base, lam)) * theta;
        auto mp = ext_minpoly_fp(w);
        if (static_cast<int>(mp.size()) - 1 == n) {
            lv.gen = w;
            lv.flat = detail::field_ctx_explicit(base.p, mp);
            found = true;
        }
    }
    if (!found) throw Error("flatten: no primitive element found (unexpected)");
    ExtElem cur = ExtElem::one(ext);
    for (int j = 0; j < n; ++j) {
        lv.pow_coords.push_back(cur.fp_coords());
        cur = cur * lv.gen;
    }
    return lv;
}

FieldElem LiftedConstants::level_to_flat(const Level& lv, const ExtElem& x) const {
    const int n = static_cast<int>(lv.pow_coords.size());
    const int p = lv.flat->p;
    FpMat P = FpMat::zero(p, n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) P.at(i, j) = lv.pow_coords[static_cast<size_t>(j)][static_cast<size_t>(i)];
    auto sol = fp_solve(P, x.fp_coords());
    if (!sol) throw Error("flatten: coordinate solve failed (unexpected)");
    return FieldElem::from_ctx(lv.flat, *sol);
}

ExtElem LiftedConstants::level_from_flat(const Level& lv, const FieldElem& d) const {
    ExtElem acc = ExtElem::zero(lv.ext);
    const auto& c = d.coeffs();
    for (size_t j = c.size(); j-- > 0;) {
        acc = acc * lv.gen;
        if (c[j] != 0)
            acc = acc + ExtElem::from_base(lv.ext, FieldElem::from_int(ext_base(lv.ext), c[j]));
    }
    return acc;
}

LiftedConstants::LiftedConstants(const FieldDesc& kK, ExtPtr level0,
                                 const std::vector<long long>& eis, int M)
    : kK_(kK), eis_(eis), M_(M) {
    levels_.push_back(flatten(level0));
    ring_ = make_local_ring_explicit(levels_.back().flat, M_, eis_);
}

int LiftedConstants::total_degree_over_kK() const { return levels_.back().flat->m / kK_.m; }

FieldElem LiftedConstants::to_flat(const ExtElem& x) const {
    return level_to_flat(levels_.back(), x);
}

ExtElem LiftedConstants::from_flat(const FieldElem& d) const {
    return level_from_flat(levels_.back(), d);
}

FieldElem LiftedConstants::kK_to_flat(const FieldElem& a) const {
    FieldElem cur = a;
    for (const auto& lv : levels_) cur = level_to_flat(lv, ExtElem::from_base(lv.ext, cur));
    return cur;
}

std::optional<FieldElem> LiftedConstants::flat_to_kK(const FieldElem& d) const {
    FieldElem cur = d;
    for (size_t i = levels_.size(); i-- > 0;) {
        ExtElem e = level_from_flat(levels_[i], cur);
        const auto& c = e.coeffs();
        for (size_t j = 1; j < c.size(); ++j)
            if (!c[j].is_zero()) return std::nullopt;
        cur = c[0];
    }
    return cur;
}

LocalInt LiftedConstants::embed_base(const LocalInt& x) const {
    auto ds = x.digits();
    LocalInt out = LocalInt::zero(ring_);
    LocalInt w = LocalInt::uniformizer(ring_);
    LocalInt pw = LocalInt::one(ring_);
    for (int i = 0; i < std::min<int>(static_cast<int>(ds.size()), M_); ++i) {
        out = out + LocalInt::teichmuller(ring_, kK_to_flat(ds[static_cast<size_t>(i)])) * pw;
        pw = pw * w;
    }
    return out;
}

std::optional<LocalInt> LiftedConstants::project_base(const LocalInt& x,
                                                      const LocalRingPtr& baseK) const {
    auto ds = x.digits();
    LocalInt out = LocalInt::zero(baseK);
    LocalInt w = LocalInt::uniformizer(baseK);
    LocalInt pw = LocalInt::one(baseK);
    for (int i = 0; i < std::min<int>(static_cast<int>(ds.size()), ring_precision(baseK)); ++i) {
        auto back = flat_to_kK(ds[static_cast<size_t>(i)]);
        if (!back) return std::nullopt;
        out = out + LocalInt::teichmuller(baseK, *back) * pw;
        pw = pw * w;
    }
    return out;
}

LiftedConstants LiftedConstants::grown() const {
    LiftedConstants next = *this;
    const auto& topflat = levels_.back().flat;
    FieldDesc flat_desc{topflat->p, topflat->m, topflat->modulus};
    ExtPtr up = make_extension(flat_desc, topflat->p);
    next.levels_.push_back(flatten(up));
    next.ring_ = make_local_ring_explicit(next.levels_.back().flat, M_, eis_);
    return next;
}

LocalInt LiftedConstants::promote(const LocalInt& x_prev) const {
    auto ds = x_prev.digits();
    const Level& top = levels_.back();
    LocalInt out = LocalInt::zero(ring_);
    LocalInt w = LocalInt::uniformizer(ring_);
    LocalInt pw = LocalInt::one(ring_);
    for (int i = 0; i < std::min<int>(static_cast<int>(ds.size()), M_); ++i) {
        FieldElem nd = level_to_flat(top, ExtElem::from_base(top.ext, ds[static_cast<size_t>(i)]));
        out = out + LocalInt::teichmuller(ring_, nd) * pw;
        pw = pw * w;
    }
    return out;
}

// ---- modules and the lifted functor V ---------------------------------------------

PhiGamma0 make_const_module0(const CoeffRingDesc& A, const Mat<LocalInt>& matPhi) {
    PhiGamma0 M;
    M.base = A.base;
    M.rank = static_cast<int>(matPhi.size());
    M.rs = A.r * A.s;
    for (const auto& row : matPhi) {
        std::vector<ASeries> out;
        for (const auto& a : row) out.push_back(ASeries::constant(A.base, a, A.N));
        M.phi.push_back(std::move(out));
    }
    return M;
}

bool const_mode0(const PhiGamma0& M) {
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

Mat<LocalInt> const_phi_matrix0(const PhiGamma0& M) {
    if (!const_mode0(M)) throw UnsupportedModeError("module is not in constant mode");
    Mat<LocalInt> A;
    for (const auto& row : M.phi) {
        std::vector<LocalInt> out;
        for (const auto& s : row) out.push_back(s.coeff(0));
        A.push_back(std::move(out));
    }
    return A;
}

VLiftResult functor_V_lift(const PhiGamma0& M, const CoeffRingDesc& A) {
    if (!const_mode0(M)) throw UnsupportedModeError("functor_V_lift: constant mode required");
    const int d = M.rank;
    const int rs = M.rs;
    const LocalRingPtr& baseK = M.base.ctx;
    const int Mprec = ring_precision(baseK);
    const FieldDesc kK = ring_residue(baseK);

    Mat<LocalInt> Amat = const_phi_matrix0(M);
    // residue problem
    Mat<FieldElem> Abar;
    for (const auto& row : Amat) {
        std::vector<FieldElem> r;
        for (const auto& x : row) r.push_back(x.reduce());
        Abar.push_back(std::move(r));
    }
    auto sol0 = solve_semilinear_const(Abar, rs);

    auto cst = std::make_shared<LiftedConstants>(kK, sol0.ext, ring_eisenstein(baseK), Mprec);
    int growths = 0;

    // lift data into the constants ring
    auto lift_matrix = [&](const LiftedConstants& lc) {
        Mat<LocalInt> out;
        for (const auto& row : Amat) {
            std::vector<LocalInt> r;
            for (const auto& x : row) r.push_back(lc.embed_base(x));
            out.push_back(std::move(r));
        }
        return out;
    };
    Mat<LocalInt> Alc = lift_matrix(*cst);

    std::vector<std::vector<LocalInt>> ys;
    for (const auto& vec : sol0.basis) {
        std::vector<LocalInt> y;
        for (const auto& x : vec)
            y.push_back(LocalInt::teichmuller(cst->ring(), cst->to_flat(x)));
        ys.push_back(std::move(y));
    }

    auto phi_vec = [&](const std::vector<LocalInt>& v) {
        std::vector<LocalInt> out;
        for (const auto& x : v) out.push_back(x.frobenius(rs));
        return out;
    };
    auto mul_vec = [&](const Mat<LocalInt>& mat, const std::vector<LocalInt>& v) {
        std::vector<LocalInt> out;
        for (int i = 0; i < d; ++i) {
            LocalInt acc = LocalInt::zero(cst->ring());
            for (int j = 0; j < d; ++j) acc = acc + mat[static_cast<size_t>(i)][static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
            out.push_back(acc);
        }
        return out;
    };

    for (int t = 1; t < Mprec; ++t) {
        for (size_t k = 0; k < ys.size(); ++k) {
            for (int attempt = 0;; ++attempt) {
                auto& y = ys[k];
                auto fy = phi_vec(y);
                auto ay = mul_vec(Alc, y);
                std::vector<ExtElem> rhs;
                bool ok_div = true;
                for (int i = 0; i < d; ++i) {
                    LocalInt r = fy[static_cast<size_t>(i)] - ay[static_cast<size_t>(i)];
                    if (r.valuation() < t) {
                        ok_div = false;
                        break;
                    }
                    FieldElem digit = r.div_pi(t).reduce();
                    rhs.push_back(-cst->from_flat(digit));
                }
                if (!ok_div) throw Error("functor_V_lift: residual not divisible at digit " +
                                         std::to_string(t) + " (unexpected)");
                // A-bar over the current top extension
                Mat<ExtElem> Atop;
                for (const auto& row : Abar) {
                    std::vector<ExtElem> r;
                    for (const auto& x : row) r.push_back(cst->from_flat(cst->kK_to_flat(x)));
                    Atop.push_back(std::move(r));
                }
                auto z = semilinear_affine_solve(Atop, rs, rhs);
                if (z) {
                    LocalInt piT = LocalInt::uniformizer(cst->ring()).pow(t);
                    for (int i = 0; i < d; ++i)
                        y[static_cast<size_t>(i)] =
                            y[static_cast<size_t>(i)] +
                            LocalInt::teichmuller(cst->ring(), cst->to_flat((*z)[static_cast<size_t>(i)])) * piT;
                    break;
                }
                if (attempt >= 4)
                    throw Error("functor_V_lift: digit equation unsolvable at digit " +
                                std::to_string(t) +
                                " (working unramified tower too small)");
                // grow the constants and promote all state
                auto grown = std::make_shared<LiftedConstants>(cst->grown());
                for (auto& vec : ys)
                    for (auto& x : vec) x = grown->promote(x);
                cst = grown;
                Alc = lift_matrix(*cst);
                ++growths;
            }
        }
    }

    VLiftResult out;
    out.cst = cst;
    out.basis = std::move(ys);
    out.growth_steps = growths;
    return out;
}

bool verify_V_lift(const PhiGamma0& M, const CoeffRingDesc& A, const VLiftResult& v) {
    (void)A;
    Mat<LocalInt> Amat = const_phi_matrix0(M);
    const int d = M.rank;
    for (const auto& vec : v.basis) {
        for (int i = 0; i < d; ++i) {
            LocalInt lhs = vec[static_cast<size_t>(i)].frobenius(M.rs);
            LocalInt rhs = LocalInt::zero(v.cst->ring());
            for (int j = 0; j < d; ++j)
                rhs = rhs + v.cst->embed_base(Amat[static_cast<size_t>(i)][static_cast<size_t>(j)]) * vec[static_cast<size_t>(j)];
            if (!lhs.eq(rhs)) return false;
        }
    }
    return true;
}

EtaleReport check_etale_phigamma0(const PhiGamma0& M, const CoeffRingDesc& A) {
    EtaleReport rep;
    ASeries det = mat_det_ring(M.phi, ASeries::zero(M.base, A.N));
    bool unit = false;
    for (const auto& [e, c] : det.coeffs())
        if (c.is_unit()) unit = true;
    if (!unit) {
        rep.ok = false;
        rep.violation = "not étale: det(matPhi) is not a unit of the coefficient ring";
        return rep;
    }
    // compatibility: G * gamma(A) = A * phi(G) entrywise at precision
    auto phi_mat = [&](const Mat<ASeries>& m) {
        Mat<ASeries> out;
        for (const auto& row : m) {
            std::vector<ASeries> r;
            for (const auto& s : row) r.push_back(phi_rs(A, s));
            out.push_back(std::move(r));
        }
        return out;
    };
    auto mul_mat = [&](const Mat<ASeries>& a, const Mat<ASeries>& b) {
        const size_t n = a.size();
        Mat<ASeries> r(n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                ASeries acc = a[i][0] * b[0][j];
                for (size_t t = 1; t < n; ++t) acc = acc + a[i][t] * b[t][j];
                r[i].push_back(acc);
            }
        return r;
    };
    // default chi-values, mirroring make_norm_field's generating set
    std::vector<LocalInt> chis;
    const LocalRingPtr& OF = A.lt.ring.ctx;
    if (!(ring_p(OF) == 2 && A.r == 1))
        chis.push_back(LocalInt::teichmuller(OF, multiplicative_generator(ring_residue(OF))));
    chis.push_back(LocalInt::one(OF) + LocalInt::uniformizer(OF));
    if (M.gam.size() > chis.size()) {
        rep.ok = false;
        rep.violation = "module carries more gamma matrices than generators";
        return rep;
    }
    auto gamma_mat = [&](const Mat<ASeries>& m, const LocalInt& c) {
        Mat<ASeries> out;
        for (const auto& row : m) {
            std::vector<ASeries> r;
            for (const auto& s : row) r.push_back(gamma_lift(A, c, s));
            out.push_back(std::move(r));
        }
        return out;
    };
    for (size_t gi = 0; gi < M.gam.size(); ++gi) {
        const auto& G = M.gam[gi];
        auto lhs = mul_mat(G, gamma_mat(M.phi, chis[gi]));
        auto rhs = mul_mat(M.phi, phi_mat(G));
        for (size_t i = 0; i < lhs.size(); ++i)
            for (size_t j = 0; j < lhs.size(); ++j)
                if (!series_eq_mod(lhs[i][j], rhs[i][j], ring_precision(M.base.ctx))) {
                    rep.ok = false;
                    rep.violation = "phi/gamma compatibility fails";
                    return rep;
                }
    }
    return rep;
}

}  // namespace phigamma
