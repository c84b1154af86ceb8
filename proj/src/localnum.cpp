#include "phigamma/localnum.hpp"

#include <algorithm>
#include <sstream>

namespace phigamma {
namespace detail {

namespace {

long long mulmod(long long a, long long b, long long m) {
    return static_cast<long long>(static_cast<__int128>(a) * b % m);
}

long long ipow_ll(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

// W(k) mod p^Mp as Z/p^Mp[T]/(H), H a monic lift of the residue modulus.
struct WLayer {
    int p = 0;
    int n = 1;           // residue degree
    int Mp = 1;
    long long pk = 0;    // p^Mp
    FieldCtxPtr res;     // residue field context
    FieldDesc resdesc;
    std::vector<long long> H;        // size n+1, monic
    std::vector<long long> sigmaT;   // image of T under the Frobenius lift

    using El = std::vector<long long>;  // length n, entries mod pk

    El zero() const { return El(static_cast<size_t>(n), 0); }
    El from_int(long long v) const {
        El e = zero();
        long long r = v % pk;
        if (r < 0) r += pk;
        e[0] = r;
        return e;
    }
    bool is_zero(const El& a) const {
        return std::all_of(a.begin(), a.end(), [](long long x) { return x == 0; });
    }
    El add(const El& a, const El& b) const {
        El r = a;
        for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] = (r[static_cast<size_t>(i)] + b[static_cast<size_t>(i)]) % pk;
        return r;
    }
    El sub(const El& a, const El& b) const {
        El r = a;
        for (int i = 0; i < n; ++i)
            r[static_cast<size_t>(i)] = ((r[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]) % pk + pk) % pk;
        return r;
    }
    El neg(const El& a) const { return sub(zero(), a); }
    El mul(const El& a, const El& b) const {
        std::vector<long long> prod(static_cast<size_t>(2 * n - 1), 0);
        for (int i = 0; i < n; ++i) {
            if (a[static_cast<size_t>(i)] == 0) continue;
            for (int j = 0; j < n; ++j)
                prod[static_cast<size_t>(i + j)] =
                    (prod[static_cast<size_t>(i + j)] + mulmod(a[static_cast<size_t>(i)], b[static_cast<size_t>(j)], pk)) % pk;
        }
        // reduce by monic H
        for (int d = 2 * n - 2; d >= n; --d) {
            long long c = prod[static_cast<size_t>(d)];
            if (c == 0) continue;
            prod[static_cast<size_t>(d)] = 0;
            for (int i = 0; i < n; ++i)
                prod[static_cast<size_t>(d - n + i)] =
                    ((prod[static_cast<size_t>(d - n + i)] - mulmod(c, H[static_cast<size_t>(i)], pk)) % pk + pk) % pk;
        }
        prod.resize(static_cast<size_t>(n));
        return prod;
    }
    El scal(long long c, const El& a) const {
        El r = a;
        c %= pk;
        if (c < 0) c += pk;
        for (auto& x : r) x = mulmod(x, c, pk);
        return r;
    }
    El pow(El b, long long e) const {
        El r = from_int(1);
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }
    FieldElem reduce(const El& a) const {
        std::vector<int> c(static_cast<size_t>(res->m), 0);
        for (int i = 0; i < n; ++i) c[static_cast<size_t>(i)] = static_cast<int>(a[static_cast<size_t>(i)] % p);
        return FieldElem::from_ctx(res, std::move(c));
    }
    El lift(const FieldElem& a) const {
        El e = zero();
        const auto& c = a.coeffs();
        for (int i = 0; i < n && i < static_cast<int>(c.size()); ++i) e[static_cast<size_t>(i)] = c[static_cast<size_t>(i)];
        return e;
    }
    // unit inverse by lifting the residue inverse
    El inv(const El& a) const {
        FieldElem r0 = reduce(a);
        if (r0.is_zero()) throw Error("WLayer::inv: not a unit");
        El y = lift(r0.inv());
        int steps = 1;
        while ((1 << steps) < Mp + 1) ++steps;
        for (int i = 0; i <= steps; ++i) {
            El t = sub(from_int(2), mul(a, y));
            y = mul(y, t);
        }
        return y;
    }
    // evaluate a polynomial (coeffs f_0..f_d in Z/pk) at x
    El eval_int_poly(const std::vector<long long>& f, const El& x) const {
        El acc = zero();
        for (size_t i = f.size(); i-- > 0;) {
            acc = mul(acc, x);
            acc = add(acc, from_int(f[i]));
        }
        return acc;
    }
    // Frobenius lift: evaluate at sigmaT, k times
    El frob(const El& a, int k) const {
        if (n == 1) return a;
        El r = a;
        k %= n;
        for (int t = 0; t < k; ++t) {
            El acc = zero();
            El sT = sigmaT;
            for (size_t i = r.size(); i-- > 0;) {
                acc = mul(acc, sT);
                acc = add(acc, from_int(r[i]));
            }
            r = acc;
        }
        return r;
    }
    // Teichmüller section of the residue field
    El teich(const FieldElem& a) const {
        if (a.is_zero()) return zero();
        if (a.is_one()) return from_int(1);
        El x = lift(a);
        for (int i = 0; i < Mp + 1; ++i) {
            // x <- x^(p^n), via n successive p-th powers
            for (int t = 0; t < n; ++t) x = pow(x, p);
        }
        return x;
    }
    int vp(const El& a) const {
        if (is_zero(a)) return Mp;
        int best = Mp;
        for (auto x : a) {
            if (x == 0) continue;
            int v = 0;
            long long y = x;
            while (y % p == 0) {
                ++v;
                y /= p;
            }
            best = std::min(best, v);
        }
        return best;
    }
    El div_p(const El& a) const {  // exact division; top digit garbage
        El r = a;
        for (auto& x : r) x /= p;
        return r;
    }
};

struct LocalRingCtx {
    int p = 0;
    int M = 1;            // pi-adic precision
    int e = 1;            // ramification (Eisenstein degree)
    WLayer W;
    std::vector<long long> eis;          // integer coefficients c_0..c_{e-1} (monic S^e implied)
    std::vector<WLayer::El> rho;         // p = S * rho for e >= 2 (element of the ring, length e)
    FieldDesc residue() const { return W.resdesc; }
};

namespace {

WLayer build_wlayer(FieldCtxPtr res, const FieldDesc& resdesc, int Mp) {
    WLayer w;
    w.p = resdesc.p;
    w.n = resdesc.m;
    w.Mp = Mp;
    if (Mp < 1 || ipow_ll(w.p, Mp) > (1LL << 62) / w.p) throw Error("local ring: precision too large");
    w.pk = ipow_ll(w.p, Mp);
    w.res = std::move(res);
    w.resdesc = resdesc;
    w.H.assign(resdesc.modulus.begin(), resdesc.modulus.end());
    w.H.resize(static_cast<size_t>(w.n) + 1, 0);
    w.H[static_cast<size_t>(w.n)] = 1;
    // sigmaT: Newton root of H starting from T^p
    if (w.n >= 2) {
        std::vector<long long> hp;  // H'
        for (int i = 1; i <= w.n; ++i)
            hp.push_back(static_cast<long long>(i) % w.pk * (w.H[static_cast<size_t>(i)] % w.pk) % w.pk);
        WLayer::El y = w.zero();
        if (w.n > 1) y[1] = 1;
        y = w.pow(y, w.p);  // T^p
        int steps = 1;
        while ((1 << steps) < Mp + 1) ++steps;
        for (int i = 0; i <= steps; ++i) {
            WLayer::El hy = w.eval_int_poly(w.H, y);
            WLayer::El hpy = w.eval_int_poly(hp, y);
            y = w.sub(y, w.mul(hy, w.inv(hpy)));
        }
        if (!w.is_zero(w.eval_int_poly(w.H, y))) throw Error("local ring: Frobenius lift failed");
        w.sigmaT = y;
    }
    return w;
}

LocalRingPtr build_ring(FieldCtxPtr resctx, const FieldDesc& resdesc, int M,
                        const std::vector<long long>& eis) {
    if (M < 1) throw Error("local ring: precision must be >= 1");
    auto ctx = std::make_shared<LocalRingCtx>();
    ctx->p = resdesc.p;
    ctx->M = M;
    ctx->e = eis.empty() ? 1 : static_cast<int>(eis.size());
    const int Mp = (M + ctx->e - 1) / ctx->e + 1;  // one guard digit
    ctx->W = build_wlayer(std::move(resctx), resdesc, Mp);
    ctx->eis = eis;
    if (ctx->e >= 2) {
        const long long pk = ctx->W.pk;
        // Eisenstein checks on integer coefficients
        if (eis[0] % ctx->p != 0 || (eis[0] / ctx->p) % ctx->p == 0)
            throw Error("local ring: constant term must have valuation exactly 1");
        for (size_t i = 1; i < eis.size(); ++i)
            if (eis[i] % ctx->p != 0) throw Error("local ring: polynomial is not Eisenstein");
        // p = S * rho with rho = -u0^{-1} (S^{e-1} + sum_{1<=i<e} (c_i/p) S^{i-1} * p ... )
        // derivation: S^e = -c_0 - sum_{i>=1} c_i S^i and c_0 = p u0, so
        // p = -u0^{-1} (S^e + sum_{i>=1} c_i S^i) = S * [-u0^{-1} (S^{e-1} + sum c_i S^{i-1})]
        long long u0 = eis[0] / ctx->p;
        WLayer::El u0inv = ctx->W.inv(ctx->W.from_int(u0));
        ctx->rho.assign(static_cast<size_t>(ctx->e), ctx->W.zero());
        for (int i = 1; i < ctx->e; ++i)
            ctx->rho[static_cast<size_t>(i - 1)] = ctx->W.from_int(eis[static_cast<size_t>(i)]);
        ctx->rho[static_cast<size_t>(ctx->e - 1)] = ctx->W.from_int(1);
        for (auto& c : ctx->rho) c = ctx->W.neg(ctx->W.mul(u0inv, c));
    }
    return ctx;
}

}  // namespace
}  // namespace detail

using detail::LocalRingCtx;

LocalRingPtr make_local_ring(const FieldDesc& residue, int M, const std::vector<long long>& eis) {
    return detail::build_ring(detail::field_ctx(residue), residue, M, eis);
}

LocalRingPtr make_local_ring_explicit(detail::FieldCtxPtr resctx, int M,
                                      const std::vector<long long>& eis) {
    FieldDesc d{resctx->p, resctx->m, resctx->modulus};
    return detail::build_ring(std::move(resctx), d, M, eis);
}

int ring_precision(const LocalRingPtr& r) { return r->M; }
int ring_ramification(const LocalRingPtr& r) { return r->e; }
const FieldDesc& ring_residue(const LocalRingPtr& r) { return r->W.resdesc; }
int ring_p(const LocalRingPtr& r) { return r->p; }
detail::FieldCtxPtr ring_residue_ctx(const LocalRingPtr& r) { return r->W.res; }
long long ring_coeff_modulus(const LocalRingPtr& r) { return r->W.pk; }
const std::vector<long long>& ring_eisenstein(const LocalRingPtr& r) { return r->eis; }

// ---- LocalInt ---------------------------------------------------------------

LocalInt LocalInt::from_raw(const LocalRingPtr& r, std::vector<std::vector<long long>> c) {
    LocalInt x;
    x.r_ = r;
    x.c_ = std::move(c);
    x.c_.resize(static_cast<size_t>(r->e), r->W.zero());
    return x;
}

LocalInt LocalInt::zero(const LocalRingPtr& r) { return from_raw(r, {}); }

LocalInt LocalInt::one(const LocalRingPtr& r) { return from_int(r, 1); }

LocalInt LocalInt::from_int(const LocalRingPtr& r, long long v) {
    auto x = zero(r);
    x.c_[0] = r->W.from_int(v);
    return x;
}

LocalInt LocalInt::uniformizer(const LocalRingPtr& r) {
    if (r->e == 1) return from_int(r, r->p);
    auto x = zero(r);
    x.c_[1] = r->W.from_int(1);
    return x;
}

LocalInt LocalInt::teichmuller(const LocalRingPtr& r, const FieldElem& a) {
    auto x = zero(r);
    // accept elements of the residue field (or subfields via embedding)
    FieldElem b = a;
    if (!(a.desc() == r->W.resdesc)) b = embed(a, r->W.resdesc);
    x.c_[0] = r->W.teich(b);
    return x;
}

LocalInt LocalInt::operator+(const LocalInt& o) const {
    auto x = *this;
    for (size_t i = 0; i < c_.size(); ++i) x.c_[i] = r_->W.add(c_[i], o.c_[i]);
    return x;
}

LocalInt LocalInt::operator-(const LocalInt& o) const {
    auto x = *this;
    for (size_t i = 0; i < c_.size(); ++i) x.c_[i] = r_->W.sub(c_[i], o.c_[i]);
    return x;
}

LocalInt LocalInt::operator-() const {
    auto x = *this;
    for (auto& c : x.c_) c = r_->W.neg(c);
    return x;
}

LocalInt LocalInt::operator*(const LocalInt& o) const {
    const auto& W = r_->W;
    const int e = r_->e;
    std::vector<detail::WLayer::El> prod(static_cast<size_t>(2 * e - 1), W.zero());
    for (int i = 0; i < e; ++i) {
        if (W.is_zero(c_[static_cast<size_t>(i)])) continue;
        for (int j = 0; j < e; ++j)
            prod[static_cast<size_t>(i + j)] =
                W.add(prod[static_cast<size_t>(i + j)], W.mul(c_[static_cast<size_t>(i)], o.c_[static_cast<size_t>(j)]));
    }
    // reduce by S^e = -sum c_i S^i
    for (int d = 2 * e - 2; d >= e; --d) {
        auto c = prod[static_cast<size_t>(d)];
        if (W.is_zero(c)) continue;
        prod[static_cast<size_t>(d)] = W.zero();
        for (int i = 0; i < e; ++i) {
            if (r_->eis[static_cast<size_t>(i)] == 0) continue;
            auto t = W.scal(r_->eis[static_cast<size_t>(i)], c);
            prod[static_cast<size_t>(d - e + i)] = W.sub(prod[static_cast<size_t>(d - e + i)], t);
        }
    }
    prod.resize(static_cast<size_t>(e));
    return from_raw(r_, std::move(prod));
}

LocalInt LocalInt::pow(long long e) const {
    LocalInt r = one(r_);
    LocalInt b = *this;
    while (e) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

int LocalInt::valuation() const {
    const auto& W = r_->W;
    int best = r_->M;
    for (int i = 0; i < r_->e; ++i) {
        int vp = W.vp(c_[static_cast<size_t>(i)]);
        if (vp >= W.Mp) continue;
        best = std::min(best, r_->e * vp + i);
    }
    return std::min(best, r_->M);
}

bool LocalInt::is_zero() const { return valuation() >= r_->M; }

FieldElem LocalInt::reduce() const { return r_->W.reduce(c_[0]); }

LocalInt LocalInt::inv() const {
    if (!is_unit()) throw Error("LocalInt::inv: not a unit");
    LocalInt y = teichmuller(r_, reduce().inv());
    int total = r_->e * r_->W.Mp;
    int steps = 1;
    while ((1 << steps) < total + 1) ++steps;
    LocalInt two = from_int(r_, 2);
    for (int i = 0; i <= steps; ++i) y = y * (two - *this * y);
    return y;
}

LocalInt LocalInt::div_pi(int k) const {
    if (k == 0) return *this;
    if (valuation() < std::min(k, r_->M)) throw Error("div_pi: element not divisible");
    const auto& W = r_->W;
    LocalInt x = *this;
    for (int t = 0; t < k; ++t) {
        if (r_->e == 1) {
            x.c_[0] = W.div_p(x.c_[0]);
            continue;
        }
        // x = c_0 + S*(rest); c_0 = p*d; x/S = rho*d + rest
        auto d = W.div_p(x.c_[0]);
        LocalInt rest = zero(r_);
        for (int i = 0; i + 1 < r_->e; ++i) rest.c_[static_cast<size_t>(i)] = x.c_[static_cast<size_t>(i + 1)];
        LocalInt rd = zero(r_);
        for (int i = 0; i < r_->e; ++i) rd.c_[static_cast<size_t>(i)] = W.mul(r_->rho[static_cast<size_t>(i)], d);
        x = rd + rest;
    }
    return x;
}

LocalInt LocalInt::frobenius(int k) const {
    auto x = *this;
    for (auto& c : x.c_) c = r_->W.frob(c, k);
    return x;
}

std::vector<FieldElem> LocalInt::digits() const {
    std::vector<FieldElem> out;
    LocalInt x = *this;
    for (int i = 0; i < r_->M; ++i) {
        FieldElem d = x.reduce();
        out.push_back(d);
        x = (x - teichmuller(r_, d)).div_pi(1);
    }
    return out;
}

bool LocalInt::eq(const LocalInt& o) const { return (*this - o).is_zero(); }

bool LocalInt::eq_mod(const LocalInt& o, int k) const {
    return (*this - o).valuation() >= std::min(k, r_->M);
}

LocalInt LocalInt::truncate_mod(int k) const {
    k = std::min(k, r_->M);
    LocalInt acc = zero(r_);
    LocalInt x = *this;
    LocalInt piw = uniformizer(r_).pow(1);
    LocalInt ppow = one(r_);
    for (int i = 0; i < k; ++i) {
        FieldElem d = x.reduce();
        acc = acc + teichmuller(r_, d) * ppow;
        x = (x - teichmuller(r_, d)).div_pi(1);
        ppow = ppow * piw;
    }
    return acc;
}

std::string LocalInt::to_text() const {
    std::ostringstream os;
    os << "loc(" << r_->p << ',' << r_->W.n << ',' << r_->e << "):[";
    auto ds = digits();
    int v = valuation();
    for (int i = 0; i < static_cast<int>(ds.size()); ++i) {
        if (i) os << ',';
        if (r_->W.n == 1)
            os << (ds[static_cast<size_t>(i)].coeffs().empty() ? 0 : ds[static_cast<size_t>(i)].coeffs()[0]);
        else
            os << ds[static_cast<size_t>(i)].coeff_text();
    }
    os << "] * pi^" << v;
    return os.str();
}

// ---- extensions ---------------------------------------------------------------

namespace {

// Newton root of the integer polynomial H (monic lift of a subfield modulus)
// inside the W-layer of K, starting from a lift of the embedded residue root.
detail::WLayer::El embed_root(const detail::WLayer& WK, const FieldDesc& sub) {
    // residue embedding of the class of T
    FieldElem t = field_generator(sub);
    FieldElem r0 = embed(t, WK.resdesc);
    detail::WLayer::El y = WK.lift(r0);
    std::vector<long long> H(sub.modulus.begin(), sub.modulus.end());
    H.resize(static_cast<size_t>(sub.m) + 1, 0);
    H[static_cast<size_t>(sub.m)] = 1;
    std::vector<long long> Hp;
    for (int i = 1; i <= sub.m; ++i) Hp.push_back(static_cast<long long>(i) * H[static_cast<size_t>(i)]);
    int steps = 1;
    while ((1 << steps) < WK.Mp + 1) ++steps;
    for (int i = 0; i <= steps; ++i) {
        auto hy = WK.eval_int_poly(H, y);
        auto hpy = WK.eval_int_poly(Hp, y);
        y = WK.sub(y, WK.mul(hy, WK.inv(hpy)));
    }
    if (!WK.is_zero(WK.eval_int_poly(H, y))) throw Error("ext: embedding root not found");
    return y;
}

}  // namespace

ExtKF make_unramified_ext(const LocalRingPtr& F, int s) {
    if (s < 1) throw Error("make_unramified_ext: s >= 1 required");
    ExtKF ext;
    ext.F = F;
    ext.s = s;
    ext.e_rel = 1;
    FieldDesc resK = make_field(F->p, F->W.n * s);
    ext.K = detail::build_ring(detail::field_ctx(resK), resK, F->M, F->eis);
    return ext;
}

ExtKF make_eisenstein_ext(const LocalRingPtr& F, const std::vector<long long>& eis) {
    if (F->e != 1)
        throw UnsupportedModeError("make_eisenstein_ext: base must be unramified (pre-decompose)");
    ExtKF ext;
    ext.F = F;
    ext.s = 1;
    ext.e_rel = static_cast<int>(eis.size());
    ext.K = detail::build_ring(F->W.res, F->W.resdesc, F->M * ext.e_rel, eis);
    return ext;
}

ExtKF make_mixed_ext(const LocalRingPtr& F, int s, const std::vector<long long>& eis) {
    if (F->e != 1)
        throw UnsupportedModeError("make_mixed_ext: base must be unramified (pre-decompose)");
    ExtKF ext;
    ext.F = F;
    ext.s = s;
    ext.e_rel = static_cast<int>(eis.size());
    FieldDesc resK = make_field(F->p, F->W.n * s);
    ext.K = detail::build_ring(detail::field_ctx(resK), resK, F->M * ext.e_rel, eis);
    return ext;
}

LocalInt ext_embed(const ExtKF& ext, const LocalInt& x) {
    const auto& WF = ext.F->W;
    const auto& WK = ext.K->W;
    std::vector<detail::WLayer::El> out(static_cast<size_t>(ext.K->e), WK.zero());
    detail::WLayer::El root = WK.zero();
    if (WF.n >= 2) root = embed_root(WK, WF.resdesc);
    for (int i = 0; i < ext.F->e; ++i) {
        // map the W(k_F) coefficient via T_F -> root
        const auto& c = x.raw()[static_cast<size_t>(i)];
        detail::WLayer::El acc = WK.zero();
        for (size_t t = c.size(); t-- > 0;) {
            acc = WK.mul(acc, root);
            acc = WK.add(acc, WK.from_int(c[t]));
        }
        out[static_cast<size_t>(i)] = acc;  // S_F -> S_K (same Eisenstein layer)
    }
    return LocalInt::from_raw(ext.K, std::move(out));
}

LocalInt move_ring(const LocalInt& x, const LocalRingPtr& target) {
    const LocalRingPtr& src = x.ring();
    if (!(ring_residue(src) == ring_residue(target)) ||
        ring_eisenstein(src) != ring_eisenstein(target))
        throw Error("move_ring: ring shapes differ");
    auto ds = x.digits();
    LocalInt out = LocalInt::zero(target);
    LocalInt w = LocalInt::uniformizer(target);
    LocalInt pw = LocalInt::one(target);
    const int n = std::min<int>(static_cast<int>(ds.size()), ring_precision(target));
    for (int i = 0; i < n; ++i) {
        out = out + LocalInt::teichmuller(target, ds[static_cast<size_t>(i)]) * pw;
        pw = pw * w;
    }
    return out;
}

namespace {

// Z/pk Gaussian solve with unit pivots; A square, invertible mod p.
std::vector<std::vector<long long>> zpk_invert(std::vector<std::vector<long long>> A, long long pk,
                                               int p) {
    const int n = static_cast<int>(A.size());
    std::vector<std::vector<long long>> inv(static_cast<size_t>(n), std::vector<long long>(static_cast<size_t>(n), 0));
    for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    auto mulm = [&](long long a, long long b) { return static_cast<long long>(static_cast<__int128>(a) * b % pk); };
    auto invm = [&](long long a) {
        // unit mod p: lift inverse by Newton
        long long ai = 1, am = a % p;
        // inverse mod p
        long long r = 1, b = am, e = p - 2;
        while (e) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        ai = r;
        for (int it = 0; it < 7; ++it) ai = ((2 * ai - mulm(mulm(a, ai), ai)) % pk + pk) % pk;
        return ai;
    };
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        for (int i = c; i < n; ++i)
            if (A[static_cast<size_t>(i)][static_cast<size_t>(c)] % p != 0) {
                pr = i;
                break;
            }
        if (pr < 0) throw Error("zpk_invert: matrix not invertible mod p");
        std::swap(A[static_cast<size_t>(pr)], A[static_cast<size_t>(c)]);
        std::swap(inv[static_cast<size_t>(pr)], inv[static_cast<size_t>(c)]);
        long long piv = invm(A[static_cast<size_t>(c)][static_cast<size_t>(c)]);
        for (int j = 0; j < n; ++j) {
            A[static_cast<size_t>(c)][static_cast<size_t>(j)] = mulm(A[static_cast<size_t>(c)][static_cast<size_t>(j)], piv);
            inv[static_cast<size_t>(c)][static_cast<size_t>(j)] = mulm(inv[static_cast<size_t>(c)][static_cast<size_t>(j)], piv);
        }
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            long long f = A[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f == 0) continue;
            for (int j = 0; j < n; ++j) {
                A[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    ((A[static_cast<size_t>(i)][static_cast<size_t>(j)] - mulm(f, A[static_cast<size_t>(c)][static_cast<size_t>(j)])) % pk + pk) % pk;
                inv[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    ((inv[static_cast<size_t>(i)][static_cast<size_t>(j)] - mulm(f, inv[static_cast<size_t>(c)][static_cast<size_t>(j)])) % pk + pk) % pk;
            }
        }
    }
    return inv;
}

// flat Z/pk coordinates of an O_K element: e blocks of n entries
std::vector<long long> flat_coords(const LocalInt& x) {
    std::vector<long long> v;
    for (const auto& c : x.raw())
        for (long long t : c) v.push_back(t);
    return v;
}

struct Decomposer {
    ExtKF ext;
    std::vector<LocalInt> basisK;                       // O_F-basis of O_K, size [K:F]
    std::vector<std::vector<long long>> Binv;           // inverse coordinate matrix
    int dimK = 0, dimF = 0, deg = 0;

    explicit Decomposer(const ExtKF& x) : ext(x) {
        const auto& K = ext.K;
        const auto& F = ext.F;
        deg = ext.s * ext.e_rel;
        dimK = K->e * K->W.n;
        dimF = F->e * F->W.n;
        if (dimF * deg != dimK) throw Error("ext: inconsistent degrees");
        // O_F-basis of O_K: tau(g_K)^j * S^i
        LocalInt tg = LocalInt::one(K);
        if (ext.s > 1) tg = LocalInt::teichmuller(K, multiplicative_generator(K->W.resdesc));
        std::vector<LocalInt> fbasis;  // images of the F Z-basis inside K
        {
            // F Z-basis: root^b * S_F^a
            detail::WLayer::El root = K->W.zero();
            if (F->W.n >= 2) root = embed_root(K->W, F->W.resdesc);
            LocalInt rootK = LocalInt::from_raw(K, {root});
            LocalInt SK = (F->e >= 2) ? LocalInt::uniformizer(K) : LocalInt::one(K);
            for (int a = 0; a < F->e; ++a)
                for (int b = 0; b < F->W.n; ++b) {
                    LocalInt el = LocalInt::one(K);
                    for (int t = 0; t < b; ++t) el = el * rootK;
                    for (int t = 0; t < a; ++t) el = el * SK;
                    fbasis.push_back(el);
                }
        }
        // module basis over O_F
        for (int j = 0; j < ext.s; ++j)
            for (int i = 0; i < ext.e_rel; ++i) {
                LocalInt el = LocalInt::one(K);
                for (int t = 0; t < j; ++t) el = el * tg;
                if (ext.e_rel > 1) {
                    LocalInt S = LocalInt::uniformizer(K);
                    for (int t = 0; t < i; ++t) el = el * S;
                }
                basisK.push_back(el);
            }
        // full Z/pk coordinate matrix: columns beta_a * fbasis_b
        std::vector<std::vector<long long>> B(static_cast<size_t>(dimK),
                                              std::vector<long long>(static_cast<size_t>(dimK), 0));
        int col = 0;
        for (const auto& beta : basisK)
            for (const auto& fb : fbasis) {
                auto v = flat_coords(beta * fb);
                for (int r = 0; r < dimK; ++r) B[static_cast<size_t>(r)][static_cast<size_t>(col)] = v[static_cast<size_t>(r)];
                ++col;
            }
        Binv = zpk_invert(std::move(B), K->W.pk, K->p);
    }

    // coordinates of x over O_F in the basisK order
    std::vector<LocalInt> decompose(const LocalInt& x) const {
        auto v = flat_coords(x);
        const long long pk = ext.K->W.pk;
        std::vector<long long> y(static_cast<size_t>(dimK), 0);
        for (int i = 0; i < dimK; ++i) {
            __int128 acc = 0;
            for (int j = 0; j < dimK; ++j)
                acc += static_cast<__int128>(Binv[static_cast<size_t>(i)][static_cast<size_t>(j)]) * v[static_cast<size_t>(j)];
            y[static_cast<size_t>(i)] = static_cast<long long>(acc % pk);
        }
        // regroup into O_F elements (F's Z-basis order: a (S_F) major over b (T_F))
        std::vector<LocalInt> out;
        const auto& F = ext.F;
        for (int k = 0; k < deg; ++k) {
            std::vector<std::vector<long long>> c(static_cast<size_t>(F->e),
                                                  std::vector<long long>(static_cast<size_t>(F->W.n), 0));
            int idx = 0;
            for (int a = 0; a < F->e; ++a)
                for (int b = 0; b < F->W.n; ++b) {
                    long long t = y[static_cast<size_t>(k * dimF + idx)] % F->W.pk;
                    if (t < 0) t += F->W.pk;
                    c[static_cast<size_t>(a)][static_cast<size_t>(b)] = t;
                    ++idx;
                }
            out.push_back(LocalInt::from_raw(F, std::move(c)));
        }
        return out;
    }
};

LocalInt det_cofactor(const std::vector<std::vector<LocalInt>>& A, const LocalRingPtr& R) {
    const int n = static_cast<int>(A.size());
    if (n == 1) return A[0][0];
    LocalInt acc = LocalInt::zero(R);
    for (int i = 0; i < n; ++i) {
        std::vector<std::vector<LocalInt>> minor;
        for (int r = 0; r < n; ++r) {
            if (r == i) continue;
            std::vector<LocalInt> row;
            for (int c = 1; c < n; ++c) row.push_back(A[static_cast<size_t>(r)][static_cast<size_t>(c)]);
            minor.push_back(std::move(row));
        }
        LocalInt term = A[static_cast<size_t>(i)][0] * det_cofactor(minor, R);
        acc = (i % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

}  // namespace

LocalInt norm(const LocalInt& x, const ExtKF& ext) {
    Decomposer dec(ext);
    const int d = dec.deg;
    std::vector<std::vector<LocalInt>> M(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) {
        auto col = dec.decompose(x * dec.basisK[static_cast<size_t>(j)]);
        for (int i = 0; i < d; ++i) {
            if (M[static_cast<size_t>(i)].empty())
                M[static_cast<size_t>(i)].resize(static_cast<size_t>(d), LocalInt::zero(ext.F));
            M[static_cast<size_t>(i)][static_cast<size_t>(j)] = col[static_cast<size_t>(i)];
        }
    }
    LocalInt det = det_cofactor(M, ext.F);
    if (det.is_zero()) throw PrecisionError("norm: result vanishes at precision");
    return det;
}

bool lt_extension_criterion(const LocalInt& pi, const LocalInt& varpi, const ExtKF& ext) {
    if (pi.valuation() != 1) throw Error("criterion: pi is not a uniformizer");
    if (varpi.valuation() != 1) throw Error("criterion: varpi is not a uniformizer");
    LocalInt n = norm(varpi, ext);
    LocalInt target = pi.pow(ext.s);
    return n.eq(target);
}

}  // namespace phigamma
