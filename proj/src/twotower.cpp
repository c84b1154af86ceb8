#include "phigamma/twotower.hpp"

#include <algorithm>
#include <sstream>

namespace phigamma {

namespace {

long long ipow_ll(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

Mat<LocalInt> mat_inv_local(Mat<LocalInt> a, const LocalRingPtr& r) {
    const int n = static_cast<int>(a.size());
    Mat<LocalInt> inv(static_cast<size_t>(n), std::vector<LocalInt>(static_cast<size_t>(n), LocalInt::zero(r)));
    for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i)][static_cast<size_t>(i)] = LocalInt::one(r);
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        for (int i = c; i < n; ++i)
            if (a[static_cast<size_t>(i)][static_cast<size_t>(c)].is_unit()) {
                pr = i;
                break;
            }
        if (pr < 0) throw NotEtaleError("matrix not invertible over the local ring");
        std::swap(a[static_cast<size_t>(pr)], a[static_cast<size_t>(c)]);
        std::swap(inv[static_cast<size_t>(pr)], inv[static_cast<size_t>(c)]);
        LocalInt piv = a[static_cast<size_t>(c)][static_cast<size_t>(c)].inv();
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(c)][static_cast<size_t>(j)] = a[static_cast<size_t>(c)][static_cast<size_t>(j)] * piv;
            inv[static_cast<size_t>(c)][static_cast<size_t>(j)] = inv[static_cast<size_t>(c)][static_cast<size_t>(j)] * piv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            LocalInt f = a[static_cast<size_t>(i)][static_cast<size_t>(c)];
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    a[static_cast<size_t>(i)][static_cast<size_t>(j)] - f * a[static_cast<size_t>(c)][static_cast<size_t>(j)];
                inv[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    inv[static_cast<size_t>(i)][static_cast<size_t>(j)] - f * inv[static_cast<size_t>(c)][static_cast<size_t>(j)];
            }
        }
    }
    return inv;
}

}  // namespace

TwoTowerDesc make_two_tower(const CoeffRingDesc& Api, LTData lt_varpi, std::optional<ExtKF> ext) {
    TwoTowerDesc tt;
    tt.Api = Api;
    const int rs = Api.r * Api.s;
    long long qK = 1;
    for (int i = 0; i < rs; ++i) qK *= ring_p(Api.base.ctx);
    if (lt_varpi.q != static_cast<int>(qK))
        throw Error("two tower: the varpi-side series must have q = p^(rs)");
    tt.Avarpi = make_coeff_ring(Api.base, std::move(lt_varpi), 1, Api.N);
    tt.ext = std::move(ext);
    return tt;
}

// ---- TwoTowerElem ---------------------------------------------------------------

TwoTowerElem::TwoTowerElem(LocalRingPtr ring, int idx, int xlo, int xhi, int ylo, int yhi)
    : xlo_(xlo), xhi_(xhi), ylo_(ylo), yhi_(yhi), ring_(std::move(ring)), idx_(idx) {}

TwoTowerElem TwoTowerElem::constant(const LocalRingPtr& r, int idx, const LocalInt& c, int xw,
                                    int yw) {
    TwoTowerElem e(r, idx, 0, xw, 0, yw);
    e.set(0, 0, c);
    return e;
}

TwoTowerElem TwoTowerElem::var_x(const TwoTowerDesc& tt, int idx) {
    TwoTowerElem e(tt.Api.base.ctx, idx, 0, tt.Api.N, 0, tt.Api.N);
    e.set(1, 0, LocalInt::one(tt.Api.base.ctx));
    return e;
}

TwoTowerElem TwoTowerElem::var_y(const TwoTowerDesc& tt, int idx) {
    TwoTowerElem e(tt.Api.base.ctx, idx, 0, tt.Api.N, 0, tt.Api.N);
    e.set(0, 1, LocalInt::one(tt.Api.base.ctx));
    return e;
}

LocalInt TwoTowerElem::coeff(int a, int b) const {
    auto it = c_.find({a, b});
    return it == c_.end() ? LocalInt::zero(ring_) : it->second;
}

void TwoTowerElem::set(int a, int b, const LocalInt& v) {
    if (a < xlo_ || a >= xhi_ || b < ylo_ || b >= yhi_) {
        if (a < xlo_) xlo_ = a;
        if (b < ylo_) ylo_ = b;
        if (a >= xhi_ || b >= yhi_) return;  // beyond stated knowledge
    }
    if (v.is_zero())
        c_.erase({a, b});
    else
        c_[{a, b}] = v;
}

namespace {

void align_den(TwoTowerElem& a, TwoTowerElem& b) {
    if (a.den() == b.den()) return;
    TwoTowerElem& low = a.den() < b.den() ? a : b;
    const int diff = std::abs(a.den() - b.den());
    LocalInt f = LocalInt::uniformizer(low.ring()).pow(diff);
    TwoTowerElem scaled(low.ring(), low.idx(), low.xlo_, low.xhi_, low.ylo_, low.yhi_);
    for (const auto& [k, v] : low.coeffs()) scaled.set(k.first, k.second, v * f);
    scaled.set_den(std::max(a.den(), b.den()));
    low = scaled;
}

}  // namespace

TwoTowerElem TwoTowerElem::operator+(const TwoTowerElem& o) const {
    if (idx_ != o.idx_) throw Error("two-tower add: indices differ");
    TwoTowerElem a = *this, b = o;
    align_den(a, b);
    TwoTowerElem r(ring_, idx_, std::min(a.xlo_, b.xlo_), std::min(a.xhi_, b.xhi_),
                   std::min(a.ylo_, b.ylo_), std::min(a.yhi_, b.yhi_));
    r.set_den(a.den());
    for (const auto& [k, v] : a.coeffs())
        if (k.first < r.xhi_ && k.second < r.yhi_) r.c_[k] = v;
    for (const auto& [k, v] : b.coeffs()) {
        if (k.first >= r.xhi_ || k.second >= r.yhi_) continue;
        auto it = r.c_.find(k);
        if (it == r.c_.end())
            r.c_[k] = v;
        else {
            it->second = it->second + v;
            if (it->second.is_zero()) r.c_.erase(it);
        }
    }
    return r;
}

TwoTowerElem TwoTowerElem::operator-(const TwoTowerElem& o) const {
    TwoTowerElem n = o;
    for (auto& [k, v] : n.c_) v = -v;
    return *this + n;
}

TwoTowerElem TwoTowerElem::operator*(const TwoTowerElem& o) const {
    if (idx_ != o.idx_) throw Error("two-tower mul: indices differ");
    TwoTowerElem r(ring_, idx_, xlo_ + o.xlo_, std::min(xhi_ + o.xlo_, o.xhi_ + xlo_),
                   ylo_ + o.ylo_, std::min(yhi_ + o.ylo_, o.yhi_ + ylo_));
    r.set_den(den_ + o.den_);
    for (const auto& [k1, v1] : c_)
        for (const auto& [k2, v2] : o.c_) {
            int a = k1.first + k2.first, b = k1.second + k2.second;
            if (a >= r.xhi_ || b >= r.yhi_) continue;
            LocalInt t = v1 * v2;
            auto it = r.c_.find({a, b});
            if (it == r.c_.end()) {
                if (!t.is_zero()) r.c_[{a, b}] = t;
            } else {
                it->second = it->second + t;
                if (it->second.is_zero()) r.c_.erase(it);
            }
        }
    return r;
}

bool TwoTowerElem::eq(const TwoTowerElem& o) const {
    if (idx_ != o.idx_) return false;
    TwoTowerElem a = *this, b = o;
    align_den(a, b);
    int xlo = std::max(a.xlo_, b.xlo_), xhi = std::min(a.xhi_, b.xhi_);
    int ylo = std::max(a.ylo_, b.ylo_), yhi = std::min(a.yhi_, b.yhi_);
    for (const auto& [k, v] : a.coeffs())
        if (k.first >= xlo && k.first < xhi && k.second >= ylo && k.second < yhi)
            if (!v.eq(b.coeff(k.first, k.second))) return false;
    for (const auto& [k, v] : b.coeffs())
        if (k.first >= xlo && k.first < xhi && k.second >= ylo && k.second < yhi)
            if (!v.eq(a.coeff(k.first, k.second))) return false;
    return true;
}

bool TwoTowerElem::is_zero() const {
    for (const auto& [k, v] : c_)
        if (!v.is_zero()) return false;
    return true;
}

bool TwoTowerElem::pure_y() const {
    for (const auto& [k, v] : c_)
        if (k.first != 0 && !v.is_zero()) return false;
    return true;
}

TruncSeries<LocalRing> TwoTowerElem::y_series() const {
    if (!pure_y()) throw Error("two-tower element has x-dependence");
    TruncSeries<LocalRing> s(LocalRing{ring_}, ylo_, yhi_);
    for (const auto& [k, v] : c_)
        if (k.first == 0) s.set(k.second, v);
    return s;
}

std::string TwoTowerElem::to_text() const {
    std::ostringstream os;
    os << "idx=" << idx_ << ": ";
    if (den_ != 0) os << "pi^-" << den_ << " * (";
    std::vector<std::pair<std::pair<int, int>, LocalInt>> terms(c_.begin(), c_.end());
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
        int da = a.first.first + a.first.second, db = b.first.first + b.first.second;
        if (da != db) return da < db;
        return a.first.first > b.first.first;
    });
    bool first = true;
    for (const auto& [k, v] : terms) {
        if (!first) os << " + ";
        first = false;
        std::string mono;
        if (k.first != 0) mono += "x^" + std::to_string(k.first);
        if (k.second != 0) {
            if (!mono.empty()) mono += '*';
            mono += "y^" + std::to_string(k.second);
        }
        if (mono.empty())
            os << '[' << v.to_text() << ']';
        else
            os << mono << "*[" << v.to_text() << ']';
    }
    if (first) os << '0';
    if (den_ != 0) os << ')';
    os << " + O(x^" << xhi_ << ",y^" << yhi_ << ')';
    return os.str();
}

// ---- partial Frobenii --------------------------------------------------------------

namespace {

using LS = TruncSeries<LocalRing>;

// apply a substitution to the chosen variable of every slice
TwoTowerElem substitute_axis(const TwoTowerDesc& tt, const TwoTowerElem& e, bool x_axis,
                             const LS& sub, const LS* sub_inv, int new_idx) {
    if (e.ring() != tt.Api.base.ctx)
        throw UnsupportedModeError("two-tower substitution requires the base carrier ring");
    std::map<int, LS> slices;  // keyed by the other variable's exponent
    for (const auto& [k, v] : e.coeffs()) {
        int main = x_axis ? k.first : k.second;
        int other = x_axis ? k.second : k.first;
        auto it = slices.find(other);
        if (it == slices.end()) {
            LS s(LocalRing{e.ring()}, x_axis ? e.xlo_ : e.ylo_, x_axis ? e.xhi_ : e.yhi_);
            s.set(main, v);
            slices.emplace(other, std::move(s));
        } else {
            it->second.set(main, v);
        }
    }
    int mlo = x_axis ? e.xlo_ : e.ylo_;
    int mhi = x_axis ? e.xhi_ : e.yhi_;
    bool first_slice = true;
    int out_lo = mlo, out_hi = mhi;
    std::map<int, LS> results;
    for (auto& [other, s] : slices) {
        LS r = substitute_laurent(s, sub, sub_inv);
        if (first_slice) {
            out_lo = r.lo();
            out_hi = r.prec();
            first_slice = false;
        } else {
            out_lo = std::min(out_lo, r.lo());
            out_hi = std::min(out_hi, r.prec());
        }
        results.emplace(other, std::move(r));
    }
    if (first_slice) {
        // zero element: the substituted window of an empty slice
        out_lo = mlo < 0 ? -std::abs(mlo) * 4 : mlo;
        out_hi = mhi;
    }
    TwoTowerElem out(e.ring(), new_idx, x_axis ? out_lo : e.xlo_, x_axis ? out_hi : e.xhi_,
                     x_axis ? e.ylo_ : out_lo, x_axis ? e.yhi_ : out_hi);
    out.set_den(e.den());
    for (const auto& [other, r] : results)
        for (const auto& [mexp, v] : r.coeffs()) {
            if (x_axis)
                out.set(mexp, other, v);
            else
                out.set(other, mexp, v);
        }
    return out;
}

LS pi_side_series(const TwoTowerDesc& tt) {
    LocalInt pis = LocalInt::one(tt.Api.lt.ring.ctx);
    for (int i = 0; i < tt.Api.s; ++i) pis = pis * tt.Api.lt.pi;
    return lt_series_in_base(tt.Api, pis);  // [pi^s](u_x)
}

LS varpi_side_series(const TwoTowerDesc& tt) {
    return lt_series_in_base(tt.Avarpi, tt.Avarpi.lt.pi);  // f_varpi(u_y)
}

bool has_negative(const TwoTowerElem& e, bool x_axis) {
    for (const auto& [k, v] : e.coeffs())
        if ((x_axis ? k.first : k.second) < 0) return true;
    return false;
}

TwoTowerElem frobenius_constants(const TwoTowerElem& e, int rs) {
    TwoTowerElem out = e;
    std::map<std::pair<int, int>, LocalInt> c;
    for (const auto& [k, v] : e.coeffs()) c[k] = v.frobenius(rs);
    // rebuild through set to keep normalization
    TwoTowerElem r(e.ring(), e.idx(), e.xlo_, e.xhi_, e.ylo_, e.yhi_);
    r.set_den(e.den());
    for (const auto& [k, v] : c) r.set(k.first, k.second, v);
    return r;
}

}  // namespace

TwoTowerElem partial_frobenius_pi(const TwoTowerDesc& tt, const TwoTowerElem& e) {
    LS sub = pi_side_series(tt);
    std::optional<LS> inv;
    if (has_negative(e, true)) inv = aseries_unit_inverse(tt.Api, sub);
    return substitute_axis(tt, e, true, sub, inv ? &*inv : nullptr, e.idx() - 1);
}

TwoTowerElem partial_frobenius_varpi(const TwoTowerDesc& tt, const TwoTowerElem& e) {
    const int rs = tt.Api.r * tt.Api.s;
    LS sub = varpi_side_series(tt);
    std::optional<LS> inv;
    if (has_negative(e, false)) inv = aseries_unit_inverse(tt.Avarpi, sub);
    TwoTowerElem shifted = frobenius_constants(e, rs);
    return substitute_axis(tt, shifted, false, sub, inv ? &*inv : nullptr, e.idx() + 1);
}

TwoTowerElem total_frobenius(const TwoTowerDesc& tt, const TwoTowerElem& e) {
    const int rs = tt.Api.r * tt.Api.s;
    LS subx = pi_side_series(tt);
    LS suby = varpi_side_series(tt);
    std::optional<LS> invx, invy;
    if (has_negative(e, true)) invx = aseries_unit_inverse(tt.Api, subx);
    if (has_negative(e, false)) invy = aseries_unit_inverse(tt.Avarpi, suby);
    TwoTowerElem t = frobenius_constants(e, rs);
    t = substitute_axis(tt, t, true, subx, invx ? &*invx : nullptr, e.idx());
    return substitute_axis(tt, t, false, suby, invy ? &*invy : nullptr, e.idx());
}

TwoTowerElem gamma_two_tower(const TwoTowerDesc& tt, const LocalInt& c, const TwoTowerElem& e) {
    if (!tt.ext) throw UnsupportedModeError("gamma on the two-tower needs the K/F presentation");
    if (!c.is_unit()) throw Error("gamma: chi-value must be a unit");
    // y-side: [c], x-side: [N_{K/F}(c)]
    LocalInt cK = move_ring(c, tt.Avarpi.lt.ring.ctx);
    LS suby = lt_series_in_base(tt.Avarpi, cK);
    LocalInt cN = norm(move_ring(c, tt.ext->K), *tt.ext);
    LocalInt cF = move_ring(cN, tt.Api.lt.ring.ctx);
    LS subx = lt_series_in_base(tt.Api, cF);
    std::optional<LS> invx, invy;
    if (has_negative(e, true)) invx = aseries_unit_inverse(tt.Api, subx);
    if (has_negative(e, false)) invy = aseries_unit_inverse(tt.Avarpi, suby);
    TwoTowerElem t = substitute_axis(tt, e, true, subx, invx ? &*invx : nullptr, e.idx());
    return substitute_axis(tt, t, false, suby, invy ? &*invy : nullptr, e.idx());
}

// ---- sequences and reconstruction ---------------------------------------------------

TowerSequence diagonal_sequence(const TwoTowerDesc& tt, const TruncSeries<LocalRing>& w, int i0,
                                int i1) {
    TowerSequence s;
    s.i0 = i0;
    s.i1 = i1;
    s.along_pi = true;
    for (int i = i0; i <= i1; ++i) {
        TwoTowerElem e(tt.Api.base.ctx, i, 0, tt.Api.N, w.lo(), w.prec());
        for (const auto& [k, v] : w.coeffs()) e.set(0, k, v);
        s.entries.push_back(std::move(e));
    }
    return s;
}

ReconstructResult projlim_reconstruct(const TwoTowerDesc& tt, const TowerSequence& s) {
    if (s.entries.empty() || static_cast<int>(s.entries.size()) != s.i1 - s.i0 + 1)
        throw Error("not a compatible sequence: wrong window size");
    const LocalRingPtr ring = s.entries[0].ring();
    const int M = ring_precision(ring);
    // digit-0 chaining check
    for (size_t i = 1; i < s.entries.size(); ++i) {
        TwoTowerElem img = s.along_pi ? partial_frobenius_pi(tt, s.entries[i])
                                      : partial_frobenius_varpi(tt, s.entries[i - 1]);
        const TwoTowerElem& want = s.along_pi ? s.entries[i - 1] : s.entries[i];
        TwoTowerElem diff = img - want;
        for (const auto& [k, v] : diff.coeffs())
            if (v.valuation() < 1) throw Error("not a compatible sequence");
    }
    int den = s.entries[0].den();
    for (const auto& e : s.entries)
        if (e.den() != den) throw Error("not a compatible sequence: denominators differ");

    std::vector<TwoTowerElem> cur(s.entries.begin(), s.entries.end());
    GFRing kk{ring_residue(ring)};
    LocalRing lr{ring};
    int ylo = cur[0].ylo_, yhi = cur[0].yhi_;
    for (const auto& e : cur) {
        ylo = std::max(ylo, e.ylo_);
        yhi = std::min(yhi, e.yhi_);
    }
    TruncSeries<LocalRing> value(lr, ylo, yhi);
    LocalInt piw = LocalInt::uniformizer(ring);
    LocalInt pipow = LocalInt::one(ring);
    ReconstructResult out;
    for (int t = 0; t < M; ++t) {
        // the common pure-y residue
        std::optional<TruncSeries<GFRing>> digit;
        for (const auto& e : cur) {
            TruncSeries<GFRing> red(kk, ylo, yhi);
            for (const auto& [k, v] : e.coeffs()) {
                FieldElem rv = v.reduce();
                if (rv.is_zero()) continue;
                if (k.first != 0) throw Error("no limit at digit " + std::to_string(t));
                if (k.second >= ylo && k.second < yhi) red.set(k.second, rv);
            }
            if (!digit)
                digit = red;
            else if (!digit->eq_at_shared_precision(red))
                throw Error("no limit at digit " + std::to_string(t));
        }
        // accumulate and strip the digit
        TruncSeries<LocalRing> lifted(lr, ylo, yhi);
        for (const auto& [k, v] : digit->coeffs()) lifted.set(k, LocalInt::teichmuller(ring, v));
        for (const auto& [k, v] : lifted.coeffs()) value.set(k, value.coeff(k) + v * pipow);
        pipow = pipow * piw;
        if (t + 1 < M) {
            for (auto& e : cur) {
                TwoTowerElem next(ring, e.idx(), e.xlo_, e.xhi_, e.ylo_, e.yhi_);
                next.set_den(e.den());
                for (const auto& [k, v] : e.coeffs()) {
                    LocalInt d = v;
                    if (k.first == 0) d = d - lifted.coeff(k.second);
                    if (d.valuation() < 1) throw Error("no limit at digit " + std::to_string(t));
                    next.set(k.first, k.second, d.div_pi(1));
                }
                e = next;
            }
        }
    }
    out.value = value;
    out.den = den;
    out.window_lo = s.i0;
    out.window_hi = s.i1;
    out.digits = M;
    out.stabilized = true;
    return out;
}

// ---- comparison functors ------------------------------------------------------------

namespace {

struct SideData {
    const CoeffRingDesc* source;  // module's side
    const CoeffRingDesc* target;  // other side
};

TransportResult transport(const PhiGamma0& D, const TwoTowerDesc& tt, bool from_pi, int i0,
                          int i1) {
    const CoeffRingDesc& src = from_pi ? tt.Api : tt.Avarpi;
    const CoeffRingDesc& dst = from_pi ? tt.Avarpi : tt.Api;
    if (!const_mode0(D))
        throw UnsupportedModeError("comparison functors accept constant/finite-level modules only");
    auto et = check_etale_phigamma0(D, src);
    if (!et.ok) throw NotEtaleError(et.violation);

    const int d = D.rank;
    const int rs = src.r * src.s;
    const LocalRingPtr baseK = D.base.ctx;

    // stabilized vectors of the tensor system = lifted Frobenius fixed points
    auto v = functor_V_lift(D, src);
    const auto& cst = *v.cst;
    Mat<LocalInt> X(static_cast<size_t>(d), std::vector<LocalInt>(static_cast<size_t>(d), LocalInt::zero(cst.ring())));
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i) X[static_cast<size_t>(i)][static_cast<size_t>(k)] = v.basis[static_cast<size_t>(k)][static_cast<size_t>(i)];
    Mat<LocalInt> Xinv = mat_inv_local(X, cst.ring());

    Mat<LocalInt> A = const_phi_matrix0(D);
    Mat<LocalInt> Alc(static_cast<size_t>(d), std::vector<LocalInt>(static_cast<size_t>(d), LocalInt::zero(cst.ring())));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) Alc[static_cast<size_t>(i)][static_cast<size_t>(j)] = cst.embed_base(A[static_cast<size_t>(i)][static_cast<size_t>(j)]);

    // sigma on the solution basis: R = X^-1 sigma(X) = X^-1 A X
    auto mul = [&](const Mat<LocalInt>& a, const Mat<LocalInt>& b) {
        Mat<LocalInt> r(static_cast<size_t>(d), std::vector<LocalInt>(static_cast<size_t>(d), LocalInt::zero(cst.ring())));
        for (int i = 0; i < d; ++i)
            for (int t = 0; t < d; ++t)
                for (int j = 0; j < d; ++j)
                    r[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        r[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                        a[static_cast<size_t>(i)][static_cast<size_t>(t)] * b[static_cast<size_t>(t)][static_cast<size_t>(j)];
        return r;
    };
    Mat<LocalInt> R = mul(Xinv, mul(Alc, X));
    // sigma-fixedness certificate
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (!R[static_cast<size_t>(i)][static_cast<size_t>(j)].frobenius(rs).eq(R[static_cast<size_t>(i)][static_cast<size_t>(j)]))
                throw Error("transport: sigma matrix is not rational (unexpected)");

    // tower exhibition over the window: the stabilized family sigma^i(x_k)
    // must satisfy the module transition v_{i-1} = A^{-1} v_i in pushed
    // coordinates, and its W-coordinates X^{-1} v_i must be constant chains.
    bool stabilized = true;
    {
        Mat<LocalInt> Ainv = mat_inv_local(Alc, cst.ring());
        const int ord = cst.total_degree_over_kK();  // order of sigma on the constants
        for (int k = 0; k < d && stabilized; ++k) {
            std::map<int, std::vector<LocalInt>> entries;
            entries[0] = v.basis[static_cast<size_t>(k)];
            for (int i = 1; i <= i1; ++i) {
                entries[i] = entries[i - 1];
                for (auto& x : entries[i]) x = x.frobenius(rs);
            }
            for (int i = -1; i >= i0; --i) {
                entries[i] = entries[i + 1];
                for (auto& x : entries[i])
                    for (int t = 0; t < ord - 1; ++t) x = x.frobenius(rs);  // sigma^-1
            }
            std::vector<LocalInt> wprev;
            for (int i = i0; i <= i1 && stabilized; ++i) {
                if (i > i0) {
                    // transition check entries[i-1] = A^{-1} entries[i]
                    for (int r2 = 0; r2 < d; ++r2) {
                        LocalInt acc = LocalInt::zero(cst.ring());
                        for (int c2 = 0; c2 < d; ++c2)
                            acc = acc + Ainv[static_cast<size_t>(r2)][static_cast<size_t>(c2)] *
                                            entries[i][static_cast<size_t>(c2)];
                        if (!acc.eq(entries[i - 1][static_cast<size_t>(r2)])) stabilized = false;
                    }
                }
                // W-coordinates: X^{-1} sigma^i(x_k) twisted back is constant
                std::vector<LocalInt> w;
                for (int r2 = 0; r2 < d; ++r2) {
                    LocalInt acc = LocalInt::zero(cst.ring());
                    for (int c2 = 0; c2 < d; ++c2)
                        acc = acc + Xinv[static_cast<size_t>(r2)][static_cast<size_t>(c2)] *
                                        entries[0][static_cast<size_t>(c2)];
                    w.push_back(acc);
                }
                if (i == i0)
                    wprev = w;
                else
                    for (int r2 = 0; r2 < d; ++r2)
                        if (!w[static_cast<size_t>(r2)].eq(wprev[static_cast<size_t>(r2)])) stabilized = false;
            }
        }
    }

    // target-side descent at the lifted level: B with R sigma(B) = B
    const int n = cst.total_degree_over_kK();
    Mat<ExtElem> Rbar;
    {
        const ExtPtr& top = cst.top_ext();
        for (int i = 0; i < d; ++i) {
            std::vector<ExtElem> row;
            for (int j = 0; j < d; ++j)
                row.push_back(cst.from_flat(R[static_cast<size_t>(i)][static_cast<size_t>(j)].reduce()));
            Rbar.push_back(std::move(row));
        }
        (void)top;
    }
    Mat<ExtElem> Bbar = hilbert90_solve_ext(Rbar, rs, n);
    // digit-lift B
    Mat<LocalInt> B(static_cast<size_t>(d), std::vector<LocalInt>(static_cast<size_t>(d), LocalInt::zero(cst.ring())));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            B[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                LocalInt::teichmuller(cst.ring(), cst.to_flat(Bbar[static_cast<size_t>(i)][static_cast<size_t>(j)]));
    const int M = ring_precision(cst.ring());
    auto sigma_mat = [&](const Mat<LocalInt>& m) {
        Mat<LocalInt> out = m;
        for (auto& row : out)
            for (auto& x : row) x = x.frobenius(rs);
        return out;
    };
    for (int t = 1; t < M; ++t) {
        Mat<LocalInt> res = mul(R, sigma_mat(B));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                res[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    res[static_cast<size_t>(i)][static_cast<size_t>(j)] - B[static_cast<size_t>(i)][static_cast<size_t>(j)];
        // solve R sigma(Z) - Z = -res/pi^t mod pi
        Mat<ExtElem> rhs;
        bool allzero = true;
        for (int i = 0; i < d; ++i) {
            std::vector<ExtElem> row;
            for (int j = 0; j < d; ++j) {
                LocalInt r2 = res[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (r2.valuation() < t)
                    throw Error("transport: descent residual not divisible (unexpected)");
                FieldElem digit = r2.div_pi(t).reduce();
                if (!digit.is_zero()) allzero = false;
                row.push_back(-cst.from_flat(digit));
            }
            rhs.push_back(std::move(row));
        }
        if (allzero) continue;
        auto Z = twisted_coboundary_solve(Rbar, rhs, rs);
        if (!Z) throw Error("transport: descent digit unsolvable (unexpected)");
        LocalInt piT = LocalInt::uniformizer(cst.ring()).pow(t);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                B[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    B[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                    LocalInt::teichmuller(cst.ring(), cst.to_flat((*Z)[static_cast<size_t>(i)][static_cast<size_t>(j)])) * piT;
    }
    Mat<LocalInt> Binv = mat_inv_local(B, cst.ring());
    Mat<LocalInt> Aout_lc = mul(Binv, mul(R, B));

    // project to the base constants
    Mat<LocalInt> Aout(static_cast<size_t>(d), std::vector<LocalInt>(static_cast<size_t>(d), LocalInt::zero(baseK)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto pr = cst.project_base(Aout_lc[static_cast<size_t>(i)][static_cast<size_t>(j)], baseK);
            if (!pr) throw Error("transport: descended matrix not defined over the base (unexpected)");
            Aout[static_cast<size_t>(i)][static_cast<size_t>(j)] = *pr;
        }

    TransportResult out;
    out.module = make_const_module0(dst, Aout);
    // transport Gamma matrices: G -> B^-1 X^-1 G X B, projected
    for (size_t gi = 0; gi < D.gam.size(); ++gi) {
        Mat<LocalInt> G(static_cast<size_t>(d), std::vector<LocalInt>(static_cast<size_t>(d), LocalInt::zero(cst.ring())));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                G[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    cst.embed_base(D.gam[gi][static_cast<size_t>(i)][static_cast<size_t>(j)].coeff(0));
        Mat<LocalInt> Gout_lc = mul(Binv, mul(Xinv, mul(G, mul(X, B))));
        Mat<TruncSeries<LocalRing>> Gout;
        for (int i = 0; i < d; ++i) {
            std::vector<TruncSeries<LocalRing>> row;
            for (int j = 0; j < d; ++j) {
                auto pr = cst.project_base(Gout_lc[static_cast<size_t>(i)][static_cast<size_t>(j)], baseK);
                if (!pr) throw Error("transport: gamma matrix not defined over the base");
                row.push_back(TruncSeries<LocalRing>::constant(LocalRing{baseK}, *pr, dst.N));
            }
            Gout.push_back(std::move(row));
        }
        out.module.gam.push_back(std::move(Gout));
        out.module.gamma_labels.push_back(gi < D.gamma_labels.size() ? D.gamma_labels[gi] : "gamma");
    }
    out.window_lo = i0;
    out.window_hi = i1;
    out.stabilized = stabilized;
    out.growth_steps = v.growth_steps;
    {
        std::ostringstream os;
        os << "level=" << n << " window=[" << i0 << "," << i1 << "]"
           << (stabilized ? " stabilized" : " NOT-stabilized");
        out.notes = os.str();
    }
    return out;
}

}  // namespace

TransportResult functor_Phi(const PhiGamma0& D1, const TwoTowerDesc& tt, int i0, int i1) {
    return transport(D1, tt, true, i0, i1);
}

TransportResult functor_Psi(const PhiGamma0& D2, const TwoTowerDesc& tt, int i0, int i1) {
    return transport(D2, tt, false, i0, i1);
}

bool modules_isomorphic(const PhiGamma0& Ma, const PhiGamma0& Mb) {
    if (Ma.rank != Mb.rank || Ma.rs != Mb.rs) return false;
    if (!(Ma.base.ctx == Mb.base.ctx)) return false;
    Mat<LocalInt> A = const_phi_matrix0(Ma);
    Mat<LocalInt> B = const_phi_matrix0(Mb);
    const LocalRingPtr ring = Ma.base.ctx;
    const int d = Ma.rank;
    const int M = ring_precision(ring);
    if (d == 1) {
        // conjugacy over a commutative ring is equality... up to units:
        // U a = b U with U a unit forces a = b
        return A[0][0].eq(B[0][0]);
    }
    // char-p intertwiners: solve Ubar Bbar = Abar Ubar over the residue field
    const FieldDesc k = ring_residue(ring);
    const int p = k.p;
    const int dm = k.m;
    const int nvar = d * d * dm;
    Mat<FieldElem> Ab, Bb;
    for (int i = 0; i < d; ++i) {
        std::vector<FieldElem> ra, rb;
        for (int j = 0; j < d; ++j) {
            ra.push_back(A[static_cast<size_t>(i)][static_cast<size_t>(j)].reduce());
            rb.push_back(B[static_cast<size_t>(i)][static_cast<size_t>(j)].reduce());
        }
        Ab.push_back(ra);
        Bb.push_back(rb);
    }
    // build the F_p-linear system for U Bb - Ab U = 0
    auto entry_basis = [&](int i, int j, int t) {
        Mat<FieldElem> U(static_cast<size_t>(d), std::vector<FieldElem>(static_cast<size_t>(d), FieldElem::zero(k)));
        std::vector<int> c(static_cast<size_t>(dm), 0);
        c[static_cast<size_t>(t)] = 1;
        U[static_cast<size_t>(i)][static_cast<size_t>(j)] = FieldElem::from_coeffs(k, c);
        return U;
    };
    FpMat sys = FpMat::zero(p, nvar, nvar);
    int col = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int t = 0; t < dm; ++t, ++col) {
                Mat<FieldElem> U = entry_basis(i, j, t);
                Mat<FieldElem> lhs = mat_mul(U, Bb);
                Mat<FieldElem> rhs = mat_mul(Ab, U);
                int row = 0;
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        FieldElem dv = lhs[static_cast<size_t>(a)][static_cast<size_t>(b)] - rhs[static_cast<size_t>(a)][static_cast<size_t>(b)];
                        for (int q2 = 0; q2 < dm; ++q2, ++row)
                            sys.at(row - 0, col) = dv.coeffs()[static_cast<size_t>(q2)];
                    }
            }
    auto kb = fp_kernel_basis(sys);
    if (kb.empty()) return false;
    // deterministic scan of kernel combinations for an invertible residue
    const long long cap = 20000;
    long long combos = 1;
    for (size_t i = 0; i < kb.size() && combos < cap; ++i) combos *= p;
    combos = std::min(combos, cap);
    for (long long code = 1; code < combos; ++code) {
        long long cc = code;
        std::vector<int> coords(static_cast<size_t>(nvar), 0);
        for (const auto& kv : kb) {
            int digit = static_cast<int>(cc % p);
            cc /= p;
            if (digit)
                for (int i = 0; i < nvar; ++i)
                    coords[static_cast<size_t>(i)] = (coords[static_cast<size_t>(i)] + digit * kv[static_cast<size_t>(i)]) % p;
        }
        Mat<FieldElem> Ubar(static_cast<size_t>(d), std::vector<FieldElem>(static_cast<size_t>(d), FieldElem::zero(k)));
        int idx2 = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                std::vector<int> c(coords.begin() + idx2, coords.begin() + idx2 + dm);
                idx2 += dm;
                Ubar[static_cast<size_t>(i)][static_cast<size_t>(j)] = FieldElem::from_coeffs(k, c);
            }
        if (mat_det_field(Ubar).is_zero()) continue;
        // lift U digit by digit: U B = A U exactly
        Mat<LocalInt> U(static_cast<size_t>(d), std::vector<LocalInt>(static_cast<size_t>(d), LocalInt::zero(ring)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                U[static_cast<size_t>(i)][static_cast<size_t>(j)] = LocalInt::teichmuller(ring, Ubar[static_cast<size_t>(i)][static_cast<size_t>(j)]);
        bool ok = true;
        for (int t = 1; t < M && ok; ++t) {
            // residual
            Mat<FieldElem> Sbar(static_cast<size_t>(d), std::vector<FieldElem>(static_cast<size_t>(d), FieldElem::zero(k)));
            bool allzero = true;
            for (int i = 0; i < d && ok; ++i)
                for (int j = 0; j < d && ok; ++j) {
                    LocalInt acc = LocalInt::zero(ring);
                    for (int t2 = 0; t2 < d; ++t2)
                        acc = acc + U[static_cast<size_t>(i)][static_cast<size_t>(t2)] * B[static_cast<size_t>(t2)][static_cast<size_t>(j)] -
                              A[static_cast<size_t>(i)][static_cast<size_t>(t2)] * U[static_cast<size_t>(t2)][static_cast<size_t>(j)];
                    if (acc.valuation() < t) {
                        ok = false;
                        break;
                    }
                    Sbar[static_cast<size_t>(i)][static_cast<size_t>(j)] = acc.div_pi(t).reduce();
                    if (!Sbar[static_cast<size_t>(i)][static_cast<size_t>(j)].is_zero()) allzero = false;
                }
            if (!ok || allzero) continue;
            // solve Z Bb - Ab Z = -Sbar
            std::vector<int> flat;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int q2 = 0; q2 < dm; ++q2)
                        flat.push_back((p - Sbar[static_cast<size_t>(i)][static_cast<size_t>(j)].coeffs()[static_cast<size_t>(q2)]) % p);
            auto z = fp_solve(sys, flat);
            if (!z) {
                ok = false;
                break;
            }
            int idx3 = 0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    std::vector<int> c(z->begin() + idx3, z->begin() + idx3 + dm);
                    idx3 += dm;
                    U[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        U[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                        LocalInt::teichmuller(ring, FieldElem::from_coeffs(k, c)) *
                            LocalInt::uniformizer(ring).pow(t);
                }
        }
        if (!ok) continue;
        // final exact check
        bool exact = true;
        for (int i = 0; i < d && exact; ++i)
            for (int j = 0; j < d && exact; ++j) {
                LocalInt acc = LocalInt::zero(ring);
                for (int t2 = 0; t2 < d; ++t2)
                    acc = acc + U[static_cast<size_t>(i)][static_cast<size_t>(t2)] * B[static_cast<size_t>(t2)][static_cast<size_t>(j)] -
                          A[static_cast<size_t>(i)][static_cast<size_t>(t2)] * U[static_cast<size_t>(t2)][static_cast<size_t>(j)];
                if (!acc.is_zero()) exact = false;
            }
        if (exact) return true;
    }
    return false;
}

}  // namespace phigamma
