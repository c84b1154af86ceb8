#include "phigamma/ltgroup.hpp"

#include <array>
#include <map>
#include <mutex>

namespace phigamma {

namespace detail {

struct LTCache {
    mutable std::mutex mu;
    mutable std::unique_ptr<BivarTrunc<LocalRing>> F;
    mutable std::map<std::string, TruncSeries<LocalRing>> mul;
};

}  // namespace detail

namespace {

using LS = TruncSeries<LocalRing>;
using LB = BivarTrunc<LocalRing>;

// substitute bivariate arguments into a bivariate truncation
LB subst_bivar(const LB& F, const LB& A, const LB& B) {
    const LocalRing& r = F.ring();
    const int N = F.cutoff();
    int max_i = 0, max_j = 0;
    for (const auto& [k, v] : F.coeffs()) {
        max_i = std::max(max_i, k.first);
        max_j = std::max(max_j, k.second);
    }
    LB acc = LB::zero(r, N);
    for (int i = max_i; i >= 0; --i) {
        acc = acc * A;
        LB row = LB::zero(r, N);
        for (int j = max_j; j >= 0; --j) {
            row = row * B;
            auto c = F.coeff(i, j);
            if (!r.is_zero(c)) {
                LB cc = LB::zero(r, N);
                cc.set(0, 0, c);
                row = row + cc;
            }
        }
        acc = acc + row;
    }
    return acc;
}

// f(G) for univariate f and bivariate G without constant term
LB compose_into_bivar(const LS& f, const LB& G) {
    const LocalRing& r = f.ring();
    const int N = G.cutoff();
    LB acc = LB::zero(r, N);
    int top = std::min(f.prec() - 1, N - 1);
    // all exponents of f up to its polynomial support matter when f is exact
    for (const auto& [e, c] : f.coeffs()) top = std::max(top, std::min(e, N - 1));
    for (int e = top; e >= 1; --e) {
        acc = acc * G;
        auto c = f.coeff(e);
        if (!r.is_zero(c)) {
            LB cc = LB::zero(r, N);
            cc.set(0, 0, c);
            acc = acc + cc;
        }
    }
    acc = acc * G;
    return acc;
}

LS univariate_in_x(const LB& G) {
    LS s(G.ring(), 1, G.cutoff());
    for (const auto& [k, v] : G.coeffs()) {
        if (k.second != 0) throw Error("expected x-only polynomial");
        s.set(k.first, v);
    }
    return s;
}

void validate_lt_series(const LocalRingPtr& OF, const LS& f, int q, int N) {
    const LocalRing r{OF};
    if (f.lo() < 1 || !r.is_zero(f.coeff(0))) throw Error("not a Lubin-Tate series: constant term");
    if (!f.coeff(1).eq(LocalInt::uniformizer(OF)))
        throw Error("not a Lubin-Tate series: linear coefficient is not the uniformizer");
    if (f.prec() < std::max(N, q + 1))
        throw PrecisionError("Lubin-Tate series known to too low a degree for the requested cutoff");
    // f = X^q mod pi on the stored window
    for (const auto& [e, c] : f.coeffs()) {
        FieldElem red = c.reduce();
        if (e == q) {
            if (!red.is_one()) throw Error("not a Lubin-Tate series: X^q coefficient not 1 mod pi");
        } else if (!red.is_zero()) {
            throw Error("not a Lubin-Tate series: reduction mod pi is not X^q");
        }
    }
    if (f.coeff(q).is_zero()) throw Error("not a Lubin-Tate series: missing X^q term");
}

}  // namespace

LocalRingPtr lt_working_ring(const FieldDesc& residue, int M, int N,
                             const std::vector<long long>& eis) {
    return make_local_ring(residue, M + N + 2, eis);
}

LTData make_lt_data(const LocalRingPtr& OF, TruncSeries<LocalRing> f, bool polynomial, int N) {
    if (N < 2) throw Error("LT cutoff must be >= 2");
    LTData lt;
    lt.ring = LocalRing{OF};
    long long q = 1;
    for (int i = 0; i < ring_residue(OF).m; ++i) q *= ring_p(OF);
    lt.q = static_cast<int>(q);
    lt.pi = LocalInt::uniformizer(OF);
    validate_lt_series(OF, f, lt.q, N);
    lt.f = std::move(f);
    lt.f_polynomial = polynomial;
    lt.N = N;
    lt.guaranteed_prec = std::max(1, ring_precision(OF) - N + 1);
    lt.cache = std::make_shared<detail::LTCache>();
    return lt;
}

LTData make_lt_standard(const LocalRingPtr& OF, int N) {
    LocalRing r{OF};
    long long q = 1;
    for (int i = 0; i < ring_residue(OF).m; ++i) q *= ring_p(OF);
    const int prec = std::max<int>(N, static_cast<int>(q) + 1);
    LS f(r, 1, prec);
    f.set(1, LocalInt::uniformizer(OF));
    f.set(static_cast<int>(q), r.one());
    return make_lt_data(OF, std::move(f), true, N);
}

LTData make_lt_multiplicative(const LocalRingPtr& OF, int N) {
    if (ring_residue(OF).m != 1 || ring_ramification(OF) != 1)
        throw Error("not a Lubin-Tate series: (1+X)^p - 1 requires residue field F_p over Z_p");
    const int p = ring_p(OF);
    LocalRing r{OF};
    const int prec = std::max(N, p + 1);
    LS f(r, 1, prec);
    // binomial coefficients C(p, k)
    long long binom = 1;
    for (int k = 1; k <= p; ++k) {
        binom = binom * (p - k + 1) / k;
        f.set(k, r.from_int(binom));
    }
    return make_lt_data(OF, std::move(f), true, N);
}

LTData make_lt_explicit(const LocalRingPtr& OF, const std::vector<long long>& coeffs, int N) {
    LocalRing r{OF};
    const int prec = std::max<int>(N, static_cast<int>(coeffs.size()) + 1);
    LS f(r, 1, prec);
    for (size_t i = 0; i < coeffs.size(); ++i) f.set(static_cast<int>(i) + 1, r.from_int(coeffs[i]));
    return make_lt_data(OF, std::move(f), true, N);
}

const BivarTrunc<LocalRing>& group_law(const LTData& lt) {
    std::lock_guard<std::mutex> lk(lt.cache->mu);
    if (lt.cache->F) return *lt.cache->F;

    const LocalRing& r = lt.ring;
    const int N = lt.N;
    LB F = LB::zero(r, N);
    F.set(1, 0, r.one());
    F.set(0, 1, r.one());
    LB fx = LB::zero(r, N);
    LB fy = LB::zero(r, N);
    for (const auto& [e, c] : lt.f.coeffs()) {
        fx.set(e, 0, c);
        fy.set(0, e, c);
    }
    for (int D = 2; D < N; ++D) {
        LB lhs = compose_into_bivar(lt.f, F.truncated(D + 1));
        LB rhs = subst_bivar(F.truncated(D + 1), fx, fy);
        LB err = lhs - rhs;
        // divide the degree-D error by (pi^D - pi) = -pi (1 - pi^(D-1))
        LocalInt unit = LocalInt::one(lt.pi.ring()) - lt.pi.pow(D - 1);
        LocalInt unit_inv = unit.inv();
        for (const auto& [k, v] : err.coeffs()) {
            int deg = k.first + k.second;
            if (deg < D && v.valuation() < lt.guaranteed_prec)
                throw Error("group law solver: lower-degree residue (uniqueness check failed)");
            if (deg != D) continue;
            if (v.valuation() < 1)
                throw Error("group law solver: correction not divisible by pi (uniqueness check failed)");
            LocalInt delta = v.div_pi(1) * unit_inv;  // err / (pi - pi^D); F += err/(pi^D - pi)
            F.set(k.first, k.second, F.coeff(k.first, k.second) - delta);
        }
    }
    // canonical representatives mod pi^guaranteed
    {
        LB Fc = LB::zero(r, N);
        for (const auto& [k, v] : F.coeffs()) Fc.set(k.first, k.second, v.truncate_mod(lt.guaranteed_prec));
        F = Fc;
    }
    lt.cache->F = std::make_unique<LB>(F);
    return *lt.cache->F;
}

TruncSeries<LocalRing> lt_mul(const LTData& lt, const LocalInt& a) {
    std::string key = a.to_text();
    {
        std::lock_guard<std::mutex> lk(lt.cache->mu);
        auto it = lt.cache->mul.find(key);
        if (it != lt.cache->mul.end()) return it->second;
    }
    const LocalRing& r = lt.ring;
    const int N = lt.N;
    LS g(r, 1, 2);
    g.set(1, a);
    for (int D = 2; D < N; ++D) {
        LS gD = g.with_window(1, D + 1);
        LS lhs = compose(gD, lt.f);   // [a] o f
        LS rhs = compose(lt.f, gD);   // f o [a]
        LS err = lhs - rhs;
        for (int e = 1; e < D; ++e)
            if (err.coeff(e).valuation() < lt.guaranteed_prec)
                throw Error("lt_mul solver: lower-degree residue (uniqueness check failed)");
        LocalInt eD = err.coeff(D);
        LocalInt unit_inv = (LocalInt::one(lt.pi.ring()) - lt.pi.pow(D - 1)).inv();
        if (eD.valuation() < 1)
            throw Error("lt_mul solver: correction not divisible by pi (uniqueness check failed)");
        LocalInt delta = eD.div_pi(1) * unit_inv;  // err/(pi - pi^D)
        gD.set(D, delta);
        g = gD;
    }
    g = g.with_window(1, N);
    {
        LS gc(r, 1, N);
        for (const auto& [e, c] : g.coeffs()) gc.set(e, c.truncate_mod(lt.guaranteed_prec));
        g = gc;
    }
    std::lock_guard<std::mutex> lk(lt.cache->mu);
    lt.cache->mul.emplace(key, g);
    return g;
}

TorsionPoly torsion_polynomial(const LTData& lt, int n) {
    if (!lt.f_polynomial)
        throw UnsupportedModeError("torsion polynomials are only offered for polynomial f");
    if (n < 1) throw Error("torsion level must be >= 1");
    const LocalRing& r = lt.ring;
    long long degq = 1;
    for (int i = 0; i < n; ++i) degq *= lt.q;
    const int prec = static_cast<int>(degq) + 1;
    // g(T) = f(T)/T, exact since f(0) = 0
    LS g(r, 0, prec);
    for (const auto& [e, c] : lt.f.coeffs()) g.set(e - 1, c);
    // h = f^(o (n-1)) exactly
    LS h(r, 1, prec);
    for (const auto& [e, c] : lt.f.coeffs()) h.set(e, c);
    LS x = LS::variable(r, prec);
    LS fn = x;
    for (int i = 0; i < n - 1; ++i) fn = compose(h.with_window(1, prec), fn.with_window(1, prec));
    // result = g(fn): evaluate with the constant term of g handled separately
    LS gt(r, 1, prec);
    for (const auto& [e, c] : g.coeffs())
        if (e >= 1) gt.set(e, c);
    LS res = compose(gt.with_window(1, prec), fn.with_window(1, prec));
    res = res + LS::constant(r, g.coeff(0), prec);

    TorsionPoly out;
    out.degree = static_cast<int>(degq - degq / lt.q);
    out.coeffs.assign(static_cast<size_t>(out.degree) + 1, r.zero());
    for (const auto& [e, c] : res.coeffs()) {
        if (e > out.degree && !r.is_zero(c))
            throw Error("torsion polynomial: unexpected degree overflow");
        if (e <= out.degree) out.coeffs[static_cast<size_t>(e)] = c;
    }
    bool ok = out.coeffs[0].valuation() == 1 &&
              out.coeffs[static_cast<size_t>(out.degree)].is_unit();
    for (int e = 1; e < out.degree && ok; ++e)
        if (out.coeffs[static_cast<size_t>(e)].valuation() < 1) ok = false;
    out.eisenstein = ok;
    return out;
}

// ---- axiom checks -------------------------------------------------------------

namespace {

// sparse trivariate truncation, only what the associativity check needs
struct Tri {
    LocalRing r;
    int N;
    std::map<std::array<int, 3>, LocalInt> c;

    static Tri zero(const LocalRing& r, int N) { return Tri{r, N, {}}; }
    static Tri var(const LocalRing& r, int N, int which) {
        Tri t = zero(r, N);
        std::array<int, 3> k{0, 0, 0};
        k[static_cast<size_t>(which)] = 1;
        t.c[k] = r.one();
        return t;
    }
    void add_term(const std::array<int, 3>& k, const LocalInt& v) {
        if (k[0] + k[1] + k[2] >= N) return;
        auto it = c.find(k);
        if (it == c.end()) {
            if (!r.is_zero(v)) c[k] = v;
        } else {
            it->second = it->second + v;
            if (r.is_zero(it->second)) c.erase(it);
        }
    }
    Tri operator+(const Tri& o) const {
        Tri t = *this;
        for (const auto& [k, v] : o.c) t.add_term(k, v);
        return t;
    }
    Tri operator*(const Tri& o) const {
        Tri t = zero(r, N);
        for (const auto& [k1, v1] : c)
            for (const auto& [k2, v2] : o.c)
                t.add_term({k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]}, v1 * v2);
        return t;
    }
    bool eq_mod(const Tri& o, int prec) const {
        for (const auto& [k, v] : c)
            if (!v.eq_mod(o.c.count(k) ? o.c.at(k) : r.zero(), prec)) return false;
        for (const auto& [k, v] : o.c)
            if (!c.count(k) && v.valuation() < prec) return false;
        return true;
    }
};

Tri subst_tri(const LB& F, const Tri& A, const Tri& B) {
    const LocalRing& r = F.ring();
    const int N = A.N;
    int max_i = 0, max_j = 0;
    for (const auto& [k, v] : F.coeffs()) {
        max_i = std::max(max_i, k.first);
        max_j = std::max(max_j, k.second);
    }
    Tri acc = Tri::zero(r, N);
    for (int i = max_i; i >= 0; --i) {
        acc = acc * A;
        Tri row = Tri::zero(r, N);
        for (int j = max_j; j >= 0; --j) {
            row = row * B;
            auto cf = F.coeff(i, j);
            if (!r.is_zero(cf)) row.add_term({0, 0, 0}, cf);
        }
        acc = acc + row;
    }
    return acc;
}

}  // namespace

bool group_law_identity(const LTData& lt) {
    const auto& F = group_law(lt);
    const int g = lt.guaranteed_prec;
    if (!F.coeff(1, 0).eq_mod(lt.ring.one(), g) || !F.coeff(0, 1).eq_mod(lt.ring.one(), g))
        return false;
    for (const auto& [k, v] : F.coeffs()) {
        if (k.first >= 1 && k.second >= 1) continue;  // mixed terms are unconstrained
        if (k.first + k.second == 1) continue;        // the two linear terms, checked above
        if (v.valuation() < g) return false;
    }
    return true;
}

bool group_law_commutative(const LTData& lt) {
    const auto& F = group_law(lt);
    return bivar_eq_mod(F, F.swapped(), lt.guaranteed_prec);
}

bool group_law_associative(const LTData& lt) {
    const auto& F = group_law(lt);
    const int N = lt.N;
    Tri X = Tri::var(lt.ring, N, 0), Y = Tri::var(lt.ring, N, 1), Z = Tri::var(lt.ring, N, 2);
    Tri FXY = subst_tri(F, X, Y);
    Tri FYZ = subst_tri(F, Y, Z);
    return subst_tri(F, FXY, Z).eq_mod(subst_tri(F, X, FYZ), lt.guaranteed_prec);
}

bool group_law_equivariant(const LTData& lt) {
    const auto& F = group_law(lt);
    LB fx = LB::zero(lt.ring, lt.N), fy = LB::zero(lt.ring, lt.N);
    for (const auto& [e, c] : lt.f.coeffs()) {
        fx.set(e, 0, c);
        fy.set(0, e, c);
    }
    return bivar_eq_mod(compose_into_bivar(lt.f, F), subst_bivar(F, fx, fy), lt.guaranteed_prec);
}

bool series_eq_mod(const TruncSeries<LocalRing>& a, const TruncSeries<LocalRing>& b, int k) {
    const int prec = std::min(a.prec(), b.prec());
    const int lo = std::min(a.lo(), b.lo());
    for (int e = lo; e < prec; ++e)
        if (!a.coeff(e).eq_mod(b.coeff(e), k)) return false;
    return true;
}

bool bivar_eq_mod(const BivarTrunc<LocalRing>& a, const BivarTrunc<LocalRing>& b, int k) {
    const int n = std::min(a.cutoff(), b.cutoff());
    for (const auto& [key, v] : a.coeffs())
        if (key.first + key.second < n && !v.eq_mod(b.coeff(key.first, key.second), k)) return false;
    for (const auto& [key, v] : b.coeffs())
        if (key.first + key.second < n && !v.eq_mod(a.coeff(key.first, key.second), k)) return false;
    return true;
}

// ---- reductions ----------------------------------------------------------------

TruncSeries<GFRing> reduce_series(const TruncSeries<LocalRing>& s) {
    GFRing k{ring_residue(s.ring().ctx)};
    TruncSeries<GFRing> out(k, s.lo(), s.prec());
    for (const auto& [e, c] : s.coeffs()) out.set(e, c.reduce());
    return out;
}

BivarTrunc<GFRing> reduce_bivar(const BivarTrunc<LocalRing>& b) {
    GFRing k{ring_residue(b.ring().ctx)};
    BivarTrunc<GFRing> out(k, b.cutoff());
    for (const auto& [key, c] : b.coeffs()) out.set(key.first, key.second, c.reduce());
    return out;
}

}  // namespace phigamma
