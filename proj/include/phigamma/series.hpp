#pragma once

// Truncated univariate Laurent series and bivariate total-degree-truncated
// polynomials over an abstract coefficient ring. Every operation carries its
// output precision; silent precision loss is not allowed.

#include <algorithm>
#include <concepts>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "phigamma/errors.hpp"

namespace phigamma {

template <class R>
concept CoefficientRing = requires(const R& r, const typename R::Elem& a,
                                   const typename R::Elem& b) {
    { r.zero() } -> std::same_as<typename R::Elem>;
    { r.one() } -> std::same_as<typename R::Elem>;
    { r.add(a, b) } -> std::same_as<typename R::Elem>;
    { r.sub(a, b) } -> std::same_as<typename R::Elem>;
    { r.mul(a, b) } -> std::same_as<typename R::Elem>;
    { r.neg(a) } -> std::same_as<typename R::Elem>;
    { r.inv(a) } -> std::same_as<typename R::Elem>;
    { r.is_zero(a) } -> std::same_as<bool>;
    { r.is_unit(a) } -> std::same_as<bool>;
    { r.eq(a, b) } -> std::same_as<bool>;
    { r.coeff_text(a) } -> std::same_as<std::string>;
};

// A Laurent series known on the exponent window [lo, prec). Stored
// coefficients are nonzero and live inside the window; iteration order is
// by exponent, so all derived output is deterministic.
template <CoefficientRing R>
class TruncSeries {
  public:
    using Elem = typename R::Elem;

    TruncSeries() = default;
    TruncSeries(R ring, int lo, int prec) : r_(std::move(ring)), lo_(lo), prec_(prec) {
        if (lo_ > prec_) throw Error("TruncSeries: empty window");
    }

    static TruncSeries zero(R ring, int prec) { return TruncSeries(std::move(ring), 0, prec); }

    static TruncSeries monomial(R ring, const Elem& c, int exp, int prec) {
        TruncSeries s(std::move(ring), std::min(exp, prec), prec);
        s.set(exp, c);
        return s;
    }

    static TruncSeries variable(R ring, int prec) {
        auto one = ring.one();
        return monomial(std::move(ring), one, 1, prec);
    }

    static TruncSeries constant(R ring, const Elem& c, int prec) {
        return monomial(std::move(ring), c, 0, prec);
    }

    const R& ring() const { return r_; }
    int lo() const { return lo_; }
    int prec() const { return prec_; }
    const std::map<int, Elem>& coeffs() const { return c_; }

    // lowest exponent with a nonzero stored coefficient; prec() if none
    int valuation() const { return c_.empty() ? prec_ : c_.begin()->first; }

    bool is_zero() const { return c_.empty(); }

    Elem coeff(int e) const {
        auto it = c_.find(e);
        return it == c_.end() ? r_.zero() : it->second;
    }

    void set(int e, const Elem& v) {
        if (e >= prec_) return;  // beyond the window: unknown, drop
        if (e < lo_) lo_ = e;
        if (r_.is_zero(v))
            c_.erase(e);
        else
            c_[e] = v;
    }

    TruncSeries with_window(int lo, int prec) const {
        TruncSeries s(r_, std::min(lo, prec), prec);
        for (const auto& [e, v] : c_)
            if (e >= lo && e < prec) s.c_[e] = v;
        return s;
    }

    // restrict the stated precision (never extends knowledge)
    TruncSeries truncated(int prec) const { return with_window(lo_, std::min(prec, prec_)); }

    TruncSeries operator+(const TruncSeries& o) const {
        check_ring(o);
        TruncSeries s(r_, std::min(lo_, o.lo_), std::min(prec_, o.prec_));
        for (const auto& [e, v] : c_)
            if (e < s.prec_) s.c_[e] = v;
        for (const auto& [e, v] : o.c_) {
            if (e >= s.prec_) continue;
            auto it = s.c_.find(e);
            if (it == s.c_.end())
                s.c_[e] = v;
            else {
                it->second = r_.add(it->second, v);
                if (r_.is_zero(it->second)) s.c_.erase(it);
            }
        }
        return s;
    }

    TruncSeries operator-() const {
        TruncSeries s(r_, lo_, prec_);
        for (const auto& [e, v] : c_) s.c_[e] = r_.neg(v);
        return s;
    }

    TruncSeries operator-(const TruncSeries& o) const { return *this + (-o); }

    TruncSeries operator*(const TruncSeries& o) const {
        check_ring(o);
        // window arithmetic: product known on [la+lb, min(pa+lb, pb+la))
        int lo = lo_ + o.lo_;
        int prec = std::min(prec_ + o.lo_, o.prec_ + lo_);
        TruncSeries s(r_, std::min(lo, prec), prec);
        for (const auto& [e1, v1] : c_)
            for (const auto& [e2, v2] : o.c_) {
                int e = e1 + e2;
                if (e >= prec) continue;
                auto it = s.c_.find(e);
                Elem t = r_.mul(v1, v2);
                if (it == s.c_.end()) {
                    if (!r_.is_zero(t)) s.c_[e] = t;
                } else {
                    it->second = r_.add(it->second, t);
                    if (r_.is_zero(it->second)) s.c_.erase(it);
                }
            }
        return s;
    }

    TruncSeries scaled(const Elem& c) const {
        TruncSeries s(r_, lo_, prec_);
        for (const auto& [e, v] : c_) {
            Elem t = r_.mul(c, v);
            if (!r_.is_zero(t)) s.c_[e] = t;
        }
        return s;
    }

    TruncSeries shifted(int k) const {  // multiply by u^k
        TruncSeries s(r_, lo_ + k, prec_ + k);
        for (const auto& [e, v] : c_) s.c_[e + k] = v;
        return s;
    }

    // multiplicative inverse; requires the lowest stored coefficient to be a
    // unit. For x known on [v, P) the inverse is known on [-v, P - 2v).
    TruncSeries inverse() const {
        if (c_.empty()) throw Error("series inverse: zero series");
        const int v = c_.begin()->first;
        const Elem& lead = c_.begin()->second;
        if (!r_.is_unit(lead)) throw Error("series inverse: leading coefficient not a unit");
        const int relprec = prec_ - v;  // relative precision
        // h := x / (lead u^v) - 1, supported on [1, relprec)
        Elem linv = r_.inv(lead);
        TruncSeries h(r_, 0, relprec);
        for (const auto& [e, c] : c_) {
            if (e == v) continue;
            h.c_[e - v] = r_.mul(linv, c);
        }
        // geometric series sum_{k} (-h)^k, h has valuation >= 1
        TruncSeries acc = constant(r_, r_.one(), relprec);
        TruncSeries pw = constant(r_, r_.one(), relprec);
        TruncSeries mh = -h;
        for (int k = 1; k < relprec; ++k) {
            pw = pw * mh;
            pw = pw.with_window(0, relprec);
            if (pw.is_zero()) break;
            acc = acc + pw;
        }
        TruncSeries res = acc.scaled(linv).shifted(-v);
        return res.with_window(-v, prec_ - 2 * v);
    }

    TruncSeries inv() const { return inverse(); }

    bool eq_at_shared_precision(const TruncSeries& o) const {
        int prec = std::min(prec_, o.prec_);
        int lo = std::max(lo_, o.lo_);
        for (int e = lo; e < prec; ++e)
            if (!r_.eq(coeff(e), o.coeff(e))) return false;
        // coefficients below the shared lo must agree too when both known
        int lo2 = std::min(lo_, o.lo_);
        for (int e = lo2; e < lo; ++e) {
            if (e >= lo_ && !r_.is_zero(coeff(e))) return false;
            if (e >= o.lo_ && !r_.is_zero(o.coeff(e))) return false;
        }
        return true;
    }

    std::string to_text(const std::string& var = "u") const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, v] : c_) {
            if (!first) os << " + ";
            first = false;
            if (e == 0) {
                os << r_.coeff_text(v);
            } else {
                os << var;
                if (e != 1) os << '^' << e;
                os << '*' << r_.coeff_text(v);
            }
        }
        if (first) os << '0';
        os << " + O(" << var << '^' << prec_ << ')';
        return os.str();
    }

  private:
    void check_ring(const TruncSeries& o) const {
        if (!(r_ == o.r_)) throw Error("series: coefficient rings differ");
    }

    R r_;
    int lo_ = 0;
    int prec_ = 0;
    std::map<int, Elem> c_;
};

// Bivariate polynomial truncated at total degree < N.
template <CoefficientRing R>
class BivarTrunc {
  public:
    using Elem = typename R::Elem;
    using Key = std::pair<int, int>;

    BivarTrunc() = default;
    BivarTrunc(R ring, int N) : r_(std::move(ring)), n_(N) {}

    static BivarTrunc zero(R ring, int N) { return BivarTrunc(std::move(ring), N); }

    static BivarTrunc var_x(R ring, int N) {
        BivarTrunc b(ring, N);
        b.set(1, 0, ring.one());
        return b;
    }

    static BivarTrunc var_y(R ring, int N) {
        BivarTrunc b(ring, N);
        b.set(0, 1, ring.one());
        return b;
    }

    const R& ring() const { return r_; }
    int cutoff() const { return n_; }
    const std::map<Key, Elem>& coeffs() const { return c_; }

    bool is_zero() const { return c_.empty(); }

    Elem coeff(int i, int j) const {
        auto it = c_.find({i, j});
        return it == c_.end() ? r_.zero() : it->second;
    }

    void set(int i, int j, const Elem& v) {
        if (i + j >= n_ || i < 0 || j < 0) return;
        if (r_.is_zero(v))
            c_.erase({i, j});
        else
            c_[{i, j}] = v;
    }

    BivarTrunc truncated(int N) const {
        BivarTrunc b(r_, std::min(N, n_));
        for (const auto& [k, v] : c_)
            if (k.first + k.second < b.n_) b.c_[k] = v;
        return b;
    }

    BivarTrunc operator+(const BivarTrunc& o) const {
        BivarTrunc b(r_, std::min(n_, o.n_));
        for (const auto& [k, v] : c_)
            if (k.first + k.second < b.n_) b.c_[k] = v;
        for (const auto& [k, v] : o.c_) {
            if (k.first + k.second >= b.n_) continue;
            auto it = b.c_.find(k);
            if (it == b.c_.end())
                b.c_[k] = v;
            else {
                it->second = r_.add(it->second, v);
                if (r_.is_zero(it->second)) b.c_.erase(it);
            }
        }
        return b;
    }

    BivarTrunc operator-() const {
        BivarTrunc b(r_, n_);
        for (const auto& [k, v] : c_) b.c_[k] = r_.neg(v);
        return b;
    }

    BivarTrunc operator-(const BivarTrunc& o) const { return *this + (-o); }

    BivarTrunc operator*(const BivarTrunc& o) const {
        BivarTrunc b(r_, std::min(n_, o.n_));
        for (const auto& [k1, v1] : c_)
            for (const auto& [k2, v2] : o.c_) {
                int i = k1.first + k2.first, j = k1.second + k2.second;
                if (i + j >= b.n_) continue;
                Elem t = r_.mul(v1, v2);
                auto it = b.c_.find({i, j});
                if (it == b.c_.end()) {
                    if (!r_.is_zero(t)) b.c_[{i, j}] = t;
                } else {
                    it->second = r_.add(it->second, t);
                    if (r_.is_zero(it->second)) b.c_.erase(it);
                }
            }
        return b;
    }

    BivarTrunc scaled(const Elem& c) const {
        BivarTrunc b(r_, n_);
        for (const auto& [k, v] : c_) {
            Elem t = r_.mul(c, v);
            if (!r_.is_zero(t)) b.c_[k] = t;
        }
        return b;
    }

    bool eq_at_shared_cutoff(const BivarTrunc& o) const {
        int n = std::min(n_, o.n_);
        for (const auto& [k, v] : c_)
            if (k.first + k.second < n && !r_.eq(v, o.coeff(k.first, k.second))) return false;
        for (const auto& [k, v] : o.c_)
            if (k.first + k.second < n && !r_.eq(v, coeff(k.first, k.second))) return false;
        return true;
    }

    // swap the two variables
    BivarTrunc swapped() const {
        BivarTrunc b(r_, n_);
        for (const auto& [k, v] : c_) b.c_[{k.second, k.first}] = v;
        return b;
    }

    // Canonical text: monomials sorted by (total degree, exponent lex);
    // unit coefficients are suppressed.
    std::string to_text(const std::string& vx = "X", const std::string& vy = "Y") const {
        std::vector<std::pair<Key, Elem>> terms(c_.begin(), c_.end());
        std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
            int da = a.first.first + a.first.second, db = b.first.first + b.first.second;
            if (da != db) return da < db;
            return a.first.first > b.first.first;  // X-heavy monomials first
        });
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, v] : terms) {
            if (!first) os << " + ";
            first = false;
            std::string mono;
            if (k.first > 0) {
                mono += vx;
                if (k.first != 1) mono += '^' + std::to_string(k.first);
            }
            if (k.second > 0) {
                if (!mono.empty()) mono += '*';
                mono += vy;
                if (k.second != 1) mono += '^' + std::to_string(k.second);
            }
            bool unit = r_.eq(v, r_.one());
            if (mono.empty())
                os << r_.coeff_text(v);
            else if (unit)
                os << mono;
            else
                os << mono << '*' << r_.coeff_text(v);
        }
        if (first) os << '0';
        os << " + O(deg " << n_ << ')';
        return os.str();
    }

  private:
    R r_;
    int n_ = 0;
    std::map<Key, Elem> c_;
};

// f(g) for f, g univariate with g of positive valuation window.
// Result precision: min(v_g * prec_f, prec_g + (lo_f - 1) * v_g) with
// v_g = lo(g); both operands must share the ring and g must have no
// constant term.
template <CoefficientRing R>
TruncSeries<R> compose(const TruncSeries<R>& f, const TruncSeries<R>& g) {
    const R& r = f.ring();
    if (!(r == g.ring())) throw Error("compose: coefficient rings differ");
    if (g.lo() < 1 || !r.is_zero(g.coeff(0)))
        throw Error("compose: inner series must have zero constant term");
    if (f.lo() < 0) throw Error("compose: Laurent outer series not supported here");
    const int vg = std::max(g.lo(), 1);
    const int prec = std::min(vg * f.prec(), g.prec() + (std::max(f.lo(), 1) - 1) * vg);
    // Horner from the top known exponent of f
    TruncSeries<R> acc = TruncSeries<R>::zero(r, prec);
    for (int e = f.prec() - 1; e >= 1; --e) {
        acc = acc * g;
        acc = acc.with_window(0, prec);
        auto c = f.coeff(e);
        if (!r.is_zero(c)) acc = acc + TruncSeries<R>::constant(r, c, prec);
    }
    acc = acc * g;
    acc = acc.with_window(std::min(vg, prec), prec);
    auto c0 = f.coeff(0);
    if (!r.is_zero(c0)) acc = acc + TruncSeries<R>::constant(r, c0, prec);
    return acc;
}

// F(a(t), b(t)) for a bivariate truncation and univariate arguments of
// positive valuation.
template <CoefficientRing R>
TruncSeries<R> substitute_xy(const BivarTrunc<R>& F, const TruncSeries<R>& a,
                             const TruncSeries<R>& b) {
    const R& r = F.ring();
    if (!(r == a.ring()) || !(r == b.ring())) throw Error("substitute_xy: rings differ");
    if (a.lo() < 1 || !r.is_zero(a.coeff(0)) || b.lo() < 1 || !r.is_zero(b.coeff(0)))
        throw Error("substitute_xy: arguments must have zero constant term");
    const int va = std::max(a.lo(), 1), vb = std::max(b.lo(), 1);
    const int prec = std::min({F.cutoff() * std::min(va, vb), a.prec(), b.prec()});
    // group by x-exponent, Horner in a; inner Horner in b
    int max_i = 0, max_j = 0;
    for (const auto& [k, v] : F.coeffs()) {
        max_i = std::max(max_i, k.first);
        max_j = std::max(max_j, k.second);
    }
    TruncSeries<R> acc = TruncSeries<R>::zero(r, prec);
    for (int i = max_i; i >= 0; --i) {
        acc = acc * a;
        acc = acc.with_window(0, prec);
        // row polynomial in b
        TruncSeries<R> row = TruncSeries<R>::zero(r, prec);
        for (int j = max_j; j >= 0; --j) {
            row = row * b;
            row = row.with_window(0, prec);
            auto c = F.coeff(i, j);
            if (!r.is_zero(c)) row = row + TruncSeries<R>::constant(r, c, prec);
        }
        acc = acc + row;
    }
    return acc;
}

// x(u) |-> x(s(u)) for Laurent x and s of positive valuation; negative
// exponents go through s_inv (computed from s when not supplied, which
// requires a unit linear coefficient). Result precision is capped by x's.
template <CoefficientRing R>
TruncSeries<R> substitute_laurent(const TruncSeries<R>& x, const TruncSeries<R>& s,
                                  const TruncSeries<R>* s_inv = nullptr) {
    const R& r = x.ring();
    if (s.lo() < 1 || !r.is_zero(s.coeff(0)))
        throw Error("substitution: inner series must have zero constant term");
    const bool need_neg = !x.coeffs().empty() && x.coeffs().begin()->first < 0;
    if (need_neg && !s_inv && !r.is_unit(s.coeff(1)))
        throw Error("substitution: inner series must have unit linear term");
    std::vector<TruncSeries<R>> cache_pos{TruncSeries<R>::constant(r, r.one(), s.prec() + 2)};
    std::vector<TruncSeries<R>> cache_neg = cache_pos;
    TruncSeries<R> si = need_neg ? (s_inv ? *s_inv : s.inverse()) : cache_pos[0];
    auto power = [&](int k) -> const TruncSeries<R>& {
        if (k >= 0) {
            while (static_cast<int>(cache_pos.size()) <= k) cache_pos.push_back(cache_pos.back() * s);
            return cache_pos[static_cast<size_t>(k)];
        }
        while (static_cast<int>(cache_neg.size()) <= -k) cache_neg.push_back(cache_neg.back() * si);
        return cache_neg[static_cast<size_t>(-k)];
    };
    TruncSeries<R> res(r, x.lo(), x.prec());
    bool init = false;
    for (const auto& [e, c] : x.coeffs()) {
        TruncSeries<R> term = power(e).scaled(c);
        res = init ? res + term : term;
        init = true;
    }
    if (!init) return TruncSeries<R>(r, x.lo(), x.prec());
    return res.truncated(x.prec());
}

// Compositional inverse of f = cX + ..., c a unit.
template <CoefficientRing R>
TruncSeries<R> reversion(const TruncSeries<R>& f) {
    const R& r = f.ring();
    if (f.lo() < 1 || !r.is_zero(f.coeff(0)) || !r.is_unit(f.coeff(1)))
        throw Error("reversion: need f = cX + ... with c a unit");
    const int prec = f.prec();
    auto c1 = f.coeff(1);
    auto c1i = r.inv(c1);
    // solve g degree by degree: f(g(X)) = X
    TruncSeries<R> g = TruncSeries<R>::monomial(r, c1i, 1, 2);
    for (int n = 2; n < prec; ++n) {
        TruncSeries<R> gx = g.with_window(1, n + 1);
        TruncSeries<R> comp = compose(f.truncated(n + 1), gx);
        // error at degree n; correction dg satisfies c1 * dg = -err_n
        auto err = comp.coeff(n);
        TruncSeries<R> g2 = g.with_window(1, n + 1);
        if (!r.is_zero(err)) g2.set(n, r.neg(r.mul(c1i, err)));
        g = g2;
    }
    return g.with_window(1, prec);
}

}  // namespace phigamma
