#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phigamma/localnum.hpp"
#include "phigamma/series.hpp"

using namespace phigamma;

namespace {

struct Rng {
    unsigned long long s;
    explicit Rng(unsigned long long seed) : s(seed) {}
    unsigned long long next() {
        s += 0x9e3779b97f4a7c15ULL;
        unsigned long long z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    int uniform(int n) { return static_cast<int>(next() % static_cast<unsigned long long>(n)); }
};

LocalInt random_elem(const LocalRingPtr& r, Rng& rng) {
    long long q = 1;
    for (int t = 0; t < ring_residue(r).m; ++t) q *= ring_residue(r).p;
    LocalInt x = LocalInt::zero(r);
    for (int i = 0; i < ring_precision(r); ++i) {
        auto d = FieldElem::from_code(ring_residue(r), rng.uniform(static_cast<int>(q)));
        x = x + LocalInt::teichmuller(r, d) * LocalInt::uniformizer(r).pow(i);
    }
    return x;
}

}  // namespace

TEST_CASE("Zp arithmetic: Teichmuller digits and valuation") {
    auto Z3 = make_local_ring(make_field(3, 1), 6);
    LocalInt x = LocalInt::from_int(Z3, 9 * 5);
    CHECK(x.valuation() == 2);
    CHECK(LocalInt::from_int(Z3, 0).is_zero());
    CHECK(LocalInt::from_int(Z3, 729).is_zero());  // 3^6 at precision 6

    // tau(2) = -1 in Z_3
    LocalInt t = LocalInt::teichmuller(Z3, FieldElem::from_int(make_field(3, 1), 2));
    CHECK((t + LocalInt::one(Z3)).is_zero());
    // -1 = tau(2) exactly, so its Teichmuller expansion is a single digit
    auto ds = LocalInt::from_int(Z3, -1).digits();
    CHECK(ds[0] == FieldElem::from_int(make_field(3, 1), 2));
    for (size_t i = 1; i < ds.size(); ++i) CHECK(ds[i].is_zero());
}

TEST_CASE("unramified layer: Frobenius exact on Teichmuller digits") {
    auto W9 = make_local_ring(make_field(3, 2), 5);
    FieldDesc k = make_field(3, 2);
    for (const auto& a : all_elements(k)) {
        LocalInt ta = LocalInt::teichmuller(W9, a);
        CHECK(ta.frobenius(1).eq(LocalInt::teichmuller(W9, a.frobenius(1))));
        // multiplicative section
        for (const auto& b : all_elements(k)) {
            LocalInt tb = LocalInt::teichmuller(W9, b);
            CHECK((ta * tb).eq(LocalInt::teichmuller(W9, a * b)));
        }
    }
    // sigma has order 2
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        LocalInt x = random_elem(W9, rng);
        CHECK(x.frobenius(2).eq(x));
    }
}

TEST_CASE("units invert; pi does not") {
    auto W4 = make_local_ring(make_field(2, 2), 4);
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        LocalInt x = random_elem(W4, rng);
        if (!x.is_unit()) continue;
        CHECK((x * x.inv()).eq(LocalInt::one(W4)));
    }
    CHECK_THROWS_AS(LocalInt::uniformizer(W4).inv(), Error);
}

TEST_CASE("Eisenstein ring Z_3[sqrt(-3)]") {
    auto Z3 = make_local_ring(make_field(3, 1), 6);
    auto ext = make_eisenstein_ext(Z3, {3, 0});  // S^2 + 3
    auto OK = ext.K;
    CHECK(ring_ramification(OK) == 2);
    CHECK(ring_precision(OK) == 12);
    LocalInt S = LocalInt::uniformizer(OK);
    CHECK(S.valuation() == 1);
    CHECK((S * S + LocalInt::from_int(OK, 3)).is_zero());
    CHECK(LocalInt::from_int(OK, 3).valuation() == 2);
    // division by pi
    LocalInt p3 = LocalInt::from_int(OK, 3);
    CHECK(p3.div_pi(1).eq(-S));  // 3/S = -S since S^2 = -3
}

TEST_CASE("Eisenstein validation") {
    auto Z3 = make_local_ring(make_field(3, 1), 4);
    CHECK_THROWS_AS(make_eisenstein_ext(Z3, {1, 0}), Error);   // constant term a unit
    CHECK_THROWS_AS(make_eisenstein_ext(Z3, {9, 0}), Error);   // valuation 2
    CHECK_THROWS_AS(make_eisenstein_ext(Z3, {3, 1}), Error);   // middle not divisible
}

TEST_CASE("norm: unramified extension, norm of base element") {
    // x = p in O_F included in unramified K of degree s: N(x) = x^s
    auto Z3 = make_local_ring(make_field(3, 1), 6);
    auto ext = make_unramified_ext(Z3, 2);
    LocalInt p = LocalInt::from_int(ext.K, 3);
    LocalInt n = norm(p, ext);
    CHECK(n.eq(LocalInt::from_int(Z3, 9)));
    // criterion: varpi = pi = p is true
    CHECK(lt_extension_criterion(LocalInt::from_int(Z3, 3), p, ext));
}

TEST_CASE("norm: Qp(sqrt(-p)) and Qp(sqrt(p)), p in {3,5}") {
    for (int p : {3, 5}) {
        auto Zp = make_local_ring(make_field(p, 1), 6);
        LocalInt pi = LocalInt::from_int(Zp, p);

        auto extm = make_eisenstein_ext(Zp, {p, 0});  // S^2 + p, S = sqrt(-p)
        LocalInt wm = LocalInt::uniformizer(extm.K);
        CHECK(norm(wm, extm).eq(pi));
        CHECK(lt_extension_criterion(pi, wm, extm));

        auto extp = make_eisenstein_ext(Zp, {-p, 0});  // S^2 - p, S = sqrt(p)
        LocalInt wp = LocalInt::uniformizer(extp.K);
        CHECK(norm(wp, extp).eq(-pi));
        CHECK_FALSE(lt_extension_criterion(pi, wp, extp));
    }
}

TEST_CASE("norm is multiplicative and valuation-compatible") {
    auto Z2 = make_local_ring(make_field(2, 1), 5);
    auto ext = make_unramified_ext(Z2, 2);
    Rng rng(11);
    for (int t = 0; t < 15; ++t) {
        LocalInt a = random_elem(ext.K, rng);
        LocalInt b = random_elem(ext.K, rng);
        if (a.is_zero() || b.is_zero() || (a * b).is_zero()) continue;
        bool precision_ok = true;
        LocalInt na = LocalInt::zero(ext.F), nb = na, nab = na;
        try {
            na = norm(a, ext);
            nb = norm(b, ext);
            nab = norm(a * b, ext);
        } catch (const PrecisionError&) {
            precision_ok = false;
        }
        if (!precision_ok) continue;
        CHECK(nab.eq(na * nb));
        // v_F(N(x)) = f * v_K(x), f = s here (unramified)
        CHECK(na.valuation() == 2 * a.valuation());
    }
}

TEST_CASE("criterion invariant under norm-one units (unramified)") {
    auto Z3 = make_local_ring(make_field(3, 1), 6);
    auto ext = make_unramified_ext(Z3, 2);
    LocalInt pi = LocalInt::from_int(Z3, 3);
    Rng rng(23);
    for (int t = 0; t < 10; ++t) {
        LocalInt w = random_elem(ext.K, rng);
        if (!w.is_unit()) continue;
        LocalInt v = w.frobenius(1) * w.inv();  // sigma(w)/w has norm 1
        CHECK(norm(v, ext).eq(LocalInt::one(Z3)));
        LocalInt varpi = ext_embed(ext, pi) * v;
        CHECK(lt_extension_criterion(pi, varpi, ext));
    }
}

TEST_CASE("norm precision exhaustion is reported") {
    auto Z3 = make_local_ring(make_field(3, 1), 2);
    auto ext = make_unramified_ext(Z3, 2);
    LocalInt x = LocalInt::from_int(ext.K, 3);  // N(3) = 9 = 0 at precision 2
    CHECK_THROWS_AS(norm(x, ext), PrecisionError);
}

TEST_CASE("series over Z_p: reversion with integer coefficients") {
    auto Z5 = make_local_ring(make_field(5, 1), 6);
    LocalRing r{Z5};
    TruncSeries<LocalRing> f(r, 1, 4);
    f.set(1, r.one());
    f.set(2, r.one());
    auto g = reversion(f);
    // X - X^2 + 2X^3
    CHECK(g.coeff(1).eq(r.from_int(1)));
    CHECK(g.coeff(2).eq(r.from_int(-1)));
    CHECK(g.coeff(3).eq(r.from_int(2)));
}

TEST_CASE("text form") {
    auto Z3 = make_local_ring(make_field(3, 1), 4);
    LocalInt x = LocalInt::from_int(Z3, 6);  // 6 = tau(2)*3 + tau(1)*9
    CHECK(x.to_text() == "loc(3,1,1):[0,2,1,0] * pi^1");
}
