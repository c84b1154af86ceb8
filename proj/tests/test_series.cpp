#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phigamma/fields.hpp"
#include "phigamma/series.hpp"

using namespace phigamma;

namespace {

using GS = TruncSeries<GFRing>;
using GB = BivarTrunc<GFRing>;

GFRing f3() { return GFRing{make_field(3, 1)}; }
GFRing f5() { return GFRing{make_field(5, 1)}; }
GFRing f7() { return GFRing{make_field(7, 1)}; }

// tiny deterministic generator
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

GS random_series(const GFRing& r, int lo, int prec, Rng& rng) {
    GS s(r, lo, prec);
    for (int e = lo; e < prec; ++e)
        s.set(e, FieldElem::from_int(r.desc, rng.uniform(r.desc.p)));
    return s;
}

}  // namespace

TEST_CASE("compose identities") {
    auto r = f3();
    GS x = GS::variable(r, 6);
    GS g(r, 1, 6);
    g.set(1, r.from_int(2));
    g.set(3, r.from_int(1));
    CHECK(compose(x, g).eq_at_shared_precision(g));

    // f = X + X^2, g = 2X over F_3, prec 3 -> 2X + X^2
    GS f(r, 1, 3);
    f.set(1, r.from_int(1));
    f.set(2, r.from_int(1));
    GS g2(r, 1, 3);
    g2.set(1, r.from_int(2));
    GS got = compose(f, g2);
    GS want(r, 1, 3);
    want.set(1, r.from_int(2));
    want.set(2, r.from_int(1));
    CHECK(got.eq_at_shared_precision(want));
}

TEST_CASE("compose rejects nonzero constant term") {
    auto r = f3();
    GS f = GS::variable(r, 4);
    GS g = GS::constant(r, r.one(), 4);
    CHECK_THROWS_AS(compose(f, g), Error);
}

TEST_CASE("compose is associative up to truncation") {
    auto r = f5();
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        GS f = random_series(r, 1, 5, rng);
        GS g = random_series(r, 1, 5, rng);
        GS h = random_series(r, 1, 5, rng);
        // inner series need nonzero... only zero-constant-term is required
        GS a = compose(f, compose(g, h));
        GS b = compose(compose(f, g), h);
        CHECK(a.eq_at_shared_precision(b));
    }
}

TEST_CASE("substitute_xy basics") {
    auto r = f3();
    // F = X + Y, a = t, b = t^2 -> t + t^2
    GB F(r, 5);
    F.set(1, 0, r.one());
    F.set(0, 1, r.one());
    GS t = GS::variable(r, 5);
    GS t2 = t * t;
    GS got = substitute_xy(F, t, t2);
    GS want(r, 1, 5);
    want.set(1, r.one());
    want.set(2, r.one());
    CHECK(got.eq_at_shared_precision(want));

    // F = X + Y + XY, a = b = t -> 2t + t^2
    GB F2(r, 5);
    F2.set(1, 0, r.one());
    F2.set(0, 1, r.one());
    F2.set(1, 1, r.one());
    GS got2 = substitute_xy(F2, t, t);
    GS want2(r, 1, 5);
    want2.set(1, r.from_int(2));
    want2.set(2, r.one());
    CHECK(got2.eq_at_shared_precision(want2));
}

TEST_CASE("substitute_xy: multiplicative-style expansion mod p") {
    // F = X+Y+XY, a = t, b = (1+t)^p - 1 -> t + t^p + t^(p+1) mod p
    for (int p : {2, 3, 5}) {
        GFRing r{make_field(p, 1)};
        const int prec = p + 3;
        GB F(r, prec + 2);
        F.set(1, 0, r.one());
        F.set(0, 1, r.one());
        F.set(1, 1, r.one());
        GS t = GS::variable(r, prec);
        // b = (1+t)^p - 1 via binomials mod p: equals t^p
        GS b(r, 1, prec);
        for (int k = 1; k <= p; ++k) {
            long long binom = 1;
            for (int i = 0; i < k; ++i) binom = binom * (p - i) / (i + 1);
            b.set(k, r.from_int(binom));
        }
        GS got = substitute_xy(F, t, b);
        GS want(r, 1, prec);
        want.set(1, r.one());
        want.set(p, r.one());
        want.set(p + 1, r.one());
        CHECK(got.eq_at_shared_precision(want));
    }
}

TEST_CASE("reversion examples") {
    auto r = f7();
    GS x = GS::variable(r, 6);
    CHECK(reversion(x).eq_at_shared_precision(x));

    // f = X + X^2, prec 4 -> X - X^2 + 2X^3 (integer coefficients; here mod 7)
    GS f(r, 1, 4);
    f.set(1, r.one());
    f.set(2, r.one());
    GS got = reversion(f);
    GS want(r, 1, 4);
    want.set(1, r.from_int(1));
    want.set(2, r.from_int(-1));
    want.set(3, r.from_int(2));
    CHECK(got.eq_at_shared_precision(want));
}

TEST_CASE("reversion: compose(f, reversion(f)) = X") {
    auto r = f5();
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        GS f = random_series(r, 1, 6, rng);
        auto c1 = f.coeff(1);
        if (!r.is_unit(c1)) {
            f.set(1, r.one());
        }
        GS g = reversion(f);
        GS comp = compose(f, g);
        GS x = GS::variable(r, comp.prec());
        CHECK(comp.eq_at_shared_precision(x));
        GS comp2 = compose(g, f);
        CHECK(comp2.eq_at_shared_precision(x));
    }
}

TEST_CASE("reversion is an involution up to truncation") {
    auto r = f3();
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        GS f = random_series(r, 1, 6, rng);
        if (!r.is_unit(f.coeff(1))) f.set(1, r.from_int(1));
        CHECK(reversion(reversion(f)).eq_at_shared_precision(f));
    }
}

TEST_CASE("reversion rejects non-unit linear coefficient") {
    auto r = f3();
    GS f(r, 1, 4);
    f.set(2, r.one());
    CHECK_THROWS_AS(reversion(f), Error);
}

TEST_CASE("ring axioms up to truncation (randomized)") {
    auto r = f5();
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        GS a = random_series(r, -2, 4, rng);
        GS b = random_series(r, -1, 5, rng);
        GS c = random_series(r, 0, 4, rng);
        CHECK((a + b).eq_at_shared_precision(b + a));
        CHECK((a * b).eq_at_shared_precision(b * a));
        CHECK(((a + b) * c).eq_at_shared_precision(a * c + b * c));
        CHECK(((a * b) * c).eq_at_shared_precision(a * (b * c)));
    }
    // bivariate
    for (int trial = 0; trial < 100; ++trial) {
        GB a(r, 5), b(r, 5), c(r, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j + i < 5; ++j) {
                a.set(i, j, r.from_int(rng.uniform(5)));
                b.set(i, j, r.from_int(rng.uniform(5)));
                c.set(i, j, r.from_int(rng.uniform(5)));
            }
        CHECK((a * b).eq_at_shared_cutoff(b * a));
        CHECK(((a + b) * c).eq_at_shared_cutoff(a * c + b * c));
    }
}

TEST_CASE("Laurent multiplication adds valuations; inverse works") {
    auto r = f5();
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        GS a = random_series(r, -2, 4, rng);
        GS b = random_series(r, -3, 3, rng);
        if (a.is_zero() || b.is_zero()) continue;
        CHECK((a * b).valuation() == a.valuation() + b.valuation());
        GS ai = a.inverse();
        GS prod = a * ai;
        GS one = GS::constant(r, r.one(), prod.prec());
        CHECK(prod.eq_at_shared_precision(one));
    }
}

TEST_CASE("canonical text forms") {
    auto r = f3();
    GS s(r, -1, 8);
    s.set(-1, r.from_int(1));
    s.set(2, r.from_int(2));
    CHECK(s.to_text() == "u^-1*[1] + u^2*[2] + O(u^8)");

    GB F(r, 4);
    F.set(1, 0, r.one());
    F.set(0, 1, r.one());
    F.set(1, 1, r.one());
    CHECK(F.to_text() == "X + Y + X*Y + O(deg 4)");
}
