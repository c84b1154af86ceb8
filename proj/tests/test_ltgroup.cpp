#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phigamma/ltgroup.hpp"

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

TEST_CASE("multiplicative group law is X + Y + XY exactly") {
    for (int p : {2, 3, 5}) {
        auto OF = lt_working_ring(make_field(p, 1), 6, 12);
        LTData lt = make_lt_multiplicative(OF, 12);
        const auto& F = group_law(lt);
        LocalRing r{OF};
        BivarTrunc<LocalRing> want(r, 12);
        want.set(1, 0, r.one());
        want.set(0, 1, r.one());
        want.set(1, 1, r.one());
        CHECK(bivar_eq_mod(F, want, lt.guaranteed_prec));
    }
}

TEST_CASE("N=2 group law is X + Y") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 2);
    LTData lt = make_lt_standard(OF, 2);
    const auto& F = group_law(lt);
    LocalRing r{OF};
    BivarTrunc<LocalRing> want(r, 2);
    want.set(1, 0, r.one());
    want.set(0, 1, r.one());
    CHECK(bivar_eq_mod(F, want, lt.guaranteed_prec));
}

TEST_CASE("f = 2X + X^2 at N=3 gives X + Y + XY") {
    auto OF = lt_working_ring(make_field(2, 1), 4, 3);
    LTData lt = make_lt_explicit(OF, {2, 1}, 3);
    const auto& F = group_law(lt);
    CHECK(F.coeff(1, 1).eq_mod(lt.ring.one(), lt.guaranteed_prec));
}

TEST_CASE("rejects non-Lubin-Tate series") {
    auto OF = lt_working_ring(make_field(2, 2), 4, 6);  // q = 4
    // multiplicative over F_4 is invalid (f = X^2 mod 2, not X^4)
    CHECK_THROWS_WITH_AS(make_lt_multiplicative(OF, 6), doctest::Contains("not a Lubin-Tate"),
                         Error);
    // f = 2X + X^2 fails the X^q congruence for q = 4
    CHECK_THROWS_WITH_AS(make_lt_explicit(OF, {2, 1}, 6), doctest::Contains("not a Lubin-Tate"),
                         Error);
}

TEST_CASE("group-law axioms for standard and multiplicative f") {
    struct Case {
        int p, r;
    };
    for (Case c : {Case{2, 1}, Case{3, 1}, Case{2, 2}}) {
        auto OF = lt_working_ring(make_field(c.p, c.r), 4, 8);
        LTData lt = make_lt_standard(OF, 8);
        CHECK(group_law_identity(lt));
        CHECK(group_law_commutative(lt));
        CHECK(group_law_associative(lt));
        CHECK(group_law_equivariant(lt));
    }
    for (int p : {2, 3}) {
        auto OF = lt_working_ring(make_field(p, 1), 4, 8);
        LTData lt = make_lt_multiplicative(OF, 8);
        CHECK(group_law_identity(lt));
        CHECK(group_law_commutative(lt));
        CHECK(group_law_associative(lt));
        CHECK(group_law_equivariant(lt));
    }
}

TEST_CASE("lt_mul basics: [1] = X and [pi] = f") {
    auto OF = lt_working_ring(make_field(3, 1), 5, 8);
    LTData lt = make_lt_standard(OF, 8);
    LocalRing r{OF};
    auto one = lt_mul(lt, r.one());
    CHECK(series_eq_mod(one, TruncSeries<LocalRing>::variable(r, 8), lt.guaranteed_prec));
    auto fpi = lt_mul(lt, lt.pi);
    CHECK(series_eq_mod(fpi, lt.f.truncated(8), lt.guaranteed_prec));
}

TEST_CASE("a -> [a] is a ring homomorphism up to truncation") {
    auto OF = lt_working_ring(make_field(2, 1), 4, 7);
    LTData lt = make_lt_standard(OF, 7);
    const auto& F = group_law(lt);
    Rng rng(31);
    for (int t = 0; t < 12; ++t) {
        LocalInt a = random_elem(OF, rng);
        LocalInt b = random_elem(OF, rng);
        auto ga = lt_mul(lt, a);
        auto gb = lt_mul(lt, b);
        auto gsum = lt_mul(lt, a + b);
        auto gprod = lt_mul(lt, a * b);
        // [a+b] = F([a],[b])
        if (!ga.is_zero() && !gb.is_zero()) {
            auto via_F = substitute_xy(F, ga, gb);
            CHECK(series_eq_mod(gsum, via_F, lt.guaranteed_prec));
        }
        // [ab] = [a] o [b]
        if (!gb.is_zero() && gb.lo() >= 1) {
            auto comp = compose(ga, gb);
            CHECK(series_eq_mod(gprod, comp, lt.guaranteed_prec));
        }
    }
}

TEST_CASE("[a] mod pi is X^(q^v(a)) times a unit") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 10);
    LTData lt = make_lt_standard(OF, 10);
    // [pi](u) = u^q mod pi
    auto fpi = reduce_series(lt_mul(lt, lt.pi));
    CHECK(fpi.valuation() == lt.q);
    // unit a: [a] mod pi = unit * X
    auto ga = reduce_series(lt_mul(lt, LocalInt::from_int(OF, 2)));
    CHECK(ga.valuation() == 1);
}

TEST_CASE("torsion polynomial level 1, standard f") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 4);
    LTData lt = make_lt_standard(OF, 4);
    auto t = torsion_polynomial(lt, 1);
    // pi + X^(q-1)
    CHECK(t.degree == 2);
    CHECK(t.eisenstein);
    CHECK(t.coeffs[0].eq_mod(lt.pi, lt.guaranteed_prec));
    CHECK(t.coeffs[2].eq_mod(lt.ring.one(), lt.guaranteed_prec));
    CHECK(t.coeffs[1].is_zero());
}

TEST_CASE("torsion polynomial level 1, multiplicative f") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 4);
    LTData lt = make_lt_multiplicative(OF, 4);
    auto t = torsion_polynomial(lt, 1);
    // ((1+X)^p - 1)/X: degree p-1, constant term p, Eisenstein
    CHECK(t.degree == 2);
    CHECK(t.eisenstein);
    CHECK(t.coeffs[0].eq(LocalInt::from_int(OF, 3)));
}

TEST_CASE("torsion polynomial level 2") {
    auto OF = lt_working_ring(make_field(2, 1), 6, 4);
    LTData lt = make_lt_explicit(OF, {2, 1}, 4);  // f = 2X + X^2
    auto t = torsion_polynomial(lt, 2);
    CHECK(t.degree == 2);  // q^2 - q = 2
    CHECK(t.eisenstein);
    CHECK(t.coeffs[0].valuation() == 1);
    // degree count: deg f^(o2) = q^2 certifies q^2 torsion points
    auto t1 = torsion_polynomial(lt, 1);
    CHECK(t1.degree + 1 + t.degree == 4);  // (q-1) + 1 + (q^2-q) = q^2
}

TEST_CASE("torsion rejected for non-polynomial f") {
    auto OF = lt_working_ring(make_field(2, 1), 4, 6);
    LocalRing r{OF};
    TruncSeries<LocalRing> f(r, 1, 8);
    f.set(1, LocalInt::uniformizer(OF));
    f.set(2, r.one());
    f.set(5, LocalInt::from_int(OF, 2));  // extra tail, still = X^2 mod 2
    LTData lt = make_lt_data(OF, f, false, 6);
    CHECK_THROWS_AS(torsion_polynomial(lt, 1), UnsupportedModeError);
}

TEST_CASE("random valid f: axioms hold at N <= 8") {
    Rng rng(77);
    for (int trial = 0; trial < 3; ++trial) {
        auto OF = lt_working_ring(make_field(2, 1), 4, 6);
        LocalRing r{OF};
        TruncSeries<LocalRing> f(r, 1, 8);
        f.set(1, LocalInt::uniformizer(OF));
        f.set(2, r.one());  // X^q term, q = 2
        // random multiples of pi elsewhere
        for (int e = 3; e < 8; ++e)
            f.set(e, LocalInt::from_int(OF, 2 * rng.uniform(4)));
        LTData lt = make_lt_data(OF, f, false, 6);
        CHECK(group_law_identity(lt));
        CHECK(group_law_commutative(lt));
        CHECK(group_law_associative(lt));
        CHECK(group_law_equivariant(lt));
    }
}
