#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phigamma/lift0.hpp"

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

// A_{Q_p, pi=p} with the standard series, precision (M, N)
CoeffRingDesc ring_F(int p, int M, int N, bool multiplicative = false) {
    auto OF = lt_working_ring(make_field(p, 1), M, N);
    LTData lt = multiplicative ? make_lt_multiplicative(OF, N) : make_lt_standard(OF, N);
    auto OK = make_local_ring(make_field(p, 1), M);
    return make_coeff_ring(LocalRing{OK}, lt, 1, N);
}

ASeries random_aseries(const CoeffRingDesc& A, int lo, Rng& rng) {
    ASeries x(A.base, lo, A.N);
    const FieldDesc k = ring_residue(A.base.ctx);
    long long q = 1;
    for (int i = 0; i < k.m; ++i) q *= k.p;
    for (int e = lo; e < A.N; ++e) {
        LocalInt c = LocalInt::zero(A.base.ctx);
        LocalInt w = LocalInt::uniformizer(A.base.ctx);
        LocalInt pw = LocalInt::one(A.base.ctx);
        for (int i = 0; i < ring_precision(A.base.ctx); ++i) {
            c = c + LocalInt::teichmuller(A.base.ctx,
                                          FieldElem::from_code(k, rng.uniform(static_cast<int>(q)))) *
                        pw;
            pw = pw * w;
        }
        x.set(e, c);
    }
    return x;
}

}  // namespace

TEST_CASE("phi_lift of u is the Frobenius series") {
    // multiplicative f over Q_p: phi(u) = (1+u)^p - 1
    CoeffRingDesc A = ring_F(3, 4, 12, true);
    ASeries u = ASeries::variable(A.base, A.N);
    ASeries fu = phi_lift(A, u);
    ASeries want = lt_series_in_base(A, A.lt.pi);
    CHECK(series_eq_mod(fu, want, 4));
    // constants are fixed
    ASeries c = ASeries::constant(A.base, LocalInt::from_int(A.base.ctx, 7), A.N);
    CHECK(series_eq_mod(phi_lift(A, c), c, 4));
}

TEST_CASE("reduction intertwines phi_lift with the q-power map") {
    Rng rng(9);
    for (int p : {2, 3}) {
        CoeffRingDesc A = ring_F(p, 4, 12);
        for (int t = 0; t < 25; ++t) {
            ASeries x = random_aseries(A, -3, rng);
            auto lhs = reduce_series(phi_lift(A, x));
            auto rhs = frobenius_q(reduce_series(x), A.r);
            CHECK(lhs.eq_at_shared_precision(rhs));
        }
    }
}

TEST_CASE("reduction intertwines gamma_lift with gamma_action") {
    Rng rng(10);
    CoeffRingDesc A = ring_F(3, 4, 12);
    LocalInt c = LocalInt::one(A.lt.ring.ctx) + LocalInt::uniformizer(A.lt.ring.ctx);
    for (int t = 0; t < 25; ++t) {
        ASeries x = random_aseries(A, -2, rng);
        auto lhs = reduce_series(gamma_lift(A, c, x));
        auto rhs = gamma_action(c, reduce_series(x), A.lt);
        CHECK(lhs.eq_at_shared_precision(rhs));
    }
}

TEST_CASE("phi_lift and gamma_lift commute; gamma multiplicative in chi") {
    Rng rng(11);
    CoeffRingDesc A = ring_F(3, 3, 10);
    const LocalRingPtr& OF = A.lt.ring.ctx;
    LocalInt c1 = LocalInt::one(OF) + LocalInt::uniformizer(OF);
    LocalInt c2 = LocalInt::teichmuller(OF, FieldElem::from_int(make_field(3, 1), 2));
    for (int t = 0; t < 10; ++t) {
        ASeries x = random_aseries(A, 0, rng);
        CHECK(series_eq_mod(gamma_lift(A, c1, phi_lift(A, x)), phi_lift(A, gamma_lift(A, c1, x)), 3));
        CHECK(series_eq_mod(gamma_lift(A, c1, gamma_lift(A, c2, x)), gamma_lift(A, c1 * c2, x), 3));
    }
    CHECK_THROWS_AS(gamma_lift(A, LocalInt::uniformizer(OF), ASeries::variable(A.base, 5)), Error);
}

TEST_CASE("A_{K,pi} for unramified K: phi^(rs) is the s-th iterate and is trivial on O_K") {
    // p=2, s=2: K = unramified quadratic
    int p = 2, s = 2, M = 3, N = 8;
    auto OF = lt_working_ring(make_field(p, 1), M, N);
    LTData lt = make_lt_standard(OF, N);
    auto OK = make_local_ring(make_field(p, 2), M);
    CoeffRingDesc A = make_coeff_ring(LocalRing{OK}, lt, s, N);
    // constants of O_K: phi^r moves them, phi^(rs) fixes them
    FieldElem g = multiplicative_generator(make_field(p, 2));
    ASeries c = ASeries::constant(A.base, LocalInt::teichmuller(OK, g), N);
    ASeries c1 = phi_lift(A, c);
    CHECK_FALSE(series_eq_mod(c1, c, M));
    CHECK(series_eq_mod(phi_rs(A, c), c, M));
    // u -> [pi](u) composed s times = [pi^s](u)
    ASeries u = ASeries::variable(A.base, N);
    ASeries lhs = phi_rs(A, u);
    ASeries rhs = lt_series_in_base(A, lt.pi * lt.pi);
    CHECK(series_eq_mod(lhs, rhs, M));
}

TEST_CASE("functor_V_lift: matPhi = (1)") {
    CoeffRingDesc A = ring_F(3, 4, 6);
    auto M1 = make_const_module0(A, {{LocalInt::one(A.base.ctx)}});
    auto v = functor_V_lift(M1, A);
    CHECK(v.basis.size() == 1);
    CHECK(verify_V_lift(M1, A, v));
    // the canonical solution is exactly 1
    CHECK(v.basis[0][0].eq(LocalInt::one(v.cst->ring())));
}

TEST_CASE("functor_V_lift: Teichmuller character") {
    for (int p : {2, 3}) {
        CoeffRingDesc A = ring_F(p, 4, 6);
        FieldDesc k = ring_residue(A.base.ctx);
        for (const auto& g : all_elements(k)) {
            if (g.is_zero() || g.is_one()) continue;
            auto M1 = make_const_module0(A, {{LocalInt::teichmuller(A.base.ctx, g)}});
            auto v = functor_V_lift(M1, A);
            CHECK(verify_V_lift(M1, A, v));
            // solution = Teichmuller lift of the residue solution: digits beyond 0 vanish
            auto ds = v.basis[0][0].digits();
            for (size_t i = 1; i < ds.size(); ++i) CHECK(ds[i].is_zero());
        }
    }
}

TEST_CASE("functor_V_lift: matPhi = 1 + pi*a needs an Artin-Schreier step") {
    CoeffRingDesc A = ring_F(3, 4, 6);
    LocalInt a = LocalInt::one(A.base.ctx);
    LocalInt mp = LocalInt::one(A.base.ctx) + LocalInt::uniformizer(A.base.ctx) * a;
    auto M1 = make_const_module0(A, {{mp}});
    auto v = functor_V_lift(M1, A);
    CHECK(v.growth_steps >= 1);  // trace obstruction at digit 1 forces one growth
    CHECK(verify_V_lift(M1, A, v));
    CHECK_FALSE(v.basis[0][0].is_zero());
}

TEST_CASE("functor_V_lift mod pi equals the residue functor_V") {
    CoeffRingDesc A = ring_F(3, 3, 6);
    FieldDesc k = ring_residue(A.base.ctx);
    FieldElem g = multiplicative_generator(k);
    auto M0 = make_const_module0(A, {{LocalInt::teichmuller(A.base.ctx, g)}});
    auto v = functor_V_lift(M0, A);
    // residue of the lifted basis solves the char-p problem
    auto Mp = make_const_module(k, 1, {{g}}, 2);
    auto vp = functor_V(Mp);
    CHECK(vp.basis.size() == v.basis.size());
    // and the lifted basis reduces to a (nonzero) residue solution
    FieldElem red = v.basis[0][0].reduce();
    CHECK_FALSE(red.is_zero());
}

TEST_CASE("rank 2 lift over a ramified K") {
    // K = Q_3(sqrt(-3)): O_K Eisenstein over Z_3. Each varpi-digit may force
    // one degree-p growth of the constants, so keep the precision small.
    int p = 3, M = 2, N = 6;
    auto OF = lt_working_ring(make_field(p, 1), M, N);
    LTData lt = make_lt_standard(OF, N);
    auto Z3 = make_local_ring(make_field(p, 1), M);
    auto ext = make_eisenstein_ext(Z3, {3, 0});
    CoeffRingDesc A = make_coeff_ring(LocalRing{ext.K}, lt, 1, N);
    Rng rng(3);
    const LocalRingPtr& OK = ext.K;
    for (int t = 0; t < 2; ++t) {
        Mat<LocalInt> mp(2, std::vector<LocalInt>(2, LocalInt::zero(OK)));
        do {
            for (auto& row : mp)
                for (auto& x : row) {
                    x = LocalInt::from_int(OK, rng.uniform(9)) +
                        LocalInt::uniformizer(OK) * LocalInt::from_int(OK, rng.uniform(3));
                }
        } while ((mp[0][0] * mp[1][1] - mp[0][1] * mp[1][0]).reduce().is_zero());
        auto M2 = make_const_module0(A, mp);
        auto v = functor_V_lift(M2, A);
        CHECK(v.basis.size() == 2);
        CHECK(verify_V_lift(M2, A, v));
    }
}

TEST_CASE("char-0 étale certificate") {
    CoeffRingDesc A = ring_F(3, 3, 6);
    auto M1 = make_const_module0(A, {{LocalInt::one(A.base.ctx)}});
    CHECK(check_etale_phigamma0(M1, A).ok);
    auto M0 = make_const_module0(A, {{LocalInt::uniformizer(A.base.ctx)}});
    CHECK_FALSE(check_etale_phigamma0(M0, A).ok);  // pi is not a unit of A
    // trivial gamma matrix passes compatibility
    M1.gam.push_back({{ASeries::constant(A.base, LocalInt::one(A.base.ctx), A.N)}});
    M1.gamma_labels.push_back("teich");
    CHECK(check_etale_phigamma0(M1, A).ok);
}
