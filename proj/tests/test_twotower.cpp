#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phigamma/twotower.hpp"

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

// F = Q_p, K = Q_p(sqrt(-p)): s = 1, q = p, varpi = sqrt(-p)
TwoTowerDesc tower_ramified(int p, int M, int N) {
    auto OF = lt_working_ring(make_field(p, 1), M, N);
    LTData ltpi = make_lt_standard(OF, N);
    auto Zp = make_local_ring(make_field(p, 1), M);
    auto ext = make_eisenstein_ext(Zp, {p, 0});
    CoeffRingDesc Api = make_coeff_ring(LocalRing{ext.K}, ltpi, 1, N);
    auto OK = lt_working_ring(make_field(p, 1), ring_precision(ext.K), N, {p, 0});
    LTData ltw = make_lt_standard(OK, N);
    return make_two_tower(Api, ltw, ext);
}

// F = Q_p, K = unramified of degree s, varpi = pi = p
TwoTowerDesc tower_unramified(int p, int s, int M, int N) {
    auto OF = lt_working_ring(make_field(p, 1), M, N);
    LTData ltpi = make_lt_standard(OF, N);
    auto Zp = make_local_ring(make_field(p, 1), M);
    auto ext = make_unramified_ext(Zp, s);
    CoeffRingDesc Api = make_coeff_ring(LocalRing{ext.K}, ltpi, s, N);
    auto OKw = lt_working_ring(make_field(p, s), M, N);
    LTData ltw = make_lt_standard(OKw, N);
    return make_two_tower(Api, ltw, ext);
}

TwoTowerElem random_tt(const TwoTowerDesc& tt, int idx, Rng& rng, int lo = 0) {
    const LocalRingPtr& r = tt.Api.base.ctx;
    const FieldDesc k = ring_residue(r);
    long long q = 1;
    for (int i = 0; i < k.m; ++i) q *= k.p;
    TwoTowerElem e(r, idx, lo, 4, lo, 4);
    for (int a = lo; a < 4; ++a)
        for (int b = lo; b < 4; ++b) {
            LocalInt c = LocalInt::zero(r);
            LocalInt w = LocalInt::uniformizer(r);
            LocalInt pw = LocalInt::one(r);
            for (int i = 0; i < ring_precision(r); ++i) {
                c = c + LocalInt::teichmuller(r, FieldElem::from_code(k, rng.uniform(static_cast<int>(q)))) * pw;
                pw = pw * w;
            }
            e.set(a, b, c);
        }
    return e;
}

}  // namespace

TEST_CASE("partial Frobenii basics") {
    TwoTowerDesc tt = tower_ramified(3, 3, 8);
    // 1 (x) y at index i -> same at index i-1 under phi_pi
    TwoTowerElem y = TwoTowerElem::var_y(tt, 2);
    TwoTowerElem fy = partial_frobenius_pi(tt, y);
    CHECK(fy.idx() == 1);
    CHECK(fy.pure_y());
    CHECK(fy.coeff(0, 1).eq(LocalInt::one(tt.Api.base.ctx)));

    // x (x) 1: phi_pi substitutes [pi](x); mod varpi it is x^q
    TwoTowerElem x = TwoTowerElem::var_x(tt, 0);
    TwoTowerElem fx = partial_frobenius_pi(tt, x);
    CHECK(fx.idx() == -1);
    CHECK(fx.coeff(3, 0).reduce().is_one());  // q = 3
    CHECK(fx.coeff(1, 0).eq(LocalInt::from_int(tt.Api.base.ctx, 3)));
}

TEST_CASE("phi_pi o phi_varpi = phi_varpi o phi_pi = total Frobenius") {
    for (auto tt : {tower_ramified(3, 2, 6), tower_unramified(2, 2, 2, 6)}) {
        Rng rng(7);
        for (int t = 0; t < 4; ++t) {
            TwoTowerElem e = random_tt(tt, 0, rng);
            TwoTowerElem a = partial_frobenius_pi(tt, partial_frobenius_varpi(tt, e));
            TwoTowerElem b = partial_frobenius_varpi(tt, partial_frobenius_pi(tt, e));
            TwoTowerElem c = total_frobenius(tt, e);
            CHECK(a.idx() == e.idx());
            CHECK(a.eq(b));
            CHECK(a.eq(c));
        }
    }
}

TEST_CASE("gamma commutes with the partial Frobenii") {
    TwoTowerDesc tt = tower_ramified(3, 2, 8);
    Rng rng(13);
    LocalInt c = LocalInt::one(tt.ext->K) + LocalInt::uniformizer(tt.ext->K);
    for (int t = 0; t < 3; ++t) {
        TwoTowerElem e = random_tt(tt, 1, rng);
        TwoTowerElem a = gamma_two_tower(tt, c, partial_frobenius_pi(tt, e));
        TwoTowerElem b = partial_frobenius_pi(tt, gamma_two_tower(tt, c, e));
        CHECK(a.eq(b));
        TwoTowerElem a2 = gamma_two_tower(tt, c, partial_frobenius_varpi(tt, e));
        TwoTowerElem b2 = partial_frobenius_varpi(tt, gamma_two_tower(tt, c, e));
        CHECK(a2.eq(b2));
    }
}

TEST_CASE("projlim: constant sequence reconstructs") {
    TwoTowerDesc tt = tower_ramified(3, 3, 8);
    LocalRing r{tt.Api.base.ctx};
    TruncSeries<LocalRing> w(r, 0, 4);
    w.set(1, r.one());
    auto s = diagonal_sequence(tt, w, -2, 2);
    auto rec = projlim_reconstruct(tt, s);
    CHECK(rec.stabilized);
    CHECK(series_eq_mod(rec.value, w, ring_precision(tt.Api.base.ctx)));
}

TEST_CASE("projlim: random diagonal round trip") {
    TwoTowerDesc tt = tower_ramified(3, 3, 8);
    Rng rng(21);
    LocalRing r{tt.Api.base.ctx};
    const FieldDesc k = ring_residue(tt.Api.base.ctx);
    for (int t = 0; t < 10; ++t) {
        TruncSeries<LocalRing> w(r, -1, 4);
        for (int e = -1; e < 4; ++e) {
            LocalInt c = LocalInt::zero(tt.Api.base.ctx);
            LocalInt wp = LocalInt::one(tt.Api.base.ctx);
            for (int i = 0; i < ring_precision(tt.Api.base.ctx); ++i) {
                c = c + LocalInt::teichmuller(tt.Api.base.ctx,
                                              FieldElem::from_code(k, rng.uniform(3))) *
                            wp;
                wp = wp * LocalInt::uniformizer(tt.Api.base.ctx);
            }
            w.set(e, c);
        }
        auto s = diagonal_sequence(tt, w, -1, 1);
        auto rec = projlim_reconstruct(tt, s);
        CHECK(series_eq_mod(rec.value, w, ring_precision(tt.Api.base.ctx)));
    }
}

TEST_CASE("projlim: fault injection is detected at the right digit") {
    TwoTowerDesc tt = tower_ramified(3, 4, 8);
    LocalRing r{tt.Api.base.ctx};
    TruncSeries<LocalRing> w(r, 0, 4);
    w.set(0, r.one());
    w.set(2, r.from_int(2));
    auto s = diagonal_sequence(tt, w, -2, 2);
    // perturb the bottom entry by pi^2
    LocalInt pert = LocalInt::uniformizer(tt.Api.base.ctx).pow(2);
    s.entries[0].set(0, 1, s.entries[0].coeff(0, 1) + pert);
    CHECK_THROWS_WITH_AS(projlim_reconstruct(tt, s), doctest::Contains("no limit at digit 2"),
                         Error);
    // gross chaining violation: an x-term at digit 0 on one entry only
    auto s2 = diagonal_sequence(tt, w, -2, 2);
    s2.entries[1].set(1, 0, LocalInt::one(tt.Api.base.ctx));
    CHECK_THROWS_AS(projlim_reconstruct(tt, s2), Error);
}

TEST_CASE("functor_Phi: identity module maps to identity") {
    TwoTowerDesc tt = tower_ramified(3, 3, 6);
    auto D1 = make_const_module0(tt.Api, {{LocalInt::one(tt.Api.base.ctx)}});
    auto res = functor_Phi(D1, tt);
    CHECK(res.stabilized);
    CHECK(res.module.rank == 1);
    CHECK(const_phi_matrix0(res.module)[0][0].eq(LocalInt::one(tt.Api.base.ctx)));
    // and back
    auto back = functor_Psi(res.module, tt);
    CHECK(modules_isomorphic(back.module, D1));
}

TEST_CASE("functor_Phi/Psi: Teichmuller characters round trip") {
    for (auto tt : {tower_ramified(3, 3, 6), tower_unramified(2, 2, 3, 6)}) {
        const FieldDesc k = ring_residue(tt.Api.base.ctx);
        for (const auto& g : all_elements(k)) {
            if (g.is_zero()) continue;
            auto D1 = make_const_module0(tt.Api, {{LocalInt::teichmuller(tt.Api.base.ctx, g)}});
            auto phi = functor_Phi(D1, tt);
            CHECK(phi.stabilized);
            CHECK(check_etale_phigamma0(phi.module, tt.Avarpi).ok);
            auto back = functor_Psi(phi.module, tt);
            CHECK(modules_isomorphic(back.module, D1));
        }
    }
}

TEST_CASE("functor_Phi preserves rank and étaleness on random rank-2 modules") {
    TwoTowerDesc tt = tower_ramified(3, 2, 6);
    const LocalRingPtr& OK = tt.Api.base.ctx;
    Rng rng(31);
    int done = 0;
    while (done < 3) {
        Mat<LocalInt> mp(2, std::vector<LocalInt>(2, LocalInt::zero(OK)));
        for (auto& row : mp)
            for (auto& x : row)
                x = LocalInt::from_int(OK, rng.uniform(9)) +
                    LocalInt::uniformizer(OK) * LocalInt::from_int(OK, rng.uniform(3));
        if ((mp[0][0] * mp[1][1] - mp[0][1] * mp[1][0]).reduce().is_zero()) continue;
        auto D1 = make_const_module0(tt.Api, mp);
        auto phi = functor_Phi(D1, tt);
        CHECK(phi.module.rank == 2);
        CHECK(check_etale_phigamma0(phi.module, tt.Avarpi).ok);
        auto back = functor_Psi(phi.module, tt);
        CHECK(modules_isomorphic(back.module, D1));
        ++done;
    }
}

TEST_CASE("two-tower element text form") {
    TwoTowerDesc tt = tower_ramified(3, 2, 6);
    TwoTowerElem e = TwoTowerElem::var_x(tt, 1);
    std::string s = e.to_text();
    CHECK(s.find("idx=1:") == 0);
    CHECK(s.find("x^1*[") != std::string::npos);
}
