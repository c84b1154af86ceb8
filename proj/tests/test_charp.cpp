#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "phigamma/charp.hpp"

using namespace phigamma;

namespace {

using GS = TruncSeries<GFRing>;

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

}  // namespace

TEST_CASE("gamma_action: identity chi-value") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 10);
    LTData lt = make_lt_standard(OF, 10);
    GFRing k{make_field(3, 1)};
    GS x(k, -2, 6);
    x.set(-2, k.from_int(2));
    x.set(1, k.from_int(1));
    x.set(4, k.from_int(2));
    auto y = gamma_action(LocalInt::one(OF), x, lt);
    CHECK(y.eq_at_shared_precision(x));
}

TEST_CASE("gamma_action: multiplicative f, c = 1+p") {
    for (int p : {2, 3, 5}) {
        auto OF = lt_working_ring(make_field(p, 1), 4, p + 4);
        LTData lt = make_lt_multiplicative(OF, p + 4);
        GFRing k{make_field(p, 1)};
        GS u = GS::variable(k, p + 3);
        LocalInt c = LocalInt::one(OF) + LocalInt::from_int(OF, p);
        auto y = gamma_action(c, u, lt);
        // u -> u + u^p + u^(p+1) mod p
        GS want(k, 1, p + 2);
        want.set(1, k.one());
        want.set(p, k.one());
        want.set(p + 1, k.one());
        CHECK(y.eq_at_shared_precision(want));
    }
}

TEST_CASE("gamma_action rejects non-units") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 6);
    LTData lt = make_lt_standard(OF, 6);
    GFRing k{make_field(3, 1)};
    GS u = GS::variable(k, 5);
    CHECK_THROWS_AS(gamma_action(LocalInt::uniformizer(OF), u, lt), Error);
}

TEST_CASE("gamma is an action and commutes with the q-power map") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 12);
    LTData lt = make_lt_standard(OF, 12);
    GFRing k{make_field(3, 1)};
    Rng rng(5);
    LocalInt c1 = LocalInt::one(OF) + LocalInt::from_int(OF, 3);
    LocalInt c2 = LocalInt::from_int(OF, 2);
    for (int t = 0; t < 20; ++t) {
        GS x(k, 0, 6);
        for (int e = 0; e < 6; ++e) x.set(e, k.from_int(rng.uniform(3)));
        auto a = gamma_action(c1, gamma_action(c2, x, lt), lt);
        auto b = gamma_action(c1 * c2, x, lt);
        CHECK(a.eq_at_shared_precision(b));
        // commutation with x -> x^q
        auto l = gamma_action(c1, frobenius_q(x, 1), lt);
        auto r = frobenius_q(gamma_action(c1, x, lt), 1);
        CHECK(l.eq_at_shared_precision(r));
    }
}

TEST_CASE("check_etale_phigamma") {
    auto OF = lt_working_ring(make_field(3, 1), 4, 8);
    LTData lt = make_lt_standard(OF, 8);
    FieldDesc k = make_field(3, 1);
    NormFieldDesc nf = make_norm_field(k, 1, lt, 8);

    // rank 1, matPhi = (1), trivial gamma set -> certificate
    auto M1 = make_const_module(k, 1, {{FieldElem::one(k)}}, 8);
    CHECK(check_etale_phigamma(M1, nf).ok);

    // rank 1, matPhi = (u): a unit of the Laurent field
    PhiGammaP Mu = M1;
    GS u = GS::variable(GFRing{k}, 8);
    Mu.phi = {{u}};
    CHECK(check_etale_phigamma(Mu, nf).ok);

    // rank 1, matPhi = (0) -> not étale
    PhiGammaP M0 = M1;
    M0.phi = {{GS::zero(GFRing{k}, 8)}};
    auto rep = check_etale_phigamma(M0, nf);
    CHECK_FALSE(rep.ok);
    CHECK(rep.violation.find("étale") != std::string::npos);
}

TEST_CASE("functor_V constant mode: the three listed examples") {
    FieldDesc f3 = make_field(3, 1);
    // d=1, matPhi=(1): basis {1}, 3 solutions
    auto M1 = make_const_module(f3, 1, {{FieldElem::one(f3)}}, 4);
    auto v1 = functor_V(M1);
    CHECK(v1.count == 3);
    CHECK(v1.basis.size() == 1);
    CHECK(verify_V(M1, v1));

    // d=1, matPhi=(2): basis {sqrt 2} in F_9, 3 solutions
    auto M2 = make_const_module(f3, 1, {{FieldElem::from_int(f3, 2)}}, 4);
    auto v2 = functor_V(M2);
    CHECK(v2.count == 3);
    CHECK(ext_fp_dim(v2.ext) == 2);
    CHECK(verify_V(M2, v2));
    ExtElem x = v2.basis[0][0].coeff(0);
    CHECK(x * x == ExtElem::from_base(v2.ext, FieldElem::from_int(f3, 2)));

    // d=2 swap matrix over F_2: 4 solutions, dim 2
    FieldDesc f2 = make_field(2, 1);
    Mat<FieldElem> A = {{FieldElem::zero(f2), FieldElem::one(f2)},
                        {FieldElem::one(f2), FieldElem::zero(f2)}};
    auto M3 = make_const_module(f2, 1, A, 4);
    auto v3 = functor_V(M3);
    CHECK(v3.count == 4);
    CHECK(v3.basis.size() == 2);
    CHECK(verify_V(M3, v3));
}

TEST_CASE("dim V = rank for étale constant matrices (small exhaustive)") {
    // all invertible 2x2 over F_2 and 1x1 over F_9
    FieldDesc f2 = make_field(2, 1);
    auto elems = all_elements(f2);
    int checked = 0;
    for (int code = 0; code < 16; ++code) {
        Mat<FieldElem> A = {{elems[static_cast<size_t>(code & 1)], elems[static_cast<size_t>((code >> 1) & 1)]},
                            {elems[static_cast<size_t>((code >> 2) & 1)], elems[static_cast<size_t>((code >> 3) & 1)]}};
        if (mat_det_field(A).is_zero()) continue;
        auto M = make_const_module(f2, 1, A, 3);
        auto v = functor_V(M);
        CHECK(static_cast<int>(v.basis.size()) == 2);
        CHECK(verify_V(M, v));
        ++checked;
    }
    CHECK(checked == 6);

    FieldDesc f9 = make_field(3, 2);
    for (const auto& a : all_elements(f9)) {
        if (a.is_zero()) continue;
        auto M = make_const_module(f9, 2, {{a}}, 3);
        auto v = functor_V(M);
        CHECK(static_cast<int>(v.basis.size()) == 1);
        CHECK(v.count == 9);
        CHECK(verify_V(M, v));
    }
}

TEST_CASE("functor_V series mode") {
    FieldDesc f3 = make_field(3, 1);
    GFRing k{f3};
    // rank 1: matPhi = 1 + u
    PhiGammaP M;
    M.base = k;
    M.rank = 1;
    M.rs = 1;
    GS a(k, 0, 9);
    a.set(0, k.one());
    a.set(1, k.one());
    M.phi = {{a}};
    auto v = functor_V(M);
    CHECK_FALSE(v.constant_mode);
    CHECK(v.basis.size() == 1);
    CHECK(verify_V(M, v));

    // rank 2 with a non-constant off-diagonal entry
    PhiGammaP M2;
    M2.base = k;
    M2.rank = 2;
    M2.rs = 1;
    GS one = GS::constant(k, k.one(), 9);
    GS zu(k, 0, 9);
    zu.set(1, k.from_int(2));
    M2.phi = {{one, zu}, {GS::zero(k, 9), one}};
    auto v2 = functor_V(M2);
    CHECK(v2.basis.size() == 2);
    CHECK(verify_V(M2, v2));

    // singular constant part is an obstruction at u-degree 0
    PhiGammaP M3 = M;
    GS b(k, 0, 9);
    b.set(1, k.one());  // matPhi = (u): étale over k((u)), not over k[[u]]
    M3.phi = {{b}};
    CHECK_THROWS_AS(functor_V(M3), Error);
}

TEST_CASE("hilbert90: the omega example over F_4") {
    FieldDesc f2 = make_field(2, 1);
    FieldDesc f4 = make_field(2, 2);
    FieldElem w = multiplicative_generator(f4);  // omega, norm w * w^2 = 1
    auto B = hilbert90_solve({{w}}, f2, 2, 1);
    CHECK_FALSE(B[0][0].is_zero());
    // C sigma(B) = B
    CHECK(w * B[0][0].frobenius(1) == B[0][0]);

    // norm != 1 (the cocycle fails closure) over F_9
    FieldDesc f3 = make_field(3, 1);
    FieldDesc f9 = make_field(3, 2);
    FieldElem g = multiplicative_generator(f9);  // norm g^(1+3) = g^4 != 1
    CHECK_THROWS_WITH_AS(hilbert90_solve({{g}}, f3, 2, 1),
                         doctest::Contains("not a representation"), Error);
}

TEST_CASE("functor_D: trivial action gives matPhi = I") {
    FieldDesc f3 = make_field(3, 1);
    for (int d : {1, 2}) {
        Mat<FieldElem> C = mat_identity(d, FieldElem::one(f3), FieldElem::zero(f3));
        auto res = functor_D_unramified(f3, 2, C, 1, 4);
        CHECK(res.descended_to_k);
        auto A = const_phi_matrix(res.module);
        CHECK(mat_det_field(A).is_unit());
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) CHECK(A[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                                              (i == j ? FieldElem::one(f3) : FieldElem::zero(f3)));
    }
}

TEST_CASE("V o D round trip: rank-1 characters") {
    for (int pq : {3, 5, 7, 9}) {
        int p = (pq == 9) ? 3 : pq;
        int rs = (pq == 9) ? 2 : 1;
        FieldDesc k = make_field(p, rs);
        // the two characters of order dividing 2
        for (long long lam : {1LL, -1LL}) {
            FieldElem l = FieldElem::from_int(k, lam);
            auto res = functor_D_unramified(k, 2, {{l}}, rs, 3);
            auto R = recovered_galois_matrix(res.module);
            CHECK(R[0][0] == FieldElem::from_coeffs(make_field(p, rs), l.coeffs()));
        }
    }
}

TEST_CASE("V o D round trip: rank-2 representations, recovered matrix conjugate") {
    Rng rng(42);
    for (auto [p, rs] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}}) {
        FieldDesc k = make_field(p, rs);
        long long q = 1;
        for (int i = 0; i < rs; ++i) q *= p;
        int done = 0;
        while (done < 6) {
            // random R with R^2 = I (representation of the order-2 quotient)
            Mat<FieldElem> U(2, std::vector<FieldElem>(2, FieldElem::zero(k)));
            for (auto& row : U)
                for (auto& x : row) x = FieldElem::from_code(k, rng.uniform(static_cast<int>(q)));
            if (mat_det_field(U).is_zero()) continue;
            // R = U D U^-1 with D diagonal of +-1
            Mat<FieldElem> D = {{FieldElem::from_int(k, 1), FieldElem::zero(k)},
                                {FieldElem::zero(k), FieldElem::from_int(k, -1)}};
            Mat<FieldElem> R = mat_mul(U, mat_mul(D, mat_inv_field(U, FieldElem::one(k))));
            auto res = functor_D_unramified(k, 2, R, rs, 3);
            auto Rrec = recovered_galois_matrix(res.module);
            CHECK(conjugate_over(Rrec, R, k));
            ++done;
        }
    }
}
