#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <set>

#include "phigamma/fields.hpp"

using namespace phigamma;

TEST_CASE("make_field determinism and basic shapes") {
    CHECK_THROWS_AS(make_field(4, 1), Error);
    CHECK_THROWS_AS(make_field(1, 1), Error);
    CHECK_THROWS_AS(make_field(2, 0), Error);

    FieldDesc f2 = make_field(2, 1);
    CHECK(f2.modulus == std::vector<int>{0, 1});  // modulus T

    FieldDesc f9 = make_field(3, 2);
    FieldDesc f9b = make_field(3, 2);
    CHECK(f9 == f9b);
    CHECK(all_elements(f9).size() == 9);
}

TEST_CASE("field arithmetic is a field") {
    FieldDesc f16 = make_field(2, 4);
    auto elems = all_elements(f16);
    for (const auto& x : elems) {
        if (x.is_zero()) continue;
        CHECK(x * x.inv() == FieldElem::one(f16));
    }
    // distributivity spot check on all pairs of F_9
    FieldDesc f9 = make_field(3, 2);
    auto e9 = all_elements(f9);
    for (const auto& a : e9)
        for (const auto& b : e9) CHECK(a * (b + b) == a * b + a * b);
}

TEST_CASE("embedding F_4 into F_16 is a ring map") {
    FieldDesc f4 = make_field(2, 2);
    FieldDesc f16 = make_field(2, 4);
    auto e4 = all_elements(f4);
    for (const auto& a : e4)
        for (const auto& b : e4) {
            CHECK(embed(a + b, f16) == embed(a, f16) + embed(b, f16));
            CHECK(embed(a * b, f16) == embed(a, f16) * embed(b, f16));
        }
    CHECK(embed(FieldElem::one(f4), f16) == FieldElem::one(f16));
}

TEST_CASE("embedding tower compatibility for p^m <= 16") {
    // chains d | d' | d'' with p^(d'') <= 16
    struct Chain {
        int p, a, b, c;
    };
    for (Chain ch : {Chain{2, 1, 2, 4}}) {
        FieldDesc fa = make_field(ch.p, ch.a);
        FieldDesc fb = make_field(ch.p, ch.b);
        FieldDesc fc = make_field(ch.p, ch.c);
        for (const auto& x : all_elements(fa))
            CHECK(embed(embed(x, fb), fc) == embed(x, fc));
    }
}

TEST_CASE("frobenius fixes the prime field and has order m") {
    FieldDesc f9 = make_field(3, 2);
    for (int v = 0; v < 3; ++v) {
        FieldElem x = FieldElem::from_int(f9, v);
        CHECK(x.frobenius(1) == x);
        CHECK(x.frobenius(5) == x);
    }
    FieldElem g = multiplicative_generator(f9);
    CHECK(g.frobenius(2) == g);  // sigma^m = id
}

TEST_CASE("frobenius on sqrt(2) in F_9") {
    FieldDesc f9 = make_field(3, 2);
    // find g with g^2 = 2
    FieldElem two = FieldElem::from_int(f9, 2);
    int found = 0;
    for (const auto& g : all_elements(f9)) {
        if (g * g == two) {
            ++found;
            CHECK(g.frobenius(1) == two * g);  // g^3 = 2g
        }
    }
    CHECK(found == 2);
}

TEST_CASE("frobenius is additive/multiplicative; fixed set is the subfield") {
    for (auto [p, m] : std::vector<std::pair<int, int>>{{2, 4}, {3, 4}, {2, 6}}) {
        FieldDesc f = make_field(p, m);
        auto elems = all_elements(f);
        for (int e = 1; e <= m; ++e) {
            int fixed = 0;
            for (const auto& x : elems)
                if (x.frobenius(e) == x) ++fixed;
            long long expect = 1;
            for (int i = 0; i < std::gcd(e, m); ++i) expect *= p;
            CHECK(fixed == expect);
        }
        // ring-map property on a deterministic sample
        for (size_t i = 0; i < elems.size(); i += 5)
            for (size_t j = 1; j < elems.size(); j += 7) {
                CHECK((elems[i] + elems[j]).frobenius(1) ==
                      elems[i].frobenius(1) + elems[j].frobenius(1));
                CHECK((elems[i] * elems[j]).frobenius(1) ==
                      elems[i].frobenius(1) * elems[j].frobenius(1));
            }
    }
}

TEST_CASE("semilinear d=1 A=(1) over F_3: solutions are F_3") {
    FieldDesc f3 = make_field(3, 1);
    std::vector<std::vector<FieldElem>> A = {{FieldElem::one(f3)}};
    auto sol = solve_semilinear_const(A, 1);
    CHECK(sol.count == 3);
    CHECK(sol.basis.size() == 1);
    // enumerate and cross-check
    auto all = semilinear_enumerate(A, 1, sol.ext);
    CHECK(all.size() == 3);
}

TEST_CASE("semilinear d=1 A=(2) over F_3: sqrt(2) in F_9") {
    FieldDesc f3 = make_field(3, 1);
    std::vector<std::vector<FieldElem>> A = {{FieldElem::from_int(f3, 2)}};
    auto sol = solve_semilinear_const(A, 1);
    CHECK(sol.count == 3);
    CHECK(ext_fp_dim(sol.ext) == 2);  // F_9
    // the basis solution x satisfies x^2 = 2
    ExtElem x = sol.basis[0][0];
    ExtElem two = ExtElem::from_base(sol.ext, FieldElem::from_int(f3, 2));
    CHECK(x * x == two);
    auto all = semilinear_enumerate(A, 1, sol.ext);
    CHECK(all.size() == 3);
}

TEST_CASE("semilinear d=2 identity over F_2") {
    FieldDesc f2 = make_field(2, 1);
    std::vector<std::vector<FieldElem>> A = {
        {FieldElem::one(f2), FieldElem::zero(f2)},
        {FieldElem::zero(f2), FieldElem::one(f2)},
    };
    auto sol = solve_semilinear_const(A, 1);
    CHECK(sol.count == 4);
    CHECK(sol.basis.size() == 2);
}

TEST_CASE("semilinear rejects singular matrices") {
    FieldDesc f3 = make_field(3, 1);
    std::vector<std::vector<FieldElem>> A = {{FieldElem::zero(f3)}};
    CHECK_THROWS_AS(solve_semilinear_const(A, 1), NotEtaleError);
}

TEST_CASE("semilinear solution count matches brute force for p^(ed) <= 81") {
    // a deterministic sweep of small invertible matrices
    struct Case {
        int p, m, d, e;
    };
    for (Case c : {Case{2, 1, 2, 1}, Case{3, 1, 1, 1}, Case{2, 2, 1, 2}, Case{3, 2, 1, 2}}) {
        FieldDesc f = make_field(c.p, c.m);
        auto elems = all_elements(f);
        int tested = 0;
        const long long total = [&] {
            long long t = 1;
            for (int i = 0; i < c.d * c.d; ++i) t *= static_cast<long long>(elems.size());
            return t;
        }();
        for (long long code = 0; code < total && tested < 40; ++code) {
            long long cc = code;
            std::vector<std::vector<FieldElem>> A(static_cast<size_t>(c.d),
                                                  std::vector<FieldElem>());
            for (int i = 0; i < c.d; ++i)
                for (int j = 0; j < c.d; ++j) {
                    A[static_cast<size_t>(i)].push_back(elems[static_cast<size_t>(cc % elems.size())]);
                    cc /= static_cast<long long>(elems.size());
                }
            SemilinearSolution sol;
            try {
                sol = solve_semilinear_const(A, c.e);
            } catch (const NotEtaleError&) {
                continue;
            }
            ++tested;
            // oracle: enumerate over the splitting extension
            if (std::pow(double(c.p), double(ext_fp_dim(sol.ext) * c.d)) <= (1 << 16)) {
                auto all = semilinear_enumerate(A, c.e, sol.ext);
                CHECK(static_cast<long long>(all.size()) == sol.count);
            }
        }
        CHECK(tested > 0);
    }
}

TEST_CASE("sigma matrix of the recovered representation is well defined") {
    // rank 1, A = (g) with g a generator of F_4; e = 2 so the fixed field is F_4
    FieldDesc f4 = make_field(2, 2);
    FieldElem g = multiplicative_generator(f4);
    std::vector<std::vector<FieldElem>> A = {{g}};
    auto sol = solve_semilinear_const(A, 2);
    auto R = semilinear_sigma_matrix(sol, 2);
    CHECK(R.size() == 1);
    // sigma(x) = x^(p^e) = A x on solutions, and the matrix entries are the
    // image of A in the canonical F_{p^e}
    CHECK(R[0][0] == FieldElem::from_coeffs(make_field(2, 2), g.coeffs()));
}

TEST_CASE("extension fields behave") {
    FieldDesc f9 = make_field(3, 2);
    ExtPtr e = make_extension(f9, 2);  // F_81 over F_9
    ExtElem g = ExtElem::gen(e);
    CHECK(!g.is_zero());
    CHECK(g * g.inv() == ExtElem::one(e));
    // Frobenius order: x^(3^4) = x
    CHECK(g.frobenius(4) == g);
    // minpoly of the generator over F_p has degree 4
    auto mp = ext_minpoly_fp(g);
    CHECK(mp.size() == 5);
}
