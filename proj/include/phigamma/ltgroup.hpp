#pragma once

// Lubin-Tate formal group laws: the unique group law attached to a Frobenius
// series f (f = pi X mod deg 2, f = X^q mod pi), its [a]-endomorphisms, and
// exact torsion polynomials for polynomial f.

#include <memory>
#include <string>
#include <vector>

#include "phigamma/localnum.hpp"
#include "phigamma/series.hpp"

namespace phigamma {

namespace detail {
struct LTCache;
}

struct LTData {
    LocalRing ring;               // O_F (callers allocate enough precision: one
                                  // pi-digit is consumed per solved degree)
    int q = 0;                    // residue cardinality p^r
    LocalInt pi;
    TruncSeries<LocalRing> f;
    bool f_polynomial = false;    // exact polynomial (enables torsion work)
    int N = 8;                    // total-degree cutoff
    int guaranteed_prec = 0;      // solver outputs are canonical mod pi^this
    std::shared_ptr<detail::LTCache> cache;
};

// A ring with enough precision headroom for LT solving at cutoff N.
LocalRingPtr lt_working_ring(const FieldDesc& residue, int M, int N,
                             const std::vector<long long>& eis = {});

// f = pi X + X^q.
LTData make_lt_standard(const LocalRingPtr& OF, int N);
// f = (1+X)^p - 1; valid only when the residue field is F_p.
LTData make_lt_multiplicative(const LocalRingPtr& OF, int N);
// f = sum coeffs[i] X^(i+1) with integer coefficients (coeffs[0] is the X
// coefficient). Checked against both defining congruences.
LTData make_lt_explicit(const LocalRingPtr& OF, const std::vector<long long>& coeffs, int N);
// General form: any series with the LT congruences.
LTData make_lt_data(const LocalRingPtr& OF, TruncSeries<LocalRing> f, bool polynomial, int N);

// The unique F(X,Y) = X + Y + ... with f(F(X,Y)) = F(f(X), f(Y)) to total
// degree < N. Cached inside LTData; write-once, safe for concurrent readers.
const BivarTrunc<LocalRing>& group_law(const LTData& lt);

// The unique [a](X) = aX + ... with [a] o f = f o [a] to degree < N.
TruncSeries<LocalRing> lt_mul(const LTData& lt, const LocalInt& a);

struct TorsionPoly {
    std::vector<LocalInt> coeffs;  // degree q^n - q^(n-1); index = exponent
    int degree = 0;
    bool eisenstein = false;       // unit leading coeff, val >= 1 inside, val == 1 constant
};

// f^(o n)(X) / f^(o n-1)(X) for polynomial f.
TorsionPoly torsion_polynomial(const LTData& lt, int n);

// Verification helpers for the group-law axioms at the data's cutoff.
bool group_law_identity(const LTData& lt);       // F(X,0) = X and F(0,Y) = Y
bool group_law_commutative(const LTData& lt);    // F(X,Y) = F(Y,X)
bool group_law_associative(const LTData& lt);    // F(F(X,Y),Z) = F(X,F(Y,Z))
// f(F(X,Y)) = F(f(X), f(Y)) re-checked directly.
bool group_law_equivariant(const LTData& lt);

// Reductions mod pi to the residue field.
TruncSeries<GFRing> reduce_series(const TruncSeries<LocalRing>& s);
BivarTrunc<GFRing> reduce_bivar(const BivarTrunc<LocalRing>& b);

// Coefficientwise comparison mod pi^k at shared series precision.
bool series_eq_mod(const TruncSeries<LocalRing>& a, const TruncSeries<LocalRing>& b, int k);
bool bivar_eq_mod(const BivarTrunc<LocalRing>& a, const BivarTrunc<LocalRing>& b, int k);

}  // namespace phigamma
