#pragma once

// The characteristic-p layer: norm fields k_K((u)) carrying the p^rs-power
// Frobenius and the Gamma-action by substitution u -> [c](u) mod pi, étale
// modules with semilinear Frobenius and Gamma matrices, and the fixed-point /
// descent functors between them and finite-level Galois data.
//
// Conventions. A module of rank d stores matPhi = A over its base; the
// Frobenius structure is the eigen-equation phi(x) = A x on coordinate
// vectors (phi the p^rs-power map applied entrywise), so V(M) is the solution
// space of that system. Gamma matrices G_gamma act by x -> G gamma(x). The
// étale compatibility identity is  G * gamma(A) = A * phi(G).

#include <optional>
#include <string>
#include <vector>

#include "phigamma/ltgroup.hpp"
#include "phigamma/matrix.hpp"
#include "phigamma/series.hpp"

namespace phigamma {

struct GammaGen {
    LocalInt chi;                    // unit of O_F (the chi-value)
    TruncSeries<GFRing> action;      // [chi](u) mod pi over k_K
    std::string label;
};

struct NormFieldDesc {
    FieldDesc residue;               // k_K
    int rs = 1;                      // q_act = p^rs
    std::vector<GammaGen> gamma;
};

// Default Gamma generating set: the Teichmüller lift of the least primitive
// root of k_F^x (omitted when k_F^x is trivial) and 1 + pi.
NormFieldDesc make_norm_field(const FieldDesc& kK, int rs, const LTData& lt, int uprec);

// u -> [c](u) mod pi substituted into x (a Laurent series over k_K or an
// extension of it); c must be a unit of O_F.
TruncSeries<GFRing> gamma_action(const LocalInt& c, const TruncSeries<GFRing>& x,
                                 const LTData& lt);

// x |-> x^(p^e) on a Laurent series: constants to the p^e, u -> u^(p^e).
TruncSeries<GFRing> frobenius_q(const TruncSeries<GFRing>& x, int e);
TruncSeries<ExtRing> frobenius_q(const TruncSeries<ExtRing>& x, int e);

// embed coefficients into a larger tower field
TruncSeries<GFRing> embed_series(const TruncSeries<GFRing>& s, const FieldDesc& target);

template <class R>
struct PhiGamma {
    R base;
    int rank = 0;
    int rs = 1;
    Mat<TruncSeries<R>> phi;                 // matPhi (eigen-equation form)
    std::vector<Mat<TruncSeries<R>>> gam;    // one matrix per Gamma generator
    std::vector<std::string> gamma_labels;
};

using PhiGammaP = PhiGamma<GFRing>;

// constant-matrix helpers
PhiGammaP make_const_module(const FieldDesc& k, int rs, const Mat<FieldElem>& A, int uprec);
bool const_mode(const PhiGammaP& M);
Mat<FieldElem> const_phi_matrix(const PhiGammaP& M);  // requires const_mode

struct EtaleReport {
    bool ok = true;
    std::string violation;  // empty when ok; else the first failed identity
};

// Verifies that matPhi is invertible over k((u)) and that every stored Gamma
// matrix satisfies the compatibility and pairwise-commutation identities at
// the shared precision.
EtaleReport check_etale_phigamma(const PhiGammaP& M, const NormFieldDesc& nf);

// ---- functor V: Frobenius fixed points ---------------------------------------

struct VResultP {
    ExtPtr ext;                                   // constants extension used
    std::vector<std::vector<TruncSeries<ExtRing>>> basis;  // d solution vectors
    long long count = 0;                          // p^(rs d) in constant mode
    bool constant_mode = true;
    std::optional<SemilinearSolution> raw;        // constant mode payload
};

// Solve phi(x) = matPhi * x. Constant mode: matPhi entries constant, full
// solution basis over the fixed field. Series mode: matPhi over k[[u]],
// solved u-degree by u-degree to the module's precision.
VResultP functor_V(const PhiGammaP& M);

// check phi(x) = A x at shared precision for every basis vector
bool verify_V(const PhiGammaP& M, const VResultP& v);

// ---- functor D: finite-level unramified descent --------------------------------

struct DResult {
    PhiGammaP module;          // descended module; base k (or k' for twisted input)
    Mat<FieldElem> B;          // Hilbert-90 trivialization, entries in k'
    int level = 1;             // n = [k' : k]
    bool descended_to_k = true;
};

// Constructive finite-field Hilbert 90: find B in GL_d(k') with
// C sigma(B) = B, where sigma is the p^rs-power Frobenius generating
// Gal(k'/k). Requires the ascending cocycle closure
// C sigma(C) ... sigma^(n-1)(C) = I; throws "not a representation" otherwise.
Mat<FieldElem> hilbert90_solve(const Mat<FieldElem>& C, const FieldDesc& k, int n, int rs);

// Input: the generator matrix (cocycle) of a representation of Gal(k'/k) on
// k^d, entries in k' = F_(p^(rs n)). Output: the descended rank-d module with
// matPhi = B^\-1 C B and trivial Gamma matrices.
DResult functor_D_unramified(const FieldDesc& k, int n, const Mat<FieldElem>& C, int rs,
                             int uprec);

// The matrix of the p^rs-power map on V(functor_D(...)) in the canonical
// basis; entries in k. Round-tripping recovers the input up to conjugacy.
Mat<FieldElem> recovered_galois_matrix(const PhiGammaP& M);

// brute-force conjugacy over GL_d(k); feasible for q^(d*d) <= ~10^4
bool conjugate_over(const Mat<FieldElem>& A, const Mat<FieldElem>& B, const FieldDesc& k);

// Hilbert 90 with everything inside a splitting extension: find invertible B
// with C sigma(B) = B, sigma the p^rs-power map, n the order of sigma on the
// extension (cocycle closure checked).
Mat<ExtElem> hilbert90_solve_ext(const Mat<ExtElem>& C, int rs, int n);

// Solve R sigma(Z) - Z = rhs over the extension carrying R and rhs
// (the digit step of lifted descents). nullopt when inconsistent.
std::optional<Mat<ExtElem>> twisted_coboundary_solve(const Mat<ExtElem>& R,
                                                     const Mat<ExtElem>& rhs, int rs);

}  // namespace phigamma
