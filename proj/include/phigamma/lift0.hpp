#pragma once

// Characteristic-0 coefficient rings: Laurent series in u over O_F or O_K
// truncated at (pi^M, u^N), with the lifted Frobenius u -> [pi](u) and the
// lifted Gamma-action u -> [chi](u), both reducing mod the uniformizer to
// the norm-field actions. The fixed-point functor is lifted by pi-adic digit
// induction from its residue version.

#include <optional>

#include "phigamma/charp.hpp"
#include "phigamma/ltgroup.hpp"

namespace phigamma {

using ASeries = TruncSeries<LocalRing>;
using PhiGamma0 = PhiGamma<LocalRing>;

// A_{K,pi} at precision (M, N). `base` is O_K presented over its unramified
// layer; `lt` is the Lubin-Tate data of F (its ring carries the working
// precision); r = [k_F : F_p], s = [k_K : k_F].
struct CoeffRingDesc {
    LocalRing base;
    LTData lt;
    int r = 1;
    int s = 1;
    int N = 8;
};

// base must have an unramified layer containing k_F; when base != lt.ring
// the O_F-coefficients of [a]-series are moved over by Teichmüller digits
// (requires O_F unramified over Z_p unless the rings coincide).
CoeffRingDesc make_coeff_ring(LocalRing base, LTData lt, int s, int N);

// move an O_F value into the base ring of A
LocalInt embed_coeff(const CoeffRingDesc& A, const LocalInt& x);
// [a](u) with coefficients moved into the base ring, cut at A.N
ASeries lt_series_in_base(const CoeffRingDesc& A, const LocalInt& a);

// Inverse of a unit of the coefficient ring (some coefficient a unit) by
// Newton iteration from the residue inverse; supports series like [pi](u)
// whose leading coefficient is not a unit.
ASeries aseries_unit_inverse(const CoeffRingDesc& A, const ASeries& s);

// phi^r: u -> [pi](u), relative Frobenius (p^r-power lift) on the unramified
// constants over k_F, identity on O_F and the Eisenstein generator.
ASeries phi_lift(const CoeffRingDesc& A, const ASeries& x);
// phi^(rs) = the s-th iterate: trivial on all of O_K, u -> [pi^s](u).
ASeries phi_rs(const CoeffRingDesc& A, const ASeries& x);
// gamma: u -> [c](u), trivial on coefficients; c a unit of O_F.
ASeries gamma_lift(const CoeffRingDesc& A, const LocalInt& c, const ASeries& x);

// --- lifted constants: W(k''') ⊗ O_K at precision M ---------------------------

// A chain of splitting extensions over k_K, each flattened to an explicit
// F_p-presentation so that a Witt-style layer can be built over it. Supports
// growth by degree p (for unsolvable digit equations) with exact promotion
// of previously computed data.
class LiftedConstants {
  public:
    // level-0 extension over k_K; eis/M taken from the module's base ring
    LiftedConstants(const FieldDesc& kK, ExtPtr level0, const std::vector<long long>& eis,
                    int M);

    const LocalRingPtr& ring() const { return ring_; }
    const ExtPtr& top_ext() const { return levels_.back().ext; }
    int total_degree_over_kK() const;  // [k''' : k_K]

    // residue-level isomorphism between the flat presentation and the chain top
    FieldElem to_flat(const ExtElem& x) const;
    ExtElem from_flat(const FieldElem& d) const;

    // k_K scalars through the chain
    FieldElem kK_to_flat(const FieldElem& a) const;
    // inverse when the digit lies in the image of k_K
    std::optional<FieldElem> flat_to_kK(const FieldElem& d) const;

    // ring embedding from W(k_K)[S]/(E) at the same precision
    LocalInt embed_base(const LocalInt& x) const;
    // project back when every digit lies in the image of k_K
    std::optional<LocalInt> project_base(const LocalInt& x, const LocalRingPtr& baseK) const;

    // one more extension step of degree p over the current top
    LiftedConstants grown() const;
    // re-embed an element of the previous ring into this one (exact)
    LocalInt promote(const LocalInt& x_prev) const;

  private:
    struct Level {
        ExtPtr ext;                      // over the previous flat (level 0: over k_K)
        detail::FieldCtxPtr flat;        // explicit presentation
        ExtElem gen;                     // flattening generator w
        std::vector<std::vector<int>> pow_coords;  // fp coords of w^0..w^(n-1)
    };
    static Level flatten(const ExtPtr& ext);
    FieldElem level_to_flat(const Level& lv, const ExtElem& x) const;
    ExtElem level_from_flat(const Level& lv, const FieldElem& d) const;

    FieldDesc kK_;
    std::vector<long long> eis_;
    int M_ = 1;
    std::vector<Level> levels_;
    LocalRingPtr ring_;
};

struct VLiftResult {
    std::shared_ptr<LiftedConstants> cst;
    std::vector<std::vector<LocalInt>> basis;  // d solution vectors over cst->ring()
    int growth_steps = 0;
};

// Dévissage: solve phi(x) = matPhi x mod pi^M for a constant-mode module
// over A's base ring, digit by digit from the residue solution. phi acts on
// the constants as the p^(rs)-power Frobenius lift. Throws an Error naming
// the digit index when a digit equation stays unsolvable after growth.
VLiftResult functor_V_lift(const PhiGamma0& M, const CoeffRingDesc& A);

// phi(x) = matPhi x checked exactly mod pi^M for every basis vector
bool verify_V_lift(const PhiGamma0& M, const CoeffRingDesc& A, const VLiftResult& v);

// étale certificate for char-0 modules: det(matPhi) a unit of the ring
// (some coefficient a unit), plus the compatibility identities when Gamma
// matrices are present.
EtaleReport check_etale_phigamma0(const PhiGamma0& M, const CoeffRingDesc& A);

// constant-mode helpers
PhiGamma0 make_const_module0(const CoeffRingDesc& A, const Mat<LocalInt>& matPhi);
bool const_mode0(const PhiGamma0& M);
Mat<LocalInt> const_phi_matrix0(const PhiGamma0& M);

}  // namespace phigamma
