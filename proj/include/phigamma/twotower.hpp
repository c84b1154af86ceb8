#pragma once

// The doubly-indexed two-tower system: bivariate Laurent elements over a
// local coefficient ring with the twisted-constant convention (all constants
// pushed to the y-side through sigma^idx), partial Frobenii moving the index,
// digit-by-digit projective-limit reconstruction, and the comparison
// functors between the two sides' module categories at finite level.

#include <optional>

#include "phigamma/lift0.hpp"

namespace phigamma {

struct TwoTowerDesc {
    CoeffRingDesc Api;     // pi-side (variable x): Lubin-Tate data of F over O_F
    CoeffRingDesc Avarpi;  // varpi-side (variable y): Lubin-Tate data of K, s = 1
    std::optional<ExtKF> ext;  // K/F presentation; enables Gamma and the norm criterion
};

// Both rings share the base O_K. lt_varpi must be Lubin-Tate for q = p^(rs).
TwoTowerDesc make_two_tower(const CoeffRingDesc& Api, LTData lt_varpi,
                            std::optional<ExtKF> ext = std::nullopt);

class TwoTowerElem {
  public:
    TwoTowerElem() = default;
    // zero element with the given windows at an index
    TwoTowerElem(LocalRingPtr ring, int idx, int xlo, int xhi, int ylo, int yhi);

    static TwoTowerElem constant(const LocalRingPtr& r, int idx, const LocalInt& c, int xw,
                                 int yw);
    static TwoTowerElem var_x(const TwoTowerDesc& tt, int idx);
    static TwoTowerElem var_y(const TwoTowerDesc& tt, int idx);

    int idx() const { return idx_; }
    int den() const { return den_; }
    const LocalRingPtr& ring() const { return ring_; }
    const std::map<std::pair<int, int>, LocalInt>& coeffs() const { return c_; }
    LocalInt coeff(int a, int b) const;
    void set(int a, int b, const LocalInt& v);
    void set_den(int d) { den_ = d; }

    TwoTowerElem operator+(const TwoTowerElem& o) const;
    TwoTowerElem operator-(const TwoTowerElem& o) const;
    TwoTowerElem operator*(const TwoTowerElem& o) const;
    bool eq(const TwoTowerElem& o) const;  // shared windows, matching idx/den
    bool is_zero() const;

    bool pure_y() const;  // no x-dependence
    // the y-side series of a pure-y element
    TruncSeries<LocalRing> y_series() const;

    std::string to_text() const;

    int xlo_ = 0, xhi_ = 0, ylo_ = 0, yhi_ = 0;

  private:
    LocalRingPtr ring_;
    int idx_ = 0;
    int den_ = 0;  // element = varpi^(-den) * stored body
    std::map<std::pair<int, int>, LocalInt> c_;
};

// phi_pi: x-side only (u_x -> [pi^s](u_x)), pushed constants fixed, idx - 1.
TwoTowerElem partial_frobenius_pi(const TwoTowerDesc& tt, const TwoTowerElem& e);
// phi_varpi: y-side (u_y -> f_varpi(u_y)), constants through sigma_Q, idx + 1.
TwoTowerElem partial_frobenius_varpi(const TwoTowerDesc& tt, const TwoTowerElem& e);
// the total p^(rs)-Frobenius at the same level of the double system
TwoTowerElem total_frobenius(const TwoTowerDesc& tt, const TwoTowerElem& e);
// diagonal Gamma action: y-side by [c], x-side by [N_{K/F}(c)]; needs tt.ext
TwoTowerElem gamma_two_tower(const TwoTowerDesc& tt, const LocalInt& c, const TwoTowerElem& e);

struct TowerSequence {
    int i0 = 0, i1 = 0;
    bool along_pi = true;  // chained by phi_pi: entries[i-1] = phi_pi(entries[i])
    std::vector<TwoTowerElem> entries;  // index i0..i1
};

// diagonal embedding of a y-side element
TowerSequence diagonal_sequence(const TwoTowerDesc& tt, const TruncSeries<LocalRing>& w, int i0,
                                int i1);

struct ReconstructResult {
    TruncSeries<LocalRing> value;  // y-side series over the carrier ring
    int den = 0;
    int window_lo = 0, window_hi = 0;
    int digits = 0;          // pi-adic digits certified
    bool stabilized = true;  // every entry matched at every digit
};

// Prop-style reconstruction: checks the chaining invariant, then finds the
// common pure-y element digit by digit. Throws "not a compatible sequence"
// on a chaining violation and "no limit at digit t" when entries disagree.
ReconstructResult projlim_reconstruct(const TwoTowerDesc& tt, const TowerSequence& s);

// ---- comparison functors -------------------------------------------------------

struct TransportResult {
    PhiGamma0 module;          // over the target side's coefficient ring
    int window_lo = 0, window_hi = 0;
    bool stabilized = true;
    int growth_steps = 0;      // unramified growth taken by the lifted V-solve
    std::string notes;
};

// D1 over A_{K,pi} (constant mode) -> module over A_{K,varpi}.
TransportResult functor_Phi(const PhiGamma0& D1, const TwoTowerDesc& tt, int i0 = -2, int i1 = 2);
// D2 over A_{K,varpi} (constant mode) -> module over A_{K,pi}.
TransportResult functor_Psi(const PhiGamma0& D2, const TwoTowerDesc& tt, int i0 = -2, int i1 = 2);

// Conjugacy of constant-mode modules over the shared base constants
// (existence of an invertible U with U A' = A U exactly at precision).
bool modules_isomorphic(const PhiGamma0& A, const PhiGamma0& B);

}  // namespace phigamma
