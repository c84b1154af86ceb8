#pragma once

// Finite-precision arithmetic in local integer rings: an unramified layer
// W(k) mod p^Mp carried as Z/p^Mp[T]/(H) with the exact Frobenius lift and
// Teichmüller section, optionally followed by an Eisenstein layer. Norms of
// finite extensions and the norm criterion for nested Lubin-Tate towers.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "phigamma/errors.hpp"
#include "phigamma/fields.hpp"

namespace phigamma {

namespace detail {
struct LocalRingCtx;
}
using LocalRingPtr = std::shared_ptr<const detail::LocalRingCtx>;

// O = W(k)[S]/(E(S)) truncated at pi-adic precision M, where k is the
// residue field, E is monic Eisenstein over W(k) (absent for unramified
// rings) and pi = S (or p when unramified).
//
// eis coefficients are given as residue-field digit vectors of the
// constant..leading coefficients expressed in Z (each entry a plain
// integer): E(S) = S^e + c_{e-1} S^{e-1} + ... + c_0 with c_i integers.
LocalRingPtr make_local_ring(const FieldDesc& residue, int M,
                             const std::vector<long long>& eis = {});
// Same, but over an explicit (non-tower) residue presentation.
LocalRingPtr make_local_ring_explicit(detail::FieldCtxPtr residue_ctx, int M,
                                      const std::vector<long long>& eis = {});

class LocalInt {
  public:
    LocalInt() = default;

    static LocalInt zero(const LocalRingPtr& r);
    static LocalInt one(const LocalRingPtr& r);
    static LocalInt from_int(const LocalRingPtr& r, long long v);
    static LocalInt uniformizer(const LocalRingPtr& r);           // pi
    static LocalInt teichmuller(const LocalRingPtr& r, const FieldElem& a);

    const LocalRingPtr& ring() const { return r_; }

    LocalInt operator+(const LocalInt& o) const;
    LocalInt operator-(const LocalInt& o) const;
    LocalInt operator*(const LocalInt& o) const;
    LocalInt operator-() const;
    LocalInt inv() const;           // unit required
    LocalInt pow(long long e) const;

    // pi-adic valuation, capped at the ring precision M
    int valuation() const;
    bool is_zero() const;           // zero at precision, i.e. valuation >= M
    bool is_unit() const { return valuation() == 0; }

    FieldElem reduce() const;       // image in the residue field

    // exact division by pi^k; requires valuation >= k. The top k pi-digits
    // of the result are beyond the ring precision.
    LocalInt div_pi(int k = 1) const;

    // coefficientwise Frobenius lift sigma^k of the unramified layer
    // (fixes S and Z_p); k counts p-power iterates.
    LocalInt frobenius(int k) const;

    // Teichmüller pi-digit expansion, length M.
    std::vector<FieldElem> digits() const;

    bool eq(const LocalInt& o) const;          // equal at the ring precision
    bool eq_mod(const LocalInt& o, int k) const;  // equal mod pi^k
    LocalInt truncate_mod(int k) const;            // canonical representative mod pi^k
    std::string to_text() const;       // "loc(p,f,e):[d0,...,d_{M-1}] * pi^v"

    // raw access for the series/linear layers
    const std::vector<std::vector<long long>>& raw() const { return c_; }
    static LocalInt from_raw(const LocalRingPtr& r, std::vector<std::vector<long long>> c);

  private:
    LocalRingPtr r_;
    // c_[i] = S^i coefficient, a T-polynomial over Z/p^Mp (length = residue degree)
    std::vector<std::vector<long long>> c_;
};

// ring descriptor queries
int ring_precision(const LocalRingPtr& r);        // M
int ring_ramification(const LocalRingPtr& r);     // e
const FieldDesc& ring_residue(const LocalRingPtr& r);
int ring_p(const LocalRingPtr& r);
detail::FieldCtxPtr ring_residue_ctx(const LocalRingPtr& r);
// modulus p^Mp of the unramified-layer coefficients
long long ring_coeff_modulus(const LocalRingPtr& r);
// integer Eisenstein coefficients (empty for unramified rings)
const std::vector<long long>& ring_eisenstein(const LocalRingPtr& r);

// --- coefficient-ring handle -------------------------------------------------

struct LocalRing {
    using Elem = LocalInt;
    LocalRingPtr ctx;

    Elem zero() const { return LocalInt::zero(ctx); }
    Elem one() const { return LocalInt::one(ctx); }
    Elem from_int(long long v) const { return LocalInt::from_int(ctx, v); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem inv(const Elem& a) const { return a.inv(); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool is_unit(const Elem& a) const { return a.is_unit(); }
    bool eq(const Elem& a, const Elem& b) const { return a.eq(b); }
    std::string coeff_text(const Elem& a) const { return a.to_text(); }
    friend bool operator==(const LocalRing& a, const LocalRing& b) { return a.ctx == b.ctx; }
};

// --- extensions K/F -----------------------------------------------------------

// K/F presented as unramified-then-Eisenstein, with O_K free over O_F.
struct ExtKF {
    LocalRingPtr F;
    LocalRingPtr K;
    int s = 1;       // inertia (residue) degree
    int e_rel = 1;   // relative ramification; [K:F] = s * e_rel
};

// Unramified extension of residue degree s (keeps any Eisenstein layer of F).
ExtKF make_unramified_ext(const LocalRingPtr& F, int s);
// Eisenstein extension of an unramified F by E(S) = S^e + ... + c_0.
ExtKF make_eisenstein_ext(const LocalRingPtr& F, const std::vector<long long>& eis);
// Unramified of degree s followed by Eisenstein (F unramified).
ExtKF make_mixed_ext(const LocalRingPtr& F, int s, const std::vector<long long>& eis);

// Move x in O_F into O_K.
LocalInt ext_embed(const ExtKF& ext, const LocalInt& x);

// Rebuild x in another presentation of the same ring shape (same residue
// field and Eisenstein data, possibly different precision).
LocalInt move_ring(const LocalInt& x, const LocalRingPtr& target);

// N_{K/F}(x): determinant of multiplication by x on the O_F-basis of O_K.
// Throws PrecisionError when the result vanishes at precision.
LocalInt norm(const LocalInt& x, const ExtKF& ext);

// True iff N_{K/F}(varpi) = pi^s exactly at precision, where s is the
// inertia degree. Inputs must be uniformizers of their rings.
bool lt_extension_criterion(const LocalInt& pi, const LocalInt& varpi, const ExtKF& ext);

}  // namespace phigamma
