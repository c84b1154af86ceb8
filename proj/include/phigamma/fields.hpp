#pragma once

// Deterministic finite-field towers F_{p^m} with compatible embeddings,
// Frobenius iterates, splitting extensions, and solvers for the constant
// semilinear equation x^(p^e) = A x.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phigamma/errors.hpp"

namespace phigamma {

struct FieldDesc {
    int p = 0;
    int m = 0;
    std::vector<int> modulus;  // monic, size m+1, coefficients in [0,p)

    friend bool operator==(const FieldDesc&, const FieldDesc&) = default;
};

// Deterministic field constructor. The same (p,m) always yields the same
// modulus: for m = 1 it is T; for m >= 2 it is the least (by integer code
// with the constant term least significant) monic irreducible polynomial
// whose root is primitive and which is norm-compatible with the moduli of
// all proper divisors of m, so that the power-map embeddings commute.
FieldDesc make_field(int p, int m);

namespace detail {
// shared per-field data: modulus plus precomputed reduction rows
struct FieldCtx {
    int p = 0;
    int m = 0;
    std::vector<int> modulus;
    std::vector<std::vector<int>> red;  // residues of T^(m+k), k = 0..m-2
    FieldDesc desc;
};
using FieldCtxPtr = std::shared_ptr<const FieldCtx>;
FieldCtxPtr field_ctx(const FieldDesc& d);
// Context for an explicit modulus that is not part of the deterministic
// tower (used for flattened splitting fields).
FieldCtxPtr field_ctx_explicit(int p, const std::vector<int>& modulus);
}  // namespace detail

class FieldElem {
  public:
    FieldElem() = default;

    static FieldElem zero(const FieldDesc& d);
    static FieldElem one(const FieldDesc& d);
    static FieldElem from_int(const FieldDesc& d, long long v);
    static FieldElem from_coeffs(const FieldDesc& d, std::vector<int> c);
    static FieldElem from_code(const FieldDesc& d, long long code);

    const FieldDesc& desc() const;
    const std::vector<int>& coeffs() const { return c_; }
    int p() const;
    int degree() const;  // m of the ambient field

    bool is_zero() const;
    bool is_one() const;
    bool is_unit() const { return !is_zero(); }

    FieldElem operator+(const FieldElem& o) const;
    FieldElem operator-(const FieldElem& o) const;
    FieldElem operator*(const FieldElem& o) const;
    FieldElem operator-() const;
    FieldElem inv() const;
    FieldElem pow(long long e) const;       // e >= 0
    FieldElem frobenius(int e) const;       // x^(p^e), e >= 0
    long long code() const;                 // sum c_i p^i; canonical order
    std::string to_text() const;            // "ff(p,m):[d0,d1,...]"
    std::string coeff_text() const;         // "[d0,d1,...]"

    friend bool operator==(const FieldElem& a, const FieldElem& b);
    friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

    // internal: shared context accessor
    const detail::FieldCtxPtr& ctx() const { return ctx_; }
    static FieldElem from_ctx(detail::FieldCtxPtr ctx, std::vector<int> c);

  private:
    detail::FieldCtxPtr ctx_;
    std::vector<int> c_;  // length m, entries in [0,p)
};

// Canonical embedding F_{p^d} -> F_{p^m} for d | m. Embeddings commute.
FieldElem embed(const FieldElem& x, const FieldDesc& target);

// All field elements in canonical (code) order.
std::vector<FieldElem> all_elements(const FieldDesc& d);

// Least-code element generating the multiplicative group. For m >= 2 this
// is the class of T (primitive by construction); for m = 1 the least
// primitive root mod p (1 when p = 2).
FieldElem multiplicative_generator(const FieldDesc& d);

// The class of T. Only meaningful as a field generator for m >= 2.
FieldElem field_generator(const FieldDesc& d);

// --- coefficient-ring handle over a finite field ---------------------------

struct GFRing {
    using Elem = FieldElem;
    FieldDesc desc;

    Elem zero() const { return FieldElem::zero(desc); }
    Elem one() const { return FieldElem::one(desc); }
    Elem from_int(long long v) const { return FieldElem::from_int(desc, v); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem inv(const Elem& a) const { return a.inv(); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool is_unit(const Elem& a) const { return a.is_unit(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    std::string coeff_text(const Elem& a) const { return a.coeff_text(); }
    std::string name() const;
    friend bool operator==(const GFRing&, const GFRing&) = default;
};

// --- dense linear algebra mod p --------------------------------------------

struct FpMat {
    int p = 0;
    int rows = 0;
    int cols = 0;
    std::vector<int> a;  // row-major

    int& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    int at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
    static FpMat zero(int p, int r, int c);
};

int fp_rank(FpMat m);
// Kernel basis in reduced echelon (canonical, deterministic) form.
std::vector<std::vector<int>> fp_kernel_basis(const FpMat& m);
// One solution of m x = rhs, or nullopt if inconsistent.
std::optional<std::vector<int>> fp_solve(const FpMat& m, const std::vector<int>& rhs);

// --- splitting extensions ---------------------------------------------------

namespace detail {
struct ExtCtx;
}
using ExtPtr = std::shared_ptr<const detail::ExtCtx>;

// F_{q^ell} over base = F_q, presented by the least-code monic irreducible
// polynomial of degree ell over F_q. ell = 1 gives the base itself.
ExtPtr make_extension(const FieldDesc& base, int ell);

class ExtElem {
  public:
    ExtElem() = default;
    static ExtElem zero(const ExtPtr& e);
    static ExtElem one(const ExtPtr& e);
    static ExtElem from_base(const ExtPtr& e, const FieldElem& a);  // scalar
    static ExtElem gen(const ExtPtr& e);  // class of the extension variable
    static ExtElem from_coeffs(const ExtPtr& e, std::vector<FieldElem> c);

    const ExtPtr& ctx() const { return ctx_; }
    const std::vector<FieldElem>& coeffs() const { return c_; }

    bool is_zero() const;
    bool is_unit() const { return !is_zero(); }
    ExtElem operator+(const ExtElem& o) const;
    ExtElem operator-(const ExtElem& o) const;
    ExtElem operator*(const ExtElem& o) const;
    ExtElem operator-() const;
    ExtElem inv() const;
    ExtElem pow(long long e) const;
    ExtElem frobenius(int e) const;  // x^(p^e)

    // F_p-coordinates, length ell*m, deterministic basis order.
    std::vector<int> fp_coords() const;
    static ExtElem from_fp_coords(const ExtPtr& e, const std::vector<int>& v);

    friend bool operator==(const ExtElem& a, const ExtElem& b);
    friend bool operator!=(const ExtElem& a, const ExtElem& b) { return !(a == b); }

  private:
    ExtPtr ctx_;
    std::vector<FieldElem> c_;  // length ell over the base field
};

// coefficient-ring handle over a splitting extension
struct ExtRing {
    using Elem = ExtElem;
    ExtPtr ext;

    Elem zero() const { return ExtElem::zero(ext); }
    Elem one() const { return ExtElem::one(ext); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem inv(const Elem& a) const { return a.inv(); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool is_unit(const Elem& a) const { return a.is_unit(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    std::string coeff_text(const Elem& a) const;
    friend bool operator==(const ExtRing& a, const ExtRing& b) { return a.ext == b.ext; }
};

int ext_degree(const ExtPtr& e);           // ell
const FieldDesc& ext_base(const ExtPtr& e);
int ext_fp_dim(const ExtPtr& e);           // ell * m
// All elements in deterministic order (odometer over base codes). Use only
// when q^ell is small.
std::vector<ExtElem> ext_all_elements(const ExtPtr& e);
// Minimal polynomial over F_p of x (coefficients in [0,p), monic).
std::vector<int> ext_minpoly_fp(const ExtElem& x);

// --- constant semilinear solver ---------------------------------------------

struct SemilinearSolution {
    ExtPtr ext;                                  // solutions live in base⊗ext
    int tries = 0;                               // extension steps examined
    std::vector<std::vector<ExtElem>> basis;     // d vectors, independent over F_{p^e}
    long long count = 0;                         // p^{e·d}
    bool via_bruteforce = false;
};

// Solve x^(p^e) = A x for A a d x d invertible matrix over F_{p^m}.
// Returns a basis of the solution space over the fixed field F_{p^e}
// inside a splitting extension. Brute-force enumeration is used below a
// size threshold; otherwise the F_p-linearization of the equation.
// Throws NotEtaleError when A is singular.
SemilinearSolution solve_semilinear_const(const std::vector<std::vector<FieldElem>>& A, int e);

// Enumeration oracle: all solutions of x^(p^e) = A x with entries in the
// given extension, in deterministic order. Independent of the main path.
std::vector<std::vector<ExtElem>> semilinear_enumerate(
    const std::vector<std::vector<FieldElem>>& A, int e, const ExtPtr& ext);

// Matrix of the map x -> x^(p^e) on the fixed-field basis of `sol.basis`'s
// span (the recovered Galois generator). Entries land in the fixed field
// F_{p^e}, returned as elements of the corresponding tower field.
std::vector<std::vector<FieldElem>> semilinear_sigma_matrix(const SemilinearSolution& sol, int e);

// One solution of x^(p^e) - A x = rhs with everything inside the given
// extension, or nullopt when the level is too small. The zero right-hand
// side always returns the zero solution (deterministic particular solution).
std::optional<std::vector<ExtElem>> semilinear_affine_solve(
    const std::vector<std::vector<ExtElem>>& A, int e, const std::vector<ExtElem>& rhs);

// det over a field-like element type is provided in matrix.hpp.

}  // namespace phigamma
