#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbbvote/bytes.hpp"
#include "bbbvote/op_counter.hpp"

namespace bbbvote {

enum class BackendKind { kIA, kEC };

// test-small: p = 23 / tiny curve, so oracles can enumerate the whole group.
// production: 1024-bit safe prime / secp256k1. production-2048: IA only.
enum class SecurityProfile { kTestSmall, kProduction, kProduction2048 };

// Internal EC coordinates. Ignored by the IA backend.
enum class Coords { kAffine, kJacobi };

const char* to_string(BackendKind kind);
const char* to_string(SecurityProfile profile);
const char* to_string(Coords coords);
BackendKind parse_backend(const std::string& s);
SecurityProfile parse_profile(const std::string& s);
Coords parse_coords(const std::string& s);

// Exponent / scalar, always reduced modulo the group's exponent order.
class Scalar {
 public:
  Scalar() = default;
  explicit Scalar(mpz_class v) : v_(std::move(v)) {}

  const mpz_class& value() const { return v_; }
  bool is_zero() const { return v_ == 0; }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }

 private:
  mpz_class v_;
};

// A group element. IA elements are residues; EC points are affine (x, y),
// Jacobi (X, Y, Z) with x = X/Z^2, y = Y/Z^3, or the point at infinity.
// Representation-level equality is not group equality for Jacobi points; use
// Group::equal.
class Element {
 public:
  enum class Form : std::uint8_t { kResidue, kAffine, kJacobi, kInfinity };

  Element() : form_(Form::kInfinity) {}

  static Element residue(mpz_class v) { return Element(Form::kResidue, std::move(v), 0, 0); }
  static Element affine(mpz_class x, mpz_class y) {
    return Element(Form::kAffine, std::move(x), std::move(y), 1);
  }
  static Element jacobi(mpz_class x, mpz_class y, mpz_class z) {
    return Element(Form::kJacobi, std::move(x), std::move(y), std::move(z));
  }
  static Element infinity() { return Element(); }

  Form form() const { return form_; }
  bool is_infinity() const { return form_ == Form::kInfinity; }
  bool is_jacobi() const { return form_ == Form::kJacobi; }
  const mpz_class& x() const { return x_; }
  const mpz_class& y() const { return y_; }
  const mpz_class& z() const { return z_; }

 private:
  Element(Form f, mpz_class x, mpz_class y, mpz_class z)
      : form_(f), x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {}

  Form form_;
  mpz_class x_, y_, z_;
};

struct GroupParams {
  BackendKind backend = BackendKind::kIA;
  SecurityProfile profile = SecurityProfile::kTestSmall;
  std::string name;  // "ia-23", "ia-1024", "secp256k1", ...

  mpz_class modulus;  // IA: safe prime p. EC: field prime.
  mpz_class a, b;  // EC curve coefficients, y^2 = x^3 + a x + b
  mpz_class cofactor;  // EC only
  Element generator;
  // Exponents are reduced modulo this: p - 1 for IA, nn for EC.
  mpz_class exponent_order;
  // Multiplicative order of g (IA: q or 2q) or nn (EC).
  mpz_class generator_order;

  unsigned n = 0;  // participants
  unsigned k = 0;  // choices
  unsigned m = 0;  // smallest integer with 2^m > n
  std::vector<Element> choice_generators;  // f_1..f_k (affine for EC)
  std::vector<Element> choice_inverses;  // f_l^{-1}

  // True when n * 2^((k-1)m) < ord(g), i.e. every count vector maps to a
  // distinct group element and exhaustive tally search has a unique answer.
  bool unique_decoding = false;

  std::size_t element_width() const;  // bytes per field/residue coordinate
  std::size_t scalar_width() const;

  Scalar scalar(const mpz_class& v) const;
  Scalar scalar(long v) const { return scalar(mpz_class(v)); }
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
};

// Builds parameters for n participants and k choices and checks every
// invariant (safe prime, generator order, curve equation, distinct f_l).
std::shared_ptr<const GroupParams> derive_params(BackendKind backend,
                                                 SecurityProfile profile,
                                                 unsigned n, unsigned k);

// Smallest m with 2^m > n.
unsigned choice_spacing(unsigned n);

// Structured text document (JSON, decimal big integers).
std::string params_document(const GroupParams& params);

// Arithmetic context over shared immutable parameters. Every operation is
// metered into this context's OpCounter, so give each worker its own copy.
class Group {
 public:
  explicit Group(std::shared_ptr<const GroupParams> params,
                 Coords coords = Coords::kJacobi);

  const GroupParams& params() const { return *params_; }
  const std::shared_ptr<const GroupParams>& shared_params() const { return params_; }
  BackendKind backend() const { return params_->backend; }
  Coords coords() const { return coords_; }
  bool uses_jacobi() const {
    return params_->backend == BackendKind::kEC && coords_ == Coords::kJacobi;
  }

  Element identity() const;
  const Element& generator() const { return params_->generator; }
  const Element& choice_generator(unsigned l) const;  // 1-based

  bool is_identity(const Element& a) const;
  bool is_valid(const Element& a) const;

  Element op(const Element& a, const Element& b);
  Element inv(const Element& a);
  Element div(const Element& a, const Element& b) { return op(a, inv(b)); }
  Element exp(const Element& base, const Scalar& s);
  // exp(P, s1) * exp(Q, s2) by one interleaved ladder.
  Element simul_exp(const Element& p, const Scalar& s1, const Element& q,
                    const Scalar& s2);

  // Normalizes a Jacobi point with one field inversion. No-op otherwise.
  Element to_affine(const Element& a);
  // Normalizes using a caller-supplied inverse of Z. The hint must be 0 for
  // points that need no normalization. Returns nullopt for a bad hint.
  std::optional<Element> to_affine(const Element& a, const mpz_class& hint);
  bool verify_inverse_hint(const mpz_class& x, const mpz_class& hint);
  // Prover-side: the hint to_affine(a, hint) expects.
  mpz_class inverse_hint(const Element& a);

  // Group equality; Jacobi operands are normalized first.
  bool equal(const Element& a, const Element& b);
  // Equality against an affine target by cross-multiplication, no inversion.
  bool matches(const Element& a, const Element& affine_target);

  Bytes canonical_bytes(const Element& a);
  Bytes canonical_bytes(const Scalar& s) const;
  // Strict inverse of canonical_bytes; throws kMalformed.
  Element decode_element(std::span<const std::uint8_t> data) const;
  Scalar decode_scalar(std::span<const std::uint8_t> data) const;
  mpz_class decode_field(std::span<const std::uint8_t> data) const;
  Bytes field_bytes(const mpz_class& v) const;

  void count_hash() { counter_.hashes++; }
  OpCounter counter_snapshot() const { return counter_; }
  void counter_reset() { counter_ = OpCounter{}; }

 private:
  mpz_class fmul(const mpz_class& a, const mpz_class& b);
  mpz_class fsqr(const mpz_class& a) { return fmul(a, a); }
  mpz_class finv(const mpz_class& a);
  mpz_class fred(const mpz_class& a) const;

  Element ec_add(const Element& a, const Element& b);
  Element ec_double(const Element& a);
  Element ec_neg(const Element& a) const;
  Element affine_add(const Element& a, const Element& b);
  Element affine_double(const Element& a);
  Element jacobi_add(const Element& a, const Element& b);
  Element jacobi_double(const Element& a);

  std::shared_ptr<const GroupParams> params_;
  Coords coords_;
  OpCounter counter_;
};

}  // namespace bbbvote
