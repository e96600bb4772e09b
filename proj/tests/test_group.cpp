#include <doctest.h>

#include "bbbvote/errors.hpp"
#include "bbbvote/group.hpp"
#include "bbbvote/rng.hpp"
#include "oracle.hpp"

using namespace bbbvote;

namespace {

long as_long(const mpz_class& v) { return v.get_si(); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kParse;
}

}  // namespace

TEST_CASE("choice spacing is the smallest m with 2^m > n") {
  CHECK(choice_spacing(3) == 2);
  CHECK(choice_spacing(4) == 3);
  CHECK(choice_spacing(7) == 3);
  CHECK(choice_spacing(8) == 4);
  CHECK(choice_spacing(50) == 6);
}

TEST_CASE("IA test-small choice generators") {
  auto params = derive_params(BackendKind::kIA, SecurityProfile::kTestSmall, 3, 3);
  CHECK(params->m == 2);
  REQUIRE(params->choice_generators.size() == 3);
  for (unsigned l = 1; l <= 3; ++l) {
    CHECK(as_long(params->choice_generators[l - 1].x()) ==
          oracle::powmod(5, 1L << ((l - 1) * 2), 23));
  }
  CHECK(as_long(params->choice_generators[0].x()) == 5);
  CHECK(as_long(params->choice_generators[1].x()) == 4);
  CHECK(as_long(params->choice_generators[2].x()) == 3);
  // 3 * 2^4 = 48 exceeds the group order 22.
  CHECK_FALSE(params->unique_decoding);
  CHECK(derive_params(BackendKind::kIA, SecurityProfile::kTestSmall, 3, 2)->unique_decoding);
}

TEST_CASE("derive_params preconditions") {
  CHECK(code_of([] { derive_params(BackendKind::kIA, SecurityProfile::kTestSmall, 2, 2); }) ==
        ErrorCode::kPrivacyPrecondition);
  CHECK(code_of([] { derive_params(BackendKind::kEC, SecurityProfile::kProduction, 5, 1); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] {
          derive_params(BackendKind::kEC, SecurityProfile::kProduction2048, 5, 2);
        }) == ErrorCode::kInvalidArgument);
  // f_l would wrap around the 22-element group.
  CHECK(code_of([] { derive_params(BackendKind::kIA, SecurityProfile::kTestSmall, 3, 4); }) ==
        ErrorCode::kParameterOverflow);
  CHECK(code_of([] { derive_params(BackendKind::kEC, SecurityProfile::kTestSmall, 100, 4); }) ==
        ErrorCode::kParameterOverflow);
}

TEST_CASE("production parameters are well formed") {
  auto ia = derive_params(BackendKind::kIA, SecurityProfile::kProduction, 10, 4);
  CHECK(mpz_sizeinbase(ia->modulus.get_mpz_t(), 2) == 1024);
  CHECK(ia->unique_decoding);
  auto ia2 = derive_params(BackendKind::kIA, SecurityProfile::kProduction2048, 10, 4);
  CHECK(mpz_sizeinbase(ia2->modulus.get_mpz_t(), 2) == 2048);
  auto ec = derive_params(BackendKind::kEC, SecurityProfile::kProduction, 10, 4);
  CHECK(ec->name == "secp256k1");
  CHECK(ec->choice_generators.size() == 4);
  CHECK(ec->unique_decoding);
}

TEST_CASE("IA exponentiation and inversion match brute force on p=23") {
  auto params = derive_params(BackendKind::kIA, SecurityProfile::kTestSmall, 3, 2);
  Group g(params);
  for (long e = 0; e < 22; ++e) {
    const Element r = g.exp(g.generator(), params->scalar(e));
    const long want = oracle::powmod(5, e, 23);
    if (want == 1) {
      CHECK(g.is_identity(r));
    } else {
      CHECK(as_long(r.x()) == want);
    }
  }
  const Element eleven = Element::residue(11);
  CHECK(as_long(g.inv(eleven).x()) == 21);
  CHECK(as_long(g.inv(eleven).x()) == oracle::inv_brute(11, 23));
  CHECK(as_long(g.exp(g.generator(), params->scalar(9)).x()) == 11);
  CHECK(as_long(g.exp(g.generator(), params->scalar(12)).x()) == 18);
}

TEST_CASE("EC test-small arithmetic matches the reference curve") {
  auto params = derive_params(BackendKind::kEC, SecurityProfile::kTestSmall, 6, 2);
  oracle::Curve curve;
  CHECK(as_long(params->modulus) == curve.p);
  CHECK(as_long(params->generator_order) == curve.order);

  Rng rng(99);
  for (Coords coords : {Coords::kAffine, Coords::kJacobi}) {
    Group g(params, coords);
    for (int t = 0; t < 50; ++t) {
      const long s = static_cast<long>(rng.below(curve.order).get_si());
      const auto want = curve.mul(curve.g, s);
      const Element got = g.to_affine(g.exp(g.generator(), params->scalar(s)));
      if (!want) {
        CHECK(got.is_infinity());
        continue;
      }
      CHECK(as_long(got.x()) == want->first);
      CHECK(as_long(got.y()) == want->second);
    }
  }
  // G has the stated order.
  Group g(params);
  CHECK(g.is_identity(g.exp(g.generator(), Scalar(mpz_class(curve.order)))));
  CHECK_FALSE(curve.mul(curve.g, curve.order - 1) == std::nullopt);
}

TEST_CASE("EC choice generators are doublings of G") {
  auto params = derive_params(BackendKind::kEC, SecurityProfile::kTestSmall, 6, 3);
  oracle::Curve curve;
  for (unsigned l = 1; l <= 3; ++l) {
    const auto want = curve.mul(curve.g, 1L << ((l - 1) * params->m));
    CHECK(as_long(params->choice_generators[l - 1].x()) == want->first);
    CHECK(as_long(params->choice_generators[l - 1].y()) == want->second);
  }
}

TEST_CASE("simultaneous exponentiation equals the product of two exponentiations") {
  for (auto backend : {BackendKind::kIA, BackendKind::kEC}) {
    auto params = derive_params(backend, SecurityProfile::kProduction, 5, 2);
    Group g(params);
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
      const Scalar a = rng.nonzero_scalar(*params);
      const Scalar b = rng.nonzero_scalar(*params);
      const Element q = g.exp(g.generator(), rng.nonzero_scalar(*params));
      const Element joint = g.simul_exp(g.generator(), a, q, b);
      const Element separate = g.op(g.exp(g.generator(), a), g.exp(q, b));
      CHECK(g.equal(joint, separate));
    }
  }
}

TEST_CASE("Jacobi and affine coordinates agree on secp256k1") {
  auto params = derive_params(BackendKind::kEC, SecurityProfile::kProduction, 5, 2);
  Group jac(params, Coords::kJacobi);
  Group aff(params, Coords::kAffine);
  Rng rng(8);
  for (int t = 0; t < 5; ++t) {
    const Scalar s = rng.nonzero_scalar(*params);
    const Element a = aff.exp(aff.generator(), s);
    const Element j = jac.to_affine(jac.exp(jac.generator(), s));
    CHECK(a.x() == j.x());
    CHECK(a.y() == j.y());
  }
  // Known multiple: 2G on secp256k1.
  const Element two = aff.exp(aff.generator(), params->scalar(2));
  CHECK(two.x() == mpz_class("c6047f9441ed7d6d3045406e95c07cd85c778e4b8cef3ca7abac09b95c709ee5", 16));
}

TEST_CASE("identity handling") {
  for (auto backend : {BackendKind::kIA, BackendKind::kEC}) {
    auto params = derive_params(backend, SecurityProfile::kTestSmall, 3, 2);
    Group g(params);
    const Element x = g.exp(g.generator(), params->scalar(7));
    CHECK(g.equal(g.op(x, g.inv(x)), g.identity()));
    CHECK(g.equal(g.op(x, g.identity()), x));
    CHECK(g.is_identity(g.exp(x, params->scalar(0))));
  }
}

TEST_CASE("canonical encoding round-trips and decoding is strict") {
  for (auto backend : {BackendKind::kIA, BackendKind::kEC}) {
    auto params = derive_params(backend, SecurityProfile::kProduction, 5, 2);
    Group g(params);
    Rng rng(3);
    const Element x = g.exp(g.generator(), rng.nonzero_scalar(*params));
    const Bytes b = g.canonical_bytes(x);
    CHECK(g.equal(g.decode_element(b), x));
    CHECK(g.canonical_bytes(g.decode_element(b)) == b);
    const Bytes id = g.canonical_bytes(g.identity());
    CHECK(std::all_of(id.begin(), id.end(), [](auto v) { return v == 0; }));
    CHECK(g.is_identity(g.decode_element(id)));
    Bytes short_b(b.begin(), b.end() - 1);
    CHECK_THROWS_AS(g.decode_element(short_b), Error);
    const Scalar s = rng.nonzero_scalar(*params);
    CHECK(g.decode_scalar(g.canonical_bytes(s)) == s);
  }
  // IA: the residue 1 must use the zero sentinel.
  auto p23 = derive_params(BackendKind::kIA, SecurityProfile::kTestSmall, 3, 2);
  Group g(p23);
  CHECK_THROWS_AS(g.decode_element(Bytes{0x01}), Error);
  CHECK_THROWS_AS(g.decode_element(Bytes{23}), Error);
  // EC: a point off the curve.
  auto ec = derive_params(BackendKind::kEC, SecurityProfile::kTestSmall, 3, 2);
  Group e(ec);
  Bytes off = e.canonical_bytes(e.generator());
  off.back() ^= 1;
  CHECK_THROWS_AS(e.decode_element(off), Error);
}

TEST_CASE("inverse hints replace the field inversion") {
  auto params = derive_params(BackendKind::kEC, SecurityProfile::kProduction, 5, 2);
  Group g(params, Coords::kJacobi);
  Rng rng(4);
  const Element p = g.exp(g.generator(), rng.nonzero_scalar(*params));
  REQUIRE(p.is_jacobi());
  const mpz_class hint = g.inverse_hint(p);
  g.counter_reset();
  auto n = g.to_affine(p, hint);
  REQUIRE(n.has_value());
  CHECK(g.counter_snapshot().field_inversions == 0);
  CHECK(g.equal(*n, p));
  CHECK_FALSE(g.to_affine(p, hint + 1).has_value());
  CHECK_FALSE(g.to_affine(g.to_affine(p), mpz_class(5)).has_value());
  CHECK(g.to_affine(g.to_affine(p), mpz_class(0)).has_value());
}

TEST_CASE("matches compares without inverting") {
  auto params = derive_params(BackendKind::kEC, SecurityProfile::kProduction, 5, 2);
  Group g(params, Coords::kJacobi);
  const Element p = g.exp(g.generator(), params->scalar(12345));
  const Element target = g.to_affine(p);
  g.counter_reset();
  CHECK(g.matches(p, target));
  CHECK_FALSE(g.matches(g.op(p, g.generator()), target));
  CHECK(g.counter_snapshot().field_inversions == 0);
}

TEST_CASE("affine EC additions each cost one inversion") {
  auto params = derive_params(BackendKind::kEC, SecurityProfile::kProduction, 5, 2);
  Group g(params, Coords::kAffine);
  const Element a = g.exp(g.generator(), params->scalar(3));
  const Element b = g.exp(g.generator(), params->scalar(5));
  g.counter_reset();
  g.op(a, b);
  CHECK(g.counter_snapshot().field_inversions == 1);
  CHECK(g.counter_snapshot().group_mults == 1);
}

TEST_CASE("params document lists fields in decimal") {
  auto params = derive_params(BackendKind::kIA, SecurityProfile::kTestSmall, 3, 2);
  const std::string doc = params_document(*params);
  CHECK(doc.find("\"p\"") != std::string::npos);
  CHECK(doc.find("\"23\"") != std::string::npos);
  CHECK(doc.find("choice_generators") != std::string::npos);
}
